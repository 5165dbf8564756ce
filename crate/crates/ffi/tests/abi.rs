//! Exercises the C ABI from Rust and, when a C compiler is available, from C.

use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use uplink_noma::channel::Scenario;
use uplink_noma::{full_csit, no_csit, Strategy};
use uplink_noma_ffi::*;

struct Handle(*mut NomaScenario);

impl Handle {
    fn new(p1: f64, p2: f64, gamma_db: f64, rho_db: f64) -> Self {
        let mut h = ptr::null_mut();
        let status = unsafe { noma_scenario_new(p1, p2, gamma_db, rho_db, &mut h) };
        assert_eq!(status, NomaStatus::Ok, "{}", last_error());
        assert!(!h.is_null());
        Handle(h)
    }
}

impl Drop for Handle {
    fn drop(&mut self) {
        unsafe { noma_scenario_free(self.0) };
    }
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(noma_last_error()) }.to_string_lossy().into_owned()
}

fn operating_point() -> (Handle, Scenario) {
    (Handle::new(0.1, 0.9, 10.0, 20.0), Scenario::from_db(0.1, 0.9, 10.0, 20.0).unwrap())
}

#[test]
fn values_match_the_library() {
    let (h, s) = operating_point();
    let mut t = NomaTriple::default();
    for (c, r) in [
        (NomaStrategy::Oma, Strategy::Oma),
        (NomaStrategy::Noma, Strategy::Noma),
        (NomaStrategy::NomaA, Strategy::NomaA),
    ] {
        assert_eq!(unsafe { noma_rates(h.0, c, &mut t) }, NomaStatus::Ok);
        let want = full_csit::rates(&s, r);
        assert_eq!((t.weak, t.strong, t.sum), (want.r_weak, want.r_strong, want.r_sum));
        assert_eq!(unsafe { noma_throughput(h.0, c, &mut t) }, NomaStatus::Ok);
        assert_eq!(t.sum, no_csit::throughput(&s, r).t_sum);
        let mut a = 0.0;
        assert_eq!(unsafe { noma_activity(h.0, c, &mut a) }, NomaStatus::Ok);
        assert_eq!(a, full_csit::activity_probability(&s, r));
    }
    let mut phi = 0.0;
    assert_eq!(unsafe { noma_phi(h.0, NomaPhi::OmaStrong, &mut phi) }, NomaStatus::Ok);
    assert_eq!(phi, no_csit::phi_oma_strong(&s));
    let mut choice = NomaStrategy::NomaA;
    assert_eq!(unsafe { noma_select_no_csit(h.0, &mut choice) }, NomaStatus::Ok);
    assert_eq!(choice, NomaStrategy::Oma, "OMA wins the sum throughput at 20 dB");
}

#[test]
fn kernels() {
    let mut v = 0.0;
    assert_eq!(unsafe { noma_e1(1.0, &mut v) }, NomaStatus::Ok);
    assert!((v - 0.219_383_934_395_520_27).abs() < 1e-13 * v);
    assert_eq!(unsafe { noma_e1(0.0, &mut v) }, NomaStatus::InvalidArgument);
    assert!(last_error().contains('x'));
    assert_eq!(unsafe { noma_alpha(10.0, 1.0, 100.0, &mut v) }, NomaStatus::Ok);
    assert!(v > 0.0);
    let version = unsafe { CStr::from_ptr(noma_version()) }.to_str().unwrap();
    assert_eq!(version, env!("CARGO_PKG_VERSION"));
}

#[test]
fn decisions() {
    let (h, _) = operating_point();
    let mut d = NomaDecision {
        mode: NomaMode::Idle,
        active_weak: false,
        active_strong: false,
        rate_weak: 0.0,
        rate_strong: 0.0,
    };
    // argument order does not matter
    assert_eq!(unsafe { noma_decide(h.0, 100.0, 5.0, &mut d) }, NomaStatus::Ok);
    assert_eq!(d.mode, NomaMode::NomaBoth);
    assert!(d.active_weak && d.active_strong && d.rate_weak > 0.0);
    assert_eq!(unsafe { noma_decide(h.0, 0.0, 0.0, &mut d) }, NomaStatus::Ok);
    assert_eq!(d.mode, NomaMode::Idle);
    assert_eq!(unsafe { noma_decide(h.0, -1.0, 0.0, &mut d) }, NomaStatus::InvalidArgument);
}

#[test]
fn crossovers() {
    let (h, s) = operating_point();
    let mut r = 0.0;
    assert_eq!(unsafe { noma_rho_min(h.0, NomaUser::Strong, &mut r) }, NomaStatus::Ok);
    assert_eq!(r, no_csit::rho_min(&s, uplink_noma::UserTarget::Strong).unwrap());
    let flat = Handle::new(0.1, 0.9, 0.0, 20.0);
    assert_eq!(unsafe { noma_rho_min(flat.0, NomaUser::Weak, &mut r) }, NomaStatus::NoCrossover);
    assert!(r.is_infinite());
}

#[test]
fn monte_carlo_and_quadrature() {
    let (h, s) = operating_point();
    let (mut t, mut r) = (NomaMcTriple::default(), NomaMcTriple::default());
    assert_eq!(unsafe { noma_mc_two_user(h.0, NomaStrategy::Noma, 200_000, 9, &mut t, &mut r) }, NomaStatus::Ok);
    let exact = full_csit::rates(&s, Strategy::Noma).r_sum;
    assert!((r.sum.mean - exact).abs() < 5.0 * r.sum.std_error);
    assert_eq!(unsafe { noma_mc_two_user(h.0, NomaStrategy::Noma, 10, 9, &mut t, &mut r) }, NomaStatus::InvalidArgument);

    let id = CString::new("rate_noma_a_strong").unwrap();
    let mut q = NomaQuadCheck::default();
    assert_eq!(unsafe { noma_quad_verify(h.0, id.as_ptr(), &mut q) }, NomaStatus::Ok);
    assert!(q.rel_err < 1e-9);
    let bad = CString::new("nope").unwrap();
    assert_eq!(unsafe { noma_quad_verify(h.0, bad.as_ptr(), &mut q) }, NomaStatus::InvalidArgument);
    assert!(last_error().contains("nope"));
}

#[test]
fn null_and_invalid_arguments() {
    let (h, _) = operating_point();
    let mut t = NomaTriple::default();
    assert_eq!(unsafe { noma_rates(ptr::null(), NomaStrategy::Noma, &mut t) }, NomaStatus::NullPointer);
    assert!(last_error().contains("scenario"));
    assert_eq!(unsafe { noma_rates(h.0, NomaStrategy::Noma, ptr::null_mut()) }, NomaStatus::NullPointer);
    assert_eq!(unsafe { noma_scenario_new(0.1, 0.9, 10.0, 0.0, ptr::null_mut()) }, NomaStatus::NullPointer);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { noma_scenario_new(0.9, 0.1, 10.0, 0.0, &mut out) }, NomaStatus::InvalidArgument);
    assert!(out.is_null());
    assert_eq!(unsafe { noma_quad_verify(h.0, ptr::null(), &mut NomaQuadCheck::default()) }, NomaStatus::NullPointer);
    unsafe { noma_scenario_free(ptr::null_mut()) };
    // a success clears the message
    assert_eq!(unsafe { noma_rates(h.0, NomaStrategy::Noma, &mut t) }, NomaStatus::Ok);
    assert_eq!(last_error(), "");
}

#[test]
fn handles_are_shareable_across_threads() {
    let (h, s) = operating_point();
    let addr = h.0 as usize;
    let want = full_csit::rates(&s, Strategy::NomaA).r_sum;
    let sums: Vec<f64> = (0..4)
        .map(|_| {
            std::thread::spawn(move || {
                let mut t = NomaTriple::default();
                let st = unsafe { noma_rates(addr as *const NomaScenario, NomaStrategy::NomaA, &mut t) };
                assert_eq!(st, NomaStatus::Ok);
                t.sum
            })
        })
        .map(|j| j.join().unwrap())
        .collect();
    assert!(sums.iter().all(|&v| v == want));
}

fn header_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include")
}

#[test]
fn header_is_generated() {
    let text = std::fs::read_to_string(header_dir().join("uplink_noma.h")).unwrap();
    for name in ["noma_scenario_new", "noma_rates", "noma_mc_two_user", "NOMA_STATUS_NO_CROSSOVER", "typedef struct NomaScenario NomaScenario;"] {
        assert!(text.contains(name), "{name}");
    }
}

/// Compiles and runs the C smoke test against the static library when `cc`
/// and the archive are available.
#[test]
fn c_program_links_and_runs() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler");
        return;
    }
    // target/<profile>/deps/abi-<hash> -> target/<profile>/libuplink_noma_ffi.a
    let exe = std::env::current_exe().unwrap();
    let lib = exe.parent().and_then(Path::parent).unwrap().join("libuplink_noma_ffi.a");
    if !lib.exists() {
        eprintln!("skipping: {} not built", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("smoke");
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/c/smoke.c");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header_dir())
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "smoke exit {:?}", out.status.code());
    let printed: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    let s = Scenario::from_db(0.1, 0.9, 10.0, 20.0).unwrap();
    assert_eq!(printed, full_csit::rates(&s, Strategy::NomaA).r_sum);
}
