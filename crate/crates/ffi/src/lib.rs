//! C ABI over `uplink-noma`.
//!
//! Conventions:
//!
//! * every fallible function returns a [`NomaStatus`] and writes its result
//!   through an out-pointer, which is left untouched on failure;
//! * scenarios are opaque [`NomaScenario`] handles created by
//!   [`noma_scenario_new`] and released with [`noma_scenario_free`];
//! * after any status other than `NOMA_STATUS_OK`, [`noma_last_error`] returns a message for
//!   the calling thread;
//! * no panic crosses the boundary, it is reported as `NOMA_STATUS_INTERNAL`.
//!
//! All functions are thread-safe. A handle may be shared between threads
//! for reading.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use uplink_noma::channel::{ChannelDraw, Scenario};
use uplink_noma::full_csit::{self, Mode};
use uplink_noma::no_csit;
use uplink_noma::oracle::{self, McEstimate};
use uplink_noma::special;
use uplink_noma::{Error, Strategy, UserTarget};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NomaStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument is outside its domain or a name is unknown.
    InvalidArgument = 2,
    /// OMA never overtakes NOMA inside the search range; the value written is `+inf`.
    NoCrossover = 3,
    Internal = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NomaStrategy {
    Oma = 0,
    Noma = 1,
    NomaA = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NomaUser {
    Weak = 0,
    Strong = 1,
    Sum = 2,
}

/// Success probabilities of the fixed-rate schemes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NomaPhi {
    NomaWeak = 0,
    NomaStrong = 1,
    OmaWeak = 2,
    OmaStrong = 3,
}

/// Branch chosen by the adaptive full-CSI scheme.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NomaMode {
    NomaBoth = 0,
    StrongOnlyFree = 1,
    OmaBoth = 2,
    WeakOnlyFree = 3,
    StrongOnlyFallback = 4,
    Idle = 5,
}

/// Weak-user, strong-user and sum values of one metric.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NomaTriple {
    pub weak: f64,
    pub strong: f64,
    pub sum: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NomaEstimate {
    pub mean: f64,
    pub std_error: f64,
}

/// Monte Carlo estimates of one two-user metric.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NomaMcTriple {
    pub weak: NomaEstimate,
    pub strong: NomaEstimate,
    pub sum: NomaEstimate,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NomaDecision {
    pub mode: NomaMode,
    pub active_weak: bool,
    pub active_strong: bool,
    /// Instantaneous rates in bit/s/Hz.
    pub rate_weak: f64,
    pub rate_strong: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NomaQuadCheck {
    pub closed_form: f64,
    pub integral: f64,
    pub rel_err: f64,
}

/// Opaque two-user scenario.
pub struct NomaScenario {
    inner: Scenario,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    let c = CString::new(text).expect("interior NULs were replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> NomaStatus {
    match e {
        Error::NoCrossover { .. } => NomaStatus::NoCrossover,
        Error::Io(_) => NomaStatus::Internal,
        _ => NomaStatus::InvalidArgument,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (NomaStatus, String)>) -> NomaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            NomaStatus::Ok
        }
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            NomaStatus::Internal
        }
    }
}

fn fail(e: Error) -> (NomaStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (NomaStatus, String) {
    (NomaStatus::NullPointer, format!("{what} is null"))
}

/// # Safety
/// `p` must be null or valid for writes.
unsafe fn write<T>(p: *mut T, what: &str, value: T) -> Result<(), (NomaStatus, String)> {
    // SAFETY: the caller guarantees p is null or writable.
    match unsafe { p.as_mut() } {
        Some(slot) => {
            *slot = value;
            Ok(())
        }
        None => Err(null(what)),
    }
}

/// # Safety
/// `p` must be null or a live handle.
unsafe fn scenario<'a>(p: *const NomaScenario) -> Result<&'a Scenario, (NomaStatus, String)> {
    // SAFETY: the caller guarantees p is null or a handle from noma_scenario_new.
    unsafe { p.as_ref() }.map(|s| &s.inner).ok_or_else(|| null("scenario"))
}

fn strategy(s: NomaStrategy) -> Strategy {
    match s {
        NomaStrategy::Oma => Strategy::Oma,
        NomaStrategy::Noma => Strategy::Noma,
        NomaStrategy::NomaA => Strategy::NomaA,
    }
}

fn user(u: NomaUser) -> UserTarget {
    match u {
        NomaUser::Weak => UserTarget::Weak,
        NomaUser::Strong => UserTarget::Strong,
        NomaUser::Sum => UserTarget::Sum,
    }
}

fn mode(m: Mode) -> NomaMode {
    match m {
        Mode::NomaBoth => NomaMode::NomaBoth,
        Mode::StrongOnlyFree => NomaMode::StrongOnlyFree,
        Mode::OmaBoth => NomaMode::OmaBoth,
        Mode::WeakOnlyFree => NomaMode::WeakOnlyFree,
        Mode::StrongOnlyFallback => NomaMode::StrongOnlyFallback,
        Mode::Idle => NomaMode::Idle,
    }
}

fn estimate(e: McEstimate) -> NomaEstimate {
    NomaEstimate {
        mean: e.mean,
        std_error: e.std_error,
    }
}

/// Message describing the last failure on this thread, or an empty string.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn noma_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn noma_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a scenario from linear powers and dB threshold / SNR.
/// Requires `0 < p1 <= p2` and `gamma_db >= 0`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn noma_scenario_new(
    p1: f64,
    p2: f64,
    gamma_db: f64,
    rho_db: f64,
    out: *mut *mut NomaScenario,
) -> NomaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = Scenario::from_db(p1, p2, gamma_db, rho_db).map_err(fail)?;
        let handle = Box::into_raw(Box::new(NomaScenario { inner }));
        // SAFETY: out is non-null and writable per the contract.
        unsafe { write(out, "out", handle) }
    })
}

/// Releases a handle. Null is accepted and ignored.
///
/// # Safety
/// `scenario` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn noma_scenario_free(scenario: *mut NomaScenario) {
    if !scenario.is_null() {
        // SAFETY: the handle came from Box::into_raw in noma_scenario_new.
        drop(unsafe { Box::from_raw(scenario) });
    }
}

/// Exponential integral `E1(x)` for `x > 0`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn noma_e1(x: f64, out: *mut f64) -> NomaStatus {
    guard(|| {
        let v = special::exp_integral_e1(x).map_err(fail)?;
        unsafe { write(out, "out", v) }
    })
}

/// `∫_{γ/ρ}^∞ ln(1+ρx) e^{-λx} dx` in nats.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn noma_alpha(gamma: f64, lambda: f64, rho: f64, out: *mut f64) -> NomaStatus {
    guard(|| {
        let v = special::alpha(gamma, lambda, rho).map_err(fail)?;
        unsafe { write(out, "out", v) }
    })
}

/// Success probability of one user under a fixed-rate scheme.
///
/// # Safety
/// `scenario` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn noma_phi(scenario: *const NomaScenario, which: NomaPhi, out: *mut f64) -> NomaStatus {
    guard(|| {
        let s = unsafe { self::scenario(scenario) }?;
        let v = match which {
            NomaPhi::NomaWeak => no_csit::phi_noma_weak(s),
            NomaPhi::NomaStrong => no_csit::phi_noma_strong(s),
            NomaPhi::OmaWeak => no_csit::phi_oma_weak(s),
            NomaPhi::OmaStrong => no_csit::phi_oma_strong(s),
        };
        unsafe { write(out, "out", v) }
    })
}

/// Fixed-rate throughput in bit/s/Hz. `A` applies the no-CSI selection.
///
/// # Safety
/// `scenario` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn noma_throughput(
    scenario: *const NomaScenario,
    strategy: NomaStrategy,
    out: *mut NomaTriple,
) -> NomaStatus {
    guard(|| {
        let s = unsafe { self::scenario(scenario) }?;
        let t = no_csit::throughput(s, self::strategy(strategy));
        unsafe {
            write(
                out,
                "out",
                NomaTriple {
                    weak: t.t_weak,
                    strong: t.t_strong,
                    sum: t.t_sum,
                },
            )
        }
    })
}

/// Average data rates under full CSI, in bit/s/Hz.
///
/// # Safety
/// `scenario` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn noma_rates(scenario: *const NomaScenario, strategy: NomaStrategy, out: *mut NomaTriple) -> NomaStatus {
    guard(|| {
        let s = unsafe { self::scenario(scenario) }?;
        let r = full_csit::rates(s, self::strategy(strategy));
        unsafe {
            write(
                out,
                "out",
                NomaTriple {
                    weak: r.r_weak,
                    strong: r.r_strong,
                    sum: r.r_sum,
                },
            )
        }
    })
}

/// Probability that both users are active under full CSI.
///
/// # Safety
/// `scenario` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn noma_activity(scenario: *const NomaScenario, strategy: NomaStrategy, out: *mut f64) -> NomaStatus {
    guard(|| {
        let s = unsafe { self::scenario(scenario) }?;
        unsafe { write(out, "out", full_csit::activity_probability(s, self::strategy(strategy))) }
    })
}

/// No-CSI selection: NOMA or OMA, whichever has the larger sum throughput
/// (ties go to NOMA).
///
/// # Safety
/// `scenario` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn noma_select_no_csit(scenario: *const NomaScenario, out: *mut NomaStrategy) -> NomaStatus {
    guard(|| {
        let s = unsafe { self::scenario(scenario) }?;
        let v = match no_csit::select_no_csit(s) {
            Strategy::Oma => NomaStrategy::Oma,
            _ => NomaStrategy::Noma,
        };
        unsafe { write(out, "out", v) }
    })
}

/// Adaptive full-CSI decision for one realisation. The two received powers
/// may be given in any order.
///
/// # Safety
/// `scenario` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn noma_decide(
    scenario: *const NomaScenario,
    x1: f64,
    x2: f64,
    out: *mut NomaDecision,
) -> NomaStatus {
    guard(|| {
        let s = unsafe { self::scenario(scenario) }?;
        let (xa, xb) = (x1.min(x2), x1.max(x2));
        let draw = ChannelDraw::two_user(xa, xb).map_err(fail)?;
        let d = full_csit::decide_noma_a(s, &draw).map_err(fail)?;
        let (rate_weak, rate_strong) = full_csit::instantaneous_rates(s, xa, xb, d.mode);
        let value = NomaDecision {
            mode: mode(d.mode),
            active_weak: d.active_weak,
            active_strong: d.active_strong,
            rate_weak,
            rate_strong,
        };
        unsafe { write(out, "out", value) }
    })
}

/// Smallest linear SNR from which OMA's throughput for `target` is at least
/// NOMA's. Only the scenario's powers and threshold matter. Writes `+inf` and
/// returns `NOMA_STATUS_NO_CROSSOVER` when there is none.
///
/// # Safety
/// `scenario` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn noma_rho_min(scenario: *const NomaScenario, target: NomaUser, out: *mut f64) -> NomaStatus {
    guard(|| {
        let s = unsafe { self::scenario(scenario) }?;
        if out.is_null() {
            return Err(null("out"));
        }
        match no_csit::rho_min(s, user(target)) {
            Ok(v) => unsafe { write(out, "out", v) },
            Err(e) => {
                unsafe { write(out, "out", f64::INFINITY) }?;
                Err(fail(e))
            }
        }
    })
}

/// Monte Carlo estimates (`samples >= 1000` draws) of throughput and
/// average rate for one strategy. Results are identical for a given seed
/// whatever the number of threads.
///
/// # Safety
/// `scenario` must be null or a live handle; the out-pointers null or writable.
#[no_mangle]
pub unsafe extern "C" fn noma_mc_two_user(
    scenario: *const NomaScenario,
    strategy: NomaStrategy,
    samples: u64,
    seed: u64,
    throughput_out: *mut NomaMcTriple,
    rate_out: *mut NomaMcTriple,
) -> NomaStatus {
    guard(|| {
        let s = unsafe { self::scenario(scenario) }?;
        if throughput_out.is_null() || rate_out.is_null() {
            return Err(null("output"));
        }
        let mc = oracle::mc_two_user(s, samples, seed).map_err(fail)?;
        let st = self::strategy(strategy);
        let triple = |[w, b, t]: [McEstimate; 3]| NomaMcTriple {
            weak: estimate(w),
            strong: estimate(b),
            sum: estimate(t),
        };
        unsafe { write(throughput_out, "throughput_out", triple(mc.throughput(st))) }?;
        unsafe { write(rate_out, "rate_out", triple(mc.rate(st))) }
    })
}

/// Compares a registered closed form with quadrature of its defining
/// integral. `id` is a NUL-terminated identifier such as `"rate_noma_strong"`.
///
/// # Safety
/// `scenario` must be null or a live handle; `id` null or a C string;
/// `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn noma_quad_verify(
    scenario: *const NomaScenario,
    id: *const c_char,
    out: *mut NomaQuadCheck,
) -> NomaStatus {
    guard(|| {
        let s = unsafe { self::scenario(scenario) }?;
        if id.is_null() {
            return Err(null("id"));
        }
        // SAFETY: id is a NUL-terminated string per the contract.
        let name = unsafe { CStr::from_ptr(id) }
            .to_str()
            .map_err(|_| (NomaStatus::InvalidArgument, "id is not UTF-8".to_string()))?;
        let c = oracle::quad_verify(s, name).map_err(fail)?;
        unsafe {
            write(
                out,
                "out",
                NomaQuadCheck {
                    closed_form: c.closed,
                    integral: c.integral,
                    rel_err: c.rel_err,
                },
            )
        }
    })
}
