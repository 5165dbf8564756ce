//! End-to-end tests of the `uplink-noma` binary.

use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

use uplink_noma::cli::{parse_csv, CsvRow, Engine, Metric, HEADER, RHO_MIN_HEADER};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_uplink-noma"));
    for (k, _) in std::env::vars() {
        if k.starts_with("NOMA_") {
            c.env_remove(k);
        }
    }
    c
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn sweep_rows(args: &[&str]) -> Vec<CsvRow> {
    let o = run(bin().arg("sweep").args(args));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    parse_csv(&stdout(&o)).unwrap()
}

const MC_ARGS: [&str; 10] = [
    "--rho-db-start=0",
    "--rho-db-stop=30",
    "--rho-db-step=10",
    "--engines=closed_form,monte_carlo",
    "--samples=20000",
    "--seed=7",
    "--metrics=throughput,rate,activity",
    "--strategies=all",
    "--gamma-db=10",
    "--p1=0.1",
];

#[test]
fn same_seed_gives_byte_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = |name: &str| dir.path().join(name);
    for (name, threads) in [("a.csv", "4"), ("b.csv", "4"), ("c.csv", "1")] {
        let o = run(bin().arg("sweep").args(MC_ARGS).arg(format!("--threads={threads}")).arg("--output").arg(out(name)));
        assert!(o.status.success());
        assert!(stdout(&o).contains("written to"));
    }
    let a = std::fs::read(out("a.csv")).unwrap();
    assert_eq!(a, std::fs::read(out("b.csv")).unwrap());
    assert_eq!(a, std::fs::read(out("c.csv")).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with(&format!("{HEADER}\n")));
    assert!(!text.contains('\r'));
}

#[test]
fn flags_and_config_file_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    let body: String = MC_ARGS.iter().map(|a| format!("{}\n", a.trim_start_matches("--"))).collect();
    std::fs::write(&cfg, format!("# same sweep as the flags\n{body}")).unwrap();
    let from_flags = run(bin().arg("sweep").args(MC_ARGS));
    let from_file = run(bin().arg("sweep").arg("--config").arg(&cfg));
    assert!(from_flags.status.success() && from_file.status.success());
    assert_eq!(from_flags.stdout, from_file.stdout);
}

#[test]
fn precedence_is_flag_then_env_then_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("p.cfg");
    std::fs::write(&cfg, "gamma-db=3\nrho-db-start=0\nrho-db-stop=1\n").unwrap();
    let gamma_of = |cmd: &mut Command| {
        let rows = parse_csv(&stdout(&run(cmd))).unwrap();
        rows[0].gamma_db
    };
    assert_eq!(gamma_of(bin().args(["sweep", "--config"]).arg(&cfg)), 3.0);
    assert_eq!(gamma_of(bin().args(["sweep", "--config"]).arg(&cfg).env("NOMA_GAMMA_DB", "5")), 5.0);
    assert_eq!(
        gamma_of(bin().args(["sweep", "--gamma-db=7", "--config"]).arg(&cfg).env("NOMA_GAMMA_DB", "5")),
        7.0
    );
}

#[test]
fn invalid_specs_name_the_field() {
    let cases: [(&[&str], &str); 5] = [
        (&["--strategies="], "strategies"),
        (&["--rho-db-start=10", "--rho-db-stop=0"], "rho-db-stop"),
        (&["--engines=monte_carlo", "--samples=10"], "samples"),
        (&["--metrics=latency"], "metrics"),
        (&["--p1=0.8"], "p2"),
    ];
    for (args, field) in cases {
        let o = run(bin().arg("sweep").args(args));
        assert!(!o.status.success(), "{args:?}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(&format!("`{field}`")), "{args:?}: {err}");
        assert!(o.stdout.is_empty());
    }
    let o = run(bin().args(["sweep", "--output", "/nonexistent-dir/x.csv", "--rho-db-stop=1"]));
    assert!(!o.status.success());
}

#[test]
fn crossover_at_the_operating_point() {
    let rows = sweep_rows(&["--rho-db-start=0", "--rho-db-stop=40", "--rho-db-step=40", "--metrics=throughput", "--strategies=oma,noma"]);
    let sum = |strategy: &str, rho_db: f64| {
        rows.iter().find(|r| r.strategy == strategy && r.rho_db == rho_db).unwrap().sum
    };
    assert!(sum("noma", 0.0) > sum("oma", 0.0));
    assert!(sum("noma", 40.0) < sum("oma", 40.0));
}

#[test]
fn engines_agree_in_the_csv() {
    let rows = sweep_rows(&[
        "--rho-db-start=20",
        "--rho-db-stop=20.5",
        "--engines=closed_form,quadrature,monte_carlo",
        "--samples=200000",
        "--metrics=rate,throughput,activity",
    ]);
    for cf in rows.iter().filter(|r| r.engine == Engine::ClosedForm) {
        let other = |e: Engine| {
            rows.iter()
                .find(|r| r.engine == e && r.strategy == cf.strategy && r.metric == cf.metric)
                .unwrap()
        };
        let q = other(Engine::Quadrature);
        assert!((q.sum - cf.sum).abs() <= 1e-9 * cf.sum.abs().max(1e-300), "{cf:?} vs {q:?}");
        let mc = other(Engine::MonteCarlo);
        assert!((mc.sum - cf.sum).abs() <= 5.0 * mc.sum_std_error.unwrap(), "{cf:?} vs {mc:?}");
        assert!(cf.sum_std_error.is_none() && cf.samples.is_none());
    }
}

#[test]
fn analytic_metrics_and_k_users() {
    let rows = sweep_rows(&["--rho-db-start=60", "--rho-db-stop=60.5", "--metrics=rho_min,asymptote", "--strategies=noma"]);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].metric, Metric::RhoMin);
    assert!(rows[0].values[0] > rows[0].values[1], "weak crossover above strong at small P1");
    let asym = &rows[1];
    assert_eq!(asym.values.len(), 2);

    let k = sweep_rows(&[
        "--powers=0.05,0.15,0.8",
        "--engines=monte_carlo",
        "--samples=5000",
        "--rho-db-start=20",
        "--rho-db-stop=20.5",
        "--strategies=noma-a,mixed-C-A",
        "--metrics=activity,throughput",
    ]);
    let labels: Vec<(&str, Metric)> = k.iter().map(|r| (r.strategy.as_str(), r.metric)).collect();
    assert_eq!(
        labels,
        [("noma-a", Metric::Activity), ("mixed-C-A", Metric::Activity), ("noma-a", Metric::Throughput), ("mixed-C-A", Metric::Throughput)]
    );
    assert_eq!(k[2].values.len(), 3);
}

fn rho_min_map(args: &[&str]) -> Vec<Vec<String>> {
    let o = run(bin().arg("rho-min-map").args(args));
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(RHO_MIN_HEADER));
    lines.map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn rho_min_map_properties() {
    let rows = rho_min_map(&["--p1=0.05,0.45", "--gamma-db=0,10"]);
    assert_eq!(rows.len(), 2 * 2 * 3);
    let cell = |p1: &str, g: &str, target: &str| -> f64 {
        let r = rows
            .iter()
            .find(|r| r[0].parse::<f64>().unwrap() == p1.parse::<f64>().unwrap() && r[3].parse::<f64>().unwrap() == g.parse::<f64>().unwrap() && r[4] == target)
            .unwrap();
        r[6].parse().unwrap()
    };
    // γ = 1: the weak-user ratio tends to one from above, OMA never wins
    assert!(cell("0.05", "0", "weak").is_infinite());
    assert!(cell("0.45", "0", "weak").is_infinite());
    // small P1: the weak user needs more SNR; large P1: the reverse
    assert!(cell("0.05", "10", "weak") > cell("0.05", "10", "strong"));
    assert!(cell("0.45", "10", "weak") < cell("0.45", "10", "strong"));
    // large P1: the sum crossover sits close to the strong-user one
    assert!((cell("0.45", "10", "sum") - cell("0.45", "10", "strong")).abs() < 1.0);
}

#[test]
fn decide_prints_the_branch() {
    let o = run(bin().args(["decide", "--rho-db=20", "--xa=5", "--xb=100"]));
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("mode=NOMA_both"), "{text}");
    assert!(text.contains("active_weak=true"));
    // ρx_B = 5000 misses γ(1+ρx_A) = 5010, but both clear γ̃/2ρ
    let o = run(bin().args(["decide", "--rho-db=20", "--xa=5", "--xb=50"]));
    assert!(stdout(&o).contains("mode=OMA_both"));
    let o = run(bin().args(["decide", "--rho-db=20", "--xa=0", "--xb=0"]));
    assert!(stdout(&o).contains("mode=None"));
}

#[test]
fn fast_verification_passes_quickly() {
    let start = Instant::now();
    let o = run(bin().args(["verify", "--level", "fast"]));
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(start.elapsed().as_secs() < 60);
    let text = stdout(&o);
    assert!(text.ends_with("overall: PASS\n"));
    assert!(text.contains("measured") && text.contains("tolerance"));
    let bad = run(bin().args(["verify", "--level", "medium"]));
    assert!(!bad.status.success());
}

#[test]
fn help_lists_every_verb() {
    let o = run(bin().arg("--help"));
    let text = stdout(&o);
    for verb in ["sweep", "verify", "rho-min-map", "decide"] {
        assert!(text.contains(verb));
    }
    assert!(Path::new(env!("CARGO_BIN_EXE_uplink-noma")).exists());
}
