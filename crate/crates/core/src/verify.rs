//! The acceptance suite as library code, shared by `uplink-noma verify` and
//! the `acceptance` test target.
//!
//! Reports are deterministic for a given [`VerifyOptions`]: they contain
//! measured values and tolerances but never timings.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{KScenario, Scenario};
use crate::error::{Error, Result};
use crate::full_csit::{self as fc, activity_probability, asymptotics, fitted_asymptote, noma_strong_asymptote};
use crate::no_csit::{self as nc, ga_ratio_ln, rho_min, select_no_csit, throughput};
use crate::oracle::{self, mc_k_users, mc_two_user, quad_verify, with_threads, KMcRun, FORMULAS};
use crate::quadrature::Integrator;
use crate::roots::log_space;
use crate::special::{alpha, exp_integral_e1};
use crate::{Strategy, UserTarget};

/// `fast` runs the closed-form and quadrature checks only; `full` runs all nine criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Fast,
    Full,
}

impl FromStr for Level {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fast" => Ok(Level::Fast),
            "full" => Ok(Level::Full),
            other => Err(Error::config("level", format!("expected fast or full, got '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Draws per two-user Monte Carlo estimate.
    pub samples: u64,
    /// Draws per K = 3 Monte Carlo point.
    pub k3_samples: u64,
    pub threads: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 2017,
            samples: 10_000_000,
            k3_samples: 1_000_000,
            threads: None,
        }
    }
}

/// One measured check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(label: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            passed,
            detail: detail.into(),
        }
    }

    /// `measured <= tolerance`.
    fn at_most(label: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self::new(label, measured <= tolerance, format!("measured {measured:.3e}, tolerance {tolerance:.1e}"))
    }

    /// `slack >= floor`.
    fn slack(label: impl Into<String>, slack: f64, floor: f64) -> Self {
        Self::new(label, slack >= floor, format!("worst slack {slack:.3e}, floor {floor:.1e}"))
    }
}

/// One acceptance criterion and its checks.
#[derive(Debug, Clone, PartialEq)]
pub struct Criterion {
    pub id: u32,
    pub title: &'static str,
    pub checks: Vec<Check>,
}

impl Criterion {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(f, "criterion {} [{verdict}] {}", self.id, self.title)?;
        for c in &self.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            writeln!(f, "  {mark} {}: {}", c.label, c.detail)?;
        }
        Ok(())
    }
}

pub const TITLES: [&str; 9] = [
    "kernel correctness",
    "closed form vs Monte Carlo",
    "closed form vs quadrature",
    "rate orderings",
    "asymptotics",
    "selection optimality",
    "crossover structure",
    "K = 3 qualitative reproduction",
    "reproducibility",
];

fn operating_point(rho_db: f64) -> Scenario {
    Scenario::from_db(0.1, 0.9, 10.0, rho_db).expect("valid operating point")
}

/// The 10×10×10 grid: `P1 = 0.05k`, `P2 = 1-P1`, `γ` in `[1, 100]`, `ρ` in `[1e-2, 1e6]`.
pub fn invariant_grid() -> Vec<Scenario> {
    let gammas = log_space(1.0, 100.0, 10);
    let rhos = log_space(1e-2, 1e6, 10);
    let mut out = Vec::with_capacity(1000);
    for k in 1..=10 {
        let p1 = 0.05 * k as f64;
        for &g in &gammas {
            for &r in &rhos {
                out.push(Scenario::new(p1, 1.0 - p1, g, r).expect("grid point is valid"));
            }
        }
    }
    out
}

/// Smallest success probability a Monte Carlo scenario may have, so that
/// 10⁷ draws see at least 10⁴ events and the sample variance means something.
pub const MIN_EVENT_PROBABILITY: f64 = 1e-3;

/// The 20 random scenarios used for Monte Carlo agreement. Draws whose rarest
/// event falls below [`MIN_EVENT_PROBABILITY`] are rejected and redrawn.
pub fn random_scenarios(seed: u64) -> Vec<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(20);
    while out.len() < 20 {
        let p1: f64 = rng.gen_range(0.02..=0.5);
        let gamma_db: f64 = rng.gen_range(0.0..15.0);
        let rho_db = gamma_db + rng.gen_range(0.0..30.0);
        let s = Scenario::from_db(p1, 1.0 - p1, gamma_db, rho_db).expect("valid random scenario");
        // the weak-user events are the rarest of each strategy
        if nc::phi_noma_weak(&s).min(nc::phi_oma_weak(&s)) >= MIN_EVENT_PROBABILITY {
            out.push(s);
        }
    }
    out
}

/// `|p̂ - p|` in units of the exact standard deviation `√(p(1-p)/n)` of a
/// Bernoulli frequency. Unlike the sample standard error, it stays meaningful
/// when no event was observed.
fn bernoulli_z(estimate: &oracle::McEstimate, p: f64) -> f64 {
    let d = (estimate.mean - p).abs();
    if d == 0.0 {
        return 0.0;
    }
    d / (p * (1.0 - p) / estimate.n as f64).sqrt()
}

// ---------------------------------------------------------------------------

fn criterion_1(opts: &VerifyOptions) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xe1);
    let q = Integrator::new(0.0, 1e-13);

    let mut worst_e1 = (0.0f64, 0.0);
    for _ in 0..1000 {
        let x = 10f64.powf(rng.gen_range(-6.0..2.0));
        // E1(x) = ∫_0^∞ exp(-x e^u) du
        let reference = q.semi_infinite(|u| (-x * u.exp()).exp(), 0.0, 1.0).value;
        let err = (exp_integral_e1(x).expect("positive argument") - reference).abs() / reference;
        if err > worst_e1.0 {
            worst_e1 = (err, x);
        }
    }

    let mut worst_alpha = (0.0f64, [0.0; 3]);
    for _ in 0..1000 {
        let g = 10f64.powf(rng.gen_range(0.0..3.0));
        let l = 10f64.powf(rng.gen_range(-1.0..2.0));
        // keep λγ/ρ <= 500 so the result is a normal double
        let r = 10f64.powf(rng.gen_range(-2.0..6.0)).max(l * g / 500.0);
        let t = g / r;
        // α = ∫_{γ/ρ}^∞ ln(1+ρx) e^{-λx} dx, integrated relative to e^{-λγ/ρ}
        let tail = q.semi_infinite(|y| (r * (t + y)).ln_1p() * (-l * y).exp(), 0.0, 1.0 / l).value;
        let value = alpha(g, l, r).expect("valid alpha arguments");
        let scaled = value * (l * t).exp();
        let err = (scaled - tail).abs() / tail;
        if err > worst_alpha.0 {
            worst_alpha = (err, [g, l, r]);
        }
    }
    vec![
        Check::at_most(format!("E1 vs quadrature, 1000 points, worst at x={:.4e}", worst_e1.1), worst_e1.0, 1e-10),
        Check::at_most(
            format!(
                "alpha vs quadrature, 1000 points, worst at (γ={:.4e}, λ={:.4e}, ρ={:.4e})",
                worst_alpha.1[0], worst_alpha.1[1], worst_alpha.1[2]
            ),
            worst_alpha.0,
            1e-10,
        ),
    ]
}

fn criterion_2(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (k, s) in random_scenarios(opts.seed).iter().enumerate() {
        let mc = with_threads(opts.threads, || mc_two_user(s, opts.samples, opts.seed + k as u64))??;
        let mut pairs = vec![
            ("phi_noma_weak", mc.get(oracle::TwoUserMetric::PhiNomaWeak), nc::phi_noma_weak(s)),
            ("phi_noma_strong", mc.get(oracle::TwoUserMetric::PhiNomaStrong), nc::phi_noma_strong(s)),
            ("phi_oma_weak", mc.get(oracle::TwoUserMetric::PhiOmaWeak), nc::phi_oma_weak(s)),
            ("phi_oma_strong", mc.get(oracle::TwoUserMetric::PhiOmaStrong), nc::phi_oma_strong(s)),
        ];
        for strategy in Strategy::ALL {
            let exact = fc::rates(s, strategy);
            let [w, b, _] = mc.rate(strategy);
            let (wn, bn) = match strategy {
                Strategy::Oma => ("rate_oma_weak", "rate_oma_strong"),
                Strategy::Noma => ("rate_noma_weak", "rate_noma_strong"),
                Strategy::NomaA => ("rate_noma_a_weak", "rate_noma_a_strong"),
            };
            pairs.push((wn, w, exact.r_weak));
            pairs.push((bn, b, exact.r_strong));
        }
        let mut worst = (0.0f64, "");
        let mut failed = Vec::new();
        for (name, est, exact) in &pairs {
            let z = est.z_score(*exact);
            if z > worst.0 {
                worst = (z, name);
            }
            if !est.within(*exact, 4.0) {
                failed.push(*name);
            }
        }
        let label = format!(
            "scenario {:02} (P1={:.4}, γ={:.3} dB, ρ={:.3} dB), {} quantities",
            k + 1,
            s.p1(),
            s.gamma_db(),
            s.rho_db(),
            pairs.len()
        );
        let mut detail = format!("worst |z| {:.3} ({}), tolerance 4", worst.0, worst.1);
        if !failed.is_empty() {
            detail.push_str(&format!("; outside: {}", failed.join(", ")));
        }
        checks.push(Check::new(label, failed.is_empty(), detail));
    }
    Ok(checks)
}

fn quadrature_checks(scenarios: &[Scenario]) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for s in scenarios {
        let mut worst = (0.0f64, "");
        for id in FORMULAS {
            let c = quad_verify(s, id)?;
            if c.rel_err > worst.0 || worst.1.is_empty() {
                worst = (c.rel_err, id);
            }
        }
        checks.push(Check::at_most(
            format!("ρ={:.0} dB, {} formulas, worst {}", s.rho_db(), FORMULAS.len(), worst.1),
            worst.0,
            1e-6,
        ));
    }
    Ok(checks)
}

fn criterion_3() -> Result<Vec<Check>> {
    let scenarios: Vec<Scenario> = [0.0, 10.0, 20.0, 30.0, 40.0].map(operating_point).to_vec();
    quadrature_checks(&scenarios)
}

fn criterion_4() -> Vec<Check> {
    let grid = invariant_grid();
    let floor = -1e-9;
    let (mut t1_left, mut t1_right, mut t2) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let (mut phi_weak, mut phi_strong, mut phi_bounds) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    for s in &grid {
        let noma = fc::rates(s, Strategy::Noma);
        let oma = fc::rates(s, Strategy::Oma);
        let adaptive = fc::rates(s, Strategy::NomaA);
        t1_left = t1_left.min(noma.r_weak - adaptive.r_weak);
        t1_right = t1_right.min(adaptive.r_weak - oma.r_weak);
        t2 = t2.min(adaptive.r_strong - noma.r_strong);
        let (an, bn, ao, bo) = (nc::phi_noma_weak(s), nc::phi_noma_strong(s), nc::phi_oma_weak(s), nc::phi_oma_strong(s));
        phi_weak = phi_weak.min(bn - an);
        phi_strong = phi_strong.min(bo - ao);
        phi_bounds = phi_bounds.min([an, ao, 1.0 - bn, 1.0 - bo].into_iter().fold(f64::INFINITY, f64::min));
    }

    // g_A along 100-point ρ sequences, one per (P1, γ) cell
    let rhos = log_space(1e-2, 1e6, 100);
    let mut cells = 0;
    let mut violations = 0;
    let mut worst_equal = 0.0f64;
    for s in grid.iter().step_by(10) {
        cells += 1;
        let values: Vec<f64> = rhos.iter().map(|&r| ga_ratio_ln(&s.with_rho(r).expect("positive"))).collect();
        if s.p1() == s.p2() {
            // equal powers: g_A is the constant m(γ)
            for v in &values {
                worst_equal = worst_equal.max((v - values[0]).abs());
            }
        } else {
            violations += values.windows(2).filter(|w| w[1] >= w[0]).count();
        }
    }
    vec![
        Check::slack("weak user, E[R_A] NOMA - E[R̂_A] NOMA-A over 1000 grid points", t1_left, floor),
        Check::slack("weak user, E[R̂_A] NOMA-A - E[R̃_A] OMA over 1000 grid points", t1_right, floor),
        Check::slack("strong user, E[R̂_B] NOMA-A - E[R_B] NOMA over 1000 grid points", t2, floor),
        Check::slack("φ_B,N - φ_A,N over 1000 grid points", phi_weak, floor),
        Check::slack("φ_B,O - φ_A,O over 1000 grid points", phi_strong, floor),
        Check::slack("probabilities inside [0, 1] over 1000 grid points", phi_bounds, 0.0),
        Check::new(
            format!("g_A strictly decreasing, {cells} cells × 100 ρ points"),
            violations == 0 && worst_equal <= 1e-15,
            format!("{violations} non-decreasing steps; equal-power cells vary by {worst_equal:.1e} in ln g_A"),
        ),
    ]
}

fn criterion_5() -> Vec<Check> {
    let mut checks = Vec::new();
    let cases = [("P=0.1/0.9, γ=10 dB", 0.1, 0.9), ("P=0.5/0.5, γ=10 dB", 0.5, 0.5)];
    let zero_slope_tol = 0.01 / (2.0 * std::f64::consts::LN_2);
    for (name, p1, p2) in cases {
        let s = Scenario::from_db(p1, p2, 10.0, 50.0).expect("valid");
        for strategy in Strategy::ALL {
            for user in UserTarget::ALL {
                let analytic = asymptotics(&s, strategy, user).slope;
                let fitted = fitted_asymptote(&s, strategy, user, 1e5, 1e6).slope;
                let label = format!("{name}, {strategy} {user} slope {fitted:.6} vs {analytic:.6}");
                checks.push(if analytic == 0.0 {
                    Check::at_most(format!("{label} (absolute)"), fitted.abs(), zero_slope_tol)
                } else {
                    Check::at_most(format!("{label} (relative)"), (fitted - analytic).abs() / analytic, 0.01)
                });
            }
        }
        let far = s.with_rho(1e8).expect("positive");
        let (value, limit) = (fc::rate_noma_strong(&far), noma_strong_asymptote(&far));
        checks.push(Check::at_most(
            format!("{name}, NOMA strong rate at ρ=1e8 {value:.9} vs asymptote {limit:.9}"),
            (value - limit).abs() / limit,
            0.005,
        ));
    }
    checks
}

fn criterion_6(opts: &VerifyOptions, monte_carlo: bool) -> Result<Vec<Check>> {
    let grid = invariant_grid();
    let mut mismatches = 0;
    let mut worst = f64::INFINITY;
    for s in &grid {
        let noma = throughput(s, Strategy::Noma).t_sum;
        let oma = throughput(s, Strategy::Oma).t_sum;
        // argmax with the documented tie-break towards NOMA
        let best = if oma > noma { Strategy::Oma } else { Strategy::Noma };
        if select_no_csit(s) != best {
            mismatches += 1;
        }
        let a = activity_probability(s, Strategy::NomaA);
        worst = worst.min(a - activity_probability(s, Strategy::Noma).max(activity_probability(s, Strategy::Oma)));
    }
    let mut checks = vec![
        Check::new(
            "select_no_csit equals closed-form argmax on 1000 grid points",
            mismatches == 0,
            format!("{mismatches} mismatches"),
        ),
        Check::slack("NOMA-A both-active minus max(NOMA, OMA), closed form, 1000 grid points", worst, 0.0),
    ];
    if monte_carlo {
        for (k, rho_db) in [0.0, 10.0, 20.0, 30.0, 40.0].into_iter().enumerate() {
            let s = operating_point(rho_db);
            let mc = with_threads(opts.threads, || mc_two_user(&s, opts.samples, opts.seed + 100 + k as u64))??;
            let mut z = 0.0f64;
            for strategy in Strategy::ALL {
                z = z.max(bernoulli_z(&mc.activity(strategy), activity_probability(&s, strategy)));
            }
            let a = mc.activity(Strategy::NomaA).mean;
            let dominance = a - mc.activity(Strategy::Noma).mean.max(mc.activity(Strategy::Oma).mean);
            checks.push(Check::new(
                format!("ρ={rho_db:.0} dB Monte Carlo both-active frequencies"),
                z <= 4.0 && dominance >= 0.0,
                format!("worst Bernoulli |z| vs closed form {z:.3} (tolerance 4), NOMA-A margin {dominance:.3e} (floor 0)"),
            ));
        }
    }
    Ok(checks)
}

fn criterion_7() -> Vec<Check> {
    let low = operating_point(0.0);
    let high = operating_point(40.0);
    let (ln, lo) = (throughput(&low, Strategy::Noma).t_sum, throughput(&low, Strategy::Oma).t_sum);
    let (hn, ho) = (throughput(&high, Strategy::Noma).t_sum, throughput(&high, Strategy::Oma).t_sum);
    let mut checks = vec![
        Check::new("ρ=0 dB: NOMA sum throughput > OMA", ln > lo, format!("NOMA {ln:.6e}, OMA {lo:.6e}")),
        Check::new("ρ=40 dB: NOMA sum throughput < OMA", hn < ho, format!("NOMA {hn:.6e}, OMA {ho:.6e}")),
    ];
    for target in UserTarget::ALL {
        let r = rho_min(&low, target);
        let (ok, detail) = match r {
            Ok(v) if v.is_finite() => (true, format!("ρ_min = {:.6} dB", crate::channel::linear_to_db(v))),
            Ok(v) => (false, format!("ρ_min = {v}")),
            Err(e) => (false, e.to_string()),
        };
        checks.push(Check::new(format!("ρ_min finite for the {target} target"), ok, detail));
    }
    checks
}

/// ρ grid of the K = 3 reproduction, in dB.
pub fn k3_grid() -> Vec<f64> {
    (0..=20).map(|k| -10.0 + 2.5 * k as f64).collect()
}

fn criterion_8(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let grid = k3_grid();
    let mut runs: Vec<KMcRun> = Vec::with_capacity(grid.len());
    for (k, &rho_db) in grid.iter().enumerate() {
        let s = KScenario::from_db(vec![0.05, 0.15, 0.8], 10.0, rho_db)?;
        runs.push(with_threads(opts.threads, || mc_k_users(&s, opts.k3_samples, opts.seed + 200 + k as u64))??);
    }
    let sums = |run: &KMcRun| -> Vec<(String, f64)> { run.no_csit.iter().map(|r| (r.label.clone(), r.sum.mean)).collect() };
    let strictly_best = |run: &KMcRun, pred: &dyn Fn(&str) -> bool| -> Option<String> {
        let s = sums(run);
        let top = s.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
        let winners: Vec<&(String, f64)> = s.iter().filter(|x| x.1 == top).collect();
        match winners[..] {
            [w] if pred(&w.0) => Some(w.0.clone()),
            _ => None,
        }
    };
    let describe = |run: &KMcRun| -> String {
        sums(run).iter().map(|(l, v)| format!("{l} {v:.4e}")).collect::<Vec<_>>().join(", ")
    };

    let first = &runs[0];
    let noma_first = sums(first);
    let noma_value = noma_first.iter().find(|x| x.0 == "noma").map(|x| x.1).unwrap_or(f64::NAN);
    let noma_top = noma_first.iter().all(|x| x.1 <= noma_value);
    let mut checks = vec![Check::new(
        format!("ρ={:.1} dB: NOMA sum throughput highest (ties allowed)", grid[0]),
        noma_top,
        describe(first),
    )];
    let onset = runs.iter().position(|r| sums(r).iter().any(|x| x.1 > 0.0));
    checks.push(match onset {
        Some(i) => Check::new(
            format!("ρ={:.1} dB (first non-zero estimate): NOMA strictly highest", grid[i]),
            strictly_best(&runs[i], &|l| l == "noma").is_some(),
            describe(&runs[i]),
        ),
        None => Check::new("first non-zero estimate", false, "every estimate is zero"),
    });
    let last = runs.last().expect("non-empty grid");
    checks.push(Check::new(
        format!("ρ={:.1} dB: OMA sum throughput strictly highest", grid[grid.len() - 1]),
        strictly_best(last, &|l| l == "oma").is_some(),
        describe(last),
    ));
    let mixed_wins: Vec<String> = runs[1..runs.len() - 1]
        .iter()
        .zip(&grid[1..grid.len() - 1])
        .filter_map(|(r, db)| strictly_best(r, &|l| l.starts_with("mixed")).map(|w| format!("{w} at {db:.1} dB")))
        .collect();
    checks.push(Check::new(
        "a mixed strategy strictly highest at an intermediate ρ",
        !mixed_wins.is_empty(),
        if mixed_wins.is_empty() { "none".to_string() } else { mixed_wins.join(", ") },
    ));
    let mut margin = f64::INFINITY;
    for run in &runs {
        let adaptive = run.adaptive_full_csit.all_active.expect("full CSI reports activity").mean;
        for r in &run.full_csit {
            margin = margin.min(adaptive - r.all_active.expect("full CSI reports activity").mean);
        }
    }
    checks.push(Check::slack(
        format!("NOMA-A all-active frequency minus every pure/mixed strategy, {} ρ points", grid.len()),
        margin,
        0.0,
    ));
    Ok(checks)
}

fn criterion_9(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let s = operating_point(20.0);
    let n = 1_000_000;
    let a = with_threads(opts.threads, || mc_two_user(&s, n, opts.seed))??;
    let b = with_threads(opts.threads, || mc_two_user(&s, n, opts.seed))??;
    let single = with_threads(Some(1), || mc_two_user(&s, n, opts.seed))??;
    let many = with_threads(Some(4), || mc_two_user(&s, n, opts.seed))??;
    let ks = KScenario::from_db(vec![0.05, 0.15, 0.8], 10.0, 25.0)?;
    let k_single = with_threads(Some(1), || mc_k_users(&ks, 200_000, opts.seed))??;
    let k_many = with_threads(Some(4), || mc_k_users(&ks, 200_000, opts.seed))??;
    let q1 = quad_verify(&s, "rate_noma_a_strong")?;
    let q2 = quad_verify(&s, "rate_noma_a_strong")?;
    Ok(vec![
        Check::new("two-user Monte Carlo repeated with the same seed", a == b, "bit-identical estimates required"),
        Check::new("two-user Monte Carlo, 1 worker vs 4 workers", single == many, "bit-identical estimates required"),
        Check::new("K = 3 Monte Carlo, 1 worker vs 4 workers", k_single == k_many, "bit-identical estimates required"),
        Check::new("quadrature repeated", q1 == q2, "bit-identical values required"),
    ])
}

/// Runs one criterion (1..=9).
pub fn criterion(id: u32, opts: &VerifyOptions) -> Result<Criterion> {
    let checks = match id {
        1 => criterion_1(opts),
        2 => criterion_2(opts)?,
        3 => criterion_3()?,
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(opts, true)?,
        7 => criterion_7(),
        8 => criterion_8(opts)?,
        9 => criterion_9(opts)?,
        other => return Err(Error::config("criterion", format!("no criterion {other}"))),
    };
    Ok(Criterion {
        id,
        title: TITLES[id as usize - 1],
        checks,
    })
}

/// Criterion `id` as run by the fast level: the Monte Carlo part of
/// criterion 6 is skipped, everything else is the full check.
pub fn fast_criterion(id: u32, opts: &VerifyOptions) -> Result<Criterion> {
    match id {
        6 => Ok(Criterion {
            id,
            title: TITLES[5],
            checks: criterion_6(opts, false)?,
        }),
        3 | 4 | 7 => criterion(id, opts),
        other => Err(Error::config("criterion", format!("criterion {other} is not part of the fast level"))),
    }
}

/// Runs the suite at the given level. The fast level covers the invariant
/// grid, quadrature at five scenarios, the closed-form selection checks and
/// the crossover structure.
pub fn run(level: Level, opts: &VerifyOptions) -> Result<Vec<Criterion>> {
    match level {
        Level::Full => (1..=9).map(|id| criterion(id, opts)).collect(),
        Level::Fast => [3, 4, 6, 7].into_iter().map(|id| fast_criterion(id, opts)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape() {
        let g = invariant_grid();
        assert_eq!(g.len(), 1000);
        assert!(g.iter().all(|s| s.p1() <= s.p2()));
        assert_eq!(random_scenarios(1), random_scenarios(1));
        assert_eq!(k3_grid().first(), Some(&-10.0));
        assert_eq!(k3_grid().last(), Some(&40.0));
    }

    #[test]
    fn level_parsing() {
        assert_eq!("FULL".parse::<Level>().unwrap(), Level::Full);
        assert!("slow".parse::<Level>().is_err());
    }

    #[test]
    fn report_rendering() {
        let c = Criterion {
            id: 7,
            title: TITLES[6],
            checks: vec![Check::at_most("x", 1.0, 2.0), Check::slack("y", -1.0, 0.0)],
        };
        assert!(!c.passed());
        let text = c.to_string();
        assert!(text.starts_with("criterion 7 [FAIL] crossover structure"));
        assert!(text.contains("  ok   x: measured 1.000e0, tolerance 2.0e0"));
    }
}
