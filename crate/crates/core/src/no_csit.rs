//! Fixed-rate transmission without transmitter CSI: non-outage
//! probabilities, throughputs, the OMA/NOMA crossover and the adaptive
//! (sum-throughput) selector.

use crate::channel::Scenario;
use crate::error::{Error, Result};
use crate::roots;
use crate::{Strategy, UserTarget};

/// Per-user and sum throughput in bits/s/Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputReport {
    pub t_weak: f64,
    pub t_strong: f64,
    pub t_sum: f64,
    pub strategy: Strategy,
}

/// `ψ_{i,j}(t) = λi e^{-λj γ/ρ} / (λi + λj γ) · e^{-(λi + λj γ) t}`.
fn psi(li: f64, lj: f64, gamma: f64, rho: f64, t: f64) -> f64 {
    let m = li + lj * gamma;
    li / m * (-(lj * gamma / rho) - m * t).exp()
}

pub(crate) fn psi_sum(s: &Scenario, t: f64) -> f64 {
    let (l1, l2, g, r) = (s.lambda1(), s.lambda2(), s.gamma(), s.rho());
    psi(l1, l2, g, r, t) + psi(l2, l1, g, r, t)
}

/// `P(x_B >= (γ/ρ)(1 + ρ x_A))`.
pub fn phi_noma_strong(s: &Scenario) -> f64 {
    psi_sum(s, 0.0)
}

/// Weak user decodes after a successful SIC step and with `x_A >= γ/ρ`.
pub fn phi_noma_weak(s: &Scenario) -> f64 {
    psi_sum(s, s.noma_threshold())
}

/// `P(x_B >= γ̃/2ρ)`.
pub fn phi_oma_strong(s: &Scenario) -> f64 {
    let t = s.oma_threshold();
    // 1 - (1 - e^{-λ1 t})(1 - e^{-λ2 t}) as a sum of positive terms
    let weak_rate_term = (-s.lambda1() * t).exp();
    weak_rate_term + (-s.lambda2() * t).exp() * -(-s.lambda1() * t).exp_m1()
}

/// `P(x_A >= γ̃/2ρ)`.
pub fn phi_oma_weak(s: &Scenario) -> f64 {
    (-s.lambda_sum() * s.oma_threshold()).exp()
}

/// Information per user and slot pair normalisation, `log2(1 + γ)`.
pub fn rate_quantum(s: &Scenario) -> f64 {
    s.gamma().ln_1p() / std::f64::consts::LN_2
}

fn report(s: &Scenario, phi_weak: f64, phi_strong: f64, strategy: Strategy) -> ThroughputReport {
    let q = rate_quantum(s);
    let (t_weak, t_strong) = (phi_weak * q, phi_strong * q);
    ThroughputReport {
        t_weak,
        t_strong,
        t_sum: t_weak + t_strong,
        strategy,
    }
}

/// Throughput under OMA, NOMA or the adaptive selection.
pub fn throughput(s: &Scenario, strategy: Strategy) -> ThroughputReport {
    match strategy {
        Strategy::Noma => report(s, phi_noma_weak(s), phi_noma_strong(s), strategy),
        Strategy::Oma => report(s, phi_oma_weak(s), phi_oma_strong(s), strategy),
        Strategy::NomaA => ThroughputReport {
            strategy,
            ..throughput(s, select_no_csit(s))
        },
    }
}

/// `g_A(ρ) = φ_{A,N} / φ_{A,O}`.
pub fn ga_ratio(s: &Scenario) -> f64 {
    ga_ratio_ln(s).exp()
}

/// `ln g_A(ρ)`, finite even where `g_A` itself overflows (`ρ → 0`).
pub fn ga_ratio_ln(s: &Scenario) -> f64 {
    let (l1, l2, g, r) = (s.lambda1(), s.lambda2(), s.gamma(), s.rho());
    let shift = (l1 - l2) * g * g / (2.0 * r);
    let a = (l1 / (l1 + l2 * g)).ln() + shift;
    let b = (l2 / (l2 + l1 * g)).ln() - shift;
    let hi = a.max(b);
    hi + ((a - hi).exp() + (b - hi).exp()).ln()
}

/// Search range for the crossover solver.
pub const RHO_SCAN: (f64, f64) = (1e-6, 1e12);
const RHO_SCAN_POINTS: usize = 200;
const RHO_REL_TOL: f64 = 1e-6;

/// Smallest `ρ` above which the OMA throughput of `target` is at least the
/// NOMA throughput.
///
/// The weak-user ratio `g_A` is monotone, so a plain bisection of
/// `ln g_A = 0` suffices. For the strong user and the sum no single-crossing
/// result is available, so the largest crossing on a log-spaced scan is
/// bisected. A metric where OMA already dominates at the lower end of the
/// scan range returns that lower end.
pub fn rho_min(s: &Scenario, target: UserTarget) -> Result<f64> {
    let (lo, hi) = RHO_SCAN;
    let at = |rho: f64| s.with_rho(rho).expect("rho is positive");
    match target {
        UserTarget::Weak => {
            let f = |rho: f64| -ga_ratio_ln(&at(rho));
            if f(hi) < 0.0 {
                return Err(Error::NoCrossover { lo, hi });
            }
            if f(lo) >= 0.0 {
                return Ok(lo);
            }
            Ok(roots::bisect_log(f, lo, hi, RHO_REL_TOL))
        }
        UserTarget::Strong => roots::last_crossing(
            |rho| {
                let s = at(rho);
                phi_oma_strong(&s) - phi_noma_strong(&s)
            },
            lo,
            hi,
            RHO_SCAN_POINTS,
            RHO_REL_TOL,
        ),
        UserTarget::Sum => roots::last_crossing(
            |rho| {
                let s = at(rho);
                (phi_oma_strong(&s) + phi_oma_weak(&s)) - (phi_noma_strong(&s) + phi_noma_weak(&s))
            },
            lo,
            hi,
            RHO_SCAN_POINTS,
            RHO_REL_TOL,
        ),
    }
}

/// Adaptive choice maximising the closed-form sum throughput; ties go to NOMA.
pub fn select_no_csit(s: &Scenario) -> Strategy {
    let noma = phi_noma_weak(s) + phi_noma_strong(s);
    let oma = phi_oma_weak(s) + phi_oma_strong(s);
    if noma >= oma {
        Strategy::Noma
    } else {
        Strategy::Oma
    }
}
