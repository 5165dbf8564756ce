//! Full transmitter CSI with a minimum instantaneous rate `log2(1+γ)`:
//! average data rates for OMA, NOMA and adaptive NOMA, the per-draw
//! adaptive decision, activity probabilities and high-SNR asymptotes.
//!
//! All closed forms are assembled in nats and converted to bits/s/Hz once.
//! Products of the form `e^{c} E1(d)` are evaluated as `e^{c-d} s(d)` with
//! `s(x) = e^x E1(x)`, so nothing overflows at low SNR.

use std::f64::consts::LN_2;
use std::fmt;

use crate::channel::{ChannelDraw, Scenario};
use crate::error::{Error, Result};
use crate::no_csit::{self, psi_sum};
use crate::special::{alpha_raw, laplace_tail, sx, EULER_GAMMA};
use crate::{Strategy, UserTarget};

/// Which route produced a number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    ClosedForm,
    MonteCarlo,
    Quadrature,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::ClosedForm => "closed_form",
            Provenance::MonteCarlo => "monte_carlo",
            Provenance::Quadrature => "quadrature",
        })
    }
}

/// Average data rates in bits/s/Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateReport {
    pub r_weak: f64,
    pub r_strong: f64,
    pub r_sum: f64,
    pub strategy: Strategy,
    pub provenance: Provenance,
}

impl RateReport {
    pub fn new(r_weak: f64, r_strong: f64, strategy: Strategy, provenance: Provenance) -> Self {
        Self {
            r_weak,
            r_strong,
            r_sum: r_weak + r_strong,
            strategy,
            provenance,
        }
    }
}

#[derive(Clone, Copy)]
struct Params {
    l1: f64,
    l2: f64,
    sum: f64,
    g: f64,
    gt: f64,
    r: f64,
}

impl Params {
    fn of(s: &Scenario) -> Self {
        Self {
            l1: s.lambda1(),
            l2: s.lambda2(),
            sum: s.lambda_sum(),
            g: s.gamma(),
            gt: s.gamma_tilde(),
            r: s.rho(),
        }
    }

    /// Both ordered (i, j) assignments of the two rate parameters.
    fn pairs(&self) -> [(f64, f64); 2] {
        [(self.l1, self.l2), (self.l2, self.l1)]
    }
}

// ---------------------------------------------------------------------------
// NOMA

/// Weak-user NOMA rate `E[R_A]`.
pub fn rate_noma_weak(s: &Scenario) -> f64 {
    let p = Params::of(s);
    p.sum * alpha_raw(p.g, p.sum, p.r) / LN_2
}

/// Strong-user NOMA rate while the weak user is silent (`x_A < γ/ρ`).
pub fn noma_strong_rate_weak_idle(s: &Scenario) -> f64 {
    let p = Params::of(s);
    let t = p.g / p.r;
    let nats = p.l2 * -(-p.l1 * t).exp_m1() * alpha_raw(p.g, p.l2, p.r)
        + p.l1 * -(-p.l2 * t).exp_m1() * alpha_raw(p.g, p.l1, p.r);
    nats / LN_2
}

// Strong-user NOMA rate with the weak user active, one (i, j) half, in nats.
fn beta(li: f64, lj: f64, p: &Params) -> f64 {
    let (g, r) = (p.g, p.r);
    let m = li + lj * g;
    let decoded = li * g.ln_1p() / m * (-(lj * g / r) - m * g / r).exp();
    // ∫_{γ/ρ}^∞ e^{-(λi-λj)x} E1(λj(1+γ)(1+ρx)/ρ) dx; λi = λj is a removable pole
    let a = lj * (1.0 + g);
    let tail = laplace_tail(li - lj, a, a / r, g / r).times_exp(lj / r);
    decoded + li * tail
}

/// Strong-user NOMA rate while the weak user is active (SIC decoded first).
pub fn noma_strong_rate_weak_active(s: &Scenario) -> f64 {
    let p = Params::of(s);
    p.pairs().iter().map(|&(i, j)| beta(i, j, &p)).sum::<f64>() / LN_2
}

/// Strong-user NOMA rate `E[R_B]`.
pub fn rate_noma_strong(s: &Scenario) -> f64 {
    noma_strong_rate_weak_idle(s) + noma_strong_rate_weak_active(s)
}

// ---------------------------------------------------------------------------
// OMA

/// `(E[R̃_A], E[R̃_B])`.
pub fn rate_oma(s: &Scenario) -> (f64, f64) {
    let p = Params::of(s);
    let r2 = 2.0 * p.r;
    let weak = p.sum * alpha_raw(p.gt, p.sum, r2);
    let strong = p.l1 * alpha_raw(p.gt, p.l1, r2) + p.l2 * alpha_raw(p.gt, p.l2, r2) - weak;
    (weak / (2.0 * LN_2), strong.max(0.0) / (2.0 * LN_2))
}

// ---------------------------------------------------------------------------
// Adaptive NOMA

fn chi(li: f64, lj: f64, p: &Params) -> f64 {
    let m = li + lj * p.g;
    let e = (-lj * p.g / p.r).exp();
    let r2 = 2.0 * p.r;
    li * e * alpha_raw(p.g, m, p.r) + 0.5 * li * (alpha_raw(p.gt, p.sum, r2) - e * alpha_raw(p.gt, m, r2))
}

/// Weak-user adaptive-NOMA rate `E[R̂_A]`.
pub fn rate_noma_a_weak(s: &Scenario) -> f64 {
    let p = Params::of(s);
    p.pairs().iter().map(|&(i, j)| chi(i, j, &p)).sum::<f64>() / LN_2
}

fn omega(li: f64, lj: f64, p: &Params) -> f64 {
    let (g, gt, r) = (p.g, p.gt, p.r);
    let m = li + lj * g;
    let t = gt / (2.0 * r);
    let k = (1.0 + 2.0 * g) / (2.0 * g * r);
    let whole = li * alpha_raw(gt, p.sum, 2.0 * r);
    let envelope = li / m * (-(lj * g / r) - m * t).exp();
    let cut = envelope * ((2.0 * g + g * gt).ln_1p() + sx(m * (t + k)));
    let lower = laplace_tail(li, lj, lj / (2.0 * r), t).times_exp(lj / (2.0 * r));
    let upper = laplace_tail(li, lj * g, lj * (1.0 + 2.0 * g) / (2.0 * r), t).times_exp(lj / (2.0 * r));
    whole - cut + li * (lower - upper)
}

/// Strong-user rate in the adaptive scheme's OMA branch (both users active).
pub fn noma_a_strong_rate_oma(s: &Scenario) -> f64 {
    let p = Params::of(s);
    let nats: f64 = p.pairs().iter().map(|&(i, j)| omega(i, j, &p)).sum();
    nats.max(0.0) / (2.0 * LN_2)
}

// (λ1+λ2)·α(t, λ1+λ2, ρ)
fn delta(t: f64, p: &Params) -> f64 {
    (-p.sum * t / p.r).exp() * (t.ln_1p() + sx(p.sum * (t + 1.0) / p.r))
}

fn mu(li: f64, lj: f64, t: f64, p: &Params) -> f64 {
    let (g, r) = (p.g, p.r);
    let m = li + lj * g;
    let envelope = li / m * (-(lj * g / r) - m * t / r).exp();
    let cut = envelope * ((g + g * t).ln_1p() + sx(m * (t + (1.0 + g) / g) / r));
    let lower = laplace_tail(li, lj, lj / r, t / r).times_exp(lj / r);
    let upper = laplace_tail(li, lj * g, lj * (1.0 + g) / r, t / r).times_exp(lj / r);
    -cut + li * (lower - upper)
}

/// Strong user transmitting alone after the weak user failed both NOMA
/// and OMA (`γ/ρ <= x_A < γ̃/2ρ`, `x_B < (γ/ρ)(1+ρx_A)`).
pub fn noma_a_strong_rate_fallback(s: &Scenario) -> f64 {
    let p = Params::of(s);
    let (lo, hi) = (p.g, p.gt / 2.0);
    let mut nats = delta(lo, &p) - delta(hi, &p);
    for (i, j) in p.pairs() {
        nats += mu(i, j, lo, &p) - mu(i, j, hi, &p);
    }
    nats.max(0.0) / LN_2
}

/// Strong-user adaptive-NOMA rate `E[R̂_B]`.
pub fn rate_noma_a_strong(s: &Scenario) -> f64 {
    rate_noma_strong(s) + noma_a_strong_rate_fallback(s) + noma_a_strong_rate_oma(s)
}

/// `(E[R̂_A], E[R̂_B])`.
pub fn rate_noma_a(s: &Scenario) -> (f64, f64) {
    (rate_noma_a_weak(s), rate_noma_a_strong(s))
}

/// Closed-form average rates for one strategy.
pub fn rates(s: &Scenario, strategy: Strategy) -> RateReport {
    let (weak, strong) = match strategy {
        Strategy::Noma => (rate_noma_weak(s), rate_noma_strong(s)),
        Strategy::Oma => rate_oma(s),
        Strategy::NomaA => rate_noma_a(s),
    };
    RateReport::new(weak, strong, strategy, Provenance::ClosedForm)
}

// ---------------------------------------------------------------------------
// Per-draw decision

/// Outcome of the adaptive full-CSI decision for one draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Both users active in NOMA.
    NomaBoth,
    /// Weak user below threshold; strong user alone, interference-free.
    StrongOnlyFree,
    /// NOMA fails for the strong user; both active in OMA.
    OmaBoth,
    /// OMA only admits the weak user.
    WeakOnlyFree,
    /// Weak user fails OMA; the strong user transmits alone instead.
    StrongOnlyFallback,
    /// Both inactive.
    Idle,
}

impl Mode {
    pub const ALL: [Mode; 6] = [
        Mode::NomaBoth,
        Mode::StrongOnlyFree,
        Mode::OmaBoth,
        Mode::WeakOnlyFree,
        Mode::StrongOnlyFallback,
        Mode::Idle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::NomaBoth => "NOMA_both",
            Mode::StrongOnlyFree => "StrongOnly_free",
            Mode::OmaBoth => "OMA_both",
            Mode::WeakOnlyFree => "WeakOnly_free",
            Mode::StrongOnlyFallback => "StrongOnly_fallback",
            Mode::Idle => "None",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StrategyDecision {
    pub mode: Mode,
    pub active_weak: bool,
    pub active_strong: bool,
}

impl From<Mode> for StrategyDecision {
    fn from(mode: Mode) -> Self {
        let (active_weak, active_strong) = match mode {
            Mode::NomaBoth | Mode::OmaBoth => (true, true),
            Mode::StrongOnlyFree | Mode::StrongOnlyFallback => (false, true),
            Mode::WeakOnlyFree => (true, false),
            Mode::Idle => (false, false),
        };
        Self {
            mode,
            active_weak,
            active_strong,
        }
    }
}

/// Adaptive decision for an ordered pair `xa <= xb`.
#[inline]
pub fn decide_two_user(s: &Scenario, xa: f64, xb: f64) -> Mode {
    let noma = s.noma_threshold();
    let oma = s.oma_threshold();
    if xa >= noma {
        if xb >= s.sic_threshold(xa) {
            Mode::NomaBoth
        } else if xa >= oma {
            if xb >= oma {
                Mode::OmaBoth
            } else {
                Mode::WeakOnlyFree
            }
        } else if xb >= noma {
            Mode::StrongOnlyFallback
        } else {
            Mode::Idle
        }
    } else if xb >= noma {
        Mode::StrongOnlyFree
    } else {
        Mode::Idle
    }
}

/// Adaptive decision for a two-user draw.
pub fn decide_noma_a(s: &Scenario, draw: &ChannelDraw) -> Result<StrategyDecision> {
    if draw.users() != 2 {
        return Err(Error::InvalidScenario(format!(
            "adaptive full-CSI decision needs 2 users, got {}",
            draw.users()
        )));
    }
    Ok(decide_two_user(s, draw.weak(), draw.strong()).into())
}

/// Instantaneous rates `(weak, strong)` in bits/s/Hz under a decision.
#[inline]
pub fn instantaneous_rates(s: &Scenario, xa: f64, xb: f64, mode: Mode) -> (f64, f64) {
    let r = s.rho();
    let full = |x: f64| (r * x).ln_1p() / LN_2;
    let half = |x: f64| 0.5 * (2.0 * r * x).ln_1p() / LN_2;
    match mode {
        Mode::NomaBoth => (full(xa), (r * xb / (1.0 + r * xa)).ln_1p() / LN_2),
        Mode::StrongOnlyFree | Mode::StrongOnlyFallback => (0.0, full(xb)),
        Mode::OmaBoth => (half(xa), half(xb)),
        // reached only from the OMA check, so the weak user keeps its OMA slot
        Mode::WeakOnlyFree => (half(xa), 0.0),
        Mode::Idle => (0.0, 0.0),
    }
}

// ---------------------------------------------------------------------------
// Activity

/// Probability that both users are active.
pub fn activity_probability(s: &Scenario, strategy: Strategy) -> f64 {
    match strategy {
        Strategy::Noma => no_csit::phi_noma_weak(s),
        Strategy::Oma => no_csit::phi_oma_weak(s),
        Strategy::NomaA => no_csit::phi_noma_weak(s) + oma_rescue_probability(s),
    }
}

/// `P(x_A >= γ̃/2ρ, x_B < (γ/ρ)(1+ρx_A))`: NOMA fails but OMA carries both.
pub fn oma_rescue_probability(s: &Scenario) -> f64 {
    let t = s.oma_threshold();
    ((-s.lambda_sum() * t).exp() - psi_sum(s, t)).max(0.0)
}

// ---------------------------------------------------------------------------
// Asymptotes

/// High-SNR line `rate ≈ slope·ln ρ + intercept` (bits/s/Hz per neper of ρ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoteReport {
    pub slope: f64,
    pub intercept: f64,
}

impl AsymptoteReport {
    pub fn at(&self, rho: f64) -> f64 {
        self.slope * rho.ln() + self.intercept
    }

    fn plus(self, other: Self) -> Self {
        Self {
            slope: self.slope + other.slope,
            intercept: self.intercept + other.intercept,
        }
    }
}

/// Constant high-SNR limit of the strong user's NOMA rate.
pub fn noma_strong_asymptote(s: &Scenario) -> f64 {
    let (l1, l2, g) = (s.lambda1(), s.lambda2(), s.gamma());
    let m = s.m_gamma();
    let rel = (l1 - l2).abs() / l1.max(l2);
    let cross = if rel < 1e-6 {
        2.0 / (1.0 + g)
    } else {
        (l1 * ((l1 + l2 * g) / (l2 * (1.0 + g))).ln() - l2 * ((l2 + l1 * g) / (l1 * (1.0 + g))).ln()) / (l1 - l2)
    };
    (m * g.ln_1p() + cross) / LN_2
}

/// Analytic slope and intercept of a rate in `ln ρ`.
pub fn asymptotics(s: &Scenario, strategy: Strategy, user: UserTarget) -> AsymptoteReport {
    let (l1, l2, g) = (s.lambda1(), s.lambda2(), s.gamma());
    let l = l1 + l2;
    let m = s.m_gamma();
    let ln2 = LN_2;
    let line = |slope: f64, intercept: f64| AsymptoteReport { slope, intercept };
    let weighted_ln: f64 = [(l1, l2), (l2, l1)]
        .iter()
        .map(|&(i, j)| {
            let mij = i + j * g;
            i / mij * mij.ln()
        })
        .sum();
    let sigma: f64 = [(l1, l2), (l2, l1)]
        .iter()
        .map(|&(i, j)| {
            let mij = i + j * g;
            i / mij * (mij / (2.0 * g)).ln() + ((i + j) / j).ln() + (j * g / mij).ln()
        })
        .sum();

    let weak = match strategy {
        Strategy::Noma => line(1.0 / ln2, (-l.ln() - EULER_GAMMA) / ln2),
        Strategy::Oma => line(0.5 / ln2, (ln2 - l.ln() - EULER_GAMMA) / (2.0 * ln2)),
        Strategy::NomaA => line(
            (1.0 + m) / (2.0 * ln2),
            (ln2 * (1.0 - m) - EULER_GAMMA * (1.0 + m) - l.ln() - weighted_ln) / (2.0 * ln2),
        ),
    };
    let strong = match strategy {
        Strategy::Noma => line(0.0, noma_strong_asymptote(s)),
        Strategy::Oma => line(0.5 / ln2, (ln2 + l.ln() - l1.ln() - l2.ln() - EULER_GAMMA) / (2.0 * ln2)),
        Strategy::NomaA => line(
            (1.0 - m) / (2.0 * ln2),
            noma_strong_asymptote(s) + (-EULER_GAMMA * (1.0 - m) + ln2 - l.ln() + sigma) / (2.0 * ln2),
        ),
    };
    match user {
        UserTarget::Weak => weak,
        UserTarget::Strong => strong,
        UserTarget::Sum => weak.plus(strong),
    }
}

/// Closed-form rate of one user (or the sum) under a strategy.
pub fn rate_of(s: &Scenario, strategy: Strategy, user: UserTarget) -> f64 {
    let r = rates(s, strategy);
    match user {
        UserTarget::Weak => r.r_weak,
        UserTarget::Strong => r.r_strong,
        UserTarget::Sum => r.r_sum,
    }
}

/// Slope and intercept fitted from the closed form at two SNRs.
pub fn fitted_asymptote(s: &Scenario, strategy: Strategy, user: UserTarget, rho_lo: f64, rho_hi: f64) -> AsymptoteReport {
    let lo = rate_of(&s.with_rho(rho_lo).expect("positive rho"), strategy, user);
    let hi = rate_of(&s.with_rho(rho_hi).expect("positive rho"), strategy, user);
    let slope = (hi - lo) / (rho_hi.ln() - rho_lo.ln());
    AsymptoteReport {
        slope,
        intercept: hi - slope * rho_hi.ln(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn operating_point(rho_db: f64) -> Scenario {
        Scenario::from_db(0.1, 0.9, 10.0, rho_db).unwrap()
    }

    // Reference values from an mpmath evaluation of the defining double
    // integrals at P = (0.1, 0.9), γ = 10 dB, ρ = 20 dB (nats).
    #[test]
    fn building_blocks_at_20db() {
        let s = operating_point(20.0);
        assert_relative_eq!(noma_strong_rate_weak_active(&s) * LN_2, 0.143_019_370_755_626_5, max_relative = 1e-10);
        assert_relative_eq!(rate_noma_a_weak(&s) * LN_2, 0.142_737_528_697_410_7, max_relative = 1e-10);
        assert_relative_eq!(noma_a_strong_rate_oma(&s) * 2.0 * LN_2, 0.007_092_396_622_493_165, max_relative = 1e-9);
        assert_relative_eq!(noma_a_strong_rate_fallback(&s) * LN_2, 1.128_021_291_794_955_7, max_relative = 1e-10);
    }

    #[test]
    fn weak_user_ordering() {
        for rho_db in [-10.0, 0.0, 10.0, 20.0, 30.0, 40.0, 60.0] {
            let s = operating_point(rho_db);
            let noma = rate_noma_weak(&s);
            let adaptive = rate_noma_a_weak(&s);
            let oma = rate_oma(&s).0;
            assert!(noma >= adaptive - 1e-12 && adaptive >= oma - 1e-12, "{rho_db}: {noma} {adaptive} {oma}");
            assert!(rate_noma_a_strong(&s) >= rate_noma_strong(&s));
        }
    }

    #[test]
    fn low_and_high_snr_limits() {
        let s = operating_point(-30.0);
        for v in [rate_noma_weak(&s), rate_noma_strong(&s), rate_oma(&s).0, rate_noma_a_weak(&s)] {
            assert!((0.0..1e-10).contains(&v));
        }
        let s = Scenario::from_db(0.1, 0.9, 60.0, 20.0).unwrap();
        assert!(rate_noma_strong(&s) < 1e-100);
        let s = operating_point(80.0);
        assert_relative_eq!(rate_noma_strong(&s), noma_strong_asymptote(&s), max_relative = 1e-4);
    }

    #[test]
    fn equal_powers_use_the_limit() {
        let eq = Scenario::from_db(0.5, 0.5, 10.0, 20.0).unwrap();
        let near = Scenario::from_db(0.5, 0.5 * (1.0 + 1e-7), 10.0, 20.0).unwrap();
        let apart = Scenario::from_db(0.5, 0.5 * (1.0 + 1e-4), 10.0, 20.0).unwrap();
        let v = rate_noma_strong(&eq);
        assert!(v.is_finite() && v > 0.0);
        assert_relative_eq!(rate_noma_strong(&near), v, max_relative = 1e-6);
        assert_relative_eq!(rate_noma_strong(&apart), v, max_relative = 1e-4);
        assert_relative_eq!(noma_strong_asymptote(&near), noma_strong_asymptote(&eq), max_relative = 1e-6);
    }

    #[test]
    fn oma_strong_dominates_weak() {
        for (p1, p2) in [(0.1, 0.9), (0.5, 0.5), (0.3, 0.7)] {
            let s = Scenario::from_db(p1, p2, 10.0, 25.0).unwrap();
            let (w, b) = rate_oma(&s);
            assert!(b >= w);
        }
    }

    #[test]
    fn decision_table() {
        let s = operating_point(20.0); // γ/ρ = 0.1, γ̃/2ρ = 0.6
        assert_eq!(decide_two_user(&s, 0.0, 0.0), Mode::Idle);
        assert_eq!(decide_two_user(&s, 0.2, 1e6), Mode::NomaBoth);
        assert_eq!(decide_two_user(&s, 0.05, 0.2), Mode::StrongOnlyFree);
        assert_eq!(decide_two_user(&s, 0.05, 0.08), Mode::Idle);
        assert_eq!(decide_two_user(&s, 0.7, 0.8), Mode::OmaBoth);
        assert_eq!(decide_two_user(&s, 0.2, 0.3), Mode::StrongOnlyFallback);
        // unordered input still follows the printed branches
        assert_eq!(decide_two_user(&s, 0.7, 0.5), Mode::WeakOnlyFree);
        let d = decide_noma_a(&s, &ChannelDraw::two_user(0.7, 0.8).unwrap()).unwrap();
        assert!(d.active_weak && d.active_strong);
        assert!(decide_noma_a(&s, &ChannelDraw::new(vec![0.1, 0.2, 0.3]).unwrap()).is_err());
    }

    #[test]
    fn activity_dominance() {
        for rho_db in [-10.0, 0.0, 10.0, 20.0, 30.0, 40.0] {
            let s = operating_point(rho_db);
            let a = activity_probability(&s, Strategy::NomaA);
            assert!(a >= activity_probability(&s, Strategy::Noma));
            assert!(a >= activity_probability(&s, Strategy::Oma));
            assert!(a <= 1.0);
        }
        assert_relative_eq!(activity_probability(&operating_point(120.0), Strategy::Oma), 1.0, max_relative = 1e-9);
    }

    #[test]
    fn slopes_are_as_stated() {
        let s = operating_point(0.0);
        let noma = asymptotics(&s, Strategy::Noma, UserTarget::Weak).slope;
        let oma = asymptotics(&s, Strategy::Oma, UserTarget::Weak).slope;
        assert_relative_eq!(noma, 2.0 * oma, max_relative = 1e-15);
        let m = s.m_gamma();
        assert_relative_eq!(
            asymptotics(&s, Strategy::NomaA, UserTarget::Weak).slope,
            (1.0 + m) / (2.0 * LN_2),
            max_relative = 1e-15
        );
        for strategy in Strategy::ALL {
            assert_relative_eq!(asymptotics(&s, strategy, UserTarget::Sum).slope, 1.0 / LN_2, max_relative = 1e-14);
        }
    }

    #[test]
    fn intercepts_match_closed_forms_far_out() {
        for strategy in Strategy::ALL {
            for user in [UserTarget::Weak, UserTarget::Strong] {
                let s = operating_point(100.0);
                let line = asymptotics(&s, strategy, user);
                let exact = rate_of(&s, strategy, user);
                assert!((line.at(s.rho()) - exact).abs() < 1e-4 * exact.max(1.0), "{strategy:?} {user:?}: {} vs {exact}", line.at(s.rho()));
            }
        }
    }
}
