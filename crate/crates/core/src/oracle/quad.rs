//! Registry of (closed form, defining integral) pairs.
//!
//! Each integral is written directly from the event or expectation it
//! describes: a region of the ordered wedge `0 <= x_A <= x_B`, a weight, and
//! the joint density. Nothing here touches E1.

use std::f64::consts::LN_2;

use crate::channel::Scenario;
use crate::error::{Error, Result};
use crate::full_csit as fc;
use crate::no_csit as nc;
use crate::quadrature::Integrator;

/// Outcome of one closed-form vs quadrature comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadCheck {
    pub closed: f64,
    pub integral: f64,
    pub rel_err: f64,
}

/// Every registered identifier, in report order.
pub const FORMULAS: [&str; 15] = [
    "phi_noma_strong",
    "phi_noma_weak",
    "phi_oma_strong",
    "phi_oma_weak",
    "rate_noma_weak",
    "j_strong_weak_idle",
    "j_strong_weak_active",
    "rate_noma_strong",
    "rate_oma_weak",
    "rate_oma_strong",
    "rate_noma_a_weak",
    "jhat_strong_oma",
    "jhat_strong_fallback",
    "rate_noma_a_strong",
    "activity_noma_a",
];

/// Upper end of a range: a finite point or `+∞`.
#[derive(Clone, Copy)]
enum Upper {
    At(f64),
    Infinity,
}

/// One piece `∫_{a_lo}^{a_hi} da ∫_{b_lo(a)}^{b_hi(a)} w(a, b) f(a, b) db`.
struct Piece<'a> {
    a_lo: f64,
    a_hi: Upper,
    b_lo: &'a dyn Fn(f64) -> f64,
    b_hi: &'a dyn Fn(f64) -> Upper,
    weight: &'a dyn Fn(f64, f64) -> f64,
}

struct Wedge {
    l1: f64,
    l2: f64,
    outer: Integrator,
    inner: Integrator,
}

impl Wedge {
    fn new(s: &Scenario) -> Self {
        Self {
            l1: s.lambda1(),
            l2: s.lambda2(),
            outer: Integrator::new(0.0, 1e-11).with_max_segments(2000),
            inner: Integrator::new(0.0, 1e-12).with_max_segments(2000),
        }
    }

    /// Integrates one piece. The density is carried relative to its value at
    /// `a = b = a_lo`; because `b >= a`, that keeps the integrand O(1) near the
    /// start of the region even when `f` itself would underflow.
    fn piece(&self, p: &Piece<'_>) -> f64 {
        let (l1, l2) = (self.l1, self.l2);
        let a0 = p.a_lo;
        let envelope = (-(l1 + l2) * a0).exp();
        if envelope == 0.0 {
            // the weights grow at most logarithmically, so the piece underflows
            return 0.0;
        }
        let density = |a: f64, b: f64| {
            let (da, db) = (a - a0, b - a0);
            l1 * l2 * ((-(l1 * da + l2 * db)).exp() + (-(l2 * da + l1 * db)).exp())
        };
        let slow = 1.0 / l1.min(l2);
        let row = |a: f64| {
            let lo = (p.b_lo)(a);
            let h = |b: f64| {
                let d = density(a, b);
                if d == 0.0 {
                    0.0
                } else {
                    (p.weight)(a, b) * d
                }
            };
            match (p.b_hi)(a) {
                Upper::At(hi) if hi <= lo => 0.0,
                Upper::At(hi) => self.inner.finite(h, lo, hi).value,
                Upper::Infinity => self.inner.semi_infinite(h, lo, slow).value,
            }
        };
        let scaled = match p.a_hi {
            Upper::At(hi) if hi <= p.a_lo => 0.0,
            Upper::At(hi) => self.outer.finite(row, p.a_lo, hi).value,
            Upper::Infinity => self.outer.semi_infinite(row, p.a_lo, 1.0 / (l1 + l2)).value,
        };
        scaled * envelope
    }
}

/// Closed-form value of a registered identifier.
pub fn closed_form(s: &Scenario, id: &str) -> Result<f64> {
    Ok(match id {
        "phi_noma_strong" => nc::phi_noma_strong(s),
        "phi_noma_weak" => nc::phi_noma_weak(s),
        "phi_oma_strong" => nc::phi_oma_strong(s),
        "phi_oma_weak" => nc::phi_oma_weak(s),
        "rate_noma_weak" => fc::rate_noma_weak(s),
        "j_strong_weak_idle" => fc::noma_strong_rate_weak_idle(s),
        "j_strong_weak_active" => fc::noma_strong_rate_weak_active(s),
        "rate_noma_strong" => fc::rate_noma_strong(s),
        "rate_oma_weak" => fc::rate_oma(s).0,
        "rate_oma_strong" => fc::rate_oma(s).1,
        "rate_noma_a_weak" => fc::rate_noma_a_weak(s),
        "jhat_strong_oma" => fc::noma_a_strong_rate_oma(s),
        "jhat_strong_fallback" => fc::noma_a_strong_rate_fallback(s),
        "rate_noma_a_strong" => fc::rate_noma_a_strong(s),
        "activity_noma_a" => fc::activity_probability(s, crate::Strategy::NomaA),
        other => return Err(Error::UnknownFormula(other.to_string())),
    })
}

/// Quadrature of the defining integral of a registered identifier.
pub fn integral(s: &Scenario, id: &str) -> Result<f64> {
    let w = Wedge::new(s);
    let (g, r) = (s.gamma(), s.rho());
    let noma = s.noma_threshold();
    let oma = s.oma_threshold();

    let from_a = |a: f64| a;
    let from_sic = |a: f64| s.sic_threshold(a);
    let from_oma = |_: f64| oma;
    let from_noma = |_: f64| noma;
    let to_inf = |_: f64| Upper::Infinity;
    let to_sic = |a: f64| Upper::At(s.sic_threshold(a));

    let one = |_: f64, _: f64| 1.0;
    let full_a = |a: f64, _: f64| (r * a).ln_1p() / LN_2;
    let full_b = |_: f64, b: f64| (r * b).ln_1p() / LN_2;
    let half_a = |a: f64, _: f64| 0.5 * (2.0 * r * a).ln_1p() / LN_2;
    let half_b = |_: f64, b: f64| 0.5 * (2.0 * r * b).ln_1p() / LN_2;
    let sic_b = |a: f64, b: f64| (r * b / (1.0 + r * a)).ln_1p() / LN_2;

    let piece = |a_lo: f64,
                 a_hi: Upper,
                 b_lo: &dyn Fn(f64) -> f64,
                 b_hi: &dyn Fn(f64) -> Upper,
                 weight: &dyn Fn(f64, f64) -> f64| {
        w.piece(&Piece {
            a_lo,
            a_hi,
            b_lo,
            b_hi,
            weight,
        })
    };

    // Events and expectations, each named after the region it integrates.
    let noma_strong_ok = |weight: &dyn Fn(f64, f64) -> f64, a_lo: f64| piece(a_lo, Upper::Infinity, &from_sic, &to_inf, weight);
    let weak_idle_strong = || piece(0.0, Upper::At(noma), &from_noma, &to_inf, &full_b);
    let weak_active_strong = || noma_strong_ok(&sic_b, noma);
    let oma_rescue = |weight: &dyn Fn(f64, f64) -> f64| piece(oma, Upper::Infinity, &from_a, &to_sic, weight);
    let fallback = || piece(noma, Upper::At(oma), &from_a, &to_sic, &full_b);
    let strong_above_oma = |weight: &dyn Fn(f64, f64) -> f64| {
        piece(0.0, Upper::At(oma), &from_oma, &to_inf, weight) + piece(oma, Upper::Infinity, &from_a, &to_inf, weight)
    };

    debug_assert!(g >= 1.0);
    Ok(match id {
        "phi_noma_strong" => noma_strong_ok(&one, 0.0),
        "phi_noma_weak" => noma_strong_ok(&one, noma),
        "phi_oma_strong" => strong_above_oma(&one),
        "phi_oma_weak" => piece(oma, Upper::Infinity, &from_a, &to_inf, &one),
        "rate_noma_weak" => piece(noma, Upper::Infinity, &from_a, &to_inf, &full_a),
        "j_strong_weak_idle" => weak_idle_strong(),
        "j_strong_weak_active" => weak_active_strong(),
        "rate_noma_strong" => weak_idle_strong() + weak_active_strong(),
        "rate_oma_weak" => piece(oma, Upper::Infinity, &from_a, &to_inf, &half_a),
        "rate_oma_strong" => strong_above_oma(&half_b),
        "rate_noma_a_weak" => noma_strong_ok(&full_a, noma) + oma_rescue(&half_a),
        "jhat_strong_oma" => oma_rescue(&half_b),
        "jhat_strong_fallback" => fallback(),
        "rate_noma_a_strong" => weak_idle_strong() + weak_active_strong() + oma_rescue(&half_b) + fallback(),
        "activity_noma_a" => noma_strong_ok(&one, noma) + oma_rescue(&one),
        other => return Err(Error::UnknownFormula(other.to_string())),
    })
}

/// Evaluates a registered pair; `rel_err = |closed - integral| / max(|integral|, 1e-300)`.
pub fn quad_verify(s: &Scenario, id: &str) -> Result<QuadCheck> {
    let closed = closed_form(s, id)?;
    let integral = integral(s, id)?;
    Ok(QuadCheck {
        closed,
        integral,
        rel_err: (closed - integral).abs() / integral.abs().max(1e-300),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_identifier() {
        let s = Scenario::from_db(0.1, 0.9, 10.0, 20.0).unwrap();
        assert!(matches!(quad_verify(&s, "phi_nope"), Err(Error::UnknownFormula(_))));
    }

    #[test]
    fn single_exponential_is_tight() {
        let s = Scenario::from_db(0.1, 0.9, 10.0, 20.0).unwrap();
        assert!(quad_verify(&s, "phi_oma_weak").unwrap().rel_err <= 1e-12);
    }

    #[test]
    fn degenerate_threshold_is_well_defined() {
        let s = Scenario::new(0.1, 0.9, 1e4, 1e-3).unwrap();
        for id in FORMULAS {
            let c = quad_verify(&s, id).unwrap();
            assert_eq!(c.integral, 0.0, "{id}");
            assert!(c.rel_err.is_finite(), "{id}");
        }
    }
}
