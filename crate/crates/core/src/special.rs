//! Exponential-integral kernels behind every closed form.
//!
//! Every rate expression in the analysis is a combination of `E1` terms
//! multiplied by exponentials whose arguments grow like `λ/ρ`. Evaluating
//! those products literally overflows at low SNR, so the kernels here work
//! with the scaled function `s(x) = e^x E1(x)` and let callers combine
//! exponents before exponentiating.

use crate::error::{ensure_nonneg, ensure_positive, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Evaluation policy for the exponential integral.
///
/// Below `series_cutoff` the power series is summed; at or above it a
/// continued fraction (modified Lentz) is used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalPolicy {
    series_cutoff: f64,
    max_terms: usize,
    rel_tol: f64,
}

impl Default for EvalPolicy {
    fn default() -> Self {
        Self {
            series_cutoff: 1.0,
            max_terms: 1000,
            rel_tol: 1e-12,
        }
    }
}

const DEFAULT_POLICY: EvalPolicy = EvalPolicy {
    series_cutoff: 1.0,
    max_terms: 1000,
    rel_tol: 1e-12,
};

impl EvalPolicy {
    pub fn new(series_cutoff: f64, max_terms: usize, rel_tol: f64) -> Result<Self> {
        ensure_positive("series_cutoff", series_cutoff)?;
        if !(rel_tol > 0.0 && rel_tol <= 1e-6) {
            return Err(crate::Error::Domain {
                what: "rel_tol",
                requirement: "0 < rel_tol <= 1e-6",
                value: rel_tol,
            });
        }
        if max_terms < 20 {
            return Err(crate::Error::Domain {
                what: "max_terms",
                requirement: "max_terms >= 20",
                value: max_terms as f64,
            });
        }
        Ok(Self {
            series_cutoff,
            max_terms,
            rel_tol,
        })
    }

    pub fn series_cutoff(&self) -> f64 {
        self.series_cutoff
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    /// `E1(x)` for `x > 0`.
    pub fn e1(&self, x: f64) -> Result<f64> {
        ensure_positive("x", x)?;
        Ok(if x < self.series_cutoff {
            self.series(x)
        } else {
            (-x).exp() * self.continued_fraction(x)
        })
    }

    /// `e^x E1(x)` for `x > 0`; finite for arbitrarily large `x`.
    pub fn scaled_e1(&self, x: f64) -> Result<f64> {
        ensure_positive("x", x)?;
        Ok(self.scaled_unchecked(x))
    }

    #[inline]
    fn scaled_unchecked(&self, x: f64) -> f64 {
        if x < self.series_cutoff {
            x.exp() * self.series(x)
        } else {
            self.continued_fraction(x)
        }
    }

    /// `-γ_E - ln x - Σ_{n≥1} (-x)^n / (n n!)`.
    fn series(&self, x: f64) -> f64 {
        let mut sum = 0.0;
        let mut power = 1.0; // (-x)^n / n!
        for n in 1..=self.max_terms {
            power *= -x / n as f64;
            let term = power / n as f64;
            sum += term;
            if term.abs() <= self.rel_tol * sum.abs() * 1e-3 {
                break;
            }
        }
        -EULER_GAMMA - x.ln() - sum
    }

    /// Continued fraction for `e^x E1(x)`, `x >= 1`.
    fn continued_fraction(&self, x: f64) -> f64 {
        const TINY: f64 = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..=self.max_terms {
            let a = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let delta = c * d;
            h *= delta;
            if (delta - 1.0).abs() <= self.rel_tol * 1e-3 {
                break;
            }
        }
        h
    }
}

/// Exponential integral `E1(x) = ∫_x^∞ e^{-t}/t dt`.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    DEFAULT_POLICY.e1(x)
}

/// `e^x E1(x)`.
pub fn scaled_e1(x: f64) -> Result<f64> {
    DEFAULT_POLICY.scaled_e1(x)
}

/// `α(γ, λ, ρ) = ∫_{γ/ρ}^∞ ln(1 + ρx) e^{-λx} dx`.
pub fn alpha(gamma: f64, lambda: f64, rho: f64) -> Result<f64> {
    ensure_positive("gamma", gamma)?;
    ensure_positive("lambda", lambda)?;
    ensure_positive("rho", rho)?;
    Ok(alpha_raw(gamma, lambda, rho))
}

/// `∫_S^∞ e^{-px} E1(ax + b) dx` for `p, a, b > 0`, `S >= 0`.
pub fn laplace_shifted_e1(p: f64, a: f64, b: f64, s: f64) -> Result<f64> {
    ensure_positive("p", p)?;
    ensure_positive("a", a)?;
    ensure_positive("b", b)?;
    ensure_nonneg("S", s)?;
    Ok(laplace_tail(p, a, b, s).value())
}

// ---------------------------------------------------------------------------
// Crate-internal unchecked kernels used by the closed forms.

/// `e^x E1(x)` without the domain check.
#[inline]
pub(crate) fn sx(x: f64) -> f64 {
    debug_assert!(x > 0.0, "scaled E1 needs x > 0, got {x}");
    DEFAULT_POLICY.scaled_unchecked(x)
}

/// `e^{c} E1(d)` evaluated as `e^{c-d} s(d)`.
#[cfg(test)]
pub(crate) fn exp_e1(c: f64, d: f64) -> f64 {
    (c - d).exp() * sx(d)
}

#[inline]
pub(crate) fn alpha_raw(gamma: f64, lambda: f64, rho: f64) -> f64 {
    let lower = lambda * gamma / rho;
    (-lower).exp() / lambda * (gamma.ln_1p() + sx((gamma + 1.0) * lambda / rho))
}

/// A value stored as `e^{exponent} · mantissa`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Scaled {
    pub exponent: f64,
    pub mantissa: f64,
}

impl Scaled {
    #[inline]
    pub fn value(self) -> f64 {
        self.exponent.exp() * self.mantissa
    }

    /// `e^{c} · self`.
    #[inline]
    pub fn times_exp(self, c: f64) -> f64 {
        (self.exponent + c).exp() * self.mantissa
    }
}

/// `∫_S^∞ e^{-px} E1(ax + b) dx` in scaled form.
///
/// Valid for any `p > -a` (the integral converges there); the removable
/// singularity at `p = 0` is handled with a second-order expansion.
pub(crate) fn laplace_tail(p: f64, a: f64, b: f64, s: f64) -> Scaled {
    debug_assert!(a > 0.0 && b > 0.0 && s >= 0.0 && p > -a);
    let x = b + a * s;
    let ratio = p / a;
    let mantissa = if ratio.abs() < 1e-6 {
        let s0 = sx(x);
        let d1 = s0 - 1.0 / x;
        let d2 = d1 + 1.0 / (x * x);
        -(x / a) * (d1 + 0.5 * d2 * x * ratio)
    } else {
        (sx(x) - sx(x * (1.0 + ratio))) / p
    };
    Scaled {
        exponent: -p * s - x,
        mantissa,
    }
}
