//! Scenario parameters, ordered Rayleigh-fading statistics and the seeded
//! channel sampler.
//!
//! User `i` is received with power `x_i = P_i |h_i|^2`, `|h_i|^2 ~ Exp(1)`.
//! After ordering, `x_A = min` is the weak user and `x_B = max` the strong one.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{ensure_nonneg, Error, Result};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Large-scale parameters of the two-user uplink.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    p1: f64,
    p2: f64,
    gamma: f64,
    rho: f64,
}

fn check_gamma_rho(gamma: f64, rho: f64) -> Result<()> {
    if !(gamma >= 1.0 && gamma.is_finite()) {
        return Err(Error::InvalidScenario(format!("gamma must be >= 1 (linear), got {gamma}")));
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidScenario(format!("rho must be > 0, got {rho}")));
    }
    Ok(())
}

impl Scenario {
    /// All values linear. Requires `0 < p1 <= p2`, `gamma >= 1`, `rho > 0`.
    pub fn new(p1: f64, p2: f64, gamma: f64, rho: f64) -> Result<Self> {
        if !(p1 > 0.0 && p1.is_finite()) {
            return Err(Error::InvalidScenario(format!("p1 must be > 0, got {p1}")));
        }
        if !(p2 >= p1 && p2.is_finite()) {
            return Err(Error::InvalidScenario(format!("p2 must be >= p1, got p1={p1}, p2={p2}")));
        }
        check_gamma_rho(gamma, rho)?;
        Ok(Self { p1, p2, gamma, rho })
    }

    /// Powers linear, `gamma` and `rho` in dB.
    pub fn from_db(p1: f64, p2: f64, gamma_db: f64, rho_db: f64) -> Result<Self> {
        Self::new(p1, p2, db_to_linear(gamma_db), db_to_linear(rho_db))
    }

    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        Self::new(self.p1, self.p2, self.gamma, rho)
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(self.p1, self.p2, gamma, self.rho)
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }
    pub fn p2(&self) -> f64 {
        self.p2
    }
    pub fn powers(&self) -> [f64; 2] {
        [self.p1, self.p2]
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn rho(&self) -> f64 {
        self.rho
    }
    pub fn gamma_db(&self) -> f64 {
        linear_to_db(self.gamma)
    }
    pub fn rho_db(&self) -> f64 {
        linear_to_db(self.rho)
    }
    pub fn lambda1(&self) -> f64 {
        1.0 / self.p1
    }
    pub fn lambda2(&self) -> f64 {
        1.0 / self.p2
    }
    pub fn lambda_sum(&self) -> f64 {
        self.lambda1() + self.lambda2()
    }

    /// OMA SNR threshold `γ̃ = 2γ + γ²`.
    pub fn gamma_tilde(&self) -> f64 {
        self.gamma * (2.0 + self.gamma)
    }

    /// High-SNR NOMA non-outage ceiling `m(γ)`.
    pub fn m_gamma(&self) -> f64 {
        let (l1, l2, g) = (self.lambda1(), self.lambda2(), self.gamma);
        l1 / (l1 + l2 * g) + l2 / (l2 + l1 * g)
    }

    /// NOMA activation threshold on received power, `γ/ρ`.
    pub fn noma_threshold(&self) -> f64 {
        self.gamma / self.rho
    }

    /// OMA activation threshold on received power, `γ̃/(2ρ)`.
    pub fn oma_threshold(&self) -> f64 {
        self.gamma_tilde() / (2.0 * self.rho)
    }

    /// Strong-user NOMA threshold given the weak user's power, `(γ/ρ)(1 + ρ x_A)`.
    pub fn sic_threshold(&self, xa: f64) -> f64 {
        self.gamma / self.rho * (1.0 + self.rho * xa)
    }
}

/// K-user large-scale parameters (Monte Carlo only).
#[derive(Debug, Clone, PartialEq)]
pub struct KScenario {
    powers: Vec<f64>,
    gamma: f64,
    rho: f64,
}

impl KScenario {
    pub fn new(powers: Vec<f64>, gamma: f64, rho: f64) -> Result<Self> {
        if powers.len() < 2 {
            return Err(Error::InvalidScenario("need at least two users".into()));
        }
        if powers.iter().any(|p| !(*p > 0.0 && p.is_finite())) {
            return Err(Error::InvalidScenario("powers must be positive".into()));
        }
        if powers.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidScenario("powers must be ascending".into()));
        }
        check_gamma_rho(gamma, rho)?;
        Ok(Self { powers, gamma, rho })
    }

    pub fn from_db(powers: Vec<f64>, gamma_db: f64, rho_db: f64) -> Result<Self> {
        Self::new(powers, db_to_linear(gamma_db), db_to_linear(rho_db))
    }

    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        Self::new(self.powers.clone(), self.gamma, rho)
    }

    pub fn users(&self) -> usize {
        self.powers.len()
    }
    pub fn powers(&self) -> &[f64] {
        &self.powers
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Per-slot SINR threshold for a user active in `slots` of the K-slot cycle.
    pub fn slot_threshold(&self, slots: usize) -> f64 {
        slot_threshold(self.gamma, self.users(), slots)
    }

    /// The two-user view, when `K = 2`.
    pub fn two_user(&self) -> Option<Scenario> {
        match self.powers[..] {
            [p1, p2] => Scenario::new(p1, p2, self.gamma, self.rho).ok(),
            _ => None,
        }
    }
}

/// SINR a user active in `slots` of `users` slots needs so that it delivers
/// `users·log2(1+γ)` per cycle: `(1+γ)^{users/slots} - 1`.
///
/// The two common cases are evaluated with the same arithmetic as
/// [`Scenario`] so both code paths compare against bit-identical thresholds.
pub fn slot_threshold(gamma: f64, users: usize, slots: usize) -> f64 {
    debug_assert!(slots >= 1 && slots <= users);
    if slots == users {
        gamma
    } else if users == 2 * slots {
        gamma * (2.0 + gamma)
    } else {
        (users as f64 / slots as f64 * gamma.ln_1p()).exp_m1()
    }
}

impl From<&Scenario> for KScenario {
    fn from(s: &Scenario) -> Self {
        Self {
            powers: s.powers().to_vec(),
            gamma: s.gamma,
            rho: s.rho,
        }
    }
}

/// One ordered fading realisation: received powers ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDraw {
    x: Vec<f64>,
}

impl ChannelDraw {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if x.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::Domain {
                what: "received power",
                requirement: "x >= 0",
                value: x.iter().copied().find(|v| !(*v >= 0.0)).unwrap_or(f64::NAN),
            });
        }
        if x.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidScenario("channel draw must be ascending".into()));
        }
        Ok(Self { x })
    }

    pub fn two_user(xa: f64, xb: f64) -> Result<Self> {
        Self::new(vec![xa, xb])
    }

    pub fn values(&self) -> &[f64] {
        &self.x
    }
    pub fn users(&self) -> usize {
        self.x.len()
    }
    pub fn weak(&self) -> f64 {
        self.x[0]
    }
    pub fn strong(&self) -> f64 {
        self.x[self.x.len() - 1]
    }
}

/// `f_{X_A}(x) = (λ1+λ2) e^{-(λ1+λ2)x}`.
pub fn pdf_weak(s: &Scenario, x: f64) -> Result<f64> {
    ensure_nonneg("x", x)?;
    let l = s.lambda_sum();
    Ok(l * (-l * x).exp())
}

/// `f_{X_B}(x) = λ1 e^{-λ1 x} + λ2 e^{-λ2 x} - (λ1+λ2) e^{-(λ1+λ2)x}`.
pub fn pdf_strong(s: &Scenario, x: f64) -> Result<f64> {
    ensure_nonneg("x", x)?;
    let (l1, l2) = (s.lambda1(), s.lambda2());
    // λ1 e1 (1 - e2) + λ2 e2 (1 - e1), free of cancellation near 0
    let (e1, e2) = ((-l1 * x).exp(), (-l2 * x).exp());
    Ok(l1 * e1 * -(-l2 * x).exp_m1() + l2 * e2 * -(-l1 * x).exp_m1())
}

/// Joint density of `(x_A, x_B)` on the wedge `0 <= x_A <= x_B`.
pub fn pdf_joint(s: &Scenario, xa: f64, xb: f64) -> Result<f64> {
    ensure_nonneg("xa", xa)?;
    if !(xb >= xa) {
        return Err(Error::Domain {
            what: "xb",
            requirement: "xb >= xa",
            value: xb,
        });
    }
    Ok(joint_density(s.lambda1(), s.lambda2(), xa, xb))
}

#[inline]
pub(crate) fn joint_density(l1: f64, l2: f64, xa: f64, xb: f64) -> f64 {
    l1 * l2 * ((-(l1 * xa + l2 * xb)).exp() + (-(l2 * xa + l1 * xb)).exp())
}

// ---------------------------------------------------------------------------
// Sampling

/// Draws per independent generator stream.
///
/// Stream `k` of seed `s` produces draws `k·CHUNK .. (k+1)·CHUNK`; parallel
/// workers take whole chunks, so results never depend on the thread count.
pub const CHUNK: u64 = 1 << 16;

pub(crate) fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// One ordered draw into `x` (same length as `powers`).
///
/// Unit-mean exponentials are drawn in user-index order; ties keep index order.
#[inline]
pub(crate) fn draw_into(rng: &mut ChaCha8Rng, powers: &[f64], x: &mut [f64]) {
    debug_assert_eq!(powers.len(), x.len());
    for (xi, p) in x.iter_mut().zip(powers) {
        let h: f64 = Exp1.sample(rng);
        *xi = p * h;
    }
    // insertion sort, stable
    for i in 1..x.len() {
        let mut j = i;
        while j > 0 && x[j] < x[j - 1] {
            x.swap(j, j - 1);
            j -= 1;
        }
    }
}

/// Deterministic stream of ordered channel draws.
#[derive(Debug, Clone)]
pub struct Sampler {
    powers: Vec<f64>,
    seed: u64,
    remaining: u64,
    index: u64,
    rng: ChaCha8Rng,
}

impl Iterator for Sampler {
    type Item = ChannelDraw;

    fn next(&mut self) -> Option<ChannelDraw> {
        if self.remaining == 0 {
            return None;
        }
        if self.index > 0 && self.index.is_multiple_of(CHUNK) {
            self.rng = chunk_rng(self.seed, self.index / CHUNK);
        }
        let mut x = vec![0.0; self.powers.len()];
        draw_into(&mut self.rng, &self.powers, &mut x);
        self.remaining -= 1;
        self.index += 1;
        Some(ChannelDraw { x })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.remaining as usize;
        (n, Some(n))
    }
}

/// `n` ordered draws for the given per-user mean powers.
pub fn sample(powers: &[f64], n: u64, seed: u64) -> Sampler {
    Sampler {
        powers: powers.to_vec(),
        seed,
        remaining: n,
        index: 0,
        rng: chunk_rng(seed, 0),
    }
}
