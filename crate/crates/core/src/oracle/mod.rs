//! Independent verifiers for the closed forms: Monte Carlo link simulation
//! (two-user and K-user with mixed strategies) and adaptive quadrature of
//! the defining integrals.
//!
//! Monte Carlo work is split into fixed chunks of [`CHUNK`](crate::channel::CHUNK)
//! draws, each with its own generator stream. Chunk results are merged in
//! chunk order, so an estimate is bit-identical whatever the worker count.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{chunk_rng, CHUNK};
use crate::error::{Error, Result};

mod mc;
mod quad;

pub use mc::{
    mc_k_users, mc_rate_full_csit, mc_throughput, mc_two_user, KMcReport, KMcRun, KStrategy, MixedStrategy,
    TwoUserMc, TwoUserMetric,
};
pub use quad::{closed_form, integral, quad_verify, QuadCheck, FORMULAS};

/// Smallest sample count accepted by the Monte Carlo entry points.
pub const MIN_SAMPLES: u64 = 1_000;

/// A sample mean with its standard error `s/√n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: u64,
    pub seed: u64,
}

impl McEstimate {
    /// `|mean - reference| <= k·std_error`.
    pub fn within(&self, reference: f64, k: f64) -> bool {
        (self.mean - reference).abs() <= k * self.std_error
    }

    /// Distance to `reference` in standard errors (`inf` if the error is zero
    /// and the values differ).
    pub fn z_score(&self, reference: f64) -> f64 {
        let d = (self.mean - reference).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.std_error
        }
    }
}

/// Running means and second moments of several metrics over the same draws.
#[derive(Debug, Clone)]
pub(crate) struct Moments {
    n: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Moments {
    pub fn new(metrics: usize) -> Self {
        Self {
            n: 0,
            mean: vec![0.0; metrics],
            m2: vec![0.0; metrics],
        }
    }

    /// Welford update with one value per metric.
    #[inline]
    pub fn push(&mut self, values: &[f64]) {
        debug_assert_eq!(values.len(), self.mean.len());
        self.n += 1;
        let inv = 1.0 / self.n as f64;
        for ((mean, m2), &x) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(values) {
            let d = x - *mean;
            *mean += d * inv;
            *m2 += d * (x - *mean);
        }
    }

    /// Chan et al. pairwise combination.
    pub fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = other.clone();
            return;
        }
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        for k in 0..self.mean.len() {
            let d = other.mean[k] - self.mean[k];
            self.mean[k] += d * nb / n;
            self.m2[k] += other.m2[k] + d * d * na * nb / n;
        }
        self.n += other.n;
    }

    pub fn estimate(&self, metric: usize, seed: u64) -> McEstimate {
        let n = self.n;
        let std_error = if n > 1 {
            (self.m2[metric].max(0.0) / (n - 1) as f64).sqrt() / (n as f64).sqrt()
        } else {
            0.0
        };
        McEstimate {
            mean: self.mean[metric],
            std_error,
            n,
            seed,
        }
    }
}

pub(crate) fn check_samples(n: u64) -> Result<()> {
    if n < MIN_SAMPLES {
        return Err(Error::config("samples", format!("need at least {MIN_SAMPLES} draws, got {n}")));
    }
    Ok(())
}

/// Runs `body(rng, count, acc)` over every chunk of `n` draws in parallel
/// and merges the per-chunk moments in chunk order.
pub(crate) fn run_chunks<F>(n: u64, seed: u64, metrics: usize, body: F) -> Moments
where
    F: Fn(&mut ChaCha8Rng, u64, &mut Moments) + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c);
            let count = CHUNK.min(n - c * CHUNK);
            let mut acc = Moments::new(metrics);
            body(&mut rng, count, &mut acc);
            acc
        })
        .collect();
    let mut total = Moments::new(metrics);
    for part in &parts {
        total.merge(part);
    }
    total
}

/// Runs `f` on a dedicated pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::config("threads", "must be at least 1")),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::config("threads", e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}
