//! Monte Carlo link simulation.
//!
//! Every activation test is written in SINR form, `signal >= threshold·(1 +
//! interference)`, with the same arithmetic in the two-user engine and in
//! the K-user engine, so that for `K = 2` both produce identical numbers.

use std::f64::consts::LN_2;
use std::fmt;

use rand_chacha::ChaCha8Rng;

use super::{check_samples, run_chunks, McEstimate, Moments};
use crate::channel::{draw_into, slot_threshold, KScenario, Scenario};
use crate::error::{Error, Result};
use crate::full_csit::{decide_two_user, instantaneous_rates, Mode};
use crate::no_csit::{rate_quantum, select_no_csit};
use crate::Strategy;

#[inline]
fn sinr_ok(signal: f64, interference: f64, threshold: f64) -> bool {
    signal >= threshold * (1.0 + interference)
}

fn scale(e: McEstimate, by: f64) -> McEstimate {
    McEstimate {
        mean: e.mean * by,
        std_error: e.std_error * by,
        ..e
    }
}

// ---------------------------------------------------------------------------
// Two users

/// Quantities estimated by [`mc_two_user`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TwoUserMetric {
    PhiNomaWeak,
    PhiNomaStrong,
    PhiOmaWeak,
    PhiOmaStrong,
    PhiNomaSum,
    PhiOmaSum,
    RateNomaWeak,
    RateNomaStrong,
    RateNomaSum,
    RateOmaWeak,
    RateOmaStrong,
    RateOmaSum,
    RateNomaAWeak,
    RateNomaAStrong,
    RateNomaASum,
    ActivityNoma,
    ActivityOma,
    ActivityNomaA,
}

impl TwoUserMetric {
    pub const ALL: [TwoUserMetric; 18] = [
        TwoUserMetric::PhiNomaWeak,
        TwoUserMetric::PhiNomaStrong,
        TwoUserMetric::PhiOmaWeak,
        TwoUserMetric::PhiOmaStrong,
        TwoUserMetric::PhiNomaSum,
        TwoUserMetric::PhiOmaSum,
        TwoUserMetric::RateNomaWeak,
        TwoUserMetric::RateNomaStrong,
        TwoUserMetric::RateNomaSum,
        TwoUserMetric::RateOmaWeak,
        TwoUserMetric::RateOmaStrong,
        TwoUserMetric::RateOmaSum,
        TwoUserMetric::RateNomaAWeak,
        TwoUserMetric::RateNomaAStrong,
        TwoUserMetric::RateNomaASum,
        TwoUserMetric::ActivityNoma,
        TwoUserMetric::ActivityOma,
        TwoUserMetric::ActivityNomaA,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TwoUserMetric::PhiNomaWeak => "phi_noma_weak",
            TwoUserMetric::PhiNomaStrong => "phi_noma_strong",
            TwoUserMetric::PhiOmaWeak => "phi_oma_weak",
            TwoUserMetric::PhiOmaStrong => "phi_oma_strong",
            TwoUserMetric::PhiNomaSum => "phi_noma_sum",
            TwoUserMetric::PhiOmaSum => "phi_oma_sum",
            TwoUserMetric::RateNomaWeak => "rate_noma_weak",
            TwoUserMetric::RateNomaStrong => "rate_noma_strong",
            TwoUserMetric::RateNomaSum => "rate_noma_sum",
            TwoUserMetric::RateOmaWeak => "rate_oma_weak",
            TwoUserMetric::RateOmaStrong => "rate_oma_strong",
            TwoUserMetric::RateOmaSum => "rate_oma_sum",
            TwoUserMetric::RateNomaAWeak => "rate_noma_a_weak",
            TwoUserMetric::RateNomaAStrong => "rate_noma_a_strong",
            TwoUserMetric::RateNomaASum => "rate_noma_a_sum",
            TwoUserMetric::ActivityNoma => "activity_noma",
            TwoUserMetric::ActivityOma => "activity_oma",
            TwoUserMetric::ActivityNomaA => "activity_noma_a",
        }
    }
}

impl fmt::Display for TwoUserMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// All two-user estimates from one pass over the draws.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoUserMc {
    estimates: Vec<McEstimate>,
    quantum: f64,
    adaptive_choice: Strategy,
}

impl TwoUserMc {
    pub fn get(&self, metric: TwoUserMetric) -> McEstimate {
        self.estimates[metric as usize]
    }

    /// Throughput estimates `(weak, strong, sum)` in bits/s/Hz.
    pub fn throughput(&self, strategy: Strategy) -> [McEstimate; 3] {
        use TwoUserMetric::*;
        let pick = match strategy {
            Strategy::NomaA => self.adaptive_choice,
            other => other,
        };
        let ids = match pick {
            Strategy::Oma => [PhiOmaWeak, PhiOmaStrong, PhiOmaSum],
            _ => [PhiNomaWeak, PhiNomaStrong, PhiNomaSum],
        };
        ids.map(|m| scale(self.get(m), self.quantum))
    }

    /// Average-rate estimates `(weak, strong, sum)` in bits/s/Hz.
    pub fn rate(&self, strategy: Strategy) -> [McEstimate; 3] {
        use TwoUserMetric::*;
        let ids = match strategy {
            Strategy::Noma => [RateNomaWeak, RateNomaStrong, RateNomaSum],
            Strategy::Oma => [RateOmaWeak, RateOmaStrong, RateOmaSum],
            Strategy::NomaA => [RateNomaAWeak, RateNomaAStrong, RateNomaASum],
        };
        ids.map(|m| self.get(m))
    }

    /// Frequency of both users being active under full CSI.
    pub fn activity(&self, strategy: Strategy) -> McEstimate {
        self.get(match strategy {
            Strategy::Noma => TwoUserMetric::ActivityNoma,
            Strategy::Oma => TwoUserMetric::ActivityOma,
            Strategy::NomaA => TwoUserMetric::ActivityNomaA,
        })
    }
}

/// Every two-user no-CSI frequency, full-CSI rate and activity frequency,
/// estimated from the same `n` draws.
pub fn mc_two_user(s: &Scenario, n: u64, seed: u64) -> Result<TwoUserMc> {
    check_samples(n)?;
    let (r, g, gt) = (s.rho(), s.gamma(), s.gamma_tilde());
    let r2 = 2.0 * r;
    let powers = s.powers();
    let metrics = TwoUserMetric::ALL.len();
    let body = |rng: &mut ChaCha8Rng, count: u64, acc: &mut Moments| {
        let mut x = [0.0; 2];
        let ind = |b: bool| if b { 1.0 } else { 0.0 };
        for _ in 0..count {
            draw_into(rng, &powers, &mut x);
            let [xa, xb] = x;

            // fixed rate: strong user decoded first, then the weak one
            let nb = sinr_ok(r * xb, r * xa, g);
            let na = nb && sinr_ok(r * xa, 0.0, g);
            let oa = sinr_ok(r2 * xa, 0.0, gt);
            let ob = sinr_ok(r2 * xb, 0.0, gt);

            // on/off: the weak user is decided first since it never sees interference
            let a_on = sinr_ok(r * xa, r * 0.0, g);
            let seen = if a_on { xa } else { 0.0 };
            let b_on = sinr_ok(r * xb, r * seen, g);
            let ra = if a_on { (r * xa / (1.0 + r * 0.0)).ln_1p() / LN_2 } else { 0.0 };
            let rb = if b_on { (r * xb / (1.0 + r * seen)).ln_1p() / LN_2 } else { 0.0 };
            let half = |x: f64| 0.5 * (r2 * x / (1.0 + r2 * 0.0)).ln_1p() / LN_2;
            let roa = if oa { half(xa) } else { 0.0 };
            let rob = if ob { half(xb) } else { 0.0 };

            let mode = decide_two_user(s, xa, xb);
            let (wa, wb) = instantaneous_rates(s, xa, xb, mode);
            let both_adaptive = matches!(mode, Mode::NomaBoth | Mode::OmaBoth);

            acc.push(&[
                ind(na),
                ind(nb),
                ind(oa),
                ind(ob),
                ind(na) + ind(nb),
                ind(oa) + ind(ob),
                ra,
                rb,
                ra + rb,
                roa,
                rob,
                roa + rob,
                wa,
                wb,
                wa + wb,
                ind(a_on && b_on),
                ind(oa && ob),
                ind(both_adaptive),
            ]);
        }
    };
    let m = run_chunks(n, seed, metrics, body);
    Ok(TwoUserMc {
        estimates: (0..metrics).map(|k| m.estimate(k, seed)).collect(),
        quantum: rate_quantum(s),
        adaptive_choice: select_no_csit(s),
    })
}

// ---------------------------------------------------------------------------
// K users

/// Partition of the K users (ranked by instantaneous channel, 0 = weakest)
/// into one NOMA group and a set of OMA users.
///
/// The NOMA group shares `n` slots of the `K`-slot cycle at `K/n` times the
/// nominal power; each OMA user owns one slot at `K` times the power. Every
/// user therefore spends the same energy per cycle as in pure NOMA.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MixedStrategy {
    users: usize,
    noma_set: Vec<usize>,
    oma_set: Vec<usize>,
}

const LETTERS: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZ";

impl MixedStrategy {
    /// `noma_set` may be empty (pure OMA) but not a single user.
    pub fn new(users: usize, mut noma_set: Vec<usize>) -> Result<Self> {
        if !(2..=LETTERS.len()).contains(&users) {
            return Err(Error::config("powers", format!("need 2..=26 users, got {users}")));
        }
        noma_set.sort_unstable();
        noma_set.dedup();
        if noma_set.iter().any(|&i| i >= users) {
            return Err(Error::config("strategies", format!("user index out of range for {users} users")));
        }
        if noma_set.len() == 1 {
            return Err(Error::config("strategies", "a NOMA group needs at least two users"));
        }
        let oma_set = (0..users).filter(|i| !noma_set.contains(i)).collect();
        let m = Self {
            users,
            noma_set,
            oma_set,
        };
        m.check_energy()?;
        Ok(m)
    }

    pub fn pure_noma(users: usize) -> Result<Self> {
        Self::new(users, (0..users).collect())
    }

    pub fn pure_oma(users: usize) -> Result<Self> {
        Self::new(users, Vec::new())
    }

    /// Every distinct partition, ordered by the number of OMA slots (pure
    /// NOMA first, pure OMA last), then lexicographically by NOMA group.
    pub fn enumerate(users: usize) -> Result<Vec<Self>> {
        let mut groups: Vec<Vec<usize>> = (0u64..1 << users)
            .map(|mask| (0..users).filter(|i| mask >> i & 1 == 1).collect::<Vec<_>>())
            .filter(|g| g.len() != 1)
            .collect();
        groups.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        groups.into_iter().map(|g| Self::new(users, g)).collect()
    }

    pub fn users(&self) -> usize {
        self.users
    }
    pub fn noma_set(&self) -> &[usize] {
        &self.noma_set
    }
    pub fn oma_set(&self) -> &[usize] {
        &self.oma_set
    }
    pub fn is_pure_noma(&self) -> bool {
        self.oma_set.is_empty()
    }
    pub fn is_pure_oma(&self) -> bool {
        self.noma_set.is_empty()
    }
    pub fn oma_slots(&self) -> usize {
        self.oma_set.len()
    }

    /// Users transmitting in each slot of the cycle.
    pub fn slot_pattern(&self) -> Vec<Vec<usize>> {
        let mut slots = vec![self.noma_set.clone(); self.noma_set.len()];
        slots.extend(self.oma_set.iter().map(|&u| vec![u]));
        slots
    }

    /// Slots per cycle in which `user` transmits.
    pub fn slots_of(&self, user: usize) -> usize {
        if self.noma_set.contains(&user) {
            self.noma_set.len()
        } else {
            1
        }
    }

    /// Transmit power of `user` relative to its nominal power.
    pub fn power_scale(&self, user: usize) -> f64 {
        self.users as f64 / self.slots_of(user) as f64
    }

    /// Energy per cycle relative to the nominal power; `K` for every user.
    pub fn energy_per_cycle(&self, user: usize) -> f64 {
        self.power_scale(user) * self.slots_of(user) as f64
    }

    fn check_energy(&self) -> Result<()> {
        let pattern = self.slot_pattern();
        if pattern.len() != self.users {
            return Err(Error::config("strategies", "slot pattern does not fill the cycle"));
        }
        let budget = self.users as f64;
        for u in 0..self.users {
            let e = self.energy_per_cycle(u);
            if (e - budget).abs() > 1e-12 * budget {
                return Err(Error::config("strategies", format!("user {u} spends {e}, budget {budget}")));
            }
        }
        Ok(())
    }

    /// `noma`, `oma`, or `mixed-` followed by the NOMA users, strongest first
    /// (user `A` is the weakest), e.g. `mixed-C-A`.
    pub fn label(&self) -> String {
        if self.is_pure_noma() {
            "noma".into()
        } else if self.is_pure_oma() {
            "oma".into()
        } else {
            let names: Vec<String> = self.noma_set.iter().rev().map(|&i| (LETTERS[i] as char).to_string()).collect();
            format!("mixed-{}", names.join("-"))
        }
    }

    /// Inverse of [`label`](Self::label).
    pub fn parse(users: usize, label: &str) -> Result<Self> {
        let label = label.trim().to_ascii_lowercase();
        match label.as_str() {
            "noma" => Self::pure_noma(users),
            "oma" => Self::pure_oma(users),
            _ => {
                let rest = label
                    .strip_prefix("mixed-")
                    .ok_or_else(|| Error::config("strategies", format!("unknown strategy '{label}'")))?;
                let mut set = Vec::new();
                for part in rest.split('-') {
                    let c = part.to_ascii_uppercase();
                    let idx = match c.as_bytes() {
                        [b] => LETTERS.iter().position(|l| l == b),
                        _ => None,
                    };
                    match idx {
                        Some(i) => set.push(i),
                        None => return Err(Error::config("strategies", format!("bad user '{part}' in '{label}'"))),
                    }
                }
                Self::new(users, set)
            }
        }
    }
}

impl fmt::Display for MixedStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// A fixed partition or the adaptive choice among all of them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum KStrategy {
    Fixed(MixedStrategy),
    Adaptive,
}

impl KStrategy {
    pub fn from_strategy(strategy: Strategy, users: usize) -> Result<Self> {
        Ok(match strategy {
            Strategy::Noma => KStrategy::Fixed(MixedStrategy::pure_noma(users)?),
            Strategy::Oma => KStrategy::Fixed(MixedStrategy::pure_oma(users)?),
            Strategy::NomaA => KStrategy::Adaptive,
        })
    }

    pub fn parse(users: usize, label: &str) -> Result<Self> {
        match label.trim().to_ascii_lowercase().as_str() {
            "noma-a" | "noma_a" | "nomaa" => Ok(KStrategy::Adaptive),
            other => MixedStrategy::parse(users, other).map(KStrategy::Fixed),
        }
    }

    pub fn label(&self) -> String {
        match self {
            KStrategy::Fixed(m) => m.label(),
            KStrategy::Adaptive => Strategy::NomaA.name().into(),
        }
    }
}

/// Per-user (weakest first) and sum estimates for one strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct KMcReport {
    pub label: String,
    pub per_user: Vec<McEstimate>,
    pub sum: McEstimate,
    /// Frequency of every user being active (full CSI only).
    pub all_active: Option<McEstimate>,
    /// Partition picked by the adaptive no-CSI selection.
    pub chosen: Option<String>,
}

/// Everything [`mc_k_users`] estimates from one pass.
#[derive(Debug, Clone, PartialEq)]
pub struct KMcRun {
    /// Fixed-rate throughput per partition, in [`MixedStrategy::enumerate`] order.
    pub no_csit: Vec<KMcReport>,
    /// On/off average rates per partition, same order.
    pub full_csit: Vec<KMcReport>,
    pub adaptive_no_csit: KMcReport,
    pub adaptive_full_csit: KMcReport,
}

impl KMcRun {
    fn find<'a>(list: &'a [KMcReport], adaptive: &'a KMcReport, strategy: &KStrategy) -> Option<&'a KMcReport> {
        match strategy {
            KStrategy::Adaptive => Some(adaptive),
            KStrategy::Fixed(m) => {
                let label = m.label();
                list.iter().find(|r| r.label == label)
            }
        }
    }

    pub fn throughput(&self, strategy: &KStrategy) -> Option<&KMcReport> {
        Self::find(&self.no_csit, &self.adaptive_no_csit, strategy)
    }

    pub fn rate(&self, strategy: &KStrategy) -> Option<&KMcReport> {
        Self::find(&self.full_csit, &self.adaptive_full_csit, strategy)
    }
}

/// Precomputed powers and thresholds of one partition.
struct Plan {
    noma: Vec<usize>,
    oma: Vec<usize>,
    noma_power: f64,
    noma_threshold: f64,
    noma_share: f64,
    oma_power: f64,
    oma_threshold: f64,
    oma_share: f64,
}

impl Plan {
    fn new(s: &KScenario, m: &MixedStrategy) -> Self {
        let k = s.users();
        let n = m.noma_set().len().max(1);
        Self {
            noma: m.noma_set().to_vec(),
            oma: m.oma_set().to_vec(),
            noma_power: (k as f64 / n as f64) * s.rho(),
            noma_threshold: slot_threshold(s.gamma(), k, n),
            noma_share: n as f64 / k as f64,
            oma_power: (k as f64 / 1.0) * s.rho(),
            oma_threshold: slot_threshold(s.gamma(), k, 1),
            oma_share: 1.0 / k as f64,
        }
    }

    /// Fixed-rate decoding. The NOMA group is decoded strongest first with
    /// the weaker group members as interference; a failure stops the chain.
    fn no_csit(&self, x: &[f64], ok: &mut [bool], below: &mut [f64]) {
        let p = self.noma_power;
        let mut acc = 0.0;
        for (k, &u) in self.noma.iter().enumerate() {
            below[k] = acc;
            acc += x[u];
        }
        let mut chain = true;
        for (k, &u) in self.noma.iter().enumerate().rev() {
            chain = chain && sinr_ok(p * x[u], p * below[k], self.noma_threshold);
            ok[u] = chain;
        }
        for &u in &self.oma {
            ok[u] = sinr_ok(self.oma_power * x[u], 0.0, self.oma_threshold);
        }
    }

    /// On/off activation. Group members are admitted weakest first; each
    /// sees the already-admitted weaker members as interference.
    fn full_csit(&self, x: &[f64], rate: &mut [f64], on: &mut [bool]) {
        let p = self.noma_power;
        let mut seen = 0.0;
        for &u in &self.noma {
            let active = sinr_ok(p * x[u], p * seen, self.noma_threshold);
            on[u] = active;
            rate[u] = if active {
                let r = self.noma_share * (p * x[u] / (1.0 + p * seen)).ln_1p() / LN_2;
                seen += x[u];
                r
            } else {
                0.0
            };
        }
        let q = self.oma_power;
        for &u in &self.oma {
            let active = sinr_ok(q * x[u], q * 0.0, self.oma_threshold);
            on[u] = active;
            rate[u] = if active {
                self.oma_share * (q * x[u] / (1.0 + q * 0.0)).ln_1p() / LN_2
            } else {
                0.0
            };
        }
    }
}

/// Runs every partition plus the adaptive selections on the same `n` draws.
///
/// With full CSI the adaptive choice is made per draw. Two users follow the
/// two-user decision rule; with more users the partition activating the most
/// users wins, ties going to the larger sum rate and then to fewer OMA slots. Without CSI it is made once:
/// the closed-form selector for two users, otherwise the partition with the
/// largest estimated sum throughput.
pub fn mc_k_users(s: &KScenario, n: u64, seed: u64) -> Result<KMcRun> {
    check_samples(n)?;
    let k = s.users();
    let partitions = MixedStrategy::enumerate(k)?;
    let plans: Vec<Plan> = partitions.iter().map(|m| Plan::new(s, m)).collect();
    let two = s.two_user();
    let per_plan = 2 * k + 3;
    let metrics = plans.len() * per_plan + k + 2;

    let body = |rng: &mut ChaCha8Rng, count: u64, acc: &mut Moments| {
        let mut x = vec![0.0; k];
        let mut ok = vec![false; k];
        let mut below = vec![0.0; k];
        let mut rate = vec![0.0; k];
        let mut on = vec![false; k];
        let mut best_rate = vec![0.0; k];
        let mut v = vec![0.0; metrics];
        for _ in 0..count {
            draw_into(rng, s.powers(), &mut x);
            let mut best: Option<(usize, f64)> = None;
            for (p, plan) in plans.iter().enumerate() {
                let base = p * per_plan;
                plan.no_csit(&x, &mut ok, &mut below);
                let mut successes = 0.0;
                for u in 0..k {
                    let hit = if ok[u] { 1.0 } else { 0.0 };
                    v[base + u] = hit;
                    successes += hit;
                }
                v[base + k] = successes;

                plan.full_csit(&x, &mut rate, &mut on);
                let f = base + k + 1;
                let mut total = 0.0;
                let mut active = 0;
                for u in 0..k {
                    v[f + u] = rate[u];
                    total += rate[u];
                    active += on[u] as usize;
                }
                v[f + k] = total;
                v[f + k + 1] = if active == k { 1.0 } else { 0.0 };
                let better = match best {
                    None => true,
                    Some((a, t)) => active > a || (active == a && total > t),
                };
                if two.is_none() && better {
                    best = Some((active, total));
                    best_rate.copy_from_slice(&rate);
                }
            }
            let a = plans.len() * per_plan;
            let all = match &two {
                Some(sc) => {
                    let mode = decide_two_user(sc, x[0], x[1]);
                    let (wa, wb) = instantaneous_rates(sc, x[0], x[1], mode);
                    best_rate[0] = wa;
                    best_rate[1] = wb;
                    matches!(mode, Mode::NomaBoth | Mode::OmaBoth)
                }
                None => best.map(|(active, _)| active == k).unwrap_or(false),
            };
            let mut total = 0.0;
            for u in 0..k {
                v[a + u] = best_rate[u];
                total += best_rate[u];
            }
            v[a + k] = total;
            v[a + k + 1] = if all { 1.0 } else { 0.0 };
            acc.push(&v);
        }
    };
    let m = run_chunks(n, seed, metrics, body);
    let est = |i: usize| m.estimate(i, seed);
    let q = s.gamma().ln_1p() / LN_2;

    let mut no_csit = Vec::with_capacity(plans.len());
    let mut full_csit = Vec::with_capacity(plans.len());
    for (p, part) in partitions.iter().enumerate() {
        let base = p * per_plan;
        no_csit.push(KMcReport {
            label: part.label(),
            per_user: (0..k).map(|u| scale(est(base + u), q)).collect(),
            sum: scale(est(base + k), q),
            all_active: None,
            chosen: None,
        });
        let f = base + k + 1;
        full_csit.push(KMcReport {
            label: part.label(),
            per_user: (0..k).map(|u| est(f + u)).collect(),
            sum: est(f + k),
            all_active: Some(est(f + k + 1)),
            chosen: None,
        });
    }

    let pick = match &two {
        Some(sc) => {
            let label = match select_no_csit(sc) {
                Strategy::Oma => "oma",
                _ => "noma",
            };
            no_csit.iter().position(|r| r.label == label).expect("pure partitions are enumerated")
        }
        None => {
            let mut best = 0;
            for (i, r) in no_csit.iter().enumerate() {
                if r.sum.mean > no_csit[best].sum.mean {
                    best = i;
                }
            }
            best
        }
    };
    let adaptive_no_csit = KMcReport {
        label: Strategy::NomaA.name().into(),
        chosen: Some(no_csit[pick].label.clone()),
        ..no_csit[pick].clone()
    };
    let a = plans.len() * per_plan;
    let adaptive_full_csit = KMcReport {
        label: Strategy::NomaA.name().into(),
        per_user: (0..k).map(|u| est(a + u)).collect(),
        sum: est(a + k),
        all_active: Some(est(a + k + 1)),
        chosen: None,
    };
    Ok(KMcRun {
        no_csit,
        full_csit,
        adaptive_no_csit,
        adaptive_full_csit,
    })
}

fn pick(run: KMcRun, strategy: &KStrategy, no_csit: bool) -> Result<KMcReport> {
    let found = if no_csit {
        run.throughput(strategy)
    } else {
        run.rate(strategy)
    };
    found
        .cloned()
        .ok_or_else(|| Error::config("strategies", format!("strategy '{}' not available", strategy.label())))
}

/// Fixed-rate throughput of one strategy, per user and sum.
pub fn mc_throughput(s: &KScenario, strategy: &KStrategy, n: u64, seed: u64) -> Result<KMcReport> {
    if let KStrategy::Fixed(m) = strategy {
        if m.users() != s.users() {
            return Err(Error::config("strategies", "partition size does not match the user count"));
        }
    }
    pick(mc_k_users(s, n, seed)?, strategy, true)
}

/// On/off average rates of one strategy with the all-active frequency.
pub fn mc_rate_full_csit(s: &KScenario, strategy: &KStrategy, n: u64, seed: u64) -> Result<KMcReport> {
    if let KStrategy::Fixed(m) = strategy {
        if m.users() != s.users() {
            return Err(Error::config("strategies", "partition size does not match the user count"));
        }
    }
    pick(mc_k_users(s, n, seed)?, strategy, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_for_three_users() {
        let all = MixedStrategy::enumerate(3).unwrap();
        let labels: Vec<String> = all.iter().map(|m| m.label()).collect();
        assert_eq!(labels, ["noma", "mixed-B-A", "mixed-C-A", "mixed-C-B", "oma"]);
        let m = MixedStrategy::parse(3, "mixed-C-A").unwrap();
        assert_eq!(m.noma_set(), &[0, 2]);
        assert_eq!(m.oma_set(), &[1]);
        assert_eq!(m.power_scale(0), 1.5);
        assert_eq!(m.power_scale(1), 3.0);
        assert_eq!(m.slot_pattern(), vec![vec![0, 2], vec![0, 2], vec![1]]);
        for u in 0..3 {
            assert_eq!(m.energy_per_cycle(u), 3.0);
        }
    }

    #[test]
    fn invalid_partitions() {
        assert!(MixedStrategy::new(3, vec![1]).is_err());
        assert!(MixedStrategy::new(3, vec![0, 3]).is_err());
        assert!(MixedStrategy::new(1, vec![]).is_err());
        assert!(MixedStrategy::parse(3, "mixed-C-Z").is_err());
        assert!(MixedStrategy::parse(3, "hybrid").is_err());
        assert_eq!(KStrategy::parse(3, "NOMA-A").unwrap(), KStrategy::Adaptive);
    }

    #[test]
    fn small_sample_rejected() {
        let s = Scenario::from_db(0.1, 0.9, 10.0, 20.0).unwrap();
        assert!(mc_two_user(&s, 10, 1).is_err());
    }

    #[test]
    fn two_user_path_equals_k_path() {
        let s = Scenario::from_db(0.1, 0.9, 10.0, 15.0).unwrap();
        let ks = KScenario::from(&s);
        let two = mc_two_user(&s, 100_000, 5).unwrap();
        let run = mc_k_users(&ks, 100_000, 5).unwrap();
        for strategy in Strategy::ALL {
            let k = KStrategy::from_strategy(strategy, 2).unwrap();
            let t = run.throughput(&k).unwrap();
            let [w, b, sum] = two.throughput(strategy);
            assert_eq!((t.per_user[0], t.per_user[1], t.sum), (w, b, sum), "{strategy}");
            let r = run.rate(&k).unwrap();
            let [w, b, sum] = two.rate(strategy);
            assert_eq!((r.per_user[0], r.per_user[1], r.sum), (w, b, sum), "{strategy}");
            assert_eq!(r.all_active.unwrap(), two.activity(strategy), "{strategy}");
        }
    }
}
