//! Command-line driver: parameter sweeps to CSV, the verification suite,
//! the `ρ_min` map and single-realisation decisions.
//!
//! Every sweep setting can come from a flag, a `NOMA_`-prefixed environment
//! variable, a `key=value` config file (keys are the flag names), or the
//! built-in default, in that order of precedence.
//!
//! # CSV layout
//!
//! The header is [`HEADER`]. Lists (powers, per-user values, per-user
//! standard errors) are `;`-separated inside one field. Numbers use Rust's
//! shortest round-trip scientific form, so parsing a row back gives the
//! in-memory values exactly; `inf` marks a missing crossover. Empty fields
//! mean "not applicable" (standard errors of closed forms, sample counts of
//! deterministic engines).
//!
//! | metric       | `values`              | `sum`                          |
//! |--------------|-----------------------|--------------------------------|
//! | `throughput` | per user, weakest first | sum throughput               |
//! | `rate`       | per user, weakest first | sum average rate             |
//! | `activity`   | empty                 | probability every user is active |
//! | `rho_min`    | weak, strong (dB)     | sum target (dB)                |
//! | `asymptote`  | per-user high-SNR line at this `ρ` | sum line          |

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::{self, Write as _};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::channel::{db_to_linear, linear_to_db, ChannelDraw, KScenario, Scenario};
use crate::error::{Error, Result};
use crate::full_csit::{self as fc, asymptotics, decide_noma_a, instantaneous_rates};
use crate::no_csit::{rate_quantum, rho_min, select_no_csit, throughput};
use crate::oracle::{self, integral, mc_k_users, mc_two_user, with_threads, KStrategy, McEstimate, MixedStrategy};
use crate::verify::{self, Level, VerifyOptions};
use crate::{Strategy, UserTarget};

/// Fixed CSV header of `sweep`.
pub const HEADER: &str =
    "powers,gamma,gamma_db,rho,rho_db,strategy,metric,engine,values,sum,std_errors,sum_std_error,samples,seed";

/// Fixed CSV header of `rho-min-map`.
pub const RHO_MIN_HEADER: &str = "p1,p2,gamma,gamma_db,target,rho_min,rho_min_db";

/// Strategy label of `rho_min` rows, which compare OMA against NOMA.
pub const CROSSOVER_LABEL: &str = "oma-vs-noma";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Throughput,
    Rate,
    Activity,
    RhoMin,
    Asymptote,
}

impl Metric {
    pub const ALL: [Metric; 5] = [Metric::Throughput, Metric::Rate, Metric::Activity, Metric::RhoMin, Metric::Asymptote];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Throughput => "throughput",
            Metric::Rate => "rate",
            Metric::Activity => "activity",
            Metric::RhoMin => "rho_min",
            Metric::Asymptote => "asymptote",
        }
    }
}

impl FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .ok_or_else(|| Error::config("metrics", format!("unknown metric '{}'", s.trim())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Engine {
    ClosedForm,
    MonteCarlo,
    Quadrature,
}

impl Engine {
    pub const ALL: [Engine; 3] = [Engine::ClosedForm, Engine::MonteCarlo, Engine::Quadrature];

    pub fn name(self) -> &'static str {
        match self {
            Engine::ClosedForm => "closed_form",
            Engine::MonteCarlo => "monte_carlo",
            Engine::Quadrature => "quadrature",
        }
    }
}

impl FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Engine::ALL
            .into_iter()
            .find(|e| e.name() == key)
            .ok_or_else(|| Error::config("engines", format!("unknown engine '{}'", s.trim())))
    }
}

/// A fully resolved sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Weak-user power grid (two-user sweeps).
    pub p1: Vec<f64>,
    /// `None` means `P2 = 1 - P1`.
    pub p2: Option<f64>,
    /// Explicit ascending powers; three or more switch to the K-user simulator.
    pub powers: Option<Vec<f64>>,
    pub gamma_db: Vec<f64>,
    pub rho_db_start: f64,
    pub rho_db_stop: f64,
    pub rho_db_step: f64,
    /// Raw labels; `all` expands to every strategy of the sweep's user count.
    pub strategies: Vec<String>,
    pub metrics: Vec<Metric>,
    pub engines: Vec<Engine>,
    pub samples: u64,
    pub seed: u64,
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
}

/// Keys accepted in config files, equal to the long flag names.
pub const SWEEP_KEYS: [&str; 14] = [
    "p1",
    "p2",
    "powers",
    "gamma-db",
    "rho-db-start",
    "rho-db-stop",
    "rho-db-step",
    "strategies",
    "metrics",
    "engines",
    "samples",
    "seed",
    "threads",
    "output",
];

const SWEEP_DEFAULTS: [(&str, &str); 11] = [
    ("p1", "0.1"),
    ("p2", "complement"),
    ("gamma-db", "10"),
    ("rho-db-start", "0"),
    ("rho-db-stop", "40"),
    ("rho-db-step", "1"),
    ("strategies", "oma,noma,noma-a"),
    ("metrics", "throughput,rate,activity"),
    ("engines", "closed_form"),
    ("samples", "1000000"),
    ("seed", "1"),
];

/// Parses a flat `key=value` config file. Blank lines and `#` comments are
/// ignored; unknown or repeated keys are errors.
pub fn parse_config(text: &str, allowed: &[&str]) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::config("config", format!("line {}: expected key=value", n + 1)))?;
        let key = key.trim().trim_start_matches("--").to_string();
        if !allowed.contains(&key.as_str()) {
            return Err(Error::config(key, format!("unknown key on config line {}", n + 1)));
        }
        if out.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(Error::config(key, "given twice in the config file"));
        }
    }
    Ok(out)
}

fn parse_f64(field: &str, text: &str) -> Result<f64> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| Error::config(field, format!("'{}' is not a number", text.trim())))?;
    if v.is_nan() {
        return Err(Error::config(field, "NaN is not allowed"));
    }
    Ok(v)
}

fn parse_u64(field: &str, text: &str) -> Result<u64> {
    let t = text.trim().replace('_', "");
    if let Ok(v) = t.parse::<u64>() {
        return Ok(v);
    }
    // accept 1e7 style counts
    match t.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 => Ok(v as u64),
        _ => Err(Error::config(field, format!("'{}' is not a non-negative integer", text.trim()))),
    }
}

/// Inclusive arithmetic grid, computed as `start + k·step` so no error accumulates.
pub fn arithmetic_grid(field: &str, start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::config(field, format!("step must be > 0, got {step}")));
    }
    if !(start <= stop) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::config(field, format!("need start <= stop, got {start} and {stop}")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if count > 10_000_000 {
        return Err(Error::config(field, "grid has more than 1e7 points"));
    }
    Ok((0..count).map(|k| start + k as f64 * step).collect())
}

/// `a,b,c` or `start:stop:step`.
pub fn parse_grid(field: &str, text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    let parts: Vec<&str> = text.split(':').collect();
    let values = match parts[..] {
        [one] if !one.contains(',') => vec![parse_f64(field, one)?],
        [_] => text.split(',').map(|t| parse_f64(field, t)).collect::<Result<_>>()?,
        [a, b, c] => arithmetic_grid(field, parse_f64(field, a)?, parse_f64(field, b)?, parse_f64(field, c)?)?,
        _ => return Err(Error::config(field, format!("expected a list or start:stop:step, got '{text}'"))),
    };
    if values.is_empty() {
        return Err(Error::config(field, "empty grid"));
    }
    Ok(values)
}

fn parse_list<T: FromStr<Err = Error>>(field: &str, text: &str) -> Result<Vec<T>> {
    let mut out: Vec<T> = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        out.push(part.parse()?);
    }
    if out.is_empty() {
        return Err(Error::config(field, "at least one entry is required"));
    }
    Ok(out)
}

impl SweepSpec {
    /// Builds a spec from resolved settings; absent keys take the defaults.
    pub fn from_settings(settings: &BTreeMap<String, String>) -> Result<Self> {
        if let Some(k) = settings.keys().find(|k| !SWEEP_KEYS.contains(&k.as_str())) {
            return Err(Error::config(k.clone(), "unknown setting"));
        }
        let get = |key: &str| -> Option<&str> {
            settings
                .get(key)
                .map(String::as_str)
                .or_else(|| SWEEP_DEFAULTS.iter().find(|(k, _)| *k == key).map(|(_, v)| *v))
        };
        let required = |key: &str| get(key).expect("every required key has a default");

        let p2 = match required("p2").trim() {
            t if t.eq_ignore_ascii_case("complement") => None,
            t => Some(parse_f64("p2", t)?),
        };
        let powers = match get("powers").map(str::trim).filter(|t| !t.is_empty()) {
            None => None,
            Some(t) => Some(t.split(',').map(|v| parse_f64("powers", v)).collect::<Result<Vec<_>>>()?),
        };
        let strategies: Vec<String> = required("strategies")
            .split(',')
            .map(|s| s.trim().to_ascii_lowercase())
            .filter(|s| !s.is_empty())
            .collect();
        let threads = match get("threads") {
            None => None,
            Some(t) => Some(parse_u64("threads", t)? as usize),
        };
        let spec = SweepSpec {
            p1: parse_grid("p1", required("p1"))?,
            p2,
            powers,
            gamma_db: parse_grid("gamma-db", required("gamma-db"))?,
            rho_db_start: parse_f64("rho-db-start", required("rho-db-start"))?,
            rho_db_stop: parse_f64("rho-db-stop", required("rho-db-stop"))?,
            rho_db_step: parse_f64("rho-db-step", required("rho-db-step"))?,
            strategies,
            metrics: parse_list("metrics", required("metrics"))?,
            engines: parse_list("engines", required("engines"))?,
            samples: parse_u64("samples", required("samples"))?,
            seed: parse_u64("seed", required("seed"))?,
            threads,
            output: get("output").filter(|t| !t.trim().is_empty()).map(PathBuf::from),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks every invariant, naming the offending field.
    pub fn validate(&self) -> Result<()> {
        if self.strategies.is_empty() {
            return Err(Error::config("strategies", "at least one strategy is required"));
        }
        if self.metrics.is_empty() {
            return Err(Error::config("metrics", "at least one metric is required"));
        }
        if self.engines.is_empty() {
            return Err(Error::config("engines", "at least one engine is required"));
        }
        if !(self.rho_db_start < self.rho_db_stop) {
            return Err(Error::config("rho-db-stop", "rho-db-start must be below rho-db-stop"));
        }
        self.rho_grid()?;
        if self.engines.contains(&Engine::MonteCarlo) {
            oracle::check_samples(self.samples)?;
        }
        if self.threads == Some(0) {
            return Err(Error::config("threads", "must be at least 1"));
        }
        if let Some(g) = self.gamma_db.iter().find(|g| !(**g >= 0.0 && g.is_finite())) {
            return Err(Error::config("gamma-db", format!("thresholds must be >= 0 dB, got {g}")));
        }
        match &self.powers {
            Some(p) if p.len() >= 3 => {
                KScenario::new(p.clone(), 1.0, 1.0).map_err(|e| Error::config("powers", e.to_string()))?;
                if let Some(e) = self.engines.iter().find(|e| **e != Engine::MonteCarlo) {
                    return Err(Error::config(
                        "engines",
                        format!("{} is not available with three or more users; use monte_carlo", e.name()),
                    ));
                }
                if let Some(m) = self.metrics.iter().find(|m| matches!(m, Metric::RhoMin | Metric::Asymptote)) {
                    return Err(Error::config("metrics", format!("{} is a two-user metric", m.name())));
                }
                self.k_strategies(p.len())?;
            }
            Some(p) if p.len() == 2 => {
                Scenario::new(p[0], p[1], 1.0, 1.0).map_err(|e| Error::config("powers", e.to_string()))?;
                self.two_user_strategies()?;
            }
            Some(_) => return Err(Error::config("powers", "need at least two users")),
            None => {
                for &p1 in &self.p1 {
                    if !(p1 > 0.0 && p1.is_finite()) {
                        return Err(Error::config("p1", format!("must be > 0, got {p1}")));
                    }
                    let p2 = self.p2.unwrap_or(1.0 - p1);
                    if !(p2 >= p1 && p2.is_finite()) {
                        return Err(Error::config("p2", format!("must be >= p1, got p1={p1}, p2={p2}")));
                    }
                }
                self.two_user_strategies()?;
            }
        }
        Ok(())
    }

    pub fn rho_grid(&self) -> Result<Vec<f64>> {
        arithmetic_grid("rho-db-step", self.rho_db_start, self.rho_db_stop, self.rho_db_step)
    }

    fn two_user_strategies(&self) -> Result<Vec<Strategy>> {
        let mut out = Vec::new();
        for s in &self.strategies {
            if s == "all" {
                out.extend(Strategy::ALL);
            } else {
                out.push(s.parse()?);
            }
        }
        Ok(out)
    }

    fn k_strategies(&self, users: usize) -> Result<Vec<KStrategy>> {
        let mut out = Vec::new();
        for s in &self.strategies {
            if s == "all" {
                out.extend(MixedStrategy::enumerate(users)?.into_iter().map(KStrategy::Fixed));
                out.push(KStrategy::Adaptive);
            } else {
                out.push(KStrategy::parse(users, s)?);
            }
        }
        Ok(out)
    }

    /// Two-user power pairs of the sweep, in grid order.
    fn power_pairs(&self) -> Vec<(f64, f64)> {
        match &self.powers {
            Some(p) => vec![(p[0], p[1])],
            None => self.p1.iter().map(|&p1| (p1, self.p2.unwrap_or(1.0 - p1))).collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Rows

/// One CSV row of `sweep`.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub powers: Vec<f64>,
    pub gamma: f64,
    pub gamma_db: f64,
    pub rho: f64,
    pub rho_db: f64,
    pub strategy: String,
    pub metric: Metric,
    pub engine: Engine,
    pub values: Vec<f64>,
    pub sum: f64,
    pub std_errors: Vec<f64>,
    pub sum_std_error: Option<f64>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(";")
}

fn split(field: &str, text: &str) -> Result<Vec<f64>> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(';').map(|t| parse_f64(field, t)).collect()
}

impl fmt::Display for CsvRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt_f = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        let opt_u = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        write!(
            f,
            "{},{:e},{:e},{:e},{:e},{},{},{},{},{:e},{},{},{},{}",
            join(&self.powers),
            self.gamma,
            self.gamma_db,
            self.rho,
            self.rho_db,
            self.strategy,
            self.metric.name(),
            self.engine.name(),
            join(&self.values),
            self.sum,
            join(&self.std_errors),
            opt_f(self.sum_std_error),
            opt_u(self.samples),
            opt_u(self.seed),
        )
    }
}

impl FromStr for CsvRow {
    type Err = Error;

    /// Parses one data line written by [`Display`](fmt::Display).
    fn from_str(line: &str) -> Result<Self> {
        let f: Vec<&str> = line.trim_end_matches(['\r', '\n']).split(',').collect();
        if f.len() != 14 {
            return Err(Error::config("csv", format!("expected 14 fields, got {}", f.len())));
        }
        let opt_f = |name: &str, t: &str| if t.is_empty() { Ok(None) } else { parse_f64(name, t).map(Some) };
        let opt_u = |name: &str, t: &str| if t.is_empty() { Ok(None) } else { parse_u64(name, t).map(Some) };
        Ok(CsvRow {
            powers: split("powers", f[0])?,
            gamma: parse_f64("gamma", f[1])?,
            gamma_db: parse_f64("gamma_db", f[2])?,
            rho: parse_f64("rho", f[3])?,
            rho_db: parse_f64("rho_db", f[4])?,
            strategy: f[5].to_string(),
            metric: f[6].parse()?,
            engine: f[7].parse()?,
            values: split("values", f[8])?,
            sum: parse_f64("sum", f[9])?,
            std_errors: split("std_errors", f[10])?,
            sum_std_error: opt_f("sum_std_error", f[11])?,
            samples: opt_u("samples", f[12])?,
            seed: opt_u("seed", f[13])?,
        })
    }
}

/// Renders rows under [`HEADER`], LF line endings.
pub fn to_csv(rows: &[CsvRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for r in rows {
        writeln!(out, "{r}").expect("writing to a String cannot fail");
    }
    out
}

/// Inverse of [`to_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == HEADER => {}
        _ => return Err(Error::config("csv", "missing or unexpected header")),
    }
    lines.filter(|l| !l.is_empty()).map(str::parse).collect()
}

/// Grid point of a sweep.
struct Point {
    powers: Vec<f64>,
    gamma_db: f64,
    rho_db: f64,
    /// Monte Carlo seed of this point: the sweep seed plus the point index.
    seed: u64,
}

struct RowBuilder<'a> {
    point: &'a Point,
    gamma: f64,
    rho: f64,
}

impl RowBuilder<'_> {
    fn exact(&self, strategy: &str, metric: Metric, engine: Engine, values: Vec<f64>, sum: f64) -> CsvRow {
        CsvRow {
            powers: self.point.powers.clone(),
            gamma: self.gamma,
            gamma_db: self.point.gamma_db,
            rho: self.rho,
            rho_db: self.point.rho_db,
            strategy: strategy.to_string(),
            metric,
            engine,
            values,
            sum,
            std_errors: Vec::new(),
            sum_std_error: None,
            samples: None,
            seed: None,
        }
    }

    fn estimated(&self, strategy: &str, metric: Metric, users: &[McEstimate], sum: McEstimate) -> CsvRow {
        CsvRow {
            std_errors: users.iter().map(|e| e.std_error).collect(),
            sum_std_error: Some(sum.std_error),
            samples: Some(sum.n),
            seed: Some(sum.seed),
            ..self.exact(strategy, metric, Engine::MonteCarlo, users.iter().map(|e| e.mean).collect(), sum.mean)
        }
    }
}

fn rho_min_db(s: &Scenario, target: UserTarget) -> f64 {
    match rho_min(s, target) {
        Ok(v) => linear_to_db(v),
        Err(_) => f64::INFINITY,
    }
}

fn quadrature_pair(s: &Scenario, weak: &str, strong: &str, scale: f64) -> Result<(f64, f64)> {
    Ok((scale * integral(s, weak)?, scale * integral(s, strong)?))
}

fn two_user_rows(spec: &SweepSpec, strategies: &[Strategy], point: &Point) -> Result<Vec<CsvRow>> {
    let s = Scenario::from_db(point.powers[0], point.powers[1], point.gamma_db, point.rho_db)?;
    let b = RowBuilder {
        point,
        gamma: s.gamma(),
        rho: s.rho(),
    };
    let wants_mc = spec.engines.contains(&Engine::MonteCarlo)
        && spec.metrics.iter().any(|m| matches!(m, Metric::Throughput | Metric::Rate | Metric::Activity));
    let mc = if wants_mc {
        Some(mc_two_user(&s, spec.samples, point.seed)?)
    } else {
        None
    };
    let mut rows = Vec::new();
    for &metric in &spec.metrics {
        if metric == Metric::RhoMin {
            if spec.engines.contains(&Engine::ClosedForm) {
                let v = [UserTarget::Weak, UserTarget::Strong, UserTarget::Sum].map(|t| rho_min_db(&s, t));
                rows.push(b.exact(CROSSOVER_LABEL, metric, Engine::ClosedForm, vec![v[0], v[1]], v[2]));
            }
            continue;
        }
        for &strategy in strategies {
            let name = strategy.name();
            for &engine in &spec.engines {
                let row = match (metric, engine) {
                    (Metric::Throughput, Engine::ClosedForm) => {
                        let t = throughput(&s, strategy);
                        b.exact(name, metric, engine, vec![t.t_weak, t.t_strong], t.t_sum)
                    }
                    (Metric::Rate, Engine::ClosedForm) => {
                        let r = fc::rates(&s, strategy);
                        b.exact(name, metric, engine, vec![r.r_weak, r.r_strong], r.r_sum)
                    }
                    (Metric::Activity, Engine::ClosedForm) => {
                        b.exact(name, metric, engine, Vec::new(), fc::activity_probability(&s, strategy))
                    }
                    (Metric::Asymptote, Engine::ClosedForm) => {
                        let [w, st, sum] = UserTarget::ALL.map(|u| asymptotics(&s, strategy, u).at(s.rho()));
                        b.exact(name, metric, engine, vec![w, st], sum)
                    }
                    (Metric::Throughput, Engine::MonteCarlo) => {
                        let [w, st, sum] = mc.as_ref().expect("simulated").throughput(strategy);
                        b.estimated(name, metric, &[w, st], sum)
                    }
                    (Metric::Rate, Engine::MonteCarlo) => {
                        let [w, st, sum] = mc.as_ref().expect("simulated").rate(strategy);
                        b.estimated(name, metric, &[w, st], sum)
                    }
                    (Metric::Activity, Engine::MonteCarlo) => {
                        let a = mc.as_ref().expect("simulated").activity(strategy);
                        b.estimated(name, metric, &[], a)
                    }
                    (Metric::Throughput, Engine::Quadrature) => {
                        let (weak, strong) = match select_effective(&s, strategy) {
                            Strategy::Oma => ("phi_oma_weak", "phi_oma_strong"),
                            _ => ("phi_noma_weak", "phi_noma_strong"),
                        };
                        let (w, st) = quadrature_pair(&s, weak, strong, rate_quantum(&s))?;
                        b.exact(name, metric, engine, vec![w, st], w + st)
                    }
                    (Metric::Rate, Engine::Quadrature) => {
                        let (weak, strong) = match strategy {
                            Strategy::Oma => ("rate_oma_weak", "rate_oma_strong"),
                            Strategy::Noma => ("rate_noma_weak", "rate_noma_strong"),
                            Strategy::NomaA => ("rate_noma_a_weak", "rate_noma_a_strong"),
                        };
                        let (w, st) = quadrature_pair(&s, weak, strong, 1.0)?;
                        b.exact(name, metric, engine, vec![w, st], w + st)
                    }
                    (Metric::Activity, Engine::Quadrature) => {
                        let id = match strategy {
                            Strategy::Oma => "phi_oma_weak",
                            Strategy::Noma => "phi_noma_weak",
                            Strategy::NomaA => "activity_noma_a",
                        };
                        b.exact(name, metric, engine, Vec::new(), integral(&s, id)?)
                    }
                    // analytic-only metrics have no simulated or integrated form
                    (Metric::Asymptote | Metric::RhoMin, _) => continue,
                };
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

/// The fixed-rate strategy NOMA-A actually runs at `s`.
fn select_effective(s: &Scenario, strategy: Strategy) -> Strategy {
    match strategy {
        Strategy::NomaA => select_no_csit(s),
        other => other,
    }
}

fn k_user_rows(spec: &SweepSpec, strategies: &[KStrategy], point: &Point) -> Result<Vec<CsvRow>> {
    let s = KScenario::from_db(point.powers.clone(), point.gamma_db, point.rho_db)?;
    let run = mc_k_users(&s, spec.samples, point.seed)?;
    let b = RowBuilder {
        point,
        gamma: s.gamma(),
        rho: s.rho(),
    };
    let mut rows = Vec::new();
    for &metric in &spec.metrics {
        for strategy in strategies {
            let label = strategy.label();
            let report = match metric {
                Metric::Throughput => run.throughput(strategy),
                _ => run.rate(strategy),
            }
            .ok_or_else(|| Error::config("strategies", format!("'{label}' was not simulated")))?;
            rows.push(match metric {
                Metric::Activity => {
                    let a = report.all_active.expect("full CSI reports activity");
                    b.estimated(&label, metric, &[], a)
                }
                _ => b.estimated(&label, metric, &report.per_user, report.sum),
            });
        }
    }
    Ok(rows)
}

/// Evaluates every cell of the sweep, in grid order
/// (powers, then threshold, then `ρ`; within a point: metric, strategy, engine).
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<CsvRow>> {
    spec.validate()?;
    let rho_grid = spec.rho_grid()?;
    let k_user = spec.powers.as_ref().filter(|p| p.len() >= 3);
    let power_sets: Vec<Vec<f64>> = match k_user {
        Some(p) => vec![p.clone()],
        None => spec.power_pairs().into_iter().map(|(a, b)| vec![a, b]).collect(),
    };
    let mut points = Vec::new();
    for powers in &power_sets {
        for &gamma_db in &spec.gamma_db {
            for &rho_db in &rho_grid {
                let seed = spec.seed.wrapping_add(points.len() as u64);
                points.push(Point {
                    powers: powers.clone(),
                    gamma_db,
                    rho_db,
                    seed,
                });
            }
        }
    }
    let body = || -> Result<Vec<CsvRow>> {
        let per_point: Vec<Vec<CsvRow>> = match k_user {
            Some(p) => {
                let strategies = spec.k_strategies(p.len())?;
                points.par_iter().map(|pt| k_user_rows(spec, &strategies, pt)).collect::<Result<_>>()?
            }
            None => {
                let strategies = spec.two_user_strategies()?;
                points.par_iter().map(|pt| two_user_rows(spec, &strategies, pt)).collect::<Result<_>>()?
            }
        };
        Ok(per_point.into_iter().flatten().collect())
    };
    with_threads(spec.threads, body)?
}

// ---------------------------------------------------------------------------
// ρ_min map

/// One cell of the `ρ_min` map.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoMinRow {
    pub p1: f64,
    pub p2: f64,
    pub gamma_db: f64,
    pub target: UserTarget,
    /// Linear; `inf` when OMA never overtakes NOMA.
    pub rho_min: f64,
}

impl fmt::Display for RhoMinRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let db = if self.rho_min.is_finite() {
            linear_to_db(self.rho_min)
        } else {
            f64::INFINITY
        };
        write!(
            f,
            "{:e},{:e},{:e},{:e},{},{:e},{:e}",
            self.p1,
            self.p2,
            db_to_linear(self.gamma_db),
            self.gamma_db,
            self.target,
            self.rho_min,
            db
        )
    }
}

/// `ρ_min` for every `(P1, γ, target)` cell with `P2 = 1 - P1`.
pub fn rho_min_map(p1_grid: &[f64], gamma_db_grid: &[f64]) -> Result<Vec<RhoMinRow>> {
    let mut cells = Vec::new();
    for &p1 in p1_grid {
        for &g in gamma_db_grid {
            let s = Scenario::from_db(p1, 1.0 - p1, g, 0.0).map_err(|e| Error::config("p1", e.to_string()))?;
            cells.push((p1, g, s));
        }
    }
    let rows: Vec<Vec<RhoMinRow>> = cells
        .par_iter()
        .map(|&(p1, g, s)| {
            UserTarget::ALL
                .into_iter()
                .map(|target| RhoMinRow {
                    p1,
                    p2: 1.0 - p1,
                    gamma_db: g,
                    target,
                    rho_min: rho_min(&s, target).unwrap_or(f64::INFINITY),
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

// ---------------------------------------------------------------------------
// Command line

#[derive(Debug, Parser)]
#[command(name = "uplink-noma", version, about = "Uplink NOMA vs OMA performance analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate metrics over a parameter grid and write CSV.
    Sweep(Box<SweepArgs>),
    /// Run the verification suite; exits non-zero on any failure.
    Verify(VerifyArgs),
    /// Minimum ρ for OMA to beat NOMA per (P1, γ) cell, with P2 = 1 - P1.
    RhoMinMap(RhoMinArgs),
    /// Print the adaptive full-CSI decision for one channel realisation.
    Decide(DecideArgs),
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Weak-user power: a value, a comma list, or start:stop:step.
    #[arg(long, env = "NOMA_P1")]
    pub p1: Option<String>,
    /// Strong-user power, or `complement` for 1 - P1.
    #[arg(long, env = "NOMA_P2")]
    pub p2: Option<String>,
    /// Comma-separated ascending powers; three or more select the K-user simulator.
    #[arg(long, env = "NOMA_POWERS")]
    pub powers: Option<String>,
    /// SINR threshold in dB: a value, a comma list, or start:stop:step.
    #[arg(long = "gamma-db", env = "NOMA_GAMMA_DB", allow_hyphen_values = true)]
    pub gamma_db: Option<String>,
    #[arg(long = "rho-db-start", env = "NOMA_RHO_DB_START", allow_hyphen_values = true)]
    pub rho_db_start: Option<String>,
    #[arg(long = "rho-db-stop", env = "NOMA_RHO_DB_STOP", allow_hyphen_values = true)]
    pub rho_db_stop: Option<String>,
    #[arg(long = "rho-db-step", env = "NOMA_RHO_DB_STEP")]
    pub rho_db_step: Option<String>,
    /// Comma list: oma, noma, noma-a, mixed-X-Y (K users), or all.
    #[arg(long, env = "NOMA_STRATEGIES")]
    pub strategies: Option<String>,
    /// Comma list: throughput, rate, activity, rho_min, asymptote.
    #[arg(long, env = "NOMA_METRICS")]
    pub metrics: Option<String>,
    /// Comma list: closed_form, monte_carlo, quadrature.
    #[arg(long, env = "NOMA_ENGINES")]
    pub engines: Option<String>,
    #[arg(long, env = "NOMA_SAMPLES")]
    pub samples: Option<String>,
    #[arg(long, env = "NOMA_SEED")]
    pub seed: Option<String>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, env = "NOMA_THREADS")]
    pub threads: Option<String>,
    /// key=value file with the same keys as the flags.
    #[arg(long, env = "NOMA_CONFIG")]
    pub config: Option<PathBuf>,
    /// CSV destination; standard output when absent.
    #[arg(long, env = "NOMA_OUTPUT")]
    pub output: Option<String>,
}

impl SweepArgs {
    /// Flags and environment (already merged by clap) over the config file.
    pub fn settings(&self) -> Result<BTreeMap<String, String>> {
        let mut map = match &self.config {
            Some(path) => parse_config(&read_text(path)?, &SWEEP_KEYS)?,
            None => BTreeMap::new(),
        };
        let given = [
            ("p1", &self.p1),
            ("p2", &self.p2),
            ("powers", &self.powers),
            ("gamma-db", &self.gamma_db),
            ("rho-db-start", &self.rho_db_start),
            ("rho-db-stop", &self.rho_db_stop),
            ("rho-db-step", &self.rho_db_step),
            ("strategies", &self.strategies),
            ("metrics", &self.metrics),
            ("engines", &self.engines),
            ("samples", &self.samples),
            ("seed", &self.seed),
            ("threads", &self.threads),
            ("output", &self.output),
        ];
        for (key, value) in given {
            if let Some(v) = value {
                map.insert(key.to_string(), v.clone());
            }
        }
        Ok(map)
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, env = "NOMA_LEVEL", default_value = "fast")]
    pub level: String,
    #[arg(long, env = "NOMA_SEED")]
    pub seed: Option<u64>,
    /// Draws per two-user Monte Carlo estimate.
    #[arg(long, env = "NOMA_SAMPLES")]
    pub samples: Option<u64>,
    /// Draws per K = 3 point.
    #[arg(long = "k3-samples", env = "NOMA_K3_SAMPLES")]
    pub k3_samples: Option<u64>,
    #[arg(long, env = "NOMA_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RhoMinArgs {
    /// P1 grid: a comma list or start:stop:step.
    #[arg(long, env = "NOMA_P1", default_value = "0.05:0.5:0.05")]
    pub p1: String,
    /// γ grid in dB: a comma list or start:stop:step.
    #[arg(long = "gamma-db", env = "NOMA_GAMMA_DB", default_value = "0:20:1")]
    pub gamma_db: String,
    #[arg(long, env = "NOMA_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, env = "NOMA_OUTPUT")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecideArgs {
    #[arg(long, env = "NOMA_P1", default_value_t = 0.1)]
    pub p1: f64,
    /// Defaults to 1 - P1.
    #[arg(long, env = "NOMA_P2")]
    pub p2: Option<f64>,
    #[arg(long = "gamma-db", env = "NOMA_GAMMA_DB", default_value_t = 10.0, allow_hyphen_values = true)]
    pub gamma_db: f64,
    #[arg(long = "rho-db", env = "NOMA_RHO_DB", default_value_t = 20.0, allow_hyphen_values = true)]
    pub rho_db: f64,
    /// Received power of the weaker user (normalised fading gain times its mean).
    #[arg(long)]
    pub xa: f64,
    /// Received power of the stronger user.
    #[arg(long)]
    pub xb: f64,
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::config("config", format!("{}: {e}", path.display())))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(Error::Io),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn sweep(args: &SweepArgs) -> Result<()> {
    let spec = SweepSpec::from_settings(&args.settings()?)?;
    let rows = run_sweep(&spec)?;
    let csv = to_csv(&rows);
    write_output(spec.output.as_deref(), &csv)?;
    let summary = format!(
        "sweep: {} rows over {} rho points{}",
        rows.len(),
        spec.rho_grid()?.len(),
        spec.output.as_ref().map(|p| format!(", written to {}", p.display())).unwrap_or_default()
    );
    if spec.output.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

fn verify_cmd(args: &VerifyArgs) -> Result<bool> {
    let level: Level = args.level.parse()?;
    let defaults = VerifyOptions::default();
    let opts = VerifyOptions {
        seed: args.seed.unwrap_or(defaults.seed),
        samples: args.samples.unwrap_or(defaults.samples),
        k3_samples: args.k3_samples.unwrap_or(defaults.k3_samples),
        threads: args.threads,
    };
    oracle::check_samples(opts.samples)?;
    oracle::check_samples(opts.k3_samples)?;
    let ids: Vec<u32> = match level {
        Level::Full => (1..=9).collect(),
        Level::Fast => vec![3, 4, 6, 7],
    };
    let mut all = true;
    let mut stdout = std::io::stdout().lock();
    for id in ids {
        let start = Instant::now();
        let c = match (level, id) {
            (Level::Fast, _) => verify::fast_criterion(id, &opts)?,
            (Level::Full, _) => verify::criterion(id, &opts)?,
        };
        write!(stdout, "{c}")?;
        stdout.flush()?;
        eprintln!("criterion {id}: {:.2} s", start.elapsed().as_secs_f64());
        all &= c.passed();
    }
    writeln!(stdout, "overall: {}", if all { "PASS" } else { "FAIL" })?;
    Ok(all)
}

fn rho_min_cmd(args: &RhoMinArgs) -> Result<()> {
    let p1 = parse_grid("p1", &args.p1)?;
    let gamma = parse_grid("gamma-db", &args.gamma_db)?;
    let rows = with_threads(args.threads, || rho_min_map(&p1, &gamma))??;
    let mut text = String::from(RHO_MIN_HEADER);
    text.push('\n');
    for r in &rows {
        writeln!(text, "{r}").expect("writing to a String cannot fail");
    }
    write_output(args.output.as_deref(), &text)
}

fn decide_cmd(args: &DecideArgs) -> Result<()> {
    let p2 = args.p2.unwrap_or(1.0 - args.p1);
    let s = Scenario::from_db(args.p1, p2, args.gamma_db, args.rho_db)?;
    let (xa, xb) = (args.xa.min(args.xb), args.xa.max(args.xb));
    let d = decide_noma_a(&s, &ChannelDraw::two_user(xa, xb)?)?;
    let (ra, rb) = instantaneous_rates(&s, xa, xb, d.mode);
    println!("mode={}", d.mode.name());
    println!("active_weak={}", d.active_weak);
    println!("active_strong={}", d.active_strong);
    println!("rate_weak={ra:e}");
    println!("rate_strong={rb:e}");
    Ok(())
}

/// Runs the CLI on `args` and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = match &cli.command {
        Command::Sweep(a) => sweep(a).map(|_| true),
        Command::Verify(a) => verify_cmd(a),
        Command::RhoMinMap(a) => rho_min_cmd(a).map(|_| true),
        Command::Decide(a) => decide_cmd(a).map(|_| true),
    };
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("x", "0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("x", "1,2.5").unwrap(), vec![1.0, 2.5]);
        assert_eq!(parse_grid("x", "-3").unwrap(), vec![-3.0]);
        assert!(parse_grid("x", "1:0:1").is_err());
        assert!(parse_grid("x", "0:1:0").is_err());
        let g = arithmetic_grid("r", -10.0, 40.0, 2.5).unwrap();
        assert_eq!(g.len(), 21);
        assert_eq!(g[20], 40.0);
    }

    #[test]
    fn config_parsing() {
        let m = parse_config("# comment\np1 = 0.2\n\n--seed=4\n", &SWEEP_KEYS).unwrap();
        assert_eq!(m["p1"], "0.2");
        assert_eq!(m["seed"], "4");
        match parse_config("bogus=1", &SWEEP_KEYS) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "bogus"),
            other => panic!("{other:?}"),
        }
        assert!(parse_config("p1", &SWEEP_KEYS).is_err());
        assert!(parse_config("p1=1\np1=2", &SWEEP_KEYS).is_err());
    }

    #[test]
    fn spec_validation_names_fields() {
        let field = |pairs: &[(&str, &str)]| match SweepSpec::from_settings(&settings(pairs)) {
            Err(Error::Config { field, .. }) => field,
            other => panic!("{other:?}"),
        };
        assert_eq!(field(&[("strategies", "")]), "strategies");
        assert_eq!(field(&[("strategies", "tdma")]), "strategies");
        assert_eq!(field(&[("rho-db-start", "5"), ("rho-db-stop", "5")]), "rho-db-stop");
        assert_eq!(field(&[("rho-db-step", "0")]), "rho-db-step");
        assert_eq!(field(&[("engines", "monte_carlo"), ("samples", "10")]), "samples");
        assert_eq!(field(&[("p1", "0.7")]), "p2");
        assert_eq!(field(&[("powers", "0.1,0.2,0.7"), ("engines", "closed_form")]), "engines");
        assert_eq!(field(&[("metrics", "speed")]), "metrics");
        assert_eq!(field(&[("seed", "x")]), "seed");
    }

    #[test]
    fn default_spec_is_the_operating_point() {
        let spec = SweepSpec::from_settings(&BTreeMap::new()).unwrap();
        assert_eq!(spec.p1, vec![0.1]);
        assert_eq!(spec.p2, None);
        assert_eq!(spec.gamma_db, vec![10.0]);
        assert_eq!(spec.rho_grid().unwrap().len(), 41);
        assert_eq!(spec.engines, vec![Engine::ClosedForm]);
    }

    #[test]
    fn rows_round_trip() {
        let spec = SweepSpec::from_settings(&settings(&[
            ("rho-db-start", "0"),
            ("rho-db-stop", "20"),
            ("rho-db-step", "10"),
            ("metrics", "throughput,rate,activity,rho_min,asymptote"),
            ("engines", "closed_form,monte_carlo,quadrature"),
            ("samples", "2000"),
        ]))
        .unwrap();
        let rows = run_sweep(&spec).unwrap();
        // 3 points × (4 metrics × 3 strategies × engines + one ρ_min row)
        assert_eq!(rows.len(), 3 * (3 * 3 * 3 + 3 + 1));
        let back = parse_csv(&to_csv(&rows)).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn k_user_rows_are_labelled() {
        let spec = SweepSpec::from_settings(&settings(&[
            ("powers", "0.05,0.15,0.8"),
            ("rho-db-start", "20"),
            ("rho-db-stop", "20.5"),
            ("strategies", "all"),
            ("engines", "monte_carlo"),
            ("samples", "5000"),
        ]))
        .unwrap();
        let rows = run_sweep(&spec).unwrap();
        let labels: Vec<&str> = rows.iter().filter(|r| r.metric == Metric::Throughput).map(|r| r.strategy.as_str()).collect();
        assert_eq!(labels, ["noma", "mixed-B-A", "mixed-C-A", "mixed-C-B", "oma", "noma-a"]);
        assert!(rows.iter().all(|r| r.powers.len() == 3));
    }

    #[test]
    fn rho_min_map_marks_missing_crossovers() {
        let rows = rho_min_map(&[0.1], &[0.0]).unwrap();
        let weak = rows.iter().find(|r| r.target == UserTarget::Weak).unwrap();
        assert!(weak.rho_min.is_infinite());
        assert!(weak.to_string().ends_with(",weak,inf,inf"));
    }
}
