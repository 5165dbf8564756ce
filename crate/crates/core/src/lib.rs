//! Performance analysis of two-user uplink NOMA against OMA over Rayleigh
//! fading, with an adaptive scheme that switches between them.
//!
//! Two operating regimes are covered. Without transmitter CSI every user
//! sends at a fixed rate and the figure of merit is the throughput
//! ([`no_csit`]). With full CSI each user only transmits when its
//! instantaneous rate clears a minimum, and the figure of merit is the
//! average data rate ([`full_csit`]). Every closed form has an independent
//! Monte Carlo and quadrature counterpart in [`oracle`].

// Negated float comparisons are deliberate: they reject NaN. The quadrature
// nodes are kept at their published precision.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

use std::fmt;
use std::str::FromStr;

pub mod channel;
pub mod cli;
pub mod error;
pub mod full_csit;
pub mod no_csit;
pub mod oracle;
pub mod quadrature;
pub mod roots;
pub mod special;
pub mod verify;

pub use channel::{ChannelDraw, KScenario, Scenario};
pub use error::{Error, Result};
pub use full_csit::{AsymptoteReport, Mode, Provenance, RateReport, StrategyDecision};
pub use no_csit::ThroughputReport;

/// Multiple-access strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    Oma,
    Noma,
    /// Adaptive NOMA: falls back to OMA when NOMA would fail.
    NomaA,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Oma, Strategy::Noma, Strategy::NomaA];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Oma => "oma",
            Strategy::Noma => "noma",
            Strategy::NomaA => "noma-a",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "oma" => Ok(Strategy::Oma),
            "noma" => Ok(Strategy::Noma),
            "noma-a" | "noma_a" | "nomaa" => Ok(Strategy::NomaA),
            other => Err(Error::config("strategies", format!("unknown strategy '{other}'"))),
        }
    }
}

/// Which user a metric refers to: the weaker (A), the stronger (B), or both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UserTarget {
    Weak,
    Strong,
    Sum,
}

impl UserTarget {
    pub const ALL: [UserTarget; 3] = [UserTarget::Weak, UserTarget::Strong, UserTarget::Sum];

    pub fn name(self) -> &'static str {
        match self {
            UserTarget::Weak => "weak",
            UserTarget::Strong => "strong",
            UserTarget::Sum => "sum",
        }
    }
}

impl fmt::Display for UserTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for UserTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "weak" | "a" => Ok(UserTarget::Weak),
            "strong" | "b" => Ok(UserTarget::Strong),
            "sum" | "total" => Ok(UserTarget::Sum),
            other => Err(Error::config("target", format!("unknown user '{other}'"))),
        }
    }
}
