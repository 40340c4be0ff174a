//! Antidistinguishability tests and the registry that chains them.
//!
//! Each rule is either sufficient (can only certify antidistinguishability),
//! necessary (can only refute it), or an exact characterization on a
//! restricted family. Rules report [`Decision::Inconclusive`] outside the
//! region they decide.

mod registry;
mod rules;

pub use registry::{
    classify, classify_with, Classification, Criterion, CriterionRegistry, IncoherenceSdp,
    Instance, Method, Subject, TrailEntry,
};
pub use rules::{
    equal_real_iff, necessary_fidelity_sum, necessary_overlap_floor, overlap_threshold,
    sufficient_identity_mix, sufficient_overlap_threshold, three_state_iff, EQUAL_REAL,
    FIDELITY_SUM, IDENTITY_MIX, OVERLAP_FLOOR, OVERLAP_THRESHOLD, THREE_STATE,
};

use std::fmt;
use std::str::FromStr;

use crate::incoherence::{Decomposition, InfeasibilityCertificate};

/// Roundoff allowance on closed-form inequalities.
pub const EXACT_EPS: f64 = 1e-12;
/// Verdicts whose margin is within this band are flagged as borderline.
pub const BORDERLINE_BAND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decision {
    Antidistinguishable,
    NotAntidistinguishable,
    Inconclusive,
}

impl Decision {
    pub fn as_str(&self) -> &'static str {
        match self {
            Decision::Antidistinguishable => "antidistinguishable",
            Decision::NotAntidistinguishable => "not_antidistinguishable",
            Decision::Inconclusive => "inconclusive",
        }
    }

    pub fn is_decisive(&self) -> bool {
        !matches!(self, Decision::Inconclusive)
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Decision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "antidistinguishable" => Ok(Decision::Antidistinguishable),
            "not_antidistinguishable" => Ok(Decision::NotAntidistinguishable),
            "inconclusive" => Ok(Decision::Inconclusive),
            other => Err(format!("unknown decision '{other}'")),
        }
    }
}

/// Evidence backing a decisive verdict.
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// Blocks F_i with G = ΣF_i.
    Decomposition(Decomposition),
    /// Dual witness separating G from the cone sum.
    Infeasibility(InfeasibilityCertificate),
    /// Weights t_i > 0 with Σ t_i |ψ_i⟩⟨ψ_i| = I.
    MixtureWeights(Vec<f64>),
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Decomposition(_) => "decomposition",
            Certificate::Infeasibility(_) => "infeasibility",
            Certificate::MixtureWeights(_) => "mixture_weights",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub decision: Decision,
    pub criterion: String,
    /// Signed distance to the rule's threshold; positive inside the region
    /// the rule decides, non-positive when inconclusive.
    pub margin: f64,
    pub borderline: bool,
    pub certificate: Option<Certificate>,
}

impl Verdict {
    pub fn decided(
        decision: Decision,
        criterion: &str,
        margin: f64,
        certificate: Option<Certificate>,
    ) -> Self {
        Self {
            decision,
            criterion: criterion.to_string(),
            margin,
            borderline: margin.abs() <= BORDERLINE_BAND,
            certificate,
        }
    }

    pub fn inconclusive(criterion: &str, margin: f64) -> Self {
        Self::decided(Decision::Inconclusive, criterion, margin, None)
    }
}
