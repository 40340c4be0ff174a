//! JSON file formats. Complex numbers are `[re, im]` pairs; matrices are
//! flattened row-major lists of pairs.

use exclusion_lab::criteria::{Certificate, Classification, Decision, TrailEntry, Verdict};
use exclusion_lab::incoherence::{Decomposition, InfeasibilityCertificate};
use exclusion_lab::multicopy::CopyReport;
use exclusion_lab::numerics::CMatrix;
use exclusion_lab::povm::{ExclusionReport, Povm};
use exclusion_lab::states::StateSet;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub type Pair = [f64; 2];

fn to_pair(z: Complex64) -> Pair {
    // Adding 0.0 maps -0.0 to 0.0.
    [z.re + 0.0, z.im + 0.0]
}

fn from_pair(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn flatten(m: &CMatrix) -> Vec<Pair> {
    m.as_slice().iter().copied().map(to_pair).collect()
}

fn unflatten(size: usize, data: &[Pair], what: &str) -> Result<CMatrix, CliError> {
    if data.len() != size * size {
        return Err(CliError::Format(format!(
            "{what} has {} entries, expected {size}×{size} = {}",
            data.len(),
            size * size
        )));
    }
    CMatrix::from_vec(size, size, data.iter().copied().map(from_pair).collect())
        .map_err(|e| CliError::Format(format!("{what}: {e}")))
}

/// `{"dim": d, "states": [[[re, im], ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSetFile {
    pub dim: usize,
    pub states: Vec<Vec<Pair>>,
}

impl StateSetFile {
    pub fn from_set(set: &StateSet) -> Self {
        Self {
            dim: set.dim(),
            states: set
                .states()
                .iter()
                .map(|s| s.iter().copied().map(to_pair).collect())
                .collect(),
        }
    }

    /// Validates lengths and unit norms.
    pub fn to_set(&self) -> Result<StateSet, CliError> {
        if self.states.is_empty() {
            return Err(CliError::Format("state set is empty".into()));
        }
        for (i, s) in self.states.iter().enumerate() {
            if s.len() != self.dim {
                return Err(CliError::Format(format!(
                    "state {i} has {} amplitudes, expected dim = {}",
                    s.len(),
                    self.dim
                )));
            }
        }
        let states = self
            .states
            .iter()
            .map(|s| s.iter().copied().map(from_pair).collect())
            .collect();
        StateSet::new(self.dim, states).map_err(|e| CliError::Format(e.to_string()))
    }
}

/// `{"dim": d, "elements": [[[re, im], ...], ...]}`, one flattened d×d
/// matrix per outcome, in the order of the states they exclude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmFile {
    pub dim: usize,
    pub elements: Vec<Vec<Pair>>,
}

impl PovmFile {
    pub fn from_povm(povm: &Povm) -> Self {
        Self {
            dim: povm.dim(),
            elements: povm.elements().iter().map(flatten).collect(),
        }
    }

    pub fn to_povm(&self) -> Result<Povm, CliError> {
        let elements = self
            .elements
            .iter()
            .enumerate()
            .map(|(j, e)| unflatten(self.dim, e, &format!("element {j}")))
            .collect::<Result<Vec<_>, _>>()?;
        Povm::new(self.dim, elements).map_err(|e| CliError::Format(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CertificateJson {
    Decomposition {
        size: usize,
        blocks: Vec<Vec<Pair>>,
        residual: f64,
    },
    Infeasibility {
        size: usize,
        witness: Vec<Pair>,
        violation: f64,
    },
    MixtureWeights {
        weights: Vec<f64>,
    },
}

impl CertificateJson {
    pub fn from_certificate(c: &Certificate) -> Self {
        match c {
            Certificate::Decomposition(d) => CertificateJson::Decomposition {
                size: d.blocks.first().map_or(0, CMatrix::rows),
                blocks: d.blocks.iter().map(flatten).collect(),
                residual: d.residual,
            },
            Certificate::Infeasibility(h) => CertificateJson::Infeasibility {
                size: h.witness.rows(),
                witness: flatten(&h.witness),
                violation: h.violation,
            },
            Certificate::MixtureWeights(t) => {
                CertificateJson::MixtureWeights { weights: t.clone() }
            }
        }
    }

    pub fn to_certificate(&self) -> Result<Certificate, CliError> {
        Ok(match self {
            CertificateJson::Decomposition {
                size,
                blocks,
                residual,
            } => Certificate::Decomposition(Decomposition {
                blocks: blocks
                    .iter()
                    .enumerate()
                    .map(|(i, b)| unflatten(*size, b, &format!("block {i}")))
                    .collect::<Result<_, _>>()?,
                residual: *residual,
            }),
            CertificateJson::Infeasibility {
                size,
                witness,
                violation,
            } => Certificate::Infeasibility(InfeasibilityCertificate {
                witness: unflatten(*size, witness, "witness")?,
                violation: *violation,
            }),
            CertificateJson::MixtureWeights { weights } => {
                Certificate::MixtureWeights(weights.clone())
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrailJson {
    pub criterion: String,
    /// Absent when the rule did not apply.
    pub decision: Option<String>,
    pub margin: Option<f64>,
}

impl TrailJson {
    fn from_entry(e: &TrailEntry) -> Self {
        Self {
            criterion: e.criterion.clone(),
            decision: e.outcome.as_ref().map(|v| v.decision.as_str().to_string()),
            margin: e.outcome.as_ref().map(|v| v.margin),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictReport {
    pub decision: String,
    pub criterion: String,
    pub margin: f64,
    pub borderline: bool,
    pub copies: u32,
    pub certificate: Option<CertificateJson>,
    pub trail: Vec<TrailJson>,
}

impl VerdictReport {
    pub fn new(c: &Classification, copies: u32) -> Self {
        let v = &c.verdict;
        Self {
            decision: v.decision.as_str().to_string(),
            criterion: v.criterion.clone(),
            margin: v.margin,
            borderline: v.borderline,
            copies,
            certificate: v
                .certificate
                .as_ref()
                .map(CertificateJson::from_certificate),
            trail: c.trail.iter().map(TrailJson::from_entry).collect(),
        }
    }

    /// Rebuilds the final verdict, certificate included.
    pub fn to_verdict(&self) -> Result<Verdict, CliError> {
        let decision: Decision = self.decision.parse().map_err(CliError::Format)?;
        Ok(Verdict {
            decision,
            criterion: self.criterion.clone(),
            margin: self.margin,
            borderline: self.borderline,
            certificate: self
                .certificate
                .as_ref()
                .map(|c| c.to_certificate())
                .transpose()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CopyStepJson {
    pub copies: u32,
    pub decision: String,
    pub criterion: String,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CopyReportJson {
    /// `null` when unresolved.
    #[serde(rename = "minimal_N")]
    pub minimal_n: Option<u32>,
    pub resolved: bool,
    pub method: String,
    pub upper_bound: Option<u32>,
    pub trail: Vec<CopyStepJson>,
}

impl CopyReportJson {
    pub fn new(r: &CopyReport) -> Self {
        Self {
            minimal_n: r.minimal_n,
            resolved: r.minimal_n.is_some(),
            method: r.method.as_str().to_string(),
            upper_bound: r.upper_bound,
            trail: r
                .trail
                .iter()
                .map(|(n, v)| CopyStepJson {
                    copies: *n,
                    decision: v.decision.as_str().to_string(),
                    criterion: v.criterion.clone(),
                    margin: v.margin,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViolationJson {
    pub condition: String,
    pub outcome: Option<usize>,
    pub value: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExclusionReportJson {
    pub passed: bool,
    pub tol: f64,
    pub completeness: f64,
    pub min_eigenvalues: Vec<f64>,
    pub exclusion: Vec<f64>,
    pub relevance: Vec<f64>,
    pub violations: Vec<ViolationJson>,
    /// Outcome excluding each state, when an assignment search ran.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignment: Option<Vec<usize>>,
}

impl ExclusionReportJson {
    pub fn new(r: &ExclusionReport, assignment: Option<Vec<usize>>) -> Self {
        Self {
            passed: r.passed(),
            tol: r.tol,
            completeness: r.completeness,
            min_eigenvalues: r.min_eigenvalues.clone(),
            exclusion: r.exclusion.clone(),
            relevance: r.relevance.clone(),
            violations: r
                .violations
                .iter()
                .map(|v| ViolationJson {
                    condition: v.condition.as_str().to_string(),
                    outcome: v.outcome,
                    value: v.value,
                    slack: v.slack,
                })
                .collect(),
            assignment,
        }
    }
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Format(format!("{what}: {e}")))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &std::path::Path) -> Result<T, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    parse_json(&text, &path.display().to_string())
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize")
}
