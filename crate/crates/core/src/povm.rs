//! Exclusion measurements: checking them, building them from a Gram
//! splitting, and the rounded two-copy measurement for {|0⟩, |+⟩, |1⟩}.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::incoherence::{verify_decomposition, Decomposition};
use crate::numerics::{hermitian_eig, pseudo_inverse, CMatrix};
use crate::states::{gram_of, StateSet};

/// Default tolerance for [`verify_exclusion`].
pub const DEFAULT_TOL: f64 = 1e-8;
/// Tolerance absorbing the four-decimal rounding of [`rounded_two_copy_povm`].
pub const ROUNDED_POVM_TOL: f64 = 2e-3;

const PINV_RCOND: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dim: usize,
    elements: Vec<CMatrix>,
}

impl Povm {
    /// Checks shapes and Hermiticity only; measurement conditions are left to
    /// [`verify_exclusion`].
    pub fn new(dim: usize, elements: Vec<CMatrix>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch(
                "POVM dimension must be positive".into(),
            ));
        }
        for (j, e) in elements.iter().enumerate() {
            if e.rows() != dim || e.cols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "element {j} is {}x{}, expected {dim}x{dim}",
                    e.rows(),
                    e.cols()
                )));
            }
            let deviation = e.hermitian_deviation();
            if deviation > 1e-10 {
                return Err(Error::NonHermitianInput { deviation });
            }
        }
        Ok(Self { dim, elements })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    /// Outcome probabilities ⟨ψ|Π_j|ψ⟩.
    pub fn probabilities(&self, state: &[Complex64]) -> Vec<f64> {
        self.elements
            .iter()
            .map(|e| e.expectation(state).re)
            .collect()
    }

    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            dim: self.dim,
            elements: order.iter().map(|&j| self.elements[j].clone()).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    Completeness,
    Positivity,
    Exclusion,
    Relevance,
}

impl Condition {
    pub fn as_str(&self) -> &'static str {
        match self {
            Condition::Completeness => "completeness",
            Condition::Positivity => "positivity",
            Condition::Exclusion => "exclusion",
            Condition::Relevance => "relevance",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A failed condition; `slack` is negative by how much it was missed.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub condition: Condition,
    pub outcome: Option<usize>,
    pub value: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExclusionReport {
    pub tol: f64,
    /// ‖ΣΠ_j − I‖_F
    pub completeness: f64,
    /// Smallest eigenvalue of each element.
    pub min_eigenvalues: Vec<f64>,
    /// ⟨ψ_j|Π_j|ψ_j⟩
    pub exclusion: Vec<f64>,
    /// Σ_i ⟨ψ_i|Π_j|ψ_i⟩
    pub relevance: Vec<f64>,
    pub violations: Vec<Violation>,
}

impl ExclusionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that outcome j of `povm` rules out state j, for every j.
pub fn verify_exclusion(set: &StateSet, povm: &Povm, tol: f64) -> Result<ExclusionReport> {
    if povm.len() != set.len() {
        return Err(Error::CountMismatch {
            povm: povm.len(),
            states: set.len(),
        });
    }
    if povm.dim() != set.dim() {
        return Err(Error::DimensionMismatch(format!(
            "POVM acts on dimension {}, states live in dimension {}",
            povm.dim(),
            set.dim()
        )));
    }
    let mut violations = Vec::new();

    let mut total = CMatrix::zeros(povm.dim(), povm.dim());
    for e in povm.elements() {
        total += e;
    }
    let completeness = (&total - &CMatrix::identity(povm.dim())).frobenius_norm();
    if completeness > tol {
        violations.push(Violation {
            condition: Condition::Completeness,
            outcome: None,
            value: completeness,
            slack: tol - completeness,
        });
    }

    let mut min_eigenvalues = Vec::with_capacity(povm.len());
    for (j, e) in povm.elements().iter().enumerate() {
        let min = hermitian_eig(&e.hermitian_part())?.min();
        if min < -tol {
            violations.push(Violation {
                condition: Condition::Positivity,
                outcome: Some(j),
                value: min,
                slack: min + tol,
            });
        }
        min_eigenvalues.push(min);
    }

    let mut exclusion = Vec::with_capacity(set.len());
    for (j, e) in povm.elements().iter().enumerate() {
        let p = e.expectation(set.state(j)).re;
        if p > tol {
            violations.push(Violation {
                condition: Condition::Exclusion,
                outcome: Some(j),
                value: p,
                slack: tol - p,
            });
        }
        exclusion.push(p);
    }

    let mut relevance = Vec::with_capacity(povm.len());
    for (j, e) in povm.elements().iter().enumerate() {
        let r: f64 = set.states().iter().map(|s| e.expectation(s).re).sum();
        if r <= tol {
            violations.push(Violation {
                condition: Condition::Relevance,
                outcome: Some(j),
                value: r,
                slack: r - tol,
            });
        }
        relevance.push(r);
    }

    Ok(ExclusionReport {
        tol,
        completeness,
        min_eigenvalues,
        exclusion,
        relevance,
        violations,
    })
}

/// Outcome assigned to each state so that every state is excluded by a
/// distinct outcome, if such a matching exists.
///
/// `assignment[j]` is the outcome that excludes state j.
pub fn find_exclusion_assignment(
    set: &StateSet,
    povm: &Povm,
    tol: f64,
) -> Result<Option<Vec<usize>>> {
    if povm.len() != set.len() {
        return Err(Error::CountMismatch {
            povm: povm.len(),
            states: set.len(),
        });
    }
    if povm.dim() != set.dim() {
        return Err(Error::DimensionMismatch(format!(
            "POVM acts on dimension {}, states live in dimension {}",
            povm.dim(),
            set.dim()
        )));
    }
    let k = set.len();
    let excludes: Vec<Vec<bool>> = (0..k)
        .map(|j| {
            povm.elements()
                .iter()
                .map(|e| e.expectation(set.state(j)).re <= tol)
                .collect()
        })
        .collect();

    // Kuhn's augmenting paths.
    let mut owner: Vec<Option<usize>> = vec![None; k];
    fn augment(
        state: usize,
        excludes: &[Vec<bool>],
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for outcome in 0..owner.len() {
            if excludes[state][outcome] && !seen[outcome] {
                seen[outcome] = true;
                let free = match owner[outcome] {
                    None => true,
                    Some(other) => augment(other, excludes, seen, owner),
                };
                if free {
                    owner[outcome] = Some(state);
                    return true;
                }
            }
        }
        false
    }
    for state in 0..k {
        let mut seen = vec![false; k];
        if !augment(state, &excludes, &mut seen, &mut owner) {
            return Ok(None);
        }
    }
    let mut assignment = vec![0; k];
    for (outcome, state) in owner.iter().enumerate() {
        assignment[state.expect("perfect matching")] = outcome;
    }
    Ok(Some(assignment))
}

/// Π_i = (V⁺)† F_i V⁺, with I − VV⁺ added to Π_1, where V has the states as columns.
pub fn extract_povm(set: &StateSet, d: &Decomposition) -> Result<Povm> {
    verify_decomposition(&gram_of(set), d)
        .map_err(|f| Error::InfeasibleDecomposition(f.to_string()))?;
    let v = set.as_columns();
    let v_pinv = pseudo_inverse(&v, PINV_RCOND)?;
    let v_pinv_adj = v_pinv.adjoint();
    let dim = set.dim();
    let mut elements: Vec<CMatrix> = d
        .blocks
        .iter()
        .map(|f| (&(&v_pinv_adj * f) * &v_pinv).hermitian_part())
        .collect();
    let complement = &CMatrix::identity(dim) - &(&v * &v_pinv);
    elements[0] = (&elements[0] + &complement).hermitian_part();
    Povm::new(dim, elements)
}

/// {|00⟩, |++⟩, |11⟩} with a three-outcome exclusion measurement rounded to four decimals.
pub fn rounded_two_copy_povm() -> (StateSet, Povm) {
    let h = 0.5;
    let set = StateSet::from_real(
        4,
        &[&[1.0, 0.0, 0.0, 0.0], &[h, h, h, h], &[0.0, 0.0, 0.0, 1.0]],
    )
    .expect("unit vectors");
    #[rustfmt::skip]
    let elements = [
        [
            0.0, 0.0, 0.0, 0.0,
            0.0, 0.3671, 0.0338, 0.0991,
            0.0, 0.0338, 0.3671, 0.0991,
            0.0, 0.0991, 0.0991, 0.8017,
        ],
        [
            0.1983, -0.0991, -0.0991, 0.0,
            -0.0991, 0.2658, -0.0675, -0.0991,
            -0.0991, -0.0675, 0.2658, -0.0991,
            0.0, -0.0991, -0.0991, 0.1983,
        ],
        [
            0.8017, 0.0991, 0.0991, 0.0,
            0.0991, 0.3671, 0.0338, 0.0,
            0.0991, 0.0338, 0.3671, 0.0,
            0.0, 0.0, 0.0, 0.0,
        ],
    ];
    let elements = elements
        .iter()
        .map(|e| CMatrix::from_real(4, 4, e).expect("4x4"))
        .collect();
    (set, Povm::new(4, elements).expect("symmetric 4x4 elements"))
}
