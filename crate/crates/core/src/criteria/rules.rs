use crate::criteria::{Certificate, Decision, Verdict, EXACT_EPS};
use crate::error::{Error, Result};
use crate::numerics::{lp_feasible, LpOutcome};
use crate::states::{
    equal_real_threshold, max_overlap, min_overlap, require_states, Gram, StateSet,
};

pub const FIDELITY_SUM: &str = "necessary_fidelity_sum";
pub const IDENTITY_MIX: &str = "sufficient_identity_mix";
pub const OVERLAP_THRESHOLD: &str = "sufficient_overlap_threshold";
pub const OVERLAP_FLOOR: &str = "necessary_overlap_floor";
pub const EQUAL_REAL: &str = "equal_real_iff";
pub const THREE_STATE: &str = "three_state_iff";

/// Strict lower bound on the mixture weights.
const MIX_WEIGHT_FLOOR: f64 = 1e-9;
/// Tolerance for recognizing an equal, real off-diagonal pattern.
const PATTERN_TOL: f64 = 1e-10;

/// t_k = (1/√2)·√((k−2)/(k−1)).
pub fn overlap_threshold(k: usize) -> f64 {
    (equal_real_threshold(k) / 2.0).sqrt()
}

/// Σ_{i<j} |G_ij| above k(k−2)/2 rules out exclusion.
pub fn necessary_fidelity_sum(g: &Gram) -> Result<Verdict> {
    require_states(g, 3)?;
    let k = g.size() as f64;
    let total: f64 = g.overlaps().iter().sum();
    let bound = k * (k - 2.0) / 2.0;
    let margin = total - bound;
    Ok(if total > bound + EXACT_EPS {
        Verdict::decided(Decision::NotAntidistinguishable, FIDELITY_SUM, margin, None)
    } else {
        Verdict::inconclusive(FIDELITY_SUM, margin)
    })
}

/// Positive weights with Σ t_i |ψ_i⟩⟨ψ_i| = I certify exclusion; for qubits
/// their absence refutes it.
pub fn sufficient_identity_mix(set: &StateSet) -> Result<Verdict> {
    let d = set.dim();
    let k = set.len();
    // One real equation per diagonal entry and per real/imaginary part of each
    // upper-triangular entry.
    let mut rows = Vec::with_capacity(d * d);
    let mut rhs = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in a..d {
            let entries: Vec<_> = set.states().iter().map(|v| v[a] * v[b].conj()).collect();
            rows.push(entries.iter().map(|z| z.re).collect::<Vec<_>>());
            rhs.push(if a == b { 1.0 } else { 0.0 });
            if a != b {
                rows.push(entries.iter().map(|z| z.im).collect());
                rhs.push(0.0);
            }
        }
    }
    let lb = vec![MIX_WEIGHT_FLOOR; k];
    match lp_feasible(&rows, &rhs, &lb) {
        Ok(LpOutcome::Feasible(t)) => {
            let margin = t.iter().copied().fold(f64::INFINITY, f64::min);
            Ok(Verdict::decided(
                Decision::Antidistinguishable,
                IDENTITY_MIX,
                margin,
                Some(Certificate::MixtureWeights(t)),
            ))
        }
        Ok(LpOutcome::Infeasible { excess }) if d == 2 => Ok(Verdict::decided(
            Decision::NotAntidistinguishable,
            IDENTITY_MIX,
            excess,
            None,
        )),
        Ok(LpOutcome::Infeasible { excess }) => Ok(Verdict::inconclusive(IDENTITY_MIX, -excess)),
        Err(Error::LpNumerical(_)) => Ok(Verdict::inconclusive(IDENTITY_MIX, 0.0)),
        Err(e) => Err(e),
    }
}

/// Every |G_ij| at most t_k certifies exclusion.
pub fn sufficient_overlap_threshold(g: &Gram) -> Result<Verdict> {
    require_states(g, 3)?;
    let c = max_overlap(g)?;
    let t = overlap_threshold(g.size());
    let margin = t - c;
    Ok(if c <= t + EXACT_EPS {
        Verdict::decided(
            Decision::Antidistinguishable,
            OVERLAP_THRESHOLD,
            margin,
            None,
        )
    } else {
        Verdict::inconclusive(OVERLAP_THRESHOLD, margin)
    })
}

/// Every |G_ij| above (k−2)/(k−1) rules out exclusion.
pub fn necessary_overlap_floor(g: &Gram) -> Result<Verdict> {
    require_states(g, 3)?;
    let m = min_overlap(g)?;
    let s = equal_real_threshold(g.size());
    let margin = m - s;
    Ok(if m > s + EXACT_EPS {
        Verdict::decided(
            Decision::NotAntidistinguishable,
            OVERLAP_FLOOR,
            margin,
            None,
        )
    } else {
        Verdict::inconclusive(OVERLAP_FLOOR, margin)
    })
}

/// Common value γ if every off-diagonal entry equals the same real γ ∈ [0, 1).
pub(crate) fn equal_real_value(g: &Gram) -> Option<f64> {
    let reference = g.entry(0, 1);
    let mut total = 0.0;
    let mut count = 0usize;
    for (i, j) in g.pairs() {
        let z = g.entry(i, j);
        if z.im.abs() > PATTERN_TOL || (z.re - reference.re).abs() > PATTERN_TOL {
            return None;
        }
        total += z.re;
        count += 1;
    }
    let gamma = total / count as f64;
    (-PATTERN_TOL..1.0)
        .contains(&gamma)
        .then_some(gamma.max(0.0))
}

/// Exact test for G_ij = γ ∈ [0, 1) real: excludable iff γ ≤ (k−2)/(k−1).
///
/// `Ok(None)` when G does not have that pattern.
pub fn equal_real_iff(g: &Gram) -> Result<Option<Verdict>> {
    require_states(g, 3)?;
    let Some(gamma) = equal_real_value(g) else {
        return Ok(None);
    };
    let s = equal_real_threshold(g.size());
    Ok(Some(if gamma <= s + EXACT_EPS {
        Verdict::decided(Decision::Antidistinguishable, EQUAL_REAL, s - gamma, None)
    } else {
        Verdict::decided(
            Decision::NotAntidistinguishable,
            EQUAL_REAL,
            gamma - s,
            None,
        )
    }))
}

/// Exact test for three states in terms of x_ij = |G_ij|²: excludable iff
/// Σx < 1 and (Σx − 1)² ≥ 4Πx.
pub fn three_state_iff(g: &Gram) -> Result<Verdict> {
    if g.size() != 3 {
        return Err(Error::WrongCardinality {
            expected: 3,
            got: g.size(),
        });
    }
    let x: Vec<f64> = g.overlaps().iter().map(|c| c * c).collect();
    let sum: f64 = x.iter().sum();
    let product: f64 = x.iter().product();
    let below_one = 1.0 - sum;
    let discriminant = (sum - 1.0).powi(2) - 4.0 * product;
    let slack = below_one.min(discriminant);
    Ok(if below_one > EXACT_EPS && discriminant >= -EXACT_EPS {
        Verdict::decided(Decision::Antidistinguishable, THREE_STATE, slack, None)
    } else {
        Verdict::decided(Decision::NotAntidistinguishable, THREE_STATE, -slack, None)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::CMatrix;
    use crate::states::{construct_qubit_family, gram_of};
    use num_complex::Complex64;

    fn set(dim: usize, vs: &[&[f64]]) -> StateSet {
        StateSet::from_real(dim, vs).unwrap()
    }

    fn zero_plus_one() -> StateSet {
        set(2, &[&[1.0, 0.0], &[1.0, 1.0], &[0.0, 1.0]])
    }

    fn trefoil() -> StateSet {
        set(3, &[&[1.0, 1.0, 0.0], &[0.0, 1.0, 1.0], &[1.0, 0.0, 1.0]])
    }

    fn trine() -> StateSet {
        let h = 3f64.sqrt() / 2.0;
        set(2, &[&[1.0, 0.0], &[-0.5, h], &[-0.5, -h]])
    }

    #[test]
    fn fidelity_sum_examples() {
        let h = 3f64.sqrt() / 2.0;
        let s = (0.5f64).sqrt();
        let v =
            necessary_fidelity_sum(&gram_of(&set(2, &[&[1.0, 0.0], &[h, 0.5], &[s, s]]))).unwrap();
        assert_eq!(v.decision, Decision::NotAntidistinguishable);
        let total = h + s + (h * s + 0.5 * s);
        assert!((v.margin - (total - 1.5)).abs() < 1e-12);

        let v = necessary_fidelity_sum(&gram_of(&set(2, &[&[1.0, 0.0], &[0.0, 1.0], &[0.5, h]])))
            .unwrap();
        assert_eq!(v.decision, Decision::Inconclusive);
        assert!((v.margin - (0.5 + h - 1.5)).abs() < 1e-12);

        // √2 ≤ 3/2 although the set is not excludable
        let v = necessary_fidelity_sum(&gram_of(&zero_plus_one())).unwrap();
        assert_eq!(v.decision, Decision::Inconclusive);

        let v = necessary_fidelity_sum(&gram_of(&trefoil())).unwrap();
        assert_eq!(v.decision, Decision::Inconclusive);
        assert!((v.margin - 0.0).abs() < 1e-12);

        let v = necessary_fidelity_sum(&Gram::new(CMatrix::identity(3)).unwrap()).unwrap();
        assert_eq!(v.decision, Decision::Inconclusive);
    }

    #[test]
    fn fidelity_sum_needs_three_states() {
        let g = Gram::new(CMatrix::identity(2)).unwrap();
        assert!(matches!(
            necessary_fidelity_sum(&g),
            Err(Error::TooFewStates {
                required: 3,
                got: 2
            })
        ));
    }

    #[test]
    fn identity_mix_on_trine_has_equal_weights() {
        let v = sufficient_identity_mix(&trine()).unwrap();
        assert_eq!(v.decision, Decision::Antidistinguishable);
        let Some(Certificate::MixtureWeights(t)) = v.certificate else {
            panic!("missing weights");
        };
        for w in t {
            assert!((w - 2.0 / 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn identity_mix_refutes_qubit_sets() {
        let v = sufficient_identity_mix(&zero_plus_one()).unwrap();
        assert_eq!(v.decision, Decision::NotAntidistinguishable);
    }

    #[test]
    fn identity_mix_is_silent_on_trefoil() {
        // the projectors sum to I + (J − I)/2, which no positive weights fix
        let v = sufficient_identity_mix(&trefoil()).unwrap();
        assert_eq!(v.decision, Decision::Inconclusive);
    }

    #[test]
    fn identity_mix_on_orthonormal_basis() {
        let v = sufficient_identity_mix(&set(
            3,
            &[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]],
        ))
        .unwrap();
        assert_eq!(v.decision, Decision::Antidistinguishable);
    }

    #[test]
    fn identity_mix_handles_complex_qubits() {
        // θ = 2π/3 gives the trine up to phases
        let v = sufficient_identity_mix(
            &construct_qubit_family(2.0 * std::f64::consts::PI / 3.0).unwrap(),
        )
        .unwrap();
        assert_eq!(v.decision, Decision::Antidistinguishable);
        let v = sufficient_identity_mix(&construct_qubit_family(1.0).unwrap()).unwrap();
        assert_eq!(v.decision, Decision::NotAntidistinguishable);
    }

    #[test]
    fn overlap_threshold_values() {
        assert!((overlap_threshold(3) - 0.5).abs() < 1e-15);
        assert!((overlap_threshold(4) - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn overlap_threshold_examples() {
        let v = sufficient_overlap_threshold(&gram_of(&trefoil())).unwrap();
        assert_eq!(v.decision, Decision::Antidistinguishable);
        assert!(v.margin.abs() < 1e-12 && v.borderline);

        let v = sufficient_overlap_threshold(&gram_of(&zero_plus_one())).unwrap();
        assert_eq!(v.decision, Decision::Inconclusive);
    }

    #[test]
    fn overlap_floor_examples() {
        let v = necessary_overlap_floor(&Gram::equiangular_real(3, 0.6).unwrap()).unwrap();
        assert_eq!(v.decision, Decision::NotAntidistinguishable);
        assert!((v.margin - 0.1).abs() < 1e-12);
        let v = necessary_overlap_floor(&Gram::equiangular_real(3, 0.5).unwrap()).unwrap();
        assert_eq!(v.decision, Decision::Inconclusive);
    }

    #[test]
    fn equal_real_examples() {
        let at = |k, g| {
            equal_real_iff(&Gram::equiangular_real(k, g).unwrap())
                .unwrap()
                .unwrap()
        };
        assert_eq!(at(3, 0.5).decision, Decision::Antidistinguishable);
        assert!(at(3, 0.5).borderline);
        assert_eq!(at(3, 0.5 + 1e-6).decision, Decision::NotAntidistinguishable);
        assert_eq!(at(4, 2.0 / 3.0).decision, Decision::Antidistinguishable);
        assert_eq!(at(5, 0.8).decision, Decision::NotAntidistinguishable);
        assert_eq!(equal_real_iff(&gram_of(&zero_plus_one())).unwrap(), None);
    }

    #[test]
    fn equal_real_rejects_complex_pattern() {
        let w = Complex64::new(0.0, 0.3);
        let mut m = CMatrix::identity(3);
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            m[(i, j)] = w;
            m[(j, i)] = w.conj();
        }
        assert_eq!(equal_real_iff(&Gram::new(m).unwrap()).unwrap(), None);
    }

    #[test]
    fn three_state_examples() {
        let v = three_state_iff(&gram_of(&trefoil())).unwrap();
        assert_eq!(v.decision, Decision::Antidistinguishable);
        // Σx = 3/4, (Σx − 1)² − 4Πx = 1/16 − 1/16
        assert!(v.margin.abs() < 1e-12);

        let v = three_state_iff(&gram_of(&zero_plus_one())).unwrap();
        assert_eq!(v.decision, Decision::NotAntidistinguishable);

        let v = three_state_iff(&Gram::new(CMatrix::identity(3)).unwrap()).unwrap();
        assert_eq!(v.decision, Decision::Antidistinguishable);
        assert!((v.margin - 1.0).abs() < 1e-12);
    }

    #[test]
    fn three_state_needs_exactly_three() {
        let g = Gram::new(CMatrix::identity(4)).unwrap();
        assert!(matches!(
            three_state_iff(&g),
            Err(Error::WrongCardinality {
                expected: 3,
                got: 4
            })
        ));
    }
}
