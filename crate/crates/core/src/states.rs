//! Pure-state sets, their Gram matrices, and the state families used to
//! probe many-copy exclusion.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, psd_factor, CMatrix, HERMITIAN_TOL};

/// Allowed deviation of a state norm (or Gram diagonal) from 1.
pub const NORM_TOL: f64 = 1e-10;
/// Smallest eigenvalue a Gram matrix may have.
pub const GRAM_PSD_TOL: f64 = 1e-8;
/// Maximum deviation between a constructed Gram and its target.
pub const CONSTRUCTION_TOL: f64 = 1e-9;

/// Ordered list of unit vectors in a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSet {
    dim: usize,
    states: Vec<Vec<Complex64>>,
}

impl StateSet {
    /// Validates that every vector has length `dim` and unit norm.
    pub fn new(dim: usize, states: Vec<Vec<Complex64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch(
                "dimension must be positive".into(),
            ));
        }
        if states.is_empty() {
            return Err(Error::TooFewStates {
                required: 1,
                got: 0,
            });
        }
        for (index, s) in states.iter().enumerate() {
            if s.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "state {index} has {} amplitudes, expected {dim}",
                    s.len()
                )));
            }
            let norm = vector_norm(s);
            if (norm - 1.0).abs() > NORM_TOL {
                return Err(Error::InvalidState { index, norm });
            }
        }
        Ok(Self { dim, states })
    }

    /// Normalizes each vector first; zero vectors are rejected.
    pub fn normalized(dim: usize, states: Vec<Vec<Complex64>>) -> Result<Self> {
        let mut out = Vec::with_capacity(states.len());
        for (index, s) in states.into_iter().enumerate() {
            let norm = vector_norm(&s);
            if norm == 0.0 || !norm.is_finite() {
                return Err(Error::InvalidState { index, norm });
            }
            out.push(s.into_iter().map(|z| z / norm).collect());
        }
        Self::new(dim, out)
    }

    /// Convenience for real amplitudes, normalized.
    pub fn from_real(dim: usize, states: &[&[f64]]) -> Result<Self> {
        Self::normalized(
            dim,
            states
                .iter()
                .map(|s| s.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Vec<Complex64>] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &[Complex64] {
        &self.states[i]
    }

    /// d×k matrix with the states as columns.
    pub fn as_columns(&self) -> CMatrix {
        CMatrix::from_fn(self.dim, self.len(), |r, c| self.states[c][r])
    }
}

fn vector_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Hermitian PSD matrix with unit diagonal: G_ij = ⟨ψ_i|ψ_j⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct Gram {
    matrix: CMatrix,
}

impl Gram {
    /// Validates Hermiticity, unit diagonal and positive semidefiniteness.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(Error::InvalidGram(
                "matrix must be square and nonempty".into(),
            ));
        }
        let dev = matrix.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::InvalidGram(format!(
                "not Hermitian (deviation {dev:.3e})"
            )));
        }
        for i in 0..matrix.rows() {
            let d = matrix[(i, i)];
            if (d.re - 1.0).abs() > NORM_TOL || d.im.abs() > NORM_TOL {
                return Err(Error::InvalidGram(format!("diagonal entry {i} is {d}")));
            }
        }
        let min = hermitian_eig(&matrix)?.min();
        if min < -GRAM_PSD_TOL {
            return Err(Error::InvalidGram(format!(
                "not PSD (smallest eigenvalue {min:.3e})"
            )));
        }
        Ok(Self { matrix })
    }

    /// Equal-real Gram (1 − γ)I + γJ.
    pub fn equiangular_real(k: usize, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self {
            matrix: equiangular_target(k, gamma),
        })
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    /// Off-diagonal pairs (i < j).
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> {
        let k = self.size();
        (0..k).flat_map(move |i| ((i + 1)..k).map(move |j| (i, j)))
    }

    /// |G_ij| over i < j, in row order.
    pub fn overlaps(&self) -> Vec<f64> {
        self.pairs().map(|(i, j)| self.entry(i, j).norm()).collect()
    }
}

/// Number of identical copies handed to the measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CopySpec(u32);

impl CopySpec {
    pub const ONE: CopySpec = CopySpec(1);

    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidCopies);
        }
        Ok(Self(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

/// Gram matrix of a state set.
pub fn gram_of(set: &StateSet) -> Gram {
    let k = set.len();
    let mut m = CMatrix::zeros(k, k);
    for i in 0..k {
        m[(i, i)] = Complex64::new(1.0, 0.0);
        for j in (i + 1)..k {
            let g = inner(set.state(i), set.state(j));
            m[(i, j)] = g;
            m[(j, i)] = g.conj();
        }
    }
    Gram { matrix: m }
}

/// Gram matrix of the N-copy set: the entrywise N-th power of G.
pub fn hadamard_power(g: &Gram, copies: CopySpec) -> Gram {
    let n = copies.get();
    if n == 1 {
        return g.clone();
    }
    let k = g.size();
    let mut m = CMatrix::zeros(k, k);
    for i in 0..k {
        m[(i, i)] = Complex64::new(1.0, 0.0);
        for j in (i + 1)..k {
            let p = complex_powu(g.entry(i, j), n);
            m[(i, j)] = p;
            m[(j, i)] = p.conj();
        }
    }
    Gram { matrix: m }
}

fn complex_powu(z: Complex64, mut n: u32) -> Complex64 {
    let mut base = z;
    let mut acc = Complex64::new(1.0, 0.0);
    while n > 0 {
        if n & 1 == 1 {
            acc *= base;
        }
        base *= base;
        n >>= 1;
    }
    acc
}

/// Largest off-diagonal overlap c = max_{i≠j} |G_ij|.
pub fn max_overlap(g: &Gram) -> Result<f64> {
    require_states(g, 2)?;
    Ok(g.overlaps().into_iter().fold(0.0, f64::max))
}

/// Smallest off-diagonal overlap.
pub fn min_overlap(g: &Gram) -> Result<f64> {
    require_states(g, 2)?;
    Ok(g.overlaps().into_iter().fold(f64::INFINITY, f64::min))
}

pub(crate) fn require_states(g: &Gram, required: usize) -> Result<()> {
    if g.size() < required {
        return Err(Error::TooFewStates {
            required,
            got: g.size(),
        });
    }
    Ok(())
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::InvalidGamma(gamma));
    }
    Ok(())
}

fn equiangular_target(k: usize, gamma: f64) -> CMatrix {
    CMatrix::from_fn(k, k, |r, c| {
        Complex64::new(if r == c { 1.0 } else { gamma }, 0.0)
    })
}

/// k states in dimension k with all pairwise inner products equal to γ.
pub fn construct_equiangular_real(k: usize, gamma: f64) -> Result<StateSet> {
    if k < 2 {
        return Err(Error::TooFewStates {
            required: 2,
            got: k,
        });
    }
    check_gamma(gamma)?;
    let target = equiangular_target(k, gamma);
    let b = psd_factor(&target)?;
    let columns: Vec<Vec<Complex64>> = (0..k).map(|c| b.column(c)).collect();
    let set = StateSet::normalized(k, columns)?;
    let err = (gram_of(&set).matrix() - &target).frobenius_norm();
    debug_assert!(
        err <= CONSTRUCTION_TOL,
        "equiangular construction error {err}"
    );
    Ok(set)
}

/// States in dimension k whose Gram matrix is G (the columns of a PSD factor).
pub fn realize_gram(g: &Gram) -> Result<StateSet> {
    let b = psd_factor(g.matrix())?;
    let k = g.size();
    StateSet::normalized(k, (0..k).map(|c| b.column(c)).collect())
}

pub const QUBIT_FAMILY_MAX_THETA: f64 = 2.0 * PI / 3.0;

/// Relative phase φ = arccos(cos θ / (1 + cos θ)) of the equal-overlap qubit triple.
pub fn qubit_family_phase(theta: f64) -> f64 {
    // arccos has unbounded slope at −1: the rounded endpoint would land ~1e-8 short of π.
    if theta >= QUBIT_FAMILY_MAX_THETA - 1e-12 {
        return PI;
    }
    let c = theta.cos();
    (c / (1.0 + c)).clamp(-1.0, 1.0).acos()
}

/// {|0⟩, cos(θ/2)|0⟩ + sin(θ/2)|1⟩, cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩}.
///
/// All three pairwise squared overlaps equal cos²(θ/2) for θ ∈ [0, 2π/3].
pub fn construct_qubit_family(theta: f64) -> Result<StateSet> {
    if !(0.0..=QUBIT_FAMILY_MAX_THETA + 1e-12).contains(&theta) || theta.is_nan() {
        return Err(Error::OutOfRange {
            name: "theta",
            value: theta,
            range: "[0, 2π/3]",
        });
    }
    let theta = theta.min(QUBIT_FAMILY_MAX_THETA);
    let (s, c) = (theta / 2.0).sin_cos();
    let phi = qubit_family_phase(theta);
    let zero = Complex64::new(0.0, 0.0);
    StateSet::new(
        2,
        vec![
            vec![Complex64::new(1.0, 0.0), zero],
            vec![Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
            vec![Complex64::new(c, 0.0), Complex64::from_polar(s, phi)],
        ],
    )
}

/// (k − 2)/(k − 1), the equal-real exclusion threshold.
pub fn equal_real_threshold(k: usize) -> f64 {
    (k as f64 - 2.0) / (k as f64 - 1.0)
}

fn check_family_args(k: usize, n: u32) -> Result<()> {
    if k < 3 {
        return Err(Error::TooFewStates {
            required: 3,
            got: k,
        });
    }
    if n == 0 {
        return Err(Error::InvalidCopies);
    }
    Ok(())
}

/// γ = (1 + a)/2 with a = ((k−2)/(k−1))^{1/N}.
pub fn floor_family_gamma(k: usize, n: u32) -> Result<f64> {
    check_family_args(k, n)?;
    let a = equal_real_threshold(k).powf(1.0 / n as f64);
    Ok((1.0 + a) / 2.0)
}

/// γ = ((k−2)/(k−1))^{(2N+1)/(2N(N+1))}.
pub fn step_family_gamma(k: usize, n: u32) -> Result<f64> {
    check_family_args(k, n)?;
    let n = n as f64;
    Ok(equal_real_threshold(k).powf((2.0 * n + 1.0) / (2.0 * n * (n + 1.0))))
}

/// Equal-real set that stays non-excludable for every copy count up to N.
pub fn construct_floor_family(k: usize, n: u32) -> Result<StateSet> {
    construct_equiangular_real(k, floor_family_gamma(k, n)?)
}

/// Equal-real set that first becomes excludable at exactly N + 1 copies.
pub fn construct_step_family(k: usize, n: u32) -> Result<StateSet> {
    construct_equiangular_real(k, step_family_gamma(k, n)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn zero_plus_one() -> StateSet {
        StateSet::from_real(2, &[&[1.0, 0.0], &[1.0, 1.0], &[0.0, 1.0]]).unwrap()
    }

    fn trefoil() -> StateSet {
        StateSet::from_real(3, &[&[1.0, 1.0, 0.0], &[0.0, 1.0, 1.0], &[1.0, 0.0, 1.0]]).unwrap()
    }

    #[test]
    fn orthogonal_pair_gram_is_identity() {
        let set = StateSet::from_real(2, &[&[1.0, 0.0], &[0.0, 1.0]]).unwrap();
        assert_eq!(gram_of(&set).matrix(), &CMatrix::identity(2));
    }

    #[test]
    fn zero_plus_one_gram() {
        let ov = gram_of(&zero_plus_one()).overlaps();
        assert!((ov[0] - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(ov[1].abs() < 1e-15);
        assert!((ov[2] - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn trefoil_gram_halves() {
        let g = gram_of(&trefoil());
        for (i, j) in g.pairs() {
            assert!((g.entry(i, j).re - 0.5).abs() < 1e-15);
        }
        assert!(Gram::new(g.matrix().clone()).is_ok());
    }

    #[test]
    fn rejects_non_unit_vectors() {
        let err = StateSet::new(
            2,
            vec![vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]],
        );
        assert!(matches!(err, Err(Error::InvalidState { index: 0, .. })));
    }

    #[test]
    fn gram_validation() {
        let bad_diag = CMatrix::diagonal(&[1.0, 0.5]);
        assert!(Gram::new(bad_diag).is_err());
        let indefinite = CMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 1.0]).unwrap();
        assert!(Gram::new(indefinite).is_err());
    }

    #[test]
    fn hadamard_power_examples() {
        let g = gram_of(&zero_plus_one());
        assert_eq!(hadamard_power(&g, CopySpec::ONE), g);
        let g2 = hadamard_power(&g, CopySpec::new(2).unwrap());
        let ov = g2.overlaps();
        assert!((ov[0] - 0.5).abs() < 1e-15 && ov[1] == 0.0 && (ov[2] - 0.5).abs() < 1e-15);

        let eq = Gram::equiangular_real(3, 0.9).unwrap();
        let g7 = hadamard_power(&eq, CopySpec::new(7).unwrap());
        assert!((g7.entry(0, 1).re - 0.9_f64.powi(7)).abs() < 1e-15);
        assert!((g7.entry(0, 1).re - 0.4783).abs() < 1e-4);
    }

    #[test]
    fn zero_copies_rejected() {
        assert_eq!(CopySpec::new(0), Err(Error::InvalidCopies));
    }

    #[test]
    fn max_overlap_examples() {
        let id = Gram::new(CMatrix::identity(3)).unwrap();
        assert_eq!(max_overlap(&id).unwrap(), 0.0);
        assert!((max_overlap(&gram_of(&zero_plus_one())).unwrap() - FRAC_1_SQRT_2).abs() < 1e-15);
        let dup = StateSet::from_real(2, &[&[1.0, 0.0], &[1.0, 0.0]]).unwrap();
        assert_eq!(max_overlap(&gram_of(&dup)).unwrap(), 1.0);
        let single = Gram::new(CMatrix::identity(1)).unwrap();
        assert!(matches!(
            max_overlap(&single),
            Err(Error::TooFewStates { .. })
        ));
    }

    #[test]
    fn equiangular_examples() {
        let set = construct_equiangular_real(3, 0.0).unwrap();
        assert!((gram_of(&set).matrix() - &CMatrix::identity(3)).frobenius_norm() < 1e-12);

        let set = construct_equiangular_real(3, 0.5).unwrap();
        let g = gram_of(&set);
        for (i, j) in g.pairs() {
            assert!((g.entry(i, j) - Complex64::new(0.5, 0.0)).norm() < 1e-9);
        }
        let eig = hermitian_eig(g.matrix()).unwrap();
        for (got, want) in eig.values.iter().zip([0.5, 0.5, 2.0]) {
            assert!((got - want).abs() < 1e-9);
        }

        let set = construct_equiangular_real(4, 2.0 / 3.0).unwrap();
        let g = gram_of(&set);
        assert!((g.entry(1, 3).re - equal_real_threshold(4)).abs() < 1e-9);
        assert_eq!(set.dim(), 4);
    }

    #[test]
    fn equiangular_rejects_bad_gamma() {
        assert_eq!(
            construct_equiangular_real(3, 1.0),
            Err(Error::InvalidGamma(1.0))
        );
        assert!(construct_equiangular_real(3, -0.1).is_err());
    }

    #[test]
    fn qubit_family_endpoints() {
        let x = |set: &StateSet| {
            gram_of(set)
                .overlaps()
                .iter()
                .map(|o| o * o)
                .collect::<Vec<_>>()
        };
        for v in x(&construct_qubit_family(QUBIT_FAMILY_MAX_THETA).unwrap()) {
            assert!((v - 0.25).abs() < 1e-12);
        }
        for v in x(&construct_qubit_family(PI / 2.0).unwrap()) {
            assert!((v - 0.5).abs() < 1e-12);
        }
        for v in x(&construct_qubit_family(0.0).unwrap()) {
            assert!((v - 1.0).abs() < 1e-12);
        }
        assert!(construct_qubit_family(2.2).is_err());
        assert!(construct_qubit_family(-0.1).is_err());
    }

    #[test]
    fn floor_family_gammas() {
        assert!((floor_family_gamma(3, 1).unwrap() - 0.75).abs() < 1e-15);
        let g = floor_family_gamma(3, 2).unwrap();
        assert!((g - (1.0 + 0.5_f64.sqrt()) / 2.0).abs() < 1e-15);
        assert!((g - 0.85355).abs() < 1e-5);
        assert!((g * g - 0.72855).abs() < 1e-5);
        assert!((floor_family_gamma(4, 1).unwrap() - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn step_family_gammas() {
        let g = step_family_gamma(3, 1).unwrap();
        assert!((g - 0.59460).abs() < 1e-5);
        assert!((g * g - 0.35355).abs() < 1e-5);
        let g = step_family_gamma(3, 2).unwrap();
        assert!((g - 0.74915).abs() < 1e-5);
        assert!((g.powi(2) - 0.56123).abs() < 1e-5);
        assert!((g.powi(3) - 0.42045).abs() < 1e-5);
        let g = step_family_gamma(4, 1).unwrap();
        assert!((g - 0.737788).abs() < 1e-6);
        assert!((g * g - 0.544331).abs() < 1e-6);
        assert!(g > 2.0 / 3.0 && g * g < 2.0 / 3.0);
        assert!(step_family_gamma(2, 1).is_err());
    }
}
