//! Hermitian eigendecomposition by cyclic complex Jacobi rotations, and the
//! PSD helpers built on it.

use num_complex::Complex64;

use super::matrix::{CMatrix, HERMITIAN_TOL};
use crate::error::{Error, Result};

/// Sweeps stop once the off-diagonal Frobenius norm falls below this fraction of ‖M‖_F.
pub const JACOBI_REL_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues below this are clipped to zero by [`psd_factor`].
pub const PSD_CLIP_TOL: f64 = 1e-10;
/// Eigenvalues below this make [`psd_factor`] fail.
pub const PSD_REJECT_TOL: f64 = 1e-8;

/// Ascending eigenvalues with the matching unitary eigenvector matrix (columns).
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigen {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// V f(Λ) V†.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        let weights: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let mut out = CMatrix::zeros(n, n);
        for (j, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for r in 0..n {
                let vr = v[(r, j)] * w;
                for c in r..n {
                    out[(r, c)] += vr * v[(c, j)].conj();
                }
            }
        }
        for r in 0..n {
            out[(r, r)].im = 0.0;
            for c in (r + 1)..n {
                out[(c, r)] = out[(r, c)].conj();
            }
        }
        out
    }
}

fn check_hermitian(m: &CMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let deviation = m.hermitian_deviation();
    if deviation > HERMITIAN_TOL * (1.0 + m.frobenius_norm()) {
        return Err(Error::NonHermitianInput { deviation });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrized before rotating, so roundoff-level asymmetry is
/// absorbed. Eigenvalues come back in ascending order.
pub fn hermitian_eig(m: &CMatrix) -> Result<Eigen> {
    check_hermitian(m)?;
    Ok(jacobi(m.hermitian_part()))
}

fn off_norm_sqr(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for r in 0..n {
        for c in (r + 1)..n {
            s += a[(r, c)].norm_sqr();
        }
    }
    2.0 * s
}

fn jacobi(mut a: CMatrix) -> Eigen {
    let n = a.rows();
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius_norm();
    let target = (JACOBI_REL_TOL * scale).powi(2);

    if scale > 0.0 {
        for _ in 0..MAX_SWEEPS {
            if off_norm_sqr(&a) <= target {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Eigen { values, vectors }
}

/// One complex Jacobi rotation zeroing a[p][q]: A ← J† A J, V ← V J with
/// J = diag(1, e^{-iφ}) · [[c, s], [−s, c]] on the (p, q) plane.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let magnitude = apq.norm();
    if magnitude == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Negligible against both diagonal entries: skip, the sweep test handles it.
    if magnitude < 1e-300
        || (app.abs() + magnitude == app.abs() && aqq.abs() + magnitude == aqq.abs())
    {
        a[(p, q)] = Complex64::new(0.0, 0.0);
        a[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    let phase = apq / magnitude;
    let tau = (aqq - app) / (2.0 * magnitude);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // J_pp = c, J_pq = s, J_qp = −s·conj(phase), J_qq = c·conj(phase)
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;
    let n = a.rows();

    for r in 0..n {
        let arp = a[(r, p)];
        let arq = a[(r, q)];
        a[(r, p)] = arp * c + arq * jqp;
        a[(r, q)] = arp * s + arq * jqq;
    }
    for col in 0..n {
        let xp = a[(p, col)];
        let xq = a[(q, col)];
        a[(p, col)] = xp * c + xq * jqp.conj();
        a[(q, col)] = xp * s + xq * jqq.conj();
    }
    for r in 0..n {
        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = vrp * c + vrq * jqp;
        v[(r, q)] = vrp * s + vrq * jqq;
    }

    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(app - t * magnitude, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * magnitude, 0.0);
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &CMatrix) -> Result<f64> {
    if m.rows() == 0 {
        return Ok(0.0);
    }
    Ok(hermitian_eig(m)?.min())
}

/// Frobenius-nearest PSD matrix: negative eigenvalues clipped to zero.
pub fn psd_project(m: &CMatrix) -> Result<CMatrix> {
    check_hermitian(m)?;
    let sym = m.hermitian_part();
    let eig = jacobi(sym.clone());
    if eig.min() >= 0.0 {
        return Ok(sym);
    }
    Ok(eig.reconstruct_with(|l| l.max(0.0)))
}

/// Returns B with B†B = G for a PSD matrix G.
///
/// Eigenvalues in [−1e−8, 0) are treated as zero; anything lower is rejected.
/// B is square, so the columns of B realize G as a Gram matrix.
pub fn psd_factor(g: &CMatrix) -> Result<CMatrix> {
    let eig = hermitian_eig(g)?;
    if eig.min() < -PSD_REJECT_TOL {
        return Err(Error::NotPsd {
            min_eigenvalue: eig.min(),
        });
    }
    let n = g.rows();
    let roots: Vec<f64> = eig
        .values
        .iter()
        .map(|&l| if l <= PSD_CLIP_TOL { 0.0 } else { l.sqrt() })
        .collect();
    // B = Λ^{1/2} V†
    Ok(CMatrix::from_fn(n, n, |r, c| {
        eig.vectors[(c, r)].conj() * roots[r]
    }))
}

/// Moore–Penrose pseudoinverse via the eigendecomposition of A†A.
///
/// Singular values below `rcond · σ_max` are treated as zero.
pub fn pseudo_inverse(a: &CMatrix, rcond: f64) -> Result<CMatrix> {
    let ata = &a.adjoint() * a;
    let eig = hermitian_eig(&ata)?;
    let cutoff = (rcond * eig.max().max(0.0).sqrt()).powi(2);
    let inv = eig.reconstruct_with(|l| if l > cutoff && l > 0.0 { 1.0 / l } else { 0.0 });
    Ok(&inv * &a.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn real(rows: usize, data: &[f64]) -> CMatrix {
        CMatrix::from_real(rows, data.len() / rows, data).unwrap()
    }

    fn residual(m: &CMatrix, eig: &Eigen) -> f64 {
        let lam = CMatrix::diagonal(&eig.values);
        let lhs = m * &eig.vectors;
        let rhs = &eig.vectors * &lam;
        (&lhs - &rhs).frobenius_norm()
    }

    #[test]
    fn identity_eigenvalues() {
        let eig = hermitian_eig(&CMatrix::identity(2)).unwrap();
        assert_eq!(eig.values, vec![1.0, 1.0]);
    }

    #[test]
    fn diagonal_is_sorted() {
        let eig = hermitian_eig(&CMatrix::diagonal(&[2.0, -1.0])).unwrap();
        assert_eq!(eig.values, vec![-1.0, 2.0]);
    }

    #[test]
    fn two_by_two_characteristic_roots() {
        let m = real(2, &[1.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2, 1.0]);
        let eig = hermitian_eig(&m).unwrap();
        // roots of λ² − 2λ + 1/2
        assert!((eig.values[0] - (1.0 - FRAC_1_SQRT_2)).abs() < 1e-14);
        assert!((eig.values[1] - (1.0 + FRAC_1_SQRT_2)).abs() < 1e-14);
        assert!((eig.values[0] - 0.29289).abs() < 1e-5);
        assert!(residual(&m, &eig) <= 1e-10 * m.frobenius_norm());
    }

    #[test]
    fn complex_entries() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let m = CMatrix::from_vec(2, 2, vec![one * 2.0, i, -i, one * 2.0]).unwrap();
        let eig = hermitian_eig(&m).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-14);
        assert!((eig.values[1] - 3.0).abs() < 1e-14);
        assert!(residual(&m, &eig) < 1e-13);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = real(2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(
            hermitian_eig(&m),
            Err(Error::NonHermitianInput { .. })
        ));
    }

    #[test]
    fn project_clips_negative_eigenvalue() {
        let p = psd_project(&CMatrix::diagonal(&[-1.0, 2.0])).unwrap();
        assert_eq!(p, CMatrix::diagonal(&[0.0, 2.0]));

        let swap = real(2, &[0.0, 1.0, 1.0, 0.0]);
        let p = psd_project(&swap).unwrap();
        let expected = real(2, &[0.5, 0.5, 0.5, 0.5]);
        assert!((&p - &expected).frobenius_norm() < 1e-14);
    }

    #[test]
    fn project_fixed_point_on_psd_input() {
        let m = real(2, &[2.0, 1.0, 1.0, 2.0]);
        assert_eq!(psd_project(&m).unwrap(), m);
    }

    #[test]
    fn factor_examples() {
        for g in [
            CMatrix::identity(3),
            CMatrix::diagonal(&[4.0, 0.0]),
            real(3, &[1.0, 0.5, 0.5, 0.5, 1.0, 0.5, 0.5, 0.5, 1.0]),
        ] {
            let b = psd_factor(&g).unwrap();
            assert_eq!(b.cols(), g.cols());
            let err = (&(&b.adjoint() * &b) - &g).frobenius_norm();
            assert!(err <= 1e-9 * g.frobenius_norm().max(1.0), "err {err}");
        }
    }

    #[test]
    fn factor_rejects_indefinite() {
        assert!(matches!(
            psd_factor(&CMatrix::diagonal(&[1.0, -1e-6])),
            Err(Error::NotPsd { .. })
        ));
        // tiny negative eigenvalues are clipped
        assert!(psd_factor(&CMatrix::diagonal(&[1.0, -1e-11])).is_ok());
    }

    #[test]
    fn pseudo_inverse_of_rank_deficient() {
        // columns (1,0) and (1,0): rank one
        let a = real(2, &[1.0, 1.0, 0.0, 0.0]);
        let pinv = pseudo_inverse(&a, 1e-12).unwrap();
        let apa = &(&a * &pinv) * &a;
        assert!((&apa - &a).frobenius_norm() < 1e-12);
        assert!((pinv[(0, 0)].re - 0.5).abs() < 1e-12);
    }
}
