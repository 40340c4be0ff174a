//! Exact antidistinguishability test on the Gram matrix.
//!
//! A pure-state set is antidistinguishable iff its Gram matrix G splits as
//! G = F_1 + … + F_k with every F_i PSD and ⟨i|F_i|i⟩ = 0. Writing K_i for the
//! PSD matrices whose row and column i vanish, the question is whether G lies
//! in the cone S = K_1 + … + K_k.
//!
//! [`project_onto_cone_sum`] runs Dykstra's algorithm between the block
//! product K_1 × … × K_k and the affine set {ΣF_i = G}. At a feasible G the
//! residual goes to zero; otherwise ΣF_i converges to the Frobenius projection
//! P of G onto S and −(G − P) is a dual witness: every delete-one principal
//! submatrix is PSD while ⟨−(G − P), G⟩ < 0.
//!
//! Dykstra converges slowly where S meets G tangentially (sets on the exclusion
//! boundary), so [`decide_incoherent`] also refines the iterate with a
//! Gauss–Newton step on factored blocks F_i = B_i B_i†. Whatever produced a
//! decomposition or witness, the verdict is only issued after
//! [`verify_decomposition`] or [`verify_certificate`] accepts it.
//!
//! Exclusion also needs every outcome to fire for some state, which for a
//! splitting means Tr F_i > 0 for all i. Some G on the boundary of S split
//! only with a vanishing block ({|0⟩, |+⟩, |1⟩} forces F_2 = 0). When the
//! first splitting found has a near-empty block, a second search imposes a
//! trace floor on every block; if that fails too the verdict is inconclusive,
//! since no strict witness exists for such limit points.

use std::fmt;

use num_complex::Complex64;

use crate::criteria::{Certificate, Decision, Verdict};
use crate::error::Result;
use crate::numerics::{hermitian_eig, min_eigenvalue, psd_factor, psd_project, solve_spd, CMatrix};
use crate::states::{require_states, Gram};

pub const CRITERION_NAME: &str = "incoherence_sdp";

/// Residual at or below which a decomposition is accepted.
pub const FEASIBLE_GAP: f64 = 1e-8;
/// Gap at or above which a separating witness is sought.
pub const INFEASIBLE_GAP: f64 = 1e-6;

const BLOCK_PSD_TOL: f64 = 1e-8;
const ZERO_PATTERN_TOL: f64 = 1e-8;
const SUM_RESIDUAL_TOL: f64 = 1e-7;
const VERIFY_HERMITIAN_TOL: f64 = 1e-10;
const SEPARATION_TOL: f64 = 1e-8;
/// Smallest block trace accepted in an antidistinguishable verdict.
pub const RELEVANCE_TOL: f64 = 1e-5;
/// Per-block trace floor of the second search.
const TRACE_FLOOR: f64 = 1e-3;

/// Blocks F_1..F_k of a (k−1)-incoherent splitting of G.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub blocks: Vec<CMatrix>,
    /// ‖G − ΣF_i‖_F
    pub residual: f64,
}

impl Decomposition {
    pub fn sum(&self) -> CMatrix {
        let k = self.blocks.first().map_or(0, CMatrix::rows);
        let mut total = CMatrix::zeros(k, k);
        for b in &self.blocks {
            total += b;
        }
        total
    }

    /// min_i Tr F_i, the total outcome weight of the least used block.
    pub fn min_trace(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.trace().re)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Hermitian H with PSD delete-one principal submatrices and ⟨H, G⟩ < 0.
#[derive(Debug, Clone, PartialEq)]
pub struct InfeasibilityCertificate {
    pub witness: CMatrix,
    /// −⟨H, G⟩
    pub violation: f64,
}

/// Why a decomposition or witness was rejected.
#[derive(Debug, Clone, PartialEq)]
pub enum VerifyFailure {
    SizeMismatch(String),
    NotHermitian { block: usize, deviation: f64 },
    ZeroPattern { block: usize, norm: f64 },
    BlockNotPsd { block: usize, min_eigenvalue: f64 },
    SumResidual { residual: f64 },
    SubmatrixNotPsd { index: usize, min_eigenvalue: f64 },
    Separation { value: f64, bound: f64 },
}

impl VerifyFailure {
    /// Short machine-readable reason.
    pub fn reason(&self) -> &'static str {
        match self {
            VerifyFailure::SizeMismatch(_) => "size",
            VerifyFailure::NotHermitian { .. } => "hermitian",
            VerifyFailure::ZeroPattern { .. } => "zero-pattern",
            VerifyFailure::BlockNotPsd { .. } => "block-psd",
            VerifyFailure::SumResidual { .. } => "sum-residual",
            VerifyFailure::SubmatrixNotPsd { .. } => "submatrix-psd",
            VerifyFailure::Separation { .. } => "separation",
        }
    }
}

impl fmt::Display for VerifyFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyFailure::SizeMismatch(s) => write!(f, "size mismatch: {s}"),
            VerifyFailure::NotHermitian { block, deviation } => {
                write!(f, "block {block} not Hermitian (deviation {deviation:.3e})")
            }
            VerifyFailure::ZeroPattern { block, norm } => {
                write!(f, "block {block} has row/column {block} of norm {norm:.3e}")
            }
            VerifyFailure::BlockNotPsd {
                block,
                min_eigenvalue,
            } => write!(f, "block {block} has eigenvalue {min_eigenvalue:.3e}"),
            VerifyFailure::SumResidual { residual } => {
                write!(f, "blocks miss the Gram matrix by {residual:.3e}")
            }
            VerifyFailure::SubmatrixNotPsd {
                index,
                min_eigenvalue,
            } => write!(
                f,
                "submatrix without index {index} has eigenvalue {min_eigenvalue:.3e}"
            ),
            VerifyFailure::Separation { value, bound } => {
                write!(f, "<H, G> = {value:.3e} exceeds {bound:.3e}")
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ProjectionOptions {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for ProjectionOptions {
    fn default() -> Self {
        Self {
            max_iter: 50_000,
            tol: 1e-10,
        }
    }
}

/// Outcome of [`project_onto_cone_sum`].
#[derive(Debug, Clone)]
pub struct Projection {
    /// ΣF_i, the projection of G onto the cone sum.
    pub point: CMatrix,
    pub decomposition: Decomposition,
    /// ‖G − P‖_F
    pub gap: f64,
    /// False when the iteration budget ran out first.
    pub converged: bool,
    pub iterations: usize,
}

/// Dykstra iteration on the block product.
struct ConeSumDykstra {
    gram: CMatrix,
    k: usize,
    floor: f64,
    affine: Vec<CMatrix>,
    cone: Vec<CMatrix>,
    correction: Vec<CMatrix>,
    point: CMatrix,
    gap: f64,
    last_step: f64,
    iterations: usize,
}

fn others(i: usize, k: usize) -> Vec<usize> {
    (0..k).filter(|&j| j != i).collect()
}

/// Projection onto K_i, or onto {F ∈ K_i : Tr F ≥ floor} when floor > 0.
fn project_block(z: &CMatrix, i: usize, floor: f64) -> CMatrix {
    let k = z.rows();
    let idx = others(i, k);
    let compressed = z.principal_submatrix(&idx).hermitian_part();
    let projected = if floor > 0.0 {
        let eig = hermitian_eig(&compressed).expect("compressed block is Hermitian");
        let shift = trace_floor_shift(&eig.values, floor);
        eig.reconstruct_with(|l| (l + shift).max(0.0))
    } else {
        psd_project(&compressed).expect("compressed block is Hermitian")
    };
    CMatrix::embed(&projected, &idx, k)
}

/// Smallest θ ≥ 0 with Σ max(μ_j + θ, 0) ≥ floor; the spectral projection onto
/// {λ ≥ 0, Σλ ≥ floor} is λ_j = max(μ_j + θ, 0).
fn trace_floor_shift(values: &[f64], floor: f64) -> f64 {
    let clipped: f64 = values.iter().map(|v| v.max(0.0)).sum();
    if clipped >= floor {
        return 0.0;
    }
    // With the top m eigenvalues active: m·θ + Σ_top μ = floor.
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut partial = 0.0;
    for (m, &mu) in sorted.iter().enumerate() {
        partial += mu;
        let theta = (floor - partial) / (m + 1) as f64;
        let next = sorted.get(m + 1).copied().unwrap_or(f64::NEG_INFINITY);
        if mu + theta >= 0.0 && next + theta <= 0.0 {
            return theta;
        }
    }
    (floor - partial) / sorted.len() as f64
}

impl ConeSumDykstra {
    fn new(g: &Gram, floor: f64) -> Self {
        let gram = g.matrix().clone();
        let k = gram.rows();
        // Each off-diagonal entry may sit in k−2 blocks, each diagonal entry in k−1.
        let start = |i: usize| {
            let spread = CMatrix::from_fn(k, k, |r, c| {
                if r == i || c == i {
                    Complex64::new(0.0, 0.0)
                } else if r == c {
                    gram[(r, c)] / (k as f64 - 1.0)
                } else {
                    gram[(r, c)] / (k as f64 - 2.0)
                }
            });
            project_block(&spread, i, floor)
        };
        let cone: Vec<CMatrix> = (0..k).map(start).collect();
        let mut point = CMatrix::zeros(k, k);
        for b in &cone {
            point += b;
        }
        let gap = (&gram - &point).frobenius_norm();
        Self {
            affine: cone.clone(),
            correction: vec![CMatrix::zeros(k, k); k],
            cone,
            point,
            gap,
            last_step: f64::INFINITY,
            iterations: 0,
            gram,
            k,
            floor,
        }
    }

    fn step(&mut self) {
        let k = self.k;
        for i in 0..k {
            let z = &self.affine[i] + &self.correction[i];
            let y = project_block(&z, i, self.floor);
            self.correction[i] = &z - &y;
            self.cone[i] = y;
        }
        let mut point = CMatrix::zeros(k, k);
        for b in &self.cone {
            point += b;
        }
        let residual = &self.gram - &point;
        let share = residual.scale(1.0 / k as f64);
        for i in 0..k {
            self.affine[i] = &self.cone[i] + &share;
        }
        self.last_step = (&point - &self.point).frobenius_norm();
        self.gap = residual.frobenius_norm();
        self.point = point;
        self.iterations += 1;
    }

    /// Per-iteration movement of P has stopped relative to ‖G‖.
    fn stalled(&self, tol: f64) -> bool {
        self.iterations > 10 && self.last_step <= tol * self.gram.frobenius_norm().max(1.0)
    }

    fn decomposition(&self) -> Decomposition {
        Decomposition {
            blocks: self.cone.clone(),
            residual: self.gap,
        }
    }

    fn into_projection(self, converged: bool) -> Projection {
        let decomposition = self.decomposition();
        Projection {
            point: self.point,
            decomposition,
            gap: self.gap,
            converged,
            iterations: self.iterations,
        }
    }
}

/// Frobenius projection of G onto K_1 + … + K_k by Dykstra's algorithm.
///
/// Stops when ‖G − P‖ ≤ tol, when P stops moving (an infeasible G has reached
/// its projection), or after `max_iter` iterations with `converged = false`.
pub fn project_onto_cone_sum(g: &Gram, opts: &ProjectionOptions) -> Result<Projection> {
    require_states(g, 3)?;
    let mut solver = ConeSumDykstra::new(g, 0.0);
    let max_iter = opts.max_iter.max(1);
    while solver.iterations < max_iter {
        solver.step();
        if solver.gap <= opts.tol || solver.stalled(opts.tol * 1e-2) {
            return Ok(solver.into_projection(true));
        }
    }
    Ok(solver.into_projection(false))
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub projection: ProjectionOptions,
    pub feasible_gap: f64,
    pub infeasible_gap: f64,
    /// Iterations between certificate / refinement attempts.
    pub check_every: usize,
    /// Gauss–Newton refinement of near-feasible iterates.
    pub refine: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            projection: ProjectionOptions::default(),
            feasible_gap: FEASIBLE_GAP,
            infeasible_gap: INFEASIBLE_GAP,
            check_every: 50,
            refine: true,
        }
    }
}

/// Exact decision for the Gram matrix, with a verified certificate either way.
pub fn decide_incoherent(g: &Gram) -> Result<Verdict> {
    decide_incoherent_with(g, &SolverOptions::default())
}

pub fn decide_incoherent_with(g: &Gram, opts: &SolverOptions) -> Result<Verdict> {
    require_states(g, 3)?;
    match search(g, 0.0, opts) {
        Search::Split(d) if d.min_trace() >= RELEVANCE_TOL => Ok(accepted(d, opts)),
        Search::Split(d) => match search(g, TRACE_FLOOR, opts) {
            Search::Split(relevant) if relevant.min_trace() >= RELEVANCE_TOL => {
                Ok(accepted(relevant, opts))
            }
            _ => Ok(Verdict::inconclusive(
                CRITERION_NAME,
                d.min_trace() - RELEVANCE_TOL,
            )),
        },
        Search::Separated(cert) => {
            let margin = cert.violation;
            Ok(Verdict::decided(
                Decision::NotAntidistinguishable,
                CRITERION_NAME,
                margin,
                Some(Certificate::Infeasibility(cert)),
            ))
        }
        Search::Undecided(gap) => Ok(Verdict::inconclusive(CRITERION_NAME, -gap)),
    }
}

enum Search {
    /// Verified splitting within the feasibility gap.
    Split(Decomposition),
    /// Verified separating witness (only without a trace floor).
    Separated(InfeasibilityCertificate),
    Undecided(f64),
}

fn accepted(d: Decomposition, opts: &SolverOptions) -> Verdict {
    Verdict::decided(
        Decision::Antidistinguishable,
        CRITERION_NAME,
        opts.feasible_gap - d.residual,
        Some(Certificate::Decomposition(d)),
    )
}

fn search(g: &Gram, floor: f64, opts: &SolverOptions) -> Search {
    let mut solver = ConeSumDykstra::new(g, floor);
    let mut refined_at = f64::INFINITY;
    let max_iter = opts.projection.max_iter.max(1);
    let verified = |d: Decomposition| {
        (d.residual <= opts.feasible_gap && verify_decomposition(g, &d).is_ok()).then_some(d)
    };

    loop {
        let chunk_end = (solver.iterations + opts.check_every.max(1)).min(max_iter);
        while solver.iterations < chunk_end && solver.gap > opts.feasible_gap {
            solver.step();
        }

        if solver.gap <= opts.feasible_gap {
            if let Some(d) = verified(solver.decomposition()) {
                return Search::Split(d);
            }
        }

        if opts.refine && solver.gap < 1e-2 && solver.gap < refined_at * 0.1 {
            refined_at = solver.gap;
            if let Some(d) = refine(g, &solver.cone).and_then(verified) {
                return Search::Split(d);
            }
        }

        if floor == 0.0 && solver.gap >= opts.infeasible_gap {
            if let Some(cert) = certificate_from_projection(g, &solver.point) {
                return Search::Separated(cert);
            }
        }

        if solver.iterations >= max_iter || solver.stalled(1e-15) {
            break;
        }
    }

    if opts.refine {
        if let Some(d) = refine(g, &solver.cone).and_then(verified) {
            return Search::Split(d);
        }
    }
    Search::Undecided(solver.gap)
}

/// Builds H = −(G − P)/‖G − P‖, lifted by a multiple of I if a delete-one
/// submatrix dips below zero, and returns it if it verifies.
pub fn certificate_from_projection(g: &Gram, point: &CMatrix) -> Option<InfeasibilityCertificate> {
    let diff = g.matrix() - point;
    let norm = diff.frobenius_norm();
    if norm == 0.0 {
        return None;
    }
    let mut h = diff.scale(-1.0 / norm).hermitian_part();
    let k = g.size();
    let worst = (0..k)
        .map(|i| min_eigenvalue(&h.delete_index(i)).unwrap_or(f64::NEG_INFINITY))
        .fold(f64::INFINITY, f64::min);
    if worst < 0.0 {
        let shift = -worst + 1e-12;
        for i in 0..k {
            h[(i, i)] += Complex64::new(shift, 0.0);
        }
        h = h.scale(1.0 / h.frobenius_norm());
    }
    let cert = InfeasibilityCertificate {
        violation: -h.inner(g.matrix()),
        witness: h,
    };
    verify_certificate(g, &cert).ok().map(|_| cert)
}

/// Independent check of a decomposition against G.
pub fn verify_decomposition(g: &Gram, d: &Decomposition) -> std::result::Result<(), VerifyFailure> {
    let k = g.size();
    if d.blocks.len() != k {
        return Err(VerifyFailure::SizeMismatch(format!(
            "{} blocks for {k} states",
            d.blocks.len()
        )));
    }
    for (i, b) in d.blocks.iter().enumerate() {
        if b.rows() != k || b.cols() != k {
            return Err(VerifyFailure::SizeMismatch(format!(
                "block {i} is {}x{}",
                b.rows(),
                b.cols()
            )));
        }
        let deviation = b.hermitian_deviation();
        if deviation > VERIFY_HERMITIAN_TOL {
            return Err(VerifyFailure::NotHermitian {
                block: i,
                deviation,
            });
        }
    }
    for (i, b) in d.blocks.iter().enumerate() {
        let norm = (0..k)
            .map(|j| b[(i, j)].norm_sqr() + if j == i { 0.0 } else { b[(j, i)].norm_sqr() })
            .sum::<f64>()
            .sqrt();
        if norm > ZERO_PATTERN_TOL {
            return Err(VerifyFailure::ZeroPattern { block: i, norm });
        }
    }
    for (i, b) in d.blocks.iter().enumerate() {
        let min = hermitian_eig(b)
            .map(|e| e.min())
            .unwrap_or(f64::NEG_INFINITY);
        if min < -BLOCK_PSD_TOL {
            return Err(VerifyFailure::BlockNotPsd {
                block: i,
                min_eigenvalue: min,
            });
        }
    }
    let residual = (&d.sum() - g.matrix()).frobenius_norm();
    if residual > SUM_RESIDUAL_TOL {
        return Err(VerifyFailure::SumResidual { residual });
    }
    Ok(())
}

/// Independent check of a separating witness against G.
pub fn verify_certificate(
    g: &Gram,
    c: &InfeasibilityCertificate,
) -> std::result::Result<(), VerifyFailure> {
    let k = g.size();
    let h = &c.witness;
    if h.rows() != k || h.cols() != k {
        return Err(VerifyFailure::SizeMismatch(format!(
            "witness is {}x{} for {k} states",
            h.rows(),
            h.cols()
        )));
    }
    let deviation = h.hermitian_deviation();
    if deviation > VERIFY_HERMITIAN_TOL {
        return Err(VerifyFailure::NotHermitian {
            block: 0,
            deviation,
        });
    }
    for i in 0..k {
        let min = min_eigenvalue(&h.delete_index(i)).unwrap_or(f64::NEG_INFINITY);
        if min < -BLOCK_PSD_TOL {
            return Err(VerifyFailure::SubmatrixNotPsd {
                index: i,
                min_eigenvalue: min,
            });
        }
    }
    let value = h.inner(g.matrix());
    let bound = -SEPARATION_TOL * h.frobenius_norm() * g.matrix().frobenius_norm();
    if value > bound {
        return Err(VerifyFailure::Separation { value, bound });
    }
    Ok(())
}

/// Levenberg–Marquardt on F_i = B_i B_i† (B_i supported off index i), seeded
/// from the given cone blocks. Returns blocks with their true residual.
fn refine(g: &Gram, seed: &[CMatrix]) -> Option<Decomposition> {
    let k = g.size();
    let m = k - 1;
    let target = g.matrix();
    let indices: Vec<Vec<usize>> = (0..k).map(|i| others(i, k)).collect();

    let mut factors: Vec<CMatrix> = Vec::with_capacity(k);
    for (i, block) in seed.iter().enumerate() {
        let compressed = block.principal_submatrix(&indices[i]).hermitian_part();
        factors.push(psd_factor(&compressed).ok()?.adjoint());
    }

    let n_res = k * k;
    let n_var = 2 * k * m * m;
    let scale = target.frobenius_norm().max(1.0);
    let mut residual = residual_vector(target, &factors, &indices);
    let mut norm = l2(&residual);
    let mut damping = 1e-10;

    for _ in 0..60 {
        if norm <= 1e-14 * scale {
            break;
        }
        let jac = jacobian(&factors, &indices, k);
        // (J Jᵀ + λI) y = r, δ = −Jᵀ y
        let mut normal = vec![0.0; n_res * n_res];
        for r in 0..n_res {
            for c in r..n_res {
                let v: f64 = (0..n_var)
                    .map(|t| jac[r * n_var + t] * jac[c * n_var + t])
                    .sum();
                normal[r * n_res + c] = v;
                normal[c * n_res + r] = v;
            }
        }
        let mut improved = false;
        for _ in 0..12 {
            let mut damped = normal.clone();
            for r in 0..n_res {
                damped[r * n_res + r] += damping;
            }
            let Some(y) = solve_spd(&damped, n_res, &residual) else {
                damping *= 10.0;
                continue;
            };
            let step: Vec<f64> = (0..n_var)
                .map(|t| -(0..n_res).map(|r| jac[r * n_var + t] * y[r]).sum::<f64>())
                .collect();
            let trial = apply_step(&factors, &step, m);
            let trial_res = residual_vector(target, &trial, &indices);
            let trial_norm = l2(&trial_res);
            if trial_norm < norm {
                factors = trial;
                residual = trial_res;
                norm = trial_norm;
                damping = (damping * 0.1).max(1e-15);
                improved = true;
                break;
            }
            damping *= 10.0;
        }
        if !improved {
            break;
        }
    }

    let blocks: Vec<CMatrix> = factors
        .iter()
        .zip(&indices)
        .map(|(b, idx)| CMatrix::embed(&(b * &b.adjoint()).hermitian_part(), idx, k))
        .collect();
    let mut sum = CMatrix::zeros(k, k);
    for b in &blocks {
        sum += b;
    }
    let residual = (&sum - target).frobenius_norm();
    Some(Decomposition { blocks, residual })
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Position of the real / imaginary parts of entry (a, b), a < b, in the residual vector.
fn pair_slot(a: usize, b: usize, k: usize) -> usize {
    // pairs are enumerated row by row after the k diagonal slots
    let before = a * k - a * (a + 1) / 2;
    k + 2 * (before + (b - a - 1))
}

/// Hermitian ΣF − G flattened so that its Euclidean norm is the Frobenius norm.
fn residual_vector(target: &CMatrix, factors: &[CMatrix], indices: &[Vec<usize>]) -> Vec<f64> {
    let k = target.rows();
    let mut sum = CMatrix::zeros(k, k);
    for (b, idx) in factors.iter().zip(indices) {
        sum += &CMatrix::embed(&(b * &b.adjoint()), idx, k);
    }
    let diff = &sum - target;
    let mut out = vec![0.0; k * k];
    let root2 = std::f64::consts::SQRT_2;
    for a in 0..k {
        out[a] = diff[(a, a)].re;
        for b in (a + 1)..k {
            let z = (diff[(a, b)] + diff[(b, a)].conj()) * 0.5;
            let s = pair_slot(a, b, k);
            out[s] = root2 * z.re;
            out[s + 1] = root2 * z.im;
        }
    }
    out
}

/// Dense Jacobian of [`residual_vector`] with respect to (Re, Im) of every factor entry.
fn jacobian(factors: &[CMatrix], indices: &[Vec<usize>], k: usize) -> Vec<f64> {
    let m = k - 1;
    let n_var = 2 * k * m * m;
    let n_res = k * k;
    let root2 = std::f64::consts::SQRT_2;
    let mut jac = vec![0.0; n_res * n_var];
    let mut col = 0;
    for (b, idx) in factors.iter().zip(indices) {
        for a in 0..m {
            for c in 0..m {
                for e in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)] {
                    let ga = idx[a];
                    // δF_{ga,ga} = 2 Re(e · conj(B_ac))
                    jac[ga * n_var + col] = 2.0 * (e * b[(a, c)].conj()).re;
                    for q in 0..m {
                        if q == a {
                            continue;
                        }
                        let gq = idx[q];
                        // δF_{ga,gq} = e · conj(B_qc)
                        let upper = if ga < gq {
                            e * b[(q, c)].conj()
                        } else {
                            (e * b[(q, c)].conj()).conj()
                        };
                        let s = pair_slot(ga.min(gq), ga.max(gq), k);
                        jac[s * n_var + col] = root2 * upper.re;
                        jac[(s + 1) * n_var + col] = root2 * upper.im;
                    }
                    col += 1;
                }
            }
        }
    }
    jac
}

fn apply_step(factors: &[CMatrix], step: &[f64], m: usize) -> Vec<CMatrix> {
    let mut col = 0;
    factors
        .iter()
        .map(|b| {
            let mut nb = b.clone();
            for a in 0..m {
                for c in 0..m {
                    nb[(a, c)] += Complex64::new(step[col], step[col + 1]);
                    col += 2;
                }
            }
            nb
        })
        .collect()
}
