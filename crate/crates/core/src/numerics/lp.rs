//! Dense phase-1 simplex for small feasibility problems `A t = b, t ≥ lb`.

use crate::error::{Error, Result};

/// Largest supported number of rows or columns.
pub const MAX_LP_SIZE: usize = 128;

#[derive(Debug, Clone, Copy)]
pub struct LpOptions {
    /// Maximum ‖At − b‖∞ accepted for a returned point.
    pub residual_tol: f64,
    /// Pivot and reduced-cost threshold.
    pub pivot_tol: f64,
    /// Phase-1 objective above this (scaled by ‖b‖∞) means infeasible.
    pub infeasibility_tol: f64,
    pub max_pivots: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        Self {
            residual_tol: 1e-8,
            pivot_tol: 1e-12,
            infeasibility_tol: 1e-10,
            max_pivots: 50_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Feasible(Vec<f64>),
    /// `excess` is the optimal phase-1 objective: the least ‖At − b‖₁ over t ≥ lb.
    Infeasible {
        excess: f64,
    },
}

impl LpOutcome {
    pub fn point(&self) -> Option<&[f64]> {
        match self {
            LpOutcome::Feasible(t) => Some(t),
            LpOutcome::Infeasible { .. } => None,
        }
    }
}

/// Finds t with `A t = b` and `t ≥ lb`, or reports infeasibility.
///
/// `a` is row-major with `b.len()` rows and `lb.len()` columns.
pub fn lp_feasible(a: &[Vec<f64>], b: &[f64], lb: &[f64]) -> Result<LpOutcome> {
    lp_feasible_with(a, b, lb, &LpOptions::default())
}

pub fn lp_feasible_with(
    a: &[Vec<f64>],
    b: &[f64],
    lb: &[f64],
    opts: &LpOptions,
) -> Result<LpOutcome> {
    let m = b.len();
    let n = lb.len();
    if a.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "constraint matrix must be {m}x{n}"
        )));
    }
    if m > MAX_LP_SIZE || n > MAX_LP_SIZE {
        return Err(Error::DimensionMismatch(format!(
            "LP size {m}x{n} exceeds {MAX_LP_SIZE}"
        )));
    }
    if n == 0 {
        return Ok(if b.iter().all(|v| v.abs() <= opts.residual_tol) {
            LpOutcome::Feasible(Vec::new())
        } else {
            LpOutcome::Infeasible {
                excess: b.iter().map(|v| v.abs()).sum(),
            }
        });
    }

    // Shift to s = t − lb ≥ 0 and make the right-hand side nonnegative.
    let width = n + m + 1;
    let mut tab = vec![vec![0.0; width]; m];
    for i in 0..m {
        let shifted = b[i] - a[i].iter().zip(lb).map(|(x, l)| x * l).sum::<f64>();
        let sign = if shifted < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            tab[i][j] = sign * a[i][j];
        }
        tab[i][n + i] = 1.0;
        tab[i][width - 1] = sign * shifted;
    }
    let rhs_scale = tab.iter().map(|r| r[width - 1].abs()).fold(1.0, f64::max);

    // Phase-1 cost row: minimize the sum of artificials.
    let mut cost = vec![0.0; width];
    for row in &tab {
        for j in 0..n {
            cost[j] -= row[j];
        }
        cost[width - 1] -= row[width - 1];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    let mut pivots = 0;
    // Bland: lowest-index column with negative reduced cost.
    while let Some(enter) = (0..n + m).find(|&j| cost[j] < -opts.pivot_tol) {
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let coef = tab[i][enter];
            if coef > opts.pivot_tol {
                let ratio = tab[i][width - 1] / coef;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - 1e-15 || (ratio <= lr + 1e-15 && basis[i] < basis[li]) {
                            Some((i, ratio))
                        } else {
                            Some((li, lr))
                        }
                    }
                };
            }
        }
        // Phase-1 objective is bounded below, so an unbounded column means roundoff.
        let Some((row, _)) = leave else {
            return Err(Error::LpNumerical("unbounded phase-1 direction".into()));
        };
        pivot(&mut tab, &mut cost, row, enter);
        basis[row] = enter;
        pivots += 1;
        if pivots > opts.max_pivots {
            return Err(Error::LpNumerical("pivot limit reached".into()));
        }
    }

    let objective = -cost[width - 1];
    if objective > opts.infeasibility_tol * rhs_scale {
        return Ok(LpOutcome::Infeasible { excess: objective });
    }

    let mut t = lb.to_vec();
    for (i, &var) in basis.iter().enumerate() {
        if var < n {
            t[var] += tab[i][width - 1].max(0.0);
        }
    }

    let residual = a
        .iter()
        .zip(b)
        .map(|(row, bi)| (row.iter().zip(&t).map(|(x, y)| x * y).sum::<f64>() - bi).abs())
        .fold(0.0, f64::max);
    if residual > opts.residual_tol {
        return Err(Error::LpNumerical(format!(
            "basic solution residual {residual:.3e}"
        )));
    }
    Ok(LpOutcome::Feasible(t))
}

fn pivot(tab: &mut [Vec<f64>], cost: &mut [f64], row: usize, col: usize) {
    let p = tab[row][col];
    for v in tab[row].iter_mut() {
        *v /= p;
    }
    let pivot_row = tab[row].clone();
    for (i, r) in tab.iter_mut().enumerate() {
        if i == row {
            continue;
        }
        let f = r[col];
        if f != 0.0 {
            for (x, y) in r.iter_mut().zip(&pivot_row) {
                *x -= f * y;
            }
            r[col] = 0.0;
        }
    }
    let f = cost[col];
    if f != 0.0 {
        for (x, y) in cost.iter_mut().zip(&pivot_row) {
            *x -= f * y;
        }
        cost[col] = 0.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_variable_feasible() {
        let out = lp_feasible(&[vec![1.0]], &[1.0], &[0.0]).unwrap();
        assert_eq!(out, LpOutcome::Feasible(vec![1.0]));
    }

    #[test]
    fn single_variable_infeasible() {
        let out = lp_feasible(&[vec![1.0]], &[-1.0], &[0.0]).unwrap();
        assert!(matches!(out, LpOutcome::Infeasible { excess } if excess > 0.0));
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            lp_feasible(&[vec![1.0, 2.0]], &[1.0], &[0.0]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn respects_lower_bounds_and_redundant_rows() {
        // t1 + t2 = 2 (twice), t1 − t2 = 0, t ≥ 0.5
        let a = vec![vec![1.0, 1.0], vec![1.0, 1.0], vec![1.0, -1.0]];
        let t = lp_feasible(&a, &[2.0, 2.0, 0.0], &[0.5, 0.5])
            .unwrap()
            .point()
            .unwrap()
            .to_vec();
        assert!((t[0] - 1.0).abs() < 1e-12 && (t[1] - 1.0).abs() < 1e-12);

        let out = lp_feasible(&a, &[2.0, 2.0, 0.0], &[1.5, 0.0]).unwrap();
        assert!(matches!(out, LpOutcome::Infeasible { excess } if excess > 0.0));
    }

    #[test]
    fn degenerate_cycling_prone_system() {
        // Beale-style degenerate constraints; Bland's rule must terminate.
        let a = vec![
            vec![0.25, -8.0, -1.0, 9.0, 1.0, 0.0, 0.0],
            vec![0.5, -12.0, -0.5, 3.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
        ];
        let b = [0.0, 0.0, 1.0];
        let out = lp_feasible(&a, &b, &[0.0; 7]).unwrap();
        let t = out.point().unwrap();
        for (row, bi) in a.iter().zip(&b) {
            let lhs: f64 = row.iter().zip(t).map(|(x, y)| x * y).sum();
            assert!((lhs - bi).abs() < 1e-10);
        }
        assert!(t.iter().all(|&v| v >= 0.0));
    }
}
