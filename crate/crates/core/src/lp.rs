//! Dense two-phase revised simplex for small conic programs.
//!
//! Solves `min cᵀy  s.t.  A y = b, y ≥ 0` where `A` is `d × m` with `d`
//! small (the ambient dimension) and `m` up to a few hundred columns. The
//! programs that show up here are all of the form "write `b` as a cheapest
//! nonnegative combination of generators", i.e. gauges of polytopes given by
//! their vertices and support values of polytopes given by facets. The
//! optimal dual `π` is the matching primal point: `πᵀ a_j ≤ c_j` for all
//! columns and `bᵀπ` equals the optimal value.
//!
//! Pivoting uses Bland's rule throughout, so the result is a deterministic
//! function of the input.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const REDUCED_COST_TOL: f64 = 1e-11;
const PIVOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub value: f64,
    /// Primal weights, one per column of `A`.
    pub weights: Vec<f64>,
    /// Optimal dual vector.
    pub dual: DVector<f64>,
}

struct Tableau<'a> {
    a: &'a DMatrix<f64>,
    b: &'a DVector<f64>,
    art_sign: Vec<f64>,
}

impl Tableau<'_> {
    fn rows(&self) -> usize {
        self.a.nrows()
    }

    fn n_original(&self) -> usize {
        self.a.ncols()
    }

    fn column(&self, j: usize) -> DVector<f64> {
        let m = self.n_original();
        if j < m {
            self.a.column(j).into_owned()
        } else {
            let mut e = DVector::zeros(self.rows());
            e[j - m] = self.art_sign[j - m];
            e
        }
    }

    fn basis_matrix(&self, basis: &[usize]) -> DMatrix<f64> {
        let d = self.rows();
        let mut bm = DMatrix::zeros(d, d);
        for (k, &j) in basis.iter().enumerate() {
            bm.set_column(k, &self.column(j));
        }
        bm
    }

    /// Runs simplex pivots from a feasible basis until optimal.
    fn optimize(
        &self,
        basis: &mut [usize],
        cost: impl Fn(usize) -> f64,
        allowed: impl Fn(usize) -> bool,
    ) -> Result<(DVector<f64>, DVector<f64>)> {
        let total = self.n_original() + self.rows();
        let limit = 50 * (total + 10);
        for _ in 0..limit {
            let bm = self.basis_matrix(basis);
            let lu = bm.clone().lu();
            let xb = lu.solve(self.b).ok_or(Error::LpSingular)?;
            let cb = DVector::from_iterator(basis.len(), basis.iter().map(|&j| cost(j)));
            let pi = bm.transpose().lu().solve(&cb).ok_or(Error::LpSingular)?;

            let entering = (0..total).find(|&j| {
                if !allowed(j) || basis.contains(&j) {
                    return false;
                }
                let cj = cost(j);
                let reduced = cj - pi.dot(&self.column(j));
                reduced < -REDUCED_COST_TOL * (1.0 + cj.abs())
            });
            let Some(enter) = entering else {
                return Ok((xb, pi));
            };

            let w = lu.solve(&self.column(enter)).ok_or(Error::LpSingular)?;
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..w.len() {
                if w[i] <= PIVOT_TOL {
                    continue;
                }
                let theta = xb[i].max(0.0) / w[i];
                leave = match leave {
                    None => Some((i, theta)),
                    Some((li, lt)) => {
                        if theta < lt - 1e-15 || (theta <= lt + 1e-15 && basis[i] < basis[li]) {
                            Some((i, theta))
                        } else {
                            Some((li, lt))
                        }
                    }
                };
            }
            let (row, _) = leave.ok_or(Error::LpUnbounded)?;
            basis[row] = enter;
        }
        Err(Error::LpPivotLimit(limit))
    }
}

/// Solves `min cᵀy s.t. A y = b, y ≥ 0`.
pub fn solve_standard(a: &DMatrix<f64>, b: &DVector<f64>, cost: &[f64]) -> Result<LpSolution> {
    let d = a.nrows();
    let m = a.ncols();
    if b.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: b.len() });
    }
    if cost.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: cost.len() });
    }
    let art_sign: Vec<f64> = b.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
    let tab = Tableau { a, b, art_sign };
    let mut basis: Vec<usize> = (m..m + d).collect();

    // Phase 1: drive the artificial variables to zero.
    let (xb, _) = tab.optimize(&mut basis, |j| if j >= m { 1.0 } else { 0.0 }, |_| true)?;
    let infeas: f64 = basis
        .iter()
        .zip(xb.iter())
        .filter(|(&j, _)| j >= m)
        .map(|(_, &v)| v.max(0.0))
        .sum();
    if infeas > 1e-9 * (1.0 + b.amax()) {
        return Err(Error::LpInfeasible);
    }

    // Pivot zero-level artificials out of the basis where possible.
    for row in 0..d {
        if basis[row] < m {
            continue;
        }
        let lu = tab.basis_matrix(&basis).lu();
        let replacement = (0..m).filter(|j| !basis.contains(j)).find(|&j| {
            lu.solve(&tab.column(j))
                .map(|w| w[row].abs() > 1e-9)
                .unwrap_or(false)
        });
        if let Some(j) = replacement {
            basis[row] = j;
        }
    }

    // Phase 2.
    let (xb, pi) = tab.optimize(
        &mut basis,
        |j| if j < m { cost[j] } else { 0.0 },
        |j| j < m,
    )?;
    let mut weights = vec![0.0; m];
    for (k, &j) in basis.iter().enumerate() {
        if j < m {
            weights[j] = xb[k].max(0.0);
        }
    }
    let value = weights.iter().zip(cost).map(|(w, c)| w * c).sum();
    Ok(LpSolution { value, weights, dual: pi })
}

/// Gauge of `x` with respect to `conv(generators ∪ {0})`:
/// `min Σ y_j  s.t.  Σ y_j g_j = x, y ≥ 0`.
///
/// Returns `Err(LpInfeasible)` when `x` is outside the cone of the generators.
pub fn conic_gauge(generators: &DMatrix<f64>, x: &DVector<f64>) -> Result<LpSolution> {
    let ones = vec![1.0; generators.ncols()];
    solve_standard(generators, x, &ones)
}
