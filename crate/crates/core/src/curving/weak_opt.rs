//! Kelley cutting planes for weak linear optimization over a body given by
//! a gauge and a gauge subgradient.
//!
//! The outer approximation is `{x : ⟨g_j, x⟩ ≤ 1}` for cut normals `g_j` in
//! the polar of the body. Maximizing `⟨c, x⟩` over it is the conic program
//! `min Σ y_j s.t. Σ y_j g_j = c, y ≥ 0`, whose value is an upper bound and
//! whose dual is the outer vertex `x`. Radially scaling `x` into the body
//! gives a feasible point and a lower bound. A subgradient at `x` is tangent
//! at `x / ‖x‖` and becomes the next cut.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp;
use crate::oracle::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeakOptStatus {
    /// A feasible point with a certified value.
    Point,
    /// The body shrunk by the tolerance ball is empty.
    Empty,
}

/// Outcome of δ-precision linear maximization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakOptResult {
    pub status: WeakOptStatus,
    pub point: Option<Vec<f64>>,
    /// `⟨c, point⟩`.
    pub value: f64,
    /// Upper bound on `max ⟨c, x⟩` over the body; `upper_bound - value ≤ delta`.
    pub upper_bound: f64,
    pub delta: f64,
    pub iterations: usize,
}

impl WeakOptResult {
    pub fn point_vector(&self) -> Option<Vector> {
        self.point.as_deref().map(Vector::from_column_slice)
    }

    pub fn gap(&self) -> f64 {
        self.upper_bound - self.value
    }
}

pub(crate) fn kelley(
    initial_cuts: Vec<Vector>,
    c: &Vector,
    delta: f64,
    max_iters: usize,
    gauge: impl Fn(&Vector) -> f64,
    cut: impl Fn(&Vector) -> Result<Vector>,
) -> Result<WeakOptResult> {
    if !(delta > 0.0) {
        return Err(Error::DomainError(format!("precision must be positive, got {delta}")));
    }
    let dim = c.len();
    if c.iter().all(|&v| v == 0.0) {
        return Ok(WeakOptResult {
            status: WeakOptStatus::Point,
            point: Some(vec![0.0; dim]),
            value: 0.0,
            upper_bound: 0.0,
            delta,
            iterations: 0,
        });
    }

    let mut cuts = initial_cuts;
    let mut best: Option<(Vector, f64)> = None;
    let mut gap = f64::INFINITY;
    for iter in 1..=max_iters {
        let gens = DMatrix::from_fn(dim, cuts.len(), |i, j| cuts[j][i]);
        let sol = lp::conic_gauge(&gens, c)?;
        let upper = sol.value;
        let x = sol.dual;
        let gx = gauge(&x);
        let candidate = if gx <= 1.0 { x.clone() } else { &x / gx };
        let value = c.dot(&candidate);
        if best.as_ref().is_none_or(|(_, v)| value > *v) {
            best = Some((candidate, value));
        }
        let (point, best_value) = best.as_ref().expect("best point set above");
        gap = upper - best_value;
        if gap <= delta {
            return Ok(WeakOptResult {
                status: WeakOptStatus::Point,
                point: Some(point.iter().copied().collect()),
                value: *best_value,
                upper_bound: upper.max(*best_value),
                delta,
                iterations: iter,
            });
        }
        cuts.push(cut(&x)?);
    }
    let (point, best_value) = best.unwrap_or_else(|| (Vector::zeros(dim), 0.0));
    Err(Error::IterationLimit {
        iters: max_iters,
        gap,
        best_point: point.iter().copied().collect(),
        best_value,
    })
}
