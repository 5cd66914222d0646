//! Frank-Wolfe with duality-gap bookkeeping.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{LinearOracle, Vector};

/// `f(x) = (x - z)ᵀ Q (x - z)`, with `Q = I` when no matrix is given.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic {
    pub target: Vector,
    pub q: Option<DMatrix<f64>>,
}

impl Quadratic {
    pub fn euclidean(target: Vector) -> Self {
        Self { target, q: None }
    }

    fn apply(&self, v: &Vector) -> Vector {
        match &self.q {
            Some(q) => q * v,
            None => v.clone(),
        }
    }

    pub fn value(&self, x: &Vector) -> f64 {
        let d = x - &self.target;
        d.dot(&self.apply(&d))
    }

    pub fn gradient(&self, x: &Vector) -> Vector {
        self.apply(&(x - &self.target)) * 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum StepRule {
    Fixed { eta: f64 },
    /// `η_t = 2 / (t + 2)` for `t = 0, 1, …`.
    Classic,
    /// Exact minimization along the segment, clipped to `[0, 1]`.
    LineSearch,
}

/// Index `t` holds iterate `x_t` and the quantities evaluated there.
#[derive(Debug, Clone, PartialEq)]
pub struct FwTrace {
    pub iterates: Vec<Vector>,
    /// `⟨∇f(x_t), x_t - x̃_t⟩` with `x̃_t` the oracle answer.
    pub gaps: Vec<f64>,
    /// The gap with the oracle's upper bound in place of its value; bounds
    /// `f(x_t) - f*` even when the oracle is approximate.
    pub certified_gaps: Vec<f64>,
    pub objective: Vec<f64>,
    pub rule: StepRule,
    pub converged: bool,
}

impl FwTrace {
    /// `min_{s ≤ t} f(x_s)` for every `t`.
    pub fn best_objective(&self) -> Vec<f64> {
        self.objective
            .iter()
            .scan(f64::INFINITY, |best, &f| {
                *best = best.min(f);
                Some(*best)
            })
            .collect()
    }

    pub fn best_gap(&self) -> Vec<f64> {
        self.gaps
            .iter()
            .scan(f64::INFINITY, |best, &g| {
                *best = best.min(g);
                Some(*best)
            })
            .collect()
    }

    pub fn last(&self) -> &Vector {
        self.iterates.last().expect("non-empty trace")
    }
}

/// Runs at most `steps` Frank-Wolfe iterations from the feasible `x0`,
/// stopping once the certified gap drops to `tolerance`.
pub fn fw_solve<O: LinearOracle + ?Sized>(
    oracle: &O,
    f: &Quadratic,
    x0: &Vector,
    steps: usize,
    rule: StepRule,
    tolerance: f64,
) -> Result<FwTrace> {
    let start_gauge = oracle.gauge(x0);
    if !(start_gauge <= 1.0 + 1e-9) {
        return Err(Error::InfeasibleStart(start_gauge));
    }
    if let StepRule::Fixed { eta } = rule {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::DomainError(format!("fixed step must lie in (0, 1], got {eta}")));
        }
    }
    let mut x = x0.clone();
    let mut trace = FwTrace {
        iterates: Vec::with_capacity(steps + 1),
        gaps: Vec::with_capacity(steps + 1),
        certified_gaps: Vec::with_capacity(steps + 1),
        objective: Vec::with_capacity(steps + 1),
        rule,
        converged: false,
    };
    for t in 0..=steps {
        let grad = f.gradient(&x);
        let answer = oracle.maximize(&-&grad).map_err(|e| match e {
            Error::OracleFailure(_) => e,
            other => Error::OracleFailure(Box::new(other)),
        })?;
        let along = grad.dot(&x);
        let gap = answer.value + along;
        let certified = answer.upper + along;
        trace.iterates.push(x.clone());
        trace.gaps.push(gap);
        trace.certified_gaps.push(certified);
        trace.objective.push(f.value(&x));
        if certified <= tolerance {
            trace.converged = true;
            break;
        }
        if t == steps {
            break;
        }
        let dir = &answer.point - &x;
        let eta = match rule {
            StepRule::Fixed { eta } => eta,
            StepRule::Classic => 2.0 / (t as f64 + 2.0),
            StepRule::LineSearch => {
                let curvature = dir.dot(&f.apply(&dir));
                let slope = grad.dot(&dir);
                if curvature > 0.0 {
                    (-slope / (2.0 * curvature)).clamp(0.0, 1.0)
                } else if slope < 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        };
        x += dir * eta;
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::ConvexBody;
    use crate::curving::{CurvedBody, CurvedOracle};

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    #[test]
    fn ball_projection() {
        let ball = ConvexBody::ball(2, 1.0).unwrap();
        let f = Quadratic::euclidean(v(&[2.0, 0.0]));
        let tr = fw_solve(&ball, &f, &v(&[0.0, 0.1]), 2000, StepRule::LineSearch, 1e-10).unwrap();
        assert!((tr.last() - v(&[1.0, 0.0])).norm() < 1e-4);
        assert!((tr.objective.last().unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn interior_optimum() {
        let square = ConvexBody::cube(2, 1.0).unwrap();
        let f = Quadratic::euclidean(v(&[0.5, 0.5]));
        let tr = fw_solve(&square, &f, &v(&[-1.0, -1.0]), 5000, StepRule::Classic, 1e-12).unwrap();
        assert!((tr.last() - v(&[0.5, 0.5])).norm() < 1e-2);
        assert!(*tr.best_gap().last().unwrap() < 1e-2);
    }

    #[test]
    fn classic_gap_envelope_and_validity() {
        let square = ConvexBody::cube(2, 1.0).unwrap();
        let f = Quadratic::euclidean(v(&[2.0, 0.0]));
        let tr = fw_solve(&square, &f, &v(&[-1.0, -1.0]), 500, StepRule::Classic, 0.0).unwrap();
        let diam2 = 8.0;
        for (t, g) in tr.best_gap().iter().enumerate() {
            assert!(*g <= 8.0 * diam2 / (t as f64 + 2.0), "t = {t}: {g}");
        }
        let fstar = 1.0;
        for (t, (&ft, &g)) in tr.objective.iter().zip(&tr.gaps).enumerate() {
            assert!(ft - fstar <= g + 1e-9, "t = {t}");
            assert!(square.gauge(&tr.iterates[t]) <= 1.0 + 1e-9);
        }
        let best = tr.best_objective();
        assert!(best.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn rejects_infeasible_start() {
        let ball = ConvexBody::ball(2, 1.0).unwrap();
        let f = Quadratic::euclidean(v(&[0.0, 0.0]));
        let err = fw_solve(&ball, &f, &v(&[2.0, 0.0]), 10, StepRule::Classic, 0.0).unwrap_err();
        assert!(matches!(err, Error::InfeasibleStart(g) if (g - 2.0).abs() < 1e-12));
    }

    #[test]
    fn curved_oracle_failure_propagates() {
        let curved = CurvedBody::new(ConvexBody::cube(2, 1.0).unwrap(), 1.0, 0.5).unwrap();
        let oracle = CurvedOracle { body: curved, delta: 1e-14, max_iters: 2 };
        let f = Quadratic::euclidean(v(&[2.0, 0.3]));
        let err = fw_solve(&oracle, &f, &v(&[0.0, 0.0]), 10, StepRule::Classic, 0.0).unwrap_err();
        assert!(matches!(err, Error::OracleFailure(inner) if matches!(*inner, Error::IterationLimit { .. })));
    }
}
