//! Traits shared by every body representation in the crate.

use nalgebra::DVector;

use crate::error::Result;

pub type Vector = DVector<f64>;

/// A convex body with the origin in its interior, seen through its gauge.
pub trait GaugeBody {
    fn dim(&self) -> usize;

    fn gauge(&self, x: &Vector) -> f64;

    /// Axis-aligned box `[lower, upper]` containing the body.
    fn bounding_box(&self) -> (Vector, Vector);
}

/// Result of maximizing a linear functional over a body.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMax {
    /// A maximizer (or near-maximizer) that lies in the body.
    pub point: Vector,
    /// `⟨c, point⟩`.
    pub value: f64,
    /// Certified upper bound on the true maximum. Equals `value` for exact oracles.
    pub upper: f64,
}

/// Linear optimization oracle: `argmax_{x ∈ K} ⟨c, x⟩`.
pub trait LinearOracle: GaugeBody {
    fn maximize(&self, c: &Vector) -> Result<LinearMax>;
}

impl<T: GaugeBody + ?Sized> GaugeBody for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn gauge(&self, x: &Vector) -> f64 {
        (**self).gauge(x)
    }
    fn bounding_box(&self) -> (Vector, Vector) {
        (**self).bounding_box()
    }
}

impl<T: LinearOracle + ?Sized> LinearOracle for &T {
    fn maximize(&self, c: &Vector) -> Result<LinearMax> {
        (**self).maximize(c)
    }
}
