//! The Minkowski combination `(1 - t)·Box + t·B(r)`.
//!
//! This rounds the corners of a box but leaves its faces flat, so it is
//! never strongly convex for `t < 1`. Kept as a negative example next to
//! [`CurvedBody`](super::CurvedBody).

use crate::error::{Error, Result};
use crate::oracle::{GaugeBody, Vector};

#[derive(Debug, Clone)]
pub struct MinkowskiRoundedBox {
    half_widths: Vector,
    r: f64,
    t: f64,
}

impl MinkowskiRoundedBox {
    pub fn new(half_widths: Vector, r: f64, t: f64) -> Result<Self> {
        if half_widths.is_empty() || half_widths.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(Error::InvalidBody("box half widths must be positive".into()));
        }
        if !(r > 0.0) {
            return Err(Error::InvalidBody(format!("ball radius must be positive, got {r}")));
        }
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::DomainError(format!("t must lie in [0, 1], got {t}")));
        }
        Ok(Self { half_widths, r, t })
    }

    fn contains_scaled(&self, x: &Vector, lambda: f64) -> bool {
        let h = &self.half_widths * (lambda * (1.0 - self.t));
        let dist2: f64 = x
            .iter()
            .zip(h.iter())
            .map(|(&xi, &hi)| {
                let excess = xi.abs() - hi;
                if excess > 0.0 {
                    excess * excess
                } else {
                    0.0
                }
            })
            .sum();
        dist2.sqrt() <= lambda * self.t * self.r
    }
}

impl GaugeBody for MinkowskiRoundedBox {
    fn dim(&self) -> usize {
        self.half_widths.len()
    }

    fn gauge(&self, x: &Vector) -> f64 {
        if x.iter().all(|&v| v == 0.0) {
            return 0.0;
        }
        let mut hi = 1.0;
        while !self.contains_scaled(x, hi) {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        while self.contains_scaled(x, hi / 2.0) && hi > 1e-300 {
            hi /= 2.0;
        }
        if hi < 1.0 {
            lo = hi / 2.0;
        } else if hi > 1.0 {
            lo = hi / 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.contains_scaled(x, mid) {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        hi
    }

    fn bounding_box(&self) -> (Vector, Vector) {
        let ext = self.half_widths.map(|h| (1.0 - self.t) * h + self.t * self.r);
        (-ext.clone(), ext)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauge_on_flat_face_and_corner() {
        let k = MinkowskiRoundedBox::new(Vector::from_vec(vec![1.0, 1.0]), 1.0, 0.5).unwrap();
        // flat face at x = 0.5 + 0.5 = 1 for |y| ≤ 0.5
        assert!((k.gauge(&Vector::from_vec(vec![1.0, 0.3])) - 1.0).abs() < 1e-12);
        assert!((k.gauge(&Vector::from_vec(vec![2.0, 0.0])) - 2.0).abs() < 1e-12);
        // corner direction: (0.5 + 0.5/√2)·(1,1) is on the boundary
        let c = 0.5 + 0.5 / 2f64.sqrt();
        assert!((k.gauge(&Vector::from_vec(vec![c, c])) - 1.0).abs() < 1e-12);
    }
}
