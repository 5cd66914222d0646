//! JSON body specification files.
//!
//! ```json
//! {"kind": "ball", "dim": 2, "radius": 1.0}
//! {"kind": "ellipsoid", "dim": 2, "matrix": [[4, 0], [0, 1]]}
//! {"kind": "lp_ball", "dim": 3, "p": 1.5, "radius": 1.0}
//! {"kind": "lp_ball", "dim": 3, "p": "inf", "radius": 1.0}
//! {"kind": "halfspace_polytope", "dim": 2, "rows": [[1, 0], [0, 1], [-1, -1]], "offsets": [1, 1, 1]}
//! {"kind": "vertex_polytope", "dim": 2, "vertices": [[1, 0], [0, 1], [-1, -1]]}
//! {"kind": "cube", "dim": 3, "half_width": 1.0}
//! ```
//!
//! `cube` is shorthand for the axis-aligned halfspace polytope.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{BodyKind, ConvexBody};
use crate::error::{Error, Result};
use crate::oracle::Vector;

/// An `ℓp` exponent; `"inf"` in JSON stands for `p = ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Exponent {
    Finite(f64),
    Named(Infinity),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Infinity {
    #[serde(rename = "inf")]
    Inf,
}

impl Exponent {
    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Named(Infinity::Inf) => f64::INFINITY,
        }
    }

    fn from_value(p: f64) -> Self {
        if p.is_infinite() {
            Exponent::Named(Infinity::Inf)
        } else {
            Exponent::Finite(p)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BodySpec {
    Ball { dim: usize, radius: f64 },
    Ellipsoid { dim: usize, matrix: Vec<Vec<f64>> },
    LpBall { dim: usize, p: Exponent, radius: f64 },
    HalfspacePolytope { dim: usize, rows: Vec<Vec<f64>>, offsets: Vec<f64> },
    VertexPolytope { dim: usize, vertices: Vec<Vec<f64>> },
    Cube { dim: usize, half_width: f64 },
}

fn vectors(dim: usize, what: &str, data: &[Vec<f64>]) -> Result<Vec<Vector>> {
    data.iter()
        .enumerate()
        .map(|(i, v)| {
            if v.len() != dim {
                Err(Error::InvalidBody(format!(
                    "{what} {i} has {} entries but dim is {dim}",
                    v.len()
                )))
            } else {
                Ok(Vector::from_column_slice(v))
            }
        })
        .collect()
}

impl BodySpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("body spec serializes")
    }

    /// Validates the spec and builds the body, reporting the first violated invariant.
    pub fn build(&self) -> Result<ConvexBody> {
        match self {
            BodySpec::Ball { dim, radius } => ConvexBody::ball(*dim, *radius),
            BodySpec::Ellipsoid { dim, matrix } => {
                if matrix.len() != *dim {
                    return Err(Error::InvalidBody(format!(
                        "ellipsoid matrix has {} rows but dim is {dim}",
                        matrix.len()
                    )));
                }
                let rows = vectors(*dim, "matrix row", matrix)?;
                ConvexBody::ellipsoid(DMatrix::from_fn(*dim, *dim, |i, j| rows[i][j]))
            }
            BodySpec::LpBall { dim, p, radius } => ConvexBody::lp_ball(*dim, p.value(), *radius),
            BodySpec::HalfspacePolytope { dim, rows, offsets } => {
                ConvexBody::halfspace_polytope(vectors(*dim, "row", rows)?, offsets.clone())
            }
            BodySpec::VertexPolytope { dim, vertices } => {
                ConvexBody::vertex_polytope(vectors(*dim, "vertex", vertices)?)
            }
            BodySpec::Cube { dim, half_width } => ConvexBody::cube(*dim, *half_width),
        }
    }

    pub(super) fn from_body(body: &ConvexBody) -> Self {
        let dim = body.dim();
        let to_vecs = |vs: &[Vector]| vs.iter().map(|v| v.iter().copied().collect()).collect();
        match body.kind() {
            BodyKind::Ball { radius } => BodySpec::Ball { dim, radius: *radius },
            BodyKind::Ellipsoid { shape } => BodySpec::Ellipsoid {
                dim,
                matrix: (0..dim).map(|i| shape.row(i).iter().copied().collect()).collect(),
            },
            BodyKind::LpBall { p, radius } => {
                BodySpec::LpBall { dim, p: Exponent::from_value(*p), radius: *radius }
            }
            BodyKind::HalfspacePolytope { rows, offsets } => BodySpec::HalfspacePolytope {
                dim,
                rows: to_vecs(rows),
                offsets: offsets.clone(),
            },
            BodyKind::VertexPolytope { vertices } => {
                BodySpec::VertexPolytope { dim, vertices: to_vecs(vertices) }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_kind() {
        let docs = [
            r#"{"kind": "ball", "dim": 2, "radius": 1.0}"#,
            r#"{"kind": "ellipsoid", "dim": 2, "matrix": [[4, 0], [0, 1]]}"#,
            r#"{"kind": "lp_ball", "dim": 3, "p": 1.5, "radius": 1.0}"#,
            r#"{"kind": "lp_ball", "dim": 3, "p": "inf", "radius": 2.0}"#,
            r#"{"kind": "halfspace_polytope", "dim": 2, "rows": [[1, 0], [0, 1], [-1, -1]], "offsets": [1, 1, 1]}"#,
            r#"{"kind": "vertex_polytope", "dim": 2, "vertices": [[1, 0], [0, 1], [-1, -1]]}"#,
            r#"{"kind": "cube", "dim": 3, "half_width": 1.0}"#,
        ];
        for doc in docs {
            let spec = BodySpec::from_json(doc).unwrap();
            let body = spec.build().unwrap();
            // the serialized form rebuilds an identical body
            let again = BodySpec::from_json(&body.to_spec().to_json()).unwrap().build().unwrap();
            assert_eq!(body.kind(), again.kind());
        }
    }

    #[test]
    fn reports_first_violation() {
        let err = BodySpec::from_json(
            r#"{"kind": "halfspace_polytope", "dim": 2, "rows": [[1, 0], [0, 1]], "offsets": [1, -1]}"#,
        )
        .unwrap()
        .build()
        .unwrap_err();
        assert!(err.to_string().contains("offset 1"), "{err}");

        let err = BodySpec::from_json(
            r#"{"kind": "halfspace_polytope", "dim": 2, "rows": [[1, 0], [0, 1]], "offsets": [1, 1]}"#,
        )
        .unwrap()
        .build()
        .unwrap_err();
        assert!(err.to_string().contains("unbounded"), "{err}");

        let err = BodySpec::from_json(r#"{"kind": "vertex_polytope", "dim": 2, "vertices": [[1, 0], [0, 1], [1, 1]]}"#)
            .unwrap()
            .build()
            .unwrap_err();
        assert!(err.to_string().contains("origin"), "{err}");

        let err = BodySpec::from_json(r#"{"kind": "ball", "dim": 2, "radius": 0}"#).unwrap().build().unwrap_err();
        assert!(err.to_string().contains("radius"), "{err}");

        assert!(BodySpec::from_json(r#"{"kind": "torus", "dim": 2}"#).is_err());
    }
}
