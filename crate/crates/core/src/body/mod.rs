//! Concrete convex bodies with the origin in their interior.
//!
//! Every body exposes its gauge `‖x‖_K = inf{λ > 0 : x ∈ λK}`, a gauge
//! subgradient, the support function `σ_K(c) = max_{x∈K} ⟨c, x⟩` with a
//! maximizer, membership, inscribed/circumscribed Euclidean radii and a
//! closed-form polar. Gauges are not assumed symmetric.

mod spec;
mod vertices;

use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

pub use spec::{BodySpec, Exponent};

use crate::error::{Error, Result};
use crate::lp;
use crate::oracle::{GaugeBody, LinearMax, LinearOracle, Vector};

/// Parameters of a body, as supplied by the caller.
#[derive(Debug, Clone, PartialEq)]
pub enum BodyKind {
    /// Euclidean ball of the given radius.
    Ball { radius: f64 },
    /// `{x : xᵀ A x ≤ 1}` for symmetric positive definite `A`.
    Ellipsoid { shape: DMatrix<f64> },
    /// `{x : ‖x‖_p ≤ radius}`, `p ∈ [1, ∞]`.
    LpBall { p: f64, radius: f64 },
    /// `{x : ⟨a_i, x⟩ ≤ b_i}` with every `b_i > 0`.
    HalfspacePolytope { rows: Vec<Vector>, offsets: Vec<f64> },
    /// Convex hull of the vertices; must contain the origin in its interior.
    VertexPolytope { vertices: Vec<Vector> },
}

impl BodyKind {
    pub fn name(&self) -> &'static str {
        match self {
            BodyKind::Ball { .. } => "ball",
            BodyKind::Ellipsoid { .. } => "ellipsoid",
            BodyKind::LpBall { .. } => "lp_ball",
            BodyKind::HalfspacePolytope { .. } => "halfspace_polytope",
            BodyKind::VertexPolytope { .. } => "vertex_polytope",
        }
    }
}

/// `B(r) ⊆ K ⊆ B(R)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichRadii {
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    Inside,
    Outside,
    Boundary,
}

#[derive(Debug, Clone)]
enum Derived {
    None,
    Ellipsoid { inverse: DMatrix<f64>, eig_min: f64, eig_max: f64 },
    /// Generators (as columns) of the polar for halfspace polytopes, or of
    /// the body itself for vertex polytopes.
    Generators(DMatrix<f64>),
}

#[derive(Debug, Clone)]
pub struct ConvexBody {
    dim: usize,
    kind: BodyKind,
    derived: Derived,
    radii: OnceLock<SandwichRadii>,
}

fn columns(points: &[Vector], dim: usize) -> DMatrix<f64> {
    DMatrix::from_fn(dim, points.len(), |i, j| points[j][i])
}

fn check_finite(v: &Vector, what: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidBody(format!("{what} has non-finite entries")))
    }
}

fn unit(dim: usize, i: usize, sign: f64) -> Vector {
    let mut e = Vector::zeros(dim);
    e[i] = sign;
    e
}

fn lp_norm(x: &Vector, p: f64) -> f64 {
    if p == 1.0 {
        x.lp_norm(1)
    } else if p == 2.0 {
        x.norm()
    } else if p.is_infinite() {
        x.amax()
    } else {
        let scale = x.amax();
        if scale == 0.0 {
            return 0.0;
        }
        scale * x.iter().map(|v| (v.abs() / scale).powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Conjugate exponent `q` with `1/p + 1/q = 1`.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// Index of the first maximal entry of an iterator.
fn first_argmax(values: impl Iterator<Item = f64>) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

impl ConvexBody {
    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidBody("dimension must be positive".into()));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidBody(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Self::assemble(dim, BodyKind::Ball { radius }, Derived::None))
    }

    pub fn ellipsoid(shape: DMatrix<f64>) -> Result<Self> {
        let dim = shape.nrows();
        if dim == 0 || shape.ncols() != dim {
            return Err(Error::InvalidBody("ellipsoid matrix must be square and non-empty".into()));
        }
        if shape.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidBody("ellipsoid matrix has non-finite entries".into()));
        }
        let asym = (&shape - shape.transpose()).amax();
        if asym > 1e-12 * (1.0 + shape.amax()) {
            return Err(Error::InvalidBody("ellipsoid matrix is not symmetric".into()));
        }
        let chol = shape
            .clone()
            .cholesky()
            .ok_or_else(|| Error::InvalidBody("ellipsoid matrix is not positive definite".into()))?;
        let eig = SymmetricEigen::new(shape.clone());
        let eig_min = eig.eigenvalues.min();
        let eig_max = eig.eigenvalues.max();
        if eig_min <= 0.0 {
            return Err(Error::InvalidBody("ellipsoid matrix is not positive definite".into()));
        }
        let inverse = chol.inverse();
        Ok(Self::assemble(
            dim,
            BodyKind::Ellipsoid { shape },
            Derived::Ellipsoid { inverse, eig_min, eig_max },
        ))
    }

    pub fn lp_ball(dim: usize, p: f64, radius: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidBody("dimension must be positive".into()));
        }
        if !(p >= 1.0) {
            return Err(Error::InvalidBody(format!("lp exponent must be ≥ 1, got {p}")));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidBody(format!("lp ball radius must be positive, got {radius}")));
        }
        Ok(Self::assemble(dim, BodyKind::LpBall { p, radius }, Derived::None))
    }

    pub fn halfspace_polytope(rows: Vec<Vector>, offsets: Vec<f64>) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.len());
        if dim == 0 {
            return Err(Error::InvalidBody("halfspace polytope needs at least one row".into()));
        }
        if rows.len() != offsets.len() {
            return Err(Error::InvalidBody(format!(
                "{} rows but {} offsets",
                rows.len(),
                offsets.len()
            )));
        }
        for (i, (a, &b)) in rows.iter().zip(&offsets).enumerate() {
            if a.len() != dim {
                return Err(Error::InvalidBody(format!("row {i} has dimension {}, expected {dim}", a.len())));
            }
            check_finite(a, &format!("row {i}"))?;
            if a.norm() == 0.0 {
                return Err(Error::InvalidBody(format!("row {i} is zero")));
            }
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::InvalidBody(format!(
                    "offset {i} must be positive for the origin to be interior, got {b}"
                )));
            }
        }
        let scaled: Vec<Vector> = rows.iter().zip(&offsets).map(|(a, &b)| a / b).collect();
        let gens = columns(&scaled, dim);
        for i in 0..dim {
            for sign in [1.0, -1.0] {
                if lp::conic_gauge(&gens, &unit(dim, i, sign)).is_err() {
                    return Err(Error::InvalidBody(format!(
                        "polytope is unbounded in direction {}e{}",
                        if sign > 0.0 { "+" } else { "-" },
                        i + 1
                    )));
                }
            }
        }
        Ok(Self::assemble(
            dim,
            BodyKind::HalfspacePolytope { rows, offsets },
            Derived::Generators(gens),
        ))
    }

    pub fn vertex_polytope(vertices: Vec<Vector>) -> Result<Self> {
        let dim = vertices.first().map_or(0, |v| v.len());
        if dim == 0 {
            return Err(Error::InvalidBody("vertex polytope needs at least one vertex".into()));
        }
        for (j, v) in vertices.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::InvalidBody(format!(
                    "vertex {j} has dimension {}, expected {dim}",
                    v.len()
                )));
            }
            check_finite(v, &format!("vertex {j}"))?;
        }
        if vertices.len() <= dim {
            return Err(Error::InvalidBody(format!(
                "need at least {} vertices in dimension {dim}",
                dim + 1
            )));
        }
        let gens = columns(&vertices, dim);
        // Origin interior with margin 1e-9: every ±1e-9·e_i must be inside.
        for i in 0..dim {
            for sign in [1.0, -1.0] {
                let ok = lp::conic_gauge(&gens, &unit(dim, i, sign))
                    .map(|s| s.value * 1e-9 <= 1.0)
                    .unwrap_or(false);
                if !ok {
                    return Err(Error::InvalidBody(
                        "origin is not in the interior of the vertex hull".into(),
                    ));
                }
            }
        }
        Ok(Self::assemble(dim, BodyKind::VertexPolytope { vertices }, Derived::Generators(gens)))
    }

    /// `[-h, h]^dim` as a halfspace polytope with rows ordered `+e1, -e1, +e2, ...`.
    pub fn cube(dim: usize, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidBody(format!("cube half width must be positive, got {half_width}")));
        }
        let mut rows = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            rows.push(unit(dim, i, 1.0));
            rows.push(unit(dim, i, -1.0));
        }
        Self::halfspace_polytope(rows, vec![half_width; 2 * dim])
    }

    fn assemble(dim: usize, kind: BodyKind, derived: Derived) -> Self {
        Self { dim, kind, derived, radii: OnceLock::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &BodyKind {
        &self.kind
    }

    fn generators(&self) -> &DMatrix<f64> {
        match &self.derived {
            Derived::Generators(g) => g,
            _ => unreachable!("generators requested for a smooth body"),
        }
    }

    fn check_dim(&self, x: &Vector) {
        assert_eq!(x.len(), self.dim, "vector dimension does not match body");
    }

    /// Minkowski gauge `‖x‖_K`.
    pub fn gauge(&self, x: &Vector) -> f64 {
        self.check_dim(x);
        match (&self.kind, &self.derived) {
            (BodyKind::Ball { radius }, _) => x.norm() / radius,
            (BodyKind::Ellipsoid { shape }, _) => x.dot(&(shape * x)).max(0.0).sqrt(),
            (BodyKind::LpBall { p, radius }, _) => lp_norm(x, *p) / radius,
            (BodyKind::HalfspacePolytope { rows, offsets }, _) => rows
                .iter()
                .zip(offsets)
                .map(|(a, b)| a.dot(x) / b)
                .fold(0.0, f64::max),
            (BodyKind::VertexPolytope { .. }, _) => {
                if x.iter().all(|&v| v == 0.0) {
                    return 0.0;
                }
                lp::conic_gauge(self.generators(), x).map_or(f64::INFINITY, |s| s.value)
            }
        }
    }

    /// A subgradient `g ∈ ∂‖x‖_K`, with `⟨g, x⟩ = ‖x‖_K` and `g ∈ K°`.
    pub fn gauge_subgradient(&self, x: &Vector) -> Result<Vector> {
        self.check_dim(x);
        if x.iter().all(|&v| v == 0.0) {
            return Err(Error::ZeroPoint);
        }
        Ok(match (&self.kind, &self.derived) {
            (BodyKind::Ball { radius }, _) => x / (x.norm() * radius),
            (BodyKind::Ellipsoid { shape }, _) => {
                let ax = shape * x;
                let g = x.dot(&ax).sqrt();
                ax / g
            }
            (BodyKind::LpBall { p, radius }, _) => lp_subgradient(x, *p) / *radius,
            (BodyKind::HalfspacePolytope { rows, offsets }, _) => {
                let (i, _) = first_argmax(rows.iter().zip(offsets).map(|(a, b)| a.dot(x) / b));
                &rows[i] / offsets[i]
            }
            (BodyKind::VertexPolytope { .. }, _) => {
                lp::conic_gauge(self.generators(), x)?.dual
            }
        })
    }

    /// Support function `σ_K(c)`.
    pub fn support(&self, c: &Vector) -> f64 {
        self.check_dim(c);
        match (&self.kind, &self.derived) {
            (BodyKind::Ball { radius }, _) => radius * c.norm(),
            (BodyKind::Ellipsoid { .. }, Derived::Ellipsoid { inverse, .. }) => {
                c.dot(&(inverse * c)).max(0.0).sqrt()
            }
            (BodyKind::LpBall { p, radius }, _) => radius * lp_norm(c, conjugate_exponent(*p)),
            (BodyKind::HalfspacePolytope { .. }, _) => {
                if c.iter().all(|&v| v == 0.0) {
                    return 0.0;
                }
                lp::conic_gauge(self.generators(), c).map_or(f64::INFINITY, |s| s.value)
            }
            (BodyKind::VertexPolytope { vertices }, _) => {
                first_argmax(vertices.iter().map(|v| v.dot(c))).1
            }
            _ => unreachable!(),
        }
    }

    /// A maximizer of `⟨c, ·⟩` over the body, with deterministic tie-breaks.
    /// For `c = 0` the anchor point is returned.
    pub fn support_argmax(&self, c: &Vector) -> Vector {
        self.check_dim(c);
        if c.iter().all(|&v| v == 0.0) {
            return self.anchor();
        }
        match (&self.kind, &self.derived) {
            (BodyKind::Ball { radius }, _) => c * (*radius / c.norm()),
            (BodyKind::Ellipsoid { .. }, Derived::Ellipsoid { inverse, .. }) => {
                let ic = inverse * c;
                let s = c.dot(&ic).sqrt();
                ic / s
            }
            (BodyKind::LpBall { p, radius }, _) => lp_argmax(c, *p) * *radius,
            (BodyKind::HalfspacePolytope { .. }, _) => lp::conic_gauge(self.generators(), c)
                .map(|s| s.dual)
                .unwrap_or_else(|_| Vector::zeros(self.dim)),
            (BodyKind::VertexPolytope { vertices }, _) => {
                vertices[first_argmax(vertices.iter().map(|v| v.dot(c))).0].clone()
            }
            _ => unreachable!(),
        }
    }

    /// Deterministic point of the body returned for the zero direction.
    pub fn anchor(&self) -> Vector {
        match &self.kind {
            BodyKind::VertexPolytope { vertices } => vertices[0].clone(),
            _ => self.support_argmax(&unit(self.dim, 0, 1.0)),
        }
    }

    /// Closed-form polar body `K° = {y : ⟨x, y⟩ ≤ 1 ∀x ∈ K}`.
    pub fn polar(&self) -> Result<ConvexBody> {
        match (&self.kind, &self.derived) {
            (BodyKind::Ball { radius }, _) => ConvexBody::ball(self.dim, 1.0 / radius),
            (BodyKind::Ellipsoid { .. }, Derived::Ellipsoid { inverse, .. }) => {
                // symmetrize to absorb round-off in the inverse
                let sym = (inverse + inverse.transpose()) * 0.5;
                ConvexBody::ellipsoid(sym)
            }
            (BodyKind::LpBall { p, radius }, _) => {
                ConvexBody::lp_ball(self.dim, conjugate_exponent(*p), 1.0 / radius)
            }
            (BodyKind::HalfspacePolytope { rows, offsets }, _) => ConvexBody::vertex_polytope(
                rows.iter().zip(offsets).map(|(a, b)| a / *b).collect(),
            ),
            (BodyKind::VertexPolytope { vertices }, _) => {
                ConvexBody::halfspace_polytope(vertices.clone(), vec![1.0; vertices.len()])
            }
            _ => Err(Error::UnsupportedKind(self.kind.name())),
        }
    }

    /// Three-way membership with Euclidean tolerance `delta`, converted to a
    /// gauge tolerance through the inscribed radius.
    pub fn membership(&self, x: &Vector, delta: f64) -> Membership {
        let slack = delta / self.sandwich_radii().r;
        let g = self.gauge(x);
        if g <= 1.0 - slack {
            Membership::Inside
        } else if g >= 1.0 + slack {
            Membership::Outside
        } else {
            Membership::Boundary
        }
    }

    /// Exact inscribed and circumscribed Euclidean radii about the origin.
    pub fn sandwich_radii(&self) -> SandwichRadii {
        *self.radii.get_or_init(|| self.compute_radii())
    }

    fn compute_radii(&self) -> SandwichRadii {
        let d = self.dim as f64;
        match (&self.kind, &self.derived) {
            (BodyKind::Ball { radius }, _) => SandwichRadii { r: *radius, big_r: *radius },
            (BodyKind::Ellipsoid { .. }, Derived::Ellipsoid { eig_min, eig_max, .. }) => {
                SandwichRadii { r: 1.0 / eig_max.sqrt(), big_r: 1.0 / eig_min.sqrt() }
            }
            (BodyKind::LpBall { p, radius }, _) => {
                let factor = d.powf(0.5 - 1.0 / p);
                if *p <= 2.0 {
                    SandwichRadii { r: radius * factor, big_r: *radius }
                } else {
                    SandwichRadii { r: *radius, big_r: radius * factor }
                }
            }
            (BodyKind::HalfspacePolytope { rows, offsets }, _) => {
                let r = rows
                    .iter()
                    .zip(offsets)
                    .map(|(a, b)| b / a.norm())
                    .fold(f64::INFINITY, f64::min);
                let big_r = vertices::enumerate(rows, offsets)
                    .iter()
                    .map(|v| v.norm())
                    .fold(0.0, f64::max);
                SandwichRadii { r, big_r }
            }
            (BodyKind::VertexPolytope { vertices }, _) => {
                let big_r = vertices.iter().map(|v| v.norm()).fold(0.0, f64::max);
                let facets = vertices::enumerate(vertices, &vec![1.0; vertices.len()]);
                let far = facets.iter().map(|w| w.norm()).fold(0.0, f64::max);
                SandwichRadii { r: 1.0 / far, big_r }
            }
            _ => unreachable!(),
        }
    }

    /// `[-σ(-e_i), σ(e_i)]` per coordinate.
    pub fn bounding_box(&self) -> (Vector, Vector) {
        let lo = Vector::from_fn(self.dim, |i, _| -self.support(&unit(self.dim, i, -1.0)));
        let hi = Vector::from_fn(self.dim, |i, _| self.support(&unit(self.dim, i, 1.0)));
        (lo, hi)
    }

    /// Body parameters in their serializable form.
    pub fn to_spec(&self) -> BodySpec {
        BodySpec::from_body(self)
    }
}

fn lp_subgradient(x: &Vector, p: f64) -> Vector {
    if p == 1.0 {
        x.map(|v| if v > 0.0 { 1.0 } else if v < 0.0 { -1.0 } else { 0.0 })
    } else if p.is_infinite() {
        let (i, _) = first_argmax(x.iter().map(|v| v.abs()));
        unit(x.len(), i, x[i].signum())
    } else {
        let n = lp_norm(x, p);
        x.map(|v| v.signum() * (v.abs() / n).powf(p - 1.0))
    }
}

/// Maximizer of `⟨c, ·⟩` over the unit `ℓp` ball.
fn lp_argmax(c: &Vector, p: f64) -> Vector {
    if p == 1.0 {
        let (i, _) = first_argmax(c.iter().map(|v| v.abs()));
        unit(c.len(), i, c[i].signum())
    } else if p.is_infinite() {
        c.map(|v| if v < 0.0 { -1.0 } else { 1.0 })
    } else {
        let q = conjugate_exponent(p);
        let n = lp_norm(c, q);
        c.map(|v| v.signum() * (v.abs() / n).powf(q - 1.0))
    }
}

impl GaugeBody for ConvexBody {
    fn dim(&self) -> usize {
        self.dim
    }
    fn gauge(&self, x: &Vector) -> f64 {
        ConvexBody::gauge(self, x)
    }
    fn bounding_box(&self) -> (Vector, Vector) {
        ConvexBody::bounding_box(self)
    }
}

impl LinearOracle for ConvexBody {
    fn maximize(&self, c: &Vector) -> Result<LinearMax> {
        let point = self.support_argmax(c);
        let value = c.dot(&point);
        Ok(LinearMax { point, value, upper: value.max(self.support(c)) })
    }
}
