//! The curved body `K_t` with `‖x‖²_{K_t} = (1 - t²)‖x‖²_K + t²‖x‖²₂ / r²`.
//!
//! `B(r) ⊆ K_t ⊆ K`, `K_t` is strongly convex with respect to itself, and it
//! moves from `K` at `t = 0` to `B(r)` at `t = 1`.

mod minkowski;
mod weak_opt;

use serde::{Deserialize, Serialize};

use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::oracle::{GaugeBody, LinearMax, LinearOracle, Vector};

pub use minkowski::MinkowskiRoundedBox;
pub use weak_opt::{WeakOptResult, WeakOptStatus};

#[derive(Debug, Clone)]
pub struct CurvedBody {
    base: ConvexBody,
    base_polar: ConvexBody,
    r: f64,
    t: f64,
}

/// Output of the three-step maximization of `⟨y, ·⟩` over the polar of `K_t`.
///
/// `K_t° = √(1 - t²)·K° ⊕₂ t·B(1/r)`, so a maximizer is
/// `√(1 - α)·u + √α·v` with `u, v` maximizing over each summand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionCertificate {
    pub u_star: Vec<f64>,
    pub v_star: Vec<f64>,
    pub alpha_star: f64,
    /// `⟨y, u*⟩`
    pub a: f64,
    /// `⟨y, v*⟩`
    pub b: f64,
    pub value: f64,
}

impl DecompositionCertificate {
    pub fn combined_point(&self) -> Vector {
        let (su, sv) = ((1.0 - self.alpha_star).sqrt(), self.alpha_star.sqrt());
        Vector::from_iterator(
            self.u_star.len(),
            self.u_star.iter().zip(&self.v_star).map(|(u, v)| su * u + sv * v),
        )
    }
}

/// Result of [`choose_t_for_eps`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TChoice {
    pub t: f64,
    pub flag: Option<TFlag>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TFlag {
    /// `R = r`: the body is already a ball and any `t` works.
    DegenerateRatio,
    /// The formula asked for `t > 1`.
    Clamped,
}

/// Smallest `t` with `K ⊆ (1 + ε)·K_t`, from `t² = 2ε / ((R/r)² - 1)`.
pub fn choose_t_for_eps(r: f64, big_r: f64, eps: f64) -> Result<TChoice> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::DomainError(format!("r must be positive, got {r}")));
    }
    if !(big_r >= r && big_r.is_finite()) {
        return Err(Error::DomainError(format!("need R ≥ r, got R = {big_r}, r = {r}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::DomainError(format!("ε must lie in (0, 1), got {eps}")));
    }
    let ratio2 = (big_r / r).powi(2) - 1.0;
    if ratio2 <= 1e-12 {
        return Ok(TChoice { t: 0.0, flag: Some(TFlag::DegenerateRatio) });
    }
    let t2 = 2.0 * eps / ratio2;
    if t2 > 1.0 {
        return Ok(TChoice { t: 1.0, flag: Some(TFlag::Clamped) });
    }
    Ok(TChoice { t: t2.sqrt(), flag: None })
}

impl CurvedBody {
    /// `r` must not exceed the inscribed radius of `base`.
    pub fn new(base: ConvexBody, r: f64, t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::DomainError(format!("t must lie in [0, 1], got {t}")));
        }
        let inscribed = base.sandwich_radii().r;
        if !(r > 0.0) || r > inscribed * (1.0 + 1e-12) {
            return Err(Error::DomainError(format!(
                "r must lie in (0, {inscribed}], got {r}"
            )));
        }
        let base_polar = base.polar()?;
        Ok(Self { base, base_polar, r, t })
    }

    /// Uses the inscribed radius of `base` for `r`.
    pub fn inscribed(base: ConvexBody, t: f64) -> Result<Self> {
        let r = base.sandwich_radii().r;
        Self::new(base, r, t)
    }

    pub fn base(&self) -> &ConvexBody {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn gauge(&self, x: &Vector) -> f64 {
        let t2 = self.t * self.t;
        let k = self.base.gauge(x);
        let e = x.norm() / self.r;
        ((1.0 - t2) * k * k + t2 * e * e).sqrt()
    }

    /// Chain rule on the squared gauge; `⟨g, x⟩ = ‖x‖_{K_t}`.
    pub fn gauge_subgradient(&self, x: &Vector) -> Result<Vector> {
        if x.iter().all(|&v| v == 0.0) {
            return Err(Error::ZeroPoint);
        }
        let t2 = self.t * self.t;
        let value = self.gauge(x);
        let mut g = x * (t2 / (self.r * self.r));
        if t2 < 1.0 {
            let k = self.base.gauge(x);
            g += self.base.gauge_subgradient(x)? * ((1.0 - t2) * k);
        }
        Ok(g / value)
    }

    /// `max_{z ∈ K_t°} ⟨y, z⟩`, computed by maximizing over `K°` and `B(1/r)`
    /// separately and mixing the two in closed form.
    pub fn polar_decomposition_max(&self, y: &Vector) -> Result<DecompositionCertificate> {
        if y.iter().all(|&v| v == 0.0) {
            return Err(Error::ZeroPoint);
        }
        let t = self.t;
        let u = self.base_polar.support_argmax(y) * (1.0 - t * t).sqrt();
        let v = y * (t / (self.r * y.norm()));
        let a = y.dot(&u).max(0.0);
        let b = y.dot(&v).max(0.0);
        let alpha = if a == 0.0 && b == 0.0 { 0.0 } else { b * b / (a * a + b * b) };
        let value = (1.0 - alpha).sqrt() * a + alpha.sqrt() * b;
        Ok(DecompositionCertificate {
            u_star: u.iter().copied().collect(),
            v_star: v.iter().copied().collect(),
            alpha_star: alpha,
            a,
            b,
            value,
        })
    }

    fn initial_cuts(&self) -> Vec<Vector> {
        let (lo, hi) = self.base.bounding_box();
        let d = self.dim();
        let mut cuts = Vec::with_capacity(2 * d);
        for i in 0..d {
            let mut e = Vector::zeros(d);
            e[i] = 1.0 / hi[i];
            cuts.push(e.clone());
            e[i] = 1.0 / lo[i];
            cuts.push(e);
        }
        cuts
    }

    /// δ-precision maximization of `⟨c, ·⟩` over `K_t` by cutting planes
    /// with gauge-subgradient cuts.
    pub fn weak_optimize(&self, c: &Vector, delta: f64, max_iters: usize) -> Result<WeakOptResult> {
        self.check_dim(c)?;
        weak_opt::kelley(
            self.initial_cuts(),
            c,
            delta,
            max_iters,
            |x| self.gauge(x),
            |x| self.gauge_subgradient(x),
        )
    }

    /// Same as [`weak_optimize`](Self::weak_optimize) but every cut is the
    /// combined point of [`polar_decomposition_max`](Self::polar_decomposition_max).
    pub fn weak_optimize_dual_route(
        &self,
        c: &Vector,
        delta: f64,
        max_iters: usize,
    ) -> Result<WeakOptResult> {
        self.check_dim(c)?;
        weak_opt::kelley(
            self.initial_cuts(),
            c,
            delta,
            max_iters,
            |x| self.gauge(x),
            |x| Ok(self.polar_decomposition_max(x)?.combined_point()),
        )
    }

    /// `sqrt(1 + ((R/r)² - 1)·t²)`: `K ⊆ factor·K_t`.
    pub fn approximation_factor(&self, big_r: f64) -> f64 {
        (1.0 + ((big_r / self.r).powi(2) - 1.0) * self.t * self.t).sqrt()
    }

    fn check_dim(&self, c: &Vector) -> Result<()> {
        if c.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: c.len() });
        }
        Ok(())
    }
}

impl GaugeBody for CurvedBody {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn gauge(&self, x: &Vector) -> f64 {
        CurvedBody::gauge(self, x)
    }

    fn bounding_box(&self) -> (Vector, Vector) {
        self.base.bounding_box()
    }
}

/// [`CurvedBody`] behind a linear oracle with a fixed precision.
#[derive(Debug, Clone)]
pub struct CurvedOracle {
    pub body: CurvedBody,
    pub delta: f64,
    pub max_iters: usize,
}

impl CurvedOracle {
    pub fn new(body: CurvedBody, delta: f64) -> Self {
        Self { body, delta, max_iters: 500 }
    }
}

impl GaugeBody for CurvedOracle {
    fn dim(&self) -> usize {
        self.body.dim()
    }

    fn gauge(&self, x: &Vector) -> f64 {
        self.body.gauge(x)
    }

    fn bounding_box(&self) -> (Vector, Vector) {
        self.body.bounding_box()
    }
}

impl LinearOracle for CurvedOracle {
    fn maximize(&self, c: &Vector) -> Result<LinearMax> {
        let res = self
            .body
            .weak_optimize(c, self.delta, self.max_iters)
            .map_err(|e| Error::OracleFailure(Box::new(e)))?;
        let point = res.point_vector().ok_or(Error::OracleFailure(Box::new(Error::DomainError(
            "empty weak-optimization answer".into(),
        ))))?;
        Ok(LinearMax { point, value: res.value, upper: res.upper_bound })
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    use super::*;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    fn square(t: f64) -> CurvedBody {
        CurvedBody::new(ConvexBody::cube(2, 1.0).unwrap(), 1.0, t).unwrap()
    }

    /// `σ_{K_t}(c)` by radially projecting many boundary directions.
    fn brute_support(k: &CurvedBody, c: &Vector, n: usize) -> f64 {
        (0..n)
            .map(|i| {
                let th = std::f64::consts::TAU * i as f64 / n as f64;
                let d = v(&[th.cos(), th.sin()]);
                c.dot(&d) / k.gauge(&d)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn gauge_examples() {
        let k = square(0.5);
        assert_relative_eq!(k.gauge(&v(&[1.0, 1.0])), 1.25f64.sqrt(), max_relative = 1e-14);
        let x = v(&[0.3, -0.7]);
        assert_relative_eq!(square(0.0).gauge(&x), 0.7, max_relative = 1e-14);
        assert_relative_eq!(square(1.0).gauge(&x), x.norm(), max_relative = 1e-14);
    }

    #[test]
    fn subgradient_examples() {
        let ball = CurvedBody::new(ConvexBody::ball(2, 1.0).unwrap(), 1.0, 1.0).unwrap();
        let g = ball.gauge_subgradient(&v(&[3.0, 4.0])).unwrap();
        assert_relative_eq!(g, v(&[0.6, 0.8]), epsilon = 1e-14);
        let g = square(0.5).gauge_subgradient(&v(&[1.0, 0.0])).unwrap();
        assert_relative_eq!(g, v(&[1.0, 0.0]), epsilon = 1e-14);
        let x = v(&[0.4, 0.9]);
        assert_eq!(
            square(0.0).gauge_subgradient(&x).unwrap(),
            square(0.0).base().gauge_subgradient(&x).unwrap()
        );
        assert!(matches!(square(0.5).gauge_subgradient(&v(&[0.0, 0.0])), Err(Error::ZeroPoint)));
    }

    #[test]
    fn decomposition_examples() {
        for t in [0.0, 0.3, 0.8, 1.0] {
            let ball = CurvedBody::new(ConvexBody::ball(2, 1.0).unwrap(), 1.0, t).unwrap();
            let cert = ball.polar_decomposition_max(&v(&[1.0, 0.0])).unwrap();
            assert_relative_eq!(cert.a, (1.0 - t * t).sqrt(), epsilon = 1e-14);
            assert_relative_eq!(cert.b, t, epsilon = 1e-14);
            assert_relative_eq!(cert.value, 1.0, epsilon = 1e-14);
        }
        // A = √0.75·‖y‖_K, B = 0.5·√2, value² = 0.75 + 0.5
        let k = square(0.5);
        let cert = k.polar_decomposition_max(&v(&[1.0, 1.0])).unwrap();
        assert_relative_eq!(cert.a, 0.75f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(cert.b, 0.5 * 2f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(cert.value, 1.25f64.sqrt(), epsilon = 1e-14);

        let cert = square(0.0).polar_decomposition_max(&v(&[1.0, 0.0])).unwrap();
        assert_eq!(cert.alpha_star, 0.0);
        assert_relative_eq!(cert.value, 1.0, epsilon = 1e-14);
        assert!(matches!(k.polar_decomposition_max(&v(&[0.0, 0.0])), Err(Error::ZeroPoint)));
    }

    #[test]
    fn weak_opt_examples() {
        let ball = CurvedBody::new(ConvexBody::ball(2, 1.0).unwrap(), 1.0, 0.4).unwrap();
        let res = ball.weak_optimize(&v(&[0.0, 1.0]), 1e-4, 200).unwrap();
        assert_eq!(res.status, WeakOptStatus::Point);
        assert!((res.value - 1.0).abs() <= 1e-4);
        let p = res.point_vector().unwrap();
        assert!((p - v(&[0.0, 1.0])).norm() < 2e-2);

        let k = square(0.5);
        let c = v(&[1.0, 0.0]);
        let reference = brute_support(&k, &c, 100_000);
        let res = k.weak_optimize(&c, 1e-4, 500).unwrap();
        assert!(res.value <= reference + 1e-9 && res.value >= reference - 2e-4, "{res:?} vs {reference}");
        assert!(res.upper_bound >= reference - 1e-9);
        let dual = k.weak_optimize_dual_route(&c, 1e-4, 500).unwrap();
        assert!((dual.value - res.value).abs() <= 2e-4);

        let c = v(&[0.3, -0.8]);
        let res = square(0.0).weak_optimize(&c, 1e-6, 100).unwrap();
        assert_relative_eq!(res.value, 1.1, epsilon = 1e-6);
    }

    #[test]
    fn weak_opt_iteration_limit_reports_gap() {
        let err = square(0.5).weak_optimize(&v(&[1.0, 0.37]), 1e-12, 2).unwrap_err();
        match err {
            Error::IterationLimit { iters, gap, best_point, .. } => {
                assert_eq!(iters, 2);
                assert!(gap > 1e-12);
                assert_eq!(best_point.len(), 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn choose_t_examples() {
        let choice = choose_t_for_eps(1.0, 2f64.sqrt(), 0.1).unwrap();
        assert_relative_eq!(choice.t, 0.2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(choice.flag, None);
        assert!(choose_t_for_eps(1.0, 2.0, 1e-9).unwrap().t < 1e-4);
        assert_eq!(
            choose_t_for_eps(1.0, 1.0, 0.1).unwrap(),
            TChoice { t: 0.0, flag: Some(TFlag::DegenerateRatio) }
        );
        assert_eq!(choose_t_for_eps(1.0, 1.1, 0.9).unwrap().flag, Some(TFlag::Clamped));
        assert!(choose_t_for_eps(2.0, 1.0, 0.1).is_err());
        assert!(choose_t_for_eps(1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        let cube = ConvexBody::cube(2, 1.0).unwrap();
        assert!(CurvedBody::new(cube.clone(), 1.5, 0.5).is_err());
        assert!(CurvedBody::new(cube.clone(), 1.0, 1.5).is_err());
        assert!(CurvedBody::new(cube, 0.0, 0.5).is_err());
    }

    fn zoo() -> Vec<ConvexBody> {
        vec![
            ConvexBody::cube(3, 1.0).unwrap(),
            ConvexBody::lp_ball(3, 1.0, 1.0).unwrap(),
            ConvexBody::lp_ball(3, 3.0, 2.0).unwrap(),
            ConvexBody::ellipsoid(nalgebra::DMatrix::from_diagonal(&v(&[4.0, 1.0, 0.25]))).unwrap(),
            ConvexBody::vertex_polytope(vec![
                v(&[1.0, 0.0, 0.0]),
                v(&[0.0, 1.0, 0.0]),
                v(&[0.0, 0.0, 1.0]),
                v(&[-1.0, -1.0, -1.0]),
            ])
            .unwrap(),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sandwich_and_decomposition(
            which in 0usize..5,
            t in 0.0f64..=1.0,
            xs in prop::array::uniform3(-3.0f64..3.0),
        ) {
            let x = v(&xs);
            prop_assume!(x.norm() > 1e-6);
            let base = zoo().swap_remove(which);
            let radii = base.sandwich_radii();
            let k = CurvedBody::inscribed(base, t).unwrap();
            let g = k.gauge(&x);
            let gk = k.base().gauge(&x);
            let tol = 1e-9 * (1.0 + g);
            prop_assert!(gk <= g + tol);
            prop_assert!(g <= x.norm() / k.r() + tol);
            prop_assert!(g <= k.approximation_factor(radii.big_r) * gk + tol);

            let cert = k.polar_decomposition_max(&x).unwrap();
            prop_assert!((cert.value - g).abs() <= 1e-9 * (1.0 + g));
            // the combined point lies in the polar: σ_{K_t} at it is at most 1
            let z = cert.combined_point();
            let sub = k.gauge_subgradient(&x).unwrap();
            prop_assert!((x.dot(&sub) - g).abs() <= 1e-9 * (1.0 + g));
            prop_assert!((x.dot(&z) - g).abs() <= 1e-9 * (1.0 + g));
        }

        #[test]
        fn subgradient_inequality(
            which in 0usize..5,
            t in 0.0f64..=1.0,
            xs in prop::array::uniform3(-3.0f64..3.0),
            ys in prop::array::uniform3(-3.0f64..3.0),
        ) {
            let (x, y) = (v(&xs), v(&ys));
            prop_assume!(x.norm() > 1e-6);
            let k = CurvedBody::inscribed(zoo().swap_remove(which), t).unwrap();
            let g = k.gauge_subgradient(&x).unwrap();
            prop_assert!(k.gauge(&y) >= g.dot(&y) - 1e-8 * (1.0 + y.norm()));
        }
    }
}
