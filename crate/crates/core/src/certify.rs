//! Sampling certificates for curvature moduli.
//!
//! Each check draws points from the body, evaluates the defining ratio of a
//! curvature notion and reports the worst value seen. A PASS only means no
//! violation was found among the samples; it is not a proof.
//!
//! Pairs are drawn uniformly from the body (rejection from the bounding box)
//! except for every fifth sample, which is a boundary pair: either two nearby
//! boundary points with log-uniform separation or a roughly antipodal pair.
//! Extremal ratios live on the boundary.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::oracle::{GaugeBody, Vector};
use crate::rng::{log_uniform, stream_rng, streams, unit_vector, SeededRng};

/// Slack allowed between the empirical and the claimed modulus.
pub const VERDICT_TOL: f64 = 1e-7;
/// Pairs closer than this (in the reference gauge) carry no information.
pub const MIN_SEPARATION: f64 = 1e-6;
const MIN_ACCEPTANCE: f64 = 1e-6;
/// Attempts before a low acceptance rate is trusted.
const MIN_ATTEMPTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Notion {
    TwoConvex,
    TwoSmooth,
    SetStrongConvex,
    FnStrongConvex,
    SphereLipschitz,
    NonMidpoint,
}

impl Notion {
    /// Whether the claimed modulus is an upper bound on the ratio rather than a lower bound.
    pub fn is_upper(self) -> bool {
        matches!(self, Notion::TwoSmooth)
    }
}

/// The sample attaining the empirical modulus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub points: Vec<Vec<f64>>,
    /// The mixing weight α or μ for notions that sample one.
    pub weight: Option<f64>,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusReport {
    pub notion: Notion,
    pub claimed_modulus: f64,
    /// Worst ratio over informative samples, `None` if there were none.
    pub empirical_modulus: Option<f64>,
    pub witness: Option<Witness>,
    pub samples: usize,
    pub informative_samples: usize,
    pub seed: u64,
    pub pass: bool,
    pub note: String,
}

struct Worst {
    upper: bool,
    ratio: Option<f64>,
    witness: Option<Witness>,
    informative: usize,
}

impl Worst {
    fn new(upper: bool) -> Self {
        Self { upper, ratio: None, witness: None, informative: 0 }
    }

    fn offer(&mut self, ratio: f64, points: &[&Vector], weight: Option<f64>) {
        self.informative += 1;
        let worse = match self.ratio {
            None => true,
            Some(r) if self.upper => ratio > r,
            Some(r) => ratio < r,
        };
        if worse {
            self.ratio = Some(ratio);
            self.witness = Some(Witness {
                points: points.iter().map(|p| p.iter().copied().collect()).collect(),
                weight,
                ratio,
            });
        }
    }

    fn report(self, notion: Notion, claimed: f64, samples: usize, seed: u64) -> ModulusReport {
        let pass = match self.ratio {
            None => true,
            Some(r) if notion.is_upper() => r <= claimed + VERDICT_TOL,
            Some(r) => r >= claimed - VERDICT_TOL,
        };
        let note = if pass {
            "no violation among the samples; this is evidence, not a proof".to_string()
        } else {
            "violated by the witness".to_string()
        };
        ModulusReport {
            notion,
            claimed_modulus: claimed,
            empirical_modulus: self.ratio,
            witness: self.witness,
            samples,
            informative_samples: self.informative,
            seed,
            pass,
            note,
        }
    }
}

/// Draws points from a body given only its gauge and bounding box.
pub struct Sampler<'a, B: GaugeBody + ?Sized> {
    body: &'a B,
    lo: Vector,
    hi: Vector,
    rng: SeededRng,
    attempts: usize,
    accepted: usize,
}

impl<'a, B: GaugeBody + ?Sized> Sampler<'a, B> {
    pub fn new(body: &'a B, seed: u64, stream: u64) -> Self {
        let (lo, hi) = body.bounding_box();
        Self { body, lo, hi, rng: stream_rng(seed, stream), attempts: 0, accepted: 0 }
    }

    pub fn rng(&mut self) -> &mut SeededRng {
        &mut self.rng
    }

    /// Uniform point of the body.
    pub fn uniform(&mut self) -> Result<Vector> {
        let d = self.lo.len();
        loop {
            self.attempts += 1;
            let x = Vector::from_fn(d, |i, _| self.rng.random_range(self.lo[i]..=self.hi[i]));
            if self.body.gauge(&x) <= 1.0 {
                self.accepted += 1;
                return Ok(x);
            }
            if self.attempts >= MIN_ATTEMPTS {
                let acceptance = self.accepted as f64 / self.attempts as f64;
                if acceptance < MIN_ACCEPTANCE {
                    return Err(Error::DegenerateBody { acceptance });
                }
            }
        }
    }

    /// The boundary point in direction `dir`.
    pub fn radial(&self, dir: &Vector) -> Vector {
        dir / self.body.gauge(dir)
    }

    pub fn boundary(&mut self) -> Vector {
        let u = unit_vector(&mut self.rng, self.lo.len());
        self.radial(&u)
    }

    /// Two boundary points whose directions differ by a log-uniform amount.
    pub fn near_boundary_pair(&mut self) -> (Vector, Vector) {
        let d = self.lo.len();
        let u = unit_vector(&mut self.rng, d);
        let w = unit_vector(&mut self.rng, d);
        // the orthogonal part keeps the angular separation near `s`
        let w = &w - &u * u.dot(&w);
        let w = if w.norm() > 1e-12 { w.normalize() } else { w };
        let s = log_uniform(&mut self.rng, 1e-3, 1.0);
        let v = &u + w * s;
        (self.radial(&u), self.radial(&v))
    }

    pub fn antipodal_pair(&mut self) -> (Vector, Vector) {
        let d = self.lo.len();
        let u = unit_vector(&mut self.rng, d);
        let w = unit_vector(&mut self.rng, d);
        let s = log_uniform(&mut self.rng, 1e-3, 0.5);
        let v = -&u + w * s;
        (self.radial(&u), self.radial(&v))
    }

    /// Sample `i` of a pair stream: 20% boundary enrichment, the rest uniform.
    pub fn pair(&mut self, i: usize) -> Result<(Vector, Vector)> {
        match i % 10 {
            0 => Ok(self.near_boundary_pair()),
            5 => Ok(self.antipodal_pair()),
            _ => Ok((self.uniform()?, self.uniform()?)),
        }
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::DomainError("sample count must be at least 1".into()));
    }
    Ok(())
}

/// `min (1 - ‖(x+y)/2‖) / ‖x - y‖²` over pairs of the unit ball of the gauge.
pub fn check_two_convex<B: GaugeBody + ?Sized>(
    body: &B,
    claimed: f64,
    n: usize,
    seed: u64,
) -> Result<ModulusReport> {
    check_n(n)?;
    let mut sampler = Sampler::new(body, seed, streams::PAIRS);
    let mut worst = Worst::new(false);
    for i in 0..n {
        let (x, y) = sampler.pair(i)?;
        let dist = body.gauge(&(&x - &y));
        if dist <= MIN_SEPARATION {
            continue;
        }
        let mid = (&x + &y) * 0.5;
        worst.offer((1.0 - body.gauge(&mid)) / (dist * dist), &[&x, &y], None);
    }
    Ok(worst.report(Notion::TwoConvex, claimed, n, seed))
}

/// [`check_two_smooth_with`] with perturbations up to gauge 2.
pub fn check_two_smooth<B: GaugeBody + ?Sized>(
    body: &B,
    claimed: f64,
    n: usize,
    seed: u64,
) -> Result<ModulusReport> {
    check_two_smooth_with(body, claimed, n, seed, 2.0)
}

/// `max ((‖x+y‖ + ‖x-y‖)/2 - 1) / ‖y‖²` over boundary `x` and `‖y‖ ≤ y_radius`.
pub fn check_two_smooth_with<B: GaugeBody + ?Sized>(
    body: &B,
    claimed: f64,
    n: usize,
    seed: u64,
    y_radius: f64,
) -> Result<ModulusReport> {
    check_n(n)?;
    if !(y_radius > 0.0) {
        return Err(Error::DomainError(format!("y radius must be positive, got {y_radius}")));
    }
    let mut sampler = Sampler::new(body, seed, streams::PAIRS);
    let mut worst = Worst::new(true);
    let lo = (1e-3f64).min(y_radius / 2.0);
    for i in 0..n {
        let x = sampler.boundary();
        let dir = sampler.boundary();
        let rho = if i % 2 == 0 {
            log_uniform(sampler.rng(), lo, y_radius)
        } else {
            sampler.rng().random_range(0.0..=y_radius)
        };
        let y = dir * rho;
        let gy = body.gauge(&y);
        if gy <= MIN_SEPARATION {
            continue;
        }
        let avg = 0.5 * (body.gauge(&(&x + &y)) + body.gauge(&(&x - &y)));
        worst.offer((avg - 1.0) / (gy * gy), &[&x, &y], None);
    }
    Ok(worst.report(Notion::TwoSmooth, claimed, n, seed))
}

/// Largest `λ ≥ 0` with `gauge(base + λ·step) ≤ 1`, by doubling then bisection.
fn max_inflation<B: GaugeBody + ?Sized>(body: &B, base: &Vector, step: &Vector) -> f64 {
    if body.gauge(base) > 1.0 {
        return 0.0;
    }
    let inside = |l: f64| body.gauge(&(base + step * l)) <= 1.0;
    let mut hi = 1.0;
    while inside(hi) {
        hi *= 2.0;
        if hi > 1e300 {
            return hi;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    lo
}

/// Largest `λ̂` with `(x+y)/2 + λ̂‖x - y‖²_C·w ∈ K` over sampled pairs and
/// boundary points `w` of `C`. The outward radial `w` is always included.
pub fn check_set_strong_convexity<K, C>(
    k: &K,
    c: &C,
    claimed: f64,
    n: usize,
    seed: u64,
) -> Result<ModulusReport>
where
    K: GaugeBody + ?Sized,
    C: GaugeBody + ?Sized,
{
    inflation_check(k, c, claimed, n, seed, Notion::SetStrongConvex)
}

/// Non-midpoint variant: `μx + (1-μ)y + 4λ̂μ(1-μ)‖x - y‖²_C·w ∈ K`.
pub fn check_nonmidpoint<K, C>(
    k: &K,
    c: &C,
    claimed: f64,
    n: usize,
    seed: u64,
) -> Result<ModulusReport>
where
    K: GaugeBody + ?Sized,
    C: GaugeBody + ?Sized,
{
    inflation_check(k, c, claimed, n, seed, Notion::NonMidpoint)
}

fn inflation_check<K, C>(
    k: &K,
    c: &C,
    claimed: f64,
    n: usize,
    seed: u64,
    notion: Notion,
) -> Result<ModulusReport>
where
    K: GaugeBody + ?Sized,
    C: GaugeBody + ?Sized,
{
    check_n(n)?;
    if k.dim() != c.dim() {
        return Err(Error::DimensionMismatch { expected: k.dim(), got: c.dim() });
    }
    let mut sampler = Sampler::new(k, seed, streams::PAIRS);
    let mut aux = stream_rng(seed, streams::AUX);
    let mut worst = Worst::new(false);
    for i in 0..n {
        let (x, y) = sampler.pair(i)?;
        let mu = match notion {
            Notion::NonMidpoint => aux.random_range(0.0..=1.0),
            _ => 0.5,
        };
        let dist = c.gauge(&(&x - &y));
        let spread = 4.0 * mu * (1.0 - mu);
        if dist <= MIN_SEPARATION || spread <= 1e-9 {
            continue;
        }
        let z = &x * mu + &y * (1.0 - mu);
        let scale = spread * dist * dist;
        let random_w = {
            let u = unit_vector(&mut aux, k.dim());
            &u / c.gauge(&u)
        };
        let mut candidates = vec![random_w];
        if z.iter().any(|&v| v != 0.0) {
            candidates.push(&z / c.gauge(&z));
        }
        for w in &candidates {
            let lambda = max_inflation(k, &z, &(w * scale));
            let weight = (notion == Notion::NonMidpoint).then_some(mu);
            worst.offer(lambda, &[&x, &y, w], weight);
        }
    }
    Ok(worst.report(notion, claimed, n, seed))
}

/// `min [αf(x) + (1-α)f(y) - f(αx + (1-α)y)] / (α(1-α)‖x - y‖²)` for `f = ‖·‖²`.
pub fn check_fn_strong_convexity<B: GaugeBody + ?Sized>(
    body: &B,
    claimed: f64,
    n: usize,
    seed: u64,
) -> Result<ModulusReport> {
    check_n(n)?;
    let mut sampler = Sampler::new(body, seed, streams::PAIRS);
    let mut aux = stream_rng(seed, streams::AUX);
    let f = |v: &Vector| body.gauge(v).powi(2);
    let mut worst = Worst::new(false);
    for i in 0..n {
        let (x, y) = sampler.pair(i)?;
        let alpha: f64 = aux.random_range(0.0..=1.0);
        let dist = body.gauge(&(&x - &y));
        let weight = alpha * (1.0 - alpha);
        // below this the gap is lost to cancellation
        if dist <= MIN_SEPARATION || weight * dist * dist <= 1e-9 {
            continue;
        }
        let z = &x * alpha + &y * (1.0 - alpha);
        let gap = alpha * f(&x) + (1.0 - alpha) * f(&y) - f(&z);
        worst.offer(gap / (weight * dist * dist), &[&x, &y], Some(alpha));
    }
    Ok(worst.report(Notion::FnStrongConvex, claimed, n, seed))
}

/// `min ‖u - v‖ / (4‖∇σ(u) - ∇σ(v)‖)` over Euclidean unit pairs; a body with
/// sphere-Lipschitz modulus `λ` has `‖∇σ(u) - ∇σ(v)‖ ≤ ‖u - v‖ / 4λ`.
pub fn check_sphere_lipschitz(
    body: &ConvexBody,
    claimed: f64,
    n: usize,
    seed: u64,
) -> Result<ModulusReport> {
    check_n(n)?;
    let d = body.dim();
    let mut rng = stream_rng(seed, streams::PAIRS);
    let mut worst = Worst::new(false);
    for i in 0..n {
        let u = unit_vector(&mut rng, d);
        let v = if i % 2 == 0 {
            let w = unit_vector(&mut rng, d);
            let s = log_uniform(&mut rng, 1e-4, 1.0);
            let v = &u + w * s;
            v.normalize()
        } else {
            unit_vector(&mut rng, d)
        };
        let du = (&u - &v).norm();
        if du <= MIN_SEPARATION {
            continue;
        }
        let da = (body.support_argmax(&u) - body.support_argmax(&v)).norm();
        let ratio = if da == 0.0 { f64::MAX } else { du / (4.0 * da) };
        worst.offer(ratio, &[&u, &v], None);
    }
    Ok(worst.report(Notion::SphereLipschitz, claimed, n, seed))
}
