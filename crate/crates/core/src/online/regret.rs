//! Regret accounting and the regret bounds, evaluated on realized traces.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::oracle::{GaugeBody, Vector};
use crate::rng::{stream_rng, streams};

use super::ftl::{ftl_step, GameTrace};

pub const FTL_BASIC: &str = "ftl_basic";
pub const REGRET_LIP: &str = "regret_lip";
pub const GROWTH: &str = "growth";
pub const NONNEG: &str = "nonneg";
pub const NONNEG_LINEARIZED: &str = "nonneg_linearized";

/// Certificate names in CSV column order.
pub const CERTIFICATES: [&str; 5] = [FTL_BASIC, REGRET_LIP, GROWTH, NONNEG, NONNEG_LINEARIZED];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateStatus {
    Holds,
    Violated,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub bound: Option<f64>,
    pub status: CertificateStatus,
    pub note: Option<String>,
}

impl Certificate {
    fn check(regret: f64, bound: f64, tol: f64) -> Self {
        let status = if regret <= bound + tol {
            CertificateStatus::Holds
        } else {
            CertificateStatus::Violated
        };
        Self { bound: Some(bound), status, note: None }
    }

    fn not_applicable(note: &str) -> Self {
        Self { bound: None, status: CertificateStatus::NotApplicable, note: Some(note.to_string()) }
    }

    pub fn holds(&self) -> bool {
        self.status == CertificateStatus::Holds
    }
}

/// Constants entering the bounds. Unset values skip the bounds that need them,
/// except `m`, which defaults to the largest observed gain norm.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RegretParams {
    /// Strong convexity modulus of the playing set w.r.t. the Euclidean norm.
    pub lambda: Option<f64>,
    pub m: Option<f64>,
    /// Growth constant `G` with `‖s_t‖ ≥ tG`.
    pub growth: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretReport {
    pub regret: f64,
    pub opt_value: f64,
    pub realized_gain: f64,
    pub horizon: usize,
    pub certificates: BTreeMap<String, Certificate>,
    pub lambda: Option<f64>,
    pub m: f64,
    pub growth: Option<f64>,
    /// Linearization constant for non-negative gains, when those bounds apply.
    pub c: Option<f64>,
}

/// `u_i = ‖e_i‖` and `C = max{⟨u, x⟩ : x ≥ 0, ‖x‖ = 1}`, so that
/// `‖x‖ ≤ ⟨u, x⟩ ≤ C‖x‖` on the non-negative orthant.
#[derive(Debug, Clone, PartialEq)]
pub struct Linearization {
    pub u: Vector,
    pub c: f64,
}

/// Computes [`Linearization`] for the norm with unit ball `norm_body`.
///
/// `C` is the maximum of the ratio `⟨u, x⟩ / ‖x‖` over the simplex, found by
/// dense sampling (vertices, edge midpoints, barycenter and random points)
/// followed by compass search from the best candidates.
pub fn nonneg_linearization<B: GaugeBody + ?Sized>(norm_body: &B) -> Linearization {
    let d = norm_body.dim();
    let u = Vector::from_fn(d, |i, _| {
        let mut e = Vector::zeros(d);
        e[i] = 1.0;
        norm_body.gauge(&e)
    });
    let ratio = |x: &Vector| {
        let n = norm_body.gauge(x);
        if n > 0.0 {
            u.dot(x) / n
        } else {
            f64::NEG_INFINITY
        }
    };
    let mut candidates: Vec<Vector> = Vec::new();
    for i in 0..d {
        let mut e = Vector::zeros(d);
        e[i] = 1.0;
        candidates.push(e);
        for j in i + 1..d {
            let mut e = Vector::zeros(d);
            e[i] = 0.5;
            e[j] = 0.5;
            candidates.push(e);
        }
    }
    candidates.push(Vector::from_element(d, 1.0 / d as f64));
    let mut rng = stream_rng(0, streams::AUX);
    for _ in 0..2000 * d {
        let x = Vector::from_fn(d, |_, _| -(1.0 - rng.random::<f64>()).ln());
        let s = x.sum();
        candidates.push(x / s);
    }
    let mut scored: Vec<(f64, Vector)> = candidates.into_iter().map(|x| (ratio(&x), x)).collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = scored[0].0;
    for (start_value, start) in scored.into_iter().take(5) {
        let (mut x, mut fx) = (start, start_value);
        let mut step = 0.1;
        while step > 1e-12 {
            let mut improved = false;
            for i in 0..d {
                for sign in [1.0, -1.0] {
                    let mut y = x.clone();
                    y[i] = (y[i] + sign * step).max(0.0);
                    let fy = ratio(&y);
                    if fy > fx {
                        x = y;
                        fx = fy;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        best = best.max(fx);
    }
    Linearization { u, c: best }
}

/// Both sides of `Σ a_t² / b_t ≤ 5A ln T` with `b_t = a_1 + … + a_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogEstimate {
    pub lhs: f64,
    pub bound: f64,
    pub holds: bool,
}

pub fn log_estimate_check(a: &[f64], cap: f64) -> Result<LogEstimate> {
    if a.len() < 2 {
        return Err(Error::DomainError(format!("need T ≥ 2 terms, got {}", a.len())));
    }
    if let Some((i, x)) = a.iter().enumerate().find(|(_, &x)| !(0.0..=cap).contains(&x)) {
        return Err(Error::DomainError(format!("term {i} = {x} lies outside [0, {cap}]")));
    }
    let mut b = 0.0;
    let mut lhs = 0.0;
    for &x in a {
        b += x;
        if b > 0.0 {
            lhs += x * x / b;
        }
    }
    let bound = 5.0 * cap * (a.len() as f64).ln();
    Ok(LogEstimate { lhs, bound, holds: lhs <= bound })
}

fn is_zero(v: &Vector) -> bool {
    v.iter().all(|&x| x == 0.0)
}

fn nonneg_trace(trace: &GameTrace) -> bool {
    trace.gains.iter().all(|g| g.iter().all(|&v| v >= 0.0))
}

/// `(1/2λ)·Σ‖g_t‖²/‖s_t‖` over a prefix, `None` once some `s_t = 0`.
fn lip_term(g: &Vector, s: &Vector) -> Option<f64> {
    let n = s.norm();
    (n > 0.0).then(|| g.norm_squared() / n)
}

fn growth_bound(m: f64, lambda: f64, g: f64, t: usize) -> f64 {
    m * m / (2.0 * lambda * g) * (1.0 + (t as f64).ln())
}

fn nonneg_bound(c: f64, m: f64, lambda: f64, t: usize) -> f64 {
    5.0 * c * c * m / (2.0 * lambda) * (t as f64).ln()
}

/// The action FTL would play after the last round.
fn next_action(body: &ConvexBody, trace: &GameTrace) -> Vector {
    ftl_step(body, trace.final_sum(), &body.anchor())
}

pub fn regret_report(body: &ConvexBody, trace: &GameTrace, params: RegretParams) -> RegretReport {
    let horizon = trace.horizon();
    let opt_value = body.support(trace.final_sum());
    let realized_gain = trace.realized_gain();
    let regret = opt_value - realized_gain;
    let m = params
        .m
        .unwrap_or_else(|| trace.gains.iter().map(|g| g.norm()).fold(0.0, f64::max));
    let tol = 1e-8 * (1.0 + opt_value.abs());
    let mut certificates = BTreeMap::new();

    let last = next_action(body, trace);
    let stability: f64 = (0..horizon)
        .map(|i| {
            let next = trace.actions.get(i + 1).unwrap_or(&last);
            trace.gains[i].dot(&(next - &trace.actions[i]))
        })
        .sum();
    certificates.insert(FTL_BASIC.to_string(), Certificate::check(regret, stability, tol));

    let mut c_used = None;
    match params.lambda {
        None => {
            for name in [REGRET_LIP, GROWTH, NONNEG, NONNEG_LINEARIZED] {
                certificates.insert(name.to_string(), Certificate::not_applicable("no curvature modulus"));
            }
        }
        Some(lambda) => {
            let lip: Option<f64> = trace
                .gains
                .iter()
                .zip(&trace.prefix_sums)
                .map(|(g, s)| lip_term(g, s))
                .sum();
            let cert = match lip {
                Some(sum) => Certificate::check(regret, sum / (2.0 * lambda), 1e-6 * horizon as f64),
                None => Certificate::not_applicable("some prefix sum is zero"),
            };
            certificates.insert(REGRET_LIP.to_string(), cert);

            let cert = match params.growth {
                Some(g) => Certificate::check(regret, growth_bound(m, lambda, g, horizon), tol),
                None => Certificate::not_applicable("no growth constant"),
            };
            certificates.insert(GROWTH.to_string(), cert);

            if nonneg_trace(trace) && horizon >= 2 {
                let lin = nonneg_linearization(&ConvexBody::ball(body.dim(), 1.0).expect("unit ball"));
                let c = lin.c;
                c_used = Some(c);
                certificates.insert(
                    NONNEG.to_string(),
                    Certificate::check(regret, nonneg_bound(c, m, lambda, horizon), tol),
                );
                let mut fs = 0.0;
                let mut sum = 0.0;
                for g in &trace.gains {
                    let fg = lin.u.dot(g);
                    fs += fg;
                    if fs > 0.0 {
                        sum += fg * fg / fs;
                    }
                }
                certificates.insert(
                    NONNEG_LINEARIZED.to_string(),
                    Certificate::check(regret, c / (2.0 * lambda) * sum, tol),
                );
            } else {
                let why = if horizon < 2 { "horizon below 2" } else { "some gain has a negative coordinate" };
                certificates.insert(NONNEG.to_string(), Certificate::not_applicable(why));
                certificates.insert(NONNEG_LINEARIZED.to_string(), Certificate::not_applicable(why));
            }
        }
    }

    RegretReport {
        regret,
        opt_value,
        realized_gain,
        horizon,
        certificates,
        lambda: params.lambda,
        m,
        growth: params.growth,
        c: c_used,
    }
}

/// Per-round running quantities for tabular output.
#[derive(Debug, Clone, PartialEq)]
pub struct RunningRow {
    pub round: usize,
    pub cumulative_gain: f64,
    pub regret: f64,
    /// Bound values over the prefix, in [`CERTIFICATES`] order.
    pub bounds: [Option<f64>; 5],
}

/// The regret and every bound evaluated on each prefix of the trace.
pub fn running_rows(body: &ConvexBody, trace: &GameTrace, params: RegretParams) -> Vec<RunningRow> {
    let m = params
        .m
        .unwrap_or_else(|| trace.gains.iter().map(|g| g.norm()).fold(0.0, f64::max));
    let last = next_action(body, trace);
    let nonneg = nonneg_trace(trace);
    let lin = (nonneg && params.lambda.is_some())
        .then(|| nonneg_linearization(&ConvexBody::ball(body.dim(), 1.0).expect("unit ball")));
    let mut gain = 0.0;
    let mut stability = 0.0;
    let mut lip = Some(0.0);
    let mut fs = 0.0;
    let mut linearized = 0.0;
    let mut rows = Vec::with_capacity(trace.horizon());
    for i in 0..trace.horizon() {
        let t = i + 1;
        let g = &trace.gains[i];
        let s = &trace.prefix_sums[i];
        gain += trace.round_gains[i];
        let next = trace.actions.get(i + 1).unwrap_or(&last);
        stability += g.dot(&(next - &trace.actions[i]));
        lip = lip.and_then(|acc| lip_term(g, s).map(|x| acc + x));
        let mut bounds = [Some(stability), None, None, None, None];
        if let Some(lambda) = params.lambda {
            bounds[1] = lip.map(|x| x / (2.0 * lambda));
            bounds[2] = params.growth.map(|gr| growth_bound(m, lambda, gr, t));
            if let Some(lin) = &lin {
                let fg = lin.u.dot(g);
                fs += fg;
                if fs > 0.0 {
                    linearized += fg * fg / fs;
                }
                bounds[3] = Some(nonneg_bound(lin.c, m, lambda, t));
                bounds[4] = Some(lin.c / (2.0 * lambda) * linearized);
            }
        }
        let regret = if is_zero(s) { -gain } else { body.support(s) - gain };
        rows.push(RunningRow { round: t, cumulative_gain: gain, regret, bounds });
    }
    rows
}
