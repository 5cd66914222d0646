//! Named experiments. Each writes its tables plus `summary.json` and prints
//! one PASS/FAIL line per check.

use std::path::PathBuf;

use serde_json::json;

use curvature::certify::{check_two_convex, check_two_smooth};
use curvature::curving::MinkowskiRoundedBox;
use curvature::fw::{fw_solve, Quadratic, StepRule};
use curvature::online::{
    play_game, regret_report, Adversary, AdversaryKind, FtlLearner, GameTrace, HintsReduction,
    NoisePattern, RegretParams, RegretReport,
};
use curvature::rng::{log_uniform, stream_rng, unit_vector};
use curvature::{BodySpec, ConvexBody, CurvedBody, CurvedOracle, Vector};

use crate::args::{Params, Preset, PresetArgs};
use crate::commands::{
    certificate_checks, finish, fw_table, gap_validity, sandwich_holds, trace_table, BALL_LAMBDA,
};
use crate::config::{load_body, ExperimentConfig};
use crate::error::{CliError, Result};
use crate::output::{Artifacts, Cell, Check, Format, Meta, Table};

/// Everything a preset run depends on, after merging the config file and flags.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Resolved {
    pub preset: Preset,
    pub body: Option<BodySpec>,
    pub params: Params,
}

pub fn run(args: PresetArgs, seed: Option<u64>, out: Option<PathBuf>, format: Format) -> Result<bool> {
    let cfg = args.config.as_deref().map(ExperimentConfig::load).transpose()?;
    let preset = match (args.name, &cfg) {
        (Some(p), _) => p,
        (None, Some(cfg)) => cfg.preset,
        (None, None) => return Err(CliError::Usage("name a preset or pass --config".into())),
    };
    let (file_params, file_body, file_out, file_seed) = match cfg {
        Some(c) => (c.params, c.body, c.out, c.seed),
        None => (Params::default(), None, None, None),
    };
    let body_path = args.body.or(file_body);
    let body = body_path.as_deref().map(load_body).transpose()?;
    let seed = seed.or(file_seed).unwrap_or(0);
    let out = out.or(file_out).unwrap_or_else(|| PathBuf::from("out"));
    let resolved = Resolved {
        preset,
        body: body.as_ref().map(|b| b.0.clone()),
        params: file_params.merged(args.params),
    };
    let art = Artifacts::create(&out, format, Meta::new(preset.name(), &resolved, seed))?;
    let body = body.map(|b| b.1);
    let p = &resolved.params;
    let checks = match preset {
        Preset::FtlGrowth => ftl_growth(&art, body, p, seed)?,
        Preset::FtlNonneg => ftl_nonneg(&art, body, p, seed)?,
        Preset::FtlBad => ftl_bad(&art, p)?,
        Preset::CurveSandwich => curve_sandwich(&art, body, p, seed)?,
        Preset::CurveDecomp => curve_decomp(&art, body, p, seed)?,
        Preset::HintsReduction => hints(&art, body, p, seed)?,
        Preset::CertifyBall => certify_ball(&art, body, p, seed)?,
        Preset::FwDemo => fw_demo(&art, body, p)?,
    };
    finish(&art, &checks)
}

fn reports_table(rows: &[(u64, usize, &RegretReport)]) -> Table {
    let mut table = Table::new(
        ["seed", "dim", "horizon", "regret", "opt", "realized_gain"]
            .into_iter()
            .map(String::from)
            .chain(curvature::online::CERTIFICATES.iter().map(|c| c.to_string())),
    );
    for &(seed, dim, rep) in rows {
        let mut row = vec![
            seed.into(),
            dim.into(),
            rep.horizon.into(),
            rep.regret.into(),
            rep.opt_value.into(),
            rep.realized_gain.into(),
        ];
        row.extend(curvature::online::CERTIFICATES.iter().map(|&c| Cell::from(rep.certificates[c].bound)));
        table.push(row);
    }
    table
}

fn ftl(body: &ConvexBody, adversary: &Adversary, horizon: usize) -> Result<GameTrace> {
    let mut learner = FtlLearner::on_body(body.clone());
    Ok(play_game(body, &mut learner, adversary, horizon)?)
}

/// A supplied body needs its own λ; the default unit ball has 1/8.
fn lambda_for(body: &Option<ConvexBody>, p: &Params) -> Result<f64> {
    match (p.lambda, body) {
        (Some(l), _) => Ok(l),
        (None, None) => Ok(BALL_LAMBDA),
        (None, Some(_)) => Err(CliError::Usage("a custom body needs --lambda".into())),
    }
}

fn ftl_growth(art: &Artifacts, body: Option<ConvexBody>, p: &Params, seed: u64) -> Result<Vec<Check>> {
    let lambda = lambda_for(&body, p)?;
    let body = match body {
        Some(b) => b,
        None => ConvexBody::ball(2, 1.0)?,
    };
    let horizon = p.horizon.unwrap_or(10_000);
    let (g, m) = (0.5, 1.0);
    let params = RegretParams { lambda: Some(lambda), m: Some(m), growth: Some(g) };
    let mut reports = Vec::new();
    for i in 0..p.seeds.unwrap_or(20) {
        let pattern = if i % 2 == 0 { NoisePattern::Uniform } else { NoisePattern::Alternating };
        let adversary = Adversary::new(AdversaryKind::GrowthCondition { g, m, pattern }, seed + i);
        let trace = ftl(&body, &adversary, horizon)?;
        reports.push((seed + i, regret_report(&body, &trace, params)));
    }
    let rows: Vec<_> = reports.iter().map(|(s, r)| (*s, body.dim(), r)).collect();
    art.table("ftl_growth", &reports_table(&rows))?;
    let reports: Vec<_> = reports.into_iter().map(|(_, r)| r).collect();
    Ok(certificate_checks(&reports))
}

fn ftl_nonneg(art: &Artifacts, body: Option<ConvexBody>, p: &Params, seed: u64) -> Result<Vec<Check>> {
    let lambda = lambda_for(&body, p)?;
    let bodies = match body {
        Some(b) => vec![b],
        None => vec![ConvexBody::ball(2, 1.0)?, ConvexBody::ball(5, 1.0)?],
    };
    let horizon = p.horizon.unwrap_or(10_000);
    let params = RegretParams { lambda: Some(lambda), m: Some(1.0), growth: None };
    let mut reports = Vec::new();
    for body in &bodies {
        for i in 0..p.seeds.unwrap_or(20) {
            let adversary = Adversary::new(AdversaryKind::NonNegative { m: 1.0 }, seed + i);
            let trace = ftl(body, &adversary, horizon)?;
            reports.push((seed + i, body.dim(), regret_report(body, &trace, params)));
        }
    }
    let rows: Vec<_> = reports.iter().map(|(s, d, r)| (*s, *d, r)).collect();
    art.table("ftl_nonneg", &reports_table(&rows))?;
    let reports: Vec<_> = reports.into_iter().map(|(_, _, r)| r).collect();
    Ok(certificate_checks(&reports))
}

fn ftl_bad(art: &Artifacts, p: &Params) -> Result<Vec<Check>> {
    let square = ConvexBody::cube(2, 1.0)?;
    let horizon = p.horizon.unwrap_or(10_000);
    let trace = ftl(&square, &Adversary::new(AdversaryKind::AlternatingBad, 0), horizon)?;
    let params = RegretParams::default();
    art.table("ftl_bad", &trace_table(&square, &trace, params))?;
    let rep = regret_report(&square, &trace, params);
    let mismatches = trace
        .actions
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(i, x)| {
            let want = if i % 2 == 1 { [1.0, 1.0] } else { [1.0, -1.0] };
            x.as_slice() != want
        })
        .count();
    let slope = rep.regret / horizon as f64;
    let mut checks = certificate_checks(std::slice::from_ref(&rep));
    checks.push(Check::new("alternation", mismatches == 0, format!("{mismatches} actions off the alternation")));
    checks.push(Check::new("linear_regret_slope", slope >= 0.05, format!("regret/T = {slope} (needs ≥ 0.05)")));
    Ok(checks)
}

fn cube_dims(body: &Option<ConvexBody>) -> Result<Vec<ConvexBody>> {
    match body {
        Some(b) => Ok(vec![b.clone()]),
        None => [2, 3, 5].into_iter().map(|d| Ok(ConvexBody::cube(d, 1.0)?)).collect(),
    }
}

fn t_grid(p: &Params) -> Vec<f64> {
    p.t.map_or_else(|| vec![0.1, 0.5, 0.9, 1.0], |t| vec![t])
}

fn curve_sandwich(art: &Artifacts, body: Option<ConvexBody>, p: &Params, seed: u64) -> Result<Vec<Check>> {
    let points = p.samples.unwrap_or(10_000);
    let pairs = 10 * points;
    let mut table = Table::new(["dim", "t", "points", "violations", "claimed", "empirical", "two_convex"]);
    let (mut violations, mut convex_ok, mut checked) = (0, true, 0);
    for (b, base) in cube_dims(&body)?.into_iter().enumerate() {
        let big_r = base.sandwich_radii().big_r;
        let dim = base.dim();
        for (j, t) in t_grid(p).into_iter().enumerate() {
            let k = CurvedBody::inscribed(base.clone(), t)?;
            let factor = k.approximation_factor(big_r);
            let mut rng = stream_rng(seed, 100 + (b * 10 + j) as u64);
            let mut bad = 0;
            for _ in 0..points {
                let x = unit_vector(&mut rng, dim) * log_uniform(&mut rng, 1e-3, 1e3);
                bad += usize::from(!sandwich_holds(&k, factor, &x));
            }
            let claimed = t * t / 8.0;
            let rep = check_two_convex(&k, claimed, pairs, seed)?;
            violations += bad;
            checked += points;
            convex_ok &= rep.pass;
            table.push(vec![
                dim.into(),
                t.into(),
                points.into(),
                bad.into(),
                claimed.into(),
                rep.empirical_modulus.into(),
                rep.pass.into(),
            ]);
        }
    }
    art.table("curve_sandwich", &table)?;
    let mut checks = vec![
        Check::new("sandwich", violations == 0, format!("{violations} violations in {checked} points")),
        Check::new("two_convex", convex_ok, format!("K_t against t²/8 with {pairs} pairs per body")),
    ];
    if body.is_none() {
        let mut fails = true;
        for t in [0.1, 0.5, 0.9] {
            let rounded = MinkowskiRoundedBox::new(Vector::from_element(2, 1.0), 1.0, t)?;
            let rep = check_two_convex(&rounded, 1e-4, pairs.min(20_000), seed)?;
            fails &= !rep.pass && rep.witness.is_some();
        }
        checks.push(Check::new(
            "minkowski_rounding_not_strongly_convex",
            fails,
            "the rounded square fails 2-convexity at D = 1e-4",
        ));
    }
    Ok(checks)
}

fn decomposition_bodies() -> Result<Vec<ConvexBody>> {
    let v = |xs: &[f64]| Vector::from_column_slice(xs);
    Ok(vec![
        ConvexBody::ball(3, 1.5)?,
        ConvexBody::cube(3, 1.0)?,
        ConvexBody::lp_ball(3, 1.0, 1.0)?,
        ConvexBody::lp_ball(3, 4.0, 2.0)?,
        ConvexBody::lp_ball(3, f64::INFINITY, 0.5)?,
        BodySpec::Ellipsoid {
            dim: 3,
            matrix: vec![vec![4.0, 1.0, 0.0], vec![1.0, 2.0, 0.5], vec![0.0, 0.5, 1.0]],
        }
        .build()?,
        ConvexBody::vertex_polytope(vec![
            v(&[2.0, 0.0, 0.0]),
            v(&[0.0, 1.0, 0.0]),
            v(&[0.0, 0.0, 1.0]),
            v(&[-1.0, -1.0, -1.0]),
            v(&[0.0, -1.0, 1.0]),
        ])?,
    ])
}

fn brute_support(k: &CurvedBody, c: &Vector, n: usize) -> f64 {
    (0..n)
        .map(|i| {
            let th = std::f64::consts::TAU * i as f64 / n as f64;
            let d = Vector::from_column_slice(&[th.cos(), th.sin()]);
            c.dot(&d) / k.gauge(&d)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn curve_decomp(art: &Artifacts, body: Option<ConvexBody>, p: &Params, seed: u64) -> Result<Vec<Check>> {
    let bodies = match body {
        Some(b) => vec![b],
        None => decomposition_bodies()?,
    };
    let queries = p.samples.unwrap_or(10_000);
    let mut rng = stream_rng(seed, 200);
    let mut table = Table::new(["body", "t", "queries", "max_relative_gap"]);
    let mut worst_all: f64 = 0.0;
    for base in &bodies {
        for t in t_grid(p) {
            let k = CurvedBody::inscribed(base.clone(), t)?;
            let mut worst: f64 = 0.0;
            for _ in 0..queries {
                let y = unit_vector(&mut rng, k.dim()) * log_uniform(&mut rng, 1e-2, 1e2);
                let g = k.gauge(&y);
                let cert = k.polar_decomposition_max(&y)?;
                worst = worst.max((cert.value - g).abs() / g);
            }
            worst_all = worst_all.max(worst);
            table.push(vec![base.kind().name().into(), t.into(), queries.into(), worst.into()]);
        }
    }
    art.table("curve_decomp", &table)?;

    let delta = 1e-4;
    let planar = [
        ConvexBody::cube(2, 1.0)?,
        ConvexBody::lp_ball(2, 1.0, 1.0)?,
        ConvexBody::vertex_polytope(vec![
            Vector::from_column_slice(&[1.0, 0.0]),
            Vector::from_column_slice(&[0.0, 1.0]),
            Vector::from_column_slice(&[-1.0, -1.0]),
        ])?,
    ];
    let mut opt = Table::new(["body", "t", "c_1", "c_2", "value", "upper_bound", "brute_force", "difference"]);
    let mut worst_opt: f64 = 0.0;
    let ts = t_grid(p);
    for i in 0..100 {
        let base = &planar[i % planar.len()];
        let t = ts[i % ts.len()];
        let k = CurvedBody::inscribed(base.clone(), t)?;
        let c = unit_vector(&mut rng, 2);
        let res = k.weak_optimize(&c, delta, 1_000)?;
        let brute = brute_support(&k, &c, 20_000);
        let diff = (res.value - brute).abs();
        worst_opt = worst_opt.max(diff);
        opt.push(vec![
            base.kind().name().into(),
            t.into(),
            c[0].into(),
            c[1].into(),
            res.value.into(),
            res.upper_bound.into(),
            brute.into(),
            diff.into(),
        ]);
    }
    art.table("weak_opt", &opt)?;
    Ok(vec![
        Check::new("decomposition", worst_all <= 1e-9, format!("max relative gap {worst_all}")),
        Check::new("weak_opt", worst_opt <= 2.0 * delta, format!("max |weak - brute| {worst_opt} at δ = {delta}")),
    ])
}

fn hints(art: &Artifacts, body: Option<ConvexBody>, p: &Params, seed: u64) -> Result<Vec<Check>> {
    let base = match body {
        Some(b) => b,
        None => ConvexBody::cube(2, 1.0)?,
    };
    let horizon = p.horizon.unwrap_or(1_000);
    let eps_list = p.eps.clone().unwrap_or_else(|| vec![0.05, 0.1, 0.3]);
    let mut table = Table::new(["eps", "seed", "t", "opt", "opt_curved", "ratio", "holds", "max_action_gauge", "feasible"]);
    let (mut holds, mut feasible, mut runs) = (true, true, 0);
    let mut margin = f64::INFINITY;
    for &eps in &eps_list {
        for i in 0..p.seeds.unwrap_or(4) {
            let mut red = HintsReduction::ftl(base.clone(), eps, 1e-9)?;
            let adversary = Adversary::new(AdversaryKind::Hinted { alpha: 0.5, m: 1.0 }, seed + i);
            let trace = play_game(&base, &mut red, &adversary, horizon)?;
            let rep = red.report(&trace)?;
            holds &= rep.holds;
            feasible &= rep.feasible;
            margin = margin.min(rep.ratio - (1.0 - eps));
            runs += 1;
            table.push(vec![
                eps.into(),
                (seed + i).into(),
                rep.t.into(),
                rep.opt.into(),
                rep.opt_curved.into(),
                rep.ratio.into(),
                rep.holds.into(),
                rep.max_action_gauge.into(),
                rep.feasible.into(),
            ]);
        }
    }
    art.table("hints_reduction", &table)?;
    Ok(vec![
        Check::new("opt_ratio", holds, format!("OPT_Kt/OPT ≥ 1 - ε on {runs} runs, min margin {margin}")),
        Check::new("actions_feasible", feasible, format!("inner actions in K on {runs} runs")),
    ])
}

fn certify_ball(art: &Artifacts, body: Option<ConvexBody>, p: &Params, seed: u64) -> Result<Vec<Check>> {
    let ball = match body {
        Some(b) => b,
        None => ConvexBody::ball(2, 1.0)?,
    };
    let n = p.samples.unwrap_or(100_000);
    let convex_claim = p.lambda.unwrap_or(BALL_LAMBDA);
    let convex = check_two_convex(&ball, convex_claim, n, seed)?;
    let smooth = check_two_smooth(&ball, 0.5, n, seed)?;
    let mut reports = vec![convex.clone(), smooth.clone()];
    let mut checks = vec![
        Check::new("two_convex", convex.pass, modulus_detail(&convex)),
        Check::new("two_smooth", smooth.pass, modulus_detail(&smooth)),
    ];
    // tightness only makes sense at the ball's own moduli
    if p.lambda.is_none() {
        let convex_up = check_two_convex(&ball, convex_claim * 1.05, n, seed)?;
        let smooth_down = check_two_smooth(&ball, 0.5 * 0.95, n, seed)?;
        checks.push(Check::new(
            "two_convex_tight",
            !convex_up.pass && convex_up.witness.is_some(),
            format!("claim {} rejected", convex_up.claimed_modulus),
        ));
        checks.push(Check::new(
            "two_smooth_tight",
            !smooth_down.pass && smooth_down.witness.is_some(),
            format!("claim {} rejected", smooth_down.claimed_modulus),
        ));
        reports.extend([convex_up, smooth_down]);
    }
    art.json("certify_ball", &json!({ "reports": reports }))?;
    Ok(checks)
}

fn modulus_detail(rep: &curvature::certify::ModulusReport) -> String {
    format!(
        "empirical {} vs claimed {}",
        rep.empirical_modulus.map_or("none".into(), |m| m.to_string()),
        rep.claimed_modulus
    )
}

fn fw_demo(art: &Artifacts, body: Option<ConvexBody>, p: &Params) -> Result<Vec<Check>> {
    let base = match body {
        Some(b) => b,
        None => ConvexBody::cube(2, 1.0)?,
    };
    let dim = base.dim();
    let steps = p.horizon.unwrap_or(200);
    let t = p.t.unwrap_or(0.5);
    // off the face normal, so line search zig-zags on the flat body
    let r = base.sandwich_radii().r;
    let mut target = Vector::from_element(dim, 0.2 * r);
    target[0] = 1.3 * r;
    let f = Quadratic::euclidean(target);
    let x0 = Vector::zeros(dim);
    let flat = fw_solve(&base, &f, &x0, steps, StepRule::LineSearch, 0.0)?;
    let curved = CurvedOracle::new(CurvedBody::inscribed(base.clone(), t)?, 1e-9);
    let round = fw_solve(&curved, &f, &x0, steps, StepRule::LineSearch, 0.0)?;
    art.table("fw_flat", &fw_table(&flat))?;
    art.table("fw_curved", &fw_table(&round))?;
    let flat_gap = flat.best_gap().last().copied().unwrap_or(f64::NAN);
    let round_gap = round.best_gap().last().copied().unwrap_or(f64::NAN);
    let mut a = gap_validity(&flat);
    a.name = "gap_validity_flat".into();
    let mut b = gap_validity(&round);
    b.name = "gap_validity_curved".into();
    Ok(vec![
        a,
        b,
        Check::new(
            "curvature_benefit",
            round_gap < flat_gap,
            format!("best gap {round_gap} on K_t vs {flat_gap} on K after {steps} steps"),
        ),
    ])
}
