//! The `certify`, `curve`, `olo` and `fw` subcommands.

use std::path::Path;

use serde_json::json;

use curvature::certify::{
    check_fn_strong_convexity, check_nonmidpoint, check_set_strong_convexity,
    check_sphere_lipschitz, check_two_convex, check_two_smooth_with, ModulusReport,
};
use curvature::curving::choose_t_for_eps;
use curvature::fw::{fw_solve, FwTrace, Quadratic};
use curvature::online::{
    play_game, regret_report, running_rows, Adversary, AdversaryKind, CertificateStatus,
    FtlLearner, GameTrace, RegretParams, RegretReport, CERTIFICATES,
};
use curvature::rng::{log_uniform, stream_rng, streams, unit_vector};
use curvature::{ConvexBody, CurvedBody, CurvedOracle, GaugeBody, LinearOracle, Vector};

use crate::args::{AdversaryArg, CertifyArgs, CurveArgs, FwArgs, NotionArg, OloArgs};
use crate::config::load_body;
use crate::error::{CliError, Result};
use crate::output::{Artifacts, Cell, Check, Format, Meta, Table};

/// Strong convexity modulus of a Euclidean ball w.r.t. its own gauge.
pub const BALL_LAMBDA: f64 = 0.125;

/// Writes the summary and prints one line per check; true if all pass.
pub fn finish(art: &Artifacts, checks: &[Check]) -> Result<bool> {
    art.summary(checks)?;
    for c in checks {
        println!("{}", c.line());
    }
    Ok(checks.iter().all(|c| c.pass))
}

fn check_dim(what: &str, got: usize, want: usize) -> Result<()> {
    if got == want {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{what} has dimension {got}, the body has {want}")))
    }
}

fn parse_vector(text: &str) -> Result<Vector> {
    let xs = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(format!("bad vector {text:?}: {e}")))?;
    Ok(Vector::from_vec(xs))
}

fn coords(prefix: &str, dim: usize) -> impl Iterator<Item = String> + '_ {
    (1..=dim).map(move |i| format!("{prefix}_{i}"))
}

fn modulus_check(rep: &ModulusReport, name: &str) -> Check {
    let empirical = rep.empirical_modulus.map_or("none".to_string(), |m| format!("{m}"));
    let relation = if rep.notion.is_upper() { "≤" } else { "≥" };
    Check::new(
        name,
        rep.pass,
        format!(
            "empirical {empirical} {relation} claimed {} ({} informative of {} samples)",
            rep.claimed_modulus, rep.informative_samples, rep.samples
        ),
    )
}

fn certify_generic<K: GaugeBody + ?Sized>(
    k: &K,
    reference: Option<&ConvexBody>,
    args: &CertifyArgs,
    seed: u64,
) -> Result<ModulusReport> {
    let (d, n) = (args.modulus, args.samples);
    let rep = match args.notion {
        NotionArg::TwoConvex => check_two_convex(k, d, n, seed)?,
        NotionArg::TwoSmooth => check_two_smooth_with(k, d, n, seed, args.y_radius)?,
        NotionArg::FnStrongConvex => check_fn_strong_convexity(k, d, n, seed)?,
        NotionArg::SetStrongConvex => match reference {
            Some(c) => check_set_strong_convexity(k, c, d, n, seed)?,
            None => check_set_strong_convexity(k, k, d, n, seed)?,
        },
        NotionArg::Nonmidpoint => match reference {
            Some(c) => check_nonmidpoint(k, c, d, n, seed)?,
            None => check_nonmidpoint(k, k, d, n, seed)?,
        },
        NotionArg::SphereLipschitz => unreachable!("handled by the caller"),
    };
    Ok(rep)
}

pub fn certify(args: &CertifyArgs, seed: u64, out: &Path, format: Format) -> Result<bool> {
    let (spec, body) = load_body(&args.body)?;
    let reference = args.reference.as_deref().map(load_body).transpose()?;
    if let Some((_, c)) = &reference {
        check_dim("reference body", c.dim(), body.dim())?;
    }
    let meta = Meta::new(
        "certify",
        &json!({ "args": args, "body": spec, "reference": reference.as_ref().map(|r| &r.0) }),
        seed,
    );
    let art = Artifacts::create(out, format, meta)?;
    let c = reference.as_ref().map(|r| &r.1);
    let rep = match (args.notion, args.t) {
        (NotionArg::SphereLipschitz, None) => check_sphere_lipschitz(&body, args.modulus, args.samples, seed)?,
        (NotionArg::SphereLipschitz, Some(_)) => {
            return Err(CliError::Usage("sphere-lipschitz needs a closed-form body, not K_t".into()))
        }
        (_, Some(t)) => certify_generic(&CurvedBody::inscribed(body, t)?, c, args, seed)?,
        (_, None) => certify_generic(&body, c, args, seed)?,
    };
    art.json("certify", &json!({ "report": rep }))?;
    let name = serde_json::to_value(rep.notion).expect("notion serializes");
    finish(&art, &[modulus_check(&rep, name.as_str().unwrap_or("modulus"))])
}

/// Both sides of `‖x‖_K ≤ ‖x‖_{K_t} ≤ min(‖x‖/r, factor·‖x‖_K)` at one point.
pub fn sandwich_holds(k: &CurvedBody, factor: f64, x: &Vector) -> bool {
    let g = k.gauge(x);
    let gk = k.base().gauge(x);
    let tol = 1e-9 * (1.0 + g);
    gk <= g + tol && g <= x.norm() / k.r() + tol && g <= factor * gk + tol
}

pub fn curve(args: &CurveArgs, seed: u64, out: &Path, format: Format) -> Result<bool> {
    let (spec, body) = load_body(&args.body)?;
    let radii = body.sandwich_radii();
    let r = args.r.unwrap_or(radii.r);
    let big_r = args.big_r.unwrap_or(radii.big_r);
    let (t, flag) = match (args.t, args.eps) {
        (Some(t), _) => (t, None),
        (None, Some(eps)) => {
            let choice = choose_t_for_eps(r, big_r, eps)?;
            (choice.t, choice.flag)
        }
        (None, None) => return Err(CliError::Usage("give --t or --eps".into())),
    };
    let k = CurvedBody::new(body, r, t)?;
    let factor = k.approximation_factor(big_r);
    let dim = k.dim();
    let meta = Meta::new("curve", &json!({ "args": args, "body": spec }), seed);
    let art = Artifacts::create(out, format, meta)?;

    let mut table = Table::new(
        coords("x", dim).chain(["gauge", "curved_gauge", "ball_bound", "factor_bound", "sandwich"].map(String::from)),
    );
    let mut rng = stream_rng(seed, streams::PAIRS);
    let mut violations = 0;
    for _ in 0..args.samples {
        let x = unit_vector(&mut rng, dim) * log_uniform(&mut rng, 1e-2, 1e2);
        let ok = sandwich_holds(&k, factor, &x);
        violations += usize::from(!ok);
        let gk = k.base().gauge(&x);
        let mut row: Vec<Cell> = x.iter().map(|&v| Cell::Num(v)).collect();
        row.extend([gk.into(), k.gauge(&x).into(), (x.norm() / r).into(), (factor * gk).into(), ok.into()]);
        table.push(row);
    }
    art.table("curve_samples", &table)?;

    let mut answers = Vec::new();
    for text in &args.directions {
        let c = parse_vector(text)?;
        check_dim("direction", c.len(), dim)?;
        let res = k.weak_optimize(&c, args.delta, 1_000)?;
        answers.push(json!({ "direction": c.as_slice(), "result": res }));
    }
    art.json(
        "curve",
        &json!({
            "t": t,
            "flag": flag,
            "r": r,
            "R": big_r,
            "approximation_factor": factor,
            "sandwich": { "points": args.samples, "violations": violations },
            "weak_opt": answers,
        }),
    )?;
    let checks = [Check::new("sandwich", violations == 0, format!("{violations} violations in {} points", args.samples))];
    finish(&art, &checks)
}

/// One row per round: gain, action, cumulative gain, regret and every bound.
pub fn trace_table(body: &ConvexBody, trace: &GameTrace, params: RegretParams) -> Table {
    let dim = body.dim();
    let mut table = Table::new(
        ["round".to_string()]
            .into_iter()
            .chain(coords("g", dim))
            .chain(coords("x", dim))
            .chain(["cumulative_gain".to_string(), "regret".to_string()])
            .chain(CERTIFICATES.iter().map(|c| c.to_string())),
    );
    for row in running_rows(body, trace, params) {
        let i = row.round - 1;
        let mut cells = vec![Cell::from(row.round)];
        cells.extend(trace.gains[i].iter().map(|&v| Cell::Num(v)));
        cells.extend(trace.actions[i].iter().map(|&v| Cell::Num(v)));
        cells.push(row.cumulative_gain.into());
        cells.push(row.regret.into());
        cells.extend(row.bounds.iter().map(|&b| Cell::from(b)));
        table.push(cells);
    }
    table
}

/// One check per certificate that applied to at least one report.
pub fn certificate_checks(reports: &[RegretReport]) -> Vec<Check> {
    CERTIFICATES
        .iter()
        .filter_map(|&name| {
            let statuses: Vec<_> = reports.iter().map(|r| &r.certificates[name]).collect();
            let applied = statuses.iter().filter(|c| c.status != CertificateStatus::NotApplicable).count();
            if applied == 0 {
                return None;
            }
            let violated = statuses.iter().filter(|c| c.status == CertificateStatus::Violated).count();
            let worst = reports
                .iter()
                .filter_map(|r| r.certificates[name].bound.map(|b| r.regret / b))
                .filter(|x| x.is_finite())
                .fold(f64::NEG_INFINITY, f64::max);
            let detail = if reports.len() == 1 {
                let b = reports[0].certificates[name].bound.unwrap_or(f64::NAN);
                format!("regret {} vs bound {b}", reports[0].regret)
            } else {
                format!("{violated} violations in {applied} traces, max regret/bound {worst}")
            };
            Some(Check::new(name, violated == 0, detail))
        })
        .collect()
}

pub fn olo(args: &OloArgs, seed: u64, out: &Path, format: Format) -> Result<bool> {
    let (spec, body, default_ball) = match &args.body {
        Some(path) => {
            let (spec, body) = load_body(path)?;
            (spec, body, false)
        }
        None if args.adversary == AdversaryArg::Alternating => {
            let body = ConvexBody::cube(2, 1.0)?;
            (body.to_spec(), body, false)
        }
        None => {
            let body = ConvexBody::ball(args.dim, 1.0)?;
            (body.to_spec(), body, true)
        }
    };
    let kind = match args.adversary {
        AdversaryArg::Growth => AdversaryKind::GrowthCondition { g: args.g, m: args.m, pattern: args.pattern.into() },
        AdversaryArg::Nonneg => AdversaryKind::NonNegative { m: args.m },
        AdversaryArg::Alternating => AdversaryKind::AlternatingBad,
        AdversaryArg::Hinted => AdversaryKind::Hinted { alpha: args.alpha, m: args.m },
    };
    let params = RegretParams {
        lambda: args.lambda.or(default_ball.then_some(BALL_LAMBDA)),
        m: (args.adversary != AdversaryArg::Alternating).then_some(args.m),
        growth: (args.adversary == AdversaryArg::Growth).then_some(args.g),
    };
    let meta = Meta::new("olo", &json!({ "args": args, "body": spec, "params": params }), seed);
    let art = Artifacts::create(out, format, meta)?;
    let adversary = Adversary::new(kind, seed);
    let mut ftl = FtlLearner::on_body(body.clone());
    let trace = play_game(&body, &mut ftl, &adversary, args.horizon)?;
    art.table("olo", &trace_table(&body, &trace, params))?;
    let report = regret_report(&body, &trace, params);
    art.json("olo_report", &json!({ "adversary": adversary, "report": report }))?;
    finish(&art, &certificate_checks(&[report]))
}

/// `f(x_t) - min_{s ≥ t} f(x_s)` never exceeds the certified gap at `x_t`.
pub fn gap_validity(trace: &FwTrace) -> Check {
    let n = trace.objective.len();
    let mut later = f64::INFINITY;
    let mut worst = f64::NEG_INFINITY;
    for t in (0..n).rev() {
        later = later.min(trace.objective[t]);
        let excess = trace.objective[t] - later - trace.certified_gaps[t];
        worst = worst.max(excess / (1.0 + trace.objective[t].abs()));
    }
    Check::new("gap_validity", worst <= 1e-7, format!("max relative excess {worst} over {n} iterates"))
}

pub fn fw_table(trace: &FwTrace) -> Table {
    let mut table = Table::new(["iter", "f", "gap", "certified_gap"]);
    for (i, ((&f, &g), &c)) in trace.objective.iter().zip(&trace.gaps).zip(&trace.certified_gaps).enumerate() {
        table.push(vec![i.into(), f.into(), g.into(), c.into()]);
    }
    table
}

pub fn fw(args: &FwArgs, seed: u64, out: &Path, format: Format) -> Result<bool> {
    let body = match &args.body {
        Some(path) => load_body(path)?.1,
        None => ConvexBody::cube(2, 1.0)?,
    };
    let dim = body.dim();
    check_dim("target", args.target.len(), dim)?;
    let x0 = match &args.x0 {
        Some(x) => {
            check_dim("x0", x.len(), dim)?;
            Vector::from_column_slice(x)
        }
        None => Vector::zeros(dim),
    };
    let meta = Meta::new("fw", &json!({ "args": args, "body": body.to_spec() }), seed);
    let art = Artifacts::create(out, format, meta)?;
    let f = Quadratic::euclidean(Vector::from_column_slice(&args.target));
    let oracle: Box<dyn LinearOracle> = match args.t {
        Some(t) => Box::new(CurvedOracle::new(CurvedBody::inscribed(body, t)?, args.delta)),
        None => Box::new(body),
    };
    let trace = fw_solve(oracle.as_ref(), &f, &x0, args.steps, args.step_rule(), args.tolerance)?;
    art.table("fw", &fw_table(&trace))?;
    art.json(
        "fw_result",
        &json!({
            "last": trace.last().as_slice(),
            "objective": trace.objective.last(),
            "certified_gap": trace.certified_gaps.last(),
            "converged": trace.converged,
            "rule": trace.rule,
        }),
    )?;
    finish(&art, &[gap_validity(&trace)])
}
