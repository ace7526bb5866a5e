//! Subcommand drivers: each builds a versioned JSON report and a verdict.

use croftonlab_core::coeffcore::{
    check_epsilon_independence, crofton_closed_form, crofton_coeffs, crofton_variation_coeffs, gauss_bonnet_coeffs,
    solve_crofton_system, total_gauss_coeffs, verify_cancellation_identity,
};
use croftonlab_core::exec::ChunkMap;
use croftonlab_core::geom::Shape;
use croftonlab_core::valuations::{ball_closed_form, hermitian_volumes_with};
use serde_json::{json, Value};

use crate::checks;
use crate::cli::{CheckArgs, CheckKind, CoeffsArgs, RunConfig, ShapeSpec, VolumesArgs, MAX_TABLE_N};
use crate::json;

pub const SCHEMA_VERSION: u32 = 1;

/// A finished report; `passed` is `None` for commands without a gate.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub value: Value,
    pub passed: Option<bool>,
}

fn report(cfg: &RunConfig, seed: Option<u64>, tolerance: Option<f64>, passed: Option<bool>, result: Value) -> Report {
    let value = json!({
        "schemaVersion": SCHEMA_VERSION,
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "seed": seed,
        "tolerance": tolerance,
        "passed": passed,
        "result": result,
    });
    Report { value, passed }
}

pub fn cmd_coeffs(args: &CoeffsArgs) -> anyhow::Result<Report> {
    let cfg = RunConfig::from_common("coeffs", &args.common, None)?;
    if args.identities {
        anyhow::ensure!((2..=MAX_TABLE_N).contains(&args.max_n), "--max-n must be in 2..={MAX_TABLE_N}");
        let mut items = Vec::new();
        let mut all = true;
        for n in 1..=args.max_n {
            for r in 1..=n {
                let solver = if r < n {
                    Some(solve_crofton_system(n, r)? == crofton_closed_form(n, r)?)
                } else {
                    None
                };
                let cancellation = (r < n).then(|| verify_cancellation_identity(n, r));
                let eps_free = check_epsilon_independence(n, r)?;
                all &= solver.unwrap_or(true) && cancellation.unwrap_or(true) && eps_free;
                items.push(json!({
                    "n": n, "r": r,
                    "solverMatchesClosedForm": solver,
                    "cancellationIdentity": cancellation,
                    "epsilonIndependent": eps_free,
                }));
            }
        }
        return Ok(report(&cfg, None, None, Some(all), json!({ "maxN": args.max_n, "items": items })));
    }
    let n = cfg.n;
    anyhow::ensure!(n <= MAX_TABLE_N, "--n must be at most {MAX_TABLE_N}");
    let any = args.crofton || args.gb || args.total_gauss || args.variation;
    let rs: Vec<usize> = match cfg.r {
        Some(r) => vec![r],
        None => (1..n).collect(),
    };
    let mut tables = Vec::new();
    if args.gb || !any {
        tables.push(json::coeff_table(&gauss_bonnet_coeffs(n)?));
    }
    for &r in rs.iter().filter(|&&r| r < n) {
        if args.crofton || !any {
            tables.push(json::coeff_table(&crofton_coeffs(n, r)?));
        }
        if args.total_gauss || !any {
            tables.push(json::coeff_table(&total_gauss_coeffs(n, r)?));
        }
        if args.variation || !any {
            tables.push(json::coeff_table(&crofton_variation_coeffs(n, r)?));
        }
    }
    // a single table reports its rows directly so CSV gets one row per entry
    let result = if tables.len() == 1 { tables.remove(0) } else { json!({ "tables": tables }) };
    Ok(report(&cfg, None, None, None, result))
}

pub fn cmd_volumes<E: ChunkMap>(exec: &E, args: &VolumesArgs) -> anyhow::Result<Report> {
    let cfg = RunConfig::from_common("volumes", &args.common, None)?;
    let shape = cfg.build_shape()?;
    let result = match (&shape, args.closed_form) {
        (Shape::Ball(b), true) => json!({ "method": "closed-form", "table": json::valuation_table(&ball_closed_form(b)) }),
        (Shape::Ellipsoid(_), true) => anyhow::bail!("--closed-form applies to balls"),
        (_, false) => {
            let table = hermitian_volumes_with(exec, &shape, cfg.level);
            let convergence = if cfg.level > 0 {
                let coarse = hermitian_volumes_with(exec, &shape, cfg.level - 1);
                json!({ "coarseLevel": cfg.level - 1, "maxRelDiff": table.max_rel_diff(&coarse, 1e-12) })
            } else {
                Value::Null
            };
            json!({ "method": "quadrature", "table": json::valuation_table(&table), "convergence": convergence })
        }
    };
    Ok(report(&cfg, None, None, None, result))
}

fn default_samples(kind: CheckKind) -> Option<u64> {
    match kind {
        CheckKind::CroftonMc => Some(1_000_000),
        CheckKind::TotalGauss | CheckKind::GrassmannPointwise => Some(100_000),
        _ => None,
    }
}

fn is_ball(cfg: &RunConfig) -> bool {
    matches!(cfg.shape, ShapeSpec::Ball { .. })
}

pub fn cmd_check<E: ChunkMap>(exec: &E, args: &CheckArgs) -> anyhow::Result<Report> {
    let name = format!("check {}", serde_json::to_value(args.kind)?.as_str().unwrap_or_default());
    let cfg = RunConfig::from_common(&name, &args.common, default_samples(args.kind))?;
    match args.kind {
        CheckKind::CroftonMc => {
            let tol = cfg.tol.unwrap_or(3.0);
            let shape = cfg.build_shape()?;
            let res = checks::crofton_mc(exec, &shape, cfg.plane_dim()?, cfg.level, cfg.samples.expect("sampling check"), cfg.seed)?;
            let passed = res.target.z_score.abs() < tol;
            Ok(report(&cfg, Some(cfg.seed), Some(tol), Some(passed), serde_json::to_value(res)?))
        }
        CheckKind::GaussBonnet => {
            let tol = cfg.tol.unwrap_or(if is_ball(&cfg) { 1e-8 } else { 1e-6 });
            let shape = cfg.build_shape()?;
            let res = checks::gauss_bonnet(&checks::valuations(exec, &shape, cfg.level))?;
            let passed = res.relative_residual.abs() < tol && res.relative_residual_mean_curvature.abs() < tol;
            Ok(report(&cfg, None, Some(tol), Some(passed), serde_json::to_value(res)?))
        }
        CheckKind::GammaB => {
            let tol = cfg.tol.unwrap_or(1e-9);
            let shape = cfg.build_shape()?;
            let items = checks::gamma_b(&checks::valuations(exec, &shape, cfg.level));
            let passed = items.iter().all(|i| i.rel_residual < tol);
            Ok(report(&cfg, None, Some(tol), Some(passed), json!({ "items": items })))
        }
        CheckKind::Variation => {
            let tol = cfg.tol.unwrap_or(if is_ball(&cfg) { 1e-6 } else { 1e-4 });
            let shape = cfg.build_shape()?;
            let flow = checks::flow_for(&shape, &args.stretch)?;
            let items = checks::variation(exec, &shape, &flow, cfg.level)?;
            let passed = items.iter().all(|i| i.rel_err < tol);
            Ok(report(&cfg, None, Some(tol), Some(passed), json!({ "items": items })))
        }
        CheckKind::CroftonVariation => {
            let tol = cfg.tol.unwrap_or(if is_ball(&cfg) { 1e-6 } else { 1e-4 });
            let shape = cfg.build_shape()?;
            let flow = checks::flow_for(&shape, &args.stretch)?;
            let res = checks::crofton_variation(&shape, &flow, cfg.plane_dim()?, cfg.level)?;
            let passed = res.rel_err < tol;
            Ok(report(&cfg, None, Some(tol), Some(passed), serde_json::to_value(res)?))
        }
        CheckKind::TotalGauss => {
            let tol = cfg.tol.unwrap_or(3.0);
            let shape = cfg.build_shape()?;
            let nodes = 32 << cfg.level;
            let res = checks::total_gauss(exec, &shape, cfg.plane_dim()?, cfg.level, nodes, cfg.samples.expect("sampling check"), cfg.seed)?;
            let passed = res.ratio_z_score.abs() < tol && res.z_score.abs() < tol;
            Ok(report(&cfg, Some(cfg.seed), Some(tol), Some(passed), serde_json::to_value(res)?))
        }
        CheckKind::GrassmannPointwise => {
            let tol = cfg.tol.unwrap_or(3.0);
            let r = cfg.plane_dim()?;
            let res = checks::grassmann_pointwise(exec, cfg.n, r, cfg.samples.expect("sampling check"), cfg.seed)?;
            let passed = res.ratio_z_score.abs() < tol && res.scalar_case_error < 1e-12;
            Ok(report(&cfg, Some(cfg.seed), Some(tol), Some(passed), serde_json::to_value(res)?))
        }
    }
}
