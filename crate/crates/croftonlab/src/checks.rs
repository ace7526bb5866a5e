//! The numerical checks behind `croftonlab check`, as typed results.

use croftonlab_core::coeffcore::{sphere_volume_coeff, ValKey};
use croftonlab_core::exec::ChunkMap;
use croftonlab_core::extalg::SffMatrix;
use croftonlab_core::geom::{AmbientSpace, GeodesicBall, Shape};
use croftonlab_core::planes::{
    calibrate, chi_measure_estimate_with, complex_gaussian, crofton_rhs, grassmann_density_combination,
    grassmann_sigma_average_with, sample_rng, total_gauss_estimate_with, total_gauss_rhs, z_score, Calibration,
    MCEstimate, PlaneSampler,
};
use croftonlab_core::valuations::{
    ball_closed_form, check_gamma_b_relation, gauss_bonnet_residual, hermitian_volumes_with, ValuationTable,
};
use croftonlab_core::varcheck::{check_variations_with, crofton_variation_check, sweep_ratios, Flow, VariationRow};
use nalgebra::DMatrix;
use serde::Serialize;

/// Serializable copy of a Monte Carlo estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

impl From<MCEstimate> for Estimate {
    fn from(e: MCEstimate) -> Self {
        Self { mean: e.mean, stderr: e.stderr, samples: e.samples, seed: e.seed }
    }
}

pub fn key_name(key: ValKey) -> String {
    match key {
        ValKey::B(k, q) => format!("B:{k},{q}"),
        ValKey::G(k, q) => format!("G:{k},{q}"),
        ValKey::Vol => "vol".into(),
    }
}

/// Valuations by closed form for balls and by quadrature otherwise.
pub fn valuations<E: ChunkMap>(exec: &E, shape: &Shape, level: u32) -> ValuationTable {
    match shape {
        Shape::Ball(b) => ball_closed_form(b),
        Shape::Ellipsoid(_) => hermitian_volumes_with(exec, shape, level),
    }
}

/// Seed of the calibration run derived from the check seed.
pub fn calibration_seed(seed: u64) -> u64 {
    seed.rotate_left(32) ^ 0x9e37_79b9_7f4a_7c15
}

/// Unit ball in flat space; in `CP^n` the ball of half the injectivity radius.
pub fn reference_ball(n: usize, eps: f64) -> anyhow::Result<GeodesicBall> {
    anyhow::ensure!(eps >= 0.0, "plane sampling is implemented for eps >= 0");
    let radius = if eps == 0.0 { 1.0 } else { AmbientSpace::new(n, eps).max_radius() / 2.0 };
    Ok(GeodesicBall::new(n, eps, radius)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct KappaCalibration {
    pub radius: f64,
    pub estimate: Estimate,
    pub rhs: f64,
    pub kappa: f64,
    pub kappa_stderr: f64,
}

impl KappaCalibration {
    pub fn calibration(&self) -> Calibration {
        Calibration { kappa: self.kappa, kappa_stderr: self.kappa_stderr }
    }
}

pub fn calibrate_kappa<E: ChunkMap>(
    exec: &E,
    n: usize,
    r: usize,
    eps: f64,
    samples: u64,
    seed: u64,
) -> anyhow::Result<KappaCalibration> {
    let ball = reference_ball(n, eps)?;
    let shape = Shape::Ball(ball);
    let est = chi_measure_estimate_with(exec, &PlaneSampler::new(&shape, r)?, &shape, samples, seed)?;
    let rhs = crofton_rhs(&ball_closed_form(&ball), r)?;
    let cal = calibrate(&est, rhs)?;
    Ok(KappaCalibration {
        radius: ball.radius,
        estimate: est.into(),
        rhs,
        kappa: cal.kappa,
        kappa_stderr: cal.kappa_stderr,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CroftonItem {
    pub estimate: Estimate,
    pub rhs: f64,
    pub predicted: f64,
    pub z_score: f64,
    pub rel_stderr: f64,
}

/// Hit measure of `shape` against `kappa * crofton_rhs`.
pub fn crofton_item<E: ChunkMap>(
    exec: &E,
    shape: &Shape,
    table: &ValuationTable,
    r: usize,
    cal: &KappaCalibration,
    samples: u64,
    seed: u64,
) -> anyhow::Result<CroftonItem> {
    let est = chi_measure_estimate_with(exec, &PlaneSampler::new(shape, r)?, shape, samples, seed)?;
    let rhs = crofton_rhs(table, r)?;
    Ok(CroftonItem {
        estimate: est.into(),
        rhs,
        predicted: cal.kappa * rhs,
        z_score: z_score(&est, &cal.calibration(), rhs),
        rel_stderr: est.relative_stderr(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CroftonMcResult {
    pub calibration: KappaCalibration,
    pub target: CroftonItem,
}

pub fn crofton_mc<E: ChunkMap>(
    exec: &E,
    shape: &Shape,
    r: usize,
    level: u32,
    samples: u64,
    seed: u64,
) -> anyhow::Result<CroftonMcResult> {
    let space = shape.space();
    let calibration = calibrate_kappa(exec, space.n, r, space.eps, samples, calibration_seed(seed))?;
    let table = valuations(exec, shape, level);
    let target = crofton_item(exec, shape, &table, r, &calibration, samples, seed)?;
    Ok(CroftonMcResult { calibration, target })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GaussBonnetResult {
    pub sphere: f64,
    /// `(O_{2n-1} - rhs) / O_{2n-1}` with the full coefficient table.
    pub relative_residual: f64,
    /// The same with `M_{2n-1}` and the lower terms written out.
    pub relative_residual_mean_curvature: f64,
}

pub fn gauss_bonnet(table: &ValuationTable) -> anyhow::Result<GaussBonnetResult> {
    let o = sphere_volume_coeff(2 * table.n as u32 - 1).to_f64();
    let (a, b) = gauss_bonnet_residual(table)?;
    Ok(GaussBonnetResult { sphere: o, relative_residual: a / o, relative_residual_mean_curvature: b / o })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GammaBItem {
    pub k: usize,
    pub q: usize,
    pub residual: f64,
    pub rel_residual: f64,
}

pub fn gamma_b(table: &ValuationTable) -> Vec<GammaBItem> {
    check_gamma_b_relation(table)
        .into_iter()
        .map(|((k, q), residual)| {
            let scale = table.b[&(k, q)].abs().max(table.gamma[&(k, q)].abs()).max(f64::MIN_POSITIVE);
            GammaBItem { k, q, residual, rel_residual: residual.abs() / scale }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub h: f64,
    pub fd: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VariationItem {
    pub key: String,
    pub fd: f64,
    pub formula: f64,
    pub rel_err: f64,
    pub h_sweep: Vec<SweepPoint>,
    pub sweep_ratios: Vec<f64>,
}

impl From<VariationRow> for VariationItem {
    fn from(row: VariationRow) -> Self {
        Self {
            key: key_name(row.key),
            fd: row.fd,
            formula: row.formula,
            rel_err: row.rel_err,
            sweep_ratios: sweep_ratios(&row.h_sweep),
            h_sweep: row.h_sweep.into_iter().map(|(h, fd)| SweepPoint { h, fd }).collect(),
        }
    }
}

/// Radial growth for balls; for ellipsoids the diagonal generator `stretch`.
pub fn flow_for(shape: &Shape, stretch: &[f64]) -> anyhow::Result<Flow> {
    match shape {
        Shape::Ball(_) => {
            anyhow::ensure!(stretch.is_empty(), "--stretch applies to ellipsoids");
            Ok(Flow::Radial)
        }
        Shape::Ellipsoid(e) => {
            let d = e.center().len();
            let diag: Vec<f64> = if stretch.is_empty() {
                (0..d).map(|i| [0.3, -0.1, 0.2, 0.5][i % 4] * (1.0 + 0.1 * (i / 4) as f64)).collect()
            } else {
                anyhow::ensure!(stretch.len() == d, "--stretch needs 2n = {d} values");
                stretch.to_vec()
            };
            Ok(Flow::Linear(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag))))
        }
    }
}

pub fn variation<E: ChunkMap>(exec: &E, shape: &Shape, flow: &Flow, level: u32) -> anyhow::Result<Vec<VariationItem>> {
    Ok(check_variations_with(exec, shape, flow, level, true)?.into_iter().map(Into::into).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CroftonVariationResult {
    pub r: usize,
    pub fd: f64,
    pub formula: f64,
    pub rel_err: f64,
}

pub fn crofton_variation(shape: &Shape, flow: &Flow, r: usize, level: u32) -> anyhow::Result<CroftonVariationResult> {
    let (fd, formula) = crofton_variation_check(shape, flow, r, level)?;
    let rel_err = (fd - formula).abs() / fd.abs().max(formula.abs()).max(f64::MIN_POSITIVE);
    Ok(CroftonVariationResult { r, fd, formula, rel_err })
}

/// Relative quadrature floor added to the spread of the section ratio.
pub const SECTION_FLOOR: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TotalGaussResult {
    pub sphere: f64,
    pub estimate: Estimate,
    pub hits: Estimate,
    pub ratio: f64,
    pub ratio_stderr: f64,
    pub ratio_z_score: f64,
    pub worst_section_error: f64,
    pub calibration: KappaCalibration,
    pub rhs: f64,
    pub predicted: f64,
    pub z_score: f64,
}

/// `nodes` polar nodes on each section boundary.
pub fn total_gauss<E: ChunkMap>(
    exec: &E,
    shape: &Shape,
    r: usize,
    level: u32,
    nodes: usize,
    samples: u64,
    seed: u64,
) -> anyhow::Result<TotalGaussResult> {
    let Shape::Ellipsoid(e) = shape else {
        anyhow::bail!("total-gauss runs on ellipsoids");
    };
    let n = e.n();
    let o = sphere_volume_coeff(2 * r as u32 - 1).to_f64();
    let rep = total_gauss_estimate_with(exec, e, r, samples, seed, nodes)?;
    let sigma = rep.ratio_stderr.hypot(SECTION_FLOOR * o);
    let calibration = calibrate_kappa(exec, n, r, 0.0, samples, calibration_seed(seed))?;
    let rhs = total_gauss_rhs(&valuations(exec, shape, level), r)?;
    let z = z_score(&rep.estimate, &calibration.calibration(), rhs);
    Ok(TotalGaussResult {
        sphere: o,
        estimate: rep.estimate.into(),
        hits: rep.chi.into(),
        ratio: rep.ratio,
        ratio_stderr: rep.ratio_stderr,
        ratio_z_score: (rep.ratio - o) / sigma,
        worst_section_error: rep.worst_section_error,
        rhs,
        predicted: calibration.kappa * rhs,
        calibration,
        z_score: z,
    })
}

/// A positive definite `II` drawn from `(seed, stream)`.
pub fn random_sff(n: usize, seed: u64, stream: u64) -> SffMatrix {
    let d = 2 * n - 1;
    let g = complex_gaussian(d, d, &mut sample_rng(seed, stream)).map(|z| z.re);
    SffMatrix::new(n, &g * g.transpose() / d as f64 + DMatrix::identity(d, d) * 0.5)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GrassmannSide {
    pub sff: Vec<Vec<f64>>,
    pub estimate: Estimate,
    pub formula: f64,
    pub z_score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GrassmannResult {
    pub first: GrassmannSide,
    pub second: GrassmannSide,
    pub ratio: f64,
    pub ratio_stderr: f64,
    pub formula_ratio: f64,
    pub ratio_z_score: f64,
    /// `|formula - lambda^{2r}| / lambda^{2r}` for `II = lambda Id`.
    pub scalar_case_error: f64,
}

fn grassmann_side<E: ChunkMap>(exec: &E, h: &SffMatrix, r: usize, samples: u64, seed: u64) -> anyhow::Result<GrassmannSide> {
    let est = grassmann_sigma_average_with(exec, h, r, samples, seed)?;
    let formula = grassmann_density_combination(h, r)?;
    let m = h.matrix();
    Ok(GrassmannSide {
        sff: (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect(),
        estimate: est.into(),
        formula,
        z_score: (est.mean - formula) / est.stderr,
    })
}

pub fn grassmann_pointwise<E: ChunkMap>(
    exec: &E,
    n: usize,
    r: usize,
    samples: u64,
    seed: u64,
) -> anyhow::Result<GrassmannResult> {
    anyhow::ensure!(n >= 2 && r >= 1 && r < n, "needs 1 <= r < n");
    let first = grassmann_side(exec, &random_sff(n, seed, u64::MAX), r, samples, seed)?;
    let second = grassmann_side(exec, &random_sff(n, seed, u64::MAX - 1), r, samples, calibration_seed(seed))?;
    let (a, b) = (first.estimate, second.estimate);
    let ratio = a.mean / b.mean;
    let ratio_stderr = ratio.abs() * ((a.stderr / a.mean).powi(2) + (b.stderr / b.mean).powi(2)).sqrt();
    let formula_ratio = first.formula / second.formula;
    let lambda = 1.3f64;
    let exact = lambda.powi(2 * r as i32);
    let scalar = grassmann_density_combination(&SffMatrix::diagonal(n, lambda, lambda), r)?;
    Ok(GrassmannResult {
        ratio,
        ratio_stderr,
        formula_ratio,
        ratio_z_score: (ratio - formula_ratio) / ratio_stderr,
        scalar_case_error: (scalar - exact).abs() / exact,
        first,
        second,
    })
}
