//! The first-variation formulas checked against central differences, with
//! the flow applied to the shape parameters.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::coeffcore::{
    crofton_coeffs, crofton_variation_coeffs, variation_operator, CoeffTable, Term, ValKey, VariationOperator,
};
use crate::error::{Error, Result};
use crate::exec::{ChunkMap, Sequential};
use crate::geom::{Ellipsoid, GeodesicBall, Shape};
use crate::linalg::expm;
use crate::valuations::{ball_closed_form, boundary_sums, hermitian_volumes_with, table_from_sums, ValuationTable};
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

/// Steps used for the convergence sweep.
pub const H_SWEEP: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

#[derive(Clone, Debug, PartialEq)]
pub enum Flow {
    /// `x -> exp(tA) x` on `C^n = R^{2n}`; flat space only.
    Linear(DMatrix<f64>),
    /// Geodesic balls grow with unit speed, `<X, N> = 1` for the outward `N`.
    Radial,
}

impl Flow {
    /// Time scale: `1 / |A|` (spectral norm) or 1 for radial growth, scaled
    /// by the ball radius.
    fn time_scale(&self, shape: &Shape) -> f64 {
        match (self, shape) {
            (Flow::Linear(a), _) => 1.0 / a.norm().max(f64::MIN_POSITIVE),
            (Flow::Radial, Shape::Ball(b)) => b.radius,
            (Flow::Radial, _) => 1.0,
        }
    }

    /// Rate scale for relative errors of variations that may vanish.
    fn rate_scale(&self, shape: &Shape) -> f64 {
        1.0 / self.time_scale(shape)
    }
}

/// `c int <X,N> beta_{k,q}` and `c/2 int <X,N> gamma_{k,q}` over the boundary,
/// normalised like the valuations themselves.
#[derive(Clone, Debug, PartialEq)]
pub struct TildeTable {
    pub n: usize,
    pub eps: f64,
    pub b: BTreeMap<(usize, usize), f64>,
    pub gamma: BTreeMap<(usize, usize), f64>,
}

impl TildeTable {
    fn from_valuations(t: ValuationTable) -> Self {
        Self { n: t.n, eps: t.eps, b: t.b, gamma: t.gamma }
    }

    pub fn get(&self, key: ValKey) -> Option<f64> {
        match key {
            ValKey::B(k, q) => self.b.get(&(k, q)).copied(),
            ValKey::G(k, q) => self.gamma.get(&(k, q)).copied(),
            ValKey::Vol => None,
        }
    }
}

/// Linear flows act on ellipsoids; a flat ball is taken as a round one.
fn as_ellipsoid(shape: &Shape) -> Result<Ellipsoid> {
    match shape {
        Shape::Ellipsoid(e) => Ok(e.clone()),
        Shape::Ball(b) if b.space.eps == 0.0 => Ellipsoid::from_axes(&alloc::vec![b.radius; 2 * b.space.n]),
        Shape::Ball(_) => Err(Error::InvalidShape("linear flows need flat space")),
    }
}

fn ball_of(shape: &Shape) -> Result<GeodesicBall> {
    match shape {
        Shape::Ball(b) => Ok(*b),
        Shape::Ellipsoid(_) => Err(Error::InvalidShape("radial flows act on geodesic balls")),
    }
}

fn check_pairing(shape: &Shape, flow: &Flow) -> Result<()> {
    match flow {
        Flow::Linear(a) => {
            let e = as_ellipsoid(shape)?;
            if a.nrows() != e.center().len() || a.ncols() != e.center().len() {
                return Err(Error::InvalidShape("flow matrix must be 2n x 2n"));
            }
            Ok(())
        }
        Flow::Radial => ball_of(shape).map(|_| ()),
    }
}

/// `phi_t(shape)`.
pub fn transport(shape: &Shape, flow: &Flow, t: f64) -> Result<Shape> {
    check_pairing(shape, flow)?;
    match flow {
        Flow::Linear(a) => {
            let e = as_ellipsoid(shape)?;
            let m = expm(&(a * t));
            let zero = DVector::zeros(e.center().len());
            Ok(Shape::Ellipsoid(e.transformed(&m, &zero)?))
        }
        Flow::Radial => {
            let b = ball_of(shape)?;
            Ok(Shape::Ball(b.with_radius(b.radius + t)?))
        }
    }
}

/// Valuations of a shape: closed form for balls, quadrature otherwise.
pub fn valuations_of(shape: &Shape, level: u32) -> ValuationTable {
    valuations_of_with(&Sequential, shape, level)
}

pub fn valuations_of_with<E: ChunkMap>(exec: &E, shape: &Shape, level: u32) -> ValuationTable {
    match shape {
        Shape::Ball(b) => ball_closed_form(b),
        Shape::Ellipsoid(_) => hermitian_volumes_with(exec, shape, level),
    }
}

/// Valuation tables of `phi_{+h}` and `phi_{-h}`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepPair {
    pub h: f64,
    pub plus: ValuationTable,
    pub minus: ValuationTable,
}

impl StepPair {
    pub fn new<E: ChunkMap>(exec: &E, shape: &Shape, flow: &Flow, level: u32, h: f64) -> Result<Self> {
        let plus = valuations_of_with(exec, &transport(shape, flow, h)?, level);
        let minus = valuations_of_with(exec, &transport(shape, flow, -h)?, level);
        Ok(Self { h, plus, minus })
    }

    pub fn difference<F: Fn(&ValuationTable) -> f64>(&self, f: &F) -> f64 {
        (f(&self.plus) - f(&self.minus)) / (2.0 * self.h)
    }
}

pub fn tilde_integrals(shape: &Shape, flow: &Flow, level: u32) -> Result<TildeTable> {
    tilde_integrals_with(&Sequential, shape, flow, level)
}

pub fn tilde_integrals_with<E: ChunkMap>(exec: &E, shape: &Shape, flow: &Flow, level: u32) -> Result<TildeTable> {
    check_pairing(shape, flow)?;
    match flow {
        Flow::Radial => Ok(TildeTable::from_valuations(valuations_of(shape, level))),
        Flow::Linear(a) => {
            let e = Shape::Ellipsoid(as_ellipsoid(shape)?);
            let n = e.space().n;
            let sums = boundary_sums(exec, &e, level, |p| (a * &p.position).dot(&p.normal));
            Ok(TildeTable::from_valuations(table_from_sums(n, 0.0, &sums, 0.0)))
        }
    }
}

/// `[f(phi_h) - f(phi_{-h})] / 2h` for a scalar functional of the valuations.
pub fn central_difference<F: Fn(&ValuationTable) -> f64>(
    shape: &Shape,
    flow: &Flow,
    level: u32,
    h: f64,
    f: &F,
) -> Result<f64> {
    Ok(StepPair::new(&Sequential, shape, flow, level, h)?.difference(f))
}

/// A finite-difference derivative with its step-halving check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdEstimate {
    /// Richardson combination `(4 D(h/2) - D(h)) / 3`.
    pub value: f64,
    pub coarse: f64,
    pub fine: f64,
    pub h: f64,
}

/// Central differences at `h` and `h/2`; fails when they disagree by more
/// than a percent of `scale`.
pub fn richardson_fd<F: Fn(&ValuationTable) -> f64>(
    shape: &Shape,
    flow: &Flow,
    level: u32,
    h: f64,
    scale: f64,
    f: &F,
) -> Result<FdEstimate> {
    let coarse = StepPair::new(&Sequential, shape, flow, level, h)?;
    let fine = StepPair::new(&Sequential, shape, flow, level, h / 2.0)?;
    richardson_pair(&coarse, &fine, scale, f)
}

/// Richardson combination of two precomputed step pairs (`fine.h = coarse.h / 2`).
pub fn richardson_pair<F: Fn(&ValuationTable) -> f64>(
    coarse: &StepPair,
    fine: &StepPair,
    scale: f64,
    f: &F,
) -> Result<FdEstimate> {
    let h = coarse.h;
    let (coarse, fine) = (coarse.difference(f), fine.difference(f));
    if !(coarse - fine).is_finite() || (coarse - fine).abs() > 1e-2 * scale {
        return Err(Error::UnstableDifference { h, coarse, fine });
    }
    Ok(FdEstimate { value: (4.0 * fine - coarse) / 3.0, coarse, fine, h })
}

/// Default step: `1e-3` of the flow's time scale.
pub fn default_step(shape: &Shape, flow: &Flow) -> f64 {
    1e-3 * flow.time_scale(shape)
}

fn value_of(t: &ValuationTable, key: ValKey) -> f64 {
    t.get(key).expect("key defined in this dimension")
}

/// Finite-difference variation of one valuation.
pub fn variation_fd(shape: &Shape, flow: &Flow, key: ValKey, h: f64, level: u32) -> Result<FdEstimate> {
    let probe = valuations_of(shape, level);
    if probe.get(key).is_none() {
        let (k, q) = match key {
            ValKey::B(k, q) | ValKey::G(k, q) => (k, q),
            ValKey::Vol => (0, 0),
        };
        return Err(Error::IndexRange { n: probe.n, k, q });
    }
    let scale = value_of(&probe, key).abs() * flow.rate_scale(shape);
    richardson_fd(shape, flow, level, h, scale.max(f64::MIN_POSITIVE), &|t| value_of(t, key))
}

/// Formula side: the variation operator contracted with the tilde table.
pub fn variation_formula(op: &VariationOperator, key: ValKey, tilde: &TildeTable) -> Result<f64> {
    if !op.map.contains_key(&key) {
        return Err(Error::Unsupported("no variation formula for this key"));
    }
    Ok(op.evaluate(key, tilde.eps, |t| tilde.get(t).expect("tilde key")))
}

/// Variation of an epsilon-graded table, by the operator.
pub fn table_variation_formula(op: &VariationOperator, table: &CoeffTable, tilde: &TildeTable) -> f64 {
    op.apply(table)
        .iter()
        .map(|((key, p), c)| c.to_f64() * crate::coeffcore::powu(tilde.eps, *p) * tilde.get(*key).expect("tilde key"))
        .sum()
}

/// One compared key.
#[derive(Clone, Debug, PartialEq)]
pub struct VariationRow {
    pub key: ValKey,
    pub fd: f64,
    pub formula: f64,
    pub rel_err: f64,
    /// `(h, central difference at h)` over [`H_SWEEP`] times the flow's
    /// time scale.
    pub h_sweep: Vec<(f64, f64)>,
}

/// Relative error with denominator `max(|fd|, rate * |value|)`, so that
/// variations which vanish are measured against the valuation's size.
pub fn relative_error(fd: f64, formula: f64, value: f64, rate: f64) -> f64 {
    let denom = fd.abs().max(rate * value.abs()).max(f64::MIN_POSITIVE);
    (fd - formula).abs() / denom
}

/// Every variation formula against finite differences.
pub fn check_variations(shape: &Shape, flow: &Flow, level: u32, sweep: bool) -> Result<Vec<VariationRow>> {
    check_variations_with(&Sequential, shape, flow, level, sweep)
}

pub fn check_variations_with<E: ChunkMap>(
    exec: &E,
    shape: &Shape,
    flow: &Flow,
    level: u32,
    sweep: bool,
) -> Result<Vec<VariationRow>> {
    let n = shape.space().n;
    let op = variation_operator(n)?;
    let tilde = tilde_integrals_with(exec, shape, flow, level)?;
    let base = valuations_of_with(exec, shape, level);
    let h = default_step(shape, flow);
    let rate = flow.rate_scale(shape);
    let coarse = StepPair::new(exec, shape, flow, level, h)?;
    let fine = StepPair::new(exec, shape, flow, level, h / 2.0)?;
    let swept: Vec<StepPair> = if sweep {
        H_SWEEP
            .iter()
            .map(|s| StepPair::new(exec, shape, flow, level, s * flow.time_scale(shape)))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let mut rows = Vec::new();
    for &key in op.map.keys() {
        let value = value_of(&base, key);
        let f = |t: &ValuationTable| value_of(t, key);
        let scale = (value.abs() * rate).max(f64::MIN_POSITIVE);
        let fd = richardson_pair(&coarse, &fine, scale, &f)?.value;
        let formula = variation_formula(&op, key, &tilde)?;
        let h_sweep = swept.iter().map(|p| (p.h, p.difference(&f))).collect();
        let rel_err = relative_error(fd, formula, value, rate);
        rows.push(VariationRow { key, fd, formula, rel_err, h_sweep });
    }
    Ok(rows)
}

/// `(D(h) - D(h/2)) / (D(h/2) - D(h/4))` along a halving sweep of central
/// differences; about 4 for a second-order difference.
pub fn sweep_ratios(sweep: &[(f64, f64)]) -> Vec<f64> {
    let diffs: Vec<f64> = sweep.windows(2).map(|w| w[0].1 - w[1].1).collect();
    diffs.windows(2).map(|w| w[0] / w[1]).collect()
}

/// `(fd of the Crofton bracket, its variation by the B~ combination)`.
pub fn crofton_variation_check(shape: &Shape, flow: &Flow, r: usize, level: u32) -> Result<(f64, f64)> {
    let n = shape.space().n;
    let bracket = crofton_coeffs(n, r)?;
    let var = crofton_variation_coeffs(n, r)?;
    let tilde = tilde_integrals(shape, flow, level)?;
    let rhs = var.evaluate(
        |t| match t {
            Term::Mu { k, q } => tilde.get(ValKey::B(k, q)).expect("odd degree"),
            Term::Vol => unreachable!("no volume term in the variation"),
        },
        tilde.eps,
    );
    let base = valuations_of(shape, level);
    let scale = base.evaluate(&bracket).abs() * flow.rate_scale(shape);
    let fd = richardson_fd(shape, flow, level, default_step(shape, flow), scale, &|t| t.evaluate(&bracket))?;
    Ok((fd.value, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffcore::gauss_bonnet_coeffs;
    use crate::linalg::j_matrix;

    fn ball(n: usize, eps: f64, r: f64) -> Shape {
        Shape::Ball(GeodesicBall::new(n, eps, r).unwrap())
    }

    #[test]
    fn radial_tilde_is_the_table() {
        let s = ball(2, 1.0, 0.7);
        let t = tilde_integrals(&s, &Flow::Radial, 0).unwrap();
        let v = valuations_of(&s, 0);
        assert_eq!(t.b, v.b);
        assert_eq!(t.gamma, v.gamma);
    }

    #[test]
    fn identity_flow_on_unit_sphere() {
        let s = ball(2, 0.0, 1.0);
        let t = tilde_integrals(&s, &Flow::Linear(DMatrix::identity(4, 4)), 1).unwrap();
        let v = valuations_of(&s, 0);
        for (k, x) in &v.b {
            assert!((t.b[k] - x).abs() < 1e-12 * x.abs().max(1.0), "{k:?}");
        }
    }

    #[test]
    fn radial_balls_all_eps() {
        for eps in [-1.0, 0.0, 1.0] {
            for n in 2..=3 {
                let rows = check_variations(&ball(n, eps, 0.6), &Flow::Radial, 0, false).unwrap();
                for row in rows {
                    assert!(row.rel_err < 1e-6, "eps={eps} n={n} {row:?}");
                }
            }
        }
    }

    #[test]
    fn isometry_flow_is_null() {
        // a unitary generator: complex linear and antisymmetric
        let j = j_matrix(2);
        let mut a = DMatrix::zeros(4, 4);
        a[(0, 2)] = -0.4;
        a[(2, 0)] = 0.4;
        a[(1, 3)] = -0.4;
        a[(3, 1)] = 0.4;
        let a = &a + &j * 0.3;
        let e = Shape::Ellipsoid(Ellipsoid::from_axes(&[1.0, 0.8, 0.6, 0.9]).unwrap());
        for row in check_variations(&e, &Flow::Linear(a), 1, false).unwrap() {
            assert!(row.formula.abs() < 1e-8, "{row:?}");
            assert!(row.fd.abs() < 1e-8, "{row:?}");
        }
    }

    #[test]
    fn stretch_on_ellipsoid() {
        let e = Shape::Ellipsoid(Ellipsoid::from_axes(&[1.0, 1.0, 2.0, 2.0]).unwrap());
        let a = DMatrix::from_diagonal(&DVector::from_vec(alloc::vec![0.3, -0.1, 0.2, 0.5]));
        for row in check_variations(&e, &Flow::Linear(a), 2, true).unwrap() {
            assert!(row.rel_err < 1e-4, "{row:?}");
            if row.key == ValKey::G(0, 0) {
                continue;
            }
            for ratio in sweep_ratios(&row.h_sweep) {
                assert!((ratio - 4.0).abs() < 0.2, "{row:?}");
            }
        }
    }

    #[test]
    fn gauss_bonnet_rhs_has_null_variation() {
        let op = variation_operator(3).unwrap();
        let gb = gauss_bonnet_coeffs(3).unwrap();
        for eps in [-1.0, 1.0] {
            let s = ball(3, eps, 0.5);
            let t = tilde_integrals(&s, &Flow::Radial, 0).unwrap();
            let v = table_variation_formula(&op, &gb, &t);
            assert!(v.abs() < 1e-10, "{v}");
        }
    }

    #[test]
    fn crofton_variation_on_balls() {
        for eps in [-1.0, 0.0, 1.0] {
            let (fd, formula) = crofton_variation_check(&ball(2, eps, 0.8), &Flow::Radial, 1, 0).unwrap();
            assert!((fd - formula).abs() < 1e-6 * formula.abs(), "eps={eps} {fd} {formula}");
        }
    }

    #[test]
    fn crofton_variation_on_ellipsoid() {
        let e = Shape::Ellipsoid(Ellipsoid::from_axes(&[1.0, 0.8, 0.6, 0.9]).unwrap());
        let a = DMatrix::from_fn(4, 4, |i, j| 0.1 * (i as f64 - j as f64 * 0.5) + if i == j { 0.2 } else { 0.0 });
        let (fd, formula) = crofton_variation_check(&e, &Flow::Linear(a), 1, 2).unwrap();
        assert!((fd - formula).abs() < 1e-4 * formula.abs(), "{fd} {formula}");
    }

    #[test]
    fn invalid_pairings() {
        let e = Shape::Ellipsoid(Ellipsoid::from_axes(&[1.0, 1.0, 1.0, 1.0]).unwrap());
        assert!(tilde_integrals(&e, &Flow::Radial, 0).is_err());
        assert!(tilde_integrals(&ball(2, 1.0, 0.5), &Flow::Linear(DMatrix::identity(4, 4)), 0).is_err());
    }
}
