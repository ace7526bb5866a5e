//! Command-line arguments and the validated run configuration.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use croftonlab_core::geom::{Ellipsoid, GeodesicBall, Shape};
use serde::Serialize;

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "croftonlab", version, about = "Hermitian intrinsic volumes and integral-geometric checks in complex space forms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact coefficient tables and identity checks.
    Coeffs(CoeffsArgs),
    /// Hermitian intrinsic volumes of a ball or ellipsoid.
    Volumes(VolumesArgs),
    /// Run one numerical check; the exit code reports pass/fail.
    Check(CheckArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    Ball,
    Ellipsoid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    CroftonMc,
    GaussBonnet,
    GammaB,
    Variation,
    CroftonVariation,
    TotalGauss,
    GrassmannPointwise,
}

#[derive(Clone, Debug, Args)]
pub struct CommonArgs {
    /// Complex dimension.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Complex dimension of the planes.
    #[arg(long)]
    pub r: Option<usize>,
    /// Holomorphic curvature parameter (4 eps is the holomorphic sectional curvature).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub eps: f64,
    #[arg(long, value_enum, default_value_t = ShapeKind::Ball)]
    pub shape: ShapeKind,
    /// Ellipsoid semi-axes along x_1, y_1, ..., x_n, y_n.
    #[arg(long, value_delimiter = ',')]
    pub axes: Vec<f64>,
    /// Geodesic ball radius.
    #[arg(long = "R", default_value_t = 1.0)]
    pub radius: f64,
    /// Quadrature refinement level (defaults depend on n).
    #[arg(long)]
    pub level: Option<u32>,
    /// Monte Carlo sample count (defaults depend on the check).
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Pass threshold (a z-score bound for Monte Carlo checks).
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, Args)]
pub struct CoeffsArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub crofton: bool,
    #[arg(long)]
    pub gb: bool,
    #[arg(long)]
    pub total_gauss: bool,
    #[arg(long)]
    pub variation: bool,
    /// Check the solver, cancellation and epsilon-independence identities for all n up to --max-n.
    #[arg(long)]
    pub identities: bool,
    #[arg(long, default_value_t = 6)]
    pub max_n: usize,
}

#[derive(Clone, Debug, Args)]
pub struct VolumesArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Use the closed form for geodesic balls.
    #[arg(long)]
    pub closed_form: bool,
}

#[derive(Clone, Debug, Args)]
pub struct CheckArgs {
    #[arg(value_enum)]
    pub kind: CheckKind,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Diagonal generator of the linear flow used on ellipsoids.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub stretch: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ShapeSpec {
    Ball { radius: f64 },
    Ellipsoid { axes: Vec<f64> },
}

/// Everything a command needs, validated and with defaults resolved.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunConfig {
    pub command: String,
    pub n: usize,
    pub r: Option<usize>,
    pub eps: f64,
    pub shape: ShapeSpec,
    pub level: u32,
    /// Only set for Monte Carlo runs or when given explicitly.
    pub samples: Option<u64>,
    pub seed: u64,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
}

/// Largest complex dimension accepted for shapes (quadrature cost grows
/// like `m^{2n-1}`).
pub const MAX_SHAPE_N: usize = 4;
/// Largest complex dimension for exact tables.
pub const MAX_TABLE_N: usize = 12;

/// Default quadrature level: finer for `n = 1, 2`.
pub fn default_level(n: usize) -> u32 {
    if n <= 2 {
        2
    } else {
        0
    }
}

impl RunConfig {
    pub fn from_common(command: &str, c: &CommonArgs, default_samples: Option<u64>) -> anyhow::Result<Self> {
        anyhow::ensure!(c.n >= 1, "--n must be at least 1");
        anyhow::ensure!(c.eps.is_finite(), "--eps must be finite");
        if let Some(r) = c.r {
            anyhow::ensure!(r >= 1 && r <= c.n, "--r must satisfy 1 <= r <= n");
        }
        let shape = match c.shape {
            ShapeKind::Ball => {
                anyhow::ensure!(c.radius > 0.0 && c.radius.is_finite(), "--R must be positive");
                ShapeSpec::Ball { radius: c.radius }
            }
            ShapeKind::Ellipsoid => {
                anyhow::ensure!(c.axes.len() == 2 * c.n, "--axes needs 2n = {} values", 2 * c.n);
                anyhow::ensure!(c.axes.iter().all(|a| *a > 0.0 && a.is_finite()), "--axes must be positive");
                ShapeSpec::Ellipsoid { axes: c.axes.clone() }
            }
        };
        if let Some(t) = c.tol {
            anyhow::ensure!(t > 0.0, "--tol must be positive");
        }
        let samples = c.samples.or(default_samples);
        anyhow::ensure!(samples.map_or(true, |s| s >= 2), "--samples must be at least 2");
        Ok(Self {
            command: command.to_string(),
            n: c.n,
            r: c.r,
            eps: c.eps,
            shape,
            level: c.level.unwrap_or_else(|| default_level(c.n)),
            samples,
            seed: c.seed,
            format: c.format,
            out: c.out.clone(),
            tol: c.tol,
        })
    }

    /// The shape as a core object; ellipsoids need flat space.
    pub fn build_shape(&self) -> anyhow::Result<Shape> {
        anyhow::ensure!(self.n <= MAX_SHAPE_N, "shapes are limited to n <= {MAX_SHAPE_N}");
        match &self.shape {
            ShapeSpec::Ball { radius } => Ok(Shape::Ball(GeodesicBall::new(self.n, self.eps, *radius)?)),
            ShapeSpec::Ellipsoid { axes } => {
                anyhow::ensure!(self.eps == 0.0, "ellipsoids are supported in flat space only (--eps 0)");
                Ok(Shape::Ellipsoid(Ellipsoid::from_axes(axes)?))
            }
        }
    }

    pub fn plane_dim(&self) -> anyhow::Result<usize> {
        let r = self.r.ok_or_else(|| anyhow::anyhow!("--r is required"))?;
        anyhow::ensure!(r < self.n, "--r must be below n for plane checks");
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(args).unwrap()
    }

    #[test]
    fn negative_eps_and_axes() {
        let cli = parse(&["croftonlab", "volumes", "--n", "2", "--eps", "-1", "--R", "0.7"]);
        let Command::Volumes(v) = cli.command else { panic!() };
        assert_eq!(v.common.eps, -1.0);
        let cfg = RunConfig::from_common("volumes", &v.common, None).unwrap();
        assert_eq!(cfg.shape, ShapeSpec::Ball { radius: 0.7 });
        assert_eq!(cfg.level, 2);
    }

    #[test]
    fn bad_axes_rejected() {
        let cli = parse(&["croftonlab", "volumes", "--shape", "ellipsoid", "--axes", "1,2,3"]);
        let Command::Volumes(v) = cli.command else { panic!() };
        assert!(RunConfig::from_common("volumes", &v.common, None).is_err());
    }

    #[test]
    fn ellipsoid_needs_flat_space() {
        let cli = parse(&["croftonlab", "volumes", "--shape", "ellipsoid", "--axes", "1,1,1,1", "--eps", "1"]);
        let Command::Volumes(v) = cli.command else { panic!() };
        let cfg = RunConfig::from_common("volumes", &v.common, None).unwrap();
        assert!(cfg.build_shape().is_err());
    }
}
