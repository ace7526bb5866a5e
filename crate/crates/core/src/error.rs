use core::fmt;

/// Failures surfaced by the core routines.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// `(k, q)` outside `max{0, k-n} <= q <= floor(k/2) < n`, or a form that
    /// is undefined at this index (`k = 2q` for beta, `n = k - q` for gamma).
    IndexRange { n: usize, k: usize, q: usize },
    /// Plane dimension outside the admissible range for this operation.
    PlaneDimension { n: usize, r: usize },
    /// Radius outside the valid range of the ambient space.
    Radius { eps: f64, radius: f64 },
    /// The Jacobi field vanished before the requested radius.
    ConjugatePoint { kappa: f64, radius: f64 },
    /// A basis that should be orthonormal is not.
    NotOrthonormal { defect: f64 },
    /// A matrix that should be unitary is not.
    NotUnitary { defect: f64 },
    /// Exact linear system without a unique solution.
    SingularSystem { n: usize, r: usize },
    /// Operation needs the permutation oracle on too many generators.
    OracleTooLarge { n: usize },
    /// Shape/flow/space combination the operation does not support.
    Unsupported(&'static str),
    /// Malformed shape data.
    InvalidShape(&'static str),
    /// Calibration reference gives a vanishing Crofton right-hand side.
    DegenerateCalibration,
    /// Central differences at `h` and `h/2` disagree beyond the noise budget.
    UnstableDifference { h: f64, coarse: f64, fine: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::IndexRange { n, k, q } => {
                write!(f, "index (k={k}, q={q}) not admissible for n={n}")
            }
            Error::PlaneDimension { n, r } => write!(f, "plane dimension r={r} invalid for n={n}"),
            Error::Radius { eps, radius } => {
                write!(f, "radius {radius} outside the valid range for eps={eps}")
            }
            Error::ConjugatePoint { kappa, radius } => {
                write!(f, "conjugate point reached before R={radius} (kappa={kappa})")
            }
            Error::NotOrthonormal { defect } => write!(f, "basis not orthonormal (defect {defect:e})"),
            Error::NotUnitary { defect } => write!(f, "matrix not unitary (defect {defect:e})"),
            Error::SingularSystem { n, r } => write!(f, "Crofton system singular for n={n}, r={r}"),
            Error::OracleTooLarge { n } => write!(f, "permutation oracle limited to n <= 3, got n={n}"),
            Error::Unsupported(what) => write!(f, "unsupported: {what}"),
            Error::InvalidShape(what) => write!(f, "invalid shape: {what}"),
            Error::DegenerateCalibration => f.write_str("calibration reference has vanishing rhs"),
            Error::UnstableDifference { h, coarse, fine } => write!(
                f,
                "finite difference unstable at h={h:e}: {coarse:e} vs {fine:e} at h/2"
            ),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
