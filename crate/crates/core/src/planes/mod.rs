//! Complex planes: invariant sampling, intersection tests and the Monte
//! Carlo side of the Crofton and total-curvature formulas.

mod estimate;
mod meets;
mod sampling;

pub use estimate::{
    calibrate, chi_measure_estimate, chi_measure_estimate_with, crofton_rhs, curvature_chunk,
    grassmann_chunk, grassmann_density_combination, grassmann_sigma_average, grassmann_sigma_average_with,
    hit_chunk, sample_d_subspace, section_ellipsoid, total_gauss_estimate, total_gauss_estimate_with,
    total_gauss_rhs, z_score, Calibration, CurvatureSums, MCEstimate, PlaneSampler, TotalGaussReport, PLANE_CHUNK,
};
pub use meets::{ellipsoid_section, meets, real_basis, Section};
pub use sampling::{
    complex_gaussian, haar_subspace, haar_unitary, projective_distance, sample_plane_flat, sample_plane_projective,
    sample_rng, uniform_in_ball, ComplexPlane,
};
