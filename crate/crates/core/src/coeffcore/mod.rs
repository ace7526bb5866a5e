//! Exact coefficients: pi-Laurent arithmetic, the Crofton, Gauss-Bonnet and
//! total-curvature tables, the variation operator and the Crofton system.

mod pi;
mod system;
mod tables;
mod variation;

pub use pi::PiScalar;
pub use system::{crofton_closed_form, solve_crofton_system, verify_cancellation_identity, CroftonSystemSolution};
pub use tables::{
    admissible, admissible_pairs, ball_volume_coeff, binom, crofton_coeffs, crofton_variation_coeffs,
    form_norm_coeff, gauss_bonnet_coeffs, hyperplane_gauss_bonnet_residual, implied_hyperplane_grassmannian, powu,
    sphere_volume_coeff, total_gauss_coeffs, CoeffTable, GrassmannianFactor, TableKind, Term,
};
pub use variation::{
    bracket_variation, check_epsilon_independence, variation_operator, TildeCombination, ValKey,
    VariationOperator, VariationTerm,
};
