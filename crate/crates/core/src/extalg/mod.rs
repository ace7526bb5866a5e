//! Numeric exterior algebra on the `2n-1` boundary frame slots.

mod multivector;
mod oracle;
mod pullback;
mod sigma;

pub use multivector::MultiVector;
pub use oracle::{permutation_oracle, FormSpec};
pub use pullback::{
    all_densities, build_pullbacks, density_beta, density_gamma, density_keys, slot_e, slot_je, Pullbacks,
    SffMatrix,
};
pub use sigma::sigma_restricted;
