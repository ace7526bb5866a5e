//! Hermitian intrinsic volumes and integral geometry in complex space forms.
//!
//! Exact coefficient tables live in [`coeffcore`]; everything numeric
//! (exterior algebra, boundary quadrature, plane sampling, finite
//! differences) is plain `f64`. The crate is `no_std` with `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod coeffcore;
pub mod error;
pub mod exec;
pub mod extalg;
pub mod geom;
pub mod linalg;
pub mod planes;
pub mod valuations;
pub mod varcheck;

pub use error::{Error, Result};
