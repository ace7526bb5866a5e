//! Command-line front end, report formats and a parallel executor for
//! [`croftonlab_core`].

pub mod checks;
pub mod cli;
pub mod commands;
pub mod exec;
pub mod json;
pub mod output;

pub use croftonlab_core as core;
