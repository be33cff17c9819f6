//! CLI front end and JSON interchange for the rank-one preserver library.

pub mod bundle;
pub mod commands;

pub use commands::run;
