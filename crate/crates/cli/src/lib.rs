//! Batch front-end for the `mzs` binary: configuration, runs, references,
//! convergence sweeps, derivation dumps and self-verification.

pub mod commands;
pub mod config;
pub mod snapshot;
pub mod sweep;
