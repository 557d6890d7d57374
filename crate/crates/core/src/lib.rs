//! Magnus–Zassenhaus exponential splittings for the semiclassical
//! Schrödinger equation `∂ₜu = i(ε∂ₓ² − ε⁻¹V(x,t))u` on the periodic
//! interval `[−1, 1]`.
//!
//! The crate has two layers. [`symlie`] derives the splitting exactly in a
//! Lie algebra of symmetrized differential operators; [`propagator`] compiles
//! the derived exponents into a spectral time stepper on the grid from
//! [`grid`]. [`reference`] provides brute-force Strang references for error
//! measurement.

pub mod grid;
pub mod symlie;
pub mod oracle;
pub mod stats;
pub mod exprparse;
pub mod potential;
pub mod propagator;
pub mod reference;
pub mod verify;
