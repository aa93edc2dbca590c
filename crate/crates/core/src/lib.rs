//! Numerical laboratory for the one-dimensional quasilinear particle-wave
//! model.
//!
//! The kinetic pair (particle density `f(p,t)`, wave energy `W(k,t)`) under
//! the resonance `p = 1/k` reduces to a single degenerate porous-medium
//! equation with a nonlinear source,
//!
//! ```text
//! ∂_t u = x² u ∂_x² u + g₀ u   in (x_a, x_b),   u = 0 on the boundary,
//! ```
//!
//! which is approximated by the strictly parabolic family
//! `∂_t u = x² P_n(u) ∂_x² u + g₀ u`. This crate solves that family, the
//! original coupled system, and evaluates the functionals whose boundedness
//! and convergence in `n` carry the existence theory.

pub mod calculus;
pub mod convergence;
pub mod equilibrium;
pub mod error;
pub mod estimates;
pub mod field;
pub mod grid;
pub mod interp;
pub mod kinetic;
pub mod presets;
pub mod request;
pub mod solver;
pub mod testfn;
pub mod tridiag;
pub mod validation;

pub use calculus::{bochner_norm, derivative, integrate_space, integrate_spacetime, lq_norm};
pub use error::{Error, Result};
pub use field::{ScalarField, SpaceTimeField};
pub use grid::{SpatialGrid, TimeGrid};
pub use kinetic::{KineticData, ProblemData, Spectrum};
pub use request::FunctionalRequest;
pub use solver::{RegularizationFamily, SolveReport, SolverConfig};
pub use testfn::TestFunctionSpec;
