//! Minimal distance between an ellipsoidal surface and a non-convex quartic
//! surface, solved by canonical duality.
//!
//! The primal problem minimizes `Π(x) = ½‖y − z‖²` over pairs `x = (y, z)`
//! constrained to an ellipsoid `h(y) = ½(yᵀAy − r²) = 0` and a quartic
//! surface `g(z) = ½α(½‖z − c‖² − η)² − fᵀ(z − c) = 0`. The quartic
//! constraint makes the feasible set non-convex, so local methods cannot
//! certify global optimality on their own.
//!
//! The canonical dual transformation replaces the quartic term by a convex
//! canonical function composed with the geometric operator `ξ = ½‖z − c‖²`,
//! which yields a three-dimensional dual function `Πᵈ(λ, μ, ς)` with no
//! duality gap at paired stationary points. A dual stationary point whose
//! diagnostics place it in the positive-definite region `S_a⁺` certifies the
//! unique global minimizer of the primal problem.
//!
//! Crate layout:
//!
//! * [`problem`] — instance data, primal functions, separation precondition.
//! * [`dual`] — total complementary function, primal recovery map, `Πᵈ`,
//!   its gradient, and the `S_a` / `S_a⁺` membership diagnostics.
//! * [`solver`] — multistart damped Newton on the dual gradient system,
//!   global-optimality certificates, and the linear perturbation scheme for
//!   degenerate instances with multiple global minimizers.
//! * [`oracle`] — independent brute-force ground truth: exact surface
//!   parameterizations, grid search, polish, and classical KKT checks.
//! * [`generate`] — random separated instances for testing.
//!
//! The crate is `no_std` (with `alloc`) so the numerics can be embedded; all
//! IO, file formats, and the CLI live in the companion `surfdist-cli` crate.

#![cfg_attr(not(test), no_std)]
#![allow(clippy::many_single_char_names)]

extern crate alloc;

pub mod dual;
mod error;
pub mod generate;
pub mod oracle;
pub mod problem;
pub mod solver;
#[cfg(test)]
pub(crate) mod test_fixtures;

pub use dual::{DualDiagnostics, DualPoint, GapReport, SpectralCache, SA_TOL};
pub use error::{Error, Result};
pub use problem::{PrimalPoint, ProblemInstance, SeparationReport, SeparationStatus};
pub use solver::{Certificate, CertificateStatus, SolverConfig, StationaryPoint};
