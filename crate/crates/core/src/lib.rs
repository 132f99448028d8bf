//! Plateau-perturbed perfect splines and the Kolmogorov problem for the
//! norms of `x`, `x^{(k)}`, `x^{(r-2)}` and `x^{(r)}`.
//!
//! - [`ppoly`]: periodic piecewise polynomials (evaluation, derivatives,
//!   zero-mean antiderivatives, sup-norms).
//! - [`psi`]: the comparison family `ψ_r(a; ·)`.
//! - [`euler`]: Favard constants and the classical Kolmogorov bounds.
//! - [`solver`]: feasibility decision and extremal-function construction.
//! - [`verify`]: independent finite-difference and comparison-theorem oracles.

// `!(x <= y)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod euler;
mod poly;
pub mod ppoly;
pub mod psi;
pub mod solver;
pub mod verify;

pub use euler::{favard, kolmogorov_bound, Condition, FavardTable};
pub use ppoly::{Extrema, PeriodicPiecewisePoly, PpolyError};
pub use psi::{build_psi, build_psi1, psi_norm, PsiSpline};
pub use solver::{decide, extremal_norms, FeasibilityReport, ProblemInstance, SolvedParameters};
