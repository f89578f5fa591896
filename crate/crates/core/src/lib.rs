//! Constant solutions of the SU(2) Yang-Mills equations in Euclidean ℝⁿ.
//!
//! For a constant potential `A` and constant current `J`, both stored as
//! `n × 3` coefficient matrices in the τ-basis of su(2), the field equations
//! reduce to the cubic system
//!
//! ```text
//! A_{μc} A^μ_a A^ν_b ε^{ab}_d ε^{cd}_k = J^ν_k
//! ```
//!
//! [`solver::solve`] returns every solution of that system for an arbitrary
//! `J`: it diagonalizes `J` by an SVD with a special-orthogonal gauge factor,
//! solves the resulting three-variable system in closed form
//! ([`cubic`]), and maps the diagonal solutions back to the caller's frame.
//! The [`oracle`] module holds independent brute-force checks (bisection,
//! multi-start Newton, round-trip certification) for the closed forms.

#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod cubic;
mod error;
pub mod linalg;
pub mod oracle;
pub mod solver;
pub mod su2;

pub use error::{Error, Result};
pub use linalg::{MatR, SvdFrame};
pub use solver::{
    classify, residual, solve, strength, Classification, Current, Potential, SolutionReport,
    Strength,
};

/// Numerical thresholds shared by the classifier and the closed-form solver.
///
/// The case split of the diagonal system is exact in real arithmetic; these
/// decide how floating-point inputs are routed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// A diagonal current entry `j` counts as zero when
    /// `|j| <= zero * max(1, ‖j‖)`.
    pub zero: f64,
    /// Two nonzero entries are tied when they differ by at most
    /// `tie * max(j)`.
    pub tie: f64,
    /// Residual bound for diagonal solutions, relative to `1 + ‖j‖`.
    pub residual: f64,
}

impl Tolerances {
    pub const DEFAULT_ZERO: f64 = 1e-12;
    pub const DEFAULT_TIE: f64 = 1e-9;
    pub const DEFAULT_RESIDUAL: f64 = 1e-10;
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            zero: Self::DEFAULT_ZERO,
            tie: Self::DEFAULT_TIE,
            residual: Self::DEFAULT_RESIDUAL,
        }
    }
}
