//! Solvers and diagnostics for objectives of the form
//!
//! ```text
//!     f(x) = g(x) - h(x) + phi(x)
//! ```
//!
//! where `g` is smooth (gradient Lipschitz with constant `M_g`), `h` is convex and
//! continuous, and `phi` is proper, convex, and lower semicontinuous (possibly an
//! indicator of a closed convex set). Minimizers of interest are critical points:
//! `0 in grad g(x) - dh(x) + dphi(x)`.
//!
//! Five algorithms are provided: a subgradient-type step, a proximal step, a
//! Frank-Wolfe step for compact constraint sets, gradient descent with backtracking,
//! and the convex-concave procedure (majorize-minimize). Every run yields a
//! [`trace::SolveTrace`] that the [`diagnostics`] module can audit against the descent
//! inequalities and O(1/k) rate certificates each method is supposed to satisfy.

pub mod data;
pub mod diagnostics;
pub mod error;
pub mod linalg;
pub mod ops;
pub mod problem;
pub mod problems;
pub mod rng;
pub mod solvers;
pub mod trace;

pub use error::DcError;
pub use problem::{DcProblem, DcProblemBuilder, ExtReal, SolverConfig};
pub use trace::{AlgoKind, SolveStatus, SolveTrace};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, DcError>;
