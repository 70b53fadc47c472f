//! Command-line front end for the dcopt solvers. The binary dispatches four
//! subcommands: `run` (one configured solve), `compare` (the prox-vs-CCCP
//! sparse-regression study), `sfs` (shape-from-shading reconstruction), and
//! `check` (the invariant battery). The modules live in a library so the
//! integration and acceptance tests can drive them directly.

pub mod battery;
pub mod check;
pub mod compare;
pub mod config;
pub mod registry;
pub mod run;
pub mod sfs;
