//! Adomian decomposition for scalar Hamilton-Jacobi equations
//! `u_t + H(u_x) = 0`, with the tools needed to judge it: critical time from
//! characteristics, and a monotone finite-difference reference solver.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod adomian;
pub mod characteristics;
pub mod error;
pub mod fdsolve;
pub mod num;
pub mod problem;
pub mod symexpr;

pub use adomian::{build_series, AdmSeries, CapPolicy};
pub use error::{Error, Result};
pub use num::{Num, Rational};
pub use problem::ProblemSpec;
pub use symexpr::{parse, Binding, EvalError, Expr};
pub use characteristics::{critical_time, CriticalTimeResult};
pub use fdsolve::{compare, solve, Boundary, Grid, GridSolution};
