//! Numerical core for perturbations of traveling waves in 1+1 dimensional
//! semilinear and quasilinear wave systems.
//!
//! Everything here is `no_std` with `alloc`; file formats, the CLI and
//! experiment orchestration live in the `travwave` crate.

#![no_std]
// `!(a < b)` comparisons are how NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod data;
pub mod energy;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod linalg;
pub mod profile;
pub mod quadrature;
pub mod solver;
pub mod stencil;
pub mod system;

pub use error::{Error, Result};
pub use grid::{Boundary, Field, GridSpec, Level, SimState};
pub use profile::{builtin_profile, TravelingWaveProfile};
pub use solver::{SolverConfig, Solver, Termination, Trajectory};
pub use system::{builtin_system, CoefficientSet, SystemKind, SystemParams};
