//! Numerical core for Poiseuille flow of nematic liquid crystals in the full
//! Ericksen–Leslie model: a heat equation for the flow velocity `u` coupled to
//! a damped quasilinear wave equation for the director angle `θ`.
//!
//! The crate is `no_std` (with `alloc`) and performs no IO. It provides
//!
//! - [`material`]: Leslie coefficients, their physical relations and the
//!   coefficient functions `g`, `h`, `c`,
//! - [`initial_data`]: the cusp-forming initial data family and a smooth
//!   low-amplitude family used for convergence checks,
//! - [`solver`]: a Riemann-invariant upwind scheme for the wave part and a
//!   semi-implicit step for the heat part,
//! - [`diagnostics`]: energy, dissipation, `J = u_x + (h/g)θ_t`, forward
//!   characteristic tracing and blowup detection.
#![no_std]
#![deny(rust_2018_idioms)]

extern crate alloc;

pub mod diagnostics;
mod error;
pub mod initial_data;
pub mod material;
pub mod numerics;
pub mod solver;

pub use diagnostics::{BlowupReport, DiagnosticsRecord, Trigger};
pub use error::Error;
pub use initial_data::{InitialDataSpec, InitialProfile, SmoothData, TheoremData};
pub use material::{LeslieMaterial, MaterialBounds, ValidationReport};
pub use solver::{Grid, RunResult, Solver, SolverConfig, State, Transport};
