//! Exact quantum solutions built from classical actions.
//!
//! Starting from an action `S(x, t)` that is *harmonic* in space
//! (`∇²S = 0`), the potential `V = -∂S/∂t - |∇S - (e/c)A|²/2m` makes `S` an
//! exact solution of the Hamilton-Jacobi equation **and** makes
//! `ψ = exp(iS/ħ)` an exact solution of the Schrödinger equation — with no
//! semiclassical approximation anywhere.  This crate evaluates a catalog of
//! such action families, synthesizes their potentials, and then beats on the
//! construction numerically:
//!
//! * finite-difference residuals of the Laplace, Hamilton-Jacobi, and
//!   Schrödinger equations, with grid-refinement order estimates
//!   ([`verify`]);
//! * eigenvalue checks of the conserved first-order operators each family
//!   carries ([`verify`]);
//! * Crank-Nicolson propagation of wave packets compared against exact
//!   superpositions, plus completeness/expansion checks ([`evolve`]);
//! * a batch runner driven by a JSON config with CSV/JSON outputs ([`cli`]).
//!
//! The `examples/` directory shows one capability per program; start with
//! `cargo run --example synthesize_potential`.

pub mod cli;
pub mod error;
pub mod evolve;
pub mod grid;
pub mod model;
pub mod synth;
pub mod verify;

pub use error::{Error, Result};
