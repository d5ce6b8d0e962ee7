//! Two superconducting qubits coupled coherently through a tunable coupler and
//! dissipatively through a shared lossy resonator.
//!
//! The crate derives the effective non-Hermitian 2x2 Hamiltonian from circuit
//! parameters ([`model`]), computes its eigenmodes ([`spectrum`]), locates
//! level degeneracies and exceptional points ([`ep`]), integrates the no-jump
//! master equation ([`dynamics`]), quantifies the nonreciprocal coupling
//! ([`nonreciprocity`]) and checks the reductions against resolved
//! single-excitation models ([`oracle`]).
//!
//! All frequencies are linear frequencies in MHz.

pub mod commands;
pub mod config;
pub mod dynamics;
pub mod ep;
pub mod figures;
pub mod error;
pub mod exec;
pub mod fuzz;
pub mod linalg;
pub mod model;
pub mod nonreciprocity;
pub mod oracle;
pub mod output;
pub mod params;
pub mod selftest;
pub mod spectrum;
pub mod sweep;

pub use error::{Error, Result};
pub use exec::Execution;
pub use linalg::Mat2;
pub use model::{derive_effective_model, EffectiveModel};
pub use num_complex::Complex64 as C64;
pub use params::{CircuitParams, ModelOverrides, Scenario};
pub use spectrum::{eigenmodes, SpectrumPoint};
pub use sweep::{Axis, Grid, SigmaPattern, SweepSpec};
