//! Numerical laboratory for the Landau-de Gennes Q-tensor gradient flow on a
//! periodic box.
//!
//! The crate simulates the L² gradient flow of the Landau-de Gennes energy
//! with the quartic bulk density, computes ensemble-averaged two-point
//! correlation functions, and checks the two asymptotic coarsening regimes
//! (diffusive, `L(t) = sqrt(t)`, and ballistic, `L(t) = t`) together with the
//! heat-semigroup estimates and the Picard fixed point behind the
//! representation formula `Q = A e^{-at} Phi_1 + e^{-at} V`.
//!
//! Module map:
//! - [`qtensor`]: exact algebra of traceless symmetric 3x3 matrices and the
//!   pointwise nonlinearities / potentials of the model.
//! - [`field`]: periodic-grid tensor and scalar fields, norms, total energy.
//! - [`spectral`]: 3D FFT plumbing shared by every spectral operation.
//! - [`heatflow`]: heat kernel, heat semigroup and decay-improvement
//!   diagnostics.
//! - [`dynamics`]: exponential-time-differencing integration of the tensor,
//!   scalar and transformed equations, plus front tracking. Time schemes live
//!   behind a name-keyed registry ([`dynamics::scheme`]).
//! - [`fixedpoint`]: the integral operator `(F1, F2)` and Picard iteration to
//!   the `(A, V)` fixed point.
//! - [`correlation`]: two-point correlation profiles, Dirac-mixture ensemble
//!   averaging and regime fitting.
//! - [`generators`]: name-keyed registry of initial-condition families.
//! - [`config`] / [`manifest`] / [`qio`]: run configuration, manifests and
//!   on-disk formats.

pub mod config;
pub mod correlation;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod fixedpoint;
pub mod generators;
pub mod heatflow;
pub mod manifest;
pub mod qio;
pub mod qtensor;
pub mod spectral;

pub use error::{Error, Result};
pub use field::{GridSpec, ScalarField, TensorField};
pub use qtensor::{ModelParams, TracelessSym3};
