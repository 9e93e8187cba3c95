//! Conserved currents of relativistic and non-relativistic quantum wave
//! equations, checked numerically on exact plane-wave solutions.
//!
//! The crate is organised bottom-up:
//!
//! * [`gamma`] – the Dirac representation of the gamma matrices, the
//!   16-element matrix basis and commutant filtering.
//! * [`solution`] – exact plane-wave superpositions of the Dirac,
//!   Klein-Gordon, Pauli and Schrödinger equations, evaluated as [`jet::Jet`]s.
//! * [`covariants`] – bilinear covariants of a Dirac spinor and the
//!   quartic identities among them.
//! * [`currents`] – every current, decomposition term and tensor as a pure
//!   function of a jet.
//! * [`verify`] – finite-difference divergences, conservation sweeps,
//!   periodic-box charges.
//! * [`uniqueness`] – ansatz families of candidate currents and the SVD
//!   nullspace certificate of their conservation residuals.
//! * [`suite`] and [`report`] – the orchestration behind the CLI.

pub mod covariants;
pub mod currents;
pub mod error;
pub mod gamma;
pub mod jet;
pub mod linalg;
pub mod report;
pub mod schema;
pub mod solution;
pub mod suite;
pub mod uniqueness;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
