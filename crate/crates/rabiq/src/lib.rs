//! Exact spectra of the quantum Rabi model and its asymmetric, anisotropic and
//! two-photon generalizations.
//!
//! Analytic conditions (G-functions, confluent Heun conditions, Wronskians) are
//! root-scanned and cross-checked against a truncated Fock-basis oracle.
//! All kernels work in units of ω = 1; [`ModelParams`] carries ω and the public
//! entry points rescale.

pub mod analysis;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod heun;
pub mod linalg;
pub mod model;
pub mod recurrences;
pub mod spectrum;

pub use error::{RabiError, Result};
pub use model::{ModelParams, Parity, SymmetryLabel, TwoPhotonClass, Variant};
