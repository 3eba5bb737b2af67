//! Device models and parameter estimation for all-nitride (NbN/AlN/NbN)
//! transmon qubits.
//!
//! The crate is organised by subsystem:
//!
//! - [`transmon`]: charge-basis transmon spectra, circuit-parameter
//!   conversions, and the qubit–cavity coupled system.
//! - [`junction`]: hysteretic IV synthesis/analysis and wafer scaling laws.
//! - [`dynamics`]: Rabi chevron, T1 and Ramsey time-domain models.
//! - [`thermal`]: temperature dependence of relaxation.
//! - [`loss`]: per-channel quality factors and their harmonic budget.
//! - [`fit`]: damped nonlinear least squares with a small model library.
//!
//! Every energy is carried as a frequency (E/h). Physical constants are the
//! CODATA 2018 values in [`units`].

pub mod devices;
pub mod dynamics;
pub mod error;
pub mod fit;
pub mod junction;
pub mod loss;
pub mod noise;
pub mod thermal;
pub mod transmon;
pub mod units;

pub use error::{Error, Result};
