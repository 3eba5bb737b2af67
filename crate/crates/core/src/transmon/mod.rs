//! Transmon circuit model: charge-basis spectra, circuit-parameter
//! conversions, and the transmon–cavity coupled system.

mod circuit;
mod coupled;
mod spectrum;

pub use circuit::{
    csigma_from_ec, ec_from_csigma, ej_from_ic, ic_from_ej, junction_capacitance,
    participation_ratio, CapacitanceSet, DEFAULT_ALN_PERMITTIVITY,
};
pub use coupled::{
    avoided_crossing_scan, dispersive_shift, min_mode_splitting, mode_splitting,
    CoupledSystemParams, CrossingPoint, DispersiveShift, DEFAULT_PHOTON_CUT,
    DEFAULT_TRANSMON_LEVELS,
};
pub use spectrum::{
    charge_dispersion, diagonalize_transmon, fit_ej_ec, QubitSpectrum, TransmonParams,
    CONVERGENCE_TOL_GHZ, DEFAULT_NCUT, TRANSMON_REGIME_RATIO,
};
