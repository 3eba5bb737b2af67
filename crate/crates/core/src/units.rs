//! CODATA 2018 constants (SI) and frequency/energy helpers.

use std::f64::consts::PI;

/// Planck constant, J·s (exact).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = PLANCK / (2.0 * PI);
/// Elementary charge, C (exact).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Boltzmann constant, J/K (exact).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Vacuum permittivity, F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

pub const GHZ: f64 = 1e9;
pub const MHZ: f64 = 1e6;

/// h·f / (kB·T) for a frequency in Hz and temperature in kelvin.
pub fn reduced_photon_energy(f_hz: f64, temperature_k: f64) -> f64 {
    PLANCK * f_hz / (BOLTZMANN * temperature_k)
}

/// Converts an energy in micro-electronvolts to joules.
pub fn uev_to_joule(uev: f64) -> f64 {
    uev * 1e-6 * ELEMENTARY_CHARGE
}
