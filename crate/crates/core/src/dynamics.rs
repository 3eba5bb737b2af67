//! Time-domain qubit models: Rabi chevron, T1 relaxation and Ramsey fringes.
//!
//! Frequencies are ordinary (cycles per second) throughout. The chevron uses
//! MHz and ns; the T1 and Ramsey models use SI seconds and hertz so that
//! traces map directly onto the `t_s,y` file format.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::noise;

/// Sampled time-domain measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeTrace {
    pub t_s: Vec<f64>,
    pub y: Vec<f64>,
    pub sigma: Option<Vec<f64>>,
}

impl TimeTrace {
    pub fn new(t_s: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let tr = Self { t_s, y, sigma: None };
        tr.validate()?;
        Ok(tr)
    }

    pub fn with_sigma(mut self, sigma: Vec<f64>) -> Result<Self> {
        self.sigma = Some(sigma);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_s.len() != self.y.len() {
            return Err(Error::invalid("trace", "t_s and y lengths differ"));
        }
        if self.t_s.iter().chain(&self.y).any(|v| !v.is_finite()) {
            return Err(Error::invalid("trace", "non-finite sample"));
        }
        if self.t_s.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("trace", "times must be strictly increasing"));
        }
        if let Some(s) = &self.sigma {
            if s.len() != self.y.len() {
                return Err(Error::invalid("sigma", "length differs from y"));
            }
            if s.iter().any(|&v| !(v.is_finite() && v > 0.0)) {
                return Err(Error::invalid("sigma", "must be > 0"));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.t_s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_s.is_empty()
    }
}

/// `n` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n)
            .map(|k| start + (stop - start) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Excited-state population over a (detuning, duration) grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChevronGrid {
    pub detunings_mhz: Vec<f64>,
    pub durations_ns: Vec<f64>,
    /// `pe[i][j]` at `detunings_mhz[i]`, `durations_ns[j]`.
    pub pe: Vec<Vec<f64>>,
}

impl ChevronGrid {
    pub fn column(&self, detuning_index: usize) -> &[f64] {
        &self.pe[detuning_index]
    }
}

/// Generalised Rabi frequency sqrt(OmegaR^2 + Delta^2).
pub fn generalized_rabi_mhz(omega_r_mhz: f64, detuning_mhz: f64) -> f64 {
    omega_r_mhz.hypot(detuning_mhz)
}

/// Undamped two-level Rabi formula, Pe = (OmegaR/Omega)^2 sin^2(pi Omega t).
pub fn rabi_population(omega_r_mhz: f64, detuning_mhz: f64, duration_ns: f64) -> f64 {
    let omega = generalized_rabi_mhz(omega_r_mhz, detuning_mhz);
    let contrast = (omega_r_mhz / omega).powi(2);
    contrast * (PI * omega * duration_ns * 1e-3).sin().powi(2)
}

pub fn rabi_chevron(omega_r_mhz: f64, detunings_mhz: &[f64], durations_ns: &[f64]) -> Result<ChevronGrid> {
    rabi_chevron_damped(omega_r_mhz, detunings_mhz, durations_ns, None)
}

/// Chevron with an optional drive-decoherence envelope exp(-t/T2,drive) on
/// the fringe contrast. `None` gives the undamped formula.
pub fn rabi_chevron_damped(
    omega_r_mhz: f64,
    detunings_mhz: &[f64],
    durations_ns: &[f64],
    t2_drive_ns: Option<f64>,
) -> Result<ChevronGrid> {
    require_positive("omega_r_mhz", omega_r_mhz)?;
    if let Some(t2) = t2_drive_ns {
        require_positive("t2_drive_ns", t2)?;
    }
    if detunings_mhz.iter().chain(durations_ns).any(|v| !v.is_finite()) {
        return Err(Error::invalid("grid", "non-finite axis value"));
    }
    let pe = detunings_mhz
        .iter()
        .map(|&d| {
            durations_ns
                .iter()
                .map(|&t| match t2_drive_ns {
                    None => rabi_population(omega_r_mhz, d, t),
                    Some(t2) => {
                        let omega = generalized_rabi_mhz(omega_r_mhz, d);
                        let contrast = (omega_r_mhz / omega).powi(2);
                        let envelope = (-t.abs() / t2).exp();
                        0.5 * contrast * (1.0 - envelope * (2.0 * PI * omega * t * 1e-3).cos())
                    }
                })
                .collect()
        })
        .collect();
    Ok(ChevronGrid {
        detunings_mhz: detunings_mhz.to_vec(),
        durations_ns: durations_ns.to_vec(),
        pe,
    })
}

/// Duration of the first population maximum, 1 / (2 Omega), in ns.
pub fn pi_pulse_duration(omega_r_mhz: f64, detuning_mhz: f64) -> Result<f64> {
    require_positive("omega_r_mhz", omega_r_mhz)?;
    if !detuning_mhz.is_finite() {
        return Err(Error::invalid("detuning_mhz", "must be finite"));
    }
    Ok(1e3 / (2.0 * generalized_rabi_mhz(omega_r_mhz, detuning_mhz)))
}

/// Affine readout of a population: offset + scale * Pe.
pub fn readout(pe: f64, offset: f64, scale: f64) -> f64 {
    offset + scale * pe
}

/// Readout trace of a Rabi oscillation at fixed detuning with Gaussian noise.
pub fn rabi_trace(
    omega_r_mhz: f64,
    detuning_mhz: f64,
    durations_ns: &[f64],
    offset: f64,
    scale: f64,
    noise_sigma: f64,
    seed: u64,
) -> Result<TimeTrace> {
    require_positive("omega_r_mhz", omega_r_mhz)?;
    let jitter = noise::gaussian(seed, durations_ns.len(), noise_sigma);
    let y = durations_ns
        .iter()
        .zip(jitter)
        .map(|(&t, e)| readout(rabi_population(omega_r_mhz, detuning_mhz, t), offset, scale) + e)
        .collect();
    TimeTrace::new(durations_ns.iter().map(|t| t * 1e-9).collect(), y)
}

/// y = offset + a exp(-t / T1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct T1Model {
    pub a: f64,
    pub t1_s: f64,
    pub offset: f64,
}

impl T1Model {
    pub fn new(a: f64, t1_s: f64, offset: f64) -> Result<Self> {
        require_positive("t1_s", t1_s)?;
        Ok(Self { a, t1_s, offset })
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.offset + self.a * (-t / self.t1_s).exp()
    }

    pub fn trace(&self, times_s: &[f64], noise_sigma: f64, seed: u64) -> Result<TimeTrace> {
        synth(times_s, |t| self.eval(t), noise_sigma, seed)
    }
}

pub fn t1_model(t: f64, a: f64, t1_s: f64, offset: f64) -> Result<f64> {
    Ok(T1Model::new(a, t1_s, offset)?.eval(t))
}

pub fn t1_trace(model: &T1Model, times_s: &[f64], noise_sigma: f64, seed: u64) -> Result<TimeTrace> {
    model.trace(times_s, noise_sigma, seed)
}

/// y = A0 + A exp(-tau / T2*) cos(2 pi Delta tau + phi0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RamseyModel {
    pub a0: f64,
    pub a: f64,
    pub t2star_s: f64,
    pub delta_d_hz: f64,
    pub phi0: f64,
}

impl RamseyModel {
    pub fn new(a0: f64, a: f64, t2star_s: f64, delta_d_hz: f64, phi0: f64) -> Result<Self> {
        require_positive("t2star_s", t2star_s)?;
        Ok(Self {
            a0,
            a,
            t2star_s,
            delta_d_hz,
            phi0,
        })
    }

    pub fn eval(&self, tau: f64) -> f64 {
        self.a0
            + self.a
                * (-tau / self.t2star_s).exp()
                * (2.0 * PI * self.delta_d_hz * tau + self.phi0).cos()
    }

    pub fn trace(&self, times_s: &[f64], noise_sigma: f64, seed: u64) -> Result<TimeTrace> {
        synth(times_s, |t| self.eval(t), noise_sigma, seed)
    }
}

pub fn ramsey_model(tau: f64, a0: f64, a: f64, t2star_s: f64, delta_d_hz: f64, phi0: f64) -> Result<f64> {
    Ok(RamseyModel::new(a0, a, t2star_s, delta_d_hz, phi0)?.eval(tau))
}

pub fn ramsey_trace(model: &RamseyModel, times_s: &[f64], noise_sigma: f64, seed: u64) -> Result<TimeTrace> {
    model.trace(times_s, noise_sigma, seed)
}

fn synth(times_s: &[f64], f: impl Fn(f64) -> f64, noise_sigma: f64, seed: u64) -> Result<TimeTrace> {
    if !(noise_sigma.is_finite() && noise_sigma >= 0.0) {
        return Err(Error::invalid("noise_sigma", "must be >= 0"));
    }
    let jitter = noise::gaussian(seed, times_s.len(), noise_sigma);
    let y = times_s.iter().zip(jitter).map(|(&t, e)| f(t) + e).collect();
    let trace = TimeTrace::new(times_s.to_vec(), y)?;
    if noise_sigma > 0.0 {
        trace.with_sigma(vec![noise_sigma; times_s.len()])
    } else {
        Ok(trace)
    }
}
