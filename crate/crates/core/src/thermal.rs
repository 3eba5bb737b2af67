//! Temperature dependence of qubit relaxation.
//!
//! Both T1 models are normalised to a reference point (T1 at a reference
//! temperature), so only their shapes carry physics.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::units::{reduced_photon_energy, uev_to_joule, BOLTZMANN, GHZ, HBAR};

/// Aluminium gap used by the quasiparticle model, in micro-eV.
pub const DEFAULT_DELTA_AL_UEV: f64 = 180.0;
/// Temperatures below this are rejected.
pub const MIN_TEMPERATURE_K: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThermalModelKind {
    SpinBoson,
    Quasiparticle,
}

impl ThermalModelKind {
    pub fn tag(self) -> &'static str {
        match self {
            ThermalModelKind::SpinBoson => "spin-boson",
            ThermalModelKind::Quasiparticle => "quasiparticle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalModelSpec {
    pub kind: ThermalModelKind,
    pub fq_ghz: f64,
    pub t1_ref_s: f64,
    pub t_ref_k: f64,
    pub delta_al_uev: f64,
}

impl ThermalModelSpec {
    pub fn new(kind: ThermalModelKind, fq_ghz: f64, t1_ref_s: f64, t_ref_k: f64) -> Result<Self> {
        let s = Self {
            kind,
            fq_ghz,
            t1_ref_s,
            t_ref_k,
            delta_al_uev: DEFAULT_DELTA_AL_UEV,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn spin_boson(fq_ghz: f64, t1_ref_s: f64, t_ref_k: f64) -> Result<Self> {
        Self::new(ThermalModelKind::SpinBoson, fq_ghz, t1_ref_s, t_ref_k)
    }

    pub fn quasiparticle(fq_ghz: f64, t1_ref_s: f64, t_ref_k: f64) -> Result<Self> {
        Self::new(ThermalModelKind::Quasiparticle, fq_ghz, t1_ref_s, t_ref_k)
    }

    pub fn with_delta_uev(mut self, delta_al_uev: f64) -> Result<Self> {
        self.delta_al_uev = delta_al_uev;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("fq_ghz", self.fq_ghz)?;
        require_positive("t1_ref_s", self.t1_ref_s)?;
        check_temperature(self.t_ref_k)?;
        require_positive("delta_al_uev", self.delta_al_uev)?;
        Ok(())
    }

    pub fn t1(&self, temperature_k: f64) -> Result<f64> {
        match self.kind {
            ThermalModelKind::SpinBoson => spin_boson_t1(self, temperature_k),
            ThermalModelKind::Quasiparticle => quasiparticle_t1_al(self, temperature_k),
        }
    }
}

fn check_temperature(t: f64) -> Result<f64> {
    if t.is_finite() && t >= MIN_TEMPERATURE_K {
        Ok(t)
    } else {
        Err(Error::invalid(
            "temperature_k",
            format!("must be >= {MIN_TEMPERATURE_K} K, got {t}"),
        ))
    }
}

/// 1 + coth(h fq / (2 kB T)); tanh saturates to 1, so the T -> 0 limit of 2
/// is reached exactly rather than through overflow.
fn spin_boson_factor(fq_ghz: f64, temperature_k: f64) -> f64 {
    let x = 0.5 * reduced_photon_energy(fq_ghz * GHZ, temperature_k);
    1.0 + 1.0 / x.tanh()
}

/// T1(T) = C / (1 + coth(h fq / 2 kB T)) with C fixed by the reference point.
pub fn spin_boson_t1(spec: &ThermalModelSpec, temperature_k: f64) -> Result<f64> {
    spec.validate()?;
    let t = check_temperature(temperature_k)?;
    let c = spec.t1_ref_s * spin_boson_factor(spec.fq_ghz, spec.t_ref_k);
    Ok(c / spin_boson_factor(spec.fq_ghz, t))
}

/// Normalised thermal quasiparticle density sqrt(2 pi kB T / Delta) exp(-Delta / kB T).
pub fn quasiparticle_density(delta_uev: f64, temperature_k: f64) -> f64 {
    let delta = uev_to_joule(delta_uev);
    let kt = BOLTZMANN * temperature_k;
    (2.0 * PI * kt / delta).sqrt() * (-delta / kt).exp()
}

fn quasiparticle_rate(spec: &ThermalModelSpec, temperature_k: f64) -> f64 {
    let delta = uev_to_joule(spec.delta_al_uev);
    let omega_q = 2.0 * PI * spec.fq_ghz * GHZ;
    let x_qp = quasiparticle_density(spec.delta_al_uev, temperature_k);
    x_qp / PI * (2.0 * delta * omega_q / HBAR).sqrt()
}

/// Gamma(T) = Gamma0 + (x_qp / pi) sqrt(2 Delta omega_q / hbar), T1 = 1/Gamma,
/// with Gamma0 fixed by the reference point.
pub fn quasiparticle_t1_al(spec: &ThermalModelSpec, temperature_k: f64) -> Result<f64> {
    spec.validate()?;
    let t = check_temperature(temperature_k)?;
    let gamma0 = 1.0 / spec.t1_ref_s - quasiparticle_rate(spec, spec.t_ref_k);
    if gamma0 < 0.0 {
        return Err(Error::invalid(
            "t1_ref_s",
            "reference T1 is shorter than the quasiparticle limit at t_ref_k",
        ));
    }
    Ok(1.0 / (gamma0 + quasiparticle_rate(spec, t)))
}

/// Bose-Einstein occupancy 1 / (exp(h f / kB T) - 1); zero at T = 0.
pub fn thermal_occupancy(f_ghz: f64, temperature_k: f64) -> Result<f64> {
    require_positive("f_ghz", f_ghz)?;
    if !(temperature_k.is_finite() && temperature_k >= 0.0) {
        return Err(Error::invalid("temperature_k", "must be >= 0"));
    }
    if temperature_k == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / reduced_photon_energy(f_ghz * GHZ, temperature_k).exp_m1())
}
