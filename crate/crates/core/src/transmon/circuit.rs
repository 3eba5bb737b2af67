use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::units::{ELEMENTARY_CHARGE, GHZ, PLANCK, VACUUM_PERMITTIVITY};

/// Relative permittivity assumed for the AlN barrier.
pub const DEFAULT_ALN_PERMITTIVITY: f64 = 9.0;

/// EJ/h = Ic / (4 pi e), returned in GHz.
pub fn ej_from_ic(ic_amps: f64) -> Result<f64> {
    require_positive("ic_amps", ic_amps)?;
    Ok(ic_amps / (4.0 * PI * ELEMENTARY_CHARGE) / GHZ)
}

/// Ic = 4 pi e (EJ/h).
pub fn ic_from_ej(ej_ghz: f64) -> Result<f64> {
    require_positive("ej_ghz", ej_ghz)?;
    Ok(4.0 * PI * ELEMENTARY_CHARGE * ej_ghz * GHZ)
}

/// EC/h = e^2 / (2 h C_sigma), returned in GHz.
pub fn ec_from_csigma(c_sigma_f: f64) -> Result<f64> {
    require_positive("c_sigma_f", c_sigma_f)?;
    Ok(ELEMENTARY_CHARGE.powi(2) / (2.0 * PLANCK * c_sigma_f) / GHZ)
}

/// Total capacitance (farads) for a charging energy in GHz.
pub fn csigma_from_ec(ec_ghz: f64) -> Result<f64> {
    require_positive("ec_ghz", ec_ghz)?;
    Ok(ELEMENTARY_CHARGE.powi(2) / (2.0 * PLANCK * ec_ghz * GHZ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacitanceSet {
    pub c_sigma_f: f64,
    pub c_j_f: f64,
}

impl CapacitanceSet {
    pub fn new(c_sigma_f: f64, c_j_f: f64) -> Result<Self> {
        let c = Self { c_sigma_f, c_j_f };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("c_sigma_f", self.c_sigma_f)?;
        require_positive("c_j_f", self.c_j_f)?;
        if self.c_j_f >= self.c_sigma_f {
            return Err(Error::invalid(
                "c_j_f",
                "junction capacitance must be below the total capacitance",
            ));
        }
        Ok(())
    }
}

/// Fraction of the electric-field energy stored in the junction, CJ / C_sigma.
pub fn participation_ratio(c: &CapacitanceSet) -> Result<f64> {
    c.validate()?;
    Ok(c.c_j_f / c.c_sigma_f)
}

/// Parallel-plate capacitance of a circular junction, in farads.
pub fn junction_capacitance(diameter_um: f64, barrier_thickness_nm: f64, eps_r: f64) -> Result<f64> {
    require_positive("diameter_um", diameter_um)?;
    require_positive("barrier_thickness_nm", barrier_thickness_nm)?;
    require_positive("eps_r", eps_r)?;
    let radius_m = 0.5 * diameter_um * 1e-6;
    let area_m2 = PI * radius_m * radius_m;
    Ok(VACUUM_PERMITTIVITY * eps_r * area_m2 / (barrier_thickness_nm * 1e-9))
}

#[cfg(test)]
mod tests {
    use super::*;

    const FF: f64 = 1e-15;

    #[test]
    fn josephson_energy_conversion() {
        // 4*pi*e*11.545e9 Hz, evaluated by hand: 23.244 nA.
        let ic = ic_from_ej(11.545).unwrap();
        assert!((ic - 23.2442e-9).abs() < 1e-12, "{ic}");
        assert!(ej_from_ic(0.0).is_err());
        assert!(ej_from_ic(-1e-9).is_err());
        assert!(ic_from_ej(f64::NAN).is_err());
        for x in [1.0, 10.0, 100.0] {
            let back = ej_from_ic(ic_from_ej(x).unwrap()).unwrap();
            assert!((back - x).abs() / x < 1e-12);
        }
    }

    #[test]
    fn charging_energy_conversion() {
        let c = csigma_from_ec(0.197).unwrap();
        assert!((c / FF - 98.3).abs() < 0.05, "{}", c / FF);
        let c = csigma_from_ec(0.182).unwrap();
        assert!((c / FF - 106.4).abs() < 0.05, "{}", c / FF);
        for x in [0.05, 0.197, 1.3] {
            let back = ec_from_csigma(csigma_from_ec(x).unwrap()).unwrap();
            assert!((back - x).abs() / x < 1e-12);
        }
        assert!(ec_from_csigma(0.0).is_err());
    }

    #[test]
    fn participation_ratios() {
        let a3 = CapacitanceSet::new(98.3 * FF, 19.7 * FF).unwrap();
        assert!((participation_ratio(&a3).unwrap() - 0.20).abs() < 5e-3);
        let b1 = CapacitanceSet::new(106.4 * FF, 79.8 * FF).unwrap();
        assert!((participation_ratio(&b1).unwrap() - 0.75).abs() < 5e-3);
        let near = CapacitanceSet::new(100.0 * FF, 100.0 * FF * (1.0 - 1e-9)).unwrap();
        assert!((participation_ratio(&near).unwrap() - 1.0).abs() < 1e-8);
        assert!(CapacitanceSet::new(10.0 * FF, 10.0 * FF).is_err());
        assert!(CapacitanceSet::new(10.0 * FF, 0.0).is_err());
    }

    #[test]
    fn parallel_plate_junction() {
        let c = junction_capacitance(0.8, 1.6, 9.0).unwrap();
        assert!((c / FF - 25.035).abs() < 0.01, "{}", c / FF);
        let c2 = junction_capacitance(2.0, 1.6, 9.0).unwrap();
        assert!((c2 / FF - 156.5).abs() < 0.1, "{}", c2 / FF);
        let c4 = junction_capacitance(1.6, 1.6, 9.0).unwrap();
        assert!((c4 / c - 4.0).abs() < 1e-12);
        assert!(junction_capacitance(0.0, 1.6, 9.0).is_err());
        assert!(junction_capacitance(1.0, -1.0, 9.0).is_err());
    }
}
