use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};

/// AlN deposition per ALD cycle: 1.6 nm over 21 cycles.
pub const DEFAULT_NM_PER_CYCLE: f64 = 1.6 / 21.0;

pub fn cycles_to_thickness(cycles: f64) -> Result<f64> {
    cycles_to_thickness_with_rate(cycles, DEFAULT_NM_PER_CYCLE)
}

pub fn cycles_to_thickness_with_rate(cycles: f64, nm_per_cycle: f64) -> Result<f64> {
    if !(cycles.is_finite() && cycles >= 0.0) {
        return Err(Error::invalid("cycles", format!("must be >= 0, got {cycles}")));
    }
    require_positive("nm_per_cycle", nm_per_cycle)?;
    Ok(cycles * nm_per_cycle)
}

/// Circular junction with an ALD barrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JunctionGeometry {
    pub diameter_um: f64,
    pub barrier_cycles: u32,
    /// Overrides the cycle-derived thickness when set.
    pub thickness_override_nm: Option<f64>,
}

impl JunctionGeometry {
    pub fn new(diameter_um: f64, barrier_cycles: u32) -> Result<Self> {
        require_positive("diameter_um", diameter_um)?;
        Ok(Self {
            diameter_um,
            barrier_cycles,
            thickness_override_nm: None,
        })
    }

    pub fn with_thickness_nm(mut self, nm: f64) -> Result<Self> {
        self.thickness_override_nm = Some(require_positive("thickness_nm", nm)?);
        Ok(self)
    }

    pub fn area_cm2(&self) -> f64 {
        PI * (0.5 * self.diameter_um).powi(2) * 1e-8
    }

    pub fn area_um2(&self) -> f64 {
        PI * (0.5 * self.diameter_um).powi(2)
    }

    pub fn barrier_thickness_nm(&self) -> f64 {
        self.thickness_override_nm
            .unwrap_or(self.barrier_cycles as f64 * DEFAULT_NM_PER_CYCLE)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RaFit {
    pub ra_kohm_um2: f64,
    pub std_err: f64,
    pub rss: f64,
}

/// Resistance (ohm) of a circular junction at a given RA product.
pub fn resistance_for_ra(ra_kohm_um2: f64, diameter_um: f64) -> f64 {
    ra_kohm_um2 * 1e3 / (PI * (0.5 * diameter_um).powi(2))
}

/// Least squares for R = RA / A with A = pi (d/2)^2, i.e. a line through the
/// origin in 1/A.
pub fn ra_product_fit(points: &[(f64, f64)]) -> Result<RaFit> {
    if points.len() < 3 {
        return Err(Error::invalid("junctions", "need at least 3 junctions"));
    }
    for &(d, r) in points {
        require_positive("diameter_um", d)?;
        require_positive("resistance_ohm", r)?;
    }
    let mut diameters: Vec<f64> = points.iter().map(|p| p.0).collect();
    diameters.sort_by(f64::total_cmp);
    diameters.dedup();
    if diameters.len() < 3 {
        return Err(Error::invalid("diameter_um", "need at least 3 distinct diameters"));
    }
    let inv_area: Vec<f64> = points.iter().map(|p| 1.0 / (PI * (0.5 * p.0).powi(2))).collect();
    let sxx: f64 = inv_area.iter().map(|x| x * x).sum();
    let sxy: f64 = inv_area.iter().zip(points).map(|(x, p)| x * p.1).sum();
    let ra = sxy / sxx;
    let rss: f64 = inv_area
        .iter()
        .zip(points)
        .map(|(x, p)| (p.1 - ra * x).powi(2))
        .sum();
    let dof = (points.len() - 1) as f64;
    let std_err = (rss / dof / sxx).sqrt();
    Ok(RaFit {
        ra_kohm_um2: ra / 1e3,
        std_err: std_err / 1e3,
        rss,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JcCyclesFit {
    pub slope_per_cycle: f64,
    pub log10_prefactor: f64,
    pub slope_std_err: f64,
    pub prefactor_std_err: f64,
}

impl JcCyclesFit {
    pub fn jc_at(&self, cycles: f64) -> f64 {
        10f64.powf(self.log10_prefactor + self.slope_per_cycle * cycles)
    }
}

/// Straight-line fit of log10(Jc) against ALD cycle count.
pub fn jc_cycles_fit(points: &[(f64, f64)]) -> Result<JcCyclesFit> {
    if points.len() < 3 {
        return Err(Error::invalid("points", "need at least 3 (cycles, Jc) points"));
    }
    for &(c, jc) in points {
        if !c.is_finite() {
            return Err(Error::invalid("cycles", "must be finite"));
        }
        require_positive("jc_a_cm2", jc)?;
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.log10()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("cycles", "all points share one cycle count"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let s2 = rss / (n - 2.0).max(1.0);
    Ok(JcCyclesFit {
        slope_per_cycle: slope,
        log10_prefactor: intercept,
        slope_std_err: (s2 / sxx).sqrt(),
        prefactor_std_err: (s2 * (1.0 / n + mx * mx / sxx)).sqrt(),
    })
}

/// Cycle difference separating two current densities along a log10 slope.
pub fn cycle_difference(jc_a: f64, jc_b: f64, slope_per_cycle: f64) -> Result<f64> {
    require_positive("jc_a", jc_a)?;
    require_positive("jc_b", jc_b)?;
    if slope_per_cycle == 0.0 || !slope_per_cycle.is_finite() {
        return Err(Error::invalid("slope_per_cycle", "must be finite and non-zero"));
    }
    Ok((jc_a / jc_b).log10() / slope_per_cycle.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thickness_map() {
        assert_eq!(cycles_to_thickness(21.0).unwrap(), 1.6);
        assert_eq!(cycles_to_thickness(0.0).unwrap(), 0.0);
        assert!((cycles_to_thickness(42.0).unwrap() - 3.2).abs() < 1e-15);
        assert!(cycles_to_thickness(-1.0).is_err());
        assert_eq!(cycles_to_thickness_with_rate(10.0, 0.1).unwrap(), 1.0);
        let g = JunctionGeometry::new(0.8, 21).unwrap();
        assert_eq!(g.barrier_thickness_nm(), 1.6);
        assert_eq!(g.with_thickness_nm(2.0).unwrap().barrier_thickness_nm(), 2.0);
    }

    #[test]
    fn area() {
        let g = JunctionGeometry::new(2.0, 21).unwrap();
        assert!((g.area_cm2() - PI * 1e-8).abs() < 1e-22);
    }

    #[test]
    fn ra_closed_form() {
        // 20.8 kOhm um^2 over pi um^2.
        assert!((resistance_for_ra(20.8, 2.0) - 6620.8).abs() < 0.1);
    }

    #[test]
    fn ra_noiseless_recovery() {
        let pts: Vec<(f64, f64)> = [1.0, 2.0, 3.0, 5.0, 7.0]
            .iter()
            .map(|&d| (d, resistance_for_ra(20.8, d)))
            .collect();
        let fit = ra_product_fit(&pts).unwrap();
        assert!((fit.ra_kohm_um2 - 20.8).abs() / 20.8 < 1e-12);
        assert!(fit.std_err < 1e-10);

        let doubled: Vec<(f64, f64)> = pts.iter().map(|&(d, r)| (d, 2.0 * r * (1.0 + 0.01 * d.sin()))).collect();
        let base: Vec<(f64, f64)> = pts.iter().map(|&(d, r)| (d, r * (1.0 + 0.01 * d.sin()))).collect();
        let a = ra_product_fit(&base).unwrap();
        let b = ra_product_fit(&doubled).unwrap();
        assert!((b.ra_kohm_um2 / a.ra_kohm_um2 - 2.0).abs() < 1e-12);
        assert!((b.std_err / b.ra_kohm_um2 - a.std_err / a.ra_kohm_um2).abs() < 1e-12);
    }

    #[test]
    fn ra_errors() {
        assert!(ra_product_fit(&[(1.0, 1e4), (2.0, 3e3)]).is_err());
        assert!(ra_product_fit(&[(1.0, 1e4), (1.0, 1e4), (2.0, 3e3)]).is_err());
        assert!(ra_product_fit(&[(1.0, 1e4), (2.0, -3e3), (3.0, 1e3)]).is_err());
    }

    #[test]
    fn jc_slope_recovery() {
        // 10^3 A/cm^2 at 10 cycles falling to ~1.6e-4 at 30 cycles.
        let pts: Vec<(f64, f64)> = (10..=30)
            .map(|c| (c as f64, 10f64.powf(3.0 - 0.34 * (c as f64 - 10.0))))
            .collect();
        let fit = jc_cycles_fit(&pts).unwrap();
        assert!((fit.slope_per_cycle + 0.34).abs() < 1e-12);
        assert!((fit.log10_prefactor - 6.4).abs() < 1e-11);
        let scaled: Vec<(f64, f64)> = pts.iter().map(|&(c, j)| (c, 7.0 * j)).collect();
        let fit2 = jc_cycles_fit(&scaled).unwrap();
        assert!((fit2.slope_per_cycle - fit.slope_per_cycle).abs() < 1e-12);
        assert!((fit2.log10_prefactor - fit.log10_prefactor - 7f64.log10()).abs() < 1e-12);
    }

    #[test]
    fn jc_errors() {
        assert!(jc_cycles_fit(&[(20.0, 1.0)]).is_err());
        assert!(jc_cycles_fit(&[(20.0, 1.0), (21.0, 0.0), (22.0, 0.1)]).is_err());
        assert!(jc_cycles_fit(&[(20.0, 1.0), (20.0, 0.5), (20.0, 0.1)]).is_err());
    }

    #[test]
    fn wafer_cycle_offset() {
        let d = cycle_difference(6.0, 0.8, -0.34).unwrap();
        assert!((d - 7.5f64.log10() / 0.34).abs() < 1e-12);
        assert!((d - 2.57).abs() < 0.01);
    }
}
