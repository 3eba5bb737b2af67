//! Loss budget: per-channel quality factors and their harmonic combination
//! 1/Q = sum_i 1/Q_i.
//!
//! An infinite Q is a valid channel value and means the channel sets no limit.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::units::GHZ;

/// Allowed mismatch between the e33 and e31 rescaling factors.
pub const PIEZO_PROPORTIONALITY_TOL: f64 = 0.01;

fn omega_q(fq_ghz: f64) -> f64 {
    2.0 * PI * fq_ghz * GHZ
}

/// Q = 2 pi fq T1.
pub fn q_from_t1(fq_ghz: f64, t1_s: f64) -> Result<f64> {
    require_positive("fq_ghz", fq_ghz)?;
    require_positive("t1_s", t1_s)?;
    Ok(omega_q(fq_ghz) * t1_s)
}

/// Subgap conduction through the barrier, Q = omega_q C_sigma R_sg.
///
/// `rsg_ohm = +inf` (an ideal barrier) returns an infinite Q.
pub fn q_subgap(fq_ghz: f64, c_sigma_f: f64, rsg_ohm: f64) -> Result<f64> {
    require_positive("fq_ghz", fq_ghz)?;
    require_positive("c_sigma_f", c_sigma_f)?;
    if rsg_ohm == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    require_positive("rsg_ohm", rsg_ohm)?;
    Ok(omega_q(fq_ghz) * c_sigma_f * rsg_ohm)
}

/// Series resistance in the junction lead,
/// Q = (C_sigma / (C_sigma - C_J))^2 / (omega_q C_sigma R_Au).
pub fn q_gold(fq_ghz: f64, c_sigma_f: f64, c_j_f: f64, r_au_ohm: f64) -> Result<f64> {
    require_positive("fq_ghz", fq_ghz)?;
    require_positive("c_sigma_f", c_sigma_f)?;
    require_positive("r_au_ohm", r_au_ohm)?;
    if !(c_j_f.is_finite() && c_j_f >= 0.0) {
        return Err(Error::invalid("c_j_f", "must be >= 0"));
    }
    if c_j_f >= c_sigma_f {
        return Err(Error::invalid(
            "c_j_f",
            "junction capacitance must be below C_sigma",
        ));
    }
    let lever = c_sigma_f / (c_sigma_f - c_j_f);
    Ok(lever * lever / (omega_q(fq_ghz) * c_sigma_f * r_au_ohm))
}

/// A reference piezoelectric loss point for one junction geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiezoAnchor {
    pub e33_ref: f64,
    pub e31_ref: f64,
    pub q_ref: f64,
    pub d_j_um: f64,
    pub p_j: f64,
}

impl PiezoAnchor {
    pub fn new(e33_ref: f64, e31_ref: f64, q_ref: f64, d_j_um: f64, p_j: f64) -> Result<Self> {
        let a = Self {
            e33_ref,
            e31_ref,
            q_ref,
            d_j_um,
            p_j,
        };
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("e33_ref", self.e33_ref)?;
        require_positive("q_ref", self.q_ref)?;
        require_positive("d_j_um", self.d_j_um)?;
        require_positive("p_j", self.p_j)?;
        if !(self.e31_ref.is_finite() && self.e31_ref != 0.0) {
            return Err(Error::invalid("e31_ref", "must be finite and non-zero"));
        }
        Ok(())
    }
}

/// Piezoelectric Q along the ray (e33, e31) = s (e33_ref, e31_ref):
/// Q = q_ref / s^2, with s^2 taken as the product of the two ratios.
pub fn q_piezo_scaled(anchor: &PiezoAnchor, e33: f64, e31: f64) -> Result<f64> {
    anchor.validate()?;
    let s33 = e33 / anchor.e33_ref;
    let s31 = e31 / anchor.e31_ref;
    if !(s33.is_finite() && s31.is_finite() && s33 > 0.0 && s31 > 0.0) {
        return Err(Error::invalid(
            "e33/e31",
            "must be a positive rescaling of the anchor constants",
        ));
    }
    if (s33 - s31).abs() > PIEZO_PROPORTIONALITY_TOL * s33.max(s31) {
        return Err(Error::invalid(
            "e33/e31",
            format!("not proportional to the anchor (ratios {s33:.4} vs {s31:.4})"),
        ));
    }
    Ok(anchor.q_ref / (s33 * s31))
}

/// What the measured Q implies about losses outside the budgeted channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Residual {
    /// Q of the unbudgeted remainder.
    Other { q_other: f64 },
    /// Budgeted loss exceeds the measured loss by `excess_loss` (in 1/Q).
    Inconsistent { excess_loss: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossBudget {
    pub channels: BTreeMap<String, f64>,
    pub q_total: f64,
    pub q_measured: Option<f64>,
    pub residual: Option<Residual>,
}

impl LossBudget {
    /// Channels ordered by loss contribution, largest first; ties break
    /// alphabetically.
    pub fn ranked(&self) -> Vec<(&str, f64)> {
        let mut v: Vec<(&str, f64)> = self.channels.iter().map(|(k, &q)| (k.as_str(), q)).collect();
        v.sort_by(|a, b| (1.0 / b.1).total_cmp(&(1.0 / a.1)).then_with(|| a.0.cmp(b.0)));
        v
    }

    pub fn is_consistent(&self) -> bool {
        !matches!(self.residual, Some(Residual::Inconsistent { .. }))
    }
}

/// Harmonic combination of channel Qs; with a measured T1, also the residual
/// channel (1/Q_measured - sum 1/Q_i)^-1.
pub fn combine_budget(channels: &BTreeMap<String, f64>, fq_ghz: f64, t1_s: Option<f64>) -> Result<LossBudget> {
    if channels.is_empty() {
        return Err(Error::invalid("channels", "at least one channel is required"));
    }
    for q in channels.values() {
        if !(*q > 0.0) {
            return Err(Error::invalid("channels", format!("Q must be > 0, got {q}")));
        }
    }
    let loss: f64 = channels.values().map(|q| 1.0 / q).sum();
    let q_total = 1.0 / loss;
    let q_measured = t1_s.map(|t1| q_from_t1(fq_ghz, t1)).transpose()?;
    let residual = q_measured.map(|qm| {
        let remainder = 1.0 / qm - loss;
        if remainder > 0.0 {
            Residual::Other {
                q_other: 1.0 / remainder,
            }
        } else {
            Residual::Inconsistent {
                excess_loss: -remainder,
            }
        }
    });
    Ok(LossBudget {
        channels: channels.clone(),
        q_total,
        q_measured,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const FF: f64 = 1e-15;

    #[test]
    fn measured_quality_factors() {
        let q = q_from_t1(4.057, 3.00e-6).unwrap();
        assert!((q - 7.647e4).abs() < 5.0, "{q}");
        assert!((0.4e5..=0.9e5).contains(&q));
        let q = q_from_t1(5.063, 1.43e-6).unwrap();
        assert!((q - 4.549e4).abs() < 5.0, "{q}");
        assert!(q_from_t1(4.0, 0.0).is_err());
    }

    #[test]
    fn subgap_channel() {
        let q = q_subgap(4.057, 98.3 * FF, 260e6).unwrap();
        assert!((q - 6.515e5).abs() / 6.515e5 < 1e-3, "{q}");
        assert_eq!(q_subgap(4.057, 98.3 * FF, f64::INFINITY).unwrap(), f64::INFINITY);
        assert!(q_subgap(4.057, 98.3 * FF, 0.0).is_err());
    }

    #[test]
    fn gold_channel() {
        let bare = q_gold(4.057, 98.3 * FF, 0.0, 0.1).unwrap();
        assert!((bare - 1.0 / (2.0 * PI * 4.057e9 * 98.3 * FF * 0.1)).abs() / bare < 1e-14);
        let half = q_gold(4.057, 98.3 * FF, 49.15 * FF, 0.1).unwrap();
        assert!((half / bare - 4.0).abs() < 1e-12);
        assert!(q_gold(4.057, 98.3 * FF, 98.3 * FF, 0.1).is_err());
        // Series resistance giving Q = 3.3e6 for the 0.8 um geometry (pJ = 0.2).
        let r = 1.5625 / (2.0 * PI * 4.057e9 * 98.3 * FF * 3.3e6);
        assert!(r > 0.0 && r < 1.0);
        let q = q_gold(4.057, 98.3 * FF, 0.2 * 98.3 * FF, r).unwrap();
        assert!((q - 3.3e6).abs() / 3.3e6 < 1e-12);
    }

    #[test]
    fn piezo_scaling() {
        let small = PiezoAnchor::new(1.41, -0.55, 8.3e3, 0.8, 0.20).unwrap();
        let q = q_piezo_scaled(&small, 0.451, -0.176).unwrap();
        assert!((q - 8.1e4).abs() / 8.1e4 < 0.03, "{q}");
        let q = q_piezo_scaled(&small, 0.141, -0.055).unwrap();
        assert!((q - 8.3e5).abs() / 8.3e5 < 0.01, "{q}");
        let large = PiezoAnchor::new(1.41, -0.55, 1.9e3, 2.0, 0.75).unwrap();
        let q = q_piezo_scaled(&large, 0.451, -0.176).unwrap();
        assert!((q - 1.8e4).abs() / 1.8e4 < 0.05, "{q}");
        assert!(q_piezo_scaled(&small, 0.451, -0.55).is_err());
        assert!(q_piezo_scaled(&small, -0.451, 0.176).is_err());
    }

    #[test]
    fn budget_basics() {
        let mut ch = BTreeMap::new();
        ch.insert("a".to_string(), 1e5);
        let single = combine_budget(&ch, 4.0, None).unwrap();
        assert!((single.q_total - 1e5).abs() < 1e-9);
        ch.insert("b".to_string(), 1e5);
        let pair = combine_budget(&ch, 4.0, None).unwrap();
        assert!((pair.q_total - 5e4).abs() < 1e-9);
        assert_eq!(pair.ranked(), vec![("a", 1e5), ("b", 1e5)]);
        assert!(combine_budget(&BTreeMap::new(), 4.0, None).is_err());
    }

    #[test]
    fn residual_channel() {
        let mut ch = BTreeMap::new();
        ch.insert("subgap".to_string(), 5.7e5);
        ch.insert("gold".to_string(), 3.3e6);
        let b = combine_budget(&ch, 4.057, Some(3.0e-6)).unwrap();
        let qm = b.q_measured.unwrap();
        let expected = 1.0 / (1.0 / qm - 1.0 / 5.7e5 - 1.0 / 3.3e6);
        match b.residual.unwrap() {
            Residual::Other { q_other } => {
                assert!((q_other - expected).abs() / expected < 1e-12);
                assert!((q_other - 9.0e4).abs() / 9.0e4 < 0.02, "{q_other}");
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(b.ranked()[0].0, "subgap");
    }

    #[test]
    fn overbudget_is_flagged() {
        let mut ch = BTreeMap::new();
        ch.insert("big".to_string(), 1e4);
        let b = combine_budget(&ch, 4.057, Some(3.0e-6)).unwrap();
        assert!(!b.is_consistent());
        assert!(matches!(b.residual, Some(Residual::Inconsistent { excess_loss }) if excess_loss > 0.0));
    }

    #[test]
    fn infinite_channel_is_lossless() {
        let mut ch = BTreeMap::new();
        ch.insert("ideal".to_string(), f64::INFINITY);
        ch.insert("real".to_string(), 2e5);
        let b = combine_budget(&ch, 4.0, None).unwrap();
        assert!((b.q_total - 2e5).abs() < 1e-9);
        assert_eq!(b.ranked()[0].0, "real");
    }

    proptest! {
        #[test]
        fn harmonic_bound(qs in proptest::collection::vec(1e2f64..1e8, 1..8)) {
            let ch: BTreeMap<String, f64> = qs.iter().enumerate().map(|(i, &q)| (format!("c{i}"), q)).collect();
            let b = combine_budget(&ch, 4.0, None).unwrap();
            let min = qs.iter().copied().fold(f64::INFINITY, f64::min);
            prop_assert!(b.q_total <= min * (1.0 + 1e-12));
            if qs.len() > 1 {
                prop_assert!(b.q_total < min);
            }
            let mut more = ch.clone();
            more.insert("extra".into(), 1e6);
            prop_assert!(combine_budget(&more, 4.0, None).unwrap().q_total < b.q_total);
        }

        #[test]
        fn homogeneous_degree_one(f in 0.5f64..10.0, c in 1e-14f64..1e-12, r in 1e3f64..1e10, t1 in 1e-7f64..1e-3, k in 0.1f64..10.0) {
            let base = q_subgap(f, c, r).unwrap();
            for scaled in [q_subgap(k * f, c, r), q_subgap(f, k * c, r), q_subgap(f, c, k * r)] {
                prop_assert!((scaled.unwrap() / base - k).abs() < 1e-12 * k);
            }
            let base = q_from_t1(f, t1).unwrap();
            prop_assert!((q_from_t1(k * f, t1).unwrap() / base - k).abs() < 1e-12 * k);
            prop_assert!((q_from_t1(f, k * t1).unwrap() / base - k).abs() < 1e-12 * k);
        }
    }
}
