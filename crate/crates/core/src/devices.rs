//! Device parameter records and the five-qubit reference set.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loss::{q_from_t1, q_gold, q_piezo_scaled, q_subgap, PiezoAnchor};
use crate::transmon::{csigma_from_ec, CoupledSystemParams, TransmonParams};

/// One qubit/cavity device. Every field is optional so partial files load;
/// accessors report which field is missing.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fq_ghz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ej_ghz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ec_ghz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_mhz: Option<f64>,
    /// Cavity pull from its bare value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_fc_mhz: Option<f64>,
    /// Dressed (measured) cavity frequency.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fc_ghz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_ci: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1_us: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t2star_us: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_j_um: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_j: Option<f64>,
}

fn need(v: Option<f64>, name: &'static str) -> Result<f64> {
    v.ok_or_else(|| Error::invalid(name, "missing from device record"))
}

impl DeviceRecord {
    pub fn label(&self) -> &str {
        self.name.as_deref().unwrap_or("device")
    }

    pub fn transmon(&self) -> Result<TransmonParams> {
        TransmonParams::new(need(self.ej_ghz, "ej_ghz")?, need(self.ec_ghz, "ec_ghz")?)
    }

    /// Bare cavity frequency: the dressed value minus the pull when known.
    pub fn fc_bare_ghz(&self) -> Result<f64> {
        let fc = need(self.fc_ghz, "fc_ghz")?;
        let pull = match (self.delta_fc_mhz, self.fq_ghz) {
            (Some(d), Some(fq)) if fq < fc => d,
            (Some(d), Some(_)) => -d,
            _ => 0.0,
        };
        Ok(fc - pull * 1e-3)
    }

    pub fn coupled(&self) -> Result<CoupledSystemParams> {
        CoupledSystemParams::new(self.transmon()?, need(self.g_mhz, "g_mhz")?, self.fc_bare_ghz()?)
    }

    pub fn c_sigma_f(&self) -> Result<f64> {
        csigma_from_ec(need(self.ec_ghz, "ec_ghz")?)
    }

    pub fn c_j_f(&self) -> Result<f64> {
        Ok(need(self.p_j, "p_j")? * self.c_sigma_f()?)
    }

    pub fn t1_s(&self) -> Option<f64> {
        self.t1_us.map(|t| t * 1e-6)
    }

    pub fn q_measured(&self) -> Result<f64> {
        q_from_t1(need(self.fq_ghz, "fq_ghz")?, need(self.t1_us, "t1_us")? * 1e-6)
    }
}

#[allow(clippy::too_many_arguments)]
fn row(
    name: &str,
    fq: f64,
    ej: f64,
    ec: f64,
    g: f64,
    dfc: f64,
    fc: f64,
    q_ci: f64,
    t1: f64,
    t2: Option<f64>,
    d: f64,
    pj: f64,
) -> DeviceRecord {
    DeviceRecord {
        name: Some(name.to_string()),
        fq_ghz: Some(fq),
        ej_ghz: Some(ej),
        ec_ghz: Some(ec),
        g_mhz: Some(g),
        delta_fc_mhz: Some(dfc),
        fc_ghz: Some(fc),
        q_ci: Some(q_ci),
        t1_us: Some(t1),
        t2star_us: t2,
        d_j_um: Some(d),
        p_j: Some(pj),
    }
}

/// Measured parameters of the five reference qubits A1, A2, A3, B1, B2.
pub fn reference_devices() -> Vec<DeviceRecord> {
    vec![
        row("A1", 5.063, 20.020, 0.172, 48.7, 2.04, 6.8855, 44.5e3, 1.43, Some(0.74), 1.0, 0.30),
        row("A2", 4.089, 11.790, 0.196, 67.5, 1.53, 6.9657, 25.1e3, 2.87, Some(0.65), 0.8, 0.20),
        row("A3", 4.057, 11.545, 0.197, 68.5, 1.45, 7.0874, 56.4e3, 3.00, Some(1.20), 0.8, 0.20),
        row("B1", 3.983, 11.980, 0.182, 49.0, 1.40, 5.8848, 45.3e3, 2.66, Some(0.69), 2.0, 0.75),
        row("B2", 3.907, 11.189, 0.188, 55.0, 1.31, 6.2171, 36.6e3, 3.43, None, 2.0, 0.74),
    ]
}

pub fn reference_device(name: &str) -> Option<DeviceRecord> {
    reference_devices().into_iter().find(|d| d.name.as_deref() == Some(name))
}

/// Simulated piezoelectric Q for (e33, e31, junction diameter, pJ, Q).
pub const PIEZO_REFERENCE_ROWS: [(f64, f64, f64, f64, f64); 6] = [
    (1.41, -0.55, 0.8, 0.20, 8.3e3),
    (0.451, -0.176, 0.8, 0.20, 8.1e4),
    (0.141, -0.055, 0.8, 0.20, 8.3e5),
    (1.41, -0.55, 2.0, 0.75, 1.9e3),
    (0.451, -0.176, 2.0, 0.75, 1.8e4),
    (0.141, -0.055, 2.0, 0.75, 1.9e5),
];

/// Anchor for the 0.8 um / pJ 0.20 geometry at bulk wurtzite constants.
pub fn piezo_anchor_small() -> PiezoAnchor {
    let (e33, e31, d, pj, q) = PIEZO_REFERENCE_ROWS[0];
    PiezoAnchor { e33_ref: e33, e31_ref: e31, q_ref: q, d_j_um: d, p_j: pj }
}

/// Anchor for the 2 um / pJ 0.75 geometry at bulk wurtzite constants.
pub fn piezo_anchor_large() -> PiezoAnchor {
    let (e33, e31, d, pj, q) = PIEZO_REFERENCE_ROWS[3];
    PiezoAnchor { e33_ref: e33, e31_ref: e31, q_ref: q, d_j_um: d, p_j: pj }
}

/// Entry of a channels file: a literal Q or the inputs of one channel formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelSpec {
    Q(f64),
    Formula(ChannelFormula),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "formula", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ChannelFormula {
    /// `rsg_ohm = null` means an ideal barrier.
    Subgap { rsg_ohm: Option<f64> },
    Gold { r_au_ohm: f64 },
    /// Anchor defaults to the geometry closest to the device junction diameter.
    Piezo {
        e33: f64,
        e31: f64,
        #[serde(default)]
        anchor: Option<PiezoAnchor>,
    },
}

impl ChannelSpec {
    pub fn resolve(&self, device: &DeviceRecord) -> Result<f64> {
        match self {
            ChannelSpec::Q(q) => {
                if *q > 0.0 {
                    Ok(*q)
                } else {
                    Err(Error::invalid("channels", format!("Q must be > 0, got {q}")))
                }
            }
            ChannelSpec::Formula(f) => {
                let fq = need(device.fq_ghz, "fq_ghz")?;
                match f {
                    ChannelFormula::Subgap { rsg_ohm } => {
                        q_subgap(fq, device.c_sigma_f()?, rsg_ohm.unwrap_or(f64::INFINITY))
                    }
                    ChannelFormula::Gold { r_au_ohm } => q_gold(fq, device.c_sigma_f()?, device.c_j_f()?, *r_au_ohm),
                    ChannelFormula::Piezo { e33, e31, anchor } => {
                        let anchor = match anchor {
                            Some(a) => *a,
                            None => nearest_piezo_anchor(need(device.d_j_um, "d_j_um")?),
                        };
                        q_piezo_scaled(&anchor, *e33, *e31)
                    }
                }
            }
        }
    }
}

fn nearest_piezo_anchor(d_j_um: f64) -> PiezoAnchor {
    let (s, l) = (piezo_anchor_small(), piezo_anchor_large());
    if (d_j_um - s.d_j_um).abs() <= (d_j_um - l.d_j_um).abs() {
        s
    } else {
        l
    }
}

/// Resolves every channel against the device.
pub fn resolve_channels(device: &DeviceRecord, specs: &BTreeMap<String, ChannelSpec>) -> Result<BTreeMap<String, f64>> {
    specs
        .iter()
        .map(|(k, s)| s.resolve(device).map(|q| (k.clone(), q)))
        .collect()
}
