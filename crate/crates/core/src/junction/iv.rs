use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::scaling::JunctionGeometry;
use crate::error::{require_positive, Error, Result};
use crate::noise;

pub const MIN_TRACE_POINTS: usize = 16;
pub const DEFAULT_SWITCH_THRESHOLD_V: f64 = 100e-6;
pub const DEFAULT_RSG_PROBE_V: f64 = 3e-3;

/// The subgap probe is lowered to this fraction of Vg when the nominal probe
/// voltage would land on the gap rise.
const RSG_PROBE_MAX_FRACTION_OF_VG: f64 = 0.75;
/// Normal-branch fit region: V above this multiple of Vg.
const NORMAL_REGION_FACTOR: f64 = 1.2;
/// A jump must exceed the median post-switch step by this factor.
const JUMP_SIGNIFICANCE: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepDirection {
    Forward,
    Reverse,
}

impl SweepDirection {
    pub fn tag(self) -> &'static str {
        match self {
            SweepDirection::Forward => "fwd",
            SweepDirection::Reverse => "rev",
        }
    }
}

/// One direction of a current-biased sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IVTrace {
    pub bias_a: Vec<f64>,
    pub voltage_v: Vec<f64>,
    pub direction: SweepDirection,
}

impl IVTrace {
    pub fn new(bias_a: Vec<f64>, voltage_v: Vec<f64>, direction: SweepDirection) -> Result<Self> {
        let t = Self {
            bias_a,
            voltage_v,
            direction,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bias_a.len() != self.voltage_v.len() {
            return Err(Error::invalid(
                "trace",
                format!(
                    "bias and voltage lengths differ ({} vs {})",
                    self.bias_a.len(),
                    self.voltage_v.len()
                ),
            ));
        }
        if self.bias_a.len() < MIN_TRACE_POINTS {
            return Err(Error::invalid(
                "trace",
                format!("need at least {MIN_TRACE_POINTS} points, got {}", self.bias_a.len()),
            ));
        }
        if self
            .bias_a
            .iter()
            .chain(&self.voltage_v)
            .any(|x| !x.is_finite())
        {
            return Err(Error::invalid("trace", "non-finite sample"));
        }
        let monotone = match self.direction {
            SweepDirection::Forward => self.bias_a.windows(2).all(|w| w[1] > w[0]),
            SweepDirection::Reverse => self.bias_a.windows(2).all(|w| w[1] < w[0]),
        };
        if !monotone {
            return Err(Error::invalid(
                "trace",
                format!(
                    "bias is not strictly monotone for a {} sweep",
                    self.direction.tag()
                ),
            ));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.bias_a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bias_a.is_empty()
    }

    /// Linear interpolation of the voltage at `bias`, or `None` outside the
    /// sampled range.
    pub fn voltage_at(&self, bias: f64) -> Option<f64> {
        let (lo, hi) = match self.direction {
            SweepDirection::Forward => (self.bias_a[0], self.bias_a[self.len() - 1]),
            SweepDirection::Reverse => (self.bias_a[self.len() - 1], self.bias_a[0]),
        };
        if !(lo..=hi).contains(&bias) {
            return None;
        }
        self.bias_a
            .windows(2)
            .zip(self.voltage_v.windows(2))
            .find(|(b, _)| (b[0] - bias) * (b[1] - bias) <= 0.0)
            .map(|(b, v)| {
                if b[1] == b[0] {
                    v[0]
                } else {
                    v[0] + (v[1] - v[0]) * (bias - b[0]) / (b[1] - b[0])
                }
            })
    }
}

/// Shape of the quasiparticle gap rise between the subgap branch and Vg.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapRiseShape {
    /// Exponential saturation from 0.9 Vg to Vg.
    #[default]
    Saturating,
    /// Linear ramp from 0.8 Vg reaching Vg within the first fifth of the rise.
    Linear,
}

impl GapRiseShape {
    fn knee_fraction(self) -> f64 {
        match self {
            GapRiseShape::Saturating => 0.9,
            GapRiseShape::Linear => 0.8,
        }
    }
}

/// Parameters of a synthetic hysteretic junction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JunctionModel {
    pub ic_a: f64,
    pub rn_ohm: f64,
    pub rsg_ohm: f64,
    pub vg_v: f64,
    pub isw_a: f64,
    /// Voltage at which the reverse subgap branch retraps to zero.
    pub retrap_v: f64,
    /// Standard deviation of Gaussian jitter applied to Isw.
    pub isw_jitter_a: f64,
    pub shape: GapRiseShape,
}

impl JunctionModel {
    /// Retrapping defaults to a quarter of the gap voltage.
    pub fn new(ic_a: f64, rn_ohm: f64, rsg_ohm: f64, vg_v: f64, isw_a: f64) -> Result<Self> {
        let m = Self {
            ic_a,
            rn_ohm,
            rsg_ohm,
            vg_v,
            isw_a,
            retrap_v: 0.25 * vg_v,
            isw_jitter_a: 0.0,
            shape: GapRiseShape::default(),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn with_shape(mut self, shape: GapRiseShape) -> Self {
        self.shape = shape;
        self
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("ic_a", self.ic_a)?;
        require_positive("rn_ohm", self.rn_ohm)?;
        require_positive("rsg_ohm", self.rsg_ohm)?;
        require_positive("vg_v", self.vg_v)?;
        require_positive("isw_a", self.isw_a)?;
        if self.isw_a > self.ic_a {
            return Err(Error::invalid("isw_a", "switching current must not exceed ic"));
        }
        if self.rn_ohm >= self.rsg_ohm {
            return Err(Error::invalid("rsg_ohm", "subgap resistance must exceed rn"));
        }
        if !(self.retrap_v >= 0.0 && self.retrap_v < self.shape.knee_fraction() * self.vg_v) {
            return Err(Error::invalid(
                "retrap_v",
                "retrapping voltage must lie below the gap-rise knee",
            ));
        }
        if !(self.isw_jitter_a.is_finite() && self.isw_jitter_a >= 0.0) {
            return Err(Error::invalid("isw_jitter_a", "must be >= 0"));
        }
        Ok(())
    }

    /// Gap current Ig = 4 Ic / pi.
    pub fn ig_a(&self) -> f64 {
        4.0 * self.ic_a / PI
    }

    fn knee_current(&self) -> f64 {
        self.shape.knee_fraction() * self.vg_v / self.rsg_ohm
    }

    /// Voltage on the gap rise at bias `i` (knee <= i < Ig).
    fn gap_rise(&self, i: f64) -> f64 {
        let knee = self.knee_current();
        let span = (self.ig_a() - knee).max(f64::MIN_POSITIVE);
        let x = ((i - knee) / span).clamp(0.0, 1.0);
        match self.shape {
            GapRiseShape::Saturating => self.vg_v * (1.0 - 0.1 * (-25.0 * x).exp()),
            GapRiseShape::Linear => self.vg_v * (0.8 + 0.2 * (x / 0.2).min(1.0)),
        }
    }

    fn forward_voltage(&self, i: f64, isw: f64) -> f64 {
        if i < isw {
            0.0
        } else if i < self.ig_a() {
            self.gap_rise(i)
        } else {
            i * self.rn_ohm
        }
    }

    fn reverse_voltage(&self, i: f64) -> f64 {
        let retrap = self.retrap_v / self.rsg_ohm;
        if i >= self.ig_a() {
            i * self.rn_ohm
        } else if i >= self.knee_current() {
            self.gap_rise(i)
        } else if i >= retrap {
            i * self.rsg_ohm
        } else {
            0.0
        }
    }
}

/// Uniform bias grid from zero to `max_bias_a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub max_bias_a: f64,
    pub points: usize,
}

impl SweepGrid {
    /// Covers the normal branch well past 1.2 Vg with 4001 points.
    pub fn covering(model: &JunctionModel) -> Self {
        let normal_onset = (NORMAL_REGION_FACTOR * model.vg_v / model.rn_ohm).max(model.ig_a());
        Self {
            max_bias_a: 2.0 * normal_onset,
            points: 4001,
        }
    }

    fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|k| self.max_bias_a * k as f64 / (n - 1) as f64)
            .collect()
    }
}

/// Forward and reverse traces of a hysteretic junction with additive
/// Gaussian voltage noise.
///
/// Forward: zero voltage below Isw, the gap rise up to Ig, then V = I Rn.
/// Reverse: normal branch down to Ig, the gap rise, the subgap branch
/// V = I Rsg down to the retrapping point, then zero.
pub fn synthesize_iv(
    model: &JunctionModel,
    grid: &SweepGrid,
    noise_v: f64,
    seed: u64,
) -> Result<(IVTrace, IVTrace)> {
    model.validate()?;
    require_positive("max_bias_a", grid.max_bias_a)?;
    if grid.points < MIN_TRACE_POINTS {
        return Err(Error::invalid(
            "points",
            format!("need at least {MIN_TRACE_POINTS}"),
        ));
    }
    if !(noise_v.is_finite() && noise_v >= 0.0) {
        return Err(Error::invalid("noise_v", "must be >= 0"));
    }
    let isw = if model.isw_jitter_a > 0.0 {
        let jitter = noise::gaussian(seed ^ 0x5157, 1, model.isw_jitter_a)[0];
        (model.isw_a + jitter).clamp(f64::MIN_POSITIVE, model.ic_a)
    } else {
        model.isw_a
    };
    let up = grid.values();
    let down: Vec<f64> = up.iter().rev().copied().collect();
    let n = up.len();
    let jitter = noise::gaussian(seed, 2 * n, noise_v);
    let fwd_v = up
        .iter()
        .zip(&jitter[..n])
        .map(|(&i, e)| model.forward_voltage(i, isw) + e)
        .collect();
    let rev_v = down
        .iter()
        .zip(&jitter[n..])
        .map(|(&i, e)| model.reverse_voltage(i) + e)
        .collect();
    Ok((
        IVTrace::new(up, fwd_v, SweepDirection::Forward)?,
        IVTrace::new(down, rev_v, SweepDirection::Reverse)?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub switch_threshold_v: f64,
    pub rsg_probe_v: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            switch_threshold_v: DEFAULT_SWITCH_THRESHOLD_V,
            rsg_probe_v: DEFAULT_RSG_PROBE_V,
        }
    }
}

/// Quantities extracted from a bidirectional sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IVExtract {
    pub isw_a: f64,
    pub ig_a: f64,
    pub vg_v: f64,
    pub rn_ohm: f64,
    pub rsg_ohm: f64,
    pub ic_a: f64,
    pub gap2delta_mev: f64,
    pub jc_a_cm2: Option<f64>,
    /// Voltage at which Rsg was actually probed.
    pub rsg_probe_v: f64,
}

impl IVExtract {
    pub fn quality_ratio(&self) -> f64 {
        self.rsg_ohm / self.rn_ohm
    }

    /// Isw <= Ic <= Ig and Rsg > Rn.
    pub fn is_consistent(&self) -> bool {
        self.isw_a <= self.ic_a && self.ic_a <= self.ig_a && self.rsg_ohm > self.rn_ohm
    }
}

pub fn analyze_iv(forward: &IVTrace, reverse: &IVTrace, geom: Option<&JunctionGeometry>) -> Result<IVExtract> {
    analyze_iv_with(forward, reverse, geom, &AnalysisOptions::default())
}

/// Extracts Isw, Ig, Vg, Rn, Rsg and the derived Ic, 2Delta and Jc.
///
/// - Isw: first forward bias with |V| above the switching threshold.
/// - Ig: bias just after the largest single-step voltage jump following the
///   switch (lowest bias wins ties).
/// - Vg: forward voltage interpolated at Ig/2; when the forward trace is still
///   superconducting there, the reverse trace is used.
/// - Rn: least-squares slope of V(I) over V > 1.2 Vg on the forward trace.
/// - Rsg: probe voltage over the interpolated reverse-branch current at that
///   voltage. The probe is min(3 mV, 0.75 Vg).
pub fn analyze_iv_with(
    forward: &IVTrace,
    reverse: &IVTrace,
    geom: Option<&JunctionGeometry>,
    opts: &AnalysisOptions,
) -> Result<IVExtract> {
    forward.validate()?;
    reverse.validate()?;
    if forward.direction != SweepDirection::Forward || reverse.direction != SweepDirection::Reverse {
        return Err(Error::invalid("trace", "expected one forward and one reverse sweep"));
    }
    require_positive("switch_threshold_v", opts.switch_threshold_v)?;
    require_positive("rsg_probe_v", opts.rsg_probe_v)?;

    let v = &forward.voltage_v;
    let b = &forward.bias_a;
    let sw = v
        .iter()
        .position(|x| x.abs() > opts.switch_threshold_v)
        .ok_or_else(|| Error::Analysis("forward trace never leaves the zero-voltage state".into()))?;
    let isw = b[sw];

    let steps: Vec<f64> = v[sw..].windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    if steps.is_empty() {
        return Err(Error::Analysis("missing normal branch".into()));
    }
    let (jump_at, jump) = steps
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (k, &s)| if s > best.1 { (k, s) } else { best });
    let mut sorted = steps.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    if !(jump > JUMP_SIGNIFICANCE * median && jump > opts.switch_threshold_v) {
        return Err(Error::Analysis("no voltage jump onto the normal branch found".into()));
    }
    let ig_index = sw + jump_at + 1;
    let ig = b[ig_index];

    let half = 0.5 * ig;
    let vg = match forward.voltage_at(half) {
        Some(x) if x.abs() > opts.switch_threshold_v => x,
        _ => reverse
            .voltage_at(half)
            .filter(|x| x.abs() > opts.switch_threshold_v)
            .ok_or_else(|| Error::Analysis("no finite voltage at Ig/2 on either sweep".into()))?,
    };
    let vg = vg.abs();

    let normal: Vec<(f64, f64)> = b[ig_index..]
        .iter()
        .zip(&v[ig_index..])
        .filter(|(_, &x)| x > NORMAL_REGION_FACTOR * vg)
        .map(|(&i, &x)| (i, x))
        .collect();
    if normal.len() < 2 {
        return Err(Error::Analysis(format!(
            "missing normal branch: {} points above 1.2 Vg",
            normal.len()
        )));
    }
    let rn = slope(&normal).ok_or_else(|| Error::Analysis("degenerate normal branch".into()))?;
    if !(rn > 0.0) {
        return Err(Error::Analysis("non-positive normal-state slope".into()));
    }

    let probe = opts.rsg_probe_v.min(RSG_PROBE_MAX_FRACTION_OF_VG * vg);
    let rsg = subgap_resistance(reverse, half, probe, opts.switch_threshold_v)?;

    let ic = PI * ig / 4.0;
    Ok(IVExtract {
        isw_a: isw,
        ig_a: ig,
        vg_v: vg,
        rn_ohm: rn,
        rsg_ohm: rsg,
        ic_a: ic,
        gap2delta_mev: vg * 1e3,
        jc_a_cm2: geom.map(|g| ic / g.area_cm2()),
        rsg_probe_v: probe,
    })
}

/// Walks the reverse sweep below `max_bias` and interpolates the current at
/// which the voltage first falls through `probe`. A drop straight to the
/// zero-voltage state (retrapping) does not count as reaching the probe.
fn subgap_resistance(reverse: &IVTrace, max_bias: f64, probe: f64, zero_v: f64) -> Result<f64> {
    let pts: Vec<(f64, f64)> = reverse
        .bias_a
        .iter()
        .zip(&reverse.voltage_v)
        .filter(|(&i, _)| i < max_bias)
        .map(|(&i, &x)| (i, x))
        .collect();
    pts.windows(2)
        .find(|w| w[0].1 >= probe && w[1].1 < probe && w[1].1.abs() > zero_v)
        .map(|w| {
            let (i0, v0) = w[0];
            let (i1, v1) = w[1];
            let current = i0 + (i1 - i0) * (probe - v0) / (v1 - v0);
            probe / current
        })
        .filter(|r| r.is_finite() && *r > 0.0)
        .ok_or_else(|| {
            Error::Analysis(format!(
                "reverse branch never reaches {:.3} mV on the subgap branch",
                probe * 1e3
            ))
        })
}

fn slope(points: &[(f64, f64)]) -> Option<f64> {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Zero-temperature Ambegaokar-Baratoff critical current, pi Delta / (2 e Rn).
pub fn ambegaokar_baratoff_ic(gap2delta_mev: f64, rn_ohm: f64) -> Result<f64> {
    require_positive("gap2delta_mev", gap2delta_mev)?;
    require_positive("rn_ohm", rn_ohm)?;
    // Delta/e in volts is half the gap in mV times 1e-3.
    let delta_over_e = 0.5 * gap2delta_mev * 1e-3;
    Ok(PI * delta_over_e / (2.0 * rn_ohm))
}

#[cfg(test)]
mod tests {
    use super::*;

    const NA: f64 = 1e-9;

    /// 2 um junction at 6 A/cm^2 with Rn = 14.6 kOhm, Rsg = 0.80 MOhm and
    /// Vg = 4.3 mV.
    fn reference_junction() -> JunctionModel {
        let area_cm2 = PI * (1e-4f64).powi(2);
        JunctionModel::new(6.0 * area_cm2, 14.6e3, 0.80e6, 4.3e-3, 50.0 * NA).unwrap()
    }

    fn within(actual: f64, expected: f64, rel: f64) -> bool {
        ((actual - expected) / expected).abs() < rel
    }

    #[test]
    fn round_trip_reference_junction() {
        let m = reference_junction();
        let (f, r) = synthesize_iv(&m, &SweepGrid::covering(&m), 0.0, 0).unwrap();
        let x = analyze_iv(&f, &r, None).unwrap();
        assert!(within(x.isw_a, m.isw_a, 0.02), "{x:?}");
        assert!(within(x.ig_a, m.ig_a(), 0.02), "{x:?}");
        assert!(within(x.vg_v, m.vg_v, 0.01), "{x:?}");
        assert!(within(x.rn_ohm, m.rn_ohm, 0.02), "{x:?}");
        assert!(within(x.rsg_ohm, m.rsg_ohm, 0.02), "{x:?}");
        assert!(within(x.quality_ratio(), 55.0, 0.02));
        assert_eq!(x.ic_a, PI * x.ig_a / 4.0);
        assert_eq!(x.gap2delta_mev, x.vg_v * 1e3);
        assert_eq!(x.rsg_probe_v, 3e-3);
        assert!(x.is_consistent());
    }

    #[test]
    fn main_text_junction() {
        // Rsg/Rn = 47 at Vg = 4.2 mV.
        let m = JunctionModel::new(150.0 * NA, 10e3, 470e3, 4.2e-3, 40.0 * NA).unwrap();
        let (f, r) = synthesize_iv(&m, &SweepGrid::covering(&m), 0.0, 0).unwrap();
        let x = analyze_iv(&f, &r, None).unwrap();
        assert!(within(x.quality_ratio(), 47.0, 0.03));
        assert!(within(x.vg_v, 4.2e-3, 0.03));
    }

    #[test]
    fn analyzer_independent_of_gap_rise_shape() {
        let m = reference_junction().with_shape(GapRiseShape::Linear);
        let (f, r) = synthesize_iv(&m, &SweepGrid::covering(&m), 0.0, 0).unwrap();
        let x = analyze_iv(&f, &r, None).unwrap();
        assert!(within(x.vg_v, m.vg_v, 0.01), "{x:?}");
        assert!(within(x.rsg_ohm, m.rsg_ohm, 0.02), "{x:?}");
        assert!(within(x.ig_a, m.ig_a(), 0.02), "{x:?}");
    }

    #[test]
    fn switching_at_ic_gives_single_zero_segment() {
        let mut m = reference_junction();
        m.isw_a = m.ic_a;
        let (f, _) = synthesize_iv(&m, &SweepGrid::covering(&m), 0.0, 0).unwrap();
        let zero: Vec<bool> = f.voltage_v.iter().map(|&x| x == 0.0).collect();
        let segments = zero.windows(2).filter(|w| w[0] != w[1]).count();
        assert_eq!(segments, 1);
        let last_zero = zero.iter().rposition(|&z| z).unwrap();
        assert!(f.bias_a[last_zero] < m.ic_a && f.bias_a[last_zero + 1] >= m.ic_a);
    }

    #[test]
    fn gap_to_switch_ratio() {
        let m = reference_junction();
        assert!((m.ig_a() / m.isw_a - 4.0 / PI * m.ic_a / m.isw_a).abs() < 1e-12);
        // Ig = 240 nA gives Ic = 188 nA.
        assert!(((PI * 240.0 / 4.0) - 188.5).abs() < 0.1);
    }

    #[test]
    fn geometry_gives_current_density() {
        let m = reference_junction();
        let (f, r) = synthesize_iv(&m, &SweepGrid::covering(&m), 0.0, 0).unwrap();
        let g = JunctionGeometry::new(2.0, 21).unwrap();
        let x = analyze_iv(&f, &r, Some(&g)).unwrap();
        assert!(within(x.jc_a_cm2.unwrap(), 6.0, 0.02));
    }

    #[test]
    fn noisy_trace_still_analyses() {
        let m = reference_junction();
        let (f, r) = synthesize_iv(&m, &SweepGrid::covering(&m), 5e-6, 3).unwrap();
        let x = analyze_iv(&f, &r, None).unwrap();
        assert!(within(x.vg_v, m.vg_v, 0.01));
        assert!(within(x.rn_ohm, m.rn_ohm, 0.01));
        assert!(within(x.rsg_ohm, m.rsg_ohm, 0.05));
    }

    #[test]
    fn low_gap_lowers_probe() {
        let m = JunctionModel::new(150.0 * NA, 10e3, 500e3, 3.0e-3, 40.0 * NA).unwrap();
        let (f, r) = synthesize_iv(&m, &SweepGrid::covering(&m), 0.0, 0).unwrap();
        let x = analyze_iv(&f, &r, None).unwrap();
        assert!((x.rsg_probe_v - 0.75 * x.vg_v).abs() < 1e-15);
        assert!(within(x.rsg_ohm, 500e3, 0.02));
    }

    #[test]
    fn error_paths() {
        let m = reference_junction();
        let grid = SweepGrid::covering(&m);
        let (f, r) = synthesize_iv(&m, &grid, 0.0, 0).unwrap();

        // Sweep stopping below the switching current.
        let n = 200;
        let flat = IVTrace::new(f.bias_a[..n].to_vec(), vec![0.0; n], SweepDirection::Forward).unwrap();
        assert!(matches!(analyze_iv(&flat, &r, None), Err(Error::Analysis(_))));

        // Truncated before the jump: no normal branch.
        let ig_idx = f.bias_a.iter().position(|&b| b >= m.ig_a()).unwrap();
        let cut = IVTrace::new(
            f.bias_a[..ig_idx - 5].to_vec(),
            f.voltage_v[..ig_idx - 5].to_vec(),
            SweepDirection::Forward,
        )
        .unwrap();
        assert!(analyze_iv(&cut, &r, None).is_err());

        // Reverse branch that retraps above the probe voltage.
        let mut early = m;
        early.retrap_v = 3.5e-3;
        let (f2, r2) = synthesize_iv(&early, &grid, 0.0, 0).unwrap();
        let err = analyze_iv(&f2, &r2, None).unwrap_err();
        assert!(err.to_string().contains("never reaches"), "{err}");

        // Directions swapped.
        assert!(analyze_iv(&r, &f, None).is_err());
    }

    #[test]
    fn trace_validation() {
        let bias: Vec<f64> = (0..20).map(f64::from).collect();
        assert!(IVTrace::new(bias.clone(), vec![0.0; 19], SweepDirection::Forward).is_err());
        assert!(IVTrace::new(bias.clone(), vec![0.0; 20], SweepDirection::Reverse).is_err());
        assert!(IVTrace::new(bias[..10].to_vec(), vec![0.0; 10], SweepDirection::Forward).is_err());
        let mut wobble = bias.clone();
        wobble.swap(3, 4);
        assert!(IVTrace::new(wobble, vec![0.0; 20], SweepDirection::Forward).is_err());
    }

    #[test]
    fn invalid_models() {
        assert!(JunctionModel::new(100e-9, 10e3, 500e3, 4e-3, 120e-9).is_err());
        assert!(JunctionModel::new(100e-9, 10e3, 5e3, 4e-3, 50e-9).is_err());
        assert!(JunctionModel::new(100e-9, 10e3, 500e3, 0.0, 50e-9).is_err());
    }

    #[test]
    fn hysteresis() {
        let m = reference_junction();
        let (f, r) = synthesize_iv(&m, &SweepGrid::covering(&m), 0.0, 0).unwrap();
        let rev_at = |i: f64| r.voltage_at(i).unwrap();
        for (&i, &v) in f.bias_a.iter().zip(&f.voltage_v) {
            if v > 1.2 * m.vg_v {
                assert!((rev_at(i) - v).abs() < 1e-12);
            }
        }
        // Below Isw the forward trace is superconducting while the reverse
        // sits on the subgap branch.
        let probe = 0.5 * (m.retrap_v / m.rsg_ohm + 0.9 * m.vg_v / m.rsg_ohm);
        assert_eq!(f.voltage_at(probe).unwrap(), 0.0);
        assert!(rev_at(probe) > 1e-3);
    }

    #[test]
    fn ambegaokar_baratoff() {
        let ic = ambegaokar_baratoff_ic(4.3, 14.6e3).unwrap();
        assert!((ic / NA - 231.3).abs() < 0.1, "{}", ic / NA);
        let half = ambegaokar_baratoff_ic(4.3, 29.2e3).unwrap();
        assert!((ic / half - 2.0).abs() < 1e-12);
        assert!(ambegaokar_baratoff_ic(4.3, 1e300).unwrap() < 1e-290);
        assert!(ambegaokar_baratoff_ic(0.0, 1.0).is_err());
        assert!(ambegaokar_baratoff_ic(4.3, -1.0).is_err());
    }
}
