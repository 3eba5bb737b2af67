//! Model library with analytic gradients.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// Parameter constraint, enforced by reparameterisation inside the solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    Free,
    /// p = exp(u).
    Positive,
    /// p = lo + (hi - lo) / (1 + exp(-u)).
    Interval(f64, f64),
}

impl Bound {
    pub fn contains(&self, p: f64) -> bool {
        match *self {
            Bound::Free => p.is_finite(),
            Bound::Positive => p.is_finite() && p > 0.0,
            Bound::Interval(lo, hi) => p > lo && p < hi,
        }
    }

    pub(crate) fn to_internal(&self, p: f64) -> f64 {
        match *self {
            Bound::Free => p,
            Bound::Positive => p.ln(),
            Bound::Interval(lo, hi) => {
                let s = (p - lo) / (hi - lo);
                (s / (1.0 - s)).ln()
            }
        }
    }

    pub(crate) fn to_external(&self, u: f64) -> f64 {
        match *self {
            Bound::Free => u,
            Bound::Positive => u.exp(),
            Bound::Interval(lo, hi) => lo + (hi - lo) / (1.0 + (-u).exp()),
        }
    }

    /// dp/du at internal coordinate u.
    pub(crate) fn derivative(&self, u: f64) -> f64 {
        match *self {
            Bound::Free => 1.0,
            Bound::Positive => u.exp(),
            Bound::Interval(lo, hi) => {
                let s = 1.0 / (1.0 + (-u).exp());
                (hi - lo) * s * (1.0 - s)
            }
        }
    }
}

/// A scalar model y = f(x; p) with an analytic gradient in p.
pub trait Model {
    fn name(&self) -> &'static str;
    fn param_names(&self) -> &'static [&'static str];
    fn eval(&self, x: f64, p: &[f64]) -> f64;
    /// Writes df/dp into `out` (length = number of parameters).
    fn gradient(&self, x: f64, p: &[f64], out: &mut [f64]);
    fn default_bounds(&self) -> Vec<Bound>;

    fn n_params(&self) -> usize {
        self.param_names().len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// a exp(-t / t1) + offset.
    ExpDecay,
    /// a0 + a exp(-t / t2) cos(2 pi delta t + phi0).
    DecayingCosine,
    /// log10_prefactor + slope x.
    LogLinear,
    /// Resistance [ohm] of a circular junction of diameter x [um] at
    /// RA = ra_kohm_um2.
    InverseArea,
    /// offset + amplitude sin^2(pi omega t).
    Rabi,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::ExpDecay,
        ModelKind::DecayingCosine,
        ModelKind::LogLinear,
        ModelKind::InverseArea,
        ModelKind::Rabi,
    ];
}

fn junction_area_um2(d_um: f64) -> f64 {
    PI * d_um * d_um / 4.0
}

impl Model for ModelKind {
    fn name(&self) -> &'static str {
        match self {
            ModelKind::ExpDecay => "exp-decay",
            ModelKind::DecayingCosine => "decaying-cosine",
            ModelKind::LogLinear => "log-linear",
            ModelKind::InverseArea => "inverse-area",
            ModelKind::Rabi => "rabi",
        }
    }

    fn param_names(&self) -> &'static [&'static str] {
        match self {
            ModelKind::ExpDecay => &["a", "t1_s", "offset"],
            ModelKind::DecayingCosine => &["a0", "a", "t2star_s", "delta_d_hz", "phi0"],
            ModelKind::LogLinear => &["log10_prefactor", "slope"],
            ModelKind::InverseArea => &["ra_kohm_um2"],
            ModelKind::Rabi => &["offset", "amplitude", "omega_hz"],
        }
    }

    fn eval(&self, x: f64, p: &[f64]) -> f64 {
        match self {
            ModelKind::ExpDecay => p[0] * (-x / p[1]).exp() + p[2],
            ModelKind::DecayingCosine => {
                p[0] + p[1] * (-x / p[2]).exp() * (2.0 * PI * p[3] * x + p[4]).cos()
            }
            ModelKind::LogLinear => p[0] + p[1] * x,
            ModelKind::InverseArea => p[0] * 1e3 / junction_area_um2(x),
            ModelKind::Rabi => p[0] + p[1] * (PI * p[2] * x).sin().powi(2),
        }
    }

    fn gradient(&self, x: f64, p: &[f64], out: &mut [f64]) {
        match self {
            ModelKind::ExpDecay => {
                let e = (-x / p[1]).exp();
                out[0] = e;
                out[1] = p[0] * e * x / (p[1] * p[1]);
                out[2] = 1.0;
            }
            ModelKind::DecayingCosine => {
                let e = (-x / p[2]).exp();
                let arg = 2.0 * PI * p[3] * x + p[4];
                let (s, c) = arg.sin_cos();
                out[0] = 1.0;
                out[1] = e * c;
                out[2] = p[1] * e * c * x / (p[2] * p[2]);
                out[3] = -p[1] * e * s * 2.0 * PI * x;
                out[4] = -p[1] * e * s;
            }
            ModelKind::LogLinear => {
                out[0] = 1.0;
                out[1] = x;
            }
            ModelKind::InverseArea => out[0] = 1e3 / junction_area_um2(x),
            ModelKind::Rabi => {
                let arg = PI * p[2] * x;
                out[0] = 1.0;
                out[1] = arg.sin().powi(2);
                out[2] = p[1] * (2.0 * arg).sin() * PI * x;
            }
        }
    }

    fn default_bounds(&self) -> Vec<Bound> {
        use Bound::*;
        match self {
            ModelKind::ExpDecay => vec![Free, Positive, Free],
            ModelKind::DecayingCosine => vec![Free, Free, Positive, Free, Free],
            ModelKind::LogLinear => vec![Free, Free],
            ModelKind::InverseArea => vec![Positive],
            ModelKind::Rabi => vec![Free, Free, Positive],
        }
    }
}
