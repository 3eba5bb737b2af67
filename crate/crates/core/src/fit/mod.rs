//! Nonlinear least squares, the model library, starting-point heuristics and
//! Jacobian diagnostics.

mod check;
mod guess;
mod lm;
mod models;

pub use check::jacobian_check;
pub use guess::{dominant_frequency, initial_guess_rabi, initial_guess_ramsey, initial_guess_t1, MIN_GUESS_POINTS};
pub use lm::{fit_model, nlls_fit, nlls_fit_with, FitOptions, FitProblem, FitResult, UncertaintyMode};
pub use models::{Bound, Model, ModelKind};

use serde::{Deserialize, Serialize};

use crate::dynamics::TimeTrace;
use crate::error::{Error, Result};

/// Guesses a starting point for a time-domain model and fits it.
pub fn fit_trace(kind: ModelKind, trace: &TimeTrace, opts: &FitOptions) -> Result<FitResult> {
    let initial = match kind {
        ModelKind::ExpDecay => initial_guess_t1(trace)?,
        ModelKind::DecayingCosine => initial_guess_ramsey(trace)?,
        ModelKind::Rabi => initial_guess_rabi(trace)?,
        other => {
            return Err(Error::invalid(
                "model",
                format!("{} is not a time-domain model", other.name()),
            ))
        }
    };
    let mut problem = FitProblem::new(kind, trace.t_s.clone(), trace.y.clone(), initial);
    problem.sigma = trace.sigma.clone();
    nlls_fit_with(&problem, opts)
}

/// Two readings of "the uncertainty" of a repeated fit: the typical single-fit
/// standard error, and the scatter of the estimates themselves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepeatSummary {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation of the estimates.
    pub spread: f64,
    /// Mean of the per-fit standard errors.
    pub mean_std_err: f64,
}

pub fn repeat_summary(values: &[f64], std_errs: &[f64]) -> Result<RepeatSummary> {
    if values.len() < 2 || values.len() != std_errs.len() {
        return Err(Error::invalid("values", "need >= 2 estimates with matching std errors"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(RepeatSummary {
        n: values.len(),
        mean,
        spread: var.sqrt(),
        mean_std_err: std_errs.iter().sum::<f64>() / n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{linspace, RamseyModel, T1Model};

    #[test]
    fn ramsey_end_to_end() {
        let m = RamseyModel::new(0.5, 0.45, 1.2e-6, 5.2e6, 0.0).unwrap();
        let tr = m.trace(&linspace(0.0, 2e-6, 200), 0.01, 11).unwrap();
        let r = fit_trace(ModelKind::DecayingCosine, &tr, &FitOptions::default()).unwrap();
        assert!(r.converged);
        let (t2, se) = r.param("t2star_s").unwrap();
        assert!((t2 - 1.2e-6).abs() < 4.0 * se, "{t2} +- {se}");
        assert!(r.n_iter < 50);
    }

    #[test]
    fn repeat_summary_reports_both() {
        let m = T1Model::new(1.0, 3e-6, 0.0).unwrap();
        let t = linspace(0.0, 15e-6, 151);
        let (mut v, mut s) = (vec![], vec![]);
        for seed in 0..20 {
            let r = fit_trace(ModelKind::ExpDecay, &m.trace(&t, 0.01, seed).unwrap(), &FitOptions::default()).unwrap();
            v.push(r.params[1]);
            s.push(r.std_errs[1]);
        }
        let sum = repeat_summary(&v, &s).unwrap();
        let ratio = sum.spread / sum.mean_std_err;
        assert!((0.5..2.0).contains(&ratio), "{ratio}");
        assert!(repeat_summary(&v[..1], &s[..1]).is_err());
    }

    #[test]
    fn rejects_non_time_model() {
        let tr = TimeTrace::new(linspace(0.0, 1.0, 20), linspace(0.0, 1.0, 20)).unwrap();
        assert!(fit_trace(ModelKind::LogLinear, &tr, &FitOptions::default()).is_err());
    }
}
