//! Levenberg-Marquardt with Marquardt diagonal scaling.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::models::{Bound, Model, ModelKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UncertaintyMode {
    /// Covariance scaled by RSS / (N - P); sigma (if any) only weights.
    #[default]
    ResidualScaled,
    /// Sigma taken as the true per-point noise.
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub lambda0: f64,
    pub lambda_up: f64,
    pub lambda_down: f64,
    pub ftol: f64,
    pub gtol: f64,
    pub max_iter: usize,
    pub uncertainty: UncertaintyMode,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            lambda0: 1e-3,
            lambda_up: 10.0,
            lambda_down: 10.0,
            ftol: 1e-10,
            gtol: 1e-12,
            max_iter: 200,
            uncertainty: UncertaintyMode::ResidualScaled,
        }
    }
}

/// Damping above this means no descent step exists at working precision.
const LAMBDA_MAX: f64 = 1e16;
/// RSS below this fraction of sum(y^2) is a zero-residual fit at rounding level.
const ZERO_RSS_REL: f64 = 1e-28;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitProblem {
    pub model: ModelKind,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub sigma: Option<Vec<f64>>,
    pub initial: Vec<f64>,
    /// Defaults to the model's own bounds.
    pub bounds: Option<Vec<Bound>>,
}

impl FitProblem {
    pub fn new(model: ModelKind, x: Vec<f64>, y: Vec<f64>, initial: Vec<f64>) -> Self {
        Self {
            model,
            x,
            y,
            sigma: None,
            initial,
            bounds: None,
        }
    }

    pub fn with_sigma(mut self, sigma: Vec<f64>) -> Self {
        self.sigma = Some(sigma);
        self
    }

    pub fn with_bounds(mut self, bounds: Vec<Bound>) -> Self {
        self.bounds = Some(bounds);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: String,
    pub param_names: Vec<String>,
    pub params: Vec<f64>,
    pub std_errs: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    /// Weighted when sigma is given.
    pub rss: f64,
    pub converged: bool,
    pub n_iter: usize,
    /// Largest |cos| between the residual vector and a Jacobian column.
    pub grad_norm: f64,
}

impl FitResult {
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.param_names.iter().position(|n| n == name)
    }

    pub fn param(&self, name: &str) -> Option<(f64, f64)> {
        self.index_of(name).map(|i| (self.params[i], self.std_errs[i]))
    }
}

pub fn nlls_fit(problem: &FitProblem) -> Result<FitResult> {
    nlls_fit_with(problem, &FitOptions::default())
}

pub fn nlls_fit_with(problem: &FitProblem, opts: &FitOptions) -> Result<FitResult> {
    let bounds = problem
        .bounds
        .clone()
        .unwrap_or_else(|| problem.model.default_bounds());
    fit_model(
        &problem.model,
        &problem.x,
        &problem.y,
        problem.sigma.as_deref(),
        &problem.initial,
        &bounds,
        opts,
    )
}

fn validate(
    model: &dyn Model,
    x: &[f64],
    y: &[f64],
    sigma: Option<&[f64]>,
    initial: &[f64],
    bounds: &[Bound],
) -> Result<()> {
    let np = model.n_params();
    if x.len() != y.len() {
        return Err(Error::invalid("data", "x and y lengths differ"));
    }
    if x.len() < np {
        return Err(Error::invalid(
            "data",
            format!("{} points for {} parameters", x.len(), np),
        ));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::invalid("data", "non-finite value"));
    }
    if let Some(s) = sigma {
        if s.len() != x.len() {
            return Err(Error::invalid("sigma", "length differs from data"));
        }
        if s.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::invalid("sigma", "must be finite and > 0"));
        }
    }
    if initial.len() != np || bounds.len() != np {
        return Err(Error::invalid(
            "initial",
            format!("expected {np} parameters and bounds"),
        ));
    }
    for (i, (p, b)) in initial.iter().zip(bounds).enumerate() {
        if !b.contains(*p) {
            return Err(Error::invalid(
                "initial",
                format!("{} = {p} outside {b:?}", model.param_names()[i]),
            ));
        }
    }
    Ok(())
}

struct Workspace<'a> {
    model: &'a dyn Model,
    x: &'a [f64],
    y: &'a [f64],
    w: Vec<f64>,
    bounds: &'a [Bound],
}

impl Workspace<'_> {
    fn external(&self, u: &[f64]) -> Vec<f64> {
        u.iter().zip(self.bounds).map(|(u, b)| b.to_external(*u)).collect()
    }

    fn residuals(&self, p: &[f64]) -> DVector<f64> {
        DVector::from_iterator(
            self.x.len(),
            self.x
                .iter()
                .zip(self.y)
                .zip(&self.w)
                .map(|((&x, &y), &w)| (y - self.model.eval(x, p)) * w),
        )
    }

    /// Weighted Jacobian of the model in external coordinates, times dp/du
    /// per column when `chain` is given.
    fn jacobian(&self, p: &[f64], chain: Option<&[f64]>) -> DMatrix<f64> {
        let np = p.len();
        let mut j = DMatrix::zeros(self.x.len(), np);
        let mut g = vec![0.0; np];
        for (i, (&x, &w)) in self.x.iter().zip(&self.w).enumerate() {
            self.model.gradient(x, p, &mut g);
            for k in 0..np {
                let d = chain.map_or(1.0, |c| c[k]);
                j[(i, k)] = g[k] * w * d;
            }
        }
        j
    }
}

fn rss_of(r: &DVector<f64>) -> f64 {
    r.norm_squared()
}

fn scaled_gradient_norm(j: &DMatrix<f64>, r: &DVector<f64>) -> f64 {
    let rn = r.norm();
    if rn == 0.0 {
        return 0.0;
    }
    let g = j.transpose() * r;
    (0..j.ncols())
        .map(|k| {
            let cn = j.column(k).norm();
            if cn == 0.0 {
                0.0
            } else {
                g[k].abs() / (cn * rn)
            }
        })
        .fold(0.0, f64::max)
}

/// Inverse of a symmetric positive-definite matrix through Jacobi
/// equilibration; `None` when numerically singular.
fn spd_inverse(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = a.nrows();
    let d: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    if d.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return None;
    }
    let s = DVector::from_iterator(n, d.iter().map(|v| 1.0 / v.sqrt()));
    let scaled = DMatrix::from_fn(n, n, |i, k| a[(i, k)] * s[i] * s[k]);
    let eig = scaled.clone().symmetric_eigen();
    let (lo, hi) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if !(lo > hi * 1e-14) {
        return None;
    }
    let inv = scaled.cholesky()?.inverse();
    Some(DMatrix::from_fn(n, n, |i, k| inv[(i, k)] * s[i] * s[k]))
}

/// Fits any [`Model`]; the public entry points wrap this.
pub fn fit_model(
    model: &dyn Model,
    x: &[f64],
    y: &[f64],
    sigma: Option<&[f64]>,
    initial: &[f64],
    bounds: &[Bound],
    opts: &FitOptions,
) -> Result<FitResult> {
    validate(model, x, y, sigma, initial, bounds)?;
    let np = model.n_params();
    let ws = Workspace {
        model,
        x,
        y,
        w: match sigma {
            Some(s) => s.iter().map(|v| 1.0 / v).collect(),
            None => vec![1.0; x.len()],
        },
        bounds,
    };

    let mut u: Vec<f64> = initial.iter().zip(bounds).map(|(p, b)| b.to_internal(*p)).collect();
    let mut p = ws.external(&u);
    let mut r = ws.residuals(&p);
    let mut rss = rss_of(&r);
    if !rss.is_finite() {
        return Err(Error::invalid("initial", "model is not finite at the initial guess"));
    }
    let mut lambda = opts.lambda0;
    let mut converged = false;
    let mut n_iter = 0;
    let mut grad_norm;
    let y_scale: f64 = y.iter().zip(&ws.w).map(|(y, w)| (y * w).powi(2)).sum();

    loop {
        let chain: Vec<f64> = u.iter().zip(bounds).map(|(u, b)| b.derivative(*u)).collect();
        let j = ws.jacobian(&p, Some(&chain));
        grad_norm = scaled_gradient_norm(&j, &r);
        if grad_norm < opts.gtol || rss <= ZERO_RSS_REL * y_scale {
            converged = true;
            break;
        }
        if n_iter >= opts.max_iter {
            break;
        }
        let jtj = j.transpose() * &j;
        let jtr = j.transpose() * &r;
        let diag: Vec<f64> = (0..np).map(|k| jtj[(k, k)]).collect();
        // A column pinned at a bound has zero scale; damping alone holds it.
        let s: Vec<f64> = diag.iter().map(|d| if *d > 0.0 { 1.0 / d.sqrt() } else { 1.0 }).collect();
        let a = DMatrix::from_fn(np, np, |i, k| jtj[(i, k)] * s[i] * s[k]);
        let b = DVector::from_fn(np, |i, _| jtr[i] * s[i]);

        // Inner loop: raise damping until a step lowers the RSS.
        let mut accepted = false;
        while lambda <= LAMBDA_MAX {
            n_iter += 1;
            let mut damped = a.clone();
            for k in 0..np {
                damped[(k, k)] += lambda;
            }
            let step = damped.cholesky().map(|c| c.solve(&b));
            if let Some(z) = step {
                let u_new: Vec<f64> = (0..np).map(|k| u[k] + z[k] * s[k]).collect();
                let p_new = ws.external(&u_new);
                let r_new = ws.residuals(&p_new);
                let rss_new = rss_of(&r_new);
                if rss_new.is_finite() && rss_new < rss {
                    let rel = (rss - rss_new) / rss;
                    u = u_new;
                    p = p_new;
                    r = r_new;
                    rss = rss_new;
                    lambda = (lambda / opts.lambda_down).max(1e-15);
                    accepted = true;
                    if rel < opts.ftol {
                        converged = true;
                    }
                    break;
                }
            }
            lambda *= opts.lambda_up;
            if n_iter >= opts.max_iter {
                break;
            }
        }
        if !accepted && lambda > LAMBDA_MAX {
            // No descent direction left at working precision.
            converged = true;
        }
        if converged || (!accepted && n_iter >= opts.max_iter) {
            let chain: Vec<f64> = u.iter().zip(bounds).map(|(u, b)| b.derivative(*u)).collect();
            grad_norm = scaled_gradient_norm(&ws.jacobian(&p, Some(&chain)), &r);
            break;
        }
    }

    let jp = ws.jacobian(&p, None);
    let cov0 = spd_inverse(&(jp.transpose() * &jp)).ok_or(Error::Singular)?;
    let factor = match opts.uncertainty {
        UncertaintyMode::ResidualScaled => {
            let dof = x.len().saturating_sub(np).max(1);
            rss / dof as f64
        }
        UncertaintyMode::Absolute => 1.0,
    };
    let covariance: Vec<Vec<f64>> = (0..np)
        .map(|i| {
            (0..np)
                .map(|k| 0.5 * (cov0[(i, k)] + cov0[(k, i)]) * factor)
                .collect()
        })
        .collect();
    let std_errs = (0..np).map(|i| covariance[i][i].max(0.0).sqrt()).collect();

    Ok(FitResult {
        model: model.name().to_string(),
        param_names: model.param_names().iter().map(|s| s.to_string()).collect(),
        params: p,
        std_errs,
        covariance,
        rss,
        converged,
        n_iter,
        grad_norm,
    })
}
