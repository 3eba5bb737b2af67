//! Analytic-vs-numerical Jacobian comparison.

use super::models::Model;

/// Worst deviation between the analytic gradient and central differences with
/// step h = eps^(1/3) * max(|p_j|, 1e-300) (|p_j| = 0 uses 1), normalised per
/// column by the analytic column's largest magnitude.
pub fn jacobian_check(model: &dyn Model, params: &[f64], xs: &[f64]) -> f64 {
    let np = model.n_params();
    let h_rel = f64::EPSILON.cbrt();
    let mut analytic = vec![vec![0.0; np]; xs.len()];
    for (row, &x) in analytic.iter_mut().zip(xs) {
        model.gradient(x, params, row);
    }
    let mut worst: f64 = 0.0;
    let mut p = params.to_vec();
    for j in 0..np {
        let scale = if params[j] != 0.0 { params[j].abs() } else { 1.0 };
        let h = h_rel * scale;
        let col_norm = analytic.iter().map(|r| r[j].abs()).fold(0.0, f64::max);
        let mut col_dev: f64 = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            p[j] = params[j] + h;
            let up = model.eval(x, &p);
            p[j] = params[j] - h;
            let down = model.eval(x, &p);
            p[j] = params[j];
            let fd = (up - down) / (2.0 * h);
            col_dev = col_dev.max((analytic[i][j] - fd).abs());
        }
        let dev = if col_norm > 0.0 { col_dev / col_norm } else { col_dev };
        worst = worst.max(dev);
    }
    worst
}
