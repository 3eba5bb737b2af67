//! Closed-form linear estimators against the general nonlinear solver.

use nitrq_core::dynamics::linspace;
use nitrq_core::fit::{nlls_fit, FitProblem, ModelKind};
use nitrq_core::junction::{jc_cycles_fit, ra_product_fit, resistance_for_ra};
use nitrq_core::noise::gaussian;
use proptest::prelude::*;

fn ra_data(ra: f64, noise: f64, seed: u64) -> Vec<(f64, f64)> {
    let d = [0.8, 1.0, 1.2, 1.5, 2.0, 2.5, 3.0];
    d.iter()
        .zip(gaussian(seed, d.len(), noise))
        .map(|(&d, e)| (d, resistance_for_ra(ra, d) * (1.0 + e)))
        .collect()
}

fn solver_ra(points: &[(f64, f64)], start: f64) -> (f64, f64) {
    let x = points.iter().map(|p| p.0).collect();
    let y = points.iter().map(|p| p.1).collect();
    let r = nlls_fit(&FitProblem::new(ModelKind::InverseArea, x, y, vec![start])).unwrap();
    assert!(r.converged);
    (r.params[0], r.std_errs[0])
}

#[test]
fn ra_routes_agree_noiseless() {
    let pts = ra_data(20.8, 0.0, 0);
    let closed = ra_product_fit(&pts).unwrap();
    let (lm, _) = solver_ra(&pts, 5.0);
    assert!((closed.ra_kohm_um2 - 20.8).abs() / 20.8 < 1e-10);
    assert!((lm - 20.8).abs() / 20.8 < 1e-10);
}

#[test]
fn jc_routes_agree() {
    let pts: Vec<(f64, f64)> = linspace(15.0, 35.0, 9)
        .into_iter()
        .zip(gaussian(4, 9, 0.05))
        .map(|(c, e)| (c, 10f64.powf(6.0 - 0.34 * c + e)))
        .collect();
    let closed = jc_cycles_fit(&pts).unwrap();
    let x = pts.iter().map(|p| p.0).collect();
    let y = pts.iter().map(|p| p.1.log10()).collect();
    let r = nlls_fit(&FitProblem::new(ModelKind::LogLinear, x, y, vec![0.0, 0.0])).unwrap();
    assert!((r.params[1] - closed.slope_per_cycle).abs() < 1e-9);
    assert!((r.params[0] - closed.log10_prefactor).abs() < 1e-8);
    assert!((r.std_errs[1] - closed.slope_std_err).abs() / closed.slope_std_err < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn ra_routes_agree_with_noise(ra in 1.0f64..100.0, seed in 0u64..1000, start in 0.2f64..5.0) {
        let pts = ra_data(ra, 0.03, seed);
        let closed = ra_product_fit(&pts).unwrap();
        let (lm, se) = solver_ra(&pts, start * ra);
        prop_assert!((lm - closed.ra_kohm_um2).abs() / closed.ra_kohm_um2 < 1e-8);
        prop_assert!((se - closed.std_err).abs() / closed.std_err < 1e-5);
    }
}
