use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};

pub const DEFAULT_NCUT: usize = 30;
/// Below this EJ/EC the device is flagged as outside the transmon regime.
pub const TRANSMON_REGIME_RATIO: f64 = 20.0;
/// Largest change in fq (GHz) tolerated when the charge basis is doubled.
pub const CONVERGENCE_TOL_GHZ: f64 = 1e-6;

const MIN_NCUT: usize = 5;

/// Josephson and charging energies (as frequencies, GHz) plus basis controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmonParams {
    pub ej_ghz: f64,
    pub ec_ghz: f64,
    /// Offset charge in units of Cooper pairs.
    pub ng: f64,
    /// Charge states run over -ncut..=ncut.
    pub ncut: usize,
}

impl TransmonParams {
    pub fn new(ej_ghz: f64, ec_ghz: f64) -> Result<Self> {
        let p = Self {
            ej_ghz,
            ec_ghz,
            ng: 0.0,
            ncut: DEFAULT_NCUT,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_ng(mut self, ng: f64) -> Result<Self> {
        if !ng.is_finite() {
            return Err(Error::invalid("ng", "must be finite"));
        }
        self.ng = ng;
        Ok(self)
    }

    pub fn with_ncut(mut self, ncut: usize) -> Result<Self> {
        self.ncut = ncut;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("ej_ghz", self.ej_ghz)?;
        require_positive("ec_ghz", self.ec_ghz)?;
        if self.ncut < MIN_NCUT {
            return Err(Error::invalid(
                "ncut",
                format!("must be >= {MIN_NCUT}, got {}", self.ncut),
            ));
        }
        if !self.ng.is_finite() {
            return Err(Error::invalid("ng", "must be finite"));
        }
        Ok(())
    }

    pub fn ej_over_ec(&self) -> f64 {
        self.ej_ghz / self.ec_ghz
    }

    /// Warning flag: EJ/EC below the transmon regime.
    pub fn outside_transmon_regime(&self) -> bool {
        self.ej_over_ec() < TRANSMON_REGIME_RATIO
    }

    /// Leading-order transmon estimate sqrt(8 EJ EC) - EC.
    pub fn perturbative_fq_ghz(&self) -> f64 {
        (8.0 * self.ej_ghz * self.ec_ghz).sqrt() - self.ec_ghz
    }
}

/// Lowest eigenenergies relative to the ground state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitSpectrum {
    pub levels_ghz: Vec<f64>,
    pub fq_ghz: f64,
    pub alpha_ghz: f64,
}

impl QubitSpectrum {
    fn from_levels(levels_ghz: Vec<f64>) -> Self {
        let fq_ghz = levels_ghz[1];
        let alpha_ghz = (levels_ghz[2] - levels_ghz[1]) - levels_ghz[1];
        Self {
            levels_ghz,
            fq_ghz,
            alpha_ghz,
        }
    }

    /// f12 transition.
    pub fn f12_ghz(&self) -> f64 {
        self.levels_ghz[2] - self.levels_ghz[1]
    }
}

/// H = 4 EC (n - ng)^2 - (EJ/2) sum(|n><n+1| + h.c.) in the charge basis.
fn hamiltonian(p: &TransmonParams) -> DMatrix<f64> {
    let dim = 2 * p.ncut + 1;
    let mut h = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        let n = i as f64 - p.ncut as f64;
        h[(i, i)] = 4.0 * p.ec_ghz * (n - p.ng).powi(2);
        if i + 1 < dim {
            h[(i, i + 1)] = -0.5 * p.ej_ghz;
            h[(i + 1, i)] = -0.5 * p.ej_ghz;
        }
    }
    h
}

/// Sorted eigenvalues (absolute, GHz) and matching eigenvectors as columns.
pub(crate) fn eigensystem(p: &TransmonParams) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let h = hamiltonian(p);
    let eig = h
        .try_symmetric_eigen(1e-14, 10_000)
        .ok_or_else(|| Error::Eigen("symmetric QR iteration did not converge".into()))?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_columns(
        &order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect::<Vec<DVector<f64>>>(),
    );
    Ok((values, vectors))
}

fn relative_levels(p: &TransmonParams, n_levels: usize) -> Result<Vec<f64>> {
    let (values, _) = eigensystem(p)?;
    let e0 = values[0];
    Ok(values[..n_levels].iter().map(|e| e - e0).collect())
}

fn check_level_request(p: &TransmonParams, n_levels: usize) -> Result<()> {
    if n_levels < 3 {
        return Err(Error::invalid(
            "n_levels",
            "at least 3 levels are needed for fq and the anharmonicity",
        ));
    }
    if n_levels > 2 * p.ncut - 1 {
        return Err(Error::invalid(
            "n_levels",
            format!(
                "{n_levels} levels exceed the usable basis size 2*ncut-1 = {}",
                2 * p.ncut - 1
            ),
        ));
    }
    Ok(())
}

/// Returns the `n_levels` lowest transmon levels. Convergence is checked by
/// repeating the diagonalisation with a doubled charge basis.
pub fn diagonalize_transmon(p: &TransmonParams, n_levels: usize) -> Result<QubitSpectrum> {
    p.validate()?;
    check_level_request(p, n_levels)?;
    let levels = relative_levels(p, n_levels)?;
    let doubled = TransmonParams {
        ncut: 2 * p.ncut,
        ..*p
    };
    let reference = relative_levels(&doubled, 2)?;
    let drift = (reference[1] - levels[1]).abs();
    if drift >= CONVERGENCE_TOL_GHZ {
        return Err(Error::Eigen(format!(
            "fq changed by {:.3e} GHz when doubling ncut={}; increase ncut",
            drift, p.ncut
        )));
    }
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Eigen("degenerate levels in spectrum".into()));
    }
    Ok(QubitSpectrum::from_levels(levels))
}

/// Peak-to-peak variation of fq between ng = 0 and ng = 1/2, the extremes of
/// the offset-charge dependence.
pub fn charge_dispersion(p: &TransmonParams) -> Result<f64> {
    let at = |ng: f64| -> Result<f64> {
        let q = TransmonParams { ng, ..*p };
        Ok(diagonalize_transmon(&q, 3)?.fq_ghz)
    };
    Ok((at(0.0)? - at(0.5)?).abs())
}

/// fq, alpha and their derivatives with respect to (EJ, EC).
///
/// Derivatives come from Hellmann-Feynman: dE_k/dEJ = <k|dH/dEJ|k>, likewise
/// for EC, which is exact for a nondegenerate spectrum.
fn observables_with_gradient(p: &TransmonParams) -> Result<([f64; 2], [[f64; 2]; 2])> {
    let (values, vectors) = eigensystem(p)?;
    let dim = values.len();
    let mut d_ej = [0.0; 3];
    let mut d_ec = [0.0; 3];
    for k in 0..3 {
        let v = vectors.column(k);
        let mut hop = 0.0;
        let mut charge = 0.0;
        for i in 0..dim {
            let n = i as f64 - p.ncut as f64;
            charge += 4.0 * (n - p.ng).powi(2) * v[i] * v[i];
            if i + 1 < dim {
                hop += -v[i] * v[i + 1];
            }
        }
        d_ej[k] = hop;
        d_ec[k] = charge;
    }
    let e = [values[0], values[1], values[2]];
    let fq = e[1] - e[0];
    let alpha = e[2] - 2.0 * e[1] + e[0];
    let grad = [
        [d_ej[1] - d_ej[0], d_ec[1] - d_ec[0]],
        [
            d_ej[2] - 2.0 * d_ej[1] + d_ej[0],
            d_ec[2] - 2.0 * d_ec[1] + d_ec[0],
        ],
    ];
    Ok(([fq, alpha], grad))
}

/// Inverts the spectrum: finds (EJ, EC) reproducing the given fq and alpha.
///
/// Newton iteration on the 2x2 system, starting from the perturbative
/// transmon estimates EC ~ -alpha, EJ ~ (fq + EC)^2 / (8 EC).
pub fn fit_ej_ec(fq_ghz: f64, alpha_ghz: f64) -> Result<TransmonParams> {
    require_positive("fq_ghz", fq_ghz)?;
    if !(alpha_ghz.is_finite() && alpha_ghz < 0.0) {
        return Err(Error::invalid("alpha_ghz", "must be negative"));
    }
    if alpha_ghz.abs() >= fq_ghz {
        return Err(Error::invalid("alpha_ghz", "|alpha| must be below fq"));
    }

    const MAX_ITER: usize = 60;
    const TOL_GHZ: f64 = 1e-11;

    let mut ec = -alpha_ghz;
    let mut ej = (fq_ghz + ec).powi(2) / (8.0 * ec);
    for _ in 0..MAX_ITER {
        let p = TransmonParams {
            ej_ghz: ej,
            ec_ghz: ec,
            ng: 0.0,
            ncut: DEFAULT_NCUT,
        };
        let ([fq, alpha], j) = observables_with_gradient(&p)?;
        let r = [fq - fq_ghz, alpha - alpha_ghz];
        if r[0].abs() < TOL_GHZ && r[1].abs() < TOL_GHZ {
            if p.outside_transmon_regime() {
                return Err(Error::NoSolution(format!(
                    "solution EJ/EC = {:.2} lies outside the transmon regime",
                    p.ej_over_ec()
                )));
            }
            let check = diagonalize_transmon(&p, 3)?;
            debug_assert!((check.fq_ghz - fq_ghz).abs() < 1e-4);
            return Ok(p);
        }
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-300 || !det.is_finite() {
            return Err(Error::NoSolution("singular spectrum Jacobian".into()));
        }
        let d_ej = -(j[1][1] * r[0] - j[0][1] * r[1]) / det;
        let d_ec = -(-j[1][0] * r[0] + j[0][0] * r[1]) / det;
        // Keep both energies positive by limiting each step to halving.
        let mut t = 1.0_f64;
        while ej + t * d_ej <= 0.5 * ej || ec + t * d_ec <= 0.5 * ec {
            t *= 0.5;
        }
        ej += t * d_ej;
        ec += t * d_ec;
        if ej / ec < 1.0 {
            return Err(Error::NoSolution(format!(
                "iteration left the transmon regime (EJ/EC = {:.3})",
                ej / ec
            )));
        }
    }
    Err(Error::RootNotConverged(MAX_ITER))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from an independent dense eigensolver (numpy eigvalsh)
    // on the same charge-basis Hamiltonian, ncut = 30.
    const A3_FQ: f64 = 4.058_116_754_521_635;
    const A3_ALPHA: f64 = -0.223_362_294_355_152_5;
    const A3_DISPERSION_HZ: f64 = 1850.45;

    fn a3() -> TransmonParams {
        TransmonParams::new(11.545, 0.197).unwrap()
    }

    #[test]
    fn a3_matches_independent_solver() {
        let s = diagonalize_transmon(&a3(), 4).unwrap();
        assert!((s.fq_ghz - A3_FQ).abs() < 1e-9);
        assert!((s.alpha_ghz - A3_ALPHA).abs() < 1e-9);
        assert_eq!(s.levels_ghz.len(), 4);
        assert_eq!(s.levels_ghz[0], 0.0);
    }

    #[test]
    fn measured_fq_and_alpha() {
        let s = diagonalize_transmon(&a3(), 3).unwrap();
        assert!((s.fq_ghz - 4.057).abs() / 4.057 < 3e-3);
        assert!((s.alpha_ghz.abs() - 0.223).abs() / 0.223 < 0.05);
        let a1 = TransmonParams::new(20.020, 0.172).unwrap();
        let s = diagonalize_transmon(&a1, 3).unwrap();
        assert!((s.fq_ghz - 5.063).abs() / 5.063 < 3e-3);
    }

    #[test]
    fn charge_dispersion_at_ej_ec_59() {
        // fq moves by ~1.85 kHz between ng = 0 and 1/2 at EJ/EC = 58.6: well
        // below a part per million of fq, though above 1 kHz.
        let d = charge_dispersion(&a3()).unwrap();
        assert!((d * 1e9 - A3_DISPERSION_HZ).abs() < 1.0, "{}", d * 1e9);
        assert!(d / A3_FQ < 1e-6);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(TransmonParams::new(0.0, 0.2).is_err());
        assert!(TransmonParams::new(10.0, -0.2).is_err());
        assert!(a3().with_ncut(4).is_err());
        assert!(diagonalize_transmon(&a3(), 60).is_err());
        assert!(diagonalize_transmon(&a3(), 59).is_ok());
        assert!(diagonalize_transmon(&a3(), 2).is_err());
    }

    #[test]
    fn regime_flag() {
        assert!(!a3().outside_transmon_regime());
        assert!(TransmonParams::new(2.0, 0.2).unwrap().outside_transmon_regime());
    }

    #[test]
    fn unconverged_basis_is_reported() {
        // EJ/EC = 5000 needs far more than 5 charge states on each side.
        let p = TransmonParams::new(500.0, 0.1).unwrap().with_ncut(5).unwrap();
        assert!(matches!(diagonalize_transmon(&p, 3), Err(Error::Eigen(_))));
    }

    #[test]
    fn inverse_recovers_a3() {
        let p = fit_ej_ec(4.057, -0.223).unwrap();
        assert!((p.ej_ghz - 11.545).abs() / 11.545 < 0.05);
        assert!((p.ec_ghz - 0.197).abs() / 0.197 < 0.05);
        let s = diagonalize_transmon(&p, 3).unwrap();
        assert!((s.fq_ghz - 4.057).abs() < 1e-4);
        assert!((s.alpha_ghz + 0.223).abs() < 1e-4);
    }

    #[test]
    fn inverse_rejects_bad_inputs() {
        assert!(fit_ej_ec(4.0, 0.1).is_err());
        assert!(fit_ej_ec(-4.0, -0.1).is_err());
        assert!(fit_ej_ec(0.2, -0.3).is_err());
        // Strong anharmonicity relative to fq has no transmon-regime solution.
        assert!(fit_ej_ec(1.0, -0.9).is_err());
    }

    #[test]
    fn hellmann_feynman_matches_finite_difference() {
        let p = a3();
        let (_, grad) = observables_with_gradient(&p).unwrap();
        let h = 1e-5;
        let eval = |ej: f64, ec: f64| {
            let q = TransmonParams { ej_ghz: ej, ec_ghz: ec, ..p };
            observables_with_gradient(&q).unwrap().0
        };
        let plus = eval(p.ej_ghz + h, p.ec_ghz);
        let minus = eval(p.ej_ghz - h, p.ec_ghz);
        for k in 0..2 {
            let fd = (plus[k] - minus[k]) / (2.0 * h);
            assert!((fd - grad[k][0]).abs() < 1e-6, "{fd} vs {}", grad[k][0]);
        }
        let plus = eval(p.ej_ghz, p.ec_ghz + h);
        let minus = eval(p.ej_ghz, p.ec_ghz - h);
        for k in 0..2 {
            let fd = (plus[k] - minus[k]) / (2.0 * h);
            assert!((fd - grad[k][1]).abs() < 1e-5, "{fd} vs {}", grad[k][1]);
        }
    }
}
