//! Transmon coupled to a single cavity mode.
//!
//! The transmon is truncated to its lowest `n_transmon_levels` eigenstates
//! and the cavity to `n_photon_cut` Fock states. Coupling is an exchange
//! (excitation-conserving) interaction through the transmon charge operator,
//! normalised so that the 0-1 matrix element equals g:
//!
//! ```text
//! H = sum_i E_i |i><i| + fc a^dag a
//!     + g sum_i (|n_{i,i+1}| / |n_{01}|) (|i+1><i| a + |i><i+1| a^dag)
//! ```

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::spectrum::{eigensystem, TransmonParams};
use crate::error::{require_positive, Error, Result};

pub const DEFAULT_TRANSMON_LEVELS: usize = 5;
pub const DEFAULT_PHOTON_CUT: usize = 6;

/// Dispersive-regime requirement: |fq - fc| > DISPERSIVE_RATIO * g.
const DISPERSIVE_RATIO: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoupledSystemParams {
    pub transmon: TransmonParams,
    pub g_mhz: f64,
    pub fc_bare_ghz: f64,
    pub n_photon_cut: usize,
    pub n_transmon_levels: usize,
}

impl CoupledSystemParams {
    /// Default truncation: 5 transmon levels and 6 Fock states.
    ///
    /// `g_mhz = 0` is accepted as the uncoupled limit.
    pub fn new(transmon: TransmonParams, g_mhz: f64, fc_bare_ghz: f64) -> Result<Self> {
        let cp = Self {
            transmon,
            g_mhz,
            fc_bare_ghz,
            n_photon_cut: DEFAULT_PHOTON_CUT,
            n_transmon_levels: DEFAULT_TRANSMON_LEVELS,
        };
        cp.validate(3)?;
        Ok(cp)
    }

    pub fn with_truncation(mut self, n_transmon_levels: usize, n_photon_cut: usize) -> Result<Self> {
        self.n_transmon_levels = n_transmon_levels;
        self.n_photon_cut = n_photon_cut;
        self.validate(3)?;
        Ok(self)
    }

    fn validate(&self, min_truncation: usize) -> Result<()> {
        self.transmon.validate()?;
        if !(self.g_mhz.is_finite() && self.g_mhz >= 0.0) {
            return Err(Error::invalid("g_mhz", "must be finite and >= 0"));
        }
        require_positive("fc_bare_ghz", self.fc_bare_ghz)?;
        if self.n_photon_cut < min_truncation || self.n_transmon_levels < min_truncation {
            return Err(Error::invalid(
                "truncation",
                format!(
                    "need at least {min_truncation} transmon levels and Fock states, got {} x {}",
                    self.n_transmon_levels, self.n_photon_cut
                ),
            ));
        }
        if self.n_transmon_levels > 2 * self.transmon.ncut + 1 {
            return Err(Error::invalid("n_transmon_levels", "exceeds charge basis size"));
        }
        Ok(())
    }
}

struct Dressed {
    energies: Vec<f64>,
    vectors: DMatrix<f64>,
    n_photon: usize,
    bare_fq: f64,
}

impl Dressed {
    fn index(&self, level: usize, photons: usize) -> usize {
        level * self.n_photon + photons
    }

    /// Eigenstate with the largest overlap on the bare product state.
    fn dressed_energy(&self, level: usize, photons: usize) -> f64 {
        let row = self.index(level, photons);
        let best = (0..self.energies.len())
            .max_by(|&a, &b| {
                self.vectors[(row, a)]
                    .abs()
                    .total_cmp(&self.vectors[(row, b)].abs())
            })
            .expect("non-empty basis");
        self.energies[best]
    }
}

/// Bare transmon levels and neighbouring charge matrix elements n_{i,i+1}.
struct TransmonBasis {
    levels: Vec<f64>,
    neighbour_charge: Vec<f64>,
}

impl TransmonBasis {
    fn new(transmon: &TransmonParams, n_levels: usize) -> Result<Self> {
        let (values, vectors) = eigensystem(transmon)?;
        let ncut = transmon.ncut as f64;
        let charge_element = |a: usize, b: usize| -> f64 {
            (0..values.len())
                .map(|k| vectors[(k, a)] * (k as f64 - ncut) * vectors[(k, b)])
                .sum::<f64>()
                .abs()
        };
        Ok(Self {
            levels: values[..n_levels].iter().map(|e| e - values[0]).collect(),
            neighbour_charge: (0..n_levels - 1).map(|i| charge_element(i, i + 1)).collect(),
        })
    }
}

fn diagonalize_coupled(cp: &CoupledSystemParams) -> Result<Dressed> {
    let basis = TransmonBasis::new(&cp.transmon, cp.n_transmon_levels)?;
    diagonalize_with_basis(cp, &basis)
}

fn diagonalize_with_basis(cp: &CoupledSystemParams, basis: &TransmonBasis) -> Result<Dressed> {
    let nt = cp.n_transmon_levels;
    let nf = cp.n_photon_cut;
    let levels = &basis.levels;
    let n01 = basis.neighbour_charge[0];
    if n01 == 0.0 {
        return Err(Error::Eigen("vanishing 0-1 charge matrix element".into()));
    }
    let g = cp.g_mhz * 1e-3;

    let dim = nt * nf;
    let mut h = DMatrix::zeros(dim, dim);
    for i in 0..nt {
        for n in 0..nf {
            let row = i * nf + n;
            h[(row, row)] = levels[i] + n as f64 * cp.fc_bare_ghz;
        }
    }
    for i in 0..nt.saturating_sub(1) {
        let coupling = g * basis.neighbour_charge[i] / n01;
        for n in 0..nf - 1 {
            // |i, n+1> <-> |i+1, n>
            let a = i * nf + n + 1;
            let b = (i + 1) * nf + n;
            let amp = coupling * ((n + 1) as f64).sqrt();
            h[(a, b)] = amp;
            h[(b, a)] = amp;
        }
    }
    let eig = h
        .try_symmetric_eigen(1e-14, 10_000)
        .ok_or_else(|| Error::Eigen("coupled Hamiltonian did not converge".into()))?;
    let e_min = eig.eigenvalues.min();
    Ok(Dressed {
        energies: eig.eigenvalues.iter().map(|e| e - e_min).collect(),
        vectors: eig.eigenvectors,
        n_photon: nf,
        bare_fq: levels[1],
    })
}

/// Cavity pull with the qubit in its ground state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersiveShift {
    /// |dressed - bare| cavity frequency from the coupled Hamiltonian.
    pub coupled_mhz: f64,
    /// Leading-order estimate g^2 / |fq - fc|.
    pub leading_order_mhz: f64,
    /// fq - fc_bare.
    pub detuning_mhz: f64,
}

pub fn dispersive_shift(cp: &CoupledSystemParams) -> Result<DispersiveShift> {
    cp.validate(3)?;
    let dressed = diagonalize_coupled(cp)?;
    let detuning_mhz = (dressed.bare_fq - cp.fc_bare_ghz) * 1e3;
    let limit_mhz = DISPERSIVE_RATIO * cp.g_mhz;
    if detuning_mhz.abs() <= limit_mhz {
        return Err(Error::NotDispersive {
            detuning_mhz,
            limit_mhz,
        });
    }
    let cavity = dressed.dressed_energy(0, 1) - dressed.dressed_energy(0, 0);
    Ok(DispersiveShift {
        coupled_mhz: (cavity - cp.fc_bare_ghz).abs() * 1e3,
        leading_order_mhz: cp.g_mhz.powi(2) / detuning_mhz.abs(),
        detuning_mhz,
    })
}

/// Separation of the two dressed single-excitation modes (|1,0> and |0,1>
/// hybrids) at the configured bare cavity frequency.
pub fn mode_splitting(cp: &CoupledSystemParams) -> Result<f64> {
    // Two transmon levels and two Fock states are the least that can host
    // the avoided crossing.
    cp.validate(2)?;
    let basis = TransmonBasis::new(&cp.transmon, cp.n_transmon_levels)?;
    splitting_with_basis(cp, &basis)
}

fn splitting_with_basis(cp: &CoupledSystemParams, basis: &TransmonBasis) -> Result<f64> {
    let dressed = diagonalize_with_basis(cp, basis)?;
    let a = dressed.index(1, 0);
    let b = dressed.index(0, 1);
    let weight = |k: usize| dressed.vectors[(a, k)].powi(2) + dressed.vectors[(b, k)].powi(2);
    let mut ranked: Vec<usize> = (0..dressed.energies.len()).collect();
    ranked.sort_by(|&x, &y| weight(y).total_cmp(&weight(x)));
    Ok((dressed.energies[ranked[0]] - dressed.energies[ranked[1]]).abs() * 1e3)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingPoint {
    pub fc_bare_ghz: f64,
    pub splitting_mhz: f64,
}

/// Mode splitting as the bare cavity is swept through `fc_values_ghz`.
pub fn avoided_crossing_scan(cp: &CoupledSystemParams, fc_values_ghz: &[f64]) -> Result<Vec<CrossingPoint>> {
    cp.validate(2)?;
    let basis = TransmonBasis::new(&cp.transmon, cp.n_transmon_levels)?;
    fc_values_ghz
        .iter()
        .map(|&fc| {
            require_positive("fc_bare_ghz", fc)?;
            let at = CoupledSystemParams { fc_bare_ghz: fc, ..*cp };
            Ok(CrossingPoint {
                fc_bare_ghz: fc,
                splitting_mhz: splitting_with_basis(&at, &basis)?,
            })
        })
        .collect()
}

/// Tunes the bare cavity to the point of minimal splitting (golden-section
/// search within +-10 g of the bare qubit frequency).
pub fn min_mode_splitting(cp: &CoupledSystemParams) -> Result<CrossingPoint> {
    cp.validate(2)?;
    let basis = TransmonBasis::new(&cp.transmon, cp.n_transmon_levels)?;
    let fq = basis.levels[1];
    let half_width = (10.0 * cp.g_mhz * 1e-3).max(1e-3);
    let splitting_at = |fc: f64| -> Result<f64> {
        splitting_with_basis(&CoupledSystemParams { fc_bare_ghz: fc, ..*cp }, &basis)
    };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (fq - half_width, fq + half_width);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = splitting_at(x1)?;
    let mut f2 = splitting_at(x2)?;
    while hi - lo > 1e-10 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = splitting_at(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = splitting_at(x2)?;
        }
    }
    let fc = 0.5 * (lo + hi);
    Ok(CrossingPoint {
        fc_bare_ghz: fc,
        splitting_mhz: splitting_at(fc)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn system(ej: f64, ec: f64, g: f64, fc: f64) -> CoupledSystemParams {
        CoupledSystemParams::new(TransmonParams::new(ej, ec).unwrap(), g, fc).unwrap()
    }

    #[test]
    fn leading_order_shifts() {
        let a2 = dispersive_shift(&system(11.790, 0.196, 67.5, 6.9657)).unwrap();
        assert!((a2.leading_order_mhz - 1.58).abs() < 0.01, "{a2:?}");
        let b2 = dispersive_shift(&system(11.189, 0.188, 55.0, 6.2171)).unwrap();
        assert!((b2.leading_order_mhz - 1.31).abs() < 0.01, "{b2:?}");
    }

    #[test]
    fn coupled_shift_matches_two_level_closed_form() {
        // With exchange coupling the |0,1> state only mixes with |1,0>, so the
        // pull is exactly (sqrt(D^2 + 4 g^2) - |D|) / 2.
        let s = dispersive_shift(&system(11.545, 0.197, 68.5, 7.0874)).unwrap();
        let d = s.detuning_mhz.abs();
        let exact = ((d * d + 4.0 * 68.5 * 68.5).sqrt() - d) / 2.0;
        assert!((s.coupled_mhz - exact).abs() < 1e-6, "{} vs {exact}", s.coupled_mhz);
    }

    #[test]
    fn uncoupled_limit() {
        let s = dispersive_shift(&system(11.545, 0.197, 0.0, 7.0874)).unwrap();
        assert!(s.coupled_mhz.abs() < 1e-9);
        assert_eq!(s.leading_order_mhz, 0.0);
    }

    #[test]
    fn refuses_near_resonance() {
        let cp = system(11.545, 0.197, 68.5, 4.2);
        assert!(matches!(
            dispersive_shift(&cp),
            Err(Error::NotDispersive { .. })
        ));
    }

    #[test]
    fn splitting_is_two_g_at_degeneracy() {
        let mut cp = system(11.545, 0.197, 68.5, 7.0);
        cp.n_transmon_levels = 2;
        cp.n_photon_cut = 2;
        let min = min_mode_splitting(&cp).unwrap();
        assert!((min.splitting_mhz - 137.0).abs() / 137.0 < 0.01, "{min:?}");
        let full = min_mode_splitting(&system(11.545, 0.197, 68.5, 7.0)).unwrap();
        assert!((full.splitting_mhz - 137.0).abs() / 137.0 < 0.01);
    }

    #[test]
    fn uncoupled_modes_cross() {
        let cp = system(11.545, 0.197, 0.0, 7.0);
        let min = min_mode_splitting(&cp).unwrap();
        assert!(min.splitting_mhz < 1e-5, "{min:?}");
    }

    #[test]
    fn scan_minimum_sits_at_degeneracy() {
        let cp = system(11.545, 0.197, 68.5, 7.0);
        let fq = super::super::diagonalize_transmon(&cp.transmon, 3).unwrap().fq_ghz;
        // Grid oracle: 401 points over +-0.5 GHz, symmetric about fq.
        let grid: Vec<f64> = (0..=400).map(|k| fq - 0.5 + k as f64 * 0.0025).collect();
        let scan = avoided_crossing_scan(&cp, &grid).unwrap();
        let best = scan
            .iter()
            .min_by(|a, b| a.splitting_mhz.total_cmp(&b.splitting_mhz))
            .unwrap();
        assert!((best.fc_bare_ghz - fq).abs() < 1.5e-3, "{best:?} fq={fq}");
        let golden = min_mode_splitting(&cp).unwrap();
        assert!((golden.fc_bare_ghz - fq).abs() < 1e-6);
    }

    #[test]
    fn truncation_too_small() {
        let mut cp = system(11.545, 0.197, 68.5, 7.0);
        cp.n_photon_cut = 1;
        assert!(mode_splitting(&cp).is_err());
        assert!(system(11.545, 0.197, 68.5, 7.0).with_truncation(2, 6).is_err());
    }
}
