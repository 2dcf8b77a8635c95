//! Spectral propagator `exp(-iHt)` from a dense eigendecomposition.
//!
//! The chain Hamiltonian is complex symmetric, so the left eigenvector paired
//! with a right eigenvector `r` is `r` itself, scaled to unit bilinear overlap
//! `r^T r`. One Newton-Schulz step `L <- (2I - LR) L` then polishes the left
//! modes against rounding in the eigensolver.

use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;

use super::hamiltonian::TridiagonalHamiltonian;
use super::integrator::{evolve_direct, DEFAULT_LOCAL_TOL};
use super::packet::WaveState;
use crate::error::{Error, Result};

/// Required `max |H r - E r| / |r|`, relative to `|H|`.
pub const SPECTRAL_RESIDUAL_TOL: f64 = 1e-8;
/// Required `max |LR - I|`.
pub const BIORTHOGONALITY_TOL: f64 = 1e-8;
/// Above this eigenvalue condition number the bundle is near-defective and
/// evolution uses the direct integrator.
pub const NEAR_DEFECTIVE_CONDITION: f64 = 1e8;

#[derive(Debug, Clone)]
pub struct PropagatorBundle {
    pub eigenvalues: Vec<Complex64>,
    right_modes: Mat<Complex64>,
    /// Row `n` is the left mode paired with column `n` of `right_modes`.
    left_modes: Mat<Complex64>,
    /// Largest `|l_n| |r_n|` over the normalized pairs.
    pub condition_estimate: f64,
    pub biorthogonality_error: f64,
    pub spectral_residual: f64,
    pub near_defective: bool,
    hamiltonian: TridiagonalHamiltonian,
}

impl PropagatorBundle {
    pub fn right_modes(&self) -> &Mat<Complex64> {
        &self.right_modes
    }

    pub fn left_modes(&self) -> &Mat<Complex64> {
        &self.left_modes
    }

    pub fn hamiltonian(&self) -> &TridiagonalHamiltonian {
        &self.hamiltonian
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvalue with the largest imaginary part.
    pub fn dominant_eigenvalue(&self) -> Complex64 {
        self.eigenvalues
            .iter()
            .copied()
            .max_by(|a, b| a.im.total_cmp(&b.im))
            .unwrap_or_default()
    }

    /// True when evolution goes through the direct integrator.
    pub fn uses_fallback(&self) -> bool {
        self.near_defective || self.biorthogonality_error > BIORTHOGONALITY_TOL
    }

    /// Expansion coefficients of `psi` in the right modes.
    pub fn coefficients(&self, psi: &[Complex64]) -> Vec<Complex64> {
        mat_vec(&self.left_modes, psi)
    }
}

fn mat_vec(a: &Mat<Complex64>, x: &[Complex64]) -> Vec<Complex64> {
    let xm = Mat::from_fn(x.len(), 1, |i, _| x[i]);
    let y = a * &xm;
    (0..a.nrows()).map(|i| y[(i, 0)]).collect()
}

fn max_identity_defect(p: &Mat<Complex64>) -> f64 {
    let n = p.nrows();
    (0..n)
        .into_par_iter()
        .map(|j| {
            (0..n)
                .map(|i| {
                    let target = if i == j { 1.0 } else { 0.0 };
                    (p[(i, j)] - target).norm()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

pub fn prepare_propagator(h: &TridiagonalHamiltonian) -> Result<PropagatorBundle> {
    let n = h.dim();
    if n == 0 {
        return Err(Error::InvalidParameter("empty Hamiltonian".into()));
    }
    let dense = h.to_dense();
    let eig = dense
        .eigen()
        .map_err(|e| Error::DecompositionFailed(format!("{e:?}")))?;
    let eigenvalues: Vec<Complex64> = (0..n).map(|i| eig.S()[i]).collect();
    let right_modes = eig.U().to_owned();
    if eigenvalues.iter().any(|e| !e.is_finite()) {
        return Err(Error::DecompositionFailed("non-finite eigenvalue".into()));
    }

    let h_norm = h.norm_inf();
    let spectral_residual = (0..n)
        .into_par_iter()
        .map(|c| {
            let r: Vec<Complex64> = (0..n).map(|i| right_modes[(i, c)]).collect();
            let hr = h.apply(&r);
            let norm = r.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            let defect = hr
                .iter()
                .zip(&r)
                .map(|(a, b)| (a - eigenvalues[c] * b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            defect / norm
        })
        .reduce(|| 0.0, f64::max);
    if !(spectral_residual <= SPECTRAL_RESIDUAL_TOL * h_norm) {
        return Err(Error::DecompositionFailed(format!(
            "eigenpair residual {spectral_residual:.3e} exceeds {SPECTRAL_RESIDUAL_TOL:e} |H|"
        )));
    }

    let overlaps: Vec<Complex64> = (0..n)
        .map(|c| {
            (0..n)
                .map(|i| right_modes[(i, c)] * right_modes[(i, c)])
                .sum()
        })
        .collect();
    let degenerate = overlaps.iter().any(|o| o.norm() < f64::MIN_POSITIVE.sqrt());
    let mut left_modes = Mat::from_fn(n, n, |r, i| right_modes[(i, r)] / overlaps[r]);
    let mut product = &left_modes * &right_modes;
    let mut biorthogonality_error = max_identity_defect(&product);
    if biorthogonality_error.is_finite() && biorthogonality_error > 0.1 * BIORTHOGONALITY_TOL {
        let correction = Mat::from_fn(n, n, |i, j| {
            let two = if i == j { 2.0 } else { 0.0 };
            Complex64::new(two, 0.0) - product[(i, j)]
        });
        left_modes = &correction * &left_modes;
        product = &left_modes * &right_modes;
        biorthogonality_error = max_identity_defect(&product);
    }

    let condition_estimate = (0..n)
        .map(|m| {
            let l: f64 = (0..n)
                .map(|i| left_modes[(m, i)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            let r: f64 = (0..n)
                .map(|i| right_modes[(i, m)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            l * r
        })
        .fold(0.0, f64::max);
    let near_defective = degenerate || !(condition_estimate <= NEAR_DEFECTIVE_CONDITION);
    if near_defective {
        log::warn!("near-defective spectrum (condition {condition_estimate:.3e}); using direct integration");
    } else if biorthogonality_error > BIORTHOGONALITY_TOL {
        log::warn!(
            "mode biorthogonality defect {biorthogonality_error:.3e}; using direct integration"
        );
    }

    Ok(PropagatorBundle {
        eigenvalues,
        right_modes,
        left_modes,
        condition_estimate,
        biorthogonality_error,
        spectral_residual,
        near_defective,
        hamiltonian: h.clone(),
    })
}

fn resum(bundle: &PropagatorBundle, coeffs: &[Complex64], dt: f64) -> Vec<Complex64> {
    let phased: Vec<Complex64> = coeffs
        .iter()
        .zip(&bundle.eigenvalues)
        .map(|(c, e)| c * (Complex64::new(0.0, -dt) * e).exp())
        .collect();
    mat_vec(&bundle.right_modes, &phased)
}

/// `exp(-iH (t - t0)) psi0`, where `t0` is the time stamp of `psi0`.
pub fn evolve(bundle: &PropagatorBundle, psi0: &WaveState, t: f64) -> WaveState {
    if t == psi0.time {
        return psi0.clone();
    }
    if bundle.uses_fallback() {
        return evolve_direct(&bundle.hamiltonian, psi0, t, DEFAULT_LOCAL_TOL);
    }
    let coeffs = bundle.coefficients(&psi0.amplitudes);
    WaveState {
        amplitudes: resum(bundle, &coeffs, t - psi0.time),
        time: t,
    }
}

/// [`evolve`] to several times, expanding `psi0` once.
pub fn evolve_many(bundle: &PropagatorBundle, psi0: &WaveState, times: &[f64]) -> Vec<WaveState> {
    if bundle.uses_fallback() {
        return times.par_iter().map(|&t| evolve(bundle, psi0, t)).collect();
    }
    let coeffs = bundle.coefficients(&psi0.amplitudes);
    times
        .par_iter()
        .map(|&t| {
            if t == psi0.time {
                psi0.clone()
            } else {
                WaveState {
                    amplitudes: resum(bundle, &coeffs, t - psi0.time),
                    time: t,
                }
            }
        })
        .collect()
}
