use faer::Mat;
use num_complex::Complex64;

use super::layout::LatticeLayout;
use crate::error::{Error, Result};
use crate::model::ChainSpec;

/// Nearest-neighbour hopping matrix element, `-J`.
pub const HOPPING: f64 = -1.0;

/// Open chain with uniform hopping and a complex on-site profile.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalHamiltonian {
    diagonal: Vec<Complex64>,
}

impl TridiagonalHamiltonian {
    pub fn from_diagonal(diagonal: Vec<Complex64>) -> Self {
        Self { diagonal }
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[Complex64] {
        &self.diagonal
    }

    pub fn trace(&self) -> Complex64 {
        self.diagonal.iter().sum()
    }

    /// Infinity norm: largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let hops = (i > 0) as usize + (i + 1 < n) as usize;
                self.diagonal[i].norm() + hops as f64 * HOPPING.abs()
            })
            .fold(0.0, f64::max)
    }

    /// `out = H psi`.
    pub fn apply_into(&self, psi: &[Complex64], out: &mut [Complex64]) {
        let n = self.dim();
        for i in 0..n {
            let mut acc = self.diagonal[i] * psi[i];
            if i > 0 {
                acc += HOPPING * psi[i - 1];
            }
            if i + 1 < n {
                acc += HOPPING * psi[i + 1];
            }
            out[i] = acc;
        }
    }

    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        self.apply_into(psi, &mut out);
        out
    }

    pub fn to_dense(&self) -> Mat<Complex64> {
        let n = self.dim();
        Mat::from_fn(n, n, |i, j| {
            if i == j {
                self.diagonal[i]
            } else if i.abs_diff(j) == 1 {
                Complex64::new(HOPPING, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }
}

/// Zero on-site energy in the leads, the chain profile on the scattering
/// sites, hard walls at both ends.
pub fn build_hamiltonian(
    layout: &LatticeLayout,
    spec: &ChainSpec,
) -> Result<TridiagonalHamiltonian> {
    if layout.n_cells != spec.n_cells() {
        return Err(Error::InvalidParameter(format!(
            "layout holds {} cells but the chain has {}",
            layout.n_cells,
            spec.n_cells()
        )));
    }
    let diagonal = (0..layout.total_sites)
        .map(|g| spec.onsite(layout.relative(g)))
        .collect();
    Ok(TridiagonalHamiltonian { diagonal })
}
