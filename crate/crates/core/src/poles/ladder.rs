//! Closed-form gain thresholds at which a pole crosses the real axis.
//!
//! At `k = pi/2` the odd term of `M22` drops out and the pole condition
//! reduces to `cos(2N mu) = 0`, so `mu_n = (2n+1) pi / (4N)` and
//! `gamma_n = 2 cos(mu_n)`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::finder::{find_poles, Region};
use crate::error::{Error, Result};
use crate::model::ChainSpec;

/// Half-width of the box around `k = pi/2` searched by [`verify_ladder`].
const LADDER_SEARCH_HALF_WIDTH: f64 = 0.02;
const LADDER_GRID_DENSITY: usize = 400;
/// Distance from `pi/2` within which a real-axis root confirms a rung.
pub const LADDER_MATCH_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdLadder {
    pub n_cells: usize,
    /// Strictly descending.
    pub gamma_values: Vec<f64>,
    /// Smallest threshold, the last entry of `gamma_values`.
    pub gamma_critical: f64,
    pub mu_values: Vec<f64>,
}

pub fn threshold_ladder(n_cells: usize) -> Result<ThresholdLadder> {
    if n_cells == 0 {
        return Err(Error::InvalidParameter("n_cells must be at least 1".into()));
    }
    let n = n_cells as f64;
    let mu_values: Vec<f64> = (0..n_cells)
        .map(|i| (2 * i + 1) as f64 * PI / (4.0 * n))
        .collect();
    let gamma_values: Vec<f64> = mu_values.iter().map(|mu| 2.0 * mu.cos()).collect();
    Ok(ThresholdLadder {
        n_cells,
        gamma_values,
        gamma_critical: gamma_critical(n_cells),
        mu_values,
    })
}

/// `2 sin(pi / 4N)`, the lowest threshold.
pub fn gamma_critical(n_cells: usize) -> f64 {
    2.0 * (PI / (4.0 * n_cells as f64)).sin()
}

/// Locate each rung numerically: at every `gamma_n`, [`find_poles`] must
/// return a root within [`LADDER_MATCH_TOL`] of `k = pi/2` on the real axis.
/// Returns the distance of the closest root for each rung.
pub fn verify_ladder(ladder: &ThresholdLadder) -> Result<Vec<f64>> {
    let center = Complex64::new(FRAC_PI_2, 0.0);
    let region = Region::around(center, LADDER_SEARCH_HALF_WIDTH);
    let mut distances = Vec::with_capacity(ladder.gamma_values.len());
    for &g in &ladder.gamma_values {
        let spec = ChainSpec::new(ladder.n_cells, g)?;
        let poles = find_poles(&spec, &region, LADDER_GRID_DENSITY)?;
        let d = poles
            .iter()
            .map(|p| (p.k.as_complex() - center).norm())
            .fold(f64::INFINITY, f64::min);
        if d > LADDER_MATCH_TOL {
            return Err(Error::NonConvergence(format!(
                "no real-axis pole within {LADDER_MATCH_TOL:e} of pi/2 at gamma = {g} \
                 (closest at distance {d:e})"
            )));
        }
        distances.push(d);
    }
    Ok(distances)
}

/// Smallest number of cells for which `gamma` exceeds the lowest threshold.
///
/// For `gamma >= 2` every size qualifies and 1 is returned.
pub fn critical_size(gamma: f64) -> Result<usize> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::OutOfRange {
            value: gamma,
            reason: "gamma must be positive and finite",
        });
    }
    if gamma >= 2.0 {
        return Ok(1);
    }
    // gamma_critical(N) decreases in N, so start from the analytic estimate
    // and correct for rounding with the strict test.
    let estimate = (PI / (4.0 * (gamma / 2.0).asin())).floor().max(1.0) as usize;
    let mut n = estimate.saturating_sub(1).max(1);
    while gamma_critical(n) >= gamma {
        n += 1;
    }
    while n > 1 && gamma_critical(n - 1) < gamma {
        n -= 1;
    }
    Ok(n)
}

/// Number of first-quadrant poles: thresholds strictly below `gamma`.
pub fn tgbs_count(spec: &ChainSpec) -> usize {
    let n = spec.n_cells() as f64;
    (0..spec.n_cells())
        .filter(|&i| 2.0 * ((2 * i + 1) as f64 * PI / (4.0 * n)).cos() < spec.gamma())
        .count()
}

/// `M22` on the purely imaginary Bloch branch `mu = i phi` at real `k`.
pub fn imaginary_branch_m22(spec: &ChainSpec, phi: f64, k: f64) -> Complex64 {
    let mu = Complex64::new(0.0, phi);
    let two_n_mu = 2.0 * spec.n_cells() as f64 * mu;
    let cot_k = k.cos() / k.sin();
    two_n_mu.cos() - Complex64::new(0.0, cot_k) * mu.tan() * two_n_mu.sin()
}

/// True when the real part of `M22` on the imaginary branch is positive, so
/// no real-axis pole can come from that branch.
pub fn imaginary_branch_excluded(spec: &ChainSpec, phi: f64, k: f64) -> bool {
    imaginary_branch_m22(spec, phi, k).re > 0.0
}
