use serde::{Deserialize, Serialize};

use super::layout::LatticeLayout;
use super::packet::WaveState;
use crate::error::{Error, Result};
use crate::model::group_velocity;

/// Dynamic range required by [`growth_rate_fit`], in decades of intensity.
pub const MIN_GROWTH_DECADES: f64 = 2.0;

/// Intensity left of, on, and right of the scattering region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntensitySplit {
    pub reflected: f64,
    pub central: f64,
    pub transmitted: f64,
}

impl IntensitySplit {
    pub fn total(&self) -> f64 {
        self.reflected + self.central + self.transmitted
    }
}

pub fn intensity_split(state: &WaveState, layout: &LatticeLayout) -> IntensitySplit {
    let sum = |r: std::ops::Range<usize>| state.amplitudes[r].iter().map(|a| a.norm_sqr()).sum();
    IntensitySplit {
        reflected: sum(0..layout.scatter_start),
        central: sum(layout.scatter_start..layout.scatter_end()),
        transmitted: sum(layout.scatter_end()..layout.total_sites),
    }
}

/// Intensity on all sites right of the scattering region.
pub fn transmitted_intensity(state: &WaveState, layout: &LatticeLayout) -> f64 {
    intensity_split(state, layout).transmitted
}

/// `|psi_j|^2` at relative site `j`, zero off the lattice.
pub fn site_intensity(state: &WaveState, layout: &LatticeLayout, j: i64) -> f64 {
    layout
        .global(j)
        .map(|g| state.amplitudes[g].norm_sqr())
        .unwrap_or(0.0)
}

/// Least-squares slope of `ln I(t)`, halved to give an amplitude rate.
fn half_log_slope(series: &[(f64, f64)]) -> Result<(f64, f64)> {
    if series.len() < 2 {
        return Err(Error::InvalidParameter(
            "need at least two samples to fit a rate".into(),
        ));
    }
    if series
        .iter()
        .any(|&(t, i)| !(i > 0.0) || !t.is_finite() || !i.is_finite())
    {
        return Err(Error::InvalidParameter(
            "intensities must be positive and finite".into(),
        ));
    }
    let n = series.len() as f64;
    let (mt, my) = series
        .iter()
        .fold((0.0, 0.0), |(a, b), &(t, i)| (a + t / n, b + i.ln() / n));
    let (sxy, sxx) = series.iter().fold((0.0, 0.0), |(a, b), &(t, i)| {
        (a + (t - mt) * (i.ln() - my), b + (t - mt) * (t - mt))
    });
    if sxx == 0.0 {
        return Err(Error::InvalidParameter(
            "samples share a single time".into(),
        ));
    }
    let lo = series.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let hi = series.iter().map(|s| s.1).fold(0.0, f64::max);
    Ok((sxy / sxx / 2.0, (hi / lo).log10()))
}

/// Amplitude growth rate from a series of `(t, total intensity)`.
///
/// Fails with [`Error::InsufficientGrowth`] unless the intensity spans at
/// least [`MIN_GROWTH_DECADES`].
pub fn growth_rate_fit(series: &[(f64, f64)]) -> Result<f64> {
    let (rate, decades) = half_log_slope(series)?;
    if decades < MIN_GROWTH_DECADES {
        return Err(Error::InsufficientGrowth { decades });
    }
    Ok(rate)
}

/// The same fit without the dynamic-range requirement, for series expected
/// to be flat.
pub fn log_slope_rate(series: &[(f64, f64)]) -> Result<f64> {
    half_log_slope(series).map(|(rate, _)| rate)
}

/// Time until the first reflection off a hard wall can reach the scattering
/// region or a quoted lead site: the packet has to reach the scatterer and
/// the fastest outgoing front has to cross the shorter lead.
pub fn validity_horizon(layout: &LatticeLayout, j0: i64, k0: f64) -> f64 {
    let v = group_velocity(k0).abs().max(1e-12);
    let shorter = layout.lead_left_len.min(layout.lead_right_len) as f64;
    (j0.unsigned_abs() as f64 + shorter) / v
}
