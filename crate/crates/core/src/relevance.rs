//! Which stationary predictions survive the growing-state criterion, and
//! the special energies where the chain is reflectionless or lases.
//!
//! Physicality flags never suppress a computation; every point is evaluated
//! and carries its flag.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    bloch_index, classify_bloch_regime, wavenumber_for_energy, BlochRegime, ChainSpec,
    ComplexWavenumber,
};
use crate::poles::{gamma_critical, tgbs_count, threshold_ladder};
use crate::scattering::transmission_closed_form;

/// Relative tolerance on `|gamma - gamma_c|` for the critical regime.
pub const CRITICAL_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// Below threshold: no growing state, stationary results hold.
    Relevant,
    /// At threshold: a lasing pole sits on the real axis.
    CriticalSingularity,
    /// Above threshold: a growing state dominates at long times.
    Unphysical,
}

impl Regime {
    pub fn is_physical(&self) -> bool {
        !matches!(self, Regime::Unphysical)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelevanceVerdict {
    pub spec: ChainSpec,
    pub regime: Regime,
    pub gamma_critical: f64,
    pub tgbs_count: usize,
    /// `gamma_c - gamma`.
    pub margin: f64,
}

pub fn verdict(spec: &ChainSpec) -> RelevanceVerdict {
    let gc = gamma_critical(spec.n_cells());
    let margin = gc - spec.gamma();
    let regime = if margin.abs() <= CRITICAL_REL_TOL * gc {
        Regime::CriticalSingularity
    } else if margin > 0.0 {
        Regime::Relevant
    } else {
        Regime::Unphysical
    };
    RelevanceVerdict {
        spec: *spec,
        regime,
        gamma_critical: gc,
        tgbs_count: tgbs_count(spec),
        margin,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpecialPointKind {
    /// Unit transmission with one-sided reflection at `mu = 0`.
    #[serde(rename = "BandEdgeATR")]
    BandEdgeAtr,
    /// Unit transmission, no reflection from either side.
    FabryPerot,
    /// Real-axis pole at `k = pi/2`.
    CpaLaser,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecialPoint {
    pub kind: SpecialPointKind,
    pub energy: f64,
    pub k: f64,
    pub gamma: f64,
    /// Resonance order `m` or ladder rung `n`.
    pub n_index: Option<usize>,
    pub physical: bool,
    /// Predicted coefficients; `None` where they diverge.
    pub transmission: Option<f64>,
    pub reflection_left: Option<f64>,
    pub reflection_right: Option<f64>,
}

fn point_at_energy(
    kind: SpecialPointKind,
    spec: &ChainSpec,
    energy: f64,
    n_index: Option<usize>,
    reflection_left: f64,
) -> Result<SpecialPoint> {
    Ok(SpecialPoint {
        kind,
        energy,
        k: wavenumber_for_energy(energy)?,
        gamma: spec.gamma(),
        n_index,
        physical: verdict(spec).regime.is_physical(),
        transmission: Some(1.0),
        reflection_left: Some(reflection_left),
        reflection_right: Some(0.0),
    })
}

/// The two energies `+-sqrt(4 - gamma^2)` where the Bloch index vanishes;
/// there `R_L = 4 N^2 gamma^2` and `R_R = 0`. Empty at `gamma = 0`, where
/// these energies sit on the lead band edge.
pub fn band_edge_points(spec: &ChainSpec) -> Result<Vec<SpecialPoint>> {
    let g = spec.gamma();
    if g >= 2.0 {
        return Err(Error::OutOfRange {
            value: g,
            reason: "band-edge points need gamma < 2",
        });
    }
    if g == 0.0 {
        log::info!("gamma = 0: band-edge energies coincide with the lead band edge");
        return Ok(Vec::new());
    }
    let e = (4.0 - g * g).sqrt();
    let n = spec.n_cells() as f64;
    let r_left = 4.0 * n * n * g * g;
    [-e, e]
        .iter()
        .map(|&energy| point_at_energy(SpecialPointKind::BandEdgeAtr, spec, energy, None, r_left))
        .collect()
}

/// Energies `+-sqrt(4 cos^2(m pi / 2N) - gamma^2)` for `m = 1..N-1`, kept
/// only where real.
pub fn fabry_perot_points(spec: &ChainSpec) -> Result<Vec<SpecialPoint>> {
    let n = spec.n_cells();
    let g = spec.gamma();
    let mut points = Vec::new();
    for m in 1..n {
        let c = (m as f64 * PI / (2.0 * n as f64)).cos();
        let d = 4.0 * c * c - g * g;
        if d <= 0.0 {
            continue;
        }
        let e = d.sqrt();
        for energy in [-e, e] {
            points.push(point_at_energy(
                SpecialPointKind::FabryPerot,
                spec,
                energy,
                Some(m),
                0.0,
            )?);
        }
    }
    Ok(points)
}

/// One point per ladder rung at `k = pi/2`; only the lowest rung is physical.
pub fn cpa_laser_points(n_cells: usize) -> Result<Vec<SpecialPoint>> {
    let ladder = threshold_ladder(n_cells)?;
    ladder
        .gamma_values
        .iter()
        .enumerate()
        .map(|(i, &g)| {
            let spec = ChainSpec::new(n_cells, g)?;
            Ok(SpecialPoint {
                kind: SpecialPointKind::CpaLaser,
                energy: 0.0,
                k: FRAC_PI_2,
                gamma: g,
                n_index: Some(i),
                physical: verdict(&spec).regime.is_physical(),
                transmission: None,
                reflection_left: None,
                reflection_right: None,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeRow {
    pub n_cells: usize,
    pub transmission: f64,
    pub regime: BlochRegime,
    pub physical: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeSweep {
    pub gamma: f64,
    pub energy: f64,
    pub rows: Vec<SizeRow>,
    /// Mean spacing of the maxima of `T(N)`, located by parabolic
    /// interpolation.
    pub quasiperiod_measured: Option<f64>,
    /// `pi / (2 mu)` on the propagating branch.
    pub quasiperiod_predicted: Option<f64>,
    /// `ln T(N+1) - ln T(N)` at the largest size.
    pub log_slope_measured: Option<f64>,
    /// `-4 phi` on the evanescent branch, `mu = i phi`.
    pub log_slope_predicted: Option<f64>,
}

/// `T(N)` for `N = 1..=n_max` at fixed gain and energy.
pub fn transmission_vs_size(gamma: f64, energy: f64, n_max: usize) -> Result<SizeSweep> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::OutOfRange {
            value: gamma,
            reason: "gamma must be positive and finite",
        });
    }
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    let k = wavenumber_for_energy(energy)?;
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let spec = ChainSpec::new(n, gamma)?;
        rows.push(SizeRow {
            n_cells: n,
            transmission: transmission_closed_form(&spec, k),
            regime: classify_bloch_regime(energy, &spec),
            physical: verdict(&spec).regime.is_physical(),
        });
    }

    let spec1 = ChainSpec::new(1, gamma)?;
    let mu = bloch_index(ComplexWavenumber::real(k), &spec1).mu;
    let regime = classify_bloch_regime(energy, &spec1);
    let quasiperiod_predicted = (regime == BlochRegime::Propagating).then(|| PI / (2.0 * mu.re));
    let log_slope_predicted = (regime == BlochRegime::Evanescent).then(|| -4.0 * mu.im);

    let t: Vec<f64> = rows.iter().map(|r| r.transmission).collect();
    let maxima: Vec<f64> = (1..t.len().saturating_sub(1))
        .filter(|&i| t[i] > t[i - 1] && t[i] >= t[i + 1])
        .map(|i| {
            let (a, b, c) = (t[i - 1], t[i], t[i + 1]);
            let denom = a - 2.0 * b + c;
            let shift = if denom != 0.0 {
                0.5 * (a - c) / denom
            } else {
                0.0
            };
            (i + 1) as f64 + shift
        })
        .collect();
    let quasiperiod_measured = (maxima.len() >= 2)
        .then(|| (maxima[maxima.len() - 1] - maxima[0]) / (maxima.len() - 1) as f64);
    let log_slope_measured = (t.len() >= 2 && t.iter().all(|&v| v > 0.0))
        .then(|| t[t.len() - 1].ln() - t[t.len() - 2].ln());

    Ok(SizeSweep {
        gamma,
        energy,
        rows,
        quasiperiod_measured,
        quasiperiod_predicted,
        log_slope_measured,
        log_slope_predicted,
    })
}
