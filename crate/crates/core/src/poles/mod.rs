//! S-matrix poles: zeros of the common denominator `M22` in the complex k strip.

mod finder;
mod ladder;
mod trajectory;

pub use finder::{find_poles, winding_number, Region, DEDUP_TOL, EDGE_MARGIN, RESIDUAL_TOL};
pub use ladder::{
    critical_size, gamma_critical, imaginary_branch_excluded, imaginary_branch_m22, tgbs_count,
    threshold_ladder, verify_ladder, ThresholdLadder,
};
pub use trajectory::{
    reliable_depth, trace_trajectories, trace_trajectories_with, Branch, Crossing, Trajectory,
    TrajectoryOptions, TrajectoryPoint,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{dispersion_energy, ChainSpec, ComplexWavenumber};
use crate::scattering::{chebyshev, SINGULAR_BASIS_TOL};

/// Tolerance used to decide whether a pole sits on an axis.
pub const CLASSIFICATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PoleClass {
    /// First quadrant: localized state growing in time.
    #[serde(rename = "TGBS")]
    Tgbs,
    /// Second quadrant.
    DecayingBound,
    /// Real axis, `Re k > 0`: purely outgoing, lasing.
    #[serde(rename = "LasingSingularity")]
    LasingSingularity,
    /// Real axis, `Re k < 0`: purely incoming, coherent perfect absorption.
    AbsorbingSingularity,
    /// Lower half plane.
    Resonance,
}

impl PoleClass {
    pub fn classify(k: Complex64) -> Self {
        let tol = CLASSIFICATION_TOL;
        if k.im.abs() <= tol {
            if k.re > 0.0 {
                PoleClass::LasingSingularity
            } else {
                PoleClass::AbsorbingSingularity
            }
        } else if k.im < 0.0 {
            PoleClass::Resonance
        } else if k.re > tol {
            PoleClass::Tgbs
        } else {
            // Re k within tol of zero lies in the excluded margin of the
            // finder; such a state does not grow, so it is grouped here.
            PoleClass::DecayingBound
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            PoleClass::Tgbs => "TGBS",
            PoleClass::DecayingBound => "DecayingBound",
            PoleClass::LasingSingularity => "LasingSingularity",
            PoleClass::AbsorbingSingularity => "AbsorbingSingularity",
            PoleClass::Resonance => "Resonance",
        }
    }

    pub fn is_spectral_singularity(&self) -> bool {
        matches!(
            self,
            PoleClass::LasingSingularity | PoleClass::AbsorbingSingularity
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleRecord {
    pub k: ComplexWavenumber,
    pub energy: Complex64,
    /// `Im E = 2 sin(Re k) sinh(Im k)`.
    pub growth_rate: f64,
    pub classification: PoleClass,
    /// `|M22(k)|` at the refined root.
    pub residual: f64,
}

impl PoleRecord {
    pub fn new(spec: &ChainSpec, k: Complex64) -> Result<Self> {
        let residual = pole_residual(spec, ComplexWavenumber::from(k))?.norm();
        Ok(Self::with_residual(k, residual))
    }

    pub(crate) fn with_residual(k: Complex64, residual: f64) -> Self {
        let wk = ComplexWavenumber::from(k);
        Self {
            k: wk,
            energy: dispersion_energy(wk),
            growth_rate: 2.0 * wk.re().sin() * wk.im().sinh(),
            classification: PoleClass::classify(wk.as_complex()),
            residual,
        }
    }
}

/// `M22(k) = cos(2N mu) - i cot(k) tan(mu) sin(2N mu)`; its zeros are the poles.
pub fn pole_residual(spec: &ChainSpec, k: ComplexWavenumber) -> Result<Complex64> {
    let kc = k.as_complex();
    let s = kc.sin();
    if s.norm() < SINGULAR_BASIS_TOL {
        return Err(Error::SingularBasis {
            re: kc.re,
            im: kc.im,
        });
    }
    Ok(m22_unchecked(spec.n_cells(), spec.gamma(), kc, s))
}

/// `M22` together with the magnitude of its two summands, the scale against
/// which cancellation error is judged.
pub(crate) fn m22_with_scale(n: usize, gamma: f64, k: Complex64) -> (Complex64, f64) {
    let s = k.sin();
    let energy = -2.0 * k.cos();
    let c = (energy * energy + gamma * gamma - 2.0) / 2.0;
    let ch = chebyshev(n, c);
    let odd = Complex64::new(0.0, 1.0) * (k.cos() / s) * (1.0 - c) * ch.u_n1;
    (ch.t_n - odd, ch.t_n.norm() + odd.norm())
}

#[inline]
pub(crate) fn m22_unchecked(n: usize, gamma: f64, k: Complex64, sin_k: Complex64) -> Complex64 {
    let energy = -2.0 * k.cos();
    let c = (energy * energy + gamma * gamma - 2.0) / 2.0;
    let ch = chebyshev(n, c);
    ch.t_n - Complex64::new(0.0, 1.0) * (k.cos() / sin_k) * (1.0 - c) * ch.u_n1
}
