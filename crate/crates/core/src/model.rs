//! Lattice conventions for the gain/loss chain.
//!
//! Units are fixed: hbar = J = a = 1. Energies are in units of the hopping,
//! times in units of hbar/J and wavenumbers in units of the inverse lattice
//! constant. The scattering region occupies sites `0..2N`; site `j` carries
//! the on-site energy `(-1)^j i gamma`, so every unit cell is a gain site
//! followed by a loss site.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute tolerance on `E^2 + gamma^2 - 4` for [`classify_bloch_regime`].
pub const BAND_EDGE_TOL: f64 = 1e-12;

/// Physical parameters of the chain: number of unit cells and gain/loss strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    n_cells: usize,
    gamma: f64,
}

impl ChainSpec {
    pub fn new(n_cells: usize, gamma: f64) -> Result<Self> {
        if n_cells == 0 {
            return Err(Error::InvalidParameter("n_cells must be at least 1".into()));
        }
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma must be finite and nonnegative, got {gamma}"
            )));
        }
        Ok(Self { n_cells, gamma })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Number of sites in the scattering region, `2N`.
    pub fn n_sites(&self) -> usize {
        2 * self.n_cells
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(self.n_cells, gamma)
    }

    /// On-site energy of scattering site `j` (zero outside `0..2N`).
    pub fn onsite(&self, j: i64) -> Complex64 {
        if j < 0 || j >= self.n_sites() as i64 {
            return Complex64::new(0.0, 0.0);
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        Complex64::new(0.0, sign * self.gamma)
    }

    pub fn onsite_profile(&self) -> Vec<OnsitePotential> {
        (0..self.n_sites())
            .map(|j| OnsitePotential {
                site_index: j,
                value: self.onsite(j as i64),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnsitePotential {
    pub site_index: usize,
    pub value: Complex64,
}

/// Complex wavenumber with the real part folded into `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexWavenumber {
    re: f64,
    im: f64,
}

impl ComplexWavenumber {
    pub fn new(re: f64, im: f64) -> Self {
        Self {
            re: fold_to_strip(re),
            im,
        }
    }

    pub fn real(k: f64) -> Self {
        Self::new(k, 0.0)
    }

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn im(&self) -> f64 {
        self.im
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

impl From<Complex64> for ComplexWavenumber {
    fn from(k: Complex64) -> Self {
        Self::new(k.re, k.im)
    }
}

impl From<ComplexWavenumber> for Complex64 {
    fn from(k: ComplexWavenumber) -> Self {
        k.as_complex()
    }
}

fn fold_to_strip(re: f64) -> f64 {
    if re > -PI && re <= PI {
        return re;
    }
    let two_pi = 2.0 * PI;
    let mut r = re - two_pi * (re / two_pi).round();
    if r <= -PI {
        r += two_pi;
    } else if r > PI {
        r -= two_pi;
    }
    r
}

/// Bloch-like index of the periodic region.
///
/// `cos2mu` is the primitive quantity, half the trace of the unit-cell
/// transfer matrix. `mu` is one representative of the multivalued inverse,
/// normalized so that `Im mu >= 0`; on the evanescent branch this makes
/// `mu = i phi` with `phi > 0`. Nothing downstream depends on the branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochIndex {
    pub cos2mu: Complex64,
    pub mu: Complex64,
}

impl BlochIndex {
    pub fn from_energy(energy: Complex64, gamma: f64) -> Self {
        let cos2mu = (energy * energy + gamma * gamma - 2.0) / 2.0;
        let mut mu = cos2mu.acos() / 2.0;
        if mu.im < 0.0 || (mu.im == 0.0 && mu.re < 0.0) {
            mu = -mu;
        }
        Self { cos2mu, mu }
    }
}

/// Lead dispersion `E = -2 cos k`.
pub fn dispersion_energy(k: ComplexWavenumber) -> Complex64 {
    -2.0 * k.as_complex().cos()
}

pub fn bloch_index(k: ComplexWavenumber, spec: &ChainSpec) -> BlochIndex {
    BlochIndex::from_energy(dispersion_energy(k), spec.gamma())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlochRegime {
    /// Real Bloch index, `E^2 + gamma^2 < 4`.
    Propagating,
    /// `mu = 0`.
    BandEdge,
    /// Purely imaginary Bloch index, `E^2 + gamma^2 > 4`.
    Evanescent,
}

pub fn classify_bloch_regime(energy: f64, spec: &ChainSpec) -> BlochRegime {
    classify_bloch_regime_with_tol(energy, spec, BAND_EDGE_TOL)
}

pub fn classify_bloch_regime_with_tol(energy: f64, spec: &ChainSpec, tol: f64) -> BlochRegime {
    let d = energy * energy + spec.gamma() * spec.gamma() - 4.0;
    if d.abs() <= tol {
        BlochRegime::BandEdge
    } else if d < 0.0 {
        BlochRegime::Propagating
    } else {
        BlochRegime::Evanescent
    }
}

/// Lead wavenumber in `(0, pi)` for a real energy inside the band.
pub fn wavenumber_for_energy(energy: f64) -> Result<f64> {
    if !(energy.abs() < 2.0) {
        return Err(Error::OutOfRange {
            value: energy,
            reason: "energy must lie strictly inside the lead band (-2, 2)",
        });
    }
    Ok((-energy / 2.0).acos())
}

/// Lead group velocity `2 sin k`.
pub fn group_velocity(k: f64) -> f64 {
    2.0 * k.sin()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn spec(n: usize, g: f64) -> ChainSpec {
        ChainSpec::new(n, g).unwrap()
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(ChainSpec::new(0, 0.3).is_err());
        assert!(ChainSpec::new(3, -0.1).is_err());
        assert!(ChainSpec::new(3, f64::NAN).is_err());
    }

    #[test]
    fn dispersion_examples() {
        let e = dispersion_energy(ComplexWavenumber::real(FRAC_PI_2));
        assert!(e.norm() < 1e-15);
        let e = dispersion_energy(ComplexWavenumber::real(0.0));
        assert!((e - Complex64::new(-2.0, 0.0)).norm() < 1e-15);
        // 1.571 + 0.140i is the N=3, gamma=0.7 growing state.
        let e = dispersion_energy(ComplexWavenumber::new(1.571, 0.140));
        assert!(e.re.abs() < 1e-3);
        assert!((e.im - 0.280).abs() < 1e-3);
    }

    #[test]
    fn growth_rate_identity() {
        for &(re, im) in &[(0.3, 0.2), (-2.0, 0.7), (1.2, -0.4), (3.0, 1.1)] {
            let k = ComplexWavenumber::new(re, im);
            let e = dispersion_energy(k);
            let expected = 2.0 * re.sin() * im.sinh();
            assert!((e.im - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn bloch_index_examples() {
        let s = spec(3, 0.3);
        let b = bloch_index(ComplexWavenumber::real(FRAC_PI_2), &s);
        assert!((b.cos2mu.re + 0.955).abs() < 1e-14);
        // arccos(-0.955) / 2 = 1.42022805401821059 (mpmath, 30 digits)
        assert!((b.mu.re - 1.420_228_054_018_210_6).abs() < 1e-13);
        assert!(b.mu.im.abs() < 1e-15);

        let b = BlochIndex::from_energy(Complex64::new(2.0, 0.0), 0.0);
        assert!((b.cos2mu.re - 1.0).abs() < 1e-15);
        assert!(b.mu.norm() < 1e-7);

        let b = BlochIndex::from_energy(Complex64::new(1.98, 0.0), 0.3);
        assert!(b.mu.re.abs() < 1e-12);
        // acosh(1.0052) / 2 = 0.05096812519679278 (mpmath)
        assert!((b.mu.im - 0.050_968_125_196_792_78).abs() < 1e-10);
    }

    #[test]
    fn bloch_index_round_trip() {
        for &(re, im, g) in &[
            (0.4, 0.0, 0.3),
            (1.0, 0.5, 1.2),
            (-2.5, -0.3, 2.0),
            (0.1, 1.0, 0.0),
        ] {
            let b = bloch_index(ComplexWavenumber::new(re, im), &spec(2, g));
            let back = (2.0 * b.mu).cos();
            assert!((back - b.cos2mu).norm() <= 1e-12 * b.cos2mu.norm().max(1.0));
        }
    }

    #[test]
    fn regime_examples() {
        let s = spec(3, 0.3);
        assert_eq!(classify_bloch_regime(1.93, &s), BlochRegime::Propagating);
        assert_eq!(
            classify_bloch_regime((4.0f64 - 0.09).sqrt(), &s),
            BlochRegime::BandEdge
        );
        assert_eq!(classify_bloch_regime(1.98, &s), BlochRegime::Evanescent);
    }

    #[test]
    fn onsite_profile_is_pt_symmetric() {
        for n in 1..10 {
            let s = spec(n, 0.77);
            let p = s.onsite_profile();
            for j in 0..p.len() {
                assert_eq!(p[j].value, p[p.len() - 1 - j].value.conj());
            }
            assert_eq!(p[0].value, Complex64::new(0.0, 0.77));
        }
    }

    #[test]
    fn strip_folding() {
        let k = ComplexWavenumber::new(3.0 * PI / 2.0, 0.1);
        assert!((k.re() + PI / 2.0).abs() < 1e-14);
        assert_eq!(ComplexWavenumber::new(PI, 0.0).re(), PI);
        assert!((ComplexWavenumber::new(-PI, 0.0).re() - PI).abs() < 1e-15);
    }

    #[test]
    fn energy_to_wavenumber() {
        assert!((wavenumber_for_energy(0.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!(wavenumber_for_energy(2.0).is_err());
    }
}
