use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::layout::LatticeLayout;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveState {
    /// Indexed by global site.
    pub amplitudes: Vec<Complex64>,
    pub time: f64,
}

impl WaveState {
    pub fn total_intensity(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn intensities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Normalized Gaussian packet centered on relative site `j0` with carrier
/// wavenumber `k0`.
pub fn gaussian_packet(layout: &LatticeLayout, j0: i64, sigma: f64, k0: f64) -> Result<WaveState> {
    if !(sigma > 0.0) || !sigma.is_finite() || !k0.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "packet needs finite sigma > 0 and finite k0, got sigma = {sigma}, k0 = {k0}"
        )));
    }
    let left_edge = -(layout.scatter_start as i64);
    let right_edge = (layout.total_sites - layout.scatter_start) as i64 - 1;
    let margin = (3.0 * sigma).ceil() as i64;
    let inside_left = j0 - margin >= left_edge && j0 + margin < 0;
    let inside_right = j0 - margin >= layout.n_scatter_sites() as i64 && j0 + margin <= right_edge;
    if !(inside_left || inside_right) {
        log::warn!("packet at j0 = {j0} with sigma = {sigma} is within 3 sigma of a lattice edge or the scattering region");
    }
    let mut amplitudes: Vec<Complex64> = (0..layout.total_sites)
        .map(|g| {
            let j = layout.relative(g) as f64;
            let x = (j - j0 as f64) / sigma;
            Complex64::from_polar((-0.5 * x * x).exp(), k0 * j)
        })
        .collect();
    let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "packet at j0 = {j0} has no weight on the lattice"
        )));
    }
    amplitudes.iter_mut().for_each(|a| *a /= norm);
    Ok(WaveState {
        amplitudes,
        time: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn normalized() {
        let layout = LatticeLayout::centered(1200, 3).unwrap();
        let p = gaussian_packet(&layout, -300, 60.0, FRAC_PI_2).unwrap();
        assert!((p.total_intensity() - 1.0).abs() < 1e-12);
        assert_eq!(p.time, 0.0);
        let peak = layout.global(-300).unwrap();
        let imax = p
            .intensities()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert_eq!(imax, peak);
    }

    #[test]
    fn wide_packet_is_plane_wave() {
        let layout = LatticeLayout::centered(40, 1).unwrap();
        let p = gaussian_packet(&layout, -10, 1e6, 0.7).unwrap();
        let m0 = p.amplitudes[0].norm();
        for (g, a) in p.amplitudes.iter().enumerate() {
            assert!((a.norm() - m0).abs() <= 1e-6 * m0);
            let phase = (a / p.amplitudes[0]).arg();
            let expected = Complex64::from_polar(1.0, 0.7 * g as f64).arg();
            assert!((Complex64::from_polar(1.0, phase - expected) - 1.0).norm() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_width() {
        let layout = LatticeLayout::centered(40, 1).unwrap();
        assert!(gaussian_packet(&layout, -10, 0.0, 0.7).is_err());
        assert!(gaussian_packet(&layout, -10, f64::NAN, 0.7).is_err());
    }
}
