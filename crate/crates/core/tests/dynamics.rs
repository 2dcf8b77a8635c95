//! Full-size wave-packet runs on the 1200-site lattice.

use std::f64::consts::FRAC_PI_2;

use ptchain::dynamics::*;
use ptchain::model::ChainSpec;
use ptchain::poles::{find_poles, gamma_critical, PoleClass, Region};
use ptchain::scattering::transmission_closed_form;

const L: usize = 1200;
const J0: i64 = -300;
const SIGMA: f64 = 60.0;

fn setup(n: usize, gamma: f64, total: usize) -> (LatticeLayout, PropagatorBundle, WaveState) {
    let layout = LatticeLayout::centered(total, n).unwrap();
    let h = build_hamiltonian(&layout, &ChainSpec::new(n, gamma).unwrap()).unwrap();
    let bundle = prepare_propagator(&h).unwrap();
    let psi0 = gaussian_packet(&layout, J0, SIGMA, FRAC_PI_2).unwrap();
    (layout, bundle, psi0)
}

#[test]
fn hermitian_chain_transmits_fully_and_conserves_norm() {
    let (layout, bundle, psi0) = setup(3, 0.0, L);
    assert!(bundle.eigenvalues.iter().all(|e| e.im.abs() < 1e-10));
    let states = evolve_many(&bundle, &psi0, &[0.0, 100.0, 200.0, 300.0]);
    for s in &states {
        assert!((s.total_intensity() - 1.0).abs() < 1e-10);
    }
    let t = transmitted_intensity(&states[3], &layout);
    assert!((t - 1.0).abs() < 0.01, "{t}");
    assert!(transmitted_intensity(&states[0], &layout) <= 1e-12);
}

#[test]
fn weak_gain_matches_stationary_transmission() {
    let (layout, bundle, psi0) = setup(3, 0.3, L);
    let max_im = bundle.dominant_eigenvalue().im;
    // A PT-broken pair of lead-like states near E = -1.9987 gives a tiny
    // positive imaginary part on the finite lattice.
    assert!(max_im < 2e-6, "{max_im}");
    assert!(!bundle.uses_fallback());
    let state = evolve(&bundle, &psi0, 300.0);
    let t = transmitted_intensity(&state, &layout);
    assert!((t - 2.60).abs() <= 0.02, "{t}");
    let stationary = transmission_closed_form(&ChainSpec::new(3, 0.3).unwrap(), FRAC_PI_2);
    assert!((t - stationary).abs() <= 0.02 * stationary);
    assert!(300.0 < validity_horizon(&layout, J0, FRAC_PI_2));
}

#[test]
fn single_cell_matches_stationary_transmission() {
    let (layout, bundle, psi0) = setup(1, 1.0, L);
    let state = evolve(&bundle, &psi0, 300.0);
    let t = transmitted_intensity(&state, &layout);
    let stationary = transmission_closed_form(&ChainSpec::new(1, 1.0).unwrap(), FRAC_PI_2);
    assert!(
        (t - stationary).abs() <= 0.02 * stationary,
        "{t} vs {stationary}"
    );
}

#[test]
fn growing_state_rate() {
    let (layout, bundle, psi0) = setup(3, 0.7, L);
    let dominant = bundle.dominant_eigenvalue();
    assert!((dominant.im - 0.280).abs() <= 1e-3, "{dominant}");
    let times: Vec<f64> = (0..=20).map(|i| 100.0 + 5.0 * i as f64).collect();
    let series: Vec<(f64, f64)> = evolve_many(&bundle, &psi0, &times)
        .iter()
        .map(|s| (s.time, s.total_intensity()))
        .collect();
    let rate = growth_rate_fit(&series).unwrap();
    assert!((rate - 0.280).abs() <= 0.02 * 0.280, "{rate}");

    // The growing state is seeded by the packet tail long before arrival.
    let early: Vec<f64> = evolve_many(&bundle, &psi0, &[20.0, 60.0, 100.0])
        .iter()
        .map(|s| intensity_split(s, &layout).central)
        .collect();
    assert!(
        early[1] > 10.0 * early[0] && early[2] > 10.0 * early[1],
        "{early:?}"
    );
}

#[test]
fn threshold_gain_emits_at_constant_amplitude() {
    let (layout, bundle, psi0) = setup(3, gamma_critical(3), L);
    let times: Vec<f64> = (0..=20).map(|i| 200.0 + 10.0 * i as f64).collect();
    let states = evolve_many(&bundle, &psi0, &times);
    let central: Vec<(f64, f64)> = states
        .iter()
        .map(|s| (s.time, intensity_split(s, &layout).central))
        .collect();
    let rate = log_slope_rate(&central).unwrap();
    assert!(rate.abs() <= 0.005, "{rate}");
    let probe = |j: i64| -> Vec<f64> {
        states
            .iter()
            .map(|s| site_intensity(s, &layout, j))
            .collect()
    };
    let lead = probe(6 + 50);
    let late = &lead[5..];
    let mean = late.iter().sum::<f64>() / late.len() as f64;
    assert!(mean > 1.0);
    assert!(
        late.iter().all(|v| (v - mean).abs() <= 0.05 * mean),
        "{lead:?}"
    );
}

#[test]
fn finite_lattice_growth_matches_poles() {
    for &(n, g) in &[(3, 0.7), (2, 1.0), (1, 1.5)] {
        let layout = LatticeLayout::centered(600, n).unwrap();
        let spec = ChainSpec::new(n, g).unwrap();
        let bundle = prepare_propagator(&build_hamiltonian(&layout, &spec).unwrap()).unwrap();
        let dominant = bundle.dominant_eigenvalue();
        assert!(dominant.im > 1e-4);
        let poles = find_poles(&spec, &Region::full_strip(-1.0, 1.5), 50).unwrap();
        let best = poles
            .iter()
            .filter(|p| p.classification == PoleClass::Tgbs)
            .map(|p| (p.energy - dominant).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(best <= 1e-3, "N={n} gamma={g}: {best}");
    }
}
