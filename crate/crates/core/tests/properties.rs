use std::f64::consts::PI;

use proptest::prelude::*;
use ptchain::model::{bloch_index, dispersion_energy, ChainSpec, ComplexWavenumber};
use ptchain::poles::{find_poles, winding_number, Region};
use ptchain::scattering::{
    plane_wave_transfer, plane_wave_transfer_from_mu, plane_wave_transfer_product, scatter,
    transmission_closed_form,
};

fn spec_strategy() -> impl Strategy<Value = ChainSpec> {
    (1usize..=12, 0.0f64..2.5).prop_map(|(n, g)| ChainSpec::new(n, g).unwrap())
}

fn real_k() -> impl Strategy<Value = f64> {
    0.01f64..(PI - 0.01)
}

fn complex_k() -> impl Strategy<Value = ComplexWavenumber> {
    (0.01f64..(PI - 0.01), -0.5f64..0.5).prop_map(|(re, im)| ComplexWavenumber::new(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn unit_determinant(spec in spec_strategy(), k in complex_k()) {
        let m = plane_wave_transfer(&spec, k).unwrap();
        let scale = m.max_abs().max(1.0);
        prop_assert!((m.det() - 1.0).norm() <= 1e-10 * scale * scale);
    }

    #[test]
    fn diagonal_conjugate_on_real_axis(spec in spec_strategy(), k in real_k()) {
        let m = plane_wave_transfer(&spec, ComplexWavenumber::real(k)).unwrap();
        prop_assert!((m.m11 - m.m22.conj()).norm() <= 1e-12 * m.max_abs().max(1.0));
    }

    #[test]
    fn closed_form_matches_product(spec in spec_strategy(), k in complex_k()) {
        let a = plane_wave_transfer(&spec, k).unwrap();
        let b = plane_wave_transfer_product(&spec, k).unwrap();
        prop_assert!(a.relative_distance(&b) <= 1e-10);
    }

    #[test]
    fn bloch_branch_invariance(spec in spec_strategy(), k in complex_k()) {
        let mu = bloch_index(k, &spec).mu;
        prop_assume!((2.0 * mu).sin().norm() > 1e-3);
        let base = plane_wave_transfer_from_mu(&spec, k, mu).unwrap();
        for other in [-mu, mu + PI] {
            let alt = plane_wave_transfer_from_mu(&spec, k, other).unwrap();
            prop_assert!(base.relative_distance(&alt) <= 1e-10);
        }
    }

    #[test]
    fn generalized_conservation(spec in spec_strategy(), k in real_k()) {
        if let Ok(s) = scatter(&spec, k) {
            let lhs = (s.transmission - 1.0).abs();
            let rhs = (s.reflection_left * s.reflection_right).sqrt();
            prop_assert!((lhs - rhs).abs() <= 1e-9 * s.transmission.max(1.0));
            let closed = transmission_closed_form(&spec, k);
            prop_assert!((closed - s.transmission).abs() <= 1e-9 * closed.max(1.0));
        }
    }

    #[test]
    fn hermitian_unitarity(n in 1usize..=20, k in real_k()) {
        let s = scatter(&ChainSpec::new(n, 0.0).unwrap(), k).unwrap();
        prop_assert!((s.transmission - 1.0).abs() <= 1e-10);
        prop_assert!(s.reflection_left <= 1e-10 && s.reflection_right <= 1e-10);
    }

    #[test]
    fn energy_imaginary_part(k in complex_k()) {
        let e = dispersion_energy(k);
        prop_assert!((e.im - 2.0 * k.re().sin() * k.im().sinh()).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn winding_completeness(n in 1usize..=5, g in 0.05f64..2.2) {
        let spec = ChainSpec::new(n, g).unwrap();
        let region = Region::full_strip(-1.0, 1.0);
        let winding = winding_number(&spec, &region, 50).unwrap();
        let found = find_poles(&spec, &region, 50).unwrap();
        prop_assert_eq!(winding, found.len() as i64);
        for p in &found {
            let mirror = -p.k.as_complex().conj();
            prop_assert!(found.iter().any(|q| (q.k.as_complex() - mirror).norm() <= 1e-8));
        }
    }
}
