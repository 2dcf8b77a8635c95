//! Fixed-step fourth-order Runge-Kutta for `i dpsi/dt = H psi`.

use num_complex::Complex64;
use rayon::prelude::*;

use super::hamiltonian::TridiagonalHamiltonian;
use super::packet::WaveState;

/// Default local error target per step, relative to the state norm.
pub const DEFAULT_LOCAL_TOL: f64 = 1e-10;

/// Step size whose leading local error term `(|H| dt)^5 / 120` meets `tol`.
pub fn rk4_step_size(h: &TridiagonalHamiltonian, tol: f64) -> f64 {
    (120.0 * tol).powf(0.2) / h.norm_inf().max(1e-300)
}

/// Integrate from `psi0.time` to `t` with local error target `tol`.
pub fn evolve_direct(h: &TridiagonalHamiltonian, psi0: &WaveState, t: f64, tol: f64) -> WaveState {
    let span = t - psi0.time;
    let mut psi = psi0.amplitudes.clone();
    if span <= 0.0 {
        return WaveState {
            amplitudes: psi,
            time: psi0.time,
        };
    }
    let steps = (span / rk4_step_size(h, tol)).ceil().max(1.0) as usize;
    let dt = span / steps as f64;
    let n = psi.len();
    let zero = Complex64::new(0.0, 0.0);
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
        vec![zero; n],
        vec![zero; n],
        vec![zero; n],
        vec![zero; n],
        vec![zero; n],
    );
    // dpsi/dt = -i H psi
    let rhs = |src: &[Complex64], dst: &mut [Complex64]| {
        h.apply_into(src, dst);
        dst.iter_mut().for_each(|v| *v *= Complex64::new(0.0, -1.0));
    };
    let axpy = |dst: &mut [Complex64], x: &[Complex64], a: f64, y: &[Complex64]| {
        dst.par_iter_mut()
            .with_min_len(4096)
            .zip(x.par_iter().zip(y.par_iter()))
            .for_each(|(d, (x, y))| *d = x + a * y);
    };
    for _ in 0..steps {
        rhs(&psi, &mut k1);
        axpy(&mut tmp, &psi, 0.5 * dt, &k1);
        rhs(&tmp, &mut k2);
        axpy(&mut tmp, &psi, 0.5 * dt, &k2);
        rhs(&tmp, &mut k3);
        axpy(&mut tmp, &psi, dt, &k3);
        rhs(&tmp, &mut k4);
        for i in 0..n {
            psi[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    WaveState {
        amplitudes: psi,
        time: t,
    }
}
