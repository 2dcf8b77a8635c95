//! Transfer matrices and stationary scattering amplitudes.
//!
//! The N-cell matrix is evaluated through the Chebyshev identity written
//! directly in terms of `c = cos 2mu`:
//!
//! ```text
//! M^N = M U_{N-1}(c) - I U_{N-2}(c),   U_{n-1}(cos x) = sin(n x) / sin x
//! ```
//!
//! Every quantity below is a polynomial in `c`, so there is no branch choice
//! for `mu` and no removable singularity at `sin 2mu = 0`.

use std::f64::consts::PI;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{dispersion_energy, wavenumber_for_energy, ChainSpec, ComplexWavenumber};

/// `|sin k|` below which the plane-wave basis change is treated as singular.
pub const SINGULAR_BASIS_TOL: f64 = 1e-12;
/// `|M22|` below which a real-k evaluation is reported as a spectral singularity.
pub const SPECTRAL_SINGULARITY_TOL: f64 = 1e-10;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Dense 2x2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2C {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

impl Matrix2C {
    pub const fn new(m11: Complex64, m12: Complex64, m21: Complex64, m22: Complex64) -> Self {
        Self { m11, m12, m21, m22 }
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self::new(one, zero, zero, one)
    }

    pub fn det(&self) -> Complex64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn trace(&self) -> Complex64 {
        self.m11 + self.m22
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.m11 * s, self.m12 * s, self.m21 * s, self.m22 * s)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(
            self.m11 - other.m11,
            self.m12 - other.m12,
            self.m21 - other.m21,
            self.m22 - other.m22,
        )
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        [self.m11, self.m12, self.m21, self.m22]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Inverse of a matrix with unit determinant is cheap; general inverse otherwise.
    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() == 0.0 {
            return None;
        }
        Some(Self::new(
            self.m22 / d,
            -self.m12 / d,
            -self.m21 / d,
            self.m11 / d,
        ))
    }

    pub fn pow(&self, n: usize) -> Self {
        (0..n).fold(Self::identity(), |acc, _| *self * acc)
    }

    /// Entrywise distance scaled by the larger of the two operands.
    pub fn relative_distance(&self, other: &Self) -> f64 {
        let scale = self.max_abs().max(other.max_abs()).max(f64::MIN_POSITIVE);
        self.sub(other).max_abs() / scale
    }
}

impl Mul for Matrix2C {
    type Output = Matrix2C;

    fn mul(self, rhs: Matrix2C) -> Matrix2C {
        Matrix2C::new(
            self.m11 * rhs.m11 + self.m12 * rhs.m21,
            self.m11 * rhs.m12 + self.m12 * rhs.m22,
            self.m21 * rhs.m11 + self.m22 * rhs.m21,
            self.m21 * rhs.m12 + self.m22 * rhs.m22,
        )
    }
}

/// `T_n(c)`, `U_{n-1}(c)` and `U_{n-2}(c)` by the three-term recurrence.
#[derive(Debug, Clone, Copy)]
pub struct Chebyshev {
    pub t_n: Complex64,
    pub u_n1: Complex64,
    pub u_n2: Complex64,
}

pub fn chebyshev(n: usize, c: Complex64) -> Chebyshev {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    if n == 0 {
        // U_{-1} = 0, U_{-2} = -1.
        return Chebyshev {
            t_n: one,
            u_n1: zero,
            u_n2: -one,
        };
    }
    let (mut t_prev, mut t) = (one, c);
    let (mut u_prev, mut u) = (zero, one);
    for _ in 1..n {
        let t_next = 2.0 * c * t - t_prev;
        let u_next = 2.0 * c * u - u_prev;
        t_prev = t;
        t = t_next;
        u_prev = u;
        u = u_next;
    }
    Chebyshev {
        t_n: t,
        u_n1: u,
        u_n2: u_prev,
    }
}

/// Transfer matrix across one site with on-site energy `eps`.
pub fn single_site_matrix(eps: Complex64, energy: Complex64) -> Matrix2C {
    Matrix2C::new(
        eps - energy,
        Complex64::new(-1.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
    )
}

/// Unit cell: gain site followed by loss site.
pub fn unit_cell_matrix(spec: &ChainSpec, energy: Complex64) -> Matrix2C {
    let g = spec.gamma();
    let ig = Complex64::new(0.0, g);
    Matrix2C::new(
        energy * energy + g * g - 1.0,
        energy + ig,
        -energy + ig,
        Complex64::new(-1.0, 0.0),
    )
}

/// Half the unit-cell trace, `cos 2mu = (E^2 + gamma^2 - 2) / 2`.
pub fn half_trace(spec: &ChainSpec, energy: Complex64) -> Complex64 {
    (energy * energy + spec.gamma() * spec.gamma() - 2.0) / 2.0
}

pub fn n_cell_matrix(spec: &ChainSpec, energy: Complex64) -> Matrix2C {
    let cell = unit_cell_matrix(spec, energy);
    let ch = chebyshev(spec.n_cells(), half_trace(spec, energy));
    cell.scale(ch.u_n1)
        .sub(&Matrix2C::identity().scale(ch.u_n2))
}

/// Change of basis from site amplitudes to plane-wave amplitudes.
pub fn plane_wave_basis(k: Complex64) -> Matrix2C {
    let one = Complex64::new(1.0, 0.0);
    Matrix2C::new(one, one, (-I * k).exp(), (I * k).exp())
}

fn check_basis(k: Complex64) -> Result<Complex64> {
    let s = k.sin();
    if s.norm() < SINGULAR_BASIS_TOL {
        return Err(Error::SingularBasis { re: k.re, im: k.im });
    }
    Ok(s)
}

/// Plane-wave transfer matrix `Q^-1 M^N Q` in closed form.
pub fn plane_wave_transfer(spec: &ChainSpec, k: ComplexWavenumber) -> Result<Matrix2C> {
    let kc = k.as_complex();
    let sin_k = check_basis(kc)?;
    let m = closed_form(spec, kc, sin_k);
    #[cfg(debug_assertions)]
    {
        let product = product_form(spec, kc);
        let cond = (2.0 * kc.im.abs()).exp() / sin_k.norm();
        let scale = m.max_abs().max(1.0) * cond * spec.n_cells() as f64;
        debug_assert!(
            m.sub(&product).max_abs() <= 1e-10 * scale,
            "closed form and explicit product disagree at k = {kc}: {m:?} vs {product:?}"
        );
    }
    Ok(m)
}

fn closed_form(spec: &ChainSpec, k: Complex64, sin_k: Complex64) -> Matrix2C {
    let g = spec.gamma();
    let energy = -2.0 * k.cos();
    let c = half_trace(spec, energy);
    let ch = chebyshev(spec.n_cells(), c);
    let cot_k = k.cos() / sin_k;
    // tan(mu) sin(2N mu) = (1 - c) U_{N-1}(c)
    let odd = I * cot_k * (1.0 - c) * ch.u_n1;
    let two_sin = 2.0 * sin_k;
    let ig = Complex64::new(0.0, g);
    Matrix2C::new(
        ch.t_n + odd,
        ig * (I * k).exp() * (two_sin - g) / two_sin * ch.u_n1,
        ig * (-I * k).exp() * (two_sin + g) / two_sin * ch.u_n1,
        ch.t_n - odd,
    )
}

fn product_form(spec: &ChainSpec, k: Complex64) -> Matrix2C {
    let q = plane_wave_basis(k);
    let q_inv = q.inverse().expect("basis checked nonsingular");
    q_inv * n_cell_matrix(spec, -2.0 * k.cos()) * q
}

/// The same matrix by explicit multiplication `Q^-1 M^N Q`.
pub fn plane_wave_transfer_product(spec: &ChainSpec, k: ComplexWavenumber) -> Result<Matrix2C> {
    let kc = k.as_complex();
    check_basis(kc)?;
    Ok(product_form(spec, kc))
}

/// Closed form written with an explicit Bloch index `mu`.
///
/// The result is the same for `mu`, `-mu` and `mu + pi` whenever `mu`
/// satisfies `cos 2mu = (E^2 + gamma^2 - 2)/2`. Diverges at `sin 2mu = 0`;
/// prefer [`plane_wave_transfer`].
pub fn plane_wave_transfer_from_mu(
    spec: &ChainSpec,
    k: ComplexWavenumber,
    mu: Complex64,
) -> Result<Matrix2C> {
    let kc = k.as_complex();
    let sin_k = check_basis(kc)?;
    let g = spec.gamma();
    let n = spec.n_cells() as f64;
    let two_n_mu = 2.0 * n * mu;
    let ratio = two_n_mu.sin() / (2.0 * mu).sin();
    let cot_k = kc.cos() / sin_k;
    let odd = I * cot_k * mu.tan() * two_n_mu.sin();
    let two_sin = 2.0 * sin_k;
    let ig = Complex64::new(0.0, g);
    Ok(Matrix2C::new(
        two_n_mu.cos() + odd,
        ig * (I * kc).exp() * (two_sin - g) / two_sin * ratio,
        ig * (-I * kc).exp() * (two_sin + g) / two_sin * ratio,
        two_n_mu.cos() - odd,
    ))
}

/// Stationary scattering amplitudes at one real wavenumber.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatterResult {
    pub k: f64,
    pub energy: f64,
    pub t: Complex64,
    pub r_left: Complex64,
    pub r_right: Complex64,
    pub transmission: f64,
    pub reflection_left: f64,
    pub reflection_right: f64,
}

impl ScatterResult {
    /// `|T - 1| - sqrt(R_L R_R)`, zero for PT-symmetric scattering.
    pub fn conservation_defect(&self) -> f64 {
        (self.transmission - 1.0).abs() - (self.reflection_left * self.reflection_right).sqrt()
    }
}

/// Transmission from the closed-form expression
/// `T = 1 / (1 - gamma^2 sin^2(2N mu) / (4 sin^2 k cos^2 mu))`,
/// evaluated as `1 / (1 - gamma^2 (1 - c) U_{N-1}(c)^2 / (2 sin^2 k))`.
pub fn transmission_closed_form(spec: &ChainSpec, k: f64) -> f64 {
    let g = spec.gamma();
    let energy = -2.0 * k.cos();
    let c = (energy * energy + g * g - 2.0) / 2.0;
    let u = chebyshev(spec.n_cells(), Complex64::new(c, 0.0)).u_n1.re;
    let s = k.sin();
    1.0 / (1.0 - g * g * (1.0 - c) * u * u / (2.0 * s * s))
}

pub fn scatter(spec: &ChainSpec, k: f64) -> Result<ScatterResult> {
    if !(k > 0.0 && k < PI) {
        return Err(Error::OutOfRange {
            value: k,
            reason: "scattering wavenumber must lie in (0, pi)",
        });
    }
    let m = plane_wave_transfer(spec, ComplexWavenumber::real(k))?;
    let m22_abs = m.m22.norm();
    if m22_abs < SPECTRAL_SINGULARITY_TOL {
        return Err(Error::SpectralSingularity { k, m22_abs });
    }
    let t = 1.0 / m.m22;
    let r_left = -m.m21 / m.m22;
    let r_right = m.m12 / m.m22;
    let transmission = t.norm_sqr();
    debug_assert!({
        let closed = transmission_closed_form(spec, k);
        (closed - transmission).abs() <= 1e-9 * transmission.max(1.0) * (1.0 / m22_abs).max(1.0)
    });
    Ok(ScatterResult {
        k,
        energy: dispersion_energy(ComplexWavenumber::real(k)).re,
        t,
        r_left,
        r_right,
        transmission,
        reflection_left: r_left.norm_sqr(),
        reflection_right: r_right.norm_sqr(),
    })
}

/// [`scatter`] parameterized by a real energy in `(-2, 2)`.
pub fn scatter_energy(spec: &ChainSpec, energy: f64) -> Result<ScatterResult> {
    let k = wavenumber_for_energy(energy)?;
    let mut res = scatter(spec, k)?;
    res.energy = energy;
    Ok(res)
}
