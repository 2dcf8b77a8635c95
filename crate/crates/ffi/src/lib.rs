//! C interface to `ptchain`.
//!
//! Every fallible function returns a [`PtStatus`]; on failure the message is
//! available from [`pt_last_error`] on the same thread. Handles are opaque
//! and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use ptchain::dynamics::{
    build_hamiltonian, evolve, gaussian_packet, intensity_split, prepare_propagator, LatticeLayout,
    PropagatorBundle,
};
use ptchain::model::{ChainSpec, ComplexWavenumber};
use ptchain::poles::{find_poles, gamma_critical, pole_residual, PoleClass, PoleRecord, Region};
use ptchain::relevance::{verdict, Regime};
use ptchain::scattering::scatter;
use ptchain::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    OutOfRange = 3,
    SingularBasis = 4,
    SpectralSingularity = 5,
    MissedRoots = 6,
    NonConvergence = 7,
    BranchLost = 8,
    DecompositionFailed = 9,
    InsufficientGrowth = 10,
    IndexOutOfBounds = 11,
    Panic = 99,
}

impl From<&Error> for PtStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParameter(_) => PtStatus::InvalidParameter,
            Error::SingularBasis { .. } => PtStatus::SingularBasis,
            Error::SpectralSingularity { .. } => PtStatus::SpectralSingularity,
            Error::MissedRoots { .. } => PtStatus::MissedRoots,
            Error::NonConvergence(_) => PtStatus::NonConvergence,
            Error::OutOfRange { .. } => PtStatus::OutOfRange,
            Error::BranchLost { .. } => PtStatus::BranchLost,
            Error::DecompositionFailed(_) => PtStatus::DecompositionFailed,
            Error::InsufficientGrowth { .. } => PtStatus::InsufficientGrowth,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtPoleClass {
    Tgbs = 0,
    DecayingBound = 1,
    LasingSingularity = 2,
    AbsorbingSingularity = 3,
    Resonance = 4,
}

impl From<PoleClass> for PtPoleClass {
    fn from(c: PoleClass) -> Self {
        match c {
            PoleClass::Tgbs => PtPoleClass::Tgbs,
            PoleClass::DecayingBound => PtPoleClass::DecayingBound,
            PoleClass::LasingSingularity => PtPoleClass::LasingSingularity,
            PoleClass::AbsorbingSingularity => PtPoleClass::AbsorbingSingularity,
            PoleClass::Resonance => PtPoleClass::Resonance,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtRegime {
    Relevant = 0,
    CriticalSingularity = 1,
    Unphysical = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PtScatter {
    pub k: f64,
    pub energy: f64,
    pub t_re: f64,
    pub t_im: f64,
    pub transmission: f64,
    pub reflection_left: f64,
    pub reflection_right: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PtPole {
    pub k_re: f64,
    pub k_im: f64,
    pub energy_re: f64,
    pub energy_im: f64,
    pub growth_rate: f64,
    pub residual: f64,
    pub kind: PtPoleClass,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PtVerdict {
    pub regime: PtRegime,
    pub gamma_critical: f64,
    pub tgbs_count: usize,
    pub margin: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PtIntensitySplit {
    pub reflected: f64,
    pub central: f64,
    pub transmitted: f64,
}

/// Poles found in one search.
pub struct PtPoleSet {
    poles: Vec<PoleRecord>,
}

/// A diagonalized finite lattice ready for time evolution.
pub struct PtPropagator {
    layout: LatticeLayout,
    bundle: PropagatorBundle,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard<F>(f: F) -> PtStatus
where
    F: FnOnce() -> Result<(), PtStatus>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PtStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("panic inside ptchain".into());
            PtStatus::Panic
        }
    }
}

fn fail(e: Error) -> PtStatus {
    let status = PtStatus::from(&e);
    set_error(e.to_string());
    status
}

unsafe fn out_ref<'a, T>(p: *mut T) -> Result<&'a mut T, PtStatus> {
    unsafe { p.as_mut() }.ok_or_else(|| {
        set_error("null output pointer".into());
        PtStatus::NullPointer
    })
}

unsafe fn in_ref<'a, T>(p: *const T) -> Result<&'a T, PtStatus> {
    unsafe { p.as_ref() }.ok_or_else(|| {
        set_error("null handle".into());
        PtStatus::NullPointer
    })
}

fn spec(n_cells: usize, gamma: f64) -> Result<ChainSpec, PtStatus> {
    ChainSpec::new(n_cells, gamma).map_err(fail)
}

/// Message for the last failure on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pt_gamma_critical(n_cells: usize, out: *mut f64) -> PtStatus {
    guard(|| {
        let out = out_ref(out)?;
        if n_cells == 0 {
            return Err(fail(Error::InvalidParameter(
                "n_cells must be at least 1".into(),
            )));
        }
        *out = gamma_critical(n_cells);
        Ok(())
    })
}

/// Stationary scattering at real wavenumber `k` in `(0, pi)`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pt_scatter(
    n_cells: usize,
    gamma: f64,
    k: f64,
    out: *mut PtScatter,
) -> PtStatus {
    guard(|| {
        let out = out_ref(out)?;
        let s = scatter(&spec(n_cells, gamma)?, k).map_err(fail)?;
        *out = PtScatter {
            k: s.k,
            energy: s.energy,
            t_re: s.t.re,
            t_im: s.t.im,
            transmission: s.transmission,
            reflection_left: s.reflection_left,
            reflection_right: s.reflection_right,
        };
        Ok(())
    })
}

/// `M22` at complex `k`; its zeros are the poles.
///
/// # Safety
/// `out_re` and `out_im` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pt_pole_residual(
    n_cells: usize,
    gamma: f64,
    k_re: f64,
    k_im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> PtStatus {
    guard(|| {
        let re = out_ref(out_re)?;
        let im = out_ref(out_im)?;
        let k = ComplexWavenumber::new(k_re, k_im);
        let m = pole_residual(&spec(n_cells, gamma)?, k).map_err(fail)?;
        *re = m.re;
        *im = m.im;
        Ok(())
    })
}

/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pt_verdict(n_cells: usize, gamma: f64, out: *mut PtVerdict) -> PtStatus {
    guard(|| {
        let out = out_ref(out)?;
        let v = verdict(&spec(n_cells, gamma)?);
        *out = PtVerdict {
            regime: match v.regime {
                Regime::Relevant => PtRegime::Relevant,
                Regime::CriticalSingularity => PtRegime::CriticalSingularity,
                Regime::Unphysical => PtRegime::Unphysical,
            },
            gamma_critical: v.gamma_critical,
            tgbs_count: v.tgbs_count,
            margin: v.margin,
        };
        Ok(())
    })
}

/// Find every pole in the rectangle. Free the result with [`pt_poles_free`].
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pt_poles_find(
    n_cells: usize,
    gamma: f64,
    re_min: f64,
    re_max: f64,
    im_min: f64,
    im_max: f64,
    grid_density: usize,
    out: *mut *mut PtPoleSet,
) -> PtStatus {
    guard(|| {
        let out = out_ref(out)?;
        *out = ptr::null_mut();
        let region = Region::new(re_min, re_max, im_min, im_max).map_err(fail)?;
        let poles = find_poles(&spec(n_cells, gamma)?, &region, grid_density).map_err(fail)?;
        *out = Box::into_raw(Box::new(PtPoleSet { poles }));
        Ok(())
    })
}

/// Number of poles in the set; 0 for null.
///
/// # Safety
/// `set` must be null or a live handle from [`pt_poles_find`].
#[no_mangle]
pub unsafe extern "C" fn pt_poles_len(set: *const PtPoleSet) -> usize {
    in_ref(set).map_or(0, |s| s.poles.len())
}

/// # Safety
/// `set` must be null or a live handle; `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pt_poles_get(
    set: *const PtPoleSet,
    index: usize,
    out: *mut PtPole,
) -> PtStatus {
    guard(|| {
        let set = in_ref(set)?;
        let out = out_ref(out)?;
        let p = set.poles.get(index).ok_or_else(|| {
            set_error(format!(
                "index {index} out of bounds for {} poles",
                set.poles.len()
            ));
            PtStatus::IndexOutOfBounds
        })?;
        *out = PtPole {
            k_re: p.k.re(),
            k_im: p.k.im(),
            energy_re: p.energy.re,
            energy_im: p.energy.im,
            growth_rate: p.growth_rate,
            residual: p.residual,
            kind: p.classification.into(),
        };
        Ok(())
    })
}

/// # Safety
/// `set` must be null or a handle from [`pt_poles_find`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pt_poles_free(set: *mut PtPoleSet) {
    if !set.is_null() {
        // SAFETY: the pointer came from `pt_poles_find` and is freed once.
        drop(unsafe { Box::from_raw(set) });
    }
}

/// Diagonalize a lattice of `total_sites` with the chain centered.
/// Free the result with [`pt_propagator_free`].
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pt_propagator_new(
    n_cells: usize,
    gamma: f64,
    total_sites: usize,
    out: *mut *mut PtPropagator,
) -> PtStatus {
    guard(|| {
        let out = out_ref(out)?;
        *out = ptr::null_mut();
        let spec = spec(n_cells, gamma)?;
        let layout = LatticeLayout::centered(total_sites, n_cells).map_err(fail)?;
        let h = build_hamiltonian(&layout, &spec).map_err(fail)?;
        let bundle = prepare_propagator(&h).map_err(fail)?;
        *out = Box::into_raw(Box::new(PtPropagator { layout, bundle }));
        Ok(())
    })
}

/// Eigenvalue with the largest imaginary part.
///
/// # Safety
/// `prop` must be null or a live handle; outputs null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pt_propagator_dominant(
    prop: *const PtPropagator,
    out_re: *mut f64,
    out_im: *mut f64,
) -> PtStatus {
    guard(|| {
        let p = in_ref(prop)?;
        let re = out_ref(out_re)?;
        let im = out_ref(out_im)?;
        let e: Complex64 = p.bundle.dominant_eigenvalue();
        *re = e.re;
        *im = e.im;
        Ok(())
    })
}

/// Evolve a Gaussian packet centered at `j0` (relative to the first chain
/// site) to time `t`. Writes `|psi_j|^2` for every site into `intensities`
/// when it is non-null and `len` covers the lattice, and the region split
/// into `split` when non-null.
///
/// # Safety
/// `prop` must be null or a live handle. `intensities` must be null or
/// valid for `len` writes; `split` null or valid for writes.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn pt_propagator_evolve_packet(
    prop: *const PtPropagator,
    j0: i64,
    sigma: f64,
    k0: f64,
    t: f64,
    intensities: *mut f64,
    len: usize,
    split: *mut PtIntensitySplit,
) -> PtStatus {
    guard(|| {
        let p = in_ref(prop)?;
        if t.is_nan() || t < 0.0 {
            return Err(fail(Error::OutOfRange {
                value: t,
                reason: "time must be nonnegative",
            }));
        }
        let psi0 = gaussian_packet(&p.layout, j0, sigma, k0).map_err(fail)?;
        let state = evolve(&p.bundle, &psi0, t);
        if !intensities.is_null() {
            let n = p.layout.total_sites;
            if len < n {
                set_error(format!("buffer holds {len} values, lattice has {n} sites"));
                return Err(PtStatus::IndexOutOfBounds);
            }
            // SAFETY: non-null and at least `len >= n` writable doubles.
            let buf = unsafe { std::slice::from_raw_parts_mut(intensities, n) };
            buf.copy_from_slice(&state.intensities());
        }
        if let Some(out) = unsafe { split.as_mut() } {
            let s = intensity_split(&state, &p.layout);
            *out = PtIntensitySplit {
                reflected: s.reflected,
                central: s.central,
                transmitted: s.transmitted,
            };
        }
        Ok(())
    })
}

/// Total lattice sites; 0 for null.
///
/// # Safety
/// `prop` must be null or a live handle from [`pt_propagator_new`].
#[no_mangle]
pub unsafe extern "C" fn pt_propagator_sites(prop: *const PtPropagator) -> usize {
    in_ref(prop).map_or(0, |p| p.layout.total_sites)
}

/// # Safety
/// `prop` must be null or a handle from [`pt_propagator_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pt_propagator_free(prop: *mut PtPropagator) {
    if !prop.is_null() {
        // SAFETY: the pointer came from `pt_propagator_new` and is freed once.
        drop(unsafe { Box::from_raw(prop) });
    }
}
