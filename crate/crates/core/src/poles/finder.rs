//! Grid-seeded Newton root finder for `M22`, audited by the argument principle.
//!
//! The requested rectangle is split so that a margin of [`EDGE_MARGIN`]
//! around `Re k = 0` and `Re k = +-pi` is never searched; `M22` has poles at
//! `sin k = 0` and the Hermitian-like states on those lines are not of
//! interest. On each remaining sub-rectangle:
//!
//! 1. `|M22|` is sampled on a uniform grid and every local minimum seeds a
//!    damped Newton iteration (central-difference derivative, step 1e-6).
//! 2. Converged roots are deduplicated within [`DEDUP_TOL`].
//! 3. The winding number of `M22` along the boundary is computed with
//!    adaptive refinement; if it exceeds the number of roots found, Newton is
//!    rerun on the deflated function `M22(k) / prod (k - r_i)` to recover
//!    clustered or multiple roots.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{m22_with_scale, PoleRecord};
use crate::error::{Error, Result};
use crate::model::ChainSpec;

/// Width of the excluded band around `Re k in {0, +-pi}`.
pub const EDGE_MARGIN: f64 = 1e-4;
/// Roots closer than this are the same root.
pub const DEDUP_TOL: f64 = 1e-8;
/// Required `|M22|` at a refined root.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Central-difference step for the Newton derivative.
pub const DERIVATIVE_STEP: f64 = 1e-6;

const MAX_NEWTON_ITER: usize = 80;
const MAX_NEWTON_STEP: f64 = 0.25;
/// Phase change per boundary segment above which the segment is bisected.
const MAX_SEGMENT_PHASE: f64 = PI / 4.0;
const MAX_BISECT_DEPTH: u32 = 48;
/// Residual relative to the summand scale below which cancellation has
/// exhausted double precision.
const RELATIVE_RESIDUAL_TOL: f64 = 1e-13;

/// Axis-aligned rectangle in the complex k plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Region {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let r = Self {
            re_min,
            re_max,
            im_min,
            im_max,
        };
        r.validate()?;
        Ok(r)
    }

    /// The whole strip `Re k in (-pi, pi]` between two heights.
    pub fn full_strip(im_min: f64, im_max: f64) -> Self {
        Self {
            re_min: -PI,
            re_max: PI,
            im_min,
            im_max,
        }
    }

    /// Square of half-width `half` centered on `center`.
    pub fn around(center: Complex64, half: f64) -> Self {
        Self {
            re_min: center.re - half,
            re_max: center.re + half,
            im_min: center.im - half,
            im_max: center.im + half,
        }
    }

    pub fn contains(&self, k: Complex64) -> bool {
        k.re >= self.re_min && k.re <= self.re_max && k.im >= self.im_min && k.im <= self.im_max
    }

    fn validate(&self) -> Result<()> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.re_min >= self.re_max || self.im_min >= self.im_max {
            return Err(Error::InvalidParameter(format!(
                "degenerate region {self:?}"
            )));
        }
        if self.re_min < -PI - 1e-12 || self.re_max > PI + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "region {self:?} leaves the strip Re k in (-pi, pi]"
            )));
        }
        Ok(())
    }

    /// Sub-rectangles that avoid the excluded bands.
    fn searchable_parts(&self) -> Vec<Region> {
        [
            (-PI + EDGE_MARGIN, -EDGE_MARGIN),
            (EDGE_MARGIN, PI - EDGE_MARGIN),
        ]
        .iter()
        .map(|&(a, b)| (a.max(self.re_min), b.min(self.re_max)))
        .filter(|(a, b)| b > a)
        .map(|(a, b)| Region {
            re_min: a,
            re_max: b,
            im_min: self.im_min,
            im_max: self.im_max,
        })
        .collect()
    }
}

struct Residual {
    n: usize,
    gamma: f64,
}

impl Residual {
    fn eval(&self, k: Complex64) -> Complex64 {
        m22_with_scale(self.n, self.gamma, k).0
    }

    fn accepts(&self, k: Complex64) -> bool {
        let (v, scale) = m22_with_scale(self.n, self.gamma, k);
        v.is_finite() && (v.norm() <= RESIDUAL_TOL || v.norm() <= RELATIVE_RESIDUAL_TOL * scale)
    }
}

/// Damped Newton iteration with a central-difference derivative.
fn newton<F: Fn(Complex64) -> Complex64>(f: &F, k0: Complex64) -> Option<Complex64> {
    let h = DERIVATIVE_STEP;
    let mut k = k0;
    let mut fk = f(k);
    if !fk.is_finite() {
        return None;
    }
    for _ in 0..MAX_NEWTON_ITER {
        if fk.norm() == 0.0 {
            return Some(k);
        }
        let d = (f(k + h) - f(k - h)) / (2.0 * h);
        if !d.is_finite() || d.norm() == 0.0 {
            return None;
        }
        let mut step = fk / d;
        if step.norm() > MAX_NEWTON_STEP {
            step *= MAX_NEWTON_STEP / step.norm();
        }
        let mut lambda = 1.0;
        let (mut kn, mut fnew) = (k - step, f(k - step));
        while !(fnew.is_finite() && fnew.norm() < fk.norm()) && lambda > 1e-4 {
            lambda *= 0.5;
            kn = k - step * lambda;
            fnew = f(kn);
        }
        if !fnew.is_finite() {
            return None;
        }
        let moved = (kn - k).norm();
        k = kn;
        fk = fnew;
        if moved <= 1e-15 * (1.0 + k.norm()) {
            break;
        }
    }
    Some(k)
}

/// Newton-refine `k0` on `M22`; `None` unless the result meets the residual test.
pub(crate) fn refine_root(spec: &ChainSpec, k0: Complex64) -> Option<Complex64> {
    let res = Residual {
        n: spec.n_cells(),
        gamma: spec.gamma(),
    };
    let k = newton(&|k| res.eval(k), k0)?;
    res.accepts(k).then_some(k)
}

/// Sample `|f|` on a grid and return the positions of local minima.
fn grid_minima<F: Fn(Complex64) -> Complex64 + Sync>(
    f: &F,
    rect: &Region,
    density: usize,
) -> Vec<Complex64> {
    let nx = ((rect.re_max - rect.re_min) * density as f64).ceil() as usize + 1;
    let ny = ((rect.im_max - rect.im_min) * density as f64).ceil() as usize + 1;
    let dx = (rect.re_max - rect.re_min) / (nx - 1).max(1) as f64;
    let dy = (rect.im_max - rect.im_min) / (ny - 1).max(1) as f64;
    let point = |i: usize, j: usize| {
        Complex64::new(rect.re_min + i as f64 * dx, rect.im_min + j as f64 * dy)
    };
    let values: Vec<f64> = (0..nx * ny)
        .into_par_iter()
        .map(|idx| {
            let v = f(point(idx % nx, idx / nx)).norm();
            if v.is_finite() {
                v
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let at = |i: usize, j: usize| values[j * nx + i];
    let mut minima = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let v = at(i, j);
            if !v.is_finite() {
                continue;
            }
            let mut is_min = true;
            'nb: for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let (ii, jj) = (i as i64 + di, j as i64 + dj);
                    if ii < 0 || jj < 0 || ii >= nx as i64 || jj >= ny as i64 {
                        continue;
                    }
                    if at(ii as usize, jj as usize) < v {
                        is_min = false;
                        break 'nb;
                    }
                }
            }
            if is_min {
                minima.push(point(i, j));
            }
        }
    }
    minima
}

/// Winding number of `f` along the counter-clockwise boundary of `rect`.
fn boundary_winding<F: Fn(Complex64) -> Complex64>(
    f: &F,
    rect: &Region,
    density: usize,
) -> Result<i64> {
    let corners = [
        Complex64::new(rect.re_min, rect.im_min),
        Complex64::new(rect.re_max, rect.im_min),
        Complex64::new(rect.re_max, rect.im_max),
        Complex64::new(rect.re_min, rect.im_max),
    ];
    let mut total = 0.0;
    for e in 0..4 {
        let (a, b) = (corners[e], corners[(e + 1) % 4]);
        let segments = (((b - a).norm() * 2.0 * density as f64).ceil() as usize).max(4);
        let mut za = a;
        let mut fa = f(za);
        for s in 1..=segments {
            let zb = a + (b - a) * (s as f64 / segments as f64);
            let fb = f(zb);
            total += segment_phase(f, za, zb, fa, fb, 0)?;
            za = zb;
            fa = fb;
        }
    }
    Ok((total / TAU).round() as i64)
}

fn segment_phase<F: Fn(Complex64) -> Complex64>(
    f: &F,
    za: Complex64,
    zb: Complex64,
    fa: Complex64,
    fb: Complex64,
    depth: u32,
) -> Result<f64> {
    if fa.norm() == 0.0 || fb.norm() == 0.0 || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::NonConvergence(format!(
            "M22 vanishes or is not finite on the search boundary near k = {za}"
        )));
    }
    let dphi = (fb / fa).arg();
    if dphi.abs() <= MAX_SEGMENT_PHASE || depth >= MAX_BISECT_DEPTH {
        return Ok(dphi);
    }
    let zm = (za + zb) * 0.5;
    let fm = f(zm);
    Ok(segment_phase(f, za, zm, fa, fm, depth + 1)? + segment_phase(f, zm, zb, fm, fb, depth + 1)?)
}

/// Argument-principle count of the zeros of `M22` inside `region`
/// (excluded bands removed).
pub fn winding_number(spec: &ChainSpec, region: &Region, grid_density: usize) -> Result<i64> {
    region.validate()?;
    let res = Residual {
        n: spec.n_cells(),
        gamma: spec.gamma(),
    };
    let f = |k: Complex64| res.eval(k);
    region
        .searchable_parts()
        .iter()
        .map(|part| boundary_winding(&f, part, grid_density))
        .sum()
}

fn push_unique(roots: &mut Vec<Complex64>, k: Complex64) -> bool {
    if roots.iter().any(|r| (r - k).norm() < DEDUP_TOL) {
        return false;
    }
    roots.push(k);
    true
}

fn search_part(res: &Residual, part: &Region, density: usize) -> Result<(Vec<Complex64>, i64)> {
    let f = |k: Complex64| res.eval(k);
    let winding = boundary_winding(&f, part, density)?;
    let seeds = grid_minima(&f, part, density);
    let candidates: Vec<Option<Complex64>> = seeds.par_iter().map(|&s| newton(&f, s)).collect();
    let mut roots = Vec::new();
    let mut failures = 0usize;
    for c in candidates {
        match c {
            Some(k) if part.contains(k) && res.accepts(k) => {
                push_unique(&mut roots, k);
            }
            Some(_) => {}
            None => failures += 1,
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    // Recover roots that share a grid cell with another root, including
    // multiple roots, by deflation.
    let mut stalled = 0;
    while (roots.len() as i64) < winding && stalled < 2 {
        let found = roots.clone();
        let deflated = |k: Complex64| found.iter().fold(f(k), |acc, r| acc / (k - r));
        let mut seeds = grid_minima(&deflated, part, density);
        seeds.extend(found.iter().map(|r| r + Complex64::new(1e-3, 1e-3)));
        let extra: Vec<Option<Complex64>> =
            seeds.par_iter().map(|&s| newton(&deflated, s)).collect();
        let before = roots.len();
        for k in extra.into_iter().flatten() {
            if roots.len() as i64 >= winding {
                break;
            }
            if part.contains(k) && res.accepts(k) {
                let fresh = !found.iter().any(|r| (r - k).norm() < DEDUP_TOL);
                let is_new = if fresh {
                    push_unique(&mut roots, k)
                } else {
                    // Deflation converged back onto a known root: a multiple root.
                    roots.push(k);
                    true
                };
                if is_new {
                    break;
                }
            }
        }
        if roots.len() == before {
            stalled += 1;
        }
    }

    if roots.is_empty() && winding > 0 && failures > 0 {
        return Err(Error::NonConvergence(format!(
            "all {failures} Newton seeds failed in {part:?} (winding number {winding})"
        )));
    }
    Ok((roots, winding))
}

/// Every zero of `M22` inside `region`, refined and classified.
///
/// `grid_density` is the number of seed points per unit length and must be at
/// least 50. Fails with [`Error::MissedRoots`] if the number of roots found
/// disagrees with the argument-principle count on the region boundary.
pub fn find_poles(
    spec: &ChainSpec,
    region: &Region,
    grid_density: usize,
) -> Result<Vec<PoleRecord>> {
    region.validate()?;
    if grid_density < 50 {
        return Err(Error::InvalidParameter(format!(
            "grid density must be at least 50 per unit length, got {grid_density}"
        )));
    }
    let res = Residual {
        n: spec.n_cells(),
        gamma: spec.gamma(),
    };
    let mut winding = 0i64;
    let mut roots = Vec::new();
    for part in region.searchable_parts() {
        let (r, w) = search_part(&res, &part, grid_density)?;
        winding += w;
        roots.extend(r);
    }
    if roots.len() as i64 != winding {
        return Err(Error::MissedRoots {
            found: roots.len(),
            winding,
        });
    }
    let mut poles: Vec<PoleRecord> = roots
        .into_iter()
        .map(|k| PoleRecord::with_residual(k, res.eval(k).norm()))
        .collect();
    poles.sort_by(|a, b| {
        a.k.re()
            .total_cmp(&b.k.re())
            .then(a.k.im().total_cmp(&b.k.im()))
    });
    Ok(poles)
}
