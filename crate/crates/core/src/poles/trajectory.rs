//! Pole trajectories as the gain/loss strength is swept.
//!
//! Every gamma sample gets a complete root census from [`find_poles`]; roots
//! are then attached to existing branches by nearest-neighbour matching
//! against a secant prediction. A step whose matches move further than the
//! step bound is retried with half the increment, up to
//! [`TrajectoryOptions::max_halvings`] times. Roots that match no branch
//! start a new one: at `gamma = 0` there are no poles at all, and poles keep
//! entering the window from below and from the excluded strip edges.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::finder::{find_poles, refine_root, Region, EDGE_MARGIN};
use super::PoleRecord;
use crate::error::{Error, Result};
use crate::model::ChainSpec;

/// `|Im k|` below which a refined crossing is accepted.
const CROSSING_TOL: f64 = 1e-13;
const MAX_CROSSING_ITER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryOptions {
    pub window: Region,
    pub grid_density: usize,
    /// Largest accepted `|dk|` between consecutive points on a branch.
    pub step_bound: f64,
    /// Matches further than this from the prediction are never made.
    pub reject_distance: f64,
    pub max_halvings: u32,
    /// A branch that disappears within this distance of the window boundary
    /// or an excluded line has left the window rather than been lost.
    pub exit_margin: f64,
}

/// Depth below which the closed form for `M22` is dominated by rounding:
/// the true value decays like `exp(-2N |Im k|)` while its two summands grow
/// like `exp(2N |Im k|)`.
pub fn reliable_depth(n_cells: usize) -> f64 {
    (4.5 / n_cells as f64).min(3.0)
}

impl TrajectoryOptions {
    pub fn for_cells(n_cells: usize) -> Self {
        Self {
            window: Region::full_strip(-reliable_depth(n_cells), 1.5),
            ..Self::default()
        }
    }
}

impl Default for TrajectoryOptions {
    fn default() -> Self {
        Self {
            window: Region::full_strip(-1.5, 1.5),
            grid_density: 50,
            step_bound: 0.1,
            reject_distance: 0.3,
            max_halvings: 3,
            exit_margin: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub gamma: f64,
    pub pole: PoleRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub id: usize,
    pub points: Vec<TrajectoryPoint>,
    /// Continuation failed; `points` ends where tracking stopped.
    pub lost: bool,
}

impl Branch {
    fn last(&self) -> Complex64 {
        self.points
            .last()
            .map(|p| p.pole.k.as_complex())
            .unwrap_or_default()
    }

    fn predict(&self, gamma: f64) -> Complex64 {
        match self.points.as_slice() {
            [.., a, b] if b.gamma > a.gamma => {
                let (ka, kb) = (a.pole.k.as_complex(), b.pole.k.as_complex());
                kb + (kb - ka) * ((gamma - b.gamma) / (b.gamma - a.gamma))
            }
            _ => self.last(),
        }
    }

    /// Mean real part; decides which half of the strip the branch lives in.
    pub fn mean_re(&self) -> f64 {
        self.points.iter().map(|p| p.pole.k.re()).sum::<f64>() / self.points.len().max(1) as f64
    }
}

/// A branch passing through the real axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub branch: usize,
    pub gamma: f64,
    pub k: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub n_cells: usize,
    pub gamma_samples: Vec<f64>,
    pub branches: Vec<Branch>,
    pub crossings: Vec<Crossing>,
    pub step_bound: f64,
}

impl Trajectory {
    /// Fails with [`Error::BranchLost`] for the first lost branch.
    pub fn ensure_complete(&self) -> Result<()> {
        match self.branches.iter().find(|b| b.lost) {
            Some(b) => Err(Error::BranchLost {
                branch: b.id,
                gamma: b.points.last().map(|p| p.gamma).unwrap_or(f64::NAN),
            }),
            None => Ok(()),
        }
    }

    /// Fraction of branches tracked without loss.
    pub fn convergence_ratio(&self) -> f64 {
        if self.branches.is_empty() {
            return 1.0;
        }
        self.branches.iter().filter(|b| !b.lost).count() as f64 / self.branches.len() as f64
    }

    pub fn positive_branch_count(&self) -> usize {
        self.branches.iter().filter(|b| b.mean_re() > 0.0).count()
    }

    /// Largest `|dk|` between consecutive points of any branch.
    pub fn max_step(&self) -> f64 {
        self.branches
            .iter()
            .flat_map(|b| {
                b.points
                    .windows(2)
                    .map(|w| (w[1].pole.k.as_complex() - w[0].pole.k.as_complex()).norm())
            })
            .fold(0.0, f64::max)
    }
}

pub fn trace_trajectories(
    spec_base: &ChainSpec,
    gamma_min: f64,
    gamma_max: f64,
    steps: usize,
) -> Result<Trajectory> {
    let opts = TrajectoryOptions::for_cells(spec_base.n_cells());
    trace_trajectories_with(spec_base, gamma_min, gamma_max, steps, &opts)
}

struct StepOutcome {
    /// For each active branch, the index of its root (if any).
    assignment: Vec<Option<usize>>,
    clean: bool,
}

pub fn trace_trajectories_with(
    spec_base: &ChainSpec,
    gamma_min: f64,
    gamma_max: f64,
    steps: usize,
    opts: &TrajectoryOptions,
) -> Result<Trajectory> {
    if !(gamma_min >= 0.0) || !(gamma_max > gamma_min) || !gamma_max.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= gamma_min < gamma_max, got [{gamma_min}, {gamma_max}]"
        )));
    }
    if steps < 10 {
        return Err(Error::InvalidParameter(format!(
            "steps must be at least 10, got {steps}"
        )));
    }
    let census = |g: f64| -> Result<Vec<PoleRecord>> {
        find_poles(&spec_base.with_gamma(g)?, &opts.window, opts.grid_density)
    };

    let mut branches: Vec<Branch> = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    let mut crossings = Vec::new();
    let mut samples = vec![gamma_min];
    for pole in census(gamma_min)? {
        spawn(&mut branches, &mut active, gamma_min, pole);
    }

    let base_step = (gamma_max - gamma_min) / steps as f64;
    let mut gamma = gamma_min;
    while gamma < gamma_max - 1e-14 * gamma_max.max(1.0) {
        let mut dg = base_step.min(gamma_max - gamma);
        let mut halvings = 0;
        let (g_new, roots, outcome) = loop {
            let mut g_new = gamma + dg;
            if gamma_max - g_new < 1e-12 * base_step {
                g_new = gamma_max;
            }
            let attempt = census(g_new).map(|roots| {
                let outcome = match_roots(&branches, &active, &roots, g_new, opts);
                (roots, outcome)
            });
            match attempt {
                Ok((roots, outcome)) if outcome.clean || halvings >= opts.max_halvings => {
                    break (g_new, roots, outcome);
                }
                Err(e) if halvings >= opts.max_halvings => return Err(e),
                _ => {
                    dg *= 0.5;
                    halvings += 1;
                }
            }
        };

        let mut used = vec![false; roots.len()];
        let mut still_active = Vec::with_capacity(active.len());
        for (slot, &b) in active.iter().enumerate() {
            match outcome.assignment[slot] {
                Some(r) => {
                    used[r] = true;
                    let prev = branches[b]
                        .points
                        .last()
                        .copied()
                        .expect("branch has a point");
                    branches[b].points.push(TrajectoryPoint {
                        gamma: g_new,
                        pole: roots[r],
                    });
                    if let Some(c) = locate_crossing(spec_base, b, &prev, &roots[r], g_new) {
                        crossings.push(c);
                    }
                    still_active.push(b);
                }
                None => {
                    if !near_exit(branches[b].last(), &opts.window, opts.exit_margin) {
                        log::warn!("pole branch {b} lost near gamma = {g_new}");
                        branches[b].lost = true;
                    }
                }
            }
        }
        active = still_active;
        for (r, pole) in roots.into_iter().enumerate() {
            if !used[r] {
                spawn(&mut branches, &mut active, g_new, pole);
            }
        }
        samples.push(g_new);
        gamma = g_new;
    }

    crossings.sort_by(|a: &Crossing, b: &Crossing| a.gamma.total_cmp(&b.gamma));
    Ok(Trajectory {
        n_cells: spec_base.n_cells(),
        gamma_samples: samples,
        branches,
        crossings,
        step_bound: opts.step_bound,
    })
}

fn spawn(branches: &mut Vec<Branch>, active: &mut Vec<usize>, gamma: f64, pole: PoleRecord) {
    let id = branches.len();
    branches.push(Branch {
        id,
        points: vec![TrajectoryPoint { gamma, pole }],
        lost: false,
    });
    active.push(id);
}

fn near_exit(k: Complex64, window: &Region, margin: f64) -> bool {
    let to_edge = (k.im - window.im_min)
        .min(window.im_max - k.im)
        .min(k.re - window.re_min)
        .min(window.re_max - k.re);
    let to_line = [-PI, 0.0, PI]
        .iter()
        .map(|c| (k.re - c).abs())
        .fold(f64::INFINITY, f64::min);
    to_edge < margin || to_line < margin + EDGE_MARGIN
}

fn match_roots(
    branches: &[Branch],
    active: &[usize],
    roots: &[PoleRecord],
    gamma: f64,
    opts: &TrajectoryOptions,
) -> StepOutcome {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (slot, &b) in active.iter().enumerate() {
        let pred = branches[b].predict(gamma);
        for (r, root) in roots.iter().enumerate() {
            let d = (root.k.as_complex() - pred).norm();
            if d <= opts.reject_distance {
                pairs.push((d, slot, r));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut assignment = vec![None; active.len()];
    let mut taken = vec![false; roots.len()];
    for (_, slot, r) in pairs {
        if assignment[slot].is_none() && !taken[r] {
            assignment[slot] = Some(r);
            taken[r] = true;
        }
    }

    relabel_vertical_splits(branches, active, roots, &mut assignment, opts.step_bound);

    let clean = active
        .iter()
        .enumerate()
        .all(|(slot, &b)| match assignment[slot] {
            Some(r) => (roots[r].k.as_complex() - branches[b].last()).norm() <= opts.step_bound,
            None => near_exit(branches[b].last(), &opts.window, opts.exit_margin),
        });
    StepOutcome { assignment, clean }
}

/// Two branches that approached each other side by side and now sit one
/// above the other: the one coming from the left continues upward.
fn relabel_vertical_splits(
    branches: &[Branch],
    active: &[usize],
    roots: &[PoleRecord],
    assignment: &mut [Option<usize>],
    radius: f64,
) {
    for i in 0..active.len() {
        for j in (i + 1)..active.len() {
            let (Some(ri), Some(rj)) = (assignment[i], assignment[j]) else {
                continue;
            };
            let (pi, pj) = (branches[active[i]].last(), branches[active[j]].last());
            let before = pj - pi;
            if before.norm() > radius || before.re.abs() <= before.im.abs() {
                continue;
            }
            let (ki, kj) = (roots[ri].k.as_complex(), roots[rj].k.as_complex());
            let after = kj - ki;
            if after.re.abs() >= after.im.abs() {
                continue;
            }
            let i_from_left = pi.re < pj.re;
            let i_goes_up = ki.im > kj.im;
            if i_from_left != i_goes_up {
                assignment.swap(i, j);
            }
        }
    }
}

/// Refine the gamma at which a branch passes through `Im k = 0`, by
/// safeguarded secant on `Im k(gamma)` with Newton in `k` at each gamma.
fn locate_crossing(
    spec_base: &ChainSpec,
    branch: usize,
    prev: &TrajectoryPoint,
    next: &PoleRecord,
    g_next: f64,
) -> Option<Crossing> {
    let (k_a, k_b) = (prev.pole.k.as_complex(), next.k.as_complex());
    if k_a.im.abs() <= CROSSING_TOL {
        return None;
    }
    if k_b.im.abs() <= CROSSING_TOL {
        return Some(Crossing {
            branch,
            gamma: g_next,
            k: k_b,
        });
    }
    if k_a.im.signum() == k_b.im.signum() {
        return None;
    }
    let (mut ga, mut ka, mut gb, mut kb) = (prev.gamma, k_a, g_next, k_b);
    let mut last_side = 0i8;
    for _ in 0..MAX_CROSSING_ITER {
        // Illinois-modified regula falsi keeps the bracket.
        let (mut fa, mut fb) = (ka.im, kb.im);
        if last_side == -1 {
            fb *= 0.5;
        } else if last_side == 1 {
            fa *= 0.5;
        }
        let g = gb - fb * (gb - ga) / (fb - fa);
        let w = (g - ga) / (gb - ga);
        let guess = ka + (kb - ka) * w;
        let k = refine_root(&spec_base.with_gamma(g).ok()?, guess)?;
        if k.im.abs() <= CROSSING_TOL || (gb - ga).abs() <= 1e-15 {
            return Some(Crossing {
                branch,
                gamma: g,
                k,
            });
        }
        if k.im.signum() == ka.im.signum() {
            ga = g;
            ka = k;
            last_side = 1;
        } else {
            gb = g;
            kb = k;
            last_side = -1;
        }
    }
    log::warn!("crossing refinement for branch {branch} did not reach |Im k| < {CROSSING_TOL:e}");
    None
}
