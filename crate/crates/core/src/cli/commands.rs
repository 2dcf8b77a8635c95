use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use super::output::{num, Records};
use super::{CliError, CommandKind, Format, Options};
use crate::dynamics::{
    build_hamiltonian, evolve_many, gaussian_packet, growth_rate_fit, intensity_split,
    log_slope_rate, prepare_propagator, validity_horizon, LatticeLayout, WaveState,
};
use crate::error::Error;
use crate::model::{dispersion_energy, wavenumber_for_energy, ChainSpec, ComplexWavenumber};
use crate::poles::{
    critical_size, find_poles, threshold_ladder, trace_trajectories_with, PoleRecord, Region,
    TrajectoryOptions,
};
use crate::relevance::{
    band_edge_points, cpa_laser_points, fabry_perot_points, transmission_vs_size, verdict,
};
use crate::scattering::{scatter, ScatterResult};

const DEFAULT_E_MIN: f64 = -1.999;
const DEFAULT_E_MAX: f64 = 1.999;
const DEFAULT_GRID_STEPS: usize = 801;
const DEFAULT_POLE_DENSITY: usize = 50;
const MIN_CONVERGED_FRACTION: f64 = 0.9;
/// Growth fits use the total intensity on this window, sampled every
/// `FIT_SAMPLE_DT`.
const GROWTH_WINDOW: (f64, f64) = (100.0, 200.0);
const FLAT_WINDOW: (f64, f64) = (200.0, 400.0);
const FIT_SAMPLE_DT: f64 = 5.0;

pub(super) fn dispatch(kind: CommandKind, opts: &Options) -> Result<(), CliError> {
    match kind {
        CommandKind::Scatter => cmd_scatter(opts),
        CommandKind::Poles => cmd_poles(opts),
        CommandKind::Threshold => cmd_threshold(opts),
        CommandKind::Trajectory => cmd_trajectory(opts),
        CommandKind::Evolve => cmd_evolve(opts),
        CommandKind::Relevance => cmd_relevance(opts),
        CommandKind::Figure => unreachable!("figure resolves to a preset before dispatch"),
    }
}

fn require<T: Copy>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("missing required option --{flag}")))
}

fn linspace(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if steps == 0 {
        return Err(CliError::Usage("--steps must be at least 1".into()));
    }
    if !(lo <= hi) {
        return Err(CliError::Usage(format!("empty range [{lo}, {hi}]")));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    let h = (hi - lo) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            if i + 1 == steps {
                hi
            } else {
                lo + h * i as f64
            }
        })
        .collect())
}

fn complex_json(z: num_complex::Complex64) -> Value {
    json!({ "re": num(z.re), "im": num(z.im) })
}

fn cmd_scatter(o: &Options) -> Result<(), CliError> {
    let n = require(o.n, "n")?;
    let mut rec = Records::new(
        "scatter",
        &[
            "N", "gamma", "E", "k", "T", "R_L", "R_R", "physical", "singular",
        ],
    );
    let mut points: Vec<(f64, f64)> = Vec::new();
    match (o.gamma_min, o.gamma_max, o.k) {
        (Some(g0), Some(g1), Some(k)) => {
            for g in linspace(g0, g1, o.steps.unwrap_or(DEFAULT_GRID_STEPS))? {
                points.push((g, k));
            }
        }
        _ => {
            let g = require(o.gamma, "gamma")?;
            let ks = if let Some(k) = o.k {
                vec![k]
            } else if o.k_min.is_some() || o.k_max.is_some() {
                let lo = require(o.k_min, "k-min")?;
                let hi = require(o.k_max, "k-max")?;
                linspace(lo, hi, o.steps.unwrap_or(DEFAULT_GRID_STEPS))?
            } else {
                let lo = o.e_min.unwrap_or(DEFAULT_E_MIN);
                let hi = o.e_max.unwrap_or(DEFAULT_E_MAX);
                linspace(lo, hi, o.steps.unwrap_or(DEFAULT_GRID_STEPS))?
                    .into_iter()
                    .map(wavenumber_for_energy)
                    .collect::<Result<_, _>>()?
            };
            points.extend(ks.into_iter().map(|k| (g, k)));
        }
    }
    for (g, k) in points {
        let spec = ChainSpec::new(n, g)?;
        let physical = verdict(&spec).regime.is_physical();
        let energy = dispersion_energy(ComplexWavenumber::real(k)).re;
        let head = [json!(n), num(g), num(energy), num(k)];
        let row = match scatter(&spec, k) {
            Ok(ScatterResult {
                transmission,
                reflection_left,
                reflection_right,
                ..
            }) => {
                let mut r = head.to_vec();
                r.extend([
                    num(transmission),
                    num(reflection_left),
                    num(reflection_right),
                ]);
                r.extend([json!(physical), json!(false)]);
                r
            }
            Err(Error::SpectralSingularity { .. }) => {
                let mut r = head.to_vec();
                r.extend([
                    Value::Null,
                    Value::Null,
                    Value::Null,
                    json!(physical),
                    json!(true),
                ]);
                r
            }
            Err(e) => return Err(e.into()),
        };
        rec.push(row);
    }
    rec.write(o.format.unwrap_or(Format::Csv), o.out.as_deref())
}

fn pole_row(p: &PoleRecord) -> Vec<Value> {
    vec![
        num(p.k.re()),
        num(p.k.im()),
        num(p.energy.re),
        num(p.energy.im),
        json!(p.classification.as_str()),
        num(p.residual),
    ]
}

fn cmd_poles(o: &Options) -> Result<(), CliError> {
    let spec = ChainSpec::new(require(o.n, "n")?, require(o.gamma, "gamma")?)?;
    let region = o.region.unwrap_or_else(|| Region::full_strip(-1.5, 1.0));
    let density = o.grid_density.unwrap_or(DEFAULT_POLE_DENSITY);
    let poles = find_poles(&spec, &region, density)?;
    let mut rec = Records::new(
        "poles",
        &["k_re", "k_im", "E_re", "E_im", "class", "residual"],
    );
    for p in &poles {
        rec.push(pole_row(p));
    }
    rec.meta = Some(json!({
        "N": spec.n_cells(),
        "gamma": num(spec.gamma()),
        "region": region,
        "grid_density": density,
        "tgbs_count": crate::poles::tgbs_count(&spec),
    }));
    rec.write(o.format.unwrap_or(Format::Json), o.out.as_deref())
}

fn cmd_threshold(o: &Options) -> Result<(), CliError> {
    let sizes: Vec<usize> = match (o.n, o.n_max) {
        (Some(n), _) => vec![n],
        (None, Some(m)) => (1..=m).collect(),
        (None, None) => return Err(CliError::Usage("threshold needs --n or --n-max".into())),
    };
    let mut columns = vec!["N", "gamma_c", "gamma_c_scaled"];
    if o.ladder {
        columns.push("ladder");
    }
    let mut rec = Records::new("threshold", &columns);
    for n in sizes {
        let l = threshold_ladder(n)?;
        let mut row = vec![
            json!(n),
            num(l.gamma_critical),
            num(l.gamma_critical * 2.0 * n as f64 / PI),
        ];
        if o.ladder {
            row.push(Value::Array(
                l.gamma_values.iter().map(|&g| num(g)).collect(),
            ));
        }
        rec.push(row);
    }
    rec.write(o.format.unwrap_or(Format::Csv), o.out.as_deref())
}

fn cmd_trajectory(o: &Options) -> Result<(), CliError> {
    let n = require(o.n, "n")?;
    let g0 = o.gamma_min.unwrap_or(0.0);
    let g1 = o.gamma_max.unwrap_or(2.0);
    let mut topts = TrajectoryOptions::for_cells(n);
    if let Some(r) = o.region {
        topts.window = r;
    }
    if let Some(d) = o.grid_density {
        topts.grid_density = d;
    }
    let mut rec = Records::new(
        "trajectory",
        &["branch_id", "gamma", "k_re", "k_im", "class", "lost"],
    );
    let spec = ChainSpec::new(n, g0)?;
    if g0 == g1 {
        for (i, p) in find_poles(&spec, &topts.window, topts.grid_density)?
            .iter()
            .enumerate()
        {
            let mut row = vec![json!(i), num(g0)];
            row.extend(pole_row(p).into_iter().take(2));
            row.extend([json!(p.classification.as_str()), json!(false)]);
            rec.push(row);
        }
        rec.meta = Some(json!({ "N": n, "crossings": [], "convergence_ratio": 1.0 }));
        return rec.write(o.format.unwrap_or(Format::Csv), o.out.as_deref());
    }
    let traj = trace_trajectories_with(&spec, g0, g1, o.steps.unwrap_or(200), &topts)?;
    for b in &traj.branches {
        for p in &b.points {
            rec.push(vec![
                json!(b.id),
                num(p.gamma),
                num(p.pole.k.re()),
                num(p.pole.k.im()),
                json!(p.pole.classification.as_str()),
                json!(b.lost),
            ]);
        }
    }
    let ratio = traj.convergence_ratio();
    let crossings: Vec<Value> = traj
        .crossings
        .iter()
        .map(|c| json!({ "branch": c.branch, "gamma": num(c.gamma), "k": complex_json(c.k) }))
        .collect();
    rec.meta = Some(json!({
        "N": n,
        "crossings": crossings,
        "convergence_ratio": num(ratio),
        "positive_branches": traj.positive_branch_count(),
        "max_step": num(traj.max_step()),
    }));
    rec.write(o.format.unwrap_or(Format::Csv), o.out.as_deref())?;
    if ratio < MIN_CONVERGED_FRACTION {
        traj.ensure_complete()?;
    }
    Ok(())
}

fn sample_times(lo: f64, hi: f64) -> Vec<f64> {
    let steps = ((hi - lo) / FIT_SAMPLE_DT).round() as usize;
    (0..=steps)
        .map(|i| lo + (hi - lo) * i as f64 / steps.max(1) as f64)
        .collect()
}

fn cmd_evolve(o: &Options) -> Result<(), CliError> {
    let n = require(o.n, "n")?;
    let spec = ChainSpec::new(n, require(o.gamma, "gamma")?)?;
    let l = require(o.l, "l")?;
    let j0 = require(o.j0, "j0")?;
    let sigma = require(o.sigma, "sigma")?;
    let k0 = require(o.k0, "k0")?;
    let times = o
        .times
        .clone()
        .unwrap_or_else(|| vec![0.0, 60.0, 150.0, 225.0, 300.0]);
    if times.iter().any(|t| !(*t >= 0.0)) {
        return Err(CliError::Usage("--times must be nonnegative".into()));
    }

    let layout = LatticeLayout::centered(l, n)?;
    let horizon = validity_horizon(&layout, j0, k0);
    if let Some(t) = times.iter().copied().find(|&t| t > horizon) {
        log::warn!("t = {t} exceeds the boundary-validity horizon {horizon:.1}");
    }
    let h = build_hamiltonian(&layout, &spec)?;
    let bundle = prepare_propagator(&h)?;
    let psi0 = gaussian_packet(&layout, j0, sigma, k0)?;
    let snapshots = evolve_many(&bundle, &psi0, &times);

    let mut summary = Records::new(
        "evolve",
        &["t", "reflected", "central", "transmitted", "total"],
    );
    for s in &snapshots {
        let split = intensity_split(s, &layout);
        summary.push(vec![
            num(s.time),
            num(split.reflected),
            num(split.central),
            num(split.transmitted),
            num(split.total()),
        ]);
    }

    let rv = verdict(&spec);
    let growth_rate = if rv.tgbs_count > 0 {
        let ts = sample_times(GROWTH_WINDOW.0, GROWTH_WINDOW.1);
        let series: Vec<(f64, f64)> = evolve_many(&bundle, &psi0, &ts)
            .iter()
            .map(|s| (s.time, s.total_intensity()))
            .collect();
        growth_rate_fit(&series).ok()
    } else {
        None
    };
    let flat_end = FLAT_WINDOW.1.min(horizon);
    let central_log_slope = if flat_end > FLAT_WINDOW.0 {
        let ts = sample_times(FLAT_WINDOW.0, flat_end);
        let series: Vec<(f64, f64)> = evolve_many(&bundle, &psi0, &ts)
            .iter()
            .map(|s| (s.time, intensity_split(s, &layout).central))
            .collect();
        log_slope_rate(&series).ok()
    } else {
        None
    };
    summary.meta = Some(json!({
        "N": n,
        "gamma": num(spec.gamma()),
        "L": l,
        "j0": j0,
        "sigma": num(sigma),
        "k0": num(k0),
        "regime": rv.regime,
        "tgbs_count": rv.tgbs_count,
        "dominant_eigenvalue": complex_json(bundle.dominant_eigenvalue()),
        "growth_rate": growth_rate.map(num),
        "central_log_slope": central_log_slope.map(num),
        "validity_horizon": num(horizon),
        "condition_estimate": num(bundle.condition_estimate),
        "near_defective": bundle.near_defective,
    }));

    let format = o.format.unwrap_or(Format::Json);
    match o.out.as_deref() {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            for s in &snapshots {
                snapshot_records(s, &layout)
                    .write(Format::Csv, Some(&snapshot_path(dir, s.time)))?;
            }
            let ext = match format {
                Format::Json => "json",
                Format::Csv => "csv",
            };
            summary.write(format, Some(&dir.join(format!("summary.{ext}"))))
        }
        None => summary.write(format, None),
    }
}

fn snapshot_path(dir: &Path, t: f64) -> std::path::PathBuf {
    dir.join(format!("snapshot_t{t}.csv"))
}

fn snapshot_records(s: &WaveState, layout: &LatticeLayout) -> Records {
    let mut rec = Records::new("snapshot", &["j", "intensity"]);
    for (g, p) in s.intensities().into_iter().enumerate() {
        rec.push(vec![json!(layout.relative(g)), num(p)]);
    }
    rec
}

fn cmd_relevance(o: &Options) -> Result<(), CliError> {
    if let Some(energies) = &o.energies {
        return size_sweep(o, energies);
    }
    let sizes: Vec<usize> = match (o.n, o.n_max) {
        (Some(n), _) => vec![n],
        (None, Some(m)) => (1..=m).collect(),
        (None, None) => return Err(CliError::Usage("relevance needs --n or --n-max".into())),
    };
    let gammas = match (o.gamma, o.gamma_min, o.gamma_max) {
        (Some(g), _, _) => vec![g],
        (None, Some(a), Some(b)) => linspace(a, b, o.steps.unwrap_or(DEFAULT_GRID_STEPS))?,
        _ => {
            return Err(CliError::Usage(
                "relevance needs --gamma or a gamma range".into(),
            ))
        }
    };
    let mut rec = Records::new(
        "relevance",
        &["N", "gamma", "regime", "gamma_c", "tgbs_count", "margin"],
    );
    let mut special = Vec::new();
    for &n in &sizes {
        for &g in &gammas {
            let spec = ChainSpec::new(n, g)?;
            let v = verdict(&spec);
            rec.push(vec![
                json!(n),
                num(g),
                serde_json::to_value(v.regime).map_err(|e| CliError::Output(e.to_string()))?,
                num(v.gamma_critical),
                json!(v.tgbs_count),
                num(v.margin),
            ]);
            if o.special_points {
                special.extend(band_edge_points(&spec)?);
                special.extend(fabry_perot_points(&spec)?);
            }
        }
        if o.special_points {
            special.extend(cpa_laser_points(n)?);
        }
    }
    if o.special_points {
        rec.meta = Some(json!({ "special_points": special }));
    }
    rec.write(o.format.unwrap_or(Format::Json), o.out.as_deref())
}

fn size_sweep(o: &Options, energies: &[f64]) -> Result<(), CliError> {
    let gamma = require(o.gamma, "gamma")?;
    let n_max = o.n_max.unwrap_or(20);
    let mut rec = Records::new("size_sweep", &["E", "N", "T", "bloch_regime", "physical"]);
    let mut sweeps = Vec::new();
    for &e in energies {
        let sweep = transmission_vs_size(gamma, e, n_max)?;
        for row in &sweep.rows {
            rec.push(vec![
                num(e),
                json!(row.n_cells),
                num(row.transmission),
                serde_json::to_value(row.regime).map_err(|e| CliError::Output(e.to_string()))?,
                json!(row.physical),
            ]);
        }
        sweeps.push(json!({
            "E": num(e),
            "quasiperiod_measured": sweep.quasiperiod_measured.map(num),
            "quasiperiod_predicted": sweep.quasiperiod_predicted.map(num),
            "log_slope_measured": sweep.log_slope_measured.map(num),
            "log_slope_predicted": sweep.log_slope_predicted.map(num),
        }));
    }
    rec.meta = Some(json!({
        "gamma": num(gamma),
        "critical_size": critical_size(gamma)?,
        "sweeps": sweeps,
    }));
    rec.write(o.format.unwrap_or(Format::Json), o.out.as_deref())
}
