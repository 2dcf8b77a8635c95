//! Command-line front end. Every subcommand writes plot-ready CSV or JSON
//! and is deterministic for a given set of options.

mod commands;
mod output;
mod presets;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::poles::Region;

pub use output::{Records, SCHEMA_VERSION};
pub use presets::{preset, preset_names};

#[derive(Debug, Parser)]
#[command(
    name = "ptchain",
    version,
    about = "Scattering, S-matrix poles and wave-packet dynamics of a PT-symmetric chain"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Scatter,
    Poles,
    Threshold,
    Trajectory,
    Evolve,
    Relevance,
    Figure,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transmission and reflection on an energy, wavenumber or gain grid.
    Scatter(Options),
    /// All S-matrix poles in a rectangle of the complex k strip.
    Poles(Options),
    /// Critical gain and the threshold ladder per size.
    Threshold(Options),
    /// Pole trajectories over a gain sweep.
    Trajectory(Options),
    /// Wave-packet evolution on a finite lattice.
    Evolve(Options),
    /// Physical-relevance verdicts, special points and size sweeps.
    Relevance(Options),
    /// Run a named figure preset.
    Figure(Options),
}

impl Command {
    pub fn split(self) -> (CommandKind, Options) {
        match self {
            Command::Scatter(o) => (CommandKind::Scatter, o),
            Command::Poles(o) => (CommandKind::Poles, o),
            Command::Threshold(o) => (CommandKind::Threshold, o),
            Command::Trajectory(o) => (CommandKind::Trajectory, o),
            Command::Evolve(o) => (CommandKind::Evolve, o),
            Command::Relevance(o) => (CommandKind::Relevance, o),
            Command::Figure(o) => (CommandKind::Figure, o),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// Number of unit cells.
    #[arg(long)]
    pub n: Option<usize>,
    /// Largest number of unit cells for size sweeps.
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub e_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub e_max: Option<f64>,
    /// Number of grid points or continuation steps.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub k_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub k_max: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma_max: Option<f64>,
    /// Total lattice sites.
    #[arg(long)]
    pub l: Option<usize>,
    /// Packet center, relative to the first scattering site.
    #[arg(long, allow_hyphen_values = true)]
    pub j0: Option<i64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub k0: Option<f64>,
    /// Comma-separated snapshot times.
    #[arg(long, value_delimiter = ',')]
    pub times: Option<Vec<f64>>,
    /// Comma-separated energies for size sweeps.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub energies: Option<Vec<f64>>,
    /// RE_MIN,RE_MAX,IM_MIN,IM_MAX
    #[arg(long, value_parser = parse_region, allow_hyphen_values = true)]
    pub region: Option<Region>,
    #[arg(long)]
    pub grid_density: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file, or directory for `evolve`; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub preset: Option<String>,
    /// Include the full threshold ladder.
    #[arg(long)]
    pub ladder: bool,
    /// Append band-edge, Fabry-Perot and CPA-laser points.
    #[arg(long)]
    pub special_points: bool,
}

impl Options {
    /// Fill every unset field from `base`.
    pub fn over(self, base: Options) -> Options {
        Options {
            n: self.n.or(base.n),
            n_max: self.n_max.or(base.n_max),
            gamma: self.gamma.or(base.gamma),
            e_min: self.e_min.or(base.e_min),
            e_max: self.e_max.or(base.e_max),
            steps: self.steps.or(base.steps),
            k: self.k.or(base.k),
            k_min: self.k_min.or(base.k_min),
            k_max: self.k_max.or(base.k_max),
            gamma_min: self.gamma_min.or(base.gamma_min),
            gamma_max: self.gamma_max.or(base.gamma_max),
            l: self.l.or(base.l),
            j0: self.j0.or(base.j0),
            sigma: self.sigma.or(base.sigma),
            k0: self.k0.or(base.k0),
            times: self.times.or(base.times),
            energies: self.energies.or(base.energies),
            region: self.region.or(base.region),
            grid_density: self.grid_density.or(base.grid_density),
            format: self.format.or(base.format),
            out: self.out.or(base.out),
            preset: self.preset.or(base.preset),
            ladder: self.ladder || base.ladder,
            special_points: self.special_points || base.special_points,
        }
    }
}

fn parse_region(s: &str) -> Result<Region, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if v.len() != 4 {
        return Err(format!(
            "expected RE_MIN,RE_MAX,IM_MIN,IM_MAX, got {} values",
            v.len()
        ));
    }
    Region::new(v[0], v[1], v[2], v[3]).map_err(|e| e.to_string())
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    /// 2 for bad input, 3 for numerical failure, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(Error::InvalidParameter(_) | Error::OutOfRange { .. }) => 2,
            CliError::Compute(_) => 3,
            CliError::Io(_) | CliError::Output(_) => 1,
        }
    }
}

pub fn run(command: Command) -> Result<(), CliError> {
    let (kind, opts) = command.split();
    let (kind, opts) = match opts.preset.clone() {
        Some(name) => {
            let (preset_kind, base) = preset(&name).ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown preset {name:?}; available: {}",
                    preset_names().join(", ")
                ))
            })?;
            if kind != CommandKind::Figure && kind != preset_kind {
                return Err(CliError::Usage(format!(
                    "preset {name:?} belongs to the {preset_kind:?} subcommand"
                )));
            }
            (preset_kind, opts.over(base))
        }
        None if kind == CommandKind::Figure => {
            return Err(CliError::Usage(format!(
                "figure needs --preset; available: {}",
                preset_names().join(", ")
            )));
        }
        None => (kind, opts),
    };
    commands::dispatch(kind, &opts)
}
