//! Named configurations reproducing each published figure.

use std::f64::consts::{FRAC_PI_2, PI};

use super::{CommandKind, Format, Options};
use crate::poles::gamma_critical;

const NAMES: &[&str] = &[
    "fig2a", "fig2b", "fig2c", "fig2d", "fig2e", "fig2f", "fig2g", "fig2h", "fig2i", "fig3",
    "fig4", "fig5a", "fig5b", "fig5c", "fig5d", "fig5e", "fig5f", "fig6", "fig7a", "fig7b", "fig8",
    "identity",
];

pub fn preset_names() -> &'static [&'static str] {
    NAMES
}

fn fig2_gamma(panel: char) -> Option<f64> {
    Some(match panel {
        'a' => 0.3,
        'b' => gamma_critical(3),
        'c' => 0.7,
        'd' => 1.37,
        'e' => 2f64.sqrt(),
        'f' => 1.5,
        'g' => 1.9,
        'h' => (6f64.sqrt() + 2f64.sqrt()) / 2.0,
        'i' => 2.0,
        _ => return None,
    })
}

fn three_panel_gamma(panel: char) -> Option<f64> {
    match panel {
        'a' => Some(0.3),
        'b' => Some(gamma_critical(3)),
        'c' => Some(0.7),
        _ => None,
    }
}

/// Subcommand and base options for a named preset.
pub fn preset(name: &str) -> Option<(CommandKind, Options)> {
    let base = Options::default();
    let panel = name.chars().last().unwrap_or(' ');
    let opts = match name {
        _ if name.starts_with("fig2") && name.len() == 5 => (
            CommandKind::Poles,
            Options {
                n: Some(3),
                gamma: Some(fig2_gamma(panel)?),
                ..base
            },
        ),
        "fig3" => (
            CommandKind::Trajectory,
            Options {
                n: Some(3),
                gamma_min: Some(0.0),
                gamma_max: Some(2.0),
                steps: Some(200),
                ..base
            },
        ),
        "identity" => (
            CommandKind::Trajectory,
            Options {
                n: Some(3),
                gamma_min: Some(0.0),
                gamma_max: Some(0.0),
                ..base
            },
        ),
        "fig4" => (
            CommandKind::Threshold,
            Options {
                n_max: Some(50),
                ..base
            },
        ),
        "fig5a" | "fig5b" | "fig5c" => (
            CommandKind::Scatter,
            Options {
                n: Some(3),
                gamma: Some(three_panel_gamma(panel)?),
                k_min: Some(PI / 1000.0),
                k_max: Some(PI - PI / 1000.0),
                steps: Some(999),
                ..base
            },
        ),
        "fig5d" | "fig5e" | "fig5f" => {
            let sub = (b'a' + (panel as u8 - b'd')) as char;
            (
                CommandKind::Evolve,
                Options {
                    n: Some(3),
                    gamma: Some(three_panel_gamma(sub)?),
                    l: Some(1200),
                    j0: Some(-300),
                    sigma: Some(60.0),
                    k0: Some(FRAC_PI_2),
                    times: Some(vec![0.0, 60.0, 150.0, 225.0, 300.0]),
                    ..base
                },
            )
        }
        "fig6" => (
            CommandKind::Relevance,
            Options {
                gamma: Some(0.3),
                energies: Some(vec![1.93, (4.0f64 - 0.09).sqrt(), 1.98]),
                n_max: Some(20),
                format: Some(Format::Csv),
                ..base
            },
        ),
        "fig7a" | "fig7b" => (
            CommandKind::Scatter,
            Options {
                n: Some(if panel == 'a' { 1 } else { 2 }),
                gamma: Some(1.0),
                ..base
            },
        ),
        "fig8" => (
            CommandKind::Scatter,
            Options {
                n: Some(3),
                k: Some(FRAC_PI_2),
                gamma_min: Some(0.0),
                gamma_max: Some(2.0),
                steps: Some(2001),
                ..base
            },
        ),
        _ => return None,
    };
    Some(opts)
}
