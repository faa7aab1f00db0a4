use std::path::PathBuf;
use std::process::ExitCode;

use annulus_hardy::boundary::Circle;
use annulus_hardy::config::{Command, RunConfig};
use annulus_hardy::runner::{self, EXIT_CONFIG};
use clap::Parser;

/// Numerical experiments on the annulus {s < |z| < 1}.
#[derive(Debug, Parser)]
#[command(name = "annulus", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// `key = value` configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long, value_enum)]
    arc_circle: Option<Circle>,
    #[arg(long, allow_hyphen_values = true)]
    arc_start: Option<f64>,
    #[arg(long)]
    arc_len: Option<f64>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    modes: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    quad_points: Option<usize>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    t_list: Option<Vec<f64>>,
    #[arg(long)]
    q_mean: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    dq_amp: Option<f64>,
    #[arg(long)]
    dq_mode: Option<usize>,
    #[arg(long)]
    no_plot: bool,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

macro_rules! overlay {
    ($cfg:ident, $cli:ident, $($field:ident),*) => {
        $(if let Some(v) = $cli.$field { $cfg.$field = v; })*
    };
}

fn build_config(cli: Cli) -> Result<RunConfig, annulus_hardy::Error> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(cli.command, path)?,
        None => RunConfig::new(cli.command),
    };
    cfg.command = cli.command;
    overlay!(cfg, cli, s, arc_circle, arc_start, arc_len, n_max, k, modes, n, seed, samples, points, quad_points, nodes);
    overlay!(cfg, cli, t_list, q_mean, dq_amp, dq_mode, out_dir);
    if cli.tol.is_some() {
        cfg.tol = cli.tol;
    }
    if cli.no_plot {
        cfg.plot = false;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match build_config(cli) {
        Ok(cfg) => {
            let code = runner::run(&cfg);
            if let Ok(text) = std::fs::read_to_string(cfg.out_dir.join("summary.json")) {
                print!("{text}");
            }
            code
        }
        Err(e) => {
            eprintln!("annulus: {e}");
            EXIT_CONFIG
        }
    };
    ExitCode::from(code as u8)
}
