use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mzes::commands::{Backend, Fixture, RegionArg};
use mzes::config::{split_overrides, Format, RunConfig};
use mzes::Command;

/// Geometric phases of Majorana zero-energy states at an FI/TI/SC junction.
///
/// Any config key can be overridden as `--section.key value`, for example
/// `--model.mu_fi 0.3` or `--path.steps=500`.
#[derive(Debug, Parser)]
#[command(name = "mzes", version)]
struct Cli {
    /// Sectioned key = value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; `-` or absent writes to stdout.
    #[arg(long, global = true)]
    output: Option<String>,
    #[arg(long, global = true, value_parser = parse_format)]
    format: Option<Format>,
    /// Read every angle in the config and overrides as degrees.
    #[arg(long, global = true)]
    degrees: bool,
    #[command(subcommand)]
    command: Cmd,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// In-plane magnetization, internal phase and decay constants.
    DeriveParams,
    /// Accumulated electron, hole and total phases along the α path.
    LoopPhase {
        #[arg(long, value_enum, default_value = "analytic")]
        backend: Backend,
        /// Use one region's own decaying solution (analytic backend).
        #[arg(long, value_enum)]
        region: Option<RegionArg>,
    },
    /// Plaquette curvature on the `[curvature]` grid.
    CurvatureMap {
        #[arg(long, value_enum, default_value = "analytic")]
        backend: Backend,
        #[arg(long, value_enum)]
        fixture: Option<Fixture>,
    },
    /// Time evolution of the lattice zero mode around the path.
    Evolve,
    /// Run the acceptance suite.
    Validate,
}

fn threads() {
    if let Some(n) = std::env::var("MZM_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn load(cli: &Cli, overrides: &[(String, String)]) -> Result<RunConfig, String> {
    let mut cfg = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            RunConfig::parse(&text, cli.degrees)?
        }
        None => RunConfig::default(),
    };
    for (k, v) in overrides {
        cfg.set(k, v, cli.degrees)?;
    }
    if let Some(o) = &cli.output {
        cfg.output.path = o.clone();
    }
    if let Some(f) = cli.format {
        cfg.output.format = f;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let (args, overrides) = match split_overrides(std::env::args().collect()) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(args);
    threads();
    let cfg = match load(&cli, &overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    let cmd = match cli.command {
        Cmd::DeriveParams => Command::DeriveParams,
        Cmd::LoopPhase { backend, region } => Command::LoopPhase { backend, region },
        Cmd::CurvatureMap { backend, fixture } => Command::CurvatureMap { backend, fixture },
        Cmd::Evolve => Command::Evolve,
        Cmd::Validate => Command::Validate,
    };
    ExitCode::from(mzes::run(cmd, &cfg) as u8)
}
