//! Command-line front end for `mzes-core`: configuration, subcommands,
//! CSV/JSON output and the acceptance suite.

pub mod commands;
pub mod config;
pub mod output;
pub mod validate;

use std::io::Write;
use std::time::Instant;

use commands::{Backend, CliError, CliResult, Fixture, RegionArg};
use config::{Format, RunConfig};
use output::{fmt_g12, RunReport, Table};

/// Subcommand with its flags, after config resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    DeriveParams,
    LoopPhase { backend: Backend, region: Option<RegionArg> },
    CurvatureMap { backend: Backend, fixture: Option<Fixture> },
    Evolve,
    Validate,
}

/// Runs one command. Validation failures still return the report, paired
/// with [`CliError::ValidationFailed`].
pub fn execute(cmd: Command, cfg: &RunConfig) -> (CliResult<RunReport>, bool) {
    let r = match cmd {
        Command::DeriveParams => commands::derive_params(cfg),
        Command::LoopPhase { backend, region } => commands::loop_phase(cfg, backend, region),
        Command::CurvatureMap { backend, fixture } => commands::curvature_map(cfg, backend, fixture),
        Command::Evolve => commands::evolve_cmd(cfg),
        Command::Validate => {
            let outcomes = validate::run(cfg, |o| eprintln!("criterion {} done in {:.1}s", o.id, o.seconds));
            let ok = outcomes.iter().all(|o| o.pass);
            let mut t = Table::new(&["criterion", "pass", "seconds"]);
            for o in &outcomes {
                t.push(vec![o.id as f64, if o.pass { 1.0 } else { 0.0 }, o.seconds]);
            }
            let passed = outcomes.iter().filter(|o| o.pass).count();
            let rep = RunReport {
                command: "validate",
                config_echo: cfg.echo(),
                table: t,
                summary: vec![("passed", passed as f64), ("total", outcomes.len() as f64)],
                notes: outcomes.iter().map(|o| o.line()).collect(),
            };
            return (Ok(rep), ok);
        }
    };
    (r, true)
}

/// Writes the payload to the configured target and the summary to stderr.
/// Returns the process exit code.
pub fn run(cmd: Command, cfg: &RunConfig) -> i32 {
    let start = Instant::now();
    let (res, ok) = execute(cmd, cfg);
    let code = match res {
        Ok(rep) => {
            if let Err(e) = emit(&rep, cfg) {
                eprintln!("error: {e}");
                return 2;
            }
            eprintln!("{}", rep.summary_line());
            if ok {
                0
            } else {
                CliError::ValidationFailed.exit_code()
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    eprintln!("wall_time_s={} exit={}", fmt_g12(start.elapsed().as_secs_f64()), code);
    code
}

fn emit(rep: &RunReport, cfg: &RunConfig) -> std::io::Result<()> {
    let fmt = cfg.output.format;
    if cfg.output.path == "-" {
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        // the PASS/FAIL table is the readable form of the validate payload
        if rep.command == "validate" && fmt == Format::Csv {
            for l in &rep.notes {
                writeln!(lock, "{l}")?;
            }
            return lock.flush();
        }
        rep.write(fmt, &mut lock)?;
        lock.flush()
    } else {
        let f = std::fs::File::create(&cfg.output.path)?;
        let mut w = std::io::BufWriter::new(f);
        rep.write(fmt, &mut w)?;
        w.flush()
    }
}
