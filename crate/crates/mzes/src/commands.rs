//! One function per subcommand. Each returns a [`RunReport`] or a [`CliError`]
//! that knows its exit code.

use std::fmt;
use std::sync::Arc;

use clap::ValueEnum;
use rayon::prelude::*;

use mzes_core::bdg::{NambuSpinor, ParamPoint, Region, Sector};
use mzes_core::holonomy::{curvature, phase_from_spinors, ParamPath, PhaseResult, SpinorSampler};
use mzes_core::holonomy::{Level, TwoLevelFixture};
use mzes_core::junction::{default_grid, derived_params, AnalyticSampler, Restriction};
use mzes_core::lattice::{build_lattice, zero_mode_numeric, LatticeSampler, DEFAULT_TOL};
use mzes_core::nonadiabatic::{evolve, EvolveOptions, LatticeGenerator, Schedule};
use mzes_core::Error;

use crate::config::RunConfig;
use crate::output::{RunReport, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    Analytic,
    Lattice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegionArg {
    Fi,
    Sc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fixture {
    TwoLevel,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or flag combination.
    Config(String),
    Core(Error),
    Io(std::io::Error),
    /// `validate` ran and something failed.
    ValidationFailed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ValidationFailed => 1,
            CliError::Core(e) if e.is_numerical_guard() => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(s) => write!(f, "configuration error: {s}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::ValidationFailed => write!(f, "validation failed"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn report(command: &'static str, cfg: &RunConfig, table: Table, summary: Vec<(&'static str, f64)>) -> RunReport {
    RunReport { command, config_echo: cfg.echo(), table, summary, notes: Vec::new() }
}

pub fn derive_params(cfg: &RunConfig) -> CliResult<RunReport> {
    let d = derived_params(&cfg.params(), cfg.path.theta)?;
    let mut t = Table::new(&["theta", "m_par", "phi", "k_f", "k_sc", "k_msc", "k_m_fi"]);
    t.push(vec![cfg.path.theta, d.m_par, d.phi, d.k_f, d.k_sc, d.k_msc, d.k_m_fi]);
    let summary = vec![("m_par", d.m_par), ("phi", d.phi), ("k_f", d.k_f)];
    Ok(report("derive-params", cfg, t, summary))
}

/// The α path described by the `[path]` section with `steps` steps.
pub fn alpha_path(cfg: &RunConfig, steps: usize) -> CliResult<ParamPath> {
    let p = &cfg.path;
    if p.closed {
        let span = p.alpha_end - p.alpha_start;
        if (span - std::f64::consts::TAU).abs() > 1e-9 {
            return Err(CliError::Config(format!("a closed path must span 2π in α, got {span}")));
        }
        Ok(ParamPath::alpha_loop(p.theta, p.alpha_start, steps)?)
    } else if p.alpha_start == p.alpha_end {
        Ok(ParamPath::stationary(ParamPoint::new(p.theta, p.alpha_start)?)?)
    } else {
        Ok(ParamPath::alpha_segment(p.theta, p.alpha_start, p.alpha_end, steps)?)
    }
}

/// Samples the path points concurrently, in order.
pub fn sample_parallel<S: SpinorSampler + Sync>(sampler: &S, path: &ParamPath) -> CliResult<Vec<NambuSpinor>> {
    Ok(path.points().par_iter().map(|p| sampler.sample(p)).collect::<Result<Vec<_>, _>>()?)
}

pub fn loop_phase(cfg: &RunConfig, backend: Backend, region: Option<RegionArg>) -> CliResult<RunReport> {
    let params = cfg.params();
    // make the in-plane precondition fail with its own message
    derived_params(&params, cfg.path.theta)?;
    let (path, spinors) = match backend {
        Backend::Analytic => {
            let path = alpha_path(cfg, cfg.path.steps)?;
            let restriction = match region {
                None => Restriction::Junction,
                Some(RegionArg::Fi) => Restriction::Region(Region::Fi),
                Some(RegionArg::Sc) => Restriction::Region(Region::Sc),
            };
            let s = AnalyticSampler::at_theta(params, cfg.path.theta)?.restricted(restriction);
            let spinors = sample_parallel(&s, &path)?;
            (path, spinors)
        }
        Backend::Lattice => {
            if region.is_some() {
                return Err(CliError::Config("--region is only available with the analytic backend".into()));
            }
            let path = alpha_path(cfg, cfg.lattice.loop_steps)?;
            let s = LatticeSampler::new(params, cfg.lattice_spec())?;
            let spinors = sample_parallel(&s, &path)?;
            (path, spinors)
        }
    };
    if path.steps() == 0 {
        return Err(CliError::Config("loop-phase needs a path with distinct end points".into()));
    }
    let r = phase_from_spinors(&spinors, path.is_closed(), &Sector::ALL)?;
    Ok(loop_table(cfg, &path, &r))
}

fn loop_table(cfg: &RunConfig, path: &ParamPath, r: &PhaseResult) -> RunReport {
    let mut t = Table::new(&["alpha", "gamma_u_accum", "gamma_v_accum", "gamma_total_accum", "overlap_min"]);
    t.push(vec![path.points()[0].alpha, 0.0, 0.0, 0.0, 1.0]);
    let (u, v, f) = (r.accumulated(Sector::Electron), r.accumulated(Sector::Hole), r.accumulated(Sector::Full));
    let mut omin = 1.0f64;
    for k in 0..r.steps.len() {
        let m = r.steps[k].magnitude;
        omin = omin.min(m[0]).min(m[1]).min(m[2]);
        t.push(vec![path.segment(k).1.alpha, u[k], v[k], f[k], omin]);
    }
    let summary = vec![
        ("gamma_u", r.gamma_u),
        ("gamma_v", r.gamma_v),
        ("gamma_total", r.gamma_total),
        ("overlap_min", omin),
    ];
    report("loop-phase", cfg, t, summary)
}

/// Cell centres of the `[curvature]` grid; empty when the grid has no area.
pub fn curvature_points(cfg: &RunConfig) -> Vec<ParamPoint> {
    let c = &cfg.curvature;
    let (dt, da) = (c.theta_max - c.theta_min, c.alpha_max - c.alpha_min);
    if c.n_theta == 0 || c.n_alpha == 0 || dt == 0.0 || da == 0.0 {
        return Vec::new();
    }
    let mut pts = Vec::with_capacity(c.n_theta * c.n_alpha);
    for i in 0..c.n_theta {
        for j in 0..c.n_alpha {
            pts.push(ParamPoint {
                theta: c.theta_min + (i as f64 + 0.5) * dt / c.n_theta as f64,
                alpha: c.alpha_min + (j as f64 + 0.5) * da / c.n_alpha as f64,
            });
        }
    }
    pts
}

pub fn curvature_map(cfg: &RunConfig, backend: Backend, fixture: Option<Fixture>) -> CliResult<RunReport> {
    let c = &cfg.curvature;
    if c.theta_max < c.theta_min || c.alpha_max < c.alpha_min {
        return Err(CliError::Config("curvature bounds must be ordered".into()));
    }
    if !(c.delta > 0.0) {
        return Err(CliError::Config("curvature.delta must be positive".into()));
    }
    let pts = curvature_points(cfg);
    let mut t = Table::new(&["theta", "alpha", "b_u", "b_v", "b_total"]);
    if pts.is_empty() {
        return Ok(report("curvature-map", cfg, t, vec![("points", 0.0)]));
    }
    let sampler: Arc<dyn SpinorSampler + Send + Sync> = match (fixture, backend) {
        (Some(Fixture::TwoLevel), _) => Arc::new(TwoLevelFixture::new(Level::Lower)),
        (None, Backend::Analytic) => {
            let params = cfg.params();
            let h = c.delta;
            let grid = default_grid(&params, &[c.theta_min - h, c.theta_max + h])?;
            Arc::new(AnalyticSampler::new(params, grid)?)
        }
        (None, Backend::Lattice) => Arc::new(LatticeSampler::new(cfg.params(), cfg.lattice_spec())?),
    };
    let rows = pts
        .par_iter()
        .map(|p| curvature(&*sampler, p, c.delta).map(|b| vec![p.theta, p.alpha, b.b_u, b.b_v, b.b_total]))
        .collect::<Result<Vec<_>, _>>()?;
    let max_abs = rows.iter().map(|r| r[2].abs().max(r[3].abs())).fold(0.0, f64::max);
    t.rows = rows;
    Ok(report("curvature-map", cfg, t, vec![("points", pts.len() as f64), ("max_abs_b", max_abs)]))
}

pub fn evolve_cmd(cfg: &RunConfig) -> CliResult<RunReport> {
    let params = cfg.params();
    let spec = cfg.lattice_spec();
    let path = alpha_path(cfg, cfg.path.steps)?;
    let start = path.points()[0];
    let psi0 = zero_mode_numeric(&build_lattice(&params, &start, &spec)?, DEFAULT_TOL * params.delta)?.spinor;
    let sched = Schedule::new(path, cfg.evolve.total_time, cfg.evolve.steps)?;
    let gen = LatticeGenerator::new(params, spec)?;
    let r = evolve(&gen, &psi0, &sched, &EvolveOptions { record_every: 1 })?;
    let mut t = Table::new(&["t", "norm", "phi_u_running", "phi_v_running", "overlap_mag"]);
    t.push(vec![0.0, psi0.norm(), 0.0, 0.0, 1.0]);
    for s in &r.series {
        t.push(vec![s.t, s.norm, s.phi_u, s.phi_v, s.overlap_mag]);
    }
    let summary = vec![
        ("phi_u", r.phi_u),
        ("phi_v", r.phi_v),
        ("phi_total", r.phi_total),
        ("overlap_mag", r.overlap_mag),
        ("overlap_u_mag", r.overlap_u_mag),
        ("overlap_v_mag", r.overlap_v_mag),
        ("unitarity_drift", r.unitarity_drift),
    ];
    Ok(report("evolve", cfg, t, summary))
}
