//! The acceptance suite behind `mzes validate`.
//!
//! Criteria run at the point described by the configuration. When that point
//! has no bound state, the criteria that need one report the precondition
//! error as an expected outcome.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use mzes_core::bdg::{majorana_residual, ModelParams, NambuSpinor, ParamPoint, Region, Sector};
use mzes_core::holonomy::{
    curvature, gauge_transform, line_integral_phase, loop_phases, phase_from_spinors, stokes_check, Level,
    ParamPath, Patch, PhaseResult, SpinorSampler, StokesOptions, TwoLevelFixture,
};
use mzes_core::junction::{default_grid, derived_params, match_interface, AnalyticSampler, Restriction};
use mzes_core::lattice::{build_lattice, zero_mode_numeric, LatticeSampler, LatticeSpec, DEFAULT_TOL};
use mzes_core::math::wrap_phase;
use mzes_core::nonadiabatic::{evolve, rotating_frame_reference, EvolveOptions, LatticeGenerator, Schedule};
use mzes_core::{Error, Result};

use crate::commands::sample_parallel;
use crate::config::RunConfig;
use crate::output::fmt_g12;

/// Seed for the random loops and gauges.
pub const SEED: u64 = 0x6d7a_6573;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        format!("{tag} {:>2} {}: {}", self.id, self.name, self.detail)
    }
}

fn g(x: f64) -> String {
    fmt_g12(x)
}

/// Looks states up by exact parameter point; used to apply many gauges to one
/// sampled loop without re-solving the matching.
struct Tabulated(HashMap<(u64, u64), NambuSpinor>);

impl Tabulated {
    fn new(path: &ParamPath, spinors: &[NambuSpinor]) -> Self {
        Self(path.points().iter().zip(spinors).map(|(p, s)| ((p.theta.to_bits(), p.alpha.to_bits()), s.clone())).collect())
    }
}

impl SpinorSampler for Tabulated {
    fn sample(&self, p: &ParamPoint) -> Result<NambuSpinor> {
        self.0
            .get(&(p.theta.to_bits(), p.alpha.to_bits()))
            .cloned()
            .ok_or_else(|| Error::InvalidParameter("point not tabulated".into()))
    }
}

fn loop_on<S: SpinorSampler + Sync>(s: &S, path: &ParamPath) -> Result<(PhaseResult, Vec<NambuSpinor>)> {
    let spinors = sample_parallel(s, path).map_err(|e| match e {
        crate::commands::CliError::Core(e) => e,
        other => Error::InvalidParameter(other.to_string()),
    })?;
    Ok((phase_from_spinors(&spinors, path.is_closed(), &Sector::ALL)?, spinors))
}

struct Suite<'a> {
    cfg: &'a RunConfig,
    params: ModelParams,
    theta: f64,
    alpha0: f64,
    /// `|γ_u + γ_v|` of every Majorana-sampler loop seen so far.
    antisym: Vec<(&'static str, f64)>,
    /// Whether the configured point has a bound state.
    admissible: std::result::Result<(), Error>,
}

type Check = Result<(bool, String)>;

impl Suite<'_> {
    fn fi_loop(&mut self) -> Check {
        self.admissible.clone()?;
        let s = AnalyticSampler::at_theta(self.params, self.theta)?;
        let path = ParamPath::alpha_loop(self.theta, self.alpha0, self.cfg.path.steps)?;
        let t = Instant::now();
        let (r, _) = loop_on(&s, &path)?;
        let secs = t.elapsed().as_secs_f64();
        self.antisym.push(("fi loop", (r.gamma_u + r.gamma_v).abs()));
        let pass = (r.gamma_u - PI).abs() < 1e-3 && (r.gamma_v + PI).abs() < 1e-3 && secs < 5.0;
        Ok((pass, format!("gamma_u={} gamma_v={} steps={} in {:.2}s", g(r.gamma_u), g(r.gamma_v), path.steps(), secs)))
    }

    fn sc_region(&mut self) -> Check {
        self.admissible.clone()?;
        let path = ParamPath::alpha_loop(self.theta, self.alpha0, self.cfg.path.steps)?;
        let base = AnalyticSampler::at_theta(self.params, self.theta)?;
        let (r, _) = loop_on(&base.clone().restricted(Restriction::Region(Region::Sc)), &path)?;
        self.antisym.push(("sc region", (r.gamma_u + r.gamma_v).abs()));
        let (slice, _) = loop_on(&base.restricted(Restriction::MatchedSlice(Region::Sc)), &path)?;
        let pass = r.gamma_u.abs() < 1e-6 && r.gamma_v.abs() < 1e-6;
        Ok((
            pass,
            format!(
                "gamma_u={} gamma_v={} (matched state cut to x>0: gamma_u={})",
                g(r.gamma_u),
                g(r.gamma_v),
                g(slice.gamma_u)
            ),
        ))
    }

    fn random_loops(&mut self) -> Check {
        let p = self.params;
        if p.m <= p.mu_fi.abs() * (1.0 + 1e-9) {
            return Err(Error::EvanescentConditionViolated { m_par: p.m, mu_fi: p.mu_fi });
        }
        // keep m sinθ ≥ |μ_F| + 10% of the margin
        let lo = ((p.mu_fi.abs() + 0.1 * (p.m - p.mu_fi.abs())) / p.m).asin();
        let (t0, t1) = (lo, PI - lo);
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let mut worst: f64 = 0.0;
        let steps = 240;
        for i in 0..20 {
            let rt = rng.random_range(0.02..0.25) * (t1 - t0);
            let tc = rng.random_range(t0 + rt..t1 - rt);
            let ac = rng.random_range(0.0..TAU);
            let ra = rng.random_range(0.1..1.5);
            let winding = if i % 2 == 0 { 1.0 } else { 0.0 };
            let ph = rng.random_range(0.0..TAU);
            let at = |s: f64| ParamPoint {
                theta: tc + rt * (TAU * s + ph).sin(),
                alpha: ac + ra * (TAU * s).cos() + winding * TAU * s,
            };
            let pts: Vec<ParamPoint> = (0..steps).map(|k| at(k as f64 / steps as f64)).collect();
            let path = ParamPath::closed_via(pts, at(1.0))?;
            let grid = default_grid(&p, &[tc - rt, tc + rt])?;
            let s = AnalyticSampler::new(p, grid)?;
            let (r, _) = loop_on(&s, &path)?;
            self.antisym.push(("random loop", (r.gamma_u + r.gamma_v).abs()));
            worst = worst.max(r.gamma_total.abs());
        }
        Ok((worst < 1e-6, format!("max |gamma_total| over 20 loops = {}", g(worst))))
    }

    fn antisymmetry(&self) -> Check {
        if self.antisym.is_empty() {
            self.admissible.clone()?;
        }
        let worst = self.antisym.iter().map(|(_, d)| *d).fold(0.0, f64::max);
        let pass = !self.antisym.is_empty() && worst < 1e-10;
        Ok((pass, format!("max |gamma_u + gamma_v| over {} loops = {}", self.antisym.len(), g(worst))))
    }

    fn lattice(&mut self) -> Check {
        self.admissible.clone()?;
        let spec = self.cfg.lattice_spec();
        let t = Instant::now();
        let s = LatticeSampler::new(self.params, spec)?;
        let e0 = s.energy(self.theta)?;
        let path = ParamPath::alpha_loop(self.theta, self.alpha0, self.cfg.lattice.loop_steps)?;
        let (r, _) = loop_on(&s, &path)?;
        let secs = t.elapsed().as_secs_f64();
        self.antisym.push(("lattice loop", (r.gamma_u + r.gamma_v).abs()));
        let pass = (r.gamma_u - PI).abs() < 1e-2
            && (r.gamma_v + PI).abs() < 1e-2
            && e0 < 1e-4 * self.params.delta
            && secs < 120.0;
        Ok((
            pass,
            format!(
                "gamma_u={} gamma_v={} |E0|={} sites={} in {:.1}s",
                g(r.gamma_u),
                g(r.gamma_v),
                g(e0),
                spec.n_sites,
                secs
            ),
        ))
    }

    fn gauges(&mut self) -> Check {
        self.admissible.clone()?;
        let s = AnalyticSampler::at_theta(self.params, self.theta)?;
        let path = ParamPath::alpha_loop(self.theta, self.alpha0, 400)?;
        let (base, spinors) = loop_on(&s, &path)?;
        let table = Tabulated::new(&path, &spinors);
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x9a);
        let mut worst: f64 = 0.0;
        for i in 0..10 {
            let r = if i == 0 {
                loop_phases(&gauge_transform(&table, |p: &ParamPoint| p.alpha), &path)?
            } else {
                let c: Vec<f64> = (0..8).map(|_| rng.random_range(-1.5..1.5)).collect();
                let f = move |p: &ParamPoint| {
                    c[0] + c[1] * p.theta.sin()
                        + c[2] * p.alpha.cos()
                        + c[3] * p.alpha.sin()
                        + c[4] * (2.0 * p.alpha).cos()
                        + c[5] * (2.0 * p.alpha).sin()
                        + c[6] * (3.0 * p.alpha + c[7]).cos()
                };
                loop_phases(&gauge_transform(&table, f), &path)?
            };
            for sec in Sector::ALL {
                worst = worst.max(wrap_phase(r.gamma(sec) - base.gamma(sec)).abs());
            }
        }
        Ok((worst < 1e-8, format!("max wrapped drift over 10 gauges (one winding) = {}", g(worst))))
    }

    fn two_level(&self) -> Check {
        let f = TwoLevelFixture::new(Level::Lower);
        let mut worst: f64 = 0.0;
        for theta in [PI / 6.0, PI / 3.0, FRAC_PI_2] {
            let b = curvature(&f, &ParamPoint::new(theta, 0.4)?, 1e-3)?;
            worst = worst.max((b.b_u + 0.5 * theta.sin()).abs());
        }
        let rep = stokes_check(&f, &Patch::square(PI / 3.0, 1.0, 0.1), Sector::Electron, &StokesOptions::default())?;
        let pass = worst < 1e-4 && rep.discrepancy < 1e-4;
        Ok((pass, format!("max |B + sin(theta)/2| = {} stokes discrepancy = {}", g(worst), g(rep.discrepancy))))
    }

    fn flat(&self) -> Check {
        self.admissible.clone()?;
        let p = self.params;
        derived_params(&p, self.theta)?;
        // interior of the admissible band around the configured θ
        let lo = (p.mu_fi.abs() / p.m).asin();
        let half = 0.3f64.min(0.5 * (self.theta.min(PI - self.theta) - lo).max(0.0));
        let thetas: Vec<f64> = (0..4).map(|i| self.theta - half + 2.0 * half * (i as f64 + 0.5) / 4.0).collect();
        let alphas: Vec<f64> = (0..4).map(|j| 0.5 + 5.0 * (j as f64 + 0.5) / 4.0).collect();
        let delta = self.cfg.curvature.delta;
        let grid = default_grid(&p, &[self.theta - half - delta, self.theta + half + delta])?;
        let s = AnalyticSampler::new(p, grid)?;
        let pts: Vec<ParamPoint> = thetas.iter().flat_map(|&t| alphas.iter().map(move |&a| ParamPoint { theta: t, alpha: a })).collect();
        let bs = pts.par_iter().map(|q| curvature(&s, q, delta).map(|b| b.b_u.abs())).collect::<Result<Vec<_>>>()?;
        let worst = bs.iter().copied().fold(0.0, f64::max);
        let (r, _) = loop_on(&s, &ParamPath::alpha_loop(self.theta, self.alpha0, 200)?)?;
        let pass = worst < 1e-5 && (r.gamma_u - PI).abs() < 1e-3;
        Ok((pass, format!("max |B_u| on {} points = {} with loop gamma_u={}", pts.len(), g(worst), g(r.gamma_u))))
    }

    fn psi0(&self, spec: &LatticeSpec, start: &ParamPoint) -> Result<NambuSpinor> {
        let h = build_lattice(&self.params, start, spec)?;
        Ok(zero_mode_numeric(&h, DEFAULT_TOL * self.params.delta)?.spinor)
    }

    fn adiabatic(&self) -> Check {
        self.admissible.clone()?;
        let t = Instant::now();
        let spec = self.cfg.lattice_spec();
        let start = ParamPoint::new(self.theta, self.alpha0)?;
        let psi0 = self.psi0(&spec, &start)?;
        let gen = LatticeGenerator::new(self.params, spec)?;
        let eps = self.cfg.evolve.total_time / self.cfg.evolve.steps as f64;
        let mut errs = Vec::new();
        let mut drift: f64 = 0.0;
        for total in [50.0, 200.0, 800.0] {
            let n = (total / eps).round().max(10.0) as usize;
            let sched = Schedule::new(ParamPath::alpha_loop(self.theta, self.alpha0, self.cfg.path.steps)?, total, n)?;
            let r = evolve(&gen, &psi0, &sched, &EvolveOptions::default())?;
            errs.push(wrap_phase(r.phi_u - PI).abs());
            drift = drift.max(r.unitarity_drift);
        }
        let secs = t.elapsed().as_secs_f64();
        let pass = errs[0] > errs[1] && errs[1] > errs[2] && errs[2] < 0.05 && drift < 1e-10 && secs < 300.0;
        Ok((
            pass,
            format!(
                "|phi_u - pi| at T=50,200,800: {}, {}, {} drift={} in {:.1}s",
                g(errs[0]),
                g(errs[1]),
                g(errs[2]),
                g(drift),
                secs
            ),
        ))
    }

    fn bound_states(&self) -> Check {
        let mut pts = Vec::new();
        for mu in [-0.3, 0.0, 0.4] {
            for theta in [PI / 3.0, FRAC_PI_2, 2.0 * PI / 3.0] {
                for alpha in [0.0, 2.1, 4.2] {
                    pts.push((mu, ParamPoint::new(theta, alpha)?));
                }
            }
        }
        let rows = pts
            .par_iter()
            .map(|(mu, q)| {
                let p = ModelParams { mu_fi: *mu, ..self.params };
                let b = match_interface(&p, q)?;
                let target = q.alpha + b.derived.phi;
                let mut lock: f64 = 0.0;
                for (x, s) in b.spinor.grid().positions().iter().zip(b.spinor.values()) {
                    if *x < 0.0 {
                        lock = lock.max(wrap_phase((s[1] / s[0]).arg() - target).abs());
                    }
                }
                Ok((majorana_residual(&b.spinor), lock))
            })
            .collect::<Result<Vec<_>>>()?;
        let res = rows.iter().map(|r| r.0).fold(0.0, f64::max);
        let lock = rows.iter().map(|r| r.1).fold(0.0, f64::max);
        let pass = res < 1e-8 && lock < 1e-8;
        Ok((pass, format!("{} points: max residual={} max phase-lock error={}", rows.len(), g(res), g(lock))))
    }

    fn step_sizes(&self) -> Check {
        self.admissible.clone()?;
        let s = AnalyticSampler::at_theta(self.params, self.theta)?;
        let n = self.cfg.path.steps;
        let err = |steps| -> Result<f64> {
            let path = ParamPath::alpha_loop(self.theta, self.alpha0, steps)?;
            Ok((line_integral_phase(&s, &path, Sector::Electron)? - PI).abs())
        };
        let loop_ratio = err(n)? / err(2 * n)?;
        let spec = self.cfg.lattice_spec();
        let start = ParamPoint::new(self.theta, self.alpha0)?;
        let psi0 = self.psi0(&spec, &start)?;
        let gen = LatticeGenerator::new(self.params, spec)?;
        let total = 50.0;
        let exact = rotating_frame_reference(&self.params, &spec, &start, 1.0, total, &psi0)?;
        let eps = self.cfg.evolve.total_time / self.cfg.evolve.steps as f64;
        let n_t = (total / eps).round().max(10.0) as usize;
        let terr = |steps| -> Result<f64> {
            let sched = Schedule::new(ParamPath::alpha_loop(self.theta, self.alpha0, self.cfg.path.steps)?, total, steps)?;
            evolve(&gen, &psi0, &sched, &EvolveOptions::default())?.final_state.distance(&exact)
        };
        let (e1, e2) = (terr(n_t)?, terr(2 * n_t)?);
        let time_ratio = e1 / e2;
        // one more halving shows whether the configured step is past the pre-asymptotic range
        let finer = e2 / terr(4 * n_t)?;
        let ok = |r: f64| (3.0..=5.0).contains(&r);
        Ok((
            ok(loop_ratio) && ok(time_ratio),
            format!(
                "loop error ratio {}/{} steps = {} time error ratio {}/{} steps = {} (info: {}/{} steps = {})",
                n,
                2 * n,
                g(loop_ratio),
                n_t,
                2 * n_t,
                g(time_ratio),
                2 * n_t,
                4 * n_t,
                g(finer)
            ),
        ))
    }
}

const NAMES: [&str; 11] = [
    "fi loop phases",
    "sc region phases",
    "total phase on random loops",
    "electron/hole antisymmetry",
    "lattice oracle",
    "gauge invariance",
    "two-level curvature",
    "flat connection",
    "nonadiabatic convergence",
    "bound-state structure",
    "step-size convergence",
];

fn is_precondition(e: &Error) -> bool {
    matches!(e, Error::EvanescentConditionViolated { .. } | Error::DegenerateInPlane { .. } | Error::NoDecayingMode(_))
}

/// Runs criteria 1 to 11; `progress` sees each outcome as it completes.
pub fn run(cfg: &RunConfig, mut progress: impl FnMut(&Outcome)) -> Vec<Outcome> {
    let params = cfg.params();
    let admissible = params.validate().and_then(|_| derived_params(&params, cfg.path.theta).map(|_| ()));
    let mut suite = Suite {
        cfg,
        params,
        theta: cfg.path.theta,
        alpha0: cfg.path.alpha_start,
        antisym: Vec::new(),
        admissible,
    };
    // the antisymmetry check reads the loops of 1, 2, 3 and 5
    let order = [1u8, 2, 3, 5, 4, 6, 7, 8, 9, 10, 11];
    let mut out = Vec::new();
    for id in order {
        let t = Instant::now();
        let res = match id {
            1 => suite.fi_loop(),
            2 => suite.sc_region(),
            3 => suite.random_loops(),
            4 => suite.antisymmetry(),
            5 => suite.lattice(),
            6 => suite.gauges(),
            7 => suite.two_level(),
            8 => suite.flat(),
            9 => suite.adiabatic(),
            10 => suite.bound_states(),
            _ => suite.step_sizes(),
        };
        let (pass, detail) = match res {
            Ok(v) => v,
            Err(e) if is_precondition(&e) && suite.admissible.is_err() => (true, format!("expected error: {e}")),
            Err(e) => (false, format!("error: {e}")),
        };
        let detail = if !pass && cfg.lattice.wilson_r == 0.0 && matches!(id, 5 | 9 | 11) {
            format!("doubler negative control (wilson_r = 0): {detail}")
        } else {
            detail
        };
        let o = Outcome { id, name: NAMES[id as usize - 1], pass, detail, seconds: t.elapsed().as_secs_f64() };
        progress(&o);
        out.push(o);
    }
    out.sort_by_key(|o| o.id);
    out
}
