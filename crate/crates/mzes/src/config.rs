//! Sectioned `key = value` run configuration.
//!
//! ```text
//! [model]
//! mu_fi = 0
//! [path]
//! theta = 1.5707963267948966
//! ```
//!
//! Every key can be overridden from the command line as `--section.key value`
//! or `--section.key=value`.

use std::fmt::Write as _;
use std::str::FromStr;

use mzes_core::bdg::ModelParams;
use mzes_core::lattice::LatticeSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format '{s}' (csv|json)")),
        }
    }
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSection {
    pub mu_fi: f64,
    pub mu_sc: f64,
    pub m: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathSection {
    pub theta: f64,
    pub alpha_start: f64,
    pub alpha_end: f64,
    pub steps: usize,
    pub closed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSection {
    pub n_sites: usize,
    pub spacing: f64,
    pub wilson_r: f64,
    pub loop_steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveSection {
    pub total_time: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureSection {
    pub theta_min: f64,
    pub theta_max: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub n_theta: usize,
    pub n_alpha: usize,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSection {
    pub format: Format,
    /// `-` writes to stdout.
    pub path: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelSection,
    pub path: PathSection,
    pub lattice: LatticeSection,
    pub evolve: EvolveSection,
    pub curvature: CurvatureSection,
    pub output: OutputSection,
}

const PI: f64 = std::f64::consts::PI;

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelSection { mu_fi: 0.0, mu_sc: 0.0, m: 1.0, delta: 1.0 },
            path: PathSection { theta: PI / 2.0, alpha_start: 0.0, alpha_end: 2.0 * PI, steps: 2000, closed: true },
            lattice: LatticeSection { n_sites: 400, spacing: 0.1, wilson_r: 1.0, loop_steps: 500 },
            evolve: EvolveSection { total_time: 800.0, steps: 1600 },
            curvature: CurvatureSection {
                theta_min: PI / 3.0,
                theta_max: 2.0 * PI / 3.0,
                alpha_min: 0.5,
                alpha_max: 5.5,
                n_theta: 5,
                n_alpha: 5,
                delta: 1e-3,
            },
            output: OutputSection { format: Format::Csv, path: "-".into() },
        }
    }
}

pub const KEYS: [&str; 22] = [
    "model.mu_fi",
    "model.mu_sc",
    "model.m",
    "model.delta",
    "path.theta",
    "path.alpha_start",
    "path.alpha_end",
    "path.steps",
    "path.closed",
    "lattice.n_sites",
    "lattice.spacing",
    "lattice.wilson_r",
    "lattice.loop_steps",
    "evolve.total_time",
    "evolve.steps",
    "curvature.theta_min",
    "curvature.theta_max",
    "curvature.alpha_min",
    "curvature.alpha_max",
    "curvature.n_theta",
    "curvature.n_alpha",
    "curvature.delta",
];

const OUTPUT_KEYS: [&str; 2] = ["output.format", "output.path"];

fn num<T: FromStr>(key: &str, v: &str) -> Result<T, String> {
    v.trim().parse::<T>().map_err(|_| format!("{key}: cannot parse '{v}'"))
}

fn boolean(key: &str, v: &str) -> Result<bool, String> {
    match v.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(format!("{key}: expected a boolean, got '{v}'")),
    }
}

impl RunConfig {
    /// Parses a config file body on top of the defaults.
    pub fn parse(text: &str, degrees: bool) -> Result<Self, String> {
        let mut cfg = RunConfig::default();
        let mut section = String::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_string();
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", n + 1))?;
            if section.is_empty() {
                return Err(format!("line {}: key outside a section", n + 1));
            }
            cfg.set(&format!("{section}.{}", k.trim()), v.trim(), degrees)?;
        }
        Ok(cfg)
    }

    /// Sets one dotted key.
    pub fn set(&mut self, key: &str, value: &str, degrees: bool) -> Result<(), String> {
        let angle = |v: &str| -> Result<f64, String> {
            let x: f64 = num(key, v)?;
            Ok(if degrees { x.to_radians() } else { x })
        };
        match key {
            "model.mu_fi" => self.model.mu_fi = num(key, value)?,
            "model.mu_sc" => self.model.mu_sc = num(key, value)?,
            "model.m" => self.model.m = num(key, value)?,
            "model.delta" => self.model.delta = num(key, value)?,
            "path.theta" => self.path.theta = angle(value)?,
            "path.alpha_start" => self.path.alpha_start = angle(value)?,
            "path.alpha_end" => self.path.alpha_end = angle(value)?,
            "path.steps" => self.path.steps = num(key, value)?,
            "path.closed" => self.path.closed = boolean(key, value)?,
            "lattice.n_sites" => self.lattice.n_sites = num(key, value)?,
            "lattice.spacing" => self.lattice.spacing = num(key, value)?,
            "lattice.wilson_r" => self.lattice.wilson_r = num(key, value)?,
            "lattice.loop_steps" => self.lattice.loop_steps = num(key, value)?,
            "evolve.total_time" => self.evolve.total_time = num(key, value)?,
            "evolve.steps" => self.evolve.steps = num(key, value)?,
            "curvature.theta_min" => self.curvature.theta_min = angle(value)?,
            "curvature.theta_max" => self.curvature.theta_max = angle(value)?,
            "curvature.alpha_min" => self.curvature.alpha_min = angle(value)?,
            "curvature.alpha_max" => self.curvature.alpha_max = angle(value)?,
            "curvature.n_theta" => self.curvature.n_theta = num(key, value)?,
            "curvature.n_alpha" => self.curvature.n_alpha = num(key, value)?,
            "curvature.delta" => self.curvature.delta = num(key, value)?,
            "output.format" => self.output.format = value.trim().parse()?,
            "output.path" => self.output.path = value.trim().to_string(),
            _ => return Err(format!("unknown config key '{key}'")),
        }
        Ok(())
    }

    pub fn is_key(key: &str) -> bool {
        KEYS.contains(&key) || OUTPUT_KEYS.contains(&key)
    }

    pub fn validate(&self) -> Result<(), String> {
        let floats = [
            self.model.mu_fi,
            self.model.mu_sc,
            self.model.m,
            self.model.delta,
            self.path.theta,
            self.path.alpha_start,
            self.path.alpha_end,
            self.lattice.spacing,
            self.lattice.wilson_r,
            self.evolve.total_time,
            self.curvature.theta_min,
            self.curvature.theta_max,
            self.curvature.alpha_min,
            self.curvature.alpha_max,
            self.curvature.delta,
        ];
        if floats.iter().any(|x| !x.is_finite()) {
            return Err("all numeric config values must be finite".into());
        }
        if self.path.steps < 4 || self.lattice.loop_steps < 4 {
            return Err("loop steps must be at least 4".into());
        }
        if self.evolve.steps < 4 {
            return Err("evolve.steps must be at least 4".into());
        }
        Ok(())
    }

    pub fn params(&self) -> ModelParams {
        ModelParams {
            mu_fi: self.model.mu_fi,
            mu_sc: self.model.mu_sc,
            m: self.model.m,
            delta: self.model.delta,
            ..ModelParams::default()
        }
    }

    pub fn lattice_spec(&self) -> LatticeSpec {
        LatticeSpec::centred(self.lattice.n_sites, self.lattice.spacing, self.lattice.wilson_r)
    }

    /// Canonical text form; reparses to an equal config (angles in radians).
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let f = |x: f64| format!("{x:?}");
        let _ = writeln!(s, "[model]");
        let _ = writeln!(s, "mu_fi = {}", f(self.model.mu_fi));
        let _ = writeln!(s, "mu_sc = {}", f(self.model.mu_sc));
        let _ = writeln!(s, "m = {}", f(self.model.m));
        let _ = writeln!(s, "delta = {}", f(self.model.delta));
        let _ = writeln!(s, "[path]");
        let _ = writeln!(s, "theta = {}", f(self.path.theta));
        let _ = writeln!(s, "alpha_start = {}", f(self.path.alpha_start));
        let _ = writeln!(s, "alpha_end = {}", f(self.path.alpha_end));
        let _ = writeln!(s, "steps = {}", self.path.steps);
        let _ = writeln!(s, "closed = {}", self.path.closed);
        let _ = writeln!(s, "[lattice]");
        let _ = writeln!(s, "n_sites = {}", self.lattice.n_sites);
        let _ = writeln!(s, "spacing = {}", f(self.lattice.spacing));
        let _ = writeln!(s, "wilson_r = {}", f(self.lattice.wilson_r));
        let _ = writeln!(s, "loop_steps = {}", self.lattice.loop_steps);
        let _ = writeln!(s, "[evolve]");
        let _ = writeln!(s, "total_time = {}", f(self.evolve.total_time));
        let _ = writeln!(s, "steps = {}", self.evolve.steps);
        let _ = writeln!(s, "[curvature]");
        let _ = writeln!(s, "theta_min = {}", f(self.curvature.theta_min));
        let _ = writeln!(s, "theta_max = {}", f(self.curvature.theta_max));
        let _ = writeln!(s, "alpha_min = {}", f(self.curvature.alpha_min));
        let _ = writeln!(s, "alpha_max = {}", f(self.curvature.alpha_max));
        let _ = writeln!(s, "n_theta = {}", self.curvature.n_theta);
        let _ = writeln!(s, "n_alpha = {}", self.curvature.n_alpha);
        let _ = writeln!(s, "delta = {}", f(self.curvature.delta));
        let _ = writeln!(s, "[output]");
        let _ = writeln!(s, "format = {}", self.output.format.as_str());
        let _ = writeln!(s, "path = {}", self.output.path);
        s
    }
}

/// Pulls `--section.key value` / `--section.key=value` pairs out of `args`.
pub fn split_overrides(args: Vec<String>) -> Result<(Vec<String>, Vec<(String, String)>), String> {
    let mut rest = Vec::new();
    let mut overrides = Vec::new();
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let Some(body) = a.strip_prefix("--") else {
            rest.push(a);
            continue;
        };
        let (key, inline) = match body.split_once('=') {
            Some((k, v)) => (k.to_string(), Some(v.to_string())),
            None => (body.to_string(), None),
        };
        if !RunConfig::is_key(&key) {
            rest.push(a);
            continue;
        }
        let value = match inline {
            Some(v) => v,
            None => it.next().ok_or_else(|| format!("--{key} needs a value"))?,
        };
        overrides.push((key, value));
    }
    Ok((rest, overrides))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn echo_round_trips() {
        let mut cfg = RunConfig::default();
        cfg.model.mu_fi = 0.123456789012345;
        cfg.path.closed = false;
        cfg.output.format = Format::Json;
        cfg.output.path = "out.json".into();
        let back = RunConfig::parse(&cfg.echo(), false).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn degrees_convert_angles_only() {
        let cfg = RunConfig::parse("[path]\ntheta = 90\nsteps = 100\n[model]\nmu_fi = 0.5\n", true).unwrap();
        assert!((cfg.path.theta - PI / 2.0).abs() < 1e-15);
        assert_eq!(cfg.path.steps, 100);
        assert_eq!(cfg.model.mu_fi, 0.5);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_errors() {
        assert!(RunConfig::parse("[model]\nmass = 1\n", false).is_err());
        assert!(RunConfig::parse("[model]\nm = abc\n", false).is_err());
        assert!(RunConfig::parse("m = 1\n", false).is_err());
    }

    #[test]
    fn overrides_are_extracted() {
        let args = ["loop-phase", "--model.mu_fi", "0.3", "--backend", "lattice", "--path.steps=100"];
        let (rest, ov) = split_overrides(args.iter().map(|s| s.to_string()).collect()).unwrap();
        assert_eq!(rest, vec!["loop-phase", "--backend", "lattice"]);
        assert_eq!(ov, vec![("model.mu_fi".into(), "0.3".into()), ("path.steps".into(), "100".into())]);
    }
}
