//! Berry connections, Wilson phases and plaquette curvature of sampled spinors.
//!
//! Sign convention: `γ = +Im ∫ ⟨χ|∇χ⟩/⟨χ|χ⟩ · dR`, so a discrete step
//! contributes `arg⟨χ_k|χ_{k+1}⟩`. This is the negative of the usual
//! `γ = i∮⟨n|∇n⟩`; loop phases of ±π coincide modulo 2π.
//!
//! Phases are accumulated step by step without folding. Each step must stay
//! below π/2 in magnitude, otherwise the path is rejected as too coarse.

use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec::Vec;

use faer::c64;

use crate::bdg::{sector_inner_product, Grid, NambuSpinor, ParamPoint, Sector};
use crate::error::{invalid, Error, Result};
use crate::linalg::ZERO;
use crate::math;

/// Anything that maps a parameter point to a spinor on a fixed grid.
pub trait SpinorSampler {
    fn sample(&self, point: &ParamPoint) -> Result<NambuSpinor>;
}

impl<S: SpinorSampler + ?Sized> SpinorSampler for &S {
    fn sample(&self, point: &ParamPoint) -> Result<NambuSpinor> {
        (**self).sample(point)
    }
}

impl<S: SpinorSampler + ?Sized> SpinorSampler for Box<S> {
    fn sample(&self, point: &ParamPoint) -> Result<NambuSpinor> {
        (**self).sample(point)
    }
}

impl<S: SpinorSampler + ?Sized> SpinorSampler for Arc<S> {
    fn sample(&self, point: &ParamPoint) -> Result<NambuSpinor> {
        (**self).sample(point)
    }
}

/// Ordered points in (θ, α). A closed path returns to its first point
/// through `closure`, a point identified with the first one (for an α loop,
/// the same θ with α advanced by 2π).
#[derive(Debug, Clone, PartialEq)]
pub struct ParamPath {
    points: Vec<ParamPoint>,
    closure: Option<ParamPoint>,
}

impl ParamPath {
    pub fn open(points: Vec<ParamPoint>) -> Result<Self> {
        Self::build(points, None)
    }

    /// Closed polygon; the closing segment runs from the last point back to the first.
    pub fn closed(points: Vec<ParamPoint>) -> Result<Self> {
        let first = *points.first().ok_or_else(|| invalid("path needs points"))?;
        Self::build(points, Some(first))
    }

    /// Closed path whose final segment ends at `closure`, identified with the first point.
    pub fn closed_via(points: Vec<ParamPoint>, closure: ParamPoint) -> Result<Self> {
        Self::build(points, Some(closure))
    }

    fn build(points: Vec<ParamPoint>, closure: Option<ParamPoint>) -> Result<Self> {
        if points.len() < 2 {
            return Err(invalid("path needs at least two points"));
        }
        for p in points.iter().chain(closure.iter()) {
            p.validate()?;
        }
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("consecutive path points must differ"));
        }
        if let Some(c) = closure {
            if c == points[points.len() - 1] {
                return Err(invalid("closing segment has zero length"));
            }
        }
        Ok(Self { points, closure })
    }

    /// A single point held fixed; zero steps.
    pub fn stationary(point: ParamPoint) -> Result<Self> {
        point.validate()?;
        Ok(Self { points: alloc::vec![point], closure: None })
    }

    /// `steps` uniform steps around α ∈ [α0, α0 + 2π) at fixed θ.
    pub fn alpha_loop(theta: f64, alpha0: f64, steps: usize) -> Result<Self> {
        let pts = (0..steps)
            .map(|k| ParamPoint { theta, alpha: alpha0 + math::TAU * k as f64 / steps as f64 })
            .collect();
        Self::closed_via(pts, ParamPoint { theta, alpha: alpha0 + math::TAU })
    }

    /// Open segment from α0 to α1 in `steps` uniform steps.
    pub fn alpha_segment(theta: f64, alpha0: f64, alpha1: f64, steps: usize) -> Result<Self> {
        let pts = (0..=steps)
            .map(|k| ParamPoint { theta, alpha: alpha0 + (alpha1 - alpha0) * k as f64 / steps as f64 })
            .collect();
        Self::open(pts)
    }

    /// Counter-clockwise rectangle in the (θ, α) plane, `per_side` steps per edge.
    pub fn rectangle(theta0: f64, theta1: f64, alpha0: f64, alpha1: f64, per_side: usize) -> Result<Self> {
        let corners = [(theta0, alpha0), (theta1, alpha0), (theta1, alpha1), (theta0, alpha1)];
        let mut pts = Vec::with_capacity(4 * per_side);
        for e in 0..4 {
            let (t0, a0) = corners[e];
            let (t1, a1) = corners[(e + 1) % 4];
            for k in 0..per_side {
                let s = k as f64 / per_side as f64;
                pts.push(ParamPoint { theta: t0 + (t1 - t0) * s, alpha: a0 + (a1 - a0) * s });
            }
        }
        Self::closed(pts)
    }

    pub fn points(&self) -> &[ParamPoint] {
        &self.points
    }

    pub fn is_closed(&self) -> bool {
        self.closure.is_some()
    }

    pub fn closure(&self) -> Option<ParamPoint> {
        self.closure
    }

    /// Number of overlap steps.
    pub fn steps(&self) -> usize {
        self.points.len() - usize::from(self.closure.is_none())
    }

    /// End points of step `k` in parameter space.
    pub fn segment(&self, k: usize) -> (ParamPoint, ParamPoint) {
        let a = self.points[k];
        let b = if k + 1 < self.points.len() { self.points[k + 1] } else { self.closure.expect("closed path") };
        (a, b)
    }

    pub fn length(&self) -> f64 {
        (0..self.steps()).map(|k| {
            let (a, b) = self.segment(k);
            a.distance(&b)
        }).sum()
    }

    /// Point at fraction `s ∈ [0, 1]` of the path, linear along each segment
    /// and uniform in step count.
    pub fn point_at(&self, s: f64) -> ParamPoint {
        let n = self.steps();
        if n == 0 {
            return self.points[0];
        }
        let pos = (s.clamp(0.0, 1.0) * n as f64).min(n as f64);
        let k = (pos as usize).min(n - 1);
        let f = pos - k as f64;
        let (a, b) = self.segment(k);
        ParamPoint { theta: a.theta + (b.theta - a.theta) * f, alpha: a.alpha + (b.alpha - a.alpha) * f }
    }
}

/// Per-step overlap magnitudes and phases, indexed electron, hole, full.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostic {
    pub magnitude: [f64; 3],
    pub phase: [f64; 3],
}

/// Accumulated geometric phases along a path.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseResult {
    pub gamma_u: f64,
    pub gamma_v: f64,
    pub gamma_total: f64,
    /// Always 0 for zero-energy samplers.
    pub dynamical: f64,
    pub steps: Vec<StepDiagnostic>,
}

fn slot(sector: Sector) -> usize {
    match sector {
        Sector::Electron => 0,
        Sector::Hole => 1,
        Sector::Full => 2,
    }
}

impl PhaseResult {
    pub fn gamma(&self, sector: Sector) -> f64 {
        match sector {
            Sector::Electron => self.gamma_u,
            Sector::Hole => self.gamma_v,
            Sector::Full => self.gamma_total,
        }
    }

    /// The phase folded into `(−π, π]`.
    pub fn wrapped(&self, sector: Sector) -> f64 {
        math::wrap_phase(self.gamma(sector))
    }

    /// Smallest normalized overlap magnitude seen in `sector`.
    pub fn overlap_min(&self, sector: Sector) -> f64 {
        self.steps.iter().map(|s| s.magnitude[slot(sector)]).fold(f64::INFINITY, f64::min)
    }

    /// Running sums of the per-step phases.
    pub fn accumulated(&self, sector: Sector) -> Vec<f64> {
        let mut acc = 0.0;
        self.steps
            .iter()
            .map(|s| {
                acc += s.phase[slot(sector)];
                acc
            })
            .collect()
    }
}

const NORM_FLOOR: f64 = 1e-300;

fn step(a: &NambuSpinor, b: &NambuSpinor, sector: Sector, k: usize, guard: bool) -> Result<(f64, f64)> {
    let na = a.sector_norm_sqr(sector);
    let nb = b.sector_norm_sqr(sector);
    if na < NORM_FLOOR || nb < NORM_FLOOR {
        return Ok((0.0, 0.0));
    }
    let ov = sector_inner_product(a, b, sector)?;
    let mag = math::modulus(ov) / math::sqrt(na * nb);
    if guard && mag < 1e-12 {
        return Err(Error::ZeroOverlap { step: k });
    }
    let phase = math::arg(ov);
    if guard && math::abs(phase) >= math::PI / 2.0 {
        return Err(Error::StepTooCoarse { step: k, phase });
    }
    Ok((mag, phase))
}

/// Wilson phases of a sampled sequence. For closed paths the last state is
/// connected back to the first. Guards apply to the sectors in `guarded`.
pub fn phase_from_spinors(spinors: &[NambuSpinor], closed: bool, guarded: &[Sector]) -> Result<PhaseResult> {
    if spinors.len() < 2 {
        return Err(invalid("need at least two spinors"));
    }
    let n = spinors.len();
    let steps = if closed { n } else { n - 1 };
    let mut gammas = [0.0; 3];
    let mut diag = Vec::with_capacity(steps);
    for k in 0..steps {
        let a = &spinors[k];
        let b = &spinors[(k + 1) % n];
        let mut d = StepDiagnostic { magnitude: [0.0; 3], phase: [0.0; 3] };
        for sector in Sector::ALL {
            let (m, p) = step(a, b, sector, k, guarded.contains(&sector))?;
            d.magnitude[slot(sector)] = m;
            d.phase[slot(sector)] = p;
            gammas[slot(sector)] += p;
        }
        diag.push(d);
    }
    Ok(PhaseResult { gamma_u: gammas[0], gamma_v: gammas[1], gamma_total: gammas[2], dynamical: 0.0, steps: diag })
}

/// Samples every path point once, in order.
pub fn sample_path<S: SpinorSampler + ?Sized>(sampler: &S, path: &ParamPath) -> Result<Vec<NambuSpinor>> {
    path.points().iter().map(|p| sampler.sample(p)).collect()
}

/// Phase of one sector along `path`, guarded in that sector only.
pub fn path_phase<S: SpinorSampler + ?Sized>(sampler: &S, path: &ParamPath, sector: Sector) -> Result<PhaseResult> {
    phase_from_spinors(&sample_path(sampler, path)?, path.is_closed(), &[sector])
}

/// All three sector phases, every sector guarded.
pub fn loop_phases<S: SpinorSampler + ?Sized>(sampler: &S, path: &ParamPath) -> Result<PhaseResult> {
    phase_from_spinors(&sample_path(sampler, path)?, path.is_closed(), &Sector::ALL)
}

/// Full-spinor geometric phase along `path`.
pub fn total_spinor_phase<S: SpinorSampler + ?Sized>(sampler: &S, path: &ParamPath) -> Result<f64> {
    Ok(path_phase(sampler, path, Sector::Full)?.gamma_total)
}

/// Normalized connection `⟨χ|∂χ⟩/⟨χ|χ⟩` along one tangent, per sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionSample {
    pub a_u: c64,
    pub a_v: c64,
    pub a_total: c64,
}

impl ConnectionSample {
    pub fn get(&self, sector: Sector) -> c64 {
        match sector {
            Sector::Electron => self.a_u,
            Sector::Hole => self.a_v,
            Sector::Full => self.a_total,
        }
    }
}

fn central(psi: &NambuSpinor, plus: &NambuSpinor, minus: &NambuSpinor, sector: Sector, h2: f64) -> Result<c64> {
    let n = psi.sector_norm_sqr(sector);
    if n < NORM_FLOOR {
        return Ok(ZERO);
    }
    let p = sector_inner_product(psi, plus, sector)?;
    let m = sector_inner_product(psi, minus, sector)?;
    Ok((p - m) / (h2 * n))
}

/// Central-difference connection at `point` along `direction = (dθ, dα)`.
pub fn connection<S: SpinorSampler + ?Sized>(
    sampler: &S,
    point: &ParamPoint,
    direction: (f64, f64),
    h: f64,
) -> Result<ConnectionSample> {
    if !(h > 0.0) {
        return Err(invalid("finite-difference step must be positive"));
    }
    let len = math::hypot(direction.0, direction.1);
    if !(len > 0.0) {
        return Err(invalid("direction must be non-zero"));
    }
    let (dt, da) = (direction.0 / len, direction.1 / len);
    let psi = sampler.sample(point)?;
    let plus = sampler.sample(&ParamPoint::new(point.theta + h * dt, point.alpha + h * da)?)?;
    let minus = sampler.sample(&ParamPoint::new(point.theta - h * dt, point.alpha - h * da)?)?;
    Ok(ConnectionSample {
        a_u: central(&psi, &plus, &minus, Sector::Electron, 2.0 * h)?,
        a_v: central(&psi, &plus, &minus, Sector::Hole, 2.0 * h)?,
        a_total: central(&psi, &plus, &minus, Sector::Full, 2.0 * h)?,
    })
}

/// `Σ_k Im A(mid_k) |ΔR_k|` with the connection at each segment midpoint
/// taken from the two segment end points. Converges as `O(|ΔR|²)`.
pub fn line_integral_phase<S: SpinorSampler + ?Sized>(sampler: &S, path: &ParamPath, sector: Sector) -> Result<f64> {
    let ends = sample_path(sampler, path)?;
    let n = ends.len();
    let mut total = 0.0;
    for k in 0..path.steps() {
        let (a, b) = path.segment(k);
        let mid = ParamPoint { theta: 0.5 * (a.theta + b.theta), alpha: 0.5 * (a.alpha + b.alpha) };
        let psi = sampler.sample(&mid)?;
        let h2 = a.distance(&b);
        let conn = central(&psi, &ends[(k + 1) % n], &ends[k], sector, h2)?;
        total += conn.im * h2;
    }
    Ok(total)
}

/// `R ↦ e^{iΘ(R)} ψ(R)`.
pub struct GaugeTransformed<S, F> {
    inner: S,
    theta: F,
}

pub fn gauge_transform<S: SpinorSampler, F: Fn(&ParamPoint) -> f64>(inner: S, theta: F) -> GaugeTransformed<S, F> {
    GaugeTransformed { inner, theta }
}

impl<S: SpinorSampler, F: Fn(&ParamPoint) -> f64> SpinorSampler for GaugeTransformed<S, F> {
    fn sample(&self, point: &ParamPoint) -> Result<NambuSpinor> {
        let t = (self.theta)(point);
        if !t.is_finite() {
            return Err(invalid("gauge function returned a non-finite value"));
        }
        Ok(self.inner.sample(point)?.scaled(math::cis(t)))
    }
}

/// Plaquette curvature per sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureSample {
    pub b_u: f64,
    pub b_v: f64,
    pub b_total: f64,
}

impl CurvatureSample {
    pub fn get(&self, sector: Sector) -> f64 {
        match sector {
            Sector::Electron => self.b_u,
            Sector::Hole => self.b_v,
            Sector::Full => self.b_total,
        }
    }
}

/// `arg[⟨χ1|χ2⟩⟨χ2|χ3⟩⟨χ3|χ4⟩⟨χ4|χ1⟩]/δ²` on the square of side `delta`
/// centred at `point`, corners visited counter-clockwise in (θ, α).
pub fn curvature<S: SpinorSampler + ?Sized>(sampler: &S, point: &ParamPoint, delta: f64) -> Result<CurvatureSample> {
    if !(delta > 0.0) {
        return Err(invalid("plaquette side must be positive"));
    }
    let h = 0.5 * delta;
    let corners = [(-h, -h), (h, -h), (h, h), (-h, h)];
    let mut psi = Vec::with_capacity(4);
    for (dt, da) in corners {
        psi.push(sampler.sample(&ParamPoint::new(point.theta + dt, point.alpha + da)?)?);
    }
    let mut out = [0.0; 3];
    for sector in Sector::ALL {
        let mut prod = c64::new(1.0, 0.0);
        let mut empty = false;
        for k in 0..4 {
            let (a, b) = (&psi[k], &psi[(k + 1) % 4]);
            if a.sector_norm_sqr(sector) < NORM_FLOOR {
                empty = true;
                break;
            }
            let (_, _) = step(a, b, sector, k, true)?;
            prod *= sector_inner_product(a, b, sector)?;
        }
        out[slot(sector)] = if empty { 0.0 } else { math::arg(prod) / (delta * delta) };
    }
    Ok(CurvatureSample { b_u: out[0], b_v: out[1], b_total: out[2] })
}

/// Rectangular patch `[θ0, θ1] × [α0, α1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Patch {
    pub theta0: f64,
    pub theta1: f64,
    pub alpha0: f64,
    pub alpha1: f64,
}

impl Patch {
    /// Square of side `side` centred at `(theta, alpha)`.
    pub fn square(theta: f64, alpha: f64, side: f64) -> Self {
        let h = 0.5 * side;
        Self { theta0: theta - h, theta1: theta + h, alpha0: alpha - h, alpha1: alpha + h }
    }

    pub fn area(&self) -> f64 {
        (self.theta1 - self.theta0) * (self.alpha1 - self.alpha0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StokesOptions {
    /// Wilson-loop steps along each edge of the boundary.
    pub boundary_steps: usize,
    /// Surface cells along each direction.
    pub cells: usize,
    /// Plaquette side used to sample the curvature at cell centres.
    pub delta: f64,
}

impl Default for StokesOptions {
    fn default() -> Self {
        Self { boundary_steps: 50, cells: 20, delta: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StokesReport {
    pub loop_phase: f64,
    pub surface_integral: f64,
    pub discrepancy: f64,
}

/// Boundary Wilson phase against the midpoint-rule integral of the plaquette
/// curvature over the patch, for one sector.
pub fn stokes_check<S: SpinorSampler + ?Sized>(
    sampler: &S,
    patch: &Patch,
    sector: Sector,
    opts: &StokesOptions,
) -> Result<StokesReport> {
    if patch.area() == 0.0 {
        return Ok(StokesReport { loop_phase: 0.0, surface_integral: 0.0, discrepancy: 0.0 });
    }
    if patch.theta1 < patch.theta0 || patch.alpha1 < patch.alpha0 {
        return Err(invalid("patch bounds must be ordered"));
    }
    if opts.boundary_steps == 0 || opts.cells == 0 {
        return Err(invalid("stokes check needs boundary steps and cells"));
    }
    let path = ParamPath::rectangle(patch.theta0, patch.theta1, patch.alpha0, patch.alpha1, opts.boundary_steps)?;
    let loop_phase = path_phase(sampler, &path, sector)?.gamma(sector);
    let dt = (patch.theta1 - patch.theta0) / opts.cells as f64;
    let da = (patch.alpha1 - patch.alpha0) / opts.cells as f64;
    let delta = opts.delta.min(dt).min(da);
    let mut surface = 0.0;
    for i in 0..opts.cells {
        for j in 0..opts.cells {
            let c = ParamPoint {
                theta: patch.theta0 + (i as f64 + 0.5) * dt,
                alpha: patch.alpha0 + (j as f64 + 0.5) * da,
            };
            surface += curvature(sampler, &c, delta)?.get(sector) * dt * da;
        }
    }
    Ok(StokesReport { loop_phase, surface_integral: surface, discrepancy: math::abs(loop_phase - surface) })
}

/// Point-independent spinor.
#[derive(Debug, Clone)]
pub struct ConstantSampler(pub NambuSpinor);

impl SpinorSampler for ConstantSampler {
    fn sample(&self, _point: &ParamPoint) -> Result<NambuSpinor> {
        Ok(self.0.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    /// Aligned with the field direction `n(θ, α)`.
    Upper,
    /// Anti-aligned.
    Lower,
}

/// Spin-½ in a field along `n(θ, α)`: the spin state sits in `u`, `v = 0`,
/// on a two-point grid. Upper level: loop phase `π(1 − cos θ)`, curvature
/// `+sin θ/2`; lower level: curvature `−sin θ/2`.
#[derive(Debug, Clone)]
pub struct TwoLevelFixture {
    level: Level,
    grid: Arc<Grid>,
}

impl TwoLevelFixture {
    pub fn new(level: Level) -> Self {
        let grid = Arc::new(Grid::trapezoid(alloc::vec![0.0, 1.0]).expect("valid two-point grid"));
        Self { level, grid }
    }

    pub fn loop_phase(theta: f64) -> f64 {
        math::PI * (1.0 - math::cos(theta))
    }

    pub fn curvature(&self, theta: f64) -> f64 {
        match self.level {
            Level::Upper => 0.5 * math::sin(theta),
            Level::Lower => -0.5 * math::sin(theta),
        }
    }
}

impl SpinorSampler for TwoLevelFixture {
    fn sample(&self, point: &ParamPoint) -> Result<NambuSpinor> {
        let (s, c) = (math::sin(0.5 * point.theta), math::cos(0.5 * point.theta));
        let e = math::cis(point.alpha);
        let (a, b) = match self.level {
            Level::Upper => (c64::new(c, 0.0), e * s),
            Level::Lower => (c64::new(s, 0.0), -(e * c)),
        };
        let site = [a, b, ZERO, ZERO];
        NambuSpinor::new(self.grid.clone(), alloc::vec![site, site])
    }
}
