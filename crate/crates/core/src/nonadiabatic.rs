//! Time-ordered evolution under a slowly driven Hamiltonian and the
//! discretized overlap product over an instantaneous eigenbasis.
//!
//! Each step applies `exp(−i H(t_{k+½}) ε/ħ)` exactly through the spectral
//! decomposition of the midpoint Hamiltonian, so the propagator is unitary to
//! roundoff and second order in `ε`.

use alloc::sync::Arc;
use alloc::vec::Vec;

use faer::{c64, Mat};

use crate::bdg::{sector_inner_product, to_hamiltonian_order, to_storage_order, ModelParams, NambuSpinor, ParamPoint, Sector};
use crate::cache::Memo;
use crate::error::{invalid, Error, Result};
use crate::holonomy::ParamPath;
use crate::lattice::{self, build_lattice, rotation_phases, Evaluation, LatticeSpec};
use crate::linalg::{self, ZERO};
use crate::math;

/// Uniform traversal of a path in time.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub total_time: f64,
    pub n_steps: usize,
    pub path: ParamPath,
}

impl Schedule {
    pub fn new(path: ParamPath, total_time: f64, n_steps: usize) -> Result<Self> {
        if !(total_time > 0.0) || !total_time.is_finite() {
            return Err(invalid("total time must be positive and finite"));
        }
        if n_steps < 10 {
            return Err(invalid("schedule needs at least 10 steps"));
        }
        Ok(Self { total_time, n_steps, path })
    }

    pub fn epsilon(&self) -> f64 {
        self.total_time / self.n_steps as f64
    }

    pub fn point_at(&self, t: f64) -> ParamPoint {
        self.path.point_at(t / self.total_time)
    }
}

/// `H = F V diag(E) V† F†` with an optional diagonal frame `F` repeated per site.
#[derive(Debug, Clone)]
pub struct Spectral {
    pub values: Arc<Vec<f64>>,
    pub vectors: Arc<Mat<c64>>,
    pub frame: Option<[c64; 4]>,
}

impl Spectral {
    pub fn from_hermitian(m: &Mat<c64>) -> Result<Self> {
        let scale = linalg::max_abs(m).max(1.0);
        let defect = linalg::hermiticity_defect(m);
        if defect > 1e-12 * scale {
            return Err(Error::NonHermitianGenerator { deviation: defect });
        }
        let (values, vectors) = linalg::hermitian_eigen(m)?;
        Ok(Self { values: Arc::new(values), vectors: Arc::new(vectors), frame: None })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `ψ ← exp(−i H dt/ħ) ψ`; `scratch` must have the same length as `psi`.
    pub fn propagate(&self, psi: &mut [c64], dt: f64, hbar: f64, scratch: &mut [c64]) {
        self.apply_frame(psi, true);
        linalg::adjoint_matvec(&self.vectors, psi, scratch);
        for (z, e) in scratch.iter_mut().zip(self.values.iter()) {
            *z *= math::cis(-e * dt / hbar);
        }
        linalg::matvec(&self.vectors, scratch, psi);
        self.apply_frame(psi, false);
    }

    /// `⟨ψ|H|ψ⟩` for a unit vector.
    pub fn expectation(&self, psi: &[c64]) -> f64 {
        let mut v = psi.to_vec();
        self.apply_frame(&mut v, true);
        let mut c = alloc::vec![ZERO; v.len()];
        linalg::adjoint_matvec(&self.vectors, &v, &mut c);
        c.iter().zip(self.values.iter()).map(|(z, e)| z.norm_sqr() * e).sum()
    }

    fn apply_frame(&self, psi: &mut [c64], adjoint: bool) {
        if let Some(f) = self.frame {
            for (i, z) in psi.iter_mut().enumerate() {
                let p = f[i % 4];
                *z *= if adjoint { p.conj() } else { p };
            }
        }
    }
}

/// Parameter-dependent Hermitian generator.
pub trait Generator {
    fn dim(&self) -> usize;
    fn spectral(&self, point: &ParamPoint) -> Result<Spectral>;
    fn hbar(&self) -> f64 {
        1.0
    }
}

/// The lattice Hamiltonian, one eigensolve per θ reused through rotation covariance.
pub struct LatticeGenerator {
    params: ModelParams,
    spec: LatticeSpec,
    evaluation: Evaluation,
    memo: Memo<Spectral>,
}

impl LatticeGenerator {
    pub fn new(params: ModelParams, spec: LatticeSpec) -> Result<Self> {
        params.validate()?;
        spec.validate()?;
        Ok(Self { params, spec, evaluation: Evaluation::Covariant, memo: Memo::new(4) })
    }

    pub fn with_evaluation(mut self, evaluation: Evaluation) -> Self {
        self.evaluation = evaluation;
        self
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }
}

impl Generator for LatticeGenerator {
    fn dim(&self) -> usize {
        4 * self.spec.n_sites
    }

    fn spectral(&self, point: &ParamPoint) -> Result<Spectral> {
        point.validate()?;
        match self.evaluation {
            Evaluation::Covariant => {
                let base = self.memo.get_or_try(point.theta.to_bits(), || {
                    let h = build_lattice(&self.params, &ParamPoint::new(point.theta, 0.0)?, &self.spec)?;
                    Spectral::from_hermitian(&h.matrix)
                })?;
                Ok(Spectral { frame: Some(rotation_phases(point.alpha)), ..(*base).clone() })
            }
            Evaluation::Direct => Spectral::from_hermitian(&build_lattice(&self.params, point, &self.spec)?.matrix),
        }
    }

    fn hbar(&self) -> f64 {
        self.params.hbar
    }
}

/// A fixed Hermitian matrix.
pub struct ConstantGenerator(Spectral);

impl ConstantGenerator {
    pub fn new(m: &Mat<c64>) -> Result<Self> {
        Ok(Self(Spectral::from_hermitian(m)?))
    }
}

impl Generator for ConstantGenerator {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn spectral(&self, _point: &ParamPoint) -> Result<Spectral> {
        Ok(self.0.clone())
    }
}

/// Any `point ↦ H` closure; Hermiticity is checked at every call.
pub struct FnGenerator<F> {
    dim: usize,
    make: F,
}

impl<F: Fn(&ParamPoint) -> Result<Mat<c64>>> FnGenerator<F> {
    pub fn new(dim: usize, make: F) -> Self {
        Self { dim, make }
    }
}

impl<F: Fn(&ParamPoint) -> Result<Mat<c64>>> Generator for FnGenerator<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn spectral(&self, point: &ParamPoint) -> Result<Spectral> {
        Spectral::from_hermitian(&(self.make)(point)?)
    }
}

/// Spinor to a unit-norm vector: `√w_j ×` Hamiltonian-order components.
pub fn spinor_to_vector(psi: &NambuSpinor) -> Vec<c64> {
    let mut v = Vec::with_capacity(4 * psi.values().len());
    for (s, w) in psi.values().iter().zip(psi.grid().weights()) {
        let r = math::sqrt(*w);
        for z in to_hamiltonian_order(*s) {
            v.push(z * r);
        }
    }
    v
}

/// Inverse of [`spinor_to_vector`] on the grid of `like`.
pub fn vector_to_spinor(v: &[c64], like: &NambuSpinor) -> Result<NambuSpinor> {
    let grid = like.grid().clone();
    let values = grid
        .weights()
        .iter()
        .enumerate()
        .map(|(j, w)| {
            let r = 1.0 / math::sqrt(*w);
            to_storage_order([v[4 * j] * r, v[4 * j + 1] * r, v[4 * j + 2] * r, v[4 * j + 3] * r])
        })
        .collect();
    NambuSpinor::new(grid, values)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSample {
    pub t: f64,
    pub norm: f64,
    pub phi_u: f64,
    pub phi_v: f64,
    pub phi_total: f64,
    pub overlap_mag: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionReport {
    pub final_state: NambuSpinor,
    /// `arg⟨ψ(0)|ψ(T)⟩`
    pub phi_total: f64,
    /// `arg⟨u(0)|u(T)⟩`
    pub phi_u: f64,
    /// `arg⟨v(0)|v(T)⟩`
    pub phi_v: f64,
    /// `|⟨ψ(0)|ψ(T)⟩|`, reported separately from the phase.
    pub overlap_mag: f64,
    pub overlap_u_mag: f64,
    pub overlap_v_mag: f64,
    /// `max_k |‖ψ(t_k)‖ − 1|`
    pub unitarity_drift: f64,
    pub series: Vec<TimeSample>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    /// Record a time sample every this many steps (0: only the final one).
    pub record_every: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { record_every: 0 }
    }
}

fn sample(psi0: &NambuSpinor, v: &[c64], t: f64) -> Result<TimeSample> {
    let psi = vector_to_spinor(v, psi0)?;
    let full = sector_inner_product(psi0, &psi, Sector::Full)?;
    Ok(TimeSample {
        t,
        norm: linalg::norm(v),
        phi_u: math::arg(sector_inner_product(psi0, &psi, Sector::Electron)?),
        phi_v: math::arg(sector_inner_product(psi0, &psi, Sector::Hole)?),
        phi_total: math::arg(full),
        overlap_mag: math::modulus(full),
    })
}

/// Midpoint exponential propagation of `psi0` along `sched`.
pub fn evolve<G: Generator + ?Sized>(
    generator: &G,
    psi0: &NambuSpinor,
    sched: &Schedule,
    opts: &EvolveOptions,
) -> Result<EvolutionReport> {
    let n0 = psi0.norm();
    if (n0 - 1.0).abs() > 1e-8 {
        return Err(invalid("initial state must be normalized"));
    }
    let mut v = spinor_to_vector(psi0);
    if v.len() != generator.dim() {
        return Err(Error::GridMismatch);
    }
    let eps = sched.epsilon();
    let hbar = generator.hbar();
    let mut scratch = alloc::vec![ZERO; v.len()];
    let mut drift: f64 = 0.0;
    let mut series = Vec::new();
    for k in 0..sched.n_steps {
        let mid = sched.point_at((k as f64 + 0.5) * eps);
        generator.spectral(&mid)?.propagate(&mut v, eps, hbar, &mut scratch);
        drift = drift.max((linalg::norm(&v) - 1.0).abs());
        if opts.record_every > 0 && (k + 1) % opts.record_every == 0 && k + 1 < sched.n_steps {
            series.push(sample(psi0, &v, (k + 1) as f64 * eps)?);
        }
    }
    let last = sample(psi0, &v, sched.total_time)?;
    series.push(last);
    let final_state = vector_to_spinor(&v, psi0)?;
    if last.overlap_mag < 1e-12 {
        return Err(Error::OverlapVanishes { magnitude: last.overlap_mag });
    }
    let ou = sector_inner_product(psi0, &final_state, Sector::Electron)?;
    let ov = sector_inner_product(psi0, &final_state, Sector::Hole)?;
    let nu = psi0.sector_norm_sqr(Sector::Electron);
    let nv = psi0.sector_norm_sqr(Sector::Hole);
    Ok(EvolutionReport {
        final_state,
        phi_total: last.phi_total,
        phi_u: last.phi_u,
        phi_v: last.phi_v,
        overlap_mag: last.overlap_mag,
        overlap_u_mag: if nu > 0.0 { math::modulus(ou) / nu } else { 0.0 },
        overlap_v_mag: if nv > 0.0 { math::modulus(ov) / nv } else { 0.0 },
        unitarity_drift: drift,
        series,
    })
}

/// Exact final state for a uniform α loop at fixed θ, `windings` turns in
/// time `T`: `ψ(T) = 𝒰(ωT) exp(−i(H(θ, α0) − ħωJ)T/ħ) ψ0` with
/// `J = σz/2` per site and `ω = 2π·windings/T`.
pub fn rotating_frame_reference(
    params: &ModelParams,
    spec: &LatticeSpec,
    start: &ParamPoint,
    windings: f64,
    total_time: f64,
    psi0: &NambuSpinor,
) -> Result<NambuSpinor> {
    let h = build_lattice(params, start, spec)?;
    let omega = math::TAU * windings / total_time;
    let hbar = params.hbar;
    let mut m = h.matrix;
    for i in 0..m.nrows() {
        let j = if i % 2 == 0 { 0.5 } else { -0.5 };
        m[(i, i)] -= c64::new(hbar * omega * j, 0.0);
    }
    let spec_m = Spectral::from_hermitian(&m)?;
    let mut v = spinor_to_vector(psi0);
    let mut scratch = alloc::vec![ZERO; v.len()];
    spec_m.propagate(&mut v, total_time, hbar, &mut scratch);
    lattice::rotate(&mut v, omega * total_time);
    vector_to_spinor(&v, psi0)
}

/// Tracked basis at one parameter point.
#[derive(Debug, Clone)]
pub struct TrackedFrame {
    pub spectral: Spectral,
    /// Unit vectors; column 0 is the tracked zero mode.
    pub basis: Vec<Vec<c64>>,
    /// `⟨b|h|b⟩` for each basis vector.
    pub energies: Vec<f64>,
}

/// Supplies the instantaneous tracked basis.
pub trait BasisTracker {
    fn frame(&self, point: &ParamPoint) -> Result<TrackedFrame>;
}

struct BaseFrame {
    spectral: Spectral,
    basis: Vec<Vec<c64>>,
    energies: Vec<f64>,
}

/// Interface Majorana, optionally its far-wall partner, plus the `levels`
/// eigenstates nearest to zero energy outside the near-zero pair.
pub struct LatticeTracker {
    params: ModelParams,
    spec: LatticeSpec,
    levels: usize,
    partner: bool,
    memo: Memo<BaseFrame>,
}

impl LatticeTracker {
    pub fn new(params: ModelParams, spec: LatticeSpec, partner: bool, levels: usize) -> Result<Self> {
        params.validate()?;
        spec.validate()?;
        Ok(Self { params, spec, levels, partner, memo: Memo::new(4) })
    }

    /// Zero doublet plus six nearest levels.
    pub fn standard(params: ModelParams, spec: LatticeSpec) -> Result<Self> {
        Self::new(params, spec, true, 6)
    }

    pub fn width(&self) -> usize {
        1 + usize::from(self.partner) + self.levels
    }

    fn base(&self, theta: f64) -> Result<Arc<BaseFrame>> {
        self.memo.get_or_try(theta.to_bits(), || {
            let h = build_lattice(&self.params, &ParamPoint::new(theta, 0.0)?, &self.spec)?;
            let spectral = Spectral::from_hermitian(&h.matrix)?;
            let rep = lattice::zero_mode_from_spectrum(&h, &spectral.values, &spectral.vectors, lattice::DEFAULT_TOL * self.params.delta)?;
            let vecs = &spectral.vectors;
            let dim = spectral.dim();
            let col = |c: usize| -> Vec<c64> { (0..dim).map(|i| vecs[(i, c)]).collect() };
            let mut order: Vec<usize> = (0..dim).collect();
            order.sort_by(|&i, &j| spectral.values[i].abs().total_cmp(&spectral.values[j].abs()));
            let near = rep.near_zero.len();
            let mut basis = alloc::vec![rep.vector.clone()];
            if self.partner {
                // orthogonal complement of the interface mode inside the near-zero space
                let mut best: Option<Vec<c64>> = None;
                for &c in &order[..near] {
                    let mut w = col(c);
                    let p = linalg::dot(&rep.vector, &w);
                    for (x, y) in w.iter_mut().zip(&rep.vector) {
                        *x -= *y * p;
                    }
                    let n = linalg::norm(&w);
                    if best.as_ref().map_or(true, |b| linalg::norm(b) < n) {
                        best = Some(w.iter().map(|z| *z / n).collect());
                    }
                }
                let mut wall = best.ok_or_else(|| invalid("no partner state"))?;
                lattice::majorana_gauge(&mut wall, 0);
                basis.push(wall);
            }
            for &c in order[near..].iter().take(self.levels) {
                basis.push(col(c));
            }
            let energies = basis.iter().map(|b| spectral.expectation(b)).collect();
            Ok(BaseFrame { spectral, basis, energies })
        })
    }
}

impl BasisTracker for LatticeTracker {
    fn frame(&self, point: &ParamPoint) -> Result<TrackedFrame> {
        point.validate()?;
        let base = self.base(point.theta)?;
        let basis = base
            .basis
            .iter()
            .map(|b| {
                let mut v = b.clone();
                lattice::rotate(&mut v, point.alpha);
                v
            })
            .collect();
        Ok(TrackedFrame {
            spectral: Spectral { frame: Some(rotation_phases(point.alpha)), ..base.spectral.clone() },
            basis,
            energies: base.energies.clone(),
        })
    }
}

/// Accumulated `T_M(C)` restricted to the tracked subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapProduct {
    /// `(Π_k M_k)_{00}`: tracked zero mode back onto itself.
    pub value: c64,
    /// `M_k[0][0] = ⟨m_k|exp(−i h(k) ε/ħ)|m_{k−1}⟩`.
    pub factors: Vec<c64>,
    /// `exp(−i E_k ε/ħ)` of the tracked zero mode at each step.
    pub dynamical: Vec<c64>,
    /// `ω_{n,0} = ⟨n_k|m_k⟩ − ⟨n_k|m_{k−1}⟩` per step, over the tracked levels.
    pub omega_log: Vec<Vec<c64>>,
    /// Full `d × d` accumulated product, row-major.
    pub transfer: Vec<c64>,
}

/// Overlap product over explicit points `R_0 … R_M` with time step `epsilon`.
/// For closed paths `R_M` is identified with `R_0` and reuses its frame.
pub fn overlap_product<T: BasisTracker + ?Sized>(
    tracker: &T,
    points: &[ParamPoint],
    epsilon: f64,
    closed: bool,
    hbar: f64,
) -> Result<OverlapProduct> {
    let first = tracker.frame(points.first().ok_or_else(|| invalid("need at least one point"))?)?;
    let d = first.basis.len();
    let mut transfer: Vec<c64> = (0..d * d).map(|i| if i % (d + 1) == 0 { c64::new(1.0, 0.0) } else { ZERO }).collect();
    let mut factors = Vec::new();
    let mut dynamical = Vec::new();
    let mut omega_log = Vec::new();
    let mut prev = first.clone();
    let m_steps = points.len().saturating_sub(1);
    for k in 1..=m_steps {
        let cur = if closed && k == m_steps { first.clone() } else { tracker.frame(&points[k])? };
        let dim = prev.basis[0].len();
        let mut scratch = alloc::vec![ZERO; dim];
        let mut mk = alloc::vec![ZERO; d * d];
        let mut step_omega = alloc::vec![ZERO; d];
        for m in 0..d {
            let mut w = prev.basis[m].clone();
            cur.spectral.propagate(&mut w, epsilon, hbar, &mut scratch);
            let mut kept = 0.0;
            for n in 0..d {
                mk[n * d + m] = linalg::dot(&cur.basis[n], &w);
                let o = linalg::dot(&cur.basis[n], &prev.basis[m]);
                kept += o.norm_sqr();
                if m == 0 {
                    step_omega[n] = linalg::dot(&cur.basis[n], &cur.basis[0]) - o;
                }
            }
            if kept < 0.5 {
                return Err(Error::BasisDiscontinuity { step: k, overlap: math::sqrt(kept) });
            }
        }
        let mut next = alloc::vec![ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                next[i * d + j] = (0..d).map(|l| mk[i * d + l] * transfer[l * d + j]).sum();
            }
        }
        transfer = next;
        factors.push(mk[0]);
        dynamical.push(math::cis(-cur.energies[0] * epsilon / hbar));
        omega_log.push(step_omega);
        prev = cur;
    }
    Ok(OverlapProduct { value: transfer[0], factors, dynamical, omega_log, transfer })
}

/// Overlap product with `R_k` sampled at `t_k = kε` along the schedule.
pub fn overlap_product_along<T: BasisTracker + ?Sized>(
    tracker: &T,
    sched: &Schedule,
    hbar: f64,
) -> Result<OverlapProduct> {
    let eps = sched.epsilon();
    let points: Vec<ParamPoint> = (0..=sched.n_steps).map(|k| sched.point_at(k as f64 * eps)).collect();
    overlap_product(tracker, &points, eps, sched.path.is_closed(), hbar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holonomy::{loop_phases, ParamPath};
    use crate::junction::View;
    use crate::lattice::{zero_mode_numeric, LatticeSampler};

    const HALF_PI: f64 = core::f64::consts::FRAC_PI_2;

    fn spec() -> LatticeSpec {
        LatticeSpec::centred(160, 0.2, 1.0)
    }

    fn mzes(params: &ModelParams, spec: &LatticeSpec, point: &ParamPoint) -> NambuSpinor {
        zero_mode_numeric(&build_lattice(params, point, spec).unwrap(), 1e-3).unwrap().spinor
    }

    #[test]
    fn zero_energy_state_is_stationary() {
        let p = ModelParams::default();
        let pt = ParamPoint::new(HALF_PI, 0.0).unwrap();
        let h = build_lattice(&p, &pt, &spec()).unwrap();
        let g = ConstantGenerator::new(&h.matrix).unwrap();
        let psi0 = mzes(&p, &spec(), &pt);
        let sched = Schedule::new(ParamPath::alpha_loop(HALF_PI, 0.0, 10).unwrap(), 37.0, 20).unwrap();
        let r = evolve(&g, &psi0, &sched, &EvolveOptions::default()).unwrap();
        assert!(r.phi_total.abs() < 1e-6);
        assert!((r.overlap_mag - 1.0).abs() < 1e-6);
        assert!(r.unitarity_drift < 1e-10);
    }

    #[test]
    fn sudden_limit_changes_nothing() {
        let p = ModelParams::default();
        let pt = ParamPoint::new(HALF_PI, 0.0).unwrap();
        let g = LatticeGenerator::new(p, spec()).unwrap();
        let psi0 = mzes(&p, &spec(), &pt);
        let sched = Schedule::new(ParamPath::alpha_loop(HALF_PI, 0.0, 10).unwrap(), 1e-3, 10).unwrap();
        let r = evolve(&g, &psi0, &sched, &EvolveOptions::default()).unwrap();
        assert!(r.phi_total.abs() < 1e-3);
        assert!((r.overlap_mag - 1.0).abs() < 1e-3);
    }

    #[test]
    fn non_hermitian_generator_is_rejected() {
        let mut m = Mat::<c64>::zeros(4, 4);
        m[(0, 1)] = c64::new(1.0, 0.0);
        assert!(matches!(ConstantGenerator::new(&m), Err(Error::NonHermitianGenerator { .. })));
    }

    #[test]
    fn covariant_generator_matches_direct_eigensolves() {
        let p = ModelParams { mu_fi: 0.1, ..Default::default() };
        let s = LatticeSpec::centred(64, 0.25, 1.0);
        let cov = LatticeGenerator::new(p, s).unwrap();
        let dir = LatticeGenerator::new(p, s).unwrap().with_evaluation(Evaluation::Direct);
        let psi0 = mzes(&p, &s, &ParamPoint::new(1.3, 0.0).unwrap());
        let sched = Schedule::new(ParamPath::alpha_loop(1.3, 0.0, 16).unwrap(), 6.0, 12).unwrap();
        let a = evolve(&cov, &psi0, &sched, &EvolveOptions::default()).unwrap();
        let b = evolve(&dir, &psi0, &sched, &EvolveOptions::default()).unwrap();
        assert!(a.final_state.distance(&b.final_state).unwrap() < 1e-10);
    }

    #[test]
    fn midpoint_error_is_second_order() {
        let p = ModelParams::default();
        let s = spec();
        let start = ParamPoint::new(HALF_PI, 0.0).unwrap();
        let psi0 = mzes(&p, &s, &start);
        let g = LatticeGenerator::new(p, s).unwrap();
        let t = 20.0;
        let exact = rotating_frame_reference(&p, &s, &start, 1.0, t, &psi0).unwrap();
        let err = |n| {
            let sched = Schedule::new(ParamPath::alpha_loop(HALF_PI, 0.0, 100).unwrap(), t, n).unwrap();
            evolve(&g, &psi0, &sched, &EvolveOptions::default()).unwrap().final_state.distance(&exact).unwrap()
        };
        let r = err(40) / err(80);
        assert!((3.5..4.5).contains(&r), "{r}");
    }

    #[test]
    fn global_phase_does_not_move_phi_total() {
        let p = ModelParams::default();
        let s = spec();
        let psi0 = mzes(&p, &s, &ParamPoint::new(HALF_PI, 0.0).unwrap());
        let g = LatticeGenerator::new(p, s).unwrap();
        let sched = Schedule::new(ParamPath::alpha_loop(HALF_PI, 0.0, 100).unwrap(), 30.0, 60).unwrap();
        let a = evolve(&g, &psi0, &sched, &EvolveOptions::default()).unwrap();
        let b = evolve(&g, &psi0.clone().scaled(math::cis(0.8)), &sched, &EvolveOptions::default()).unwrap();
        assert!((a.phi_total - b.phi_total).abs() < 1e-12);
    }

    #[test]
    fn zero_length_product_is_one() {
        let t = LatticeTracker::standard(ModelParams::default(), spec()).unwrap();
        let r = overlap_product(&t, &[ParamPoint::new(HALF_PI, 0.0).unwrap()], 0.1, false, 1.0).unwrap();
        assert_eq!(r.value, c64::new(1.0, 0.0));
        assert!(r.factors.is_empty());
    }

    #[test]
    fn tracked_mzes_has_no_dynamical_phase() {
        let t = LatticeTracker::standard(ModelParams::default(), spec()).unwrap();
        for (time, steps) in [(5.0, 20), (200.0, 50)] {
            let sched = Schedule::new(ParamPath::alpha_loop(HALF_PI, 0.0, 40).unwrap(), time, steps).unwrap();
            let r = overlap_product_along(&t, &sched, 1.0).unwrap();
            assert!(r.dynamical.iter().all(|z| math::modulus(*z - c64::new(1.0, 0.0)) < 1e-8));
            assert!(r.factors.iter().all(|z| math::modulus(*z) <= 1.0 + 1e-10));
        }
    }

    #[test]
    fn single_level_product_reduces_to_wilson_phase() {
        let p = ModelParams::default();
        let t = LatticeTracker::new(p, spec(), false, 0).unwrap();
        let sched = Schedule::new(ParamPath::alpha_loop(HALF_PI, 0.0, 40).unwrap(), 400.0, 400).unwrap();
        let r = overlap_product_along(&t, &sched, 1.0).unwrap();
        let s = LatticeSampler::new(p, spec()).unwrap().with_view(View::Eigenstate);
        let w = loop_phases(&s, &ParamPath::alpha_loop(HALF_PI, 0.0, 400).unwrap()).unwrap();
        // the product runs ⟨m_k|m_{k−1}⟩, the Wilson sum ⟨m_k|m_{k+1}⟩
        let d = math::wrap_phase(math::arg(r.value) + w.gamma_total);
        assert!(d.abs() < 1e-2, "{d}");
    }
}
