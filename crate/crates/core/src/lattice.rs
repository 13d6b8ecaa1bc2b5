//! Tight-binding discretization of the junction, used as an independent oracle.
//!
//! Site `j` sits at `x_j = (j − i0 + ½) a`; sites `j < i0` are FI, the rest SC.
//! `−i∂x` becomes a central difference and a Wilson term
//! `(r/a)(1 − cos ka) τx` gaps the doublers at `ka = π`. The Wilson mass is
//! even in `k` and odd under `C`, so the lattice keeps particle-hole symmetry,
//! and it commutes with spin rotations about z, so
//! `H(θ, α) = 𝒰(α) H(θ, 0) 𝒰(α)†` with `𝒰 = e^{−iα σz/2}` on every site.

use alloc::sync::Arc;
use alloc::vec::Vec;

use faer::{c64, Mat};

use crate::bdg::{
    conjugate_hamiltonian_site, onsite_block, to_storage_order, Grid, ModelParams, NambuSpinor, ParamPoint, Region,
    KINETIC_DIAG,
};
use crate::cache::Memo;
use crate::error::{invalid, Error, Result};
use crate::holonomy::SpinorSampler;
use crate::junction::{self, View};
use crate::linalg::{self, ZERO};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSpec {
    pub n_sites: usize,
    pub spacing: f64,
    pub wilson_r: f64,
    pub interface_site: usize,
}

impl Default for LatticeSpec {
    fn default() -> Self {
        Self { n_sites: 400, spacing: 0.1, wilson_r: 1.0, interface_site: 200 }
    }
}

impl LatticeSpec {
    /// `n_sites` sites with the interface in the middle.
    pub fn centred(n_sites: usize, spacing: f64, wilson_r: f64) -> Self {
        Self { n_sites, spacing, wilson_r, interface_site: n_sites / 2 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 64 {
            return Err(invalid("lattice needs at least 64 sites"));
        }
        if !(self.spacing > 0.0) || !self.spacing.is_finite() {
            return Err(invalid("lattice spacing must be positive"));
        }
        if !self.wilson_r.is_finite() || self.wilson_r < 0.0 {
            return Err(invalid("wilson_r must be finite and non-negative"));
        }
        if self.interface_site == 0 || self.interface_site >= self.n_sites {
            return Err(invalid("interface site must be strictly inside the chain"));
        }
        Ok(())
    }

    pub fn position(&self, j: usize) -> f64 {
        (j as f64 - self.interface_site as f64 + 0.5) * self.spacing
    }

    pub fn grid(&self) -> Result<Arc<Grid>> {
        let x = (0..self.n_sites).map(|j| self.position(j)).collect();
        Ok(Arc::new(Grid::lattice(x, self.spacing)?.with_interface(self.interface_site)?))
    }
}

/// Which fields occupy the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    Junction,
    UniformSc,
    UniformFi,
    /// No chemical potential, magnetization or pairing.
    Free,
}

/// Dense `4N × 4N` Hermitian matrix, site-major, Hamiltonian order per site.
#[derive(Debug, Clone)]
pub struct LatticeHamiltonian {
    pub matrix: Mat<c64>,
    pub params: ModelParams,
    pub point: ParamPoint,
    pub spec: LatticeSpec,
    pub layout: Layout,
}

impl LatticeHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

pub fn build_lattice(params: &ModelParams, point: &ParamPoint, spec: &LatticeSpec) -> Result<LatticeHamiltonian> {
    build_layout(params, point, spec, Layout::Junction)
}

pub fn build_layout(
    params: &ModelParams,
    point: &ParamPoint,
    spec: &LatticeSpec,
    layout: Layout,
) -> Result<LatticeHamiltonian> {
    params.validate()?;
    point.validate()?;
    spec.validate()?;
    let n = spec.n_sites;
    let a = spec.spacing;
    let r = spec.wilson_r;
    let hv = params.hv();
    let fi = onsite_block(params, point, Region::Fi);
    let sc = onsite_block(params, point, Region::Sc);
    let mut h = Mat::<c64>::zeros(4 * n, 4 * n);
    for j in 0..n {
        let block = match layout {
            Layout::Junction => Some(if j < spec.interface_site { &fi } else { &sc }),
            Layout::UniformFi => Some(&fi),
            Layout::UniformSc => Some(&sc),
            Layout::Free => None,
        };
        let o = 4 * j;
        if let Some(b) = block {
            for p in 0..4 {
                for q in 0..4 {
                    h[(o + p, o + q)] = b[p][q];
                }
            }
        }
        for (p, q) in [(0, 2), (2, 0), (1, 3), (3, 1)] {
            h[(o + p, o + q)] += c64::new(r / a, 0.0);
        }
        if j + 1 < n {
            let o2 = o + 4;
            for p in 0..4 {
                // −i ħv/(2a) τzσz
                let t = c64::new(0.0, -KINETIC_DIAG[p] * hv / (2.0 * a));
                h[(o + p, o2 + p)] = t;
                h[(o2 + p, o + p)] = t.conj();
            }
            for (p, q) in [(0, 2), (2, 0), (1, 3), (3, 1)] {
                let w = c64::new(-r / (2.0 * a), 0.0);
                h[(o + p, o2 + q)] = w;
                h[(o2 + q, o + p)] = w;
            }
        }
    }
    Ok(LatticeHamiltonian { matrix: h, params: *params, point: *point, spec: *spec, layout })
}

/// Per-site phases of `𝒰(α)` in Hamiltonian order.
pub fn rotation_phases(alpha: f64) -> [c64; 4] {
    let m = math::cis(-0.5 * alpha);
    let p = m.conj();
    [m, p, m, p]
}

/// Applies `𝒰(α)` to a site-major Hamiltonian-order vector in place.
pub fn rotate(v: &mut [c64], alpha: f64) {
    let ph = rotation_phases(alpha);
    for (i, z) in v.iter_mut().enumerate() {
        *z *= ph[i % 4];
    }
}

/// Result of the numerical zero-mode search.
#[derive(Debug, Clone)]
pub struct ZeroModeReport {
    /// Smallest `|E|` in the spectrum.
    pub energy: f64,
    /// Interface-localized Majorana state; weights `a` per site.
    pub spinor: NambuSpinor,
    /// Weight of `spinor` within the interface window.
    pub localization: f64,
    /// Next `|E|` outside the near-zero set over `energy`.
    pub gap_ratio: f64,
    /// Half-width of the interface window.
    pub window: f64,
    /// Eigenvalues with `|E| < tol`.
    pub near_zero: Vec<f64>,
    /// The same state as a unit ℓ² vector, site-major Hamiltonian order.
    pub vector: Vec<c64>,
}

/// Decay length used for the interface window.
fn decay_length(params: &ModelParams, theta: f64) -> f64 {
    let sc = params.hv() / params.delta;
    match junction::derived_params(params, theta) {
        Ok(d) => sc.max(1.0 / d.k_f),
        Err(_) => sc,
    }
}

/// Interface Majorana from a full eigensolve.
///
/// The near-zero eigenpair of a finite chain splits its weight between the
/// interface and the far FI wall. The state returned is the combination of
/// the `|E| < tol` eigenvectors with the largest weight within
/// `min(10 ξ, half the distance to the nearest wall)` of the interface, put
/// into the Majorana gauge `Cψ = ψ` with `Re u↑(i0) ≥ 0`.
pub fn zero_mode_numeric(h: &LatticeHamiltonian, tol: f64) -> Result<ZeroModeReport> {
    let (values, vectors) = linalg::hermitian_eigen(&h.matrix)?;
    zero_mode_from_spectrum(h, &values, &vectors, tol)
}

pub fn zero_mode_from_spectrum(
    h: &LatticeHamiltonian,
    values: &[f64],
    vectors: &Mat<c64>,
    tol: f64,
) -> Result<ZeroModeReport> {
    let spec = &h.spec;
    let dim = values.len();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| math::abs(values[i]).total_cmp(&math::abs(values[j])));
    let lowest = math::abs(values[order[0]]);
    let near: Vec<usize> = order.iter().copied().take_while(|&i| math::abs(values[i]) < tol).collect();
    if near.is_empty() {
        return Err(Error::NoLocalizedZeroMode { lowest, localization: 0.0 });
    }

    let i0 = spec.interface_site;
    let to_wall = (i0.min(spec.n_sites - i0)) as f64 * spec.spacing;
    let window = (10.0 * decay_length(&h.params, h.point.theta)).min(0.5 * to_wall);
    let inside: Vec<usize> = (0..spec.n_sites).filter(|&j| math::abs(spec.position(j)) < window).collect();
    let d = near.len();
    let g = Mat::<c64>::from_fn(d, d, |p, q| {
        let (cp, cq) = (near[p], near[q]);
        let mut acc = ZERO;
        for &j in &inside {
            for c in 0..4 {
                acc += vectors[(4 * j + c, cp)].conj() * vectors[(4 * j + c, cq)];
            }
        }
        acc
    });
    let (w, coef) = linalg::hermitian_eigen(&g)?;
    let localization = w[d - 1].clamp(0.0, 1.0);
    if localization < 0.8 {
        return Err(Error::NoLocalizedZeroMode { lowest, localization });
    }
    let mut psi = alloc::vec![ZERO; dim];
    for (p, &col) in near.iter().enumerate() {
        let c = coef[(p, d - 1)];
        for (i, z) in psi.iter_mut().enumerate() {
            *z += vectors[(i, col)] * c;
        }
    }
    majorana_gauge(&mut psi, i0);
    let n = linalg::norm(&psi);
    for z in psi.iter_mut() {
        *z /= n;
    }
    let gap_ratio = match order.get(d) {
        Some(&next) if lowest > 0.0 => math::abs(values[next]) / lowest,
        Some(_) => f64::INFINITY,
        None => 0.0,
    };
    let spinor = to_spinor(&psi, spec)?;
    Ok(ZeroModeReport {
        energy: lowest,
        spinor,
        localization,
        gap_ratio,
        window,
        near_zero: near.iter().map(|&i| values[i]).collect(),
        vector: psi,
    })
}

/// `ψ ↦ e^{iζ/2} ψ` with `ζ = arg⟨ψ|Cψ⟩`, then the sign with `Re u↑(anchor) ≥ 0`.
pub fn majorana_gauge(psi: &mut [c64], anchor_site: usize) {
    let mut z = ZERO;
    for site in 0..psi.len() / 4 {
        let s = [psi[4 * site], psi[4 * site + 1], psi[4 * site + 2], psi[4 * site + 3]];
        let c = conjugate_hamiltonian_site(s);
        for k in 0..4 {
            z += s[k].conj() * c[k];
        }
    }
    let f = math::cis(0.5 * math::arg(z));
    let sign = if (psi[4 * anchor_site] * f).re < 0.0 { -1.0 } else { 1.0 };
    for v in psi.iter_mut() {
        *v *= f * sign;
    }
}

/// Unit ℓ² vector (Hamiltonian order) to a spinor normalized with weights `a`.
pub fn to_spinor(v: &[c64], spec: &LatticeSpec) -> Result<NambuSpinor> {
    let s = 1.0 / math::sqrt(spec.spacing);
    let values = (0..spec.n_sites)
        .map(|j| {
            let h = [v[4 * j] * s, v[4 * j + 1] * s, v[4 * j + 2] * s, v[4 * j + 3] * s];
            to_storage_order(h)
        })
        .collect();
    NambuSpinor::new(spec.grid()?, values)
}

/// Largest `|E + E'|` after pairing the sorted spectrum with its reverse.
pub fn particle_hole_defect(values: &[f64]) -> f64 {
    let n = values.len();
    (0..n).map(|i| math::abs(values[i] + values[n - 1 - i])).fold(0.0, f64::max)
}

/// How sampled states are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evaluation {
    /// One eigensolve per θ, rotated by `𝒰(α)`.
    Covariant,
    /// A fresh eigensolve at every point.
    Direct,
}

struct ThetaMode {
    vector: Vec<c64>,
    energy: f64,
}

/// Numerical zero mode as a spinor sampler.
pub struct LatticeSampler {
    params: ModelParams,
    spec: LatticeSpec,
    tol: f64,
    view: View,
    evaluation: Evaluation,
    memo: Memo<ThetaMode>,
}

/// Default near-zero selection tolerance, in units of Δ.
pub const DEFAULT_TOL: f64 = 1e-3;

impl LatticeSampler {
    pub fn new(params: ModelParams, spec: LatticeSpec) -> Result<Self> {
        params.validate()?;
        spec.validate()?;
        Ok(Self {
            params,
            spec,
            tol: DEFAULT_TOL * params.delta,
            view: View::MajoranaFrame,
            evaluation: Evaluation::Covariant,
            memo: Memo::new(8),
        })
    }

    pub fn with_view(mut self, view: View) -> Self {
        self.view = view;
        self
    }

    pub fn with_evaluation(mut self, evaluation: Evaluation) -> Self {
        self.evaluation = evaluation;
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    fn base(&self, theta: f64) -> Result<Arc<ThetaMode>> {
        self.memo.get_or_try(theta.to_bits(), || {
            let h = build_lattice(&self.params, &ParamPoint::new(theta, 0.0)?, &self.spec)?;
            let rep = zero_mode_numeric(&h, self.tol)?;
            Ok(ThetaMode { vector: rep.vector, energy: rep.energy })
        })
    }

    /// Smallest `|E|` at polar angle θ.
    pub fn energy(&self, theta: f64) -> Result<f64> {
        Ok(self.base(theta)?.energy)
    }

    /// The physical interface Majorana at `point` as a unit ℓ² vector.
    pub fn vector(&self, point: &ParamPoint) -> Result<Vec<c64>> {
        point.validate()?;
        match self.evaluation {
            Evaluation::Covariant => {
                let mut v = self.base(point.theta)?.vector.clone();
                rotate(&mut v, point.alpha);
                Ok(v)
            }
            Evaluation::Direct => {
                let h = build_lattice(&self.params, point, &self.spec)?;
                Ok(zero_mode_numeric(&h, self.tol)?.vector)
            }
        }
    }
}

impl SpinorSampler for LatticeSampler {
    fn sample(&self, point: &ParamPoint) -> Result<NambuSpinor> {
        let psi = to_spinor(&self.vector(point)?, &self.spec)?;
        Ok(match self.view {
            View::MajoranaFrame => junction::majorana_frame(&psi),
            View::Eigenstate => {
                let z = psi.values()[self.spec.interface_site][0];
                let r = math::modulus(z);
                let f = if r > 0.0 { z.conj() / r } else { c64::new(1.0, 0.0) };
                psi.scaled(f)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bdg::{inner_product, majorana_residual};
    use crate::holonomy::{loop_phases, ParamPath};

    const HALF_PI: f64 = core::f64::consts::FRAC_PI_2;

    fn small() -> LatticeSpec {
        LatticeSpec::centred(160, 0.2, 1.0)
    }

    #[test]
    fn hermitian_and_block_tridiagonal() {
        let p = ModelParams { mu_fi: 0.2, mu_sc: 0.3, ..Default::default() };
        let h = build_lattice(&p, &ParamPoint::new(1.0, 0.4).unwrap(), &small()).unwrap();
        assert!(linalg::hermiticity_defect(&h.matrix) < 1e-13);
        for i in 0..h.dim() {
            for j in 0..h.dim() {
                if (i / 4).abs_diff(j / 4) > 1 {
                    assert_eq!(h.matrix[(i, j)], ZERO);
                }
            }
        }
    }

    #[test]
    fn spectrum_is_particle_hole_symmetric() {
        let p = ModelParams { mu_fi: 0.2, mu_sc: 0.3, ..Default::default() };
        let h = build_lattice(&p, &ParamPoint::new(1.0, 0.4).unwrap(), &small()).unwrap();
        let e = linalg::hermitian_eigenvalues(&h.matrix).unwrap();
        assert!(particle_hole_defect(&e) < 1e-10);
    }

    #[test]
    fn rotation_covariance_is_exact() {
        let p = ModelParams { mu_fi: 0.1, ..Default::default() };
        let spec = LatticeSpec::centred(64, 0.2, 1.0);
        let h0 = build_lattice(&p, &ParamPoint::new(1.2, 0.0).unwrap(), &spec).unwrap();
        let h1 = build_lattice(&p, &ParamPoint::new(1.2, 0.9).unwrap(), &spec).unwrap();
        let ph = rotation_phases(0.9);
        for i in 0..h0.dim() {
            for j in 0..h0.dim() {
                let want = ph[i % 4] * h0.matrix[(i, j)] * ph[j % 4].conj();
                assert!(math::modulus(want - h1.matrix[(i, j)]) < 1e-14);
            }
        }
    }

    #[test]
    fn junction_hosts_interface_majorana() {
        let h = build_lattice(&ModelParams::default(), &ParamPoint::new(HALF_PI, 0.3).unwrap(), &small()).unwrap();
        let rep = zero_mode_numeric(&h, 1e-3).unwrap();
        assert!(rep.energy < 1e-4);
        assert!(rep.gap_ratio > 50.0);
        assert!(rep.localization > 0.99);
        assert_eq!(rep.near_zero.len(), 2);
        assert!(majorana_residual(&rep.spinor) < 1e-6);
        let n = inner_product(&rep.spinor, &rep.spinor).unwrap();
        assert!((n.re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gapped_and_propagating_chains_have_no_zero_mode() {
        let p = ModelParams::default();
        let pt = ParamPoint::new(HALF_PI, 0.0).unwrap();
        let sc = build_layout(&p, &pt, &small(), Layout::UniformSc).unwrap();
        let e = linalg::hermitian_eigenvalues(&sc.matrix).unwrap();
        let gap = e.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
        assert!(gap > 0.98, "gap {gap}");
        assert!(matches!(zero_mode_numeric(&sc, 1e-3), Err(Error::NoLocalizedZeroMode { .. })));

        let p = ModelParams { mu_fi: 1.2, ..Default::default() };
        let h = build_lattice(&p, &pt, &small()).unwrap();
        assert!(matches!(zero_mode_numeric(&h, 1e-3), Err(Error::NoLocalizedZeroMode { .. })));
    }

    #[test]
    fn free_chain_is_gapless_and_symmetric() {
        let p = ModelParams::default();
        let pt = ParamPoint::new(HALF_PI, 0.0).unwrap();
        let mut prev = f64::INFINITY;
        for n in [80, 160, 320] {
            let h = build_layout(&p, &pt, &LatticeSpec::centred(n, 0.2, 1.0), Layout::Free).unwrap();
            let e = linalg::hermitian_eigenvalues(&h.matrix).unwrap();
            assert!(particle_hole_defect(&e) < 1e-10);
            let low = e.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
            assert!(low < prev);
            prev = low;
        }
        assert!(prev < 0.1);
    }

    #[test]
    fn doublers_spoil_the_zero_mode_without_wilson_term() {
        let p = ModelParams::default();
        let pt = ParamPoint::new(HALF_PI, 0.0).unwrap();
        let h = build_lattice(&p, &pt, &LatticeSpec::centred(160, 0.2, 0.0)).unwrap();
        assert!(matches!(zero_mode_numeric(&h, 1e-3), Err(Error::NoLocalizedZeroMode { .. })));
    }

    #[test]
    fn covariant_and_direct_samplers_agree() {
        let p = ModelParams { mu_fi: 0.2, ..Default::default() };
        let cov = LatticeSampler::new(p, small()).unwrap();
        let dir = LatticeSampler::new(p, small()).unwrap().with_evaluation(Evaluation::Direct);
        for alpha in [0.0, 1.3, 4.0] {
            let pt = ParamPoint::new(1.1, alpha).unwrap();
            let a = cov.sample(&pt).unwrap();
            let b = dir.sample(&pt).unwrap();
            assert!(a.distance(&b).unwrap() < 1e-8);
        }
    }

    #[test]
    fn lattice_loop_matches_analytic_values() {
        let s = LatticeSampler::new(ModelParams::default(), small()).unwrap();
        let r = loop_phases(&s, &ParamPath::alpha_loop(HALF_PI, 0.0, 100).unwrap()).unwrap();
        assert!((r.gamma_u - math::PI).abs() < 1e-2);
        assert!((r.gamma_v + math::PI).abs() < 1e-2);
        assert!(r.gamma_total.abs() < 1e-4);
        let e = LatticeSampler::new(ModelParams::default(), small()).unwrap().with_view(View::Eigenstate);
        let r = loop_phases(&e, &ParamPath::alpha_loop(HALF_PI, 0.0, 100).unwrap()).unwrap();
        assert!(math::wrap_phase(r.gamma_total - math::PI).abs() < 1e-4);
    }
}
