//! Zero-energy bound state of the FI | SC edge junction.
//!
//! Each half-line carries evanescent solutions `χ e^{λx}` of `H(−iλ) χ = 0`
//! (FI for `x < 0`, SC for `x > 0`). A Majorana state is built from one
//! mode and its particle-hole partner, `a χ e^{λx} + a* Cχ e^{λ* x}`, and the
//! real coefficients `(Re a, Im a, Re m, Im m)` follow from continuity at
//! `x = 0`.

use alloc::sync::Arc;
use alloc::vec::Vec;

use faer::{c64, Mat};

use crate::bdg::{
    self, conjugate_hamiltonian_site, onsite_block, to_storage_order, Grid, ModelParams, NambuSpinor, ParamPoint,
    Region, KINETIC_DIAG,
};
use crate::error::{invalid, Error, Result};
use crate::holonomy::SpinorSampler;
use crate::linalg::{self, I, ZERO};
use crate::math;

/// Decay lengths kept on each side of the default grid.
pub const DECAY_LENGTHS: f64 = 12.0;
/// Intervals per side of the default grid.
pub const INTERVALS_PER_SIDE: usize = 2000;

/// Closed-form quantities that follow from the model parameters and θ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    /// In-plane magnetization `m |sin θ|`.
    pub m_par: f64,
    /// Internal phase with `e^{iφ} = (i√(m∥² − μ_F²) + μ_F)/m∥`.
    pub phi: f64,
    pub exp_i_phi: c64,
    /// FI decay constant `√(m∥² − μ_F²)/ħv_f`.
    pub k_f: f64,
    /// SC decay constant `Δ/ħv_f`.
    pub k_sc: f64,
    /// SC oscillation wavevector, `|Im λ|` of the solved SC modes.
    pub k_msc: f64,
    /// The alternative closed form `m∥/μ_SC/ħv_f`, reported for comparison only.
    pub k_msc_alt: Option<f64>,
    /// FI oscillation from the out-of-plane component, `m cos θ/ħv_f`.
    pub k_m_fi: f64,
}

pub fn derived_params(params: &ModelParams, theta: f64) -> Result<DerivedParams> {
    params.validate()?;
    if !theta.is_finite() {
        return Err(invalid("theta must be finite"));
    }
    let m_par = params.m * math::abs(math::sin(theta));
    if m_par <= 1e-12 * params.m {
        return Err(Error::DegenerateInPlane { theta });
    }
    let mu = params.mu_fi;
    if m_par <= math::abs(mu) {
        return Err(Error::EvanescentConditionViolated { m_par, mu_fi: mu });
    }
    let s = math::sqrt(m_par * m_par - mu * mu);
    let exp_i_phi = c64::new(mu, s) / m_par;
    let hv = params.hv();
    let sc = evanescent_modes(params, &ParamPoint { theta: math::PI / 2.0, alpha: 0.0 }, Region::Sc)?;
    let k_msc = math::abs(sc[0].lambda.im);
    let k_msc_alt = if params.mu_sc != 0.0 { Some(m_par / params.mu_sc / hv) } else { None };
    Ok(DerivedParams {
        m_par,
        phi: math::atan2(s, mu),
        exp_i_phi,
        k_f: s / hv,
        k_sc: params.delta / hv,
        k_msc,
        k_msc_alt,
        k_m_fi: params.m * math::cos(theta) / hv,
    })
}

/// Zero-energy solution `χ e^{λx}` of one region. `chi` is in Hamiltonian order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvanescentMode {
    pub lambda: c64,
    pub chi: [c64; 4],
}

impl EvanescentMode {
    /// `‖H(k = −iλ) χ‖`.
    pub fn kernel_residual(&self, params: &ModelParams, point: &ParamPoint, region: Region) -> Result<f64> {
        let h = bdg::bdg_kernel(params, point, region, -I * self.lambda)?;
        Ok(linalg::norm(&linalg::mat4_apply(&h, &self.chi)))
    }

    fn partner(&self) -> Self {
        Self { lambda: self.lambda.conj(), chi: conjugate_hamiltonian_site(self.chi) }
    }

    fn at(&self, x: f64) -> [c64; 4] {
        let e = math::cexp(self.lambda * x);
        [self.chi[0] * e, self.chi[1] * e, self.chi[2] * e, self.chi[3] * e]
    }
}

/// Components whose weight selects the primary mode of a region.
fn channel(region: Region) -> [usize; 2] {
    match region {
        // electron (u↑, u↓)
        Region::Fi => [0, 1],
        // u↑ paired with v↓
        Region::Sc => [0, 2],
    }
}

fn channel_weight(v: &[c64; 4], region: Region) -> f64 {
    channel(region).iter().map(|&i| v[i].norm_sqr()).sum::<f64>() / v.iter().map(|z| z.norm_sqr()).sum::<f64>()
}

/// Decaying zero-energy modes of `region`: the primary mode followed by its
/// particle-hole partner.
///
/// `H(k) = H0 + k ħv τzσz`, so `H(−iλ)χ = 0` becomes the eigenproblem
/// `τzσz H0/ħv χ = iλ χ`. FI modes must grow toward the interface from the
/// left (`Re λ > 0`), SC modes decay to the right (`Re λ < 0`).
pub fn evanescent_modes(params: &ModelParams, point: &ParamPoint, region: Region) -> Result<Vec<EvanescentMode>> {
    params.validate()?;
    point.validate()?;
    let h0 = onsite_block(params, point, region);
    let hv = params.hv();
    let m = Mat::<c64>::from_fn(4, 4, |i, j| h0[i][j] * (KINETIC_DIAG[i] / hv));
    let (mu, vecs) = linalg::general_eigen(&m)?;
    let scale = mu.iter().map(|z| math::modulus(*z)).fold(1.0, f64::max);
    let sign = match region {
        Region::Fi => 1.0,
        Region::Sc => -1.0,
    };
    let decaying: Vec<(c64, [c64; 4])> = mu
        .iter()
        .enumerate()
        .map(|(j, z)| (-I * z, [vecs[(0, j)], vecs[(1, j)], vecs[(2, j)], vecs[(3, j)]]))
        .filter(|(l, _)| sign * l.re > 1e-9 * scale)
        .collect();
    if decaying.is_empty() {
        return Err(Error::NoDecayingMode(region));
    }
    let best = decaying
        .iter()
        .enumerate()
        .max_by(|a, b| channel_weight(&a.1 .1, region).total_cmp(&channel_weight(&b.1 .1, region)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let lambda = decaying[best].0;
    let cluster: Vec<[c64; 4]> = decaying
        .iter()
        .filter(|(l, _)| math::modulus(*l - lambda) < 1e-8 * scale)
        .map(|(_, v)| *v)
        .collect();
    let mut chi = if cluster.len() > 1 { purest_combination(&cluster, region)? } else { cluster[0] };
    let n = linalg::norm(&chi);
    let anchor = chi[0];
    let phase = if math::modulus(anchor) > 1e-12 { anchor.conj() / math::modulus(anchor) } else { c64::new(1.0, 0.0) };
    for z in chi.iter_mut() {
        *z = *z * phase / n;
    }
    let primary = EvanescentMode { lambda, chi };
    let partner = primary.partner();
    if math::modulus(linalg::dot(&primary.chi, &partner.chi)) > 1.0 - 1e-6 {
        return Err(Error::NoDecayingMode(region));
    }
    Ok(alloc::vec![primary, partner])
}

/// Within a degenerate cluster, the unit vector with the largest channel weight.
fn purest_combination(cluster: &[[c64; 4]], region: Region) -> Result<[c64; 4]> {
    let mut basis: Vec<[c64; 4]> = Vec::new();
    for v in cluster {
        let mut w = *v;
        for b in &basis {
            let c = linalg::dot(b, &w);
            for k in 0..4 {
                w[k] -= b[k] * c;
            }
        }
        let n = linalg::norm(&w);
        if n > 1e-8 {
            basis.push([w[0] / n, w[1] / n, w[2] / n, w[3] / n]);
        }
    }
    let d = basis.len();
    let ch = channel(region);
    let g = Mat::<c64>::from_fn(d, d, |i, j| ch.iter().map(|&c| basis[i][c].conj() * basis[j][c]).sum());
    let (_, vecs) = linalg::hermitian_eigen(&g)?;
    let top = d - 1;
    let mut out = [ZERO; 4];
    for (i, b) in basis.iter().enumerate() {
        for k in 0..4 {
            out[k] += b[k] * vecs[(i, top)];
        }
    }
    Ok(out)
}

/// Two-sided grid covering `DECAY_LENGTHS` decay lengths on each side for
/// every θ in `thetas`.
pub fn default_grid(params: &ModelParams, thetas: &[f64]) -> Result<Arc<Grid>> {
    let mut k_min = f64::INFINITY;
    for &t in thetas {
        k_min = k_min.min(derived_params(params, t)?.k_f);
    }
    if thetas.is_empty() {
        return Err(invalid("need at least one theta"));
    }
    let k_sc = params.delta / params.hv();
    Ok(Arc::new(Grid::two_sided(DECAY_LENGTHS / k_min, DECAY_LENGTHS / k_sc, INTERVALS_PER_SIDE)?))
}

/// Matched and normalized zero-energy solution at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundState {
    pub point: ParamPoint,
    /// `(a_e, m_e)`: FI and SC mode coefficients after normalization.
    pub coeffs: (c64, c64),
    pub fi_mode: EvanescentMode,
    pub sc_mode: EvanescentMode,
    pub spinor: NambuSpinor,
    pub energy: f64,
    pub match_residual: f64,
    /// Singular values of the real matching system, descending.
    pub singular_values: [f64; 4],
    pub derived: DerivedParams,
}

fn majorana_pair(mode: &EvanescentMode, coeff: c64, x: f64) -> [c64; 4] {
    let a = mode.at(x);
    let b = mode.partner().at(x);
    let c = coeff.conj();
    [a[0] * coeff + b[0] * c, a[1] * coeff + b[1] * c, a[2] * coeff + b[2] * c, a[3] * coeff + b[3] * c]
}

/// Solves the interface matching on the default grid.
pub fn match_interface(params: &ModelParams, point: &ParamPoint) -> Result<BoundState> {
    let grid = default_grid(params, &[point.theta])?;
    match_interface_on(params, point, grid)
}

/// Solves the interface matching and samples the state on `grid`.
pub fn match_interface_on(params: &ModelParams, point: &ParamPoint, grid: Arc<Grid>) -> Result<BoundState> {
    point.validate()?;
    let derived = derived_params(params, point.theta)?;
    let fi = evanescent_modes(params, point, Region::Fi)?[0];
    let sc = evanescent_modes(params, point, Region::Sc)?[0];
    let cf = conjugate_hamiltonian_site(fi.chi);
    let cs = conjugate_hamiltonian_site(sc.chi);
    let mut cols = [[ZERO; 4]; 4];
    for k in 0..4 {
        cols[0][k] = fi.chi[k] + cf[k];
        cols[1][k] = I * fi.chi[k] - I * cf[k];
        cols[2][k] = -(sc.chi[k] + cs[k]);
        cols[3][k] = -(I * sc.chi[k] - I * cs[k]);
    }
    let a = Mat::<f64>::from_fn(8, 4, |r, c| {
        let z = cols[c][r / 2];
        if r % 2 == 0 {
            z.re
        } else {
            z.im
        }
    });
    let (s, v) = linalg::real_svd(&a)?;
    let sv = [s[0], s[1], s[2], s[3]];
    if sv[3] > 1e-8 * sv[0] {
        return Err(Error::NoZeroMode { ratio: sv[3] / sv[0] });
    }
    if sv[2] <= 10.0 * sv[3] {
        return Err(Error::DegenerateZeroMode { smallest: sv[3], second: sv[2] });
    }
    let mut ae = c64::new(v[(0, 3)], v[(1, 3)]);
    let mut me = c64::new(v[(2, 3)], v[(3, 3)]);
    if ae.re < 0.0 || (ae.re == 0.0 && ae.im < 0.0) {
        ae = -ae;
        me = -me;
    }
    let left = majorana_pair(&fi, ae, 0.0);
    let right = majorana_pair(&sc, me, 0.0);
    let scale = linalg::norm(&left).max(1e-300);
    let mut diff = [ZERO; 4];
    for k in 0..4 {
        diff[k] = left[k] - right[k];
    }
    let match_residual = linalg::norm(&diff) / scale;

    let values: Vec<[c64; 4]> = grid
        .positions()
        .iter()
        .map(|&x| {
            let h = if x < 0.0 { majorana_pair(&fi, ae, x) } else { majorana_pair(&sc, me, x) };
            to_storage_order(h)
        })
        .collect();
    let raw = NambuSpinor::new(grid, values)?;
    let n = raw.norm();
    let spinor = raw.scaled(c64::new(1.0 / n, 0.0));
    Ok(BoundState {
        point: *point,
        coeffs: (ae / n, me / n),
        fi_mode: fi,
        sc_mode: sc,
        spinor,
        energy: 0.0,
        match_residual,
        singular_values: sv,
        derived,
    })
}

/// `e^{iθ}` that makes `u↑` at the grid anchor real and positive.
fn anchor_phase(psi: &NambuSpinor) -> c64 {
    let z = psi.values()[psi.grid().anchor()][0];
    let r = math::modulus(z);
    if r > 0.0 {
        z / r
    } else {
        c64::new(1.0, 0.0)
    }
}

impl BoundState {
    /// Split factors `(f1, f2)` with `ψ = (f1 u, f2 v)` and `(u, v)` the
    /// Majorana frame.
    pub fn split_factors(&self) -> (c64, c64) {
        let f1 = anchor_phase(&self.spinor);
        (f1, f1.conj())
    }

    /// `(u, u*)` with `u↑` real and positive at the interface.
    pub fn majorana_frame(&self) -> NambuSpinor {
        majorana_frame(&self.spinor)
    }

    /// The eigenstate rephased as a whole so that `u↑` is real positive at the interface.
    pub fn eigenstate_view(&self) -> NambuSpinor {
        self.spinor.clone().scaled(anchor_phase(&self.spinor).conj())
    }
}

/// Rephases the electron part so `u↑(anchor)` is real positive and sets `v = u*`.
pub fn majorana_frame(psi: &NambuSpinor) -> NambuSpinor {
    let f = anchor_phase(psi).conj();
    let values = psi
        .values()
        .iter()
        .map(|s| {
            let (a, b) = (s[0] * f, s[1] * f);
            [a, b, a.conj(), b.conj()]
        })
        .collect();
    NambuSpinor::new(psi.grid().clone(), values).expect("same grid, finite values")
}

/// Which part of the junction a sampler returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Restriction {
    /// The matched state on the whole grid.
    Junction,
    /// The region's own decaying Majorana solution, unit mode coefficient,
    /// zero on the other half-line.
    Region(Region),
    /// The matched state cut to one half-line.
    MatchedSlice(Region),
}

/// Phase convention applied to sampled states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum View {
    /// `(u, u*)`, electron part rephased at the interface.
    MajoranaFrame,
    /// The physical eigenvector with one global interface phase.
    Eigenstate,
}

/// `ParamPoint ↦ NambuSpinor` built from the analytic solution on a fixed grid.
#[derive(Debug, Clone)]
pub struct AnalyticSampler {
    params: ModelParams,
    grid: Arc<Grid>,
    restriction: Restriction,
    view: View,
}

impl AnalyticSampler {
    pub fn new(params: ModelParams, grid: Arc<Grid>) -> Result<Self> {
        params.validate()?;
        Ok(Self { params, grid, restriction: Restriction::Junction, view: View::MajoranaFrame })
    }

    /// Sampler on the default grid for a loop at fixed θ.
    pub fn at_theta(params: ModelParams, theta: f64) -> Result<Self> {
        let grid = default_grid(&params, &[theta])?;
        Self::new(params, grid)
    }

    pub fn restricted(mut self, restriction: Restriction) -> Self {
        self.restriction = restriction;
        self
    }

    pub fn with_view(mut self, view: View) -> Self {
        self.view = view;
        self
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    fn region_mode(&self, point: &ParamPoint, region: Region) -> Result<NambuSpinor> {
        let mode = evanescent_modes(&self.params, point, region)?[0];
        let one = c64::new(1.0, 0.0);
        let values = self
            .grid
            .positions()
            .iter()
            .map(|&x| {
                let inside = match region {
                    Region::Fi => x <= 0.0,
                    Region::Sc => x >= 0.0,
                };
                if inside {
                    to_storage_order(majorana_pair(&mode, one, x))
                } else {
                    [ZERO; 4]
                }
            })
            .collect();
        NambuSpinor::new(self.grid.clone(), values)?.normalized()
    }
}

fn half_line(region: Region) -> fn(f64) -> bool {
    match region {
        Region::Fi => |x| x <= 0.0,
        Region::Sc => |x| x >= 0.0,
    }
}

impl SpinorSampler for AnalyticSampler {
    fn sample(&self, point: &ParamPoint) -> Result<NambuSpinor> {
        let physical = match self.restriction {
            Restriction::Region(r) => self.region_mode(point, r)?,
            Restriction::Junction | Restriction::MatchedSlice(_) => {
                match_interface_on(&self.params, point, self.grid.clone())?.spinor
            }
        };
        let viewed = match self.view {
            View::MajoranaFrame => majorana_frame(&physical),
            View::Eigenstate => physical.clone().scaled(anchor_phase(&physical).conj()),
        };
        match self.restriction {
            Restriction::MatchedSlice(r) => viewed.masked(half_line(r)).normalized(),
            _ => Ok(viewed),
        }
    }
}

/// `‖Hψ‖/‖ψ‖` of the continuum operator on interior samples, with `∂x` from a
/// fourth-order central stencil on each uniformly spaced half-line.
pub fn zero_energy_residual(params: &ModelParams, state: &BoundState) -> Result<f64> {
    let psi = &state.spinor;
    let grid = psi.grid();
    let x = grid.positions();
    let w = grid.weights();
    let iface = grid.interface().ok_or_else(|| invalid("grid has no interface index"))?;
    let hv = params.hv();
    let h_fi = onsite_block(params, &state.point, Region::Fi);
    let h_sc = onsite_block(params, &state.point, Region::Sc);
    let ham: Vec<[c64; 4]> = psi.values().iter().map(|s| bdg::to_hamiltonian_order(*s)).collect();
    let n = x.len();
    let mut acc = 0.0;
    let mut norm = 0.0;
    for i in 2..n - 2 {
        if i + 2 >= iface && i <= iface + 2 {
            continue;
        }
        let h = x[i + 1] - x[i];
        let mut d = [ZERO; 4];
        for k in 0..4 {
            d[k] = (-ham[i + 2][k] + ham[i + 1][k] * 8.0 - ham[i - 1][k] * 8.0 + ham[i - 2][k]) / (12.0 * h);
        }
        let block = if x[i] < 0.0 { &h_fi } else { &h_sc };
        let mut r = linalg::mat4_apply(block, &ham[i]);
        for k in 0..4 {
            // ħv τzσz (−i ∂x)
            r[k] += -I * d[k] * (KINETIC_DIAG[k] * hv);
        }
        acc += w[i] * r.iter().map(|z| z.norm_sqr()).sum::<f64>();
        norm += w[i] * ham[i].iter().map(|z| z.norm_sqr()).sum::<f64>();
    }
    Ok(math::sqrt(acc / norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bdg::{inner_product, majorana_residual};
    use proptest::prelude::*;

    const HALF_PI: f64 = core::f64::consts::FRAC_PI_2;

    fn pt(theta: f64, alpha: f64) -> ParamPoint {
        ParamPoint::new(theta, alpha).unwrap()
    }

    #[test]
    fn derived_params_closed_forms() {
        let p = ModelParams::default();
        let d = derived_params(&p, HALF_PI).unwrap();
        assert!((d.m_par - 1.0).abs() < 1e-15);
        assert!((d.phi - HALF_PI).abs() < 1e-15);
        assert!((d.k_f - 1.0).abs() < 1e-15);
        assert!((d.k_sc - 1.0).abs() < 1e-15);

        let d = derived_params(&p, math::PI / 6.0).unwrap();
        assert!((d.m_par - 0.5).abs() < 1e-15);
        assert!((d.k_f - 0.5).abs() < 1e-15);

        let p = ModelParams { mu_fi: 0.6, ..Default::default() };
        let d = derived_params(&p, HALF_PI).unwrap();
        assert!((d.k_f - 0.8).abs() < 1e-15);
        assert!((d.phi - math::atan2(0.8, 0.6)).abs() < 1e-15);
        assert!((math::modulus(d.exp_i_phi) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn derived_params_errors() {
        let p = ModelParams::default();
        assert!(matches!(derived_params(&p, 0.0), Err(Error::DegenerateInPlane { .. })));
        assert!(matches!(derived_params(&p, math::PI), Err(Error::DegenerateInPlane { .. })));
        let p = ModelParams { mu_fi: 1.2, ..Default::default() };
        assert!(matches!(derived_params(&p, HALF_PI), Err(Error::EvanescentConditionViolated { .. })));
    }

    #[test]
    fn sc_oscillation_comes_from_dispersion() {
        let p = ModelParams { mu_sc: 0.7, ..Default::default() };
        let d = derived_params(&p, 1.0).unwrap();
        assert!((d.k_msc - 0.7).abs() < 1e-9);
        assert_eq!(d.k_msc_alt, Some(d.m_par / 0.7));
        assert_eq!(derived_params(&ModelParams::default(), 1.0).unwrap().k_msc_alt, None);
    }

    #[test]
    fn fi_decay_matches_closed_form() {
        let p = ModelParams::default();
        let modes = evanescent_modes(&p, &pt(HALF_PI, 0.3), Region::Fi).unwrap();
        for m in &modes {
            assert!((m.lambda.re - 1.0).abs() < 1e-9);
            assert!(m.kernel_residual(&p, &pt(HALF_PI, 0.3), Region::Fi).unwrap() < 1e-9);
        }
        // degenerate cluster rotated to a pure electron mode
        assert!(modes[0].chi[2].norm_sqr() + modes[0].chi[3].norm_sqr() < 1e-20);
    }

    #[test]
    fn sc_decay_matches_closed_form() {
        let p = ModelParams::default();
        let modes = evanescent_modes(&p, &pt(1.0, 0.0), Region::Sc).unwrap();
        for m in &modes {
            assert!((m.lambda.re.abs() - 1.0).abs() < 1e-9);
            assert!(m.lambda.re < 0.0);
            assert!(m.kernel_residual(&p, &pt(1.0, 0.0), Region::Sc).unwrap() < 1e-9);
        }
    }

    #[test]
    fn propagating_fi_has_no_decaying_mode() {
        let p = ModelParams { mu_fi: 1.5, ..Default::default() };
        assert_eq!(evanescent_modes(&p, &pt(HALF_PI, 0.0), Region::Fi), Err(Error::NoDecayingMode(Region::Fi)));
    }

    #[test]
    fn matched_state_at_reference_point() {
        let p = ModelParams::default();
        for alpha in [0.0, 1.0, 2.5, 4.0] {
            let b = match_interface(&p, &pt(HALF_PI, alpha)).unwrap();
            assert!(b.match_residual < 1e-8);
            assert!(majorana_residual(&b.spinor) < 1e-8);
            assert!((b.spinor.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn phase_lock_on_fi_side() {
        let p = ModelParams { mu_fi: 0.3, mu_sc: 0.2, ..Default::default() };
        let point = pt(1.2, 0.7);
        let b = match_interface(&p, &point).unwrap();
        let target = point.alpha + b.derived.phi;
        for (x, s) in b.spinor.grid().positions().iter().zip(b.spinor.values()) {
            if *x < 0.0 {
                let d = math::wrap_phase(math::arg(s[1] / s[0]) - target);
                assert!(d.abs() < 1e-8, "x={x} d={d}");
            }
        }
    }

    #[test]
    fn matching_fails_without_bound_state() {
        let p = ModelParams { mu_fi: 1.2, ..Default::default() };
        assert!(matches!(
            match_interface(&p, &pt(HALF_PI, 0.0)),
            Err(Error::EvanescentConditionViolated { .. })
        ));
    }

    #[test]
    fn norm_is_alpha_independent() {
        let p = ModelParams { mu_fi: 0.2, ..Default::default() };
        let grid = default_grid(&p, &[1.0]).unwrap();
        let s = AnalyticSampler::new(p, grid.clone()).unwrap().with_view(View::Eigenstate);
        let base = match_interface_on(&p, &pt(1.0, 0.0), grid.clone()).unwrap();
        for alpha in [0.5, 2.0, 5.0] {
            let b = match_interface_on(&p, &pt(1.0, alpha), grid.clone()).unwrap();
            // unnormalized weight carried by the coefficients
            let r = math::modulus(b.coeffs.0) / math::modulus(base.coeffs.0);
            assert!((r - 1.0).abs() < 1e-10);
            assert!((s.sample(&pt(1.0, alpha)).unwrap().norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn sampler_is_deterministic_and_periodic() {
        let s = AnalyticSampler::at_theta(ModelParams::default(), HALF_PI).unwrap();
        let a = s.sample(&pt(HALF_PI, 0.4)).unwrap();
        let b = s.sample(&pt(HALF_PI, 0.4)).unwrap();
        assert_eq!(a, b);
        let c = s.sample(&pt(HALF_PI, 0.4 + math::TAU)).unwrap();
        assert!(a.distance(&c).unwrap() < 1e-10);
        let d = s.sample(&pt(HALF_PI + 1e-6, 0.4)).unwrap();
        let dist = a.distance(&d).unwrap();
        assert!(dist < 1e-5 && dist > 1e-9, "{dist}");
        let anchor = a.values()[a.grid().anchor()][0];
        assert!(anchor.im.abs() < 1e-15 && anchor.re > 0.0);
    }

    #[test]
    fn split_factors_recombine_to_eigenstate() {
        let b = match_interface(&ModelParams::default(), &pt(HALF_PI, 1.3)).unwrap();
        let (f1, f2) = b.split_factors();
        let frame = b.majorana_frame();
        for (p, q) in b.spinor.values().iter().zip(frame.values()) {
            for k in 0..2 {
                assert!(math::modulus(p[k] - q[k] * f1) < 1e-14);
                assert!(math::modulus(p[k + 2] - q[k + 2] * f2) < 1e-14);
            }
        }
        let ov = inner_product(&b.spinor, &b.eigenstate_view()).unwrap();
        assert!((math::modulus(ov) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn continuum_operator_annihilates_matched_state() {
        for (mu_fi, mu_sc, theta) in [(0.0, 0.0, HALF_PI), (0.3, 0.5, 1.0), (-0.2, -0.4, 2.2)] {
            let p = ModelParams { mu_fi, mu_sc, ..Default::default() };
            let b = match_interface(&p, &pt(theta, 0.9)).unwrap();
            let r = zero_energy_residual(&p, &b).unwrap();
            assert!(r < 1e-6, "residual {r}");
        }
    }

    #[test]
    fn region_samplers_vanish_off_their_half_line() {
        let s = AnalyticSampler::at_theta(ModelParams::default(), HALF_PI)
            .unwrap()
            .restricted(Restriction::Region(Region::Sc));
        let psi = s.sample(&pt(HALF_PI, 0.2)).unwrap();
        for (x, v) in psi.grid().positions().iter().zip(psi.values()) {
            if *x < 0.0 {
                assert!(v.iter().all(|z| *z == ZERO));
            }
        }
        assert!(majorana_residual(&psi) < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn decay_constants_match_closed_forms(
            theta in 0.3..2.8f64, mu_fi in -0.25..0.25f64, mu_sc in -1.0..1.0f64, alpha in 0.0..6.3f64,
        ) {
            let p = ModelParams { mu_fi, mu_sc, ..Default::default() };
            let d = derived_params(&p, theta).unwrap();
            let point = pt(theta, alpha);
            for m in evanescent_modes(&p, &point, Region::Fi).unwrap() {
                prop_assert!((m.lambda.re - d.k_f).abs() < 1e-9);
                prop_assert!((m.lambda.im.abs() - d.k_m_fi.abs()).abs() < 1e-9);
                prop_assert!(m.kernel_residual(&p, &point, Region::Fi).unwrap() < 1e-9);
            }
            for m in evanescent_modes(&p, &point, Region::Sc).unwrap() {
                prop_assert!((m.lambda.re + d.k_sc).abs() < 1e-9);
                prop_assert!((m.lambda.im.abs() - d.k_msc).abs() < 1e-9);
                prop_assert!(m.kernel_residual(&p, &point, Region::Sc).unwrap() < 1e-9);
            }
        }
    }
}
