//! Nambu-space types, the 4×4 BdG kernel and quadrature on spatial grids.
//!
//! # Conventions
//!
//! Spinors are *stored* in the order `(u↑, u↓, v↑, v↓)`. The Hamiltonian
//! acts in the *Hamiltonian order* `(u↑, u↓, v↓, −v↑)`, i.e. on the Nambu
//! vector `(c↑, c↓, c↓†, −c↑†)`. Written as `τ ⊗ σ` with τ acting on the
//! particle/hole blocks (outer factor):
//!
//! ```text
//! H(k) = ħ v_f k τz σz − μ τz + m·σ (FI)        H(k) = ħ v_f k τz σz − μ τz + Δ τx (SC)
//! ```
//!
//! In this basis the upper-left block is `ĥ(k)` and the lower-right block is
//! `−σy ĥ*(−k) σy`. Particle-hole conjugation is `C = τy σy K`; on stored
//! spinors it maps `(u, v) ↦ (v*, u*)`, so a Majorana state obeys `v = u*`.
//!
//! Units: `ħ = v_f = 1`, energies in units of Δ, lengths in `ħ v_f / Δ`.

use alloc::sync::Arc;
use alloc::vec::Vec;

use faer::c64;

use crate::error::{invalid, Error, Result};
use crate::linalg::{Mat4, ZERO};
use crate::math;

/// Static junction constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub v_f: f64,
    pub hbar: f64,
    pub mu_fi: f64,
    pub mu_sc: f64,
    pub m: f64,
    pub delta: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self { v_f: 1.0, hbar: 1.0, mu_fi: 0.0, mu_sc: 0.0, m: 1.0, delta: 1.0 }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let all = [self.v_f, self.hbar, self.mu_fi, self.mu_sc, self.m, self.delta];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(invalid("model parameters must be finite"));
        }
        if self.v_f <= 0.0 || self.hbar <= 0.0 {
            return Err(invalid("v_f and hbar must be positive"));
        }
        if self.m <= 0.0 {
            return Err(invalid("magnetization m must be positive"));
        }
        if self.delta <= 0.0 {
            return Err(invalid("pair amplitude delta must be positive"));
        }
        Ok(())
    }

    /// `ħ v_f`, the kinetic scale.
    pub fn hv(&self) -> f64 {
        self.hbar * self.v_f
    }
}

/// Slow control parameters: magnetization polar and azimuthal angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamPoint {
    pub theta: f64,
    pub alpha: f64,
}

impl ParamPoint {
    pub fn new(theta: f64, alpha: f64) -> Result<Self> {
        let p = Self { theta, alpha };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.theta.is_finite() || !self.alpha.is_finite() {
            return Err(invalid("parameter point must be finite"));
        }
        if !(0.0..=math::PI).contains(&self.theta) {
            return Err(invalid("theta must lie in [0, pi]"));
        }
        Ok(())
    }

    pub fn distance(&self, other: &ParamPoint) -> f64 {
        math::hypot(self.theta - other.theta, self.alpha - other.alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Fi,
    Sc,
}

/// Which components of a spinor a phase refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    /// `(u↑, u↓)`
    Electron,
    /// `(v↑, −v↓)`
    Hole,
    /// all four components
    Full,
}

impl Sector {
    pub const ALL: [Sector; 3] = [Sector::Electron, Sector::Hole, Sector::Full];

    pub fn width(self) -> usize {
        match self {
            Sector::Electron | Sector::Hole => 2,
            Sector::Full => 4,
        }
    }
}

/// Block of the junction Hamiltonian that does not depend on `k`.
pub fn onsite_block(params: &ModelParams, point: &ParamPoint, region: Region) -> Mat4 {
    let mut h = [[ZERO; 4]; 4];
    match region {
        Region::Fi => {
            let (st, ct) = (math::sin(point.theta), math::cos(point.theta));
            let mx = params.m * st * math::cos(point.alpha);
            let my = params.m * st * math::sin(point.alpha);
            let mz = params.m * ct;
            let mu = params.mu_fi;
            // τ0 ⊗ m·σ on both blocks
            for b in [0, 2] {
                h[b][b] = c64::new(mz, 0.0);
                h[b + 1][b + 1] = c64::new(-mz, 0.0);
                h[b][b + 1] = c64::new(mx, -my);
                h[b + 1][b] = c64::new(mx, my);
            }
            for (i, s) in [(0, -1.0), (1, -1.0), (2, 1.0), (3, 1.0)] {
                h[i][i] += c64::new(s * mu, 0.0);
            }
        }
        Region::Sc => {
            let mu = params.mu_sc;
            for (i, s) in [(0, -1.0), (1, -1.0), (2, 1.0), (3, 1.0)] {
                h[i][i] = c64::new(s * mu, 0.0);
            }
            let d = c64::new(params.delta, 0.0);
            h[0][2] = d;
            h[2][0] = d;
            h[1][3] = d;
            h[3][1] = d;
        }
    }
    h
}

/// Diagonal of `τz σz`, the coefficient of `ħ v_f k`.
pub const KINETIC_DIAG: [f64; 4] = [1.0, -1.0, -1.0, 1.0];

/// The 4×4 junction Hamiltonian at complex wavevector `k` (Hamiltonian order).
pub fn bdg_kernel(params: &ModelParams, point: &ParamPoint, region: Region, k: c64) -> Result<Mat4> {
    if !math::is_finite(k) {
        return Err(Error::NonFiniteWavevector);
    }
    params.validate()?;
    point.validate()?;
    let mut h = onsite_block(params, point, region);
    let hv = params.hv();
    for (i, s) in KINETIC_DIAG.iter().enumerate() {
        h[i][i] += k * (s * hv);
    }
    Ok(h)
}

/// Stored `(u↑, u↓, v↑, v↓)` to Hamiltonian order `(u↑, u↓, v↓, −v↑)`.
#[inline]
pub fn to_hamiltonian_order(s: [c64; 4]) -> [c64; 4] {
    [s[0], s[1], s[3], -s[2]]
}

/// Hamiltonian order back to stored order.
#[inline]
pub fn to_storage_order(h: [c64; 4]) -> [c64; 4] {
    [h[0], h[1], -h[3], h[2]]
}

/// Particle-hole conjugate of a stored 4-vector: `(u, v) ↦ (v*, u*)`.
#[inline]
pub fn conjugate_site(s: [c64; 4]) -> [c64; 4] {
    [s[2].conj(), s[3].conj(), s[0].conj(), s[1].conj()]
}

/// Particle-hole conjugate in Hamiltonian order, `τy σy K`.
#[inline]
pub fn conjugate_hamiltonian_site(h: [c64; 4]) -> [c64; 4] {
    [-h[3].conj(), h[2].conj(), h[1].conj(), -h[0].conj()]
}

/// Sample positions plus quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    x: Vec<f64>,
    w: Vec<f64>,
    interface: Option<usize>,
}

impl Grid {
    /// Trapezoid weights on arbitrary strictly increasing samples.
    pub fn trapezoid(x: Vec<f64>) -> Result<Self> {
        check_positions(&x)?;
        let n = x.len();
        let mut w = alloc::vec![0.0; n];
        for i in 0..n - 1 {
            let h = 0.5 * (x[i + 1] - x[i]);
            w[i] += h;
            w[i + 1] += h;
        }
        Ok(Self { x, w, interface: None })
    }

    /// Uniform weights `spacing` per site, the lattice ℓ² product scaled to length.
    pub fn lattice(x: Vec<f64>, spacing: f64) -> Result<Self> {
        check_positions(&x)?;
        if !(spacing > 0.0) {
            return Err(invalid("lattice spacing must be positive"));
        }
        let w = alloc::vec![spacing; x.len()];
        Ok(Self { x, w, interface: None })
    }

    /// `2·per_side + 1` points on `[−left, right]` with `x = 0` included.
    pub fn two_sided(left: f64, right: f64, per_side: usize) -> Result<Self> {
        if !(left > 0.0 && right > 0.0) || per_side == 0 {
            return Err(invalid("two-sided grid needs positive extents and intervals"));
        }
        let mut x = Vec::with_capacity(2 * per_side + 1);
        for i in 0..per_side {
            x.push(-left + left * i as f64 / per_side as f64);
        }
        x.push(0.0);
        for i in 1..=per_side {
            x.push(right * i as f64 / per_side as f64);
        }
        let mut g = Self::trapezoid(x)?;
        g.interface = Some(per_side);
        Ok(g)
    }

    pub fn with_interface(mut self, index: usize) -> Result<Self> {
        if index >= self.x.len() {
            return Err(invalid("interface index outside grid"));
        }
        self.interface = Some(index);
        Ok(self)
    }

    pub fn positions(&self) -> &[f64] {
        &self.x
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn interface(&self) -> Option<usize> {
        self.interface
    }

    /// Index of the sample closest to `x = 0` when no interface was set.
    pub fn anchor(&self) -> usize {
        self.interface.unwrap_or_else(|| {
            let mut best = 0;
            for (i, x) in self.x.iter().enumerate() {
                if math::abs(*x) < math::abs(self.x[best]) {
                    best = i;
                }
            }
            best
        })
    }

    fn same(a: &Arc<Grid>, b: &Arc<Grid>) -> bool {
        Arc::ptr_eq(a, b) || **a == **b
    }
}

fn check_positions(x: &[f64]) -> Result<()> {
    if x.len() < 2 {
        return Err(invalid("grid needs at least two points"));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(invalid("grid positions must be finite"));
    }
    if x.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("grid must be strictly increasing"));
    }
    Ok(())
}

/// 4-component field sampled on a grid, stored as `(u↑, u↓, v↑, v↓)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NambuSpinor {
    grid: Arc<Grid>,
    values: Vec<[c64; 4]>,
}

impl NambuSpinor {
    pub fn new(grid: Arc<Grid>, values: Vec<[c64; 4]>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        if values.iter().flatten().any(|z| !math::is_finite(*z)) {
            return Err(invalid("spinor amplitudes must be finite"));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.len();
        Self { grid, values: alloc::vec![[ZERO; 4]; n] }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[[c64; 4]] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [[c64; 4]] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<[c64; 4]> {
        self.values
    }

    pub fn norm(&self) -> f64 {
        math::sqrt(self.sector_norm_sqr(Sector::Full))
    }

    pub fn sector_norm_sqr(&self, sector: Sector) -> f64 {
        let range = sector_range(sector);
        self.values
            .iter()
            .zip(self.grid.weights())
            .map(|(s, w)| w * s[range.clone()].iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum()
    }

    pub fn scale(&mut self, factor: c64) {
        for s in &mut self.values {
            for z in s.iter_mut() {
                *z *= factor;
            }
        }
    }

    pub fn scaled(mut self, factor: c64) -> Self {
        self.scale(factor);
        self
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) {
            return Err(invalid("cannot normalize a zero spinor"));
        }
        self.scale(c64::new(1.0 / n, 0.0));
        Ok(self)
    }

    /// Keeps only samples with `keep(x)`, zeroing the rest.
    pub fn masked(&self, keep: impl Fn(f64) -> bool) -> Self {
        let mut out = self.clone();
        for (s, x) in out.values.iter_mut().zip(self.grid.positions()) {
            if !keep(*x) {
                *s = [ZERO; 4];
            }
        }
        out
    }

    pub fn particle_hole(&self) -> Self {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|s| conjugate_site(*s)).collect() }
    }

    /// Builds `(u, u*)` from the electron part of `self`.
    pub fn majorana_completion(&self) -> Self {
        let values = self.values.iter().map(|s| [s[0], s[1], s[0].conj(), s[1].conj()]).collect();
        Self { grid: self.grid.clone(), values }
    }

    /// Distance `‖a − b‖` on the common grid.
    pub fn distance(&self, other: &NambuSpinor) -> Result<f64> {
        if !Grid::same(&self.grid, &other.grid) {
            return Err(Error::GridMismatch);
        }
        let d: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .zip(self.grid.weights())
            .map(|((a, b), w)| w * (0..4).map(|c| (a[c] - b[c]).norm_sqr()).sum::<f64>())
            .sum();
        Ok(math::sqrt(d))
    }
}

fn sector_range(sector: Sector) -> core::ops::Range<usize> {
    match sector {
        Sector::Electron => 0..2,
        Sector::Hole => 2..4,
        Sector::Full => 0..4,
    }
}

#[inline]
fn sector_components(s: &[c64; 4], sector: Sector) -> ([c64; 4], usize) {
    match sector {
        Sector::Electron => ([s[0], s[1], ZERO, ZERO], 2),
        Sector::Hole => ([s[2], -s[3], ZERO, ZERO], 2),
        Sector::Full => (*s, 4),
    }
}

/// Trapezoid inner product `⟨a|b⟩` over all four components.
pub fn inner_product(a: &NambuSpinor, b: &NambuSpinor) -> Result<c64> {
    sector_inner_product(a, b, Sector::Full)
}

/// `⟨χ_a|χ_b⟩` for the sector projections of `a` and `b`.
pub fn sector_inner_product(a: &NambuSpinor, b: &NambuSpinor, sector: Sector) -> Result<c64> {
    if !Grid::same(&a.grid, &b.grid) {
        return Err(Error::GridMismatch);
    }
    let mut acc = ZERO;
    for ((sa, sb), w) in a.values.iter().zip(&b.values).zip(a.grid.weights()) {
        let (pa, n) = sector_components(sa, sector);
        let (pb, _) = sector_components(sb, sector);
        let mut site = ZERO;
        for c in 0..n {
            site += pa[c].conj() * pb[c];
        }
        acc += site * *w;
    }
    Ok(acc)
}

/// `‖v↑ − u↑*‖ + ‖v↓ − u↓*‖`; zero for an exact Majorana state.
pub fn majorana_residual(psi: &NambuSpinor) -> f64 {
    let mut up = 0.0;
    let mut down = 0.0;
    for (s, w) in psi.values.iter().zip(psi.grid.weights()) {
        up += w * (s[2] - s[0].conj()).norm_sqr();
        down += w * (s[3] - s[1].conj()).norm_sqr();
    }
    math::sqrt(up) + math::sqrt(down)
}

/// Sector projection of a spinor: 2 or 4 components per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorField {
    pub sector: Sector,
    pub grid: Arc<Grid>,
    pub values: Vec<[c64; 4]>,
}

impl SectorField {
    pub fn width(&self) -> usize {
        self.sector.width()
    }

    pub fn norm_sqr(&self) -> f64 {
        let n = self.width();
        self.values
            .iter()
            .zip(self.grid.weights())
            .map(|(s, w)| w * s[..n].iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum()
    }
}

/// Electron `(u↑, u↓)`, hole `(v↑, −v↓)` or the full spinor.
pub fn project(psi: &NambuSpinor, sector: Sector) -> SectorField {
    let values = psi.values.iter().map(|s| sector_components(s, sector).0).collect();
    SectorField { sector, grid: psi.grid.clone(), values }
}

/// Applies a Hamiltonian-order 4×4 matrix site by site to a stored spinor.
pub fn apply_local(m: &Mat4, s: [c64; 4]) -> [c64; 4] {
    to_storage_order(crate::linalg::mat4_apply(m, &to_hamiltonian_order(s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{self, I};
    use proptest::prelude::*;

    fn eig4(m: &Mat4) -> Vec<f64> {
        let mut v = linalg::hermitian_eigenvalues(&linalg::mat4_to_faer(m)).unwrap();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    fn pt(theta: f64, alpha: f64) -> ParamPoint {
        ParamPoint::new(theta, alpha).unwrap()
    }

    #[test]
    fn fi_kernel_vanishes_without_fields() {
        // m = 0 is outside the validated domain, so go through the raw block
        let p = ModelParams { m: 0.0, ..Default::default() };
        let h = onsite_block(&p, &pt(0.3, 0.2), Region::Fi);
        assert!(h.iter().flatten().all(|z| *z == ZERO));
    }

    #[test]
    fn sc_kernel_at_rest_is_pure_pairing() {
        let h = bdg_kernel(&ModelParams::default(), &pt(0.0, 0.0), Region::Sc, ZERO).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if (i, j) == (0, 2) || (i, j) == (2, 0) || (i, j) == (1, 3) || (i, j) == (3, 1) {
                    1.0
                } else {
                    0.0
                };
                assert_eq!(h[i][j], c64::new(want, 0.0));
            }
        }
    }

    #[test]
    fn fi_in_plane_spectrum() {
        let h = bdg_kernel(&ModelParams::default(), &pt(math::PI / 2.0, 0.0), Region::Fi, ZERO).unwrap();
        let e = eig4(&h);
        let want = [-1.0, -1.0, 1.0, 1.0];
        for (a, b) in e.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn non_finite_wavevector_rejected() {
        let r = bdg_kernel(&ModelParams::default(), &pt(1.0, 0.0), Region::Fi, c64::new(f64::NAN, 0.0));
        assert_eq!(r, Err(Error::NonFiniteWavevector));
    }

    #[test]
    fn particle_hole_operator_anticommutes_with_kernel() {
        let p = ModelParams { mu_fi: 0.3, mu_sc: -0.4, ..Default::default() };
        let v = [c64::new(0.3, 0.1), c64::new(-0.2, 0.7), c64::new(0.5, -0.5), c64::new(0.1, 0.9)];
        for region in [Region::Fi, Region::Sc] {
            let k = 0.37;
            let h = bdg_kernel(&p, &pt(1.1, 0.4), region, c64::new(k, 0.0)).unwrap();
            let hm = bdg_kernel(&p, &pt(1.1, 0.4), region, c64::new(-k, 0.0)).unwrap();
            // C H(k) v = −H(−k) C v
            let lhs = conjugate_hamiltonian_site(linalg::mat4_apply(&h, &v));
            let rhs = linalg::mat4_apply(&hm, &conjugate_hamiltonian_site(v));
            for c in 0..4 {
                assert!(math::modulus(lhs[c] + rhs[c]) < 1e-13);
            }
        }
    }

    #[test]
    fn storage_and_hamiltonian_orders_round_trip() {
        let s = [c64::new(1.0, 2.0), c64::new(3.0, 4.0), c64::new(5.0, 6.0), c64::new(7.0, 8.0)];
        assert_eq!(to_storage_order(to_hamiltonian_order(s)), s);
        // the two conjugations agree through the change of order
        let a = to_hamiltonian_order(conjugate_site(s));
        let b = conjugate_hamiltonian_site(to_hamiltonian_order(s));
        assert_eq!(a, b);
    }

    fn smooth(grid: &Arc<Grid>, shift: f64) -> NambuSpinor {
        let values = grid
            .positions()
            .iter()
            .map(|&x| {
                let g = math::exp(-(x - shift) * (x - shift));
                [
                    c64::new(g, 0.0),
                    math::cis(x) * g,
                    c64::new(0.0, g * 0.5),
                    c64::new(g * x, -g),
                ]
            })
            .collect();
        NambuSpinor::new(grid.clone(), values).unwrap()
    }

    #[test]
    fn inner_product_basic_identities() {
        let g = Arc::new(Grid::two_sided(8.0, 8.0, 400).unwrap());
        let psi = smooth(&g, 0.2).normalized().unwrap();
        let one = inner_product(&psi, &psi).unwrap();
        assert!(math::modulus(one - c64::new(1.0, 0.0)) < 1e-12);
        let ipsi = psi.clone().scaled(I);
        let z = inner_product(&psi, &ipsi).unwrap();
        assert!(math::modulus(z - I) < 1e-12);

        let other = smooth(&g, -0.7);
        let c = inner_product(&psi, &other).unwrap();
        let mut orth = other.clone();
        for (o, p) in orth.values_mut().iter_mut().zip(psi.values()) {
            for k in 0..4 {
                o[k] -= p[k] * c;
            }
        }
        assert!(math::modulus(inner_product(&psi, &orth).unwrap()) < 1e-12);
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let g1 = Arc::new(Grid::two_sided(8.0, 8.0, 10).unwrap());
        let g2 = Arc::new(Grid::two_sided(8.0, 8.0, 11).unwrap());
        let a = smooth(&g1, 0.0);
        let b = smooth(&g2, 0.0);
        assert_eq!(inner_product(&a, &b), Err(Error::GridMismatch));
    }

    #[test]
    fn quadrature_error_is_second_order() {
        let exact = {
            let g = Arc::new(Grid::two_sided(1.0, 2.0, 20000).unwrap());
            inner_product(&smooth(&g, 0.3), &smooth(&g, -0.4)).unwrap()
        };
        // truncated tails keep the endpoint terms, so the error is genuinely O(h²)
        let err = |n: usize| {
            let g = Arc::new(Grid::two_sided(1.0, 2.0, n).unwrap());
            math::modulus(inner_product(&smooth(&g, 0.3), &smooth(&g, -0.4)).unwrap() - exact)
        };
        let ratio = err(100) / err(200);
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn projections_split_the_norm() {
        let g = Arc::new(Grid::two_sided(8.0, 8.0, 200).unwrap());
        let psi = smooth(&g, 0.1);
        let full = project(&psi, Sector::Full);
        assert_eq!(full.values, psi.values().to_vec());
        let e = project(&psi, Sector::Electron).norm_sqr();
        let h = project(&psi, Sector::Hole).norm_sqr();
        assert!((e + h - full.norm_sqr()).abs() < 1e-12);

        let hole_only = psi.masked(|_| true);
        let mut hole_only = hole_only;
        for s in hole_only.values_mut() {
            s[0] = ZERO;
            s[1] = ZERO;
        }
        assert_eq!(project(&hole_only, Sector::Electron).norm_sqr(), 0.0);
        assert!(majorana_residual(&psi.majorana_completion()) == 0.0);
        let mut electron = psi.clone();
        for s in electron.values_mut() {
            s[2] = ZERO;
            s[3] = ZERO;
        }
        assert!(majorana_residual(&electron) > 0.1);
    }

    proptest! {
        #[test]
        fn kernel_hermitian_for_real_k(
            mu_fi in -2.0..2.0f64, mu_sc in -2.0..2.0f64, m in 0.1..3.0f64, delta in 0.1..3.0f64,
            theta in 0.0..core::f64::consts::PI, alpha in -10.0..10.0f64, k in -5.0..5.0f64,
            sc in proptest::bool::ANY,
        ) {
            let p = ModelParams { mu_fi, mu_sc, m, delta, ..Default::default() };
            let region = if sc { Region::Sc } else { Region::Fi };
            let h = bdg_kernel(&p, &pt(theta, alpha), region, c64::new(k, 0.0)).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    prop_assert!(math::modulus(h[i][j] - h[j][i].conj()) < 1e-13);
                }
            }
        }

        #[test]
        fn spectrum_is_particle_hole_symmetric(
            mu_fi in -2.0..2.0f64, mu_sc in -2.0..2.0f64, m in 0.1..3.0f64, delta in 0.1..3.0f64,
            theta in 0.0..core::f64::consts::PI, alpha in -10.0..10.0f64, k in -5.0..5.0f64,
            sc in proptest::bool::ANY,
        ) {
            let p = ModelParams { mu_fi, mu_sc, m, delta, ..Default::default() };
            let region = if sc { Region::Sc } else { Region::Fi };
            let e = eig4(&bdg_kernel(&p, &pt(theta, alpha), region, c64::new(k, 0.0)).unwrap());
            let mut f: Vec<f64> = eig4(&bdg_kernel(&p, &pt(theta, alpha), region, c64::new(-k, 0.0)).unwrap())
                .into_iter().map(|x| -x).collect();
            f.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (a, b) in e.iter().zip(&f) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn inner_product_is_sesquilinear(
            seeds in proptest::collection::vec(-1.0..1.0f64, 16),
            cr in -2.0..2.0f64, ci in -2.0..2.0f64,
        ) {
            let g = Arc::new(Grid::trapezoid(vec![0.0, 0.4, 1.1, 1.5]).unwrap());
            let mk = |o: usize| -> NambuSpinor {
                let vals = (0..4).map(|i| {
                    let a = seeds[(i + o) % 16];
                    let b = seeds[(i * 3 + o + 5) % 16];
                    [c64::new(a, b), c64::new(b, -a), c64::new(a * b, a), c64::new(-b, a * a)]
                }).collect();
                NambuSpinor::new(g.clone(), vals).unwrap()
            };
            let (a, b, d) = (mk(0), mk(7), mk(11));
            let ab = inner_product(&a, &b).unwrap();
            let ba = inner_product(&b, &a).unwrap();
            prop_assert!(math::modulus(ab - ba.conj()) < 1e-12);
            let c = c64::new(cr, ci);
            let mut comb = b.clone();
            for (x, y) in comb.values_mut().iter_mut().zip(d.values()) {
                for k in 0..4 { x[k] = x[k] * c + y[k]; }
            }
            let lhs = inner_product(&a, &comb).unwrap();
            let rhs = ab * c + inner_product(&a, &d).unwrap();
            prop_assert!(math::modulus(lhs - rhs) < 1e-12);
            let lhs2 = inner_product(&comb, &a).unwrap();
            let rhs2 = ba * c.conj() + inner_product(&d, &a).unwrap();
            prop_assert!(math::modulus(lhs2 - rhs2) < 1e-12);
        }
    }
}
