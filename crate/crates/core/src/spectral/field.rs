use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::grid::TorusGrid;
use super::transform::{self, from_physical_pair, to_physical_pair};
use crate::error::{Error, Result};

type C = Complex64;
const ZERO: C = C::new(0.0, 0.0);

/// Component-wise coefficient arrays that have not been projected yet.
#[derive(Clone, Debug)]
pub struct RawField {
    grid: TorusGrid,
    c: [Vec<C>; 2],
}

impl RawField {
    pub fn zeros(grid: &TorusGrid) -> Self {
        let len = grid.len();
        Self {
            grid: grid.clone(),
            c: [vec![ZERO; len], vec![ZERO; len]],
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    /// Adds `value` to the coefficient at `k`.
    pub fn add(&mut self, k1: i64, k2: i64, value: [C; 2]) -> Result<()> {
        if !self.grid.contains(k1, k2) {
            return Err(Error::Domain(format!(
                "wavenumber ({k1}, {k2}) outside the retained range |k| <= {}",
                self.grid.kmax()
            )));
        }
        let idx = self.grid.index(k1, k2);
        self.c[0][idx] += value[0];
        self.c[1][idx] += value[1];
        Ok(())
    }

    pub fn get(&self, k1: i64, k2: i64) -> [C; 2] {
        let idx = self.grid.index(k1, k2);
        [self.c[0][idx], self.c[1][idx]]
    }
}

/// Mean-zero, divergence-free, real-valued velocity field in Fourier form.
#[derive(Clone, Debug)]
pub struct VelocityField {
    grid: TorusGrid,
    c: [Vec<C>; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    pub l2: f64,
    pub h1: f64,
    pub l4: f64,
    pub lap: f64,
}

/// Shape of the random initial spectrum: `|û(k)| ∝ |k|^{-decay}`, rescaled to `‖u‖ = amplitude`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub amplitude: f64,
    pub decay: f64,
}

impl Default for Spectrum {
    fn default() -> Self {
        Self {
            amplitude: 1.0,
            decay: 1.5,
        }
    }
}

/// Applies `I - k kᵀ/|k|²` mode by mode, zeroes the mean and anything off the retained set.
pub fn leray_project(raw: RawField) -> VelocityField {
    let RawField { grid, mut c } = raw;
    let t = grid.plans();
    for idx in 0..grid.len() {
        if !t.retained[idx] || t.ksq[idx] == 0.0 {
            c[0][idx] = ZERO;
            c[1][idx] = ZERO;
            continue;
        }
        let (k1, k2) = (t.k1[idx], t.k2[idx]);
        let dot = (c[0][idx] * k1 + c[1][idx] * k2) / t.ksq[idx];
        c[0][idx] -= dot * k1;
        c[1][idx] -= dot * k2;
    }
    VelocityField { grid, c }
}

impl VelocityField {
    pub fn zero(grid: &TorusGrid) -> Self {
        let len = grid.len();
        Self {
            grid: grid.clone(),
            c: [vec![ZERO; len], vec![ZERO; len]],
        }
    }

    /// `amplitude · (cos x sin y, −sin x cos y)` in the scaled coordinates `x = 2πx₁/L`, `y = 2πx₂/L`.
    pub fn taylor_green(grid: &TorusGrid, amplitude: f64) -> Self {
        let mut raw = RawField::zeros(grid);
        let q = amplitude / 4.0;
        let i = C::i();
        for s1 in [-1i64, 1] {
            for s2 in [-1i64, 1] {
                let u1 = -i * q * s2 as f64;
                let u2 = -i * q * s1 as f64 * -1.0;
                raw.add(s1, s2, [u1, u2]).expect("unit modes are retained");
            }
        }
        leray_project(raw)
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn coeff(&self, k1: i64, k2: i64) -> [C; 2] {
        let idx = self.grid.index(k1, k2);
        [self.c[0][idx], self.c[1][idx]]
    }

    pub fn components(&self) -> (&[C], &[C]) {
        (&self.c[0], &self.c[1])
    }

    pub(crate) fn from_parts_unchecked(grid: TorusGrid, c1: Vec<C>, c2: Vec<C>) -> Self {
        Self { grid, c: [c1, c2] }
    }

    fn check(&self, other: &VelocityField) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `a·self + b·other`.
    pub fn lincomb(&self, a: f64, other: &VelocityField, b: f64) -> Result<VelocityField> {
        self.check(other)?;
        let mut out = self.clone();
        for j in 0..2 {
            for (o, (x, y)) in out.c[j].iter_mut().zip(self.c[j].iter().zip(&other.c[j])) {
                *o = x * a + y * b;
            }
        }
        Ok(out)
    }

    pub fn scaled(&self, a: f64) -> VelocityField {
        let mut out = self.clone();
        for j in 0..2 {
            for v in out.c[j].iter_mut() {
                *v *= a;
            }
        }
        out
    }

    fn weighted_sum(&self, other: &VelocityField, weight: impl Fn(usize) -> f64) -> f64 {
        let mut s = 0.0;
        for idx in 0..self.grid.len() {
            let w = weight(idx);
            if w == 0.0 {
                continue;
            }
            let p = self.c[0][idx].conj() * other.c[0][idx] + self.c[1][idx].conj() * other.c[1][idx];
            s += w * p.re;
        }
        s * self.grid.parseval()
    }

    /// L² inner product `(u, v)`.
    pub fn inner(&self, other: &VelocityField) -> Result<f64> {
        self.check(other)?;
        Ok(self.weighted_sum(other, |_| 1.0))
    }

    /// `(∇u, ∇v)`.
    pub fn grad_inner(&self, other: &VelocityField) -> Result<f64> {
        self.check(other)?;
        let t = self.grid.plans();
        Ok(self.weighted_sum(other, |i| t.ksq[i]))
    }

    pub fn l2(&self) -> f64 {
        self.weighted_sum(self, |_| 1.0).max(0.0).sqrt()
    }

    pub fn h1(&self) -> f64 {
        let t = self.grid.plans();
        self.weighted_sum(self, |i| t.ksq[i]).max(0.0).sqrt()
    }

    pub fn lap(&self) -> f64 {
        let t = self.grid.plans();
        self.weighted_sum(self, |i| t.ksq[i] * t.ksq[i]).max(0.0).sqrt()
    }

    /// `‖u‖_{L⁴}` by exact quadrature on the padded grid.
    pub fn l4(&self) -> f64 {
        let z = to_physical_pair(&self.grid, &self.c[0], &self.c[1]);
        let s: f64 = z.iter().map(|v| v.norm_sqr() * v.norm_sqr()).sum();
        transform::give(z);
        (s * self.cell_area()).powf(0.25)
    }

    pub fn norms(&self) -> Norms {
        Norms {
            l2: self.l2(),
            h1: self.h1(),
            l4: self.l4(),
            lap: self.lap(),
        }
    }

    /// `‖u‖` from physical-space quadrature, independent of Parseval.
    pub fn l2_quadrature(&self) -> f64 {
        let z = to_physical_pair(&self.grid, &self.c[0], &self.c[1]);
        let s: f64 = z.iter().map(|v| v.norm_sqr()).sum();
        transform::give(z);
        (s * self.cell_area()).sqrt()
    }

    /// `‖∇·u‖`; zero up to rounding for any projected field.
    pub fn divergence_l2(&self) -> f64 {
        let t = self.grid.plans();
        let mut s = 0.0;
        for idx in 0..self.grid.len() {
            s += (self.c[0][idx] * t.k1[idx] + self.c[1][idx] * t.k2[idx]).norm_sqr();
        }
        (s * self.grid.parseval()).sqrt()
    }

    /// Largest deviation from `û(−k) = conj(û(k))`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for idx in 0..self.grid.len() {
            let j = self.grid.conj_index(idx);
            for comp in &self.c {
                worst = worst.max((comp[j] - comp[idx].conj()).norm());
            }
        }
        worst
    }

    /// Replaces the field with its real part, `û(k) ← (û(k) + conj û(−k))/2`.
    pub(crate) fn symmetrize(&mut self) {
        let len = self.grid.len();
        for comp in self.c.iter_mut() {
            let old = comp.clone();
            for (idx, v) in comp.iter_mut().enumerate().take(len) {
                *v = (old[idx] + old[self.grid.conj_index(idx)].conj()) * 0.5;
            }
        }
    }

    fn cell_area(&self) -> f64 {
        let h = self.grid.domain_length() / self.grid.padded() as f64;
        h * h
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Vec<C>; 2] {
        &mut self.c
    }

    pub(crate) fn coeffs(&self) -> &[Vec<C>; 2] {
        &self.c
    }
}

/// `Au`, i.e. `|k|² û(k)`.
pub fn stokes_apply(u: &VelocityField) -> VelocityField {
    let t = u.grid.plans();
    let mut out = u.clone();
    for j in 0..2 {
        for (idx, v) in out.c[j].iter_mut().enumerate() {
            *v *= t.ksq[idx];
        }
    }
    out
}

fn derivatives(v: &[C], grid: &TorusGrid) -> (Vec<C>, Vec<C>) {
    let t = grid.plans();
    let i = C::i();
    let d1 = v.iter().enumerate().map(|(idx, x)| i * t.k1[idx] * x).collect();
    let d2 = v.iter().enumerate().map(|(idx, x)| i * t.k2[idx] * x).collect();
    (d1, d2)
}

/// Physical samples of `u·∇v` packed as `N₁ + i N₂`.
fn advection_physical(u: &VelocityField, v: &VelocityField) -> Vec<C> {
    let g = &u.grid;
    let uu = to_physical_pair(g, &u.c[0], &u.c[1]);
    let (a1, a2) = derivatives(&v.c[0], g);
    let dv1 = to_physical_pair(g, &a1, &a2);
    let (b1, b2) = derivatives(&v.c[1], g);
    let dv2 = to_physical_pair(g, &b1, &b2);
    let mut out = transform::take(uu.len());
    for (o, (u, (p, q))) in out.iter_mut().zip(uu.iter().zip(dv1.iter().zip(&dv2))) {
        *o = C::new(u.re * p.re + u.im * p.im, u.re * q.re + u.im * q.im);
    }
    transform::give(uu);
    transform::give(dv1);
    transform::give(dv2);
    out
}

/// `b(u, v, w) = (u·∇v, w)` by quadrature on the padded grid, exact for retained modes.
pub fn trilinear_b(u: &VelocityField, v: &VelocityField, w: &VelocityField) -> Result<f64> {
    u.check(v)?;
    u.check(w)?;
    let nn = advection_physical(u, v);
    let ww = to_physical_pair(&u.grid, &w.c[0], &w.c[1]);
    let s: f64 = nn.iter().zip(&ww).map(|(a, b)| a.re * b.re + a.im * b.im).sum();
    transform::give(nn);
    transform::give(ww);
    Ok(s * u.cell_area())
}

/// `P B(u, v)`, the projected and truncated advection term.
pub fn nonlinear_term(u: &VelocityField, v: &VelocityField) -> Result<VelocityField> {
    u.check(v)?;
    let nn = advection_physical(u, v);
    let (p, q) = from_physical_pair(&u.grid, nn);
    Ok(leray_project(RawField {
        grid: u.grid.clone(),
        c: [p, q],
    }))
}

/// Deterministic random field with `‖u‖ = spectrum.amplitude`.
pub fn random_divfree_field(grid: &TorusGrid, seed: u64, spectrum: Spectrum) -> VelocityField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw = RawField::zeros(grid);
    let km = grid.kmax();
    let s = grid.k_scale();
    for k1 in 0..=km {
        for k2 in -km..=km {
            if k1 == 0 && k2 <= 0 {
                continue;
            }
            let (a, b) = (k1 as f64 * s, k2 as f64 * s);
            let kk = (a * a + b * b).sqrt();
            let g = C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let amp = g * kk.powf(-spectrum.decay);
            let v = [amp * (b / kk), amp * (-a / kk)];
            raw.add(k1, k2, v).expect("retained");
            raw.add(-k1, -k2, [v[0].conj(), v[1].conj()]).expect("retained");
        }
    }
    let u = leray_project(raw);
    let norm = u.l2();
    if norm == 0.0 || spectrum.amplitude == 0.0 {
        return VelocityField::zero(grid);
    }
    u.scaled(spectrum.amplitude / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> TorusGrid {
        TorusGrid::standard(16).unwrap()
    }

    #[test]
    fn taylor_green_norms_match_analytic_integrals() {
        let u = VelocityField::taylor_green(&grid(), 1.0);
        // ∫∫ cos²x sin²y = π², two components.
        let l2sq = 2.0 * PI * PI;
        assert!((u.l2().powi(2) - l2sq).abs() < 1e-12 * l2sq);
        assert!((u.h1().powi(2) - 2.0 * l2sq).abs() < 1e-12 * l2sq);
        assert!((u.l2_quadrature() - u.l2()).abs() < 1e-12 * u.l2());
        assert!(u.divergence_l2() < 1e-14);
    }

    #[test]
    fn taylor_green_matches_physical_samples() {
        let g = grid();
        let u = VelocityField::taylor_green(&g, 1.0);
        let z = to_physical_pair(&g, &u.c[0], &u.c[1]);
        let m = g.padded();
        let h = g.domain_length() / m as f64;
        for r in (0..m).step_by(5) {
            for c in (0..m).step_by(3) {
                let (x, y) = (r as f64 * h, c as f64 * h);
                assert!((z[r * m + c].re - x.cos() * y.sin()).abs() < 1e-13);
                assert!((z[r * m + c].im + x.sin() * y.cos()).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn taylor_green_self_advection_is_a_gradient() {
        let u = VelocityField::taylor_green(&grid(), 1.3);
        let b = nonlinear_term(&u, &u).unwrap();
        assert!(b.l2() < 1e-12 * u.l2() * u.h1());
    }

    #[test]
    fn gradient_fields_project_to_zero() {
        let g = grid();
        let mut raw = RawField::zeros(&g);
        let s = g.k_scale();
        for (k1, k2, re, im) in [(1i64, 2i64, 0.3, -0.2), (3, -1, 0.1, 0.5), (0, 4, -0.7, 0.0)] {
            let gk = C::new(re, im);
            let (a, b) = (k1 as f64 * s, k2 as f64 * s);
            raw.add(k1, k2, [gk * a, gk * b]).unwrap();
            raw.add(-k1, -k2, [gk.conj() * a * -1.0, gk.conj() * b * -1.0]).unwrap();
        }
        assert!(leray_project(raw).l2() < 1e-14);
    }

    #[test]
    fn projection_is_idempotent() {
        let u = random_divfree_field(&grid(), 3, Spectrum::default());
        let raw = RawField {
            grid: u.grid.clone(),
            c: u.c.clone(),
        };
        let p = leray_project(raw);
        assert!(p.lincomb(1.0, &u, -1.0).unwrap().l2() < 1e-15 * u.l2().max(1.0));
    }

    #[test]
    fn random_field_is_deterministic_and_scaled() {
        let g = grid();
        let spec = Spectrum {
            amplitude: 2.5,
            decay: 1.0,
        };
        let a = random_divfree_field(&g, 11, spec);
        let b = random_divfree_field(&g, 11, spec);
        assert_eq!(a.c, b.c);
        assert!((a.l2() - 2.5).abs() < 1e-12);
        assert!(a.hermitian_defect() == 0.0);
        let z = random_divfree_field(&g, 11, Spectrum { amplitude: 0.0, decay: 1.0 });
        assert_eq!(z.l2(), 0.0);
    }

    #[test]
    fn stokes_form_matches_gradient_norm() {
        let u = random_divfree_field(&grid(), 5, Spectrum::default());
        let au = stokes_apply(&u);
        let lhs = au.inner(&u).unwrap();
        let h = u.h1().powi(2);
        assert!((lhs - h).abs() < 1e-12 * h);
    }

    #[test]
    fn zero_arguments_give_zero_advection() {
        let g = grid();
        let u = random_divfree_field(&g, 1, Spectrum::default());
        let z = VelocityField::zero(&g);
        assert_eq!(nonlinear_term(&u, &z).unwrap().l2(), 0.0);
        assert_eq!(nonlinear_term(&z, &u).unwrap().l2(), 0.0);
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let a = VelocityField::zero(&TorusGrid::standard(8).unwrap());
        let b = VelocityField::zero(&TorusGrid::standard(16).unwrap());
        assert!(matches!(a.inner(&b), Err(Error::GridMismatch)));
    }
}
