//! Nonlinear solve for the backward-Euler substep
//! `(w − uⁿ)/(θτ) + νAw + P B(w,w) = f`.

use crate::spectral::{nonlinear_term, VelocityField};

pub(crate) struct Problem<'a> {
    pub u_n: &'a VelocityField,
    pub f: &'a VelocityField,
    pub nu: f64,
    pub theta_tau: f64,
}

pub(crate) struct Solution {
    pub w: VelocityField,
    /// `P B(w, w)` at the returned iterate.
    pub pbww: VelocityField,
    pub picard_iters: usize,
    pub newton_iters: usize,
    pub residual: f64,
}

pub(crate) struct Failure {
    pub iterations: usize,
    pub residual: f64,
}

pub(crate) struct Settings {
    pub tol: f64,
    pub max_iter: usize,
    pub newton: bool,
}

impl Problem<'_> {
    /// `‖f‖ + ‖uⁿ‖/(θτ)`, the normalization of the relative residual.
    pub fn scale(&self) -> f64 {
        self.f.l2() + self.u_n.l2() / self.theta_tau
    }

    fn nl(&self, w: &VelocityField) -> VelocityField {
        nonlinear_term(w, w).expect("same grid")
    }

    /// Defect of `w` given `N = P B(w, w)`.
    pub fn defect(&self, w: &VelocityField, nl: &VelocityField) -> VelocityField {
        let g = w.grid();
        let t = g.plans();
        let inv = 1.0 / self.theta_tau;
        let mut d = w.clone();
        let (wc, uc, nc, fc) = (w.coeffs(), self.u_n.coeffs(), nl.coeffs(), self.f.coeffs());
        let dc = d.coeffs_mut();
        for j in 0..2 {
            for idx in 0..g.len() {
                dc[j][idx] = (wc[j][idx] - uc[j][idx]) * inv + wc[j][idx] * (self.nu * t.ksq[idx])
                    + nc[j][idx]
                    - fc[j][idx];
            }
        }
        d
    }

    fn relative(&self, d: &VelocityField) -> f64 {
        let s = self.scale();
        let r = d.l2();
        if r == 0.0 {
            0.0
        } else {
            r / s.max(f64::MIN_POSITIVE)
        }
    }

    /// `(I/(θτ) + νA)^{-1} v`.
    fn precondition(&self, v: &VelocityField) -> VelocityField {
        let g = v.grid();
        let t = g.plans();
        let inv = 1.0 / self.theta_tau;
        let mut out = v.clone();
        for comp in out.coeffs_mut().iter_mut() {
            for (idx, x) in comp.iter_mut().enumerate() {
                *x /= inv + self.nu * t.ksq[idx];
            }
        }
        out
    }

    fn picard_update(&self, nl: &VelocityField) -> VelocityField {
        let rhs = self
            .f
            .lincomb(1.0, self.u_n, 1.0 / self.theta_tau)
            .expect("same grid")
            .lincomb(1.0, nl, -1.0)
            .expect("same grid");
        self.precondition(&rhs)
    }

    /// Jacobian action `δ/(θτ) + νAδ + P B(δ,w) + P B(w,δ)`.
    fn jacobian(&self, w: &VelocityField, delta: &VelocityField) -> VelocityField {
        let g = w.grid();
        let t = g.plans();
        let inv = 1.0 / self.theta_tau;
        let mut lin = delta.clone();
        for comp in lin.coeffs_mut().iter_mut() {
            for (idx, x) in comp.iter_mut().enumerate() {
                *x *= inv + self.nu * t.ksq[idx];
            }
        }
        let b1 = nonlinear_term(delta, w).expect("same grid");
        let b2 = nonlinear_term(w, delta).expect("same grid");
        lin.lincomb(1.0, &b1, 1.0)
            .expect("same grid")
            .lincomb(1.0, &b2, 1.0)
            .expect("same grid")
    }
}

pub(crate) fn solve(p: &Problem, s: &Settings) -> Result<Solution, Failure> {
    let mut w = p.u_n.clone();
    let mut nl = p.nl(&w);
    let mut prev = f64::INFINITY;
    let mut best: Option<(f64, VelocityField, VelocityField)> = None;
    let mut iters = 0;
    loop {
        let r = p.relative(&p.defect(&w, &nl));
        if r <= s.tol {
            return Ok(Solution {
                w,
                pbww: nl,
                picard_iters: iters,
                newton_iters: 0,
                residual: r,
            });
        }
        if best.as_ref().map_or(true, |b| r < b.0) {
            best = Some((r, w.clone(), nl.clone()));
        }
        // Residuals must not grow once the first update has been made.
        let stalled = iters >= 2 && r > prev;
        if iters == s.max_iter || stalled || !r.is_finite() {
            break;
        }
        prev = r;
        w = p.picard_update(&nl);
        nl = p.nl(&w);
        iters += 1;
    }
    let (r0, w0, n0) = best.expect("at least one residual evaluated");
    if !s.newton {
        return Err(Failure {
            iterations: iters,
            residual: r0,
        });
    }
    newton(p, s, w0, n0, r0, iters)
}

fn newton(
    p: &Problem,
    s: &Settings,
    mut w: VelocityField,
    mut nl: VelocityField,
    mut r: f64,
    picard_iters: usize,
) -> Result<Solution, Failure> {
    let mut k = 0;
    while k < s.max_iter {
        let d = p.defect(&w, &nl);
        r = p.relative(&d);
        if r <= s.tol {
            return Ok(Solution {
                w,
                pbww: nl,
                picard_iters,
                newton_iters: k,
                residual: r,
            });
        }
        if !r.is_finite() {
            break;
        }
        let rhs = d.scaled(-1.0);
        let delta = gmres(
            |v| p.jacobian(&w, v),
            |v| p.precondition(v),
            &rhs,
            1e-10,
            60,
            20,
        );
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda >= 1.0 / 64.0 {
            let mut trial = w.lincomb(1.0, &delta, lambda).expect("same grid");
            trial.symmetrize();
            let tn = p.nl(&trial);
            let tr = p.relative(&p.defect(&trial, &tn));
            if tr < r {
                w = trial;
                nl = tn;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        k += 1;
        if !accepted {
            break;
        }
    }
    Err(Failure {
        iterations: picard_iters + k,
        residual: r,
    })
}

/// Restarted right-preconditioned GMRES over the real inner product `(·,·)`.
fn gmres(
    apply: impl Fn(&VelocityField) -> VelocityField,
    precond: impl Fn(&VelocityField) -> VelocityField,
    b: &VelocityField,
    tol: f64,
    restart: usize,
    max_outer: usize,
) -> VelocityField {
    let bnorm = b.l2();
    let mut x = b.scaled(0.0);
    if bnorm == 0.0 {
        return x;
    }
    for _ in 0..max_outer {
        let ax = apply(&x);
        let r = b.lincomb(1.0, &ax, -1.0).expect("same grid");
        let beta = r.l2();
        if beta <= tol * bnorm {
            break;
        }
        let mut v = vec![r.scaled(1.0 / beta)];
        let mut z: Vec<VelocityField> = Vec::new();
        let mut h = vec![vec![0.0; restart]; restart + 1];
        let (mut cs, mut sn) = (vec![0.0; restart], vec![0.0; restart]);
        let mut g = vec![0.0; restart + 1];
        g[0] = beta;
        let mut used = 0;
        for j in 0..restart {
            let mut zj = precond(&v[j]);
            zj.symmetrize();
            let mut wv = apply(&zj);
            z.push(zj);
            for i in 0..=j {
                h[i][j] = wv.inner(&v[i]).expect("same grid");
                wv = wv.lincomb(1.0, &v[i], -h[i][j]).expect("same grid");
            }
            h[j + 1][j] = wv.l2();
            for i in 0..j {
                let t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
                h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = t;
            }
            let den = h[j][j].hypot(h[j + 1][j]);
            if den == 0.0 {
                used = j;
                break;
            }
            cs[j] = h[j][j] / den;
            sn[j] = h[j + 1][j] / den;
            h[j][j] = den;
            h[j + 1][j] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];
            used = j + 1;
            if g[j + 1].abs() <= tol * bnorm || wv.l2() == 0.0 {
                break;
            }
            let nrm = wv.l2();
            v.push(wv.scaled(1.0 / nrm));
        }
        let mut y = vec![0.0; used];
        for i in (0..used).rev() {
            let mut s = g[i];
            for k in i + 1..used {
                s -= h[i][k] * y[k];
            }
            y[i] = s / h[i][i];
        }
        for (yi, zi) in y.iter().zip(&z) {
            x = x.lincomb(1.0, zi, *yi).expect("same grid");
        }
        if used < restart {
            break;
        }
    }
    x
}
