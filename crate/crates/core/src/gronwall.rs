//! Discrete Grönwall and discrete uniform Grönwall bounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `ξₙ, αₙ, ηₙ, ζₙ` on a common index range `0..len` with step `τ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceBundle {
    pub tau: f64,
    pub xi: Vec<f64>,
    pub alpha: Vec<f64>,
    pub eta: Vec<f64>,
    pub zeta: Vec<f64>,
}

impl SequenceBundle {
    /// Entries must be finite and nonnegative; zeros are allowed so that
    /// trivial trajectories can be fed through unchanged.
    pub fn new(tau: f64, xi: Vec<f64>, alpha: Vec<f64>, eta: Vec<f64>, zeta: Vec<f64>) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::Domain(format!("tau = {tau}")));
        }
        let n = xi.len();
        if alpha.len() != n || eta.len() != n || zeta.len() != n {
            return Err(Error::Domain("sequences differ in length".into()));
        }
        for (name, s) in [("xi", &xi), ("alpha", &alpha), ("eta", &eta), ("zeta", &zeta)] {
            if let Some(i) = s.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::Domain(format!("{name}[{i}] = {}", s[i])));
            }
        }
        Ok(Self {
            tau,
            xi,
            alpha,
            eta,
            zeta,
        })
    }

    /// Bundle whose `ξ` satisfies the recursion with equality from `ξ₀`.
    pub fn saturated(tau: f64, xi0: f64, alpha: Vec<f64>, eta: Vec<f64>, zeta: Vec<f64>) -> Result<Self> {
        let mut xi = Vec::with_capacity(alpha.len());
        if !alpha.is_empty() {
            xi.push(xi0);
        }
        for n in 1..alpha.len() {
            xi.push(step(tau, xi[n - 1], alpha[n - 1], eta[n - 1], zeta[n]));
        }
        Self::new(tau, xi, alpha, eta, zeta)
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    /// Largest `n ≥ 1` with `ξₙ > ξₙ₋₁(1+ταₙ₋₁)(1+τηₙ₋₁) + τζₙ`, relative tolerance `tol`.
    pub fn recursion_violation(&self, from: usize, tol: f64) -> Option<usize> {
        (from.max(1)..self.len()).find(|&n| {
            let rhs = step(self.tau, self.xi[n - 1], self.alpha[n - 1], self.eta[n - 1], self.zeta[n]);
            self.xi[n] - rhs > tol * rhs.max(self.xi[n])
        })
    }
}

fn step(tau: f64, xi: f64, alpha: f64, eta: f64, zeta: f64) -> f64 {
    xi * (1.0 + tau * alpha) * (1.0 + tau * eta) + tau * zeta
}

/// Neumaier-compensated accumulator.
#[derive(Clone, Copy, Default)]
struct Sum {
    s: f64,
    c: f64,
}

impl Sum {
    fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    fn value(self) -> f64 {
        self.s + self.c
    }
}

fn sum(xs: impl Iterator<Item = f64>) -> f64 {
    let mut acc = Sum::default();
    xs.for_each(|x| acc.add(x));
    acc.value()
}

/// Closed-form bound on `ξₙ` for `2 ≤ n < len`; for `n ∈ {0, 1}` the recursion itself.
pub fn dgl_bound(b: &SequenceBundle, n: usize) -> Result<f64> {
    if n >= b.len() {
        return Err(Error::IndexOutOfRange { index: n, len: b.len() });
    }
    let t = b.tau;
    match n {
        0 => return Ok(b.xi[0]),
        1 => return Ok(step(t, b.xi[0], b.alpha[0], b.eta[0], b.zeta[1])),
        _ => {}
    }
    // Walk i from n−1 down to 0, keeping S_i = Σ_{j=i}^{n−1} τ(ηⱼ + αⱼ).
    let mut suffix = Sum::default();
    let mut total = Sum::default();
    total.add(t * b.zeta[n]);
    for i in (0..n).rev() {
        suffix.add(t * b.eta[i]);
        suffix.add(t * b.alpha[i]);
        if i >= 1 {
            total.add(t * b.zeta[i] * suffix.value().exp());
        }
    }
    total.add(b.xi[0] * suffix.value().exp());
    Ok(total.value())
}

/// `(a₃/(τn₂) + a₂)·e^{a₁}·e^{a₄}`.
pub fn dugl_bound(a1: f64, a2: f64, a3: f64, a4: f64, tau: f64, n2: usize) -> Result<f64> {
    if n2 == 0 {
        return Err(Error::WindowInfeasible("n2 must be at least 1".into()));
    }
    for (name, a) in [("a1", a1), ("a2", a2), ("a3", a3), ("a4", a4)] {
        if !(a >= 0.0) {
            return Err(Error::Domain(format!("{name} = {a} must be nonnegative")));
        }
    }
    Ok((a3 / (tau * n2 as f64) + a2) * a1.exp() * a4.exp())
}

/// Tightest window constants: the maxima over `n₁ ≤ n' ≤ n* − n₂` of
/// `Σ_{n=n'}^{n'+n₂} τ·(ηₙ, ζₙ, ξₙ, αₙ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowSums {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
}

impl WindowSums {
    pub fn bound(&self, tau: f64, n2: usize) -> Result<f64> {
        dugl_bound(self.a1, self.a2, self.a3, self.a4, tau, n2)
    }
}

/// The window constants exist as soon as one window fits (`n₁ + n₂ ≤ n*`); the
/// bound itself covers `n₁ + n₂ + 1 ≤ n ≤ n*`, which is empty in the single-window case.
pub fn verify_hypotheses(b: &SequenceBundle, n1: usize, n2: usize, n_star: usize) -> Result<WindowSums> {
    if n1 >= n_star || n1 + n2 > n_star {
        return Err(Error::WindowInfeasible(format!(
            "need n1 < n* and n1 + n2 <= n*, got n1 = {n1}, n2 = {n2}, n* = {n_star}"
        )));
    }
    if n_star >= b.len() {
        return Err(Error::IndexOutOfRange {
            index: n_star,
            len: b.len(),
        });
    }
    let t = b.tau;
    let window = |s: &[f64], start: usize| sum(s[start..=start + n2].iter().map(|v| t * v));
    let mut out = WindowSums {
        a1: 0.0,
        a2: 0.0,
        a3: 0.0,
        a4: 0.0,
    };
    for start in n1..=n_star - n2 {
        out.a1 = out.a1.max(window(&b.eta, start));
        out.a2 = out.a2.max(window(&b.zeta, start));
        out.a3 = out.a3.max(window(&b.xi, start));
        out.a4 = out.a4.max(window(&b.alpha, start));
    }
    Ok(out)
}
