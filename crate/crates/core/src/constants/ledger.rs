use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which reading of the long-time constants to use where the printed formulas
/// are ambiguous or inconsistent with the estimates they summarize.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    PaperLiteral,
    DerivationConsistent,
}

impl Variant {
    pub fn label(self) -> &'static str {
        match self {
            Variant::PaperLiteral => "paper_literal",
            Variant::DerivationConsistent => "derivation_consistent",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerInputs {
    pub nu: f64,
    pub lambda1: f64,
    pub theta: f64,
    pub tau: f64,
    pub u0_l2: f64,
    pub u0_h1: f64,
    pub f_sup: f64,
    /// Horizon `T` of the finite-time V bound.
    pub horizon: f64,
    /// Window length `r` of the uniform bound.
    pub r: f64,
    pub eps1: Option<f64>,
    pub delta1: Option<f64>,
}

impl LedgerInputs {
    /// Inputs with the default auxiliary constants and `T = 0`; see [`BoundLedger::new`].
    pub fn new(nu: f64, lambda1: f64, theta: f64, tau: f64, u0_l2: f64, u0_h1: f64, f_sup: f64, r: f64) -> Self {
        Self {
            nu,
            lambda1,
            theta,
            tau,
            u0_l2,
            u0_h1,
            f_sup,
            horizon: 0.0,
            r,
            eps1: None,
            delta1: None,
        }
    }
}

/// `K₅(x, f, t) = (x² + t·18f²/(5ν))·exp(C₆ + C₇t + C₈t²)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct K5Fn {
    pub nu: f64,
    pub c6: f64,
    pub c7: f64,
    pub c8: f64,
}

impl K5Fn {
    pub fn ln_eval(&self, x: f64, f: f64, t: f64) -> f64 {
        self.ln_eval_sq(2.0 * x.ln(), f, t)
    }

    /// `ln K₅` with the first argument given as `ln x²`, for `x` beyond the f64 range.
    pub fn ln_eval_sq(&self, ln_x2: f64, f: f64, t: f64) -> f64 {
        let ln_src = (t * 18.0 * f * f / (5.0 * self.nu)).ln();
        let (hi, lo) = if ln_x2 >= ln_src { (ln_x2, ln_src) } else { (ln_src, ln_x2) };
        let base = if hi == f64::NEG_INFINITY { hi } else { hi + (lo - hi).exp().ln_1p() };
        base + self.c6 + self.c7 * t + self.c8 * t * t
    }

    pub fn eval(&self, x: f64, f: f64, t: f64) -> f64 {
        self.ln_eval(x, f, t).exp()
    }
}

/// Product with `0·∞ = 0`: a vanishing mass bound kills the term however large the other factor.
fn z(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

/// Constants that follow from a bound `‖uⁿ‖² ≤ k1` and starting data `(u_l2, u_h1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    pub k1: f64,
    pub c1: f64,
    /// `|C₁⁴(1−θ)⁴θ³/(ν³(2θ−1)³) − ν/(2θ)|`.
    pub g: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
    pub c7: f64,
    pub c8: f64,
}

/// Window constants of the uniform Grönwall step and what they imply.
/// Quantities that can overflow are also kept as logarithms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LongTime {
    pub variant: Variant,
    pub c9: f64,
    pub c10: f64,
    /// The factor multiplying `(108/ν³)·16θ/(ν(2θ−1))` in `C₁₀`.
    pub q4: f64,
    pub c11: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub ln_rho1_sq: f64,
    pub rho1: f64,
    /// `K₅` used after the first window.
    pub k5_restart: K5Fn,
    pub ln_k6: f64,
    pub ln_k7: f64,
    pub ln_kappa3_restart: f64,
    pub ln_kappa4_restart: f64,
    pub ln_admissible_tau: f64,
}

impl LongTime {
    pub fn k6(&self) -> f64 {
        self.ln_k6.exp()
    }

    pub fn k7(&self) -> f64 {
        self.ln_k7.exp()
    }

    pub fn rho1_sq(&self) -> f64 {
        self.ln_rho1_sq.exp()
    }

    pub fn admissible_tau(&self) -> f64 {
        self.ln_admissible_tau.exp()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub entry: String,
    pub source: String,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundLedger {
    pub inputs: LedgerInputs,
    pub eps1: f64,
    pub delta1: f64,
    pub kappa1: f64,
    pub rho0: f64,
    pub t0: f64,
    pub main: Chain,
    pub k5: K5Fn,
    pub kappa2: f64,
    /// `ln κ₃(‖∇u₀‖, ‖f‖∞, T₀+r)`.
    pub ln_kappa3: f64,
    pub ln_kappa4: f64,
    /// `ln K₅(‖∇u₀‖, ‖f‖∞, T)` at the configured horizon.
    pub ln_k5_horizon: f64,
    pub literal: LongTime,
    pub derived: LongTime,
    pub provenance: Vec<Provenance>,
}

fn pos(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive, got {v}")))
    }
}

fn nonneg(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be nonnegative, got {v}")))
    }
}

/// `ln(1/(c·y))` where `ln y` is known; `c` is finite and positive.
fn ln_recip(c: f64, ln_y: f64) -> f64 {
    -(c.ln() + ln_y)
}

struct Ctx {
    nu: f64,
    lambda1: f64,
    theta: f64,
    tau: f64,
    f: f64,
    eps1: f64,
    delta1: f64,
}

impl Ctx {
    fn m(&self) -> f64 {
        108.0 / self.nu.powi(3)
    }

    fn d(&self) -> f64 {
        2.0 * self.theta - 1.0
    }

    fn p(&self) -> f64 {
        let t = self.theta;
        4.0 * t * t - 6.0 * t + 3.0
    }

    /// `16θ/(ν(2θ−1))`.
    fn w(&self) -> f64 {
        16.0 * self.theta / (self.nu * self.d())
    }

    fn chain(&self, k1: f64, u_l2: f64, u_h1: f64) -> Chain {
        let (nu, t, l1, f) = (self.nu, self.theta, self.lambda1, self.f);
        let d = self.d();
        let c1 = (2.0 * k1 * k1 * (2.0 * t * t - 2.0 * t + 1.0)).powf(0.25);
        let g = (c1.powi(4) * (1.0 - t).powi(4) * t.powi(3) / (nu.powi(3) * d.powi(3))
            - nu / (2.0 * t))
            .abs();
        let k2 = (0.5 + g / nu) * u_l2 * u_l2 + self.tau * nu / (8.0 * t) * self.p() * u_h1 * u_h1;
        let k3 = (4.0 * t / (nu * d) + g / (nu * nu)) * f * f / l1;
        let k4 = 0.5 + g / nu;
        let c2 = std::f64::consts::FRAC_1_SQRT_2 * t * (1.0 + 2.0 * t) * k1.sqrt();
        let c3 = nu * t * t + 0.5 * nu * t * t - self.eps1 - nu * t * (2.0 - t) * self.delta1 / 2.0;
        let c4 = c2 * c2 / self.eps1 - nu * (1.0 - t).powi(2) + nu - 0.5 * nu * t * t
            + nu * t * (2.0 - t) / (2.0 * self.delta1);
        let c5 = self.m() * k1 * self.w();
        Chain {
            k1,
            c1,
            g,
            k2,
            k3,
            k4,
            c2,
            c3,
            c4,
            c5,
            c6: 3.0 * z(c5, k2) + 2.0 * z(c5 * c5, k2 * k2),
            c7: 3.0 * z(c5, k3) + 4.0 * z(c5 * c5, k2 * k3),
            c8: 2.0 * z(c5 * c5, k3 * k3),
        }
    }

    fn k5(&self, ch: &Chain) -> K5Fn {
        K5Fn {
            nu: self.nu,
            c6: ch.c6,
            c7: ch.c7,
            c8: ch.c8,
        }
    }

    /// `ln κ₃` for a given `ln K₅`.
    fn ln_kappa3(&self, ch: &Chain, ln_k5: f64) -> f64 {
        ln_recip(15.0 * self.m() * ch.k1 * (1.0 + ch.c4 / ch.c3), ln_k5)
    }

    fn ln_kappa4(&self, ch: &Chain, ln_k5: f64) -> f64 {
        let c = 15.0 * 108.0 * 108.0 / self.nu.powi(7) * ch.k1 * ch.k1 / self.lambda1;
        ln_recip(c, 2.0 * ln_k5)
    }
}

impl BoundLedger {
    /// Evaluates every constant. When `inputs.horizon` is zero the horizon is set to `T₀ + r`.
    pub fn new(inputs: LedgerInputs) -> Result<Self> {
        let LedgerInputs {
            nu,
            lambda1,
            theta,
            tau,
            u0_l2,
            u0_h1,
            f_sup: f,
            r,
            ..
        } = inputs;
        pos("nu", nu)?;
        pos("lambda1", lambda1)?;
        pos("tau", tau)?;
        pos("r", r)?;
        nonneg("|u0|", u0_l2)?;
        nonneg("|grad u0|", u0_h1)?;
        nonneg("|f|", f)?;
        nonneg("T", inputs.horizon)?;
        if !(theta > 0.5 && theta < 1.0) {
            return Err(Error::Domain(format!("theta = {theta} outside (1/2, 1)")));
        }
        let eps1 = inputs.eps1.unwrap_or(nu * theta * theta / 2.0);
        let delta1 = inputs.delta1.unwrap_or(theta / (2.0 * (2.0 - theta)));
        pos("eps1", eps1)?;
        pos("delta1", delta1)?;
        let cx = Ctx {
            nu,
            lambda1,
            theta,
            tau,
            f,
            eps1,
            delta1,
        };
        let d = cx.d();
        let kappa1 = 1.0 / (lambda1 * nu);
        if r < 4.0 * kappa1 {
            return Err(Error::Domain(format!("window r = {r} below 4*kappa1 = {}", 4.0 * kappa1)));
        }
        let rho0 = f * f / (lambda1 * nu * nu * d);
        let k1 = u0_l2 * u0_l2 + 3.0 * rho0;
        let t0 = if u0_l2 * u0_l2 <= rho0 {
            0.0
        } else if rho0 == 0.0 {
            f64::INFINITY
        } else {
            15.0 / (lambda1 * nu * d) * (u0_l2 * u0_l2 / rho0).ln()
        };
        let main = cx.chain(k1, u0_l2, u0_h1);
        if !(main.c3 > 0.0) || !(main.c4 > 0.0) {
            return Err(Error::Domain(format!(
                "auxiliary constants give C3 = {}, C4 = {}",
                main.c3, main.c4
            )));
        }
        let k5 = cx.k5(&main);
        let horizon = if inputs.horizon > 0.0 { inputs.horizon } else { t0 + r };
        let m = cx.m();
        let kappa2 = 1.0
            / (15.0 * m * k1 * (2.0 / (nu * main.c3 * lambda1) + 2.0 / (lambda1 * nu * nu)) * f * f);
        let ln_k5_t0r = k5.ln_eval(u0_h1, f, t0 + r);
        let ln_kappa3 = cx.ln_kappa3(&main, ln_k5_t0r);
        let ln_kappa4 = cx.ln_kappa4(&main, ln_k5_t0r);
        let base_ln_tau = [kappa1.ln(), kappa2.ln(), ln_kappa3, ln_kappa4]
            .into_iter()
            .fold(f64::INFINITY, f64::min);

        let literal = literal_long_time(&cx, &main, &k5, rho0, r, f, u0_h1, t0, base_ln_tau);
        let derived = derived_long_time(&cx, &main, &k5, rho0, r, f, u0_h1, t0, base_ln_tau);

        let mut inputs = inputs;
        inputs.horizon = horizon;
        Ok(Self {
            inputs,
            eps1,
            delta1,
            kappa1,
            rho0,
            t0,
            main,
            k5,
            kappa2,
            ln_kappa3,
            ln_kappa4,
            ln_k5_horizon: k5.ln_eval(u0_h1, f, horizon),
            literal,
            derived,
            provenance: provenance(),
        })
    }

    pub fn long_time(&self, v: Variant) -> &LongTime {
        match v {
            Variant::PaperLiteral => &self.literal,
            Variant::DerivationConsistent => &self.derived,
        }
    }

    pub fn ln_admissible_tau(&self, v: Variant) -> f64 {
        self.long_time(v).ln_admissible_tau
    }

    /// Largest step the long-time theorem admits; may underflow to zero for large data,
    /// in which case [`Self::ln_admissible_tau`] still carries the value.
    pub fn admissible_tau(&self, v: Variant) -> f64 {
        self.ln_admissible_tau(v).exp()
    }

    pub fn kappa3(&self, x: f64, f: f64, t: f64) -> f64 {
        let cx = self.ctx();
        cx.ln_kappa3(&self.main, self.k5.ln_eval(x, f, t)).exp()
    }

    pub fn kappa4(&self, x: f64, f: f64, t: f64) -> f64 {
        let cx = self.ctx();
        cx.ln_kappa4(&self.main, self.k5.ln_eval(x, f, t)).exp()
    }

    /// `ln κ₃(‖∇u₀‖, ‖f‖∞, t)`.
    pub fn ln_kappa3_at(&self, t: f64) -> f64 {
        let i = &self.inputs;
        self.ctx().ln_kappa3(&self.main, self.k5.ln_eval(i.u0_h1, i.f_sup, t))
    }

    /// `ln κ₄(‖∇u₀‖, ‖f‖∞, t)`.
    pub fn ln_kappa4_at(&self, t: f64) -> f64 {
        let i = &self.inputs;
        self.ctx().ln_kappa4(&self.main, self.k5.ln_eval(i.u0_h1, i.f_sup, t))
    }

    fn ctx(&self) -> Ctx {
        Ctx {
            nu: self.inputs.nu,
            lambda1: self.inputs.lambda1,
            theta: self.inputs.theta,
            tau: self.inputs.tau,
            f: self.inputs.f_sup,
            eps1: self.eps1,
            delta1: self.delta1,
        }
    }

    /// `M = 108/ν³`.
    pub fn m(&self) -> f64 {
        108.0 / self.inputs.nu.powi(3)
    }

    /// Number of steps per window, `n₂ = ⌊r/τ⌋ − 2`.
    pub fn n2(&self) -> i64 {
        (self.inputs.r / self.inputs.tau).floor() as i64 - 2
    }

    /// Flat name/value view for tables and CSV rows.
    pub fn entries(&self) -> Vec<(String, f64)> {
        let c = &self.main;
        let mut v: Vec<(String, f64)> = vec![
            ("kappa1".into(), self.kappa1),
            ("kappa2".into(), self.kappa2),
            ("ln_kappa3".into(), self.ln_kappa3),
            ("ln_kappa4".into(), self.ln_kappa4),
            ("rho0".into(), self.rho0),
            ("T0".into(), self.t0),
            ("K1".into(), c.k1),
            ("C1".into(), c.c1),
            ("K2".into(), c.k2),
            ("K3".into(), c.k3),
            ("K4".into(), c.k4),
            ("C2".into(), c.c2),
            ("C3".into(), c.c3),
            ("C4".into(), c.c4),
            ("C5".into(), c.c5),
            ("C6".into(), c.c6),
            ("C7".into(), c.c7),
            ("C8".into(), c.c8),
            ("eps1".into(), self.eps1),
            ("delta1".into(), self.delta1),
            ("ln_K5_horizon".into(), self.ln_k5_horizon),
        ];
        for lt in [&self.literal, &self.derived] {
            let p = match lt.variant {
                Variant::PaperLiteral => "paper",
                Variant::DerivationConsistent => "derived",
            };
            for (k, x) in [
                ("C9", lt.c9),
                ("C10", lt.c10),
                ("Q4", lt.q4),
                ("C11", lt.c11),
                ("a1", lt.a1),
                ("a2", lt.a2),
                ("a3", lt.a3),
                ("a4", lt.a4),
                ("ln_rho1_sq", lt.ln_rho1_sq),
                ("ln_K6", lt.ln_k6),
                ("ln_K7", lt.ln_k7),
                ("ln_admissible_tau", lt.ln_admissible_tau),
            ] {
                v.push((format!("{p}.{k}"), x));
            }
        }
        v
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    cx: &Ctx,
    variant: Variant,
    (c9, c10, q4, c11): (f64, f64, f64, f64),
    (a1, a2, a3, a4): (f64, f64, f64, f64),
    ln_rho1_sq: f64,
    restart: &Chain,
    ln_k5_first: f64,
    base_ln_tau: f64,
    r: f64,
    f: f64,
) -> LongTime {
    let rho1 = (0.5 * ln_rho1_sq).exp();
    let k5r = cx.k5(restart);
    let ln_k6 = k5r.ln_eval_sq(ln_rho1_sq, f, r);
    let ln_kappa3_restart = cx.ln_kappa3(restart, ln_k6);
    let ln_kappa4_restart = cx.ln_kappa4(restart, ln_k6);
    LongTime {
        variant,
        c9,
        c10,
        q4,
        c11,
        a1,
        a2,
        a3,
        a4,
        ln_rho1_sq,
        rho1,
        k5_restart: k5r,
        ln_k6,
        ln_k7: ln_k5_first.max(ln_k6),
        ln_kappa3_restart,
        ln_kappa4_restart,
        ln_admissible_tau: base_ln_tau.min(ln_kappa3_restart).min(ln_kappa4_restart),
    }
}

/// Constants exactly as printed. `Q₄` is not defined in the source; the literal
/// reading takes `Q₄ = K₃`.
#[allow(clippy::too_many_arguments)]
fn literal_long_time(
    cx: &Ctx,
    main: &Chain,
    k5: &K5Fn,
    rho0: f64,
    r: f64,
    f: f64,
    u0_h1: f64,
    t0: f64,
    base_ln_tau: f64,
) -> LongTime {
    let (nu, d, p, m, w) = (cx.nu, cx.d(), cx.p(), cx.m(), cx.w());
    let c9 = 4.0 * main.k4 * m * w;
    let q4 = main.k3;
    let c10 = q4 * m * w;
    let c11 = m * 2.0 * p / d;
    let z = 2.0 * p / (15.0 * d);
    let a4 = c9 * rho0 * rho0 + c10 * rho0 * r + z;
    let a1 = 2.0 * a4
        + 8.0 * c9 * c9 * rho0.powi(4)
        + 8.0 * c10 * c10 * rho0 * rho0 * r * r
        + 16.0 * p * p / (225.0 * d * d);
    let a2 = r * 18.0 * f * f / (5.0 * nu);
    let a3 = 4.0 * main.k4 * w * rho0 + w * main.k3 * r
        + (2.0 / d) * p * nu.powi(3) / (15.0 * 108.0 * rho0);
    let pre = 160.0 * cx.theta * rho0 * main.k4 / (nu * r * d)
        + 40.0 * cx.theta * main.k3 / (nu * d)
        + nu.powi(3) * p / (324.0 * d * r * rho0)
        + a2;
    let expo = 2.0 * c9 * rho0 * rho0 + 2.0 * c10 * rho0 * r + 4.0 * p / (15.0 * d)
        + 8.0 * c9 * c9 * rho0.powi(4)
        + 8.0 * c10 * c10 * rho0 * rho0 * r * r
        + 16.0 * p * p / (225.0 * d * d)
        + c9 * rho0 * rho0
        + c10 * rho0 * r
        + 2.0 * p / (15.0 * d);
    let ln_rho1_sq = pre.ln() + expo;
    let ln_k5_first = k5.ln_eval(u0_h1, f, t0 + r);
    finish(
        cx,
        Variant::PaperLiteral,
        (c9, c10, q4, c11),
        (a1, a2, a3, a4),
        ln_rho1_sq,
        main,
        ln_k5_first,
        base_ln_tau,
        r,
        f,
    )
}

/// Window constants rebuilt from the summed estimates with `‖uⁿ‖² ≤ 4ρ₀` after `T₀`.
#[allow(clippy::too_many_arguments)]
fn derived_long_time(
    cx: &Ctx,
    main: &Chain,
    k5: &K5Fn,
    rho0: f64,
    r: f64,
    f: f64,
    u0_h1: f64,
    t0: f64,
    base_ln_tau: f64,
) -> LongTime {
    let (nu, d, p, m, w) = (cx.nu, cx.d(), cx.p(), cx.m(), cx.w());
    let kw = 4.0 * rho0;
    // τK₅ ≤ 1/(15 M K₁ (1 + C₄/C₃)) under the κ₃ restriction.
    let tk5 = 1.0 / (15.0 * m * main.k1 * (1.0 + main.c4 / main.c3));
    let c9 = 16.0 * main.k4 * m * w;
    let q4 = 4.0 * main.k3;
    let c10 = q4 * m * w;
    let c11 = m * 2.0 * p / d;
    // Σ τ‖∇uⁿ‖² over one window.
    let window = w * (main.k4 * kw + main.k3 * r) + (2.0 * p / d) * tk5;
    let a3 = window;
    // No mass after T₀ means no α-sum, whatever the K₅ allowance.
    let a4 = if kw == 0.0 { 0.0 } else { m * kw * window };
    let a1 = 2.0 * a4 + 2.0 * a4 * a4;
    let a2 = r * 18.0 * f * f / (5.0 * nu);
    let steps = (r / cx.tau).floor() - 2.0;
    let ln_rho1_sq = if steps >= 1.0 {
        (a3 / (cx.tau * steps) + a2).ln() + a1 + a4
    } else {
        f64::INFINITY
    };
    let rho1 = (0.5 * ln_rho1_sq).exp();
    let restart = cx.chain(kw.min(main.k1), 2.0 * rho0.sqrt(), rho1);
    let ln_k5_first = k5.ln_eval(u0_h1, f, t0 + r);
    finish(
        cx,
        Variant::DerivationConsistent,
        (c9, c10, q4, c11),
        (a1, a2, a3, a4),
        ln_rho1_sq,
        &restart,
        ln_k5_first,
        base_ln_tau,
        r,
        f,
    )
}

fn provenance() -> Vec<Provenance> {
    let p = |e: &str, s: &str, n: &str| Provenance {
        entry: e.into(),
        source: s.into(),
        note: n.into(),
    };
    vec![
        p("kappa1..kappa4, K1..K5, C1..C8, rho0", "printed", "single reading"),
        p("T0", "printed", "clamped to 0 when |u0|^2 <= rho0"),
        p("eps1, delta1", "default", "eps1 = nu*theta^2/2, delta1 = theta/(2(2-theta)) unless overridden"),
        p("C9", "both", "literal: 4*K4*M*W; derived: 16*K4*M*W from K4*|u^n|^2 <= 4*K4*rho0 and alpha-prefactor M*4*rho0"),
        p("C10", "both", "Q4 undefined in the source; literal reading Q4 = K3, derived Q4 = 4*K3"),
        p("a3, a4", "both", "derived bounds tau*K5 by 1/(15*M*K1*(1+C4/C3)), the kappa3 restriction itself"),
        p("a1", "both", "literal: expanded square; derived: 2*a4 + 2*a4^2"),
        p("rho1", "both", "literal: printed closed form with 1/(tau*n2) <= 5/(2r); derived: exact 1/(tau*n2), never larger when r >= 4*kappa1"),
        p("K6", "both", "literal: K5 with the initial-data constants at (rho1, f, r); derived: constants rebuilt from |u|^2 <= 4*rho0, |grad u| <= rho1"),
    ]
}
