use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `α_θ, ε_θ, a_θ, b_θ` of the energy identity for one `(θ, λ₁ντ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaConstants {
    pub theta: f64,
    pub lambda1_nu_tau: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub a: f64,
    pub b: f64,
}

/// `4θ − λ₁ντ(2θ+1)(1−θ)`, written as a sum of nonnegative terms for `λ₁ντ ≤ 1`.
fn radicand_r1(theta: f64, x: f64) -> f64 {
    (1.0 - x) * 4.0 * theta + x * (2.0 * theta * theta + 3.0 * theta - 1.0)
}

pub fn theta_constants(theta: f64, lambda1: f64, nu: f64, tau: f64) -> Result<ThetaConstants> {
    theta_constants_scaled(theta, lambda1 * nu * tau)
}

/// Same as [`theta_constants`] with `x = λ₁ντ` supplied directly.
pub fn theta_constants_scaled(theta: f64, x: f64) -> Result<ThetaConstants> {
    if !(0.5..=1.0).contains(&theta) {
        return Err(Error::Domain(format!("theta = {theta} outside [1/2, 1]")));
    }
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::Domain(format!("lambda1*nu*tau = {x} must be nonnegative")));
    }
    if x > 1.0 {
        return Err(Error::Domain(format!(
            "step restriction violated: lambda1*nu*tau = {x} > 1"
        )));
    }
    let r1 = radicand_r1(theta, x);
    let r2 = x * (1.0 - theta);
    let ra = (2.0 * theta - 1.0) * (1.0 - theta) * r1 * x;
    if r1 < 0.0 || r2 < 0.0 || ra < 0.0 {
        return Err(Error::Domain("negative radicand".into()));
    }
    let d = 2.0 * theta - 1.0;
    let alpha = theta - 0.5 * d * (1.0 - theta) * x + 0.5 * ra.sqrt();
    let epsilon = d * x;
    // The (2θ−1) factor sits under the root; with it outside, the identities below fail.
    let s1 = (d * r1).sqrt();
    let s2 = r2.sqrt();
    Ok(ThetaConstants {
        theta,
        lambda1_nu_tau: x,
        alpha,
        epsilon,
        a: 0.5 * (s1 - s2),
        b: 0.5 * (s1 + s2),
    })
}

fn rel(lhs: &[f64], rhs: &[f64]) -> f64 {
    let scale = lhs
        .iter()
        .chain(rhs)
        .fold(0.0f64, |m, t| m.max(t.abs()))
        .max(f64::MIN_POSITIVE);
    (lhs.iter().sum::<f64>() - rhs.iter().sum::<f64>()).abs() / scale
}

/// Relative residuals of the three algebraic identities behind the energy identity:
/// `α+ε+a² = θ²(2+λ₁νθτ)`, `b²−α = (θ−1)[(1+λ₁νθτ)(θ−1)+(θ+1)]`,
/// `2ab = 2θ[θ−(1−θ)(1+λ₁νθτ)]`.
///
/// Right sides are expanded into monomials and each residual is divided by the largest
/// term on either side. Dividing by the right side alone is ill-conditioned where it
/// vanishes, e.g. at `θ = 1` or on the curve `θ = (1−θ)(1+λ₁νθτ)`.
pub fn check_identities(tc: &ThetaConstants) -> [f64; 3] {
    let (t, x) = (tc.theta, tc.lambda1_nu_tau);
    let q = 1.0 + x * t;
    [
        rel(&[tc.alpha, tc.epsilon, tc.a * tc.a], &[2.0 * t * t, x * t * t * t]),
        rel(&[tc.b * tc.b, -tc.alpha], &[q * (t - 1.0) * (t - 1.0), (t - 1.0) * (t + 1.0)]),
        rel(&[2.0 * tc.a * tc.b], &[2.0 * t * t, -2.0 * t * (1.0 - t) * q]),
    ]
}

/// `(a+b)² + ε = 4θ² − 1 + (2θ−1)²(1+λ₁νθτ)`; zero exactly at `θ = 1/2`.
pub fn half_theta_obstruction(theta: f64, lambda1_nu_tau: f64) -> f64 {
    let d = 2.0 * theta - 1.0;
    d * (2.0 * theta + 1.0) + d * d * (1.0 + lambda1_nu_tau * theta)
}
