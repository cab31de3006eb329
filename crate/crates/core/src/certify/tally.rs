use serde::{Deserialize, Serialize};

use crate::constants::Variant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    HypothesisUnmet,
    NotApplicable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Solver,
    H,
    V,
}

/// Outcome of one inequality or identity over a trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    pub anchor: String,
    pub group: Group,
    pub status: Status,
    pub hypothesis: String,
    pub hypothesis_met: bool,
    /// Smallest normalized margin `(rhs − lhs)/scale`; identities report `−|residual|/scale`.
    pub min_margin: Option<f64>,
    pub worst_step: Option<usize>,
    pub first_violation: Option<usize>,
    /// Scale used at the worst step.
    pub scale: f64,
    pub tolerance: f64,
    pub evaluated: usize,
    pub violations: usize,
    pub variant: Option<Variant>,
    /// Shadow evaluations are reported but never fail the run.
    pub shadow: bool,
    pub note: Option<String>,
}

impl CheckRecord {
    pub fn counts_as_failure(&self) -> bool {
        self.status == Status::Fail && !self.shadow
    }
}

/// Running minimum of normalized margins.
#[derive(Clone, Debug)]
pub(crate) struct Tally {
    pub tol: f64,
    pub min: f64,
    pub worst: Option<usize>,
    pub scale: f64,
    pub first_violation: Option<usize>,
    pub evaluated: usize,
    pub violations: usize,
}

fn magnitude(terms: &[f64]) -> f64 {
    terms.iter().fold(0.0f64, |m, t| m.max(t.abs()))
}

impl Tally {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            min: f64::INFINITY,
            worst: None,
            scale: 0.0,
            first_violation: None,
            evaluated: 0,
            violations: 0,
        }
    }

    /// Records an already normalized margin.
    pub fn margin(&mut self, step: usize, m: f64, scale: f64) {
        self.evaluated += 1;
        // NaN margins are violations: they mean a logged quantity was unusable.
        let bad = !(m >= -self.tol);
        if bad {
            self.violations += 1;
            self.first_violation.get_or_insert(step);
        }
        if m < self.min || (m.is_nan() && !self.min.is_nan()) || self.worst.is_none() {
            self.min = m;
            self.worst = Some(step);
            self.scale = scale;
        }
    }

    /// `Σ lhs ≤ Σ rhs`, normalized by the largest term magnitude.
    pub fn le(&mut self, step: usize, lhs: &[f64], rhs: &[f64]) {
        let scale = magnitude(lhs).max(magnitude(rhs));
        let (l, r) = (lhs.iter().sum::<f64>(), rhs.iter().sum::<f64>());
        let m = if scale == 0.0 {
            0.0
        } else if r == f64::INFINITY && l.is_finite() {
            1.0
        } else {
            (r - l) / scale
        };
        self.margin(step, m, scale);
    }

    /// `Σ lhs = Σ rhs`.
    pub fn eq(&mut self, step: usize, lhs: &[f64], rhs: &[f64]) {
        let scale = magnitude(lhs).max(magnitude(rhs));
        let gap = (rhs.iter().sum::<f64>() - lhs.iter().sum::<f64>()).abs();
        let m = if scale == 0.0 { 0.0 } else { -gap / scale };
        self.margin(step, m, scale);
    }

    /// `x ≤ e^{ln_bound}` for `x ≥ 0`, evaluated without forming the bound.
    pub fn le_log(&mut self, step: usize, x: f64, ln_bound: f64) {
        if ln_bound.is_nan() {
            self.margin(step, f64::NAN, f64::NAN);
            return;
        }
        if x <= 0.0 {
            let m = if ln_bound == f64::NEG_INFINITY { 0.0 } else { 1.0 };
            self.margin(step, m, ln_bound.exp());
            return;
        }
        let d = x.ln() - ln_bound;
        // (B − x)/max(B, x) written in terms of d = ln x − ln B.
        let m = if d <= 0.0 { 1.0 - d.exp() } else { (-d).exp() - 1.0 };
        let scale = if d <= 0.0 { ln_bound.exp() } else { x };
        self.margin(step, m, scale);
    }

    /// Strict positivity `v > 0`, no tolerance.
    pub fn positive(&mut self, step: usize, v: f64) {
        let saved = self.tol;
        self.tol = 0.0;
        let m = if v > 0.0 { v } else if v == 0.0 { -f64::MIN_POSITIVE } else { v };
        self.margin(step, m, 1.0);
        self.tol = saved;
    }
}

pub(crate) struct Spec<'a> {
    pub id: &'a str,
    pub anchor: &'a str,
    pub group: Group,
    pub hypothesis: &'a str,
}

pub(crate) fn finish(spec: Spec, t: Tally, met: bool, variant: Option<Variant>, shadow: bool, note: Option<String>) -> CheckRecord {
    let status = if t.evaluated == 0 {
        Status::NotApplicable
    } else if !met {
        Status::HypothesisUnmet
    } else if t.violations > 0 {
        Status::Fail
    } else {
        Status::Pass
    };
    let has = t.evaluated > 0;
    CheckRecord {
        id: spec.id.into(),
        anchor: spec.anchor.into(),
        group: spec.group,
        status,
        hypothesis: spec.hypothesis.into(),
        hypothesis_met: met,
        min_margin: has.then_some(t.min),
        worst_step: t.worst,
        first_violation: t.first_violation,
        scale: t.scale,
        tolerance: t.tol,
        evaluated: t.evaluated,
        violations: t.violations,
        variant,
        shadow,
        note,
    }
}
