//! Certificates evaluated on a trajectory log.

mod checks;
mod tally;

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use checks::{
    check_energy0, check_energy1_identity, check_energy5, check_h_decay, check_l2h1_sums, check_solver,
    check_v_longtime, check_v_recursion,
};
pub use tally::{CheckRecord, Group, Status};

use crate::constants::{theta_constants, BoundLedger, LedgerInputs, ThetaConstants, Variant};
use crate::stepper::{LogHeader, TrajectoryLog};

pub const REPORT_SCHEMA: &str = "oneleg-certificate/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifyParams {
    /// Window length of the uniform bound; defaults to `4κ₁`.
    pub r: Option<f64>,
    /// Horizon of the finite-time bound; defaults to `T₀ + r`.
    pub horizon: Option<f64>,
    pub eps1: Option<f64>,
    pub delta1: Option<f64>,
    pub variant: Variant,
    pub tol: f64,
}

impl Default for CertifyParams {
    fn default() -> Self {
        Self {
            r: None,
            horizon: None,
            eps1: None,
            delta1: None,
            variant: Variant::DerivationConsistent,
            tol: 1e-10,
        }
    }
}

impl CertifyParams {
    pub fn ledger_inputs(&self, h: &LogHeader) -> LedgerInputs {
        let kappa1 = 1.0 / (h.lambda1 * h.nu);
        LedgerInputs {
            nu: h.nu,
            lambda1: h.lambda1,
            theta: h.theta,
            tau: h.tau,
            u0_l2: h.u0_l2,
            u0_h1: h.u0_h1,
            f_sup: h.f_sup,
            horizon: self.horizon.unwrap_or(0.0),
            r: self.r.unwrap_or(4.0 * kappa1),
            eps1: self.eps1,
            delta1: self.delta1,
        }
    }
}

/// Everything a check needs, computed once per report.
pub struct Context<'a> {
    pub log: &'a TrajectoryLog,
    pub params: &'a CertifyParams,
    pub ledger: Option<BoundLedger>,
    pub ledger_error: Option<String>,
    pub theta_constants: Option<ThetaConstants>,
    /// `‖uⁿ‖`, `n = 0..=N`.
    pub l2: Vec<f64>,
    /// `‖∇uⁿ‖`, `n = 0..=N`.
    pub h1: Vec<f64>,
    pub theta_open: bool,
    pub theta_at_least_half: bool,
    pub step_ok: bool,
}

impl<'a> Context<'a> {
    pub fn new(log: &'a TrajectoryLog, params: &'a CertifyParams) -> Self {
        let h = &log.header;
        let (ledger, ledger_error) = match BoundLedger::new(params.ledger_inputs(h)) {
            Ok(l) => (Some(l), None),
            Err(e) => (None, Some(e.to_string())),
        };
        Self {
            log,
            params,
            ledger,
            ledger_error,
            theta_constants: theta_constants(h.theta, h.lambda1, h.nu, h.tau).ok(),
            l2: log.l2_series(),
            h1: log.h1_series(),
            theta_open: h.theta > 0.5 && h.theta < 1.0,
            theta_at_least_half: h.theta >= 0.5,
            step_ok: h.tau * h.lambda1 * h.nu <= 1.0,
        }
    }

    pub(crate) fn ledger_note(&self) -> Option<String> {
        self.ledger_error.as_ref().map(|e| format!("ledger unavailable: {e}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Every conclusion whose hypothesis held was verified.
    Certified,
    /// Some hypothesis failed; met conclusions all held.
    Partial,
    Violated,
    NotApplicable,
}

fn verdict<'r>(checks: impl Iterator<Item = &'r CheckRecord>) -> Verdict {
    let (mut any_fail, mut any_unmet, mut any_pass) = (false, false, false);
    for c in checks.filter(|c| !c.shadow) {
        match c.status {
            Status::Fail => any_fail = true,
            Status::HypothesisUnmet => any_unmet = true,
            Status::Pass => any_pass = true,
            Status::NotApplicable => {}
        }
    }
    match (any_fail, any_unmet, any_pass) {
        (true, _, _) => Verdict::Violated,
        (false, true, _) => Verdict::Partial,
        (false, false, true) => Verdict::Certified,
        _ => Verdict::NotApplicable,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdicts {
    pub h_stability: Verdict,
    pub v_stability: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub schema: String,
    pub crate_version: String,
    pub run: LogHeader,
    pub params: CertifyParams,
    pub steps: usize,
    pub notes: Vec<String>,
    pub ledger: Option<BoundLedger>,
    pub ledger_error: Option<String>,
    pub checks: Vec<CheckRecord>,
    pub verdicts: Verdicts,
}

impl CertificateReport {
    /// True when some check failed although its hypothesis held.
    pub fn has_violation(&self) -> bool {
        self.checks.iter().any(|c| c.counts_as_failure())
    }

    pub fn check(&self, id: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let h = &self.run;
        let _ = writeln!(
            s,
            "certificate: nu={} theta={} tau={} steps={} n={} variant={}",
            h.nu,
            h.theta,
            h.tau,
            self.steps,
            h.resolution,
            self.params.variant.label()
        );
        let _ = writeln!(s, "{:<36} {:<17} {:>14} {:>10}", "check", "status", "min margin", "worst n");
        for c in &self.checks {
            let st = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::HypothesisUnmet => "hypothesis unmet",
                Status::NotApplicable => "n/a",
            };
            let m = c.min_margin.map_or("-".into(), |m| format!("{m:.3e}"));
            let w = c.worst_step.map_or("-".into(), |w| w.to_string());
            let tag = if c.shadow { " (shadow)" } else { "" };
            let _ = writeln!(s, "{:<36} {:<17} {:>14} {:>10}{}", c.id, st, m, w, tag);
        }
        let _ = writeln!(
            s,
            "H-stability: {:?}  V-stability: {:?}",
            self.verdicts.h_stability, self.verdicts.v_stability
        );
        s
    }
}

fn notes() -> Vec<String> {
    vec![
        "setting: periodic torus with mean-zero fields instead of a bounded no-slip domain".into(),
        "index convention: the step floor(T/tau) belongs to the finite-time range and the step N0+Nr to the long-time range; both ends inclusive".into(),
        "margins are (rhs - lhs)/scale with scale the largest term magnitude; identities report -|residual|/scale".into(),
        "long-time checks use K1 -> 4*rho0 after T0; very large constants are compared in log space".into(),
    ]
}

type CheckFn = fn(&Context) -> Vec<CheckRecord>;

/// Runs every check. Checks execute in parallel; their order in the report is fixed.
pub fn full_report(log: &TrajectoryLog, params: &CertifyParams) -> CertificateReport {
    let cx = Context::new(log, params);
    let fns: [CheckFn; 8] = [
        check_solver,
        check_energy0,
        check_energy1_identity,
        check_energy5,
        check_h_decay,
        check_l2h1_sums,
        check_v_recursion,
        check_v_longtime,
    ];
    let checks: Vec<CheckRecord> = fns.par_iter().map(|f| f(&cx)).collect::<Vec<_>>().into_iter().flatten().collect();
    let verdicts = Verdicts {
        h_stability: verdict(checks.iter().filter(|c| c.group == Group::H)),
        v_stability: verdict(checks.iter().filter(|c| c.group == Group::V)),
    };
    CertificateReport {
        schema: REPORT_SCHEMA.into(),
        crate_version: env!("CARGO_PKG_VERSION").into(),
        run: log.header.clone(),
        params: params.clone(),
        steps: log.records.len(),
        notes: notes(),
        ledger: cx.ledger.clone(),
        ledger_error: cx.ledger_error.clone(),
        checks,
        verdicts,
    }
}
