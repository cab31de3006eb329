//! Trajectory log and its CSV form.
//!
//! The file starts with one line `# <header json>`, followed by a CSV table
//! whose columns are the fields of [`StepRecord`] in declaration order.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{RunConfig, SolverEcho};
use crate::error::{Error, Result};
use crate::spectral::{ForcingSpec, VelocityField};

pub const LOG_SCHEMA: &str = "oneleg-trajectory/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogHeader {
    pub schema: String,
    pub nu: f64,
    pub theta: f64,
    pub tau: f64,
    pub steps: usize,
    pub resolution: usize,
    pub domain_length: f64,
    pub lambda1: f64,
    /// `sup_t ‖f(t)‖`.
    pub f_sup: f64,
    pub u0_l2: f64,
    pub u0_h1: f64,
    pub solver: SolverEcho,
    pub forcing: ForcingSpec,
    /// Free-form provenance supplied by the caller (the CLI stores its config here).
    #[serde(default)]
    pub extra: serde_json::Value,
}

impl LogHeader {
    pub(crate) fn new(cfg: &RunConfig, f_sup: f64) -> Self {
        Self {
            schema: LOG_SCHEMA.into(),
            nu: cfg.nu,
            theta: cfg.theta,
            tau: cfg.tau,
            steps: cfg.steps,
            resolution: cfg.grid.n(),
            domain_length: cfg.grid.domain_length(),
            lambda1: cfg.grid.lambda1(),
            f_sup,
            u0_l2: cfg.u0.l2(),
            u0_h1: cfg.u0.h1(),
            solver: SolverEcho {
                picard_tol: cfg.picard_tol,
                picard_max_iter: cfg.picard_max_iter,
                newton_enabled: cfg.newton_enabled,
            },
            forcing: cfg.forcing.clone(),
            extra: serde_json::Value::Null,
        }
    }
}

/// Everything logged for the step `uⁿ → u^{n+1}`. Norms are L² unless noted;
/// `w` below stands for `u^{n+θ}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub n: usize,
    pub t_mid: f64,
    pub u_l2: f64,
    pub u_h1: f64,
    pub mid_l2: f64,
    pub mid_h1: f64,
    /// `‖Δw‖`.
    pub mid_lap: f64,
    pub next_l2: f64,
    pub next_h1: f64,
    /// `‖w − uⁿ‖`.
    pub mid_minus_n_l2: f64,
    /// `‖u^{n+1} − uⁿ‖`.
    pub jump_l2: f64,
    /// `‖∇(u^{n+1} − uⁿ)‖`.
    pub jump_h1: f64,
    pub f_mid_l2: f64,
    /// `(u^{n+1}, uⁿ)`.
    pub inner_next_n: f64,
    /// `‖a u^{n+1} − b uⁿ‖`; NaN when the constants are undefined.
    pub combo_ab_l2: f64,
    /// `b(w, w, u^{n+1})`.
    pub b_mid_mid_next: f64,
    /// `b(w, uⁿ, u^{n+1})`.
    pub b_mid_n_next: f64,
    /// `(f^{n+θ}, u^{n+1})`.
    pub f_next_inner: f64,
    /// `(f^{n+θ}, w)`.
    pub f_mid_inner: f64,
    /// `(∇w, ∇u^{n+1})`.
    pub grad_mid_next_inner: f64,
    pub picard_iters: usize,
    pub newton_iters: usize,
    /// Relative defect of the substep solve.
    pub solver_residual: f64,
    /// Relative defect of the one-leg equation with `w` rebuilt from the endpoints.
    pub one_leg_residual: f64,
    /// `‖θu^{n+1} + (1−θ)uⁿ − w‖ / ‖w‖`.
    pub recon_error: f64,
    /// `‖∇·u^{n+1}‖ / ‖∇u^{n+1}‖`.
    pub div_error: f64,
}

#[derive(Clone, Debug)]
pub struct TrajectoryLog {
    pub header: LogHeader,
    pub records: Vec<StepRecord>,
    /// `(n, uⁿ)` at the configured stride; not part of the CSV.
    pub snapshots: Vec<(usize, VelocityField)>,
    pub final_state: Option<VelocityField>,
}

impl TrajectoryLog {
    /// `‖uⁿ‖` for `n = 0..=steps`.
    pub fn l2_series(&self) -> Vec<f64> {
        let mut v = vec![self.header.u0_l2];
        v.extend(self.records.iter().map(|r| r.next_l2));
        v
    }

    /// `‖∇uⁿ‖` for `n = 0..=steps`.
    pub fn h1_series(&self) -> Vec<f64> {
        let mut v = vec![self.header.u0_h1];
        v.extend(self.records.iter().map(|r| r.next_h1));
        v
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let head = serde_json::to_string(&self.header)
            .map_err(|e| Error::Schema(format!("header: {e}")))?;
        writeln!(w, "# {head}")?;
        let mut out = csv::Writer::from_writer(w);
        if self.records.is_empty() {
            out.write_record(column_names())
                .map_err(|e| Error::Schema(e.to_string()))?;
        }
        for r in &self.records {
            out.serialize(r).map_err(|e| Error::Schema(e.to_string()))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("utf8")
    }

    pub fn from_csv_str(s: &str) -> Result<Self> {
        let (first, rest) = s
            .split_once('\n')
            .ok_or_else(|| Error::Schema("missing header line".into()))?;
        let json = first
            .strip_prefix("# ")
            .ok_or_else(|| Error::Schema("first line must be '# <header json>'".into()))?;
        let header: LogHeader =
            serde_json::from_str(json).map_err(|e| Error::Schema(format!("header: {e}")))?;
        if header.schema != LOG_SCHEMA {
            return Err(Error::Schema(format!("unknown schema {}", header.schema)));
        }
        let mut rdr = csv::Reader::from_reader(rest.as_bytes());
        let cols = rdr.headers().map_err(|e| Error::Schema(e.to_string()))?.clone();
        if cols.iter().ne(column_names().iter().copied()) {
            return Err(Error::Schema("column layout does not match".into()));
        }
        let mut records = Vec::new();
        for row in rdr.deserialize() {
            let r: StepRecord = row.map_err(|e| Error::Schema(format!("row: {e}")))?;
            if r.n != records.len() {
                return Err(Error::Schema(format!("step {} out of sequence", r.n)));
            }
            records.push(r);
        }
        if records.len() != header.steps {
            return Err(Error::Schema(format!(
                "expected {} rows, found {}",
                header.steps,
                records.len()
            )));
        }
        Ok(Self {
            header,
            records,
            snapshots: Vec::new(),
            final_state: None,
        })
    }
}

pub fn column_names() -> Vec<&'static str> {
    vec![
        "n",
        "t_mid",
        "u_l2",
        "u_h1",
        "mid_l2",
        "mid_h1",
        "mid_lap",
        "next_l2",
        "next_h1",
        "mid_minus_n_l2",
        "jump_l2",
        "jump_h1",
        "f_mid_l2",
        "inner_next_n",
        "combo_ab_l2",
        "b_mid_mid_next",
        "b_mid_n_next",
        "f_next_inner",
        "f_mid_inner",
        "grad_mid_next_inner",
        "picard_iters",
        "newton_iters",
        "solver_residual",
        "one_leg_residual",
        "recon_error",
        "div_error",
    ]
}
