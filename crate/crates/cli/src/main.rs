//! `oneleg`: run, certify, tabulate constants, sweep and measure convergence order.

mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use oneleg::constants::{half_theta_obstruction, theta_constants};
use oneleg::spectral::snapshot;
use oneleg::{full_report, BoundLedger, Error, LedgerInputs, RunConfig, TrajectoryLog, Variant};
use rayon::prelude::*;
use serde::Serialize;

use config::ExperimentConfig;

#[derive(Parser)]
#[command(name = "oneleg", version, about = "One-leg theta-method for 2D periodic Navier-Stokes with stability certificates")]
struct Cli {
    /// TOML experiment file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides [output] dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed of the random initial field (overrides [initial] seed and ONELEG_SEED).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweeps and certificate checks.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Constants variant used for long-time conclusions.
    #[arg(long, global = true, value_enum)]
    variant: Option<VariantArg>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Paper,
    Derived,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate and write the trajectory log.
    Run,
    /// Evaluate every certificate on a trajectory log.
    Certify {
        /// Trajectory CSV; defaults to <out>/trajectory.csv.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Evaluate the constants ledger for the configured data.
    Constants,
    /// Tabulate constants over the [sweep] grid.
    Sweep,
    /// Observed order in tau at a fixed final time against a fine reference.
    Convergence {
        #[arg(long, default_value_t = 1.0)]
        horizon: f64,
        #[arg(long, default_value_t = 4)]
        levels: usize,
        #[arg(long, default_value_t = 64)]
        ref_factor: usize,
    },
}

#[derive(Debug)]
pub enum Failure {
    Config(String),
    NonConvergence(String),
    Violation,
    Other(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::NonConvergence(_) => 3,
            Failure::Violation | Failure::Other(_) => 1,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NonConvergence { .. } => Failure::NonConvergence(e.to_string()),
            Error::Io(_) => Failure::Other(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

/// Writes next to the target and renames, so a failed run leaves no partial file.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

struct Env {
    cfg: ExperimentConfig,
    out: PathBuf,
}

fn prepare(cli: &Cli) -> Result<Env, Failure> {
    let mut cfg = ExperimentConfig::load(cli.config.as_deref())?;
    if let Some(s) = cli.seed {
        cfg.initial.seed = s;
    }
    if let Some(v) = cli.variant {
        cfg.certify.variant = match v {
            VariantArg::Paper => Variant::PaperLiteral,
            VariantArg::Derived => Variant::DerivationConsistent,
        };
    }
    if let Some(o) = &cli.out {
        cfg.output.dir = o.clone();
    }
    cfg.validate()?;
    let out = cfg.output.dir.clone();
    std::fs::create_dir_all(&out).map_err(|e| Failure::Config(format!("output directory {}: {e}", out.display())))?;
    Ok(Env { cfg, out })
}

fn cmd_run(env: &Env) -> Result<(), Failure> {
    let run_cfg = env.cfg.run_config()?;
    let mut log = oneleg::run(&run_cfg)?;
    log.header.extra = env.cfg.echo();
    write_atomic(&env.out.join("trajectory.csv"), log.to_csv_string().as_bytes())?;
    if let Some(u) = &log.final_state {
        write_atomic(&env.out.join("final_state.json"), snapshot::to_json(u).as_bytes())?;
    }
    for (n, u) in &log.snapshots {
        write_atomic(&env.out.join("snapshots").join(format!("step_{n:07}.json")), snapshot::to_json(u).as_bytes())?;
    }
    let last = log.records.last();
    println!(
        "run: {} steps, |u_N| = {:.6e}, |grad u_N| = {:.6e}, max picard iterations {}, newton steps {}",
        log.records.len(),
        last.map_or(log.header.u0_l2, |r| r.next_l2),
        last.map_or(log.header.u0_h1, |r| r.next_h1),
        log.records.iter().map(|r| r.picard_iters).max().unwrap_or(0),
        log.records.iter().filter(|r| r.newton_iters > 0).count()
    );
    Ok(())
}

fn cmd_certify(env: &Env, log_path: Option<&Path>) -> Result<(), Failure> {
    let path = log_path.map(Path::to_path_buf).unwrap_or_else(|| env.out.join("trajectory.csv"));
    let text = std::fs::read_to_string(&path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let log = TrajectoryLog::from_csv_str(&text)?;
    let report = full_report(&log, &env.cfg.certify_params());
    write_atomic(&env.out.join("certificate.json"), report.to_json().as_bytes())?;
    print!("{}", report.summary());
    if report.has_violation() {
        return Err(Failure::Violation);
    }
    Ok(())
}

fn ledger_inputs(cfg: &ExperimentConfig, theta: f64, tau: f64, nu: f64, f_scale: f64) -> Result<LedgerInputs, Failure> {
    let grid = cfg.grid()?;
    let u0 = cfg.initial_field(&grid);
    let f_sup = cfg.forcing.sup_norm(&grid)? * f_scale;
    let p = cfg.certify_params();
    let lambda1 = grid.lambda1();
    let mut inputs = LedgerInputs::new(nu, lambda1, theta, tau, u0.l2(), u0.h1(), f_sup, p.r.unwrap_or(4.0 / (lambda1 * nu)));
    inputs.horizon = p.horizon.unwrap_or(0.0);
    inputs.eps1 = p.eps1;
    inputs.delta1 = p.delta1;
    Ok(inputs)
}

#[derive(Serialize)]
struct LedgerFile<'a> {
    schema: &'static str,
    config: serde_json::Value,
    variant: Variant,
    theta_constants: Option<oneleg::ThetaConstants>,
    ledger: &'a BoundLedger,
}

fn cmd_constants(env: &Env) -> Result<(), Failure> {
    let c = &env.cfg;
    let inputs = ledger_inputs(c, c.run.theta, c.run.tau, c.run.nu, 1.0)?;
    let ledger = BoundLedger::new(inputs)?;
    let file = LedgerFile {
        schema: "oneleg-ledger/1",
        config: c.echo(),
        variant: c.certify.variant,
        theta_constants: theta_constants(inputs.theta, inputs.lambda1, inputs.nu, inputs.tau).ok(),
        ledger: &ledger,
    };
    let json = serde_json::to_string_pretty(&file).expect("ledger serializes");
    write_atomic(&env.out.join("ledger.json"), json.as_bytes())?;
    let mut s = String::new();
    for (name, v) in ledger.entries() {
        let _ = writeln!(s, "{name:<40} {v:.6e}");
    }
    let v = c.certify.variant;
    let _ = writeln!(s, "{:<40} {:.6e}", format!("ln_admissible_tau ({})", v.label()), ledger.ln_admissible_tau(v));
    print!("{s}");
    Ok(())
}

const SWEEP_COLUMNS: &[&str] = &[
    "theta",
    "tau",
    "nu",
    "forcing_scale",
    "lambda1_nu_tau",
    "status",
    "message",
    "obstruction",
    "alpha",
    "epsilon",
    "a",
    "b",
    "kappa1",
    "kappa2",
    "ln_kappa3",
    "ln_kappa4",
    "rho0",
    "t0",
    "ln_admissible_tau",
    "ln_admissible_tau_paper",
    "ln_admissible_tau_derived",
    "admissible",
];

fn sweep_row(cfg: &ExperimentConfig, theta: f64, tau: f64, nu: f64, scale: f64) -> Vec<String> {
    let num = |v: f64| format!("{v:e}");
    let lambda1 = cfg.grid().map(|g| g.lambda1()).unwrap_or(f64::NAN);
    let x = lambda1 * nu * tau;
    let mut row = vec![num(theta), num(tau), num(nu), num(scale), num(x)];
    let tc = theta_constants(theta, lambda1, nu, tau);
    let ledger = ledger_inputs(cfg, theta, tau, nu, scale).and_then(|i| BoundLedger::new(i).map_err(Failure::from));
    let status = match (&tc, &ledger) {
        (Ok(_), Ok(_)) => ("ok".to_string(), String::new()),
        (Err(e), _) => ("domain_error".into(), e.to_string()),
        (_, Err(Failure::Config(m))) => ("domain_error".into(), m.clone()),
        (_, Err(e)) => ("error".into(), format!("{e:?}")),
    };
    row.push(status.0);
    row.push(status.1.replace(',', ";"));
    row.push(num(half_theta_obstruction(theta, x)));
    match &tc {
        Ok(t) => row.extend([t.alpha, t.epsilon, t.a, t.b].map(num)),
        Err(_) => row.extend(std::iter::repeat(String::new()).take(4)),
    }
    match &ledger {
        Ok(l) => {
            let primary = l.ln_admissible_tau(cfg.certify.variant);
            row.extend([l.kappa1, l.kappa2, l.ln_kappa3, l.ln_kappa4, l.rho0, l.t0, primary].map(num));
            row.push(num(l.ln_admissible_tau(Variant::PaperLiteral)));
            row.push(num(l.ln_admissible_tau(Variant::DerivationConsistent)));
            row.push((tau.ln() <= primary).to_string());
        }
        Err(_) => row.extend(std::iter::repeat(String::new()).take(10)),
    }
    row
}

fn cmd_sweep(env: &Env) -> Result<(), Failure> {
    let c = &env.cfg;
    let s = c.sweep.as_ref().ok_or_else(|| Failure::Config("missing [sweep] section".into()))?;
    let nus = if s.nu.is_empty() { vec![c.run.nu] } else { s.nu.clone() };
    let scales = if s.forcing_scale.is_empty() { vec![1.0] } else { s.forcing_scale.clone() };
    let mut points = Vec::new();
    for &theta in &s.theta {
        for &tau in &s.tau {
            for &nu in &nus {
                for &scale in &scales {
                    points.push((theta, tau, nu, scale));
                }
            }
        }
    }
    let rows: Vec<Vec<String>> = points.par_iter().map(|&(t, tau, nu, sc)| sweep_row(c, t, tau, nu, sc)).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_COLUMNS).map_err(|e| Failure::Other(e.to_string()))?;
    for r in &rows {
        w.write_record(r).map_err(|e| Failure::Other(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Other(e.to_string()))?;
    write_atomic(&env.out.join("sweep.csv"), &bytes)?;
    let bad = rows.iter().filter(|r| r[5] != "ok").count();
    println!("sweep: {} points, {} marked as domain errors", rows.len(), bad);
    Ok(())
}

fn cmd_convergence(env: &Env, horizon: f64, levels: usize, ref_factor: usize) -> Result<(), Failure> {
    if levels < 2 || ref_factor < 2 || !(horizon > 0.0) {
        return Err(Failure::Config("need levels >= 2, ref_factor >= 2 and a positive horizon".into()));
    }
    let base = env.cfg.run_config()?;
    let coarse = ((horizon / base.tau).round() as usize).max(1);
    let final_state = |steps: usize| -> Result<oneleg::VelocityField, Failure> {
        let cfg = RunConfig {
            tau: horizon / steps as f64,
            steps,
            snapshot_stride: 0,
            ..base.clone()
        };
        Ok(oneleg::run(&cfg)?.final_state.expect("final state is kept"))
    };
    let finest = coarse << (levels - 1);
    let reference = final_state(finest * ref_factor)?;
    let mut rows = Vec::new();
    for l in 0..levels {
        let steps = coarse << l;
        let e = final_state(steps)?.lincomb(1.0, &reference, -1.0)?.l2();
        rows.push((horizon / steps as f64, steps, e));
    }
    let mut out = String::from("tau,steps,error_l2,order\n");
    for (i, (tau, steps, e)) in rows.iter().enumerate() {
        let order = if i == 0 { String::new() } else { format!("{:e}", (rows[i - 1].2 / e).ln() / 2f64.ln()) };
        let _ = writeln!(out, "{tau:e},{steps},{e:e},{order}");
    }
    write_atomic(&env.out.join("convergence.csv"), out.as_bytes())?;
    print!("{out}");
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(format!("threads: {e}")))?;
    }
    let env = prepare(cli)?;
    match &cli.command {
        Command::Run => cmd_run(&env),
        Command::Certify { log } => cmd_certify(&env, log.as_deref()),
        Command::Constants => cmd_constants(&env),
        Command::Sweep => cmd_sweep(&env),
        Command::Convergence {
            horizon,
            levels,
            ref_factor,
        } => cmd_convergence(&env, *horizon, *levels, *ref_factor),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Config(m) => eprintln!("error: {m}"),
                Failure::NonConvergence(m) => eprintln!("error: {m}"),
                Failure::Violation => eprintln!("certificate violated: a check failed although its hypothesis held"),
                Failure::Other(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
