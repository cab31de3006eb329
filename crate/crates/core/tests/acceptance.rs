//! Acceptance gate: one line per criterion, nonzero exit if any fails.

use std::time::Instant;

use oneleg::certify::{CheckRecord, Status, Verdict};
use oneleg::constants::{check_identities, half_theta_obstruction, theta_constants_scaled};
use oneleg::gronwall::{dgl_bound, verify_hypotheses, SequenceBundle};
use oneleg::spectral::{random_divfree_field, Spectrum};
use oneleg::{full_report, CertificateReport, CertifyParams, ForcingSpec, RunConfig, TorusGrid, TrajectoryLog, VelocityField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = (bool, String);

fn forcing(amp: f64) -> ForcingSpec {
    ForcingSpec::single([1, 2], [[amp, 0.0], [-amp / 2.0, 0.0]])
}

fn grid() -> TorusGrid {
    TorusGrid::standard(32).unwrap()
}

fn field(seed: u64, amplitude: f64, decay: f64) -> VelocityField {
    random_divfree_field(&grid(), seed, Spectrum { amplitude, decay })
}

struct Run {
    log: TrajectoryLog,
    report: CertificateReport,
}

fn certify(cfg: &RunConfig) -> Run {
    let log = oneleg::run(cfg).unwrap();
    let report = full_report(&log, &CertifyParams::default());
    Run { log, report }
}

/// The three forced runs shared by criteria 2, 3, 5 and 6.
fn benchmark(theta: f64, seed: u64) -> RunConfig {
    RunConfig::new(field(seed, 1.0, 1.5), 0.05, theta, 0.01, 1000).with_forcing(forcing(0.2))
}

/// Viscous enough that every step is admissible for the long-time theorem.
fn viscous(steps: usize) -> RunConfig {
    RunConfig::new(field(7, 0.3, 1.5), 10.0, 0.75, 0.01, steps).with_forcing(forcing(0.05))
}

fn check<'a>(r: &'a Run, id: &str) -> &'a CheckRecord {
    r.report.check(id).unwrap_or_else(|| panic!("missing check {id}"))
}

/// All listed checks passed on every run; reports the smallest margin seen.
fn all_pass(runs: &[&Run], ids: &[&str]) -> Outcome {
    let mut ok = true;
    let mut worst = f64::INFINITY;
    let mut bad = Vec::new();
    for r in runs {
        for id in ids {
            let c = check(r, id);
            if c.status != Status::Pass {
                ok = false;
                bad.push(format!("{id} at theta = {}: {:?}", r.log.header.theta, c.status));
            }
            worst = worst.min(c.min_margin.unwrap_or(f64::NAN));
        }
    }
    let msg = if bad.is_empty() { format!("min margin {worst:.3e}") } else { bad.join("; ") };
    (ok, msg)
}

fn c1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for _ in 0..10_000 {
        let theta = 0.5 + 0.5 * rng.gen::<f64>();
        let x = 1.0 - rng.gen::<f64>();
        if theta <= 0.5 {
            continue;
        }
        let tc = theta_constants_scaled(theta, x).unwrap();
        for r in check_identities(&tc) {
            worst = worst.max(r);
        }
        ok &= tc.alpha > 0.5 && tc.alpha <= 1.5 && tc.epsilon > 0.0;
    }
    let half = (0..=10).all(|i| {
        let x = i as f64 / 10.0;
        let tc = theta_constants_scaled(0.5, x).unwrap();
        (tc.a + tc.b).powi(2) + tc.epsilon == 0.0 && half_theta_obstruction(0.5, x) == 0.0
    });
    (ok && half && worst <= 1e-12, format!("max residual {worst:.2e}, obstruction zero at theta = 1/2: {half}"))
}

fn c2(runs: &[&Run]) -> Outcome {
    all_pass(runs, &["energy_identity_two_level", "dissipation_balance"])
}

fn c3(runs: &[&Run]) -> Outcome {
    all_pass(runs, &["energy_substep", "energy_per_step", "energy_gradient_step", "gradient_energy_step"])
}

fn c4() -> Outcome {
    let cfg = RunConfig::new(field(4, 3.0, 1.5), 0.5, 0.75, 0.01, 10_000).with_forcing(forcing(0.05));
    let r = certify(&cfg);
    let l = r.report.ledger.as_ref().unwrap();
    let (ok, msg) = all_pass(&[&r], &["h_envelope", "h_uniform", "h_absorbing"]);
    let absorbed = l.t0 > 0.0 && l.t0 < cfg.tau * cfg.steps as f64;
    (ok && absorbed && r.report.verdicts.h_stability == Verdict::Certified, format!("{msg}, T0 = {:.2}", l.t0))
}

fn c5(runs: &[&Run]) -> Outcome {
    let mut ids = vec!["mid_gradient_sum".to_string(), "gradient_sum".to_string()];
    for p in [1, 10, 100] {
        ids.push(format!("mid_gradient_window_p{p}"));
        ids.push(format!("gradient_window_p{p}"));
    }
    let ids: Vec<&str> = ids.iter().map(String::as_str).collect();
    all_pass(runs, &ids)
}

fn held(c: &CheckRecord) -> usize {
    c.note
        .as_deref()
        .and_then(|n| n.strip_prefix("hypothesis held at "))
        .and_then(|n| n.split_whitespace().next())
        .and_then(|n| n.parse().ok())
        .unwrap_or(0)
}

fn c6(runs: &[&Run]) -> Outcome {
    let mut steps = 0;
    let mut ok = true;
    for r in runs {
        for id in ["discriminant_positive", "one_step_gradient_growth"] {
            let c = check(r, id);
            ok &= matches!(c.status, Status::Pass | Status::HypothesisUnmet) && c.violations == 0;
        }
        steps += held(check(r, "one_step_gradient_growth"));
    }
    (ok && steps > 0, format!("hypothesis held at {steps} steps, no violations: {ok}"))
}

fn c7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut bad = 0;
    let mut checked = 0;
    for _ in 0..1000 {
        let len = rng.gen_range(3..=51);
        let mut seq = || (0..len).map(|_| 5.0 * rng.gen::<f64>()).collect::<Vec<_>>();
        let (a, e, z) = (seq(), seq(), seq());
        let tau = 0.01 + rng.gen::<f64>();
        let b = SequenceBundle::saturated(tau, 10.0 * rng.gen::<f64>(), a, e, z).unwrap();
        for n in 2..len {
            checked += 1;
            if dgl_bound(&b, n).unwrap() < b.xi[n] * (1.0 - 1e-12) {
                bad += 1;
            }
        }
        let n_star = len - 1;
        let n2 = rng.gen_range(1..n_star);
        if n2 + 1 < n_star {
            let n1 = rng.gen_range(0..n_star - n2);
            let w = verify_hypotheses(&b, n1, n2, n_star).unwrap();
            let bound = w.bound(tau, n2).unwrap();
            for n in n1 + n2 + 1..=n_star {
                checked += 1;
                if bound < b.xi[n] * (1.0 - 1e-12) {
                    bad += 1;
                }
            }
        }
    }
    (bad == 0, format!("{checked} comparisons, {bad} counterexamples"))
}

fn c8() -> Outcome {
    let (nu, theta, tau) = (0.1, 0.75, 0.01);
    let cfg = RunConfig::new(VelocityField::taylor_green(&grid(), 1.0), nu, theta, tau, 1000);
    let log = oneleg::run(&cfg).unwrap();
    // Taylor–Green lives on |k|² = 2.
    let g = (1.0 - 2.0 * nu * tau * (1.0 - theta)) / (1.0 + 2.0 * nu * tau * theta);
    let worst = log
        .records
        .iter()
        .map(|r| (r.next_l2 / r.u_l2 / g - 1.0).abs())
        .fold(0.0f64, f64::max);
    (worst <= 1e-12, format!("max relative deviation of the per-step factor {worst:.2e}"))
}

fn slope(theta: f64) -> f64 {
    let u0 = field(11, 1.0, 2.0);
    let final_state = |steps: usize| {
        let cfg = RunConfig::new(u0.clone(), 0.05, theta, 1.0 / steps as f64, steps).with_forcing(forcing(0.2));
        oneleg::run(&cfg).unwrap().final_state.unwrap()
    };
    let coarse = [10usize, 20, 40, 80];
    let reference = final_state(80 * 64);
    let pts: Vec<(f64, f64)> = coarse
        .iter()
        .map(|&s| {
            let e = final_state(s).lincomb(1.0, &reference, -1.0).unwrap().l2();
            ((1.0 / s as f64).ln(), e.ln())
        })
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn c9() -> Outcome {
    let (s1, s2) = (slope(0.75), slope(0.5));
    ((s1 - 1.0).abs() <= 0.1 && (s2 - 2.0).abs() <= 0.1, format!("slope {s1:.3} at theta = 0.75, {s2:.3} at theta = 0.5"))
}

fn c10() -> Outcome {
    let fine = certify(&viscous(100_000));
    let sup = |r: &Run| r.log.h1_series().iter().map(|x| x * x).fold(0.0f64, f64::max);
    let k7 = fine.report.check("sup_k7.derivation_consistent").unwrap();
    let l = fine.report.ledger.as_ref().unwrap();
    let ln_k7 = l.derived.ln_k7;
    let admissible = fine.log.header.tau.ln() <= l.derived.ln_admissible_tau;
    let first = admissible && k7.status == Status::Pass && sup(&fine).ln() <= ln_k7 && fine.report.verdicts.v_stability == Verdict::Certified;

    let cfg = RunConfig::new(field(3, 1.0, 1.5), 0.1, 0.75, 0.01, 100_000).with_forcing(forcing(0.5));
    let practical = certify(&cfg);
    let gated = ["window_recursion", "window_constants.derivation_consistent", "sup_k7.derivation_consistent", "sup_k6.derivation_consistent"]
        .iter()
        .all(|id| check(&practical, id).status == Status::HypothesisUnmet);
    let h1 = practical.log.h1_series();
    let half = h1.len() / 2;
    let early = h1[..half].iter().map(|x| x * x).fold(0.0f64, f64::max);
    let late = h1[half..].iter().map(|x| x * x).fold(0.0f64, f64::max);
    let bounded = h1.iter().all(|x| x.is_finite()) && late <= early;
    (
        first && gated && bounded && !practical.report.has_violation(),
        format!(
            "admissible run: sup |grad u|^2 = {:.4} <= K7 = {:.4}; practical run gated: {gated}, sup first half {early:.4}, second half {late:.4}",
            sup(&fine),
            ln_k7.exp()
        ),
    )
}

fn c11() -> Outcome {
    let a = certify(&benchmark(0.75, 2));
    let b = certify(&benchmark(0.75, 2));
    let same_csv = a.log.to_csv_string() == b.log.to_csv_string();
    let same_json = a.report.to_json() == b.report.to_json();
    (same_csv && same_json, format!("csv identical: {same_csv}, report identical: {same_json}"))
}

fn main() {
    let start = Instant::now();
    let runs: Vec<Run> = [(0.6, 1), (0.75, 2), (0.9, 3)].iter().map(|&(t, s)| certify(&benchmark(t, s))).collect();
    let viscous_short = certify(&viscous(2000));
    let bench: Vec<&Run> = runs.iter().collect();
    let mut with_viscous = bench.clone();
    with_viscous.push(&viscous_short);

    let criteria: Vec<(usize, Box<dyn Fn() -> Outcome + '_>)> = vec![
        (1, Box::new(c1)),
        (2, Box::new(|| c2(&bench))),
        (3, Box::new(|| c3(&bench))),
        (4, Box::new(c4)),
        (5, Box::new(|| c5(&with_viscous))),
        (6, Box::new(|| c6(&with_viscous))),
        (7, Box::new(c7)),
        (8, Box::new(c8)),
        (9, Box::new(c9)),
        (10, Box::new(c10)),
        (11, Box::new(c11)),
    ];
    let mut failed = Vec::new();
    for (n, f) in &criteria {
        let t = Instant::now();
        let (ok, msg) = f();
        println!("criterion {n}: {} ({msg}) [{:.1}s]", if ok { "pass" } else { "fail" }, t.elapsed().as_secs_f64());
        if !ok {
            failed.push(*n);
        }
    }
    println!("acceptance: {} of {} criteria pass in {:.1}s", criteria.len() - failed.len(), criteria.len(), start.elapsed().as_secs_f64());
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
