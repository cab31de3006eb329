//! Individual certificates. Every check reads logged norms only.

use super::tally::{finish, CheckRecord, Group, Spec, Status, Tally};
use super::Context;
use crate::constants::Variant;
use crate::gronwall::{verify_hypotheses, SequenceBundle};

const WINDOWS: [usize; 3] = [1, 10, 100];

/// Compensated prefix sums `P[k] = Σ_{i<k} x_i`.
fn prefix(xs: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out = vec![0.0];
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
        out.push(s + c);
    }
    out
}

fn sq(x: f64) -> f64 {
    x * x
}

pub fn check_solver(cx: &Context) -> Vec<CheckRecord> {
    let h = &cx.log.header;
    let th = h.theta;
    let tol = cx.params.tol;
    let mut solver = Tally::new(tol);
    let mut one_leg = Tally::new(tol);
    let mut recon = Tally::new(tol);
    let mut div = Tally::new(tol);
    let mut skew = Tally::new(tol);
    let mut balance = Tally::new(tol);
    let ptol = h.solver.picard_tol;
    for r in &cx.log.records {
        solver.le(r.n, &[r.solver_residual], &[ptol]);
        one_leg.le(r.n, &[r.one_leg_residual], &[2.0 * ptol]);
        recon.le(r.n, &[r.recon_error], &[1e-13]);
        div.le(r.n, &[r.div_error], &[1e-13]);
        let s = (r.mid_l2 * r.mid_h1).sqrt() * r.u_h1 * (r.next_l2 * r.next_h1).sqrt();
        let gap = (r.b_mid_mid_next - (1.0 - th) * r.b_mid_n_next).abs();
        skew.margin(r.n, if s == 0.0 { 0.0 } else { -gap / s }, s);
        balance.eq(
            r.n,
            &[
                sq(r.next_l2),
                -sq(r.u_l2),
                (2.0 * th - 1.0) * sq(r.jump_l2),
                2.0 * h.nu * h.tau * sq(r.mid_h1),
            ],
            &[2.0 * h.tau * r.f_mid_inner],
        );
    }
    let g = Group::Solver;
    let always = "accepted step";
    vec![
        finish(
            Spec { id: "solver_tolerance", anchor: "implicit substep solved to the configured relative tolerance", group: g, hypothesis: always },
            solver, true, None, false, None,
        ),
        finish(
            Spec { id: "one_leg_consistency", anchor: "one-leg form reproduced from the endpoints within twice the solver tolerance", group: g, hypothesis: always },
            one_leg, true, None, false, None,
        ),
        finish(
            Spec { id: "reconstruction", anchor: "blended state equals theta*u(n+1) + (1-theta)*u(n)", group: g, hypothesis: always },
            recon, true, None, false, None,
        ),
        finish(
            Spec { id: "divergence_free", anchor: "new state divergence free", group: g, hypothesis: always },
            div, true, None, false, None,
        ),
        finish(
            Spec { id: "skew_identity", anchor: "b(w,w,u(n+1)) = (1-theta) b(w,u(n),u(n+1)) by skew-symmetry", group: g, hypothesis: always },
            skew, true, None, false, Some("scale is the Ladyzhenskaya-type product of the three fields".into()),
        ),
        finish(
            Spec { id: "dissipation_balance", anchor: "one-leg step tested with the blended state: exact energy balance", group: g, hypothesis: always },
            balance, true, None, false, None,
        ),
    ]
}

pub fn check_energy0(cx: &Context) -> Vec<CheckRecord> {
    let h = &cx.log.header;
    let x = h.lambda1 * h.nu * h.tau;
    let rhs = h.theta * h.tau / (h.nu * h.lambda1) * sq(h.f_sup);
    let mut t = Tally::new(cx.params.tol);
    for r in &cx.log.records {
        t.le(r.n, &[(1.0 + x * h.theta) * sq(r.mid_l2), -sq(r.u_l2), sq(r.mid_minus_n_l2)], &[rhs]);
    }
    vec![finish(
        Spec {
            id: "energy_substep",
            anchor: "energy estimate of the backward-Euler substep (kinematic plus numerical dissipation)",
            group: Group::H,
            hypothesis: "none beyond theta in [0,1]",
        },
        t,
        true,
        None,
        false,
        None,
    )]
}

pub fn check_energy1_identity(cx: &Context) -> Vec<CheckRecord> {
    let h = &cx.log.header;
    let spec = Spec {
        id: "energy_identity_two_level",
        anchor: "substep energy rewritten through u(n+1), u(n) with alpha, epsilon, a, b",
        group: Group::H,
        hypothesis: "theta in [1/2,1], lambda1*nu*tau <= 1",
    };
    let mut t = Tally::new(cx.params.tol);
    let Some(tc) = cx.theta_constants else {
        return vec![finish(spec, t, false, None, false, Some("constants undefined for this (theta, tau)".into()))];
    };
    let x = h.lambda1 * h.nu * h.tau;
    for r in &cx.log.records {
        t.eq(
            r.n,
            &[(1.0 + x * h.theta) * sq(r.mid_l2), -sq(r.u_l2), sq(r.mid_minus_n_l2)],
            &[(tc.alpha + tc.epsilon) * sq(r.next_l2), -tc.alpha * sq(r.u_l2), sq(r.combo_ab_l2)],
        );
    }
    vec![finish(spec, t, true, None, false, None)]
}

pub fn check_energy5(cx: &Context) -> Vec<CheckRecord> {
    let h = &cx.log.header;
    let d = 2.0 * h.theta - 1.0;
    let c = h.tau / (h.nu * h.lambda1);
    let mut t = Tally::new(cx.params.tol);
    let mut sup = Tally::new(cx.params.tol);
    for r in &cx.log.records {
        let lhs = [sq(r.next_l2), -sq(r.u_l2), d * sq(r.jump_l2), h.nu * h.tau * sq(r.mid_h1)];
        t.le(r.n, &lhs, &[c * sq(r.f_mid_l2)]);
        sup.le(r.n, &lhs, &[c * sq(h.f_sup)]);
    }
    let met = cx.theta_at_least_half && cx.step_ok;
    let hyp = "theta >= 1/2, tau <= kappa1";
    vec![
        finish(
            Spec { id: "energy_per_step", anchor: "per-step energy inequality for integer levels with the current forcing", group: Group::H, hypothesis: hyp },
            t, met, None, false, None,
        ),
        finish(
            Spec { id: "energy_per_step_sup", anchor: "per-step energy inequality for integer levels with the sup-in-time forcing", group: Group::H, hypothesis: hyp },
            sup, met, None, false, None,
        ),
    ]
}

pub fn check_h_decay(cx: &Context) -> Vec<CheckRecord> {
    let h = &cx.log.header;
    let hyp = "theta in (1/2,1), tau <= kappa1";
    let specs = [
        Spec { id: "h_envelope", anchor: "H bound: exponential decay plus forcing level", group: Group::H, hypothesis: hyp },
        Spec { id: "h_uniform", anchor: "uniform H bound by K1", group: Group::H, hypothesis: hyp },
        Spec { id: "h_absorbing", anchor: "absorbing ball 4*rho0 once n*tau >= T0", group: Group::H, hypothesis: "theta in (1/2,1), tau <= kappa1, n*tau >= T0" },
    ];
    let tol = cx.params.tol;
    let Some(l) = &cx.ledger else {
        return specs.into_iter().map(|s| finish(s, Tally::new(tol), false, None, false, cx.ledger_note())).collect();
    };
    let d = 2.0 * h.theta - 1.0;
    let rate = h.lambda1 * h.nu * d / 15.0;
    let u0 = sq(h.u0_l2);
    let (mut env, mut uni, mut abs) = (Tally::new(tol), Tally::new(tol), Tally::new(tol));
    for (n, u) in cx.l2.iter().enumerate() {
        let t = n as f64 * h.tau;
        let u2 = sq(*u);
        env.le(n, &[u2], &[(-rate * t).exp() * u0, 3.0 * l.rho0]);
        uni.le(n, &[u2], &[l.main.k1]);
        if t >= l.t0 {
            abs.le(n, &[u2], &[4.0 * l.rho0]);
        }
    }
    let met = cx.theta_open && cx.step_ok;
    let [s0, s1, s2] = specs;
    vec![
        finish(s0, env, met, None, false, None),
        finish(s1, uni, met, None, false, None),
        finish(s2, abs, met, None, false, Some(format!("T0 = {}", l.t0))),
    ]
}

pub fn check_l2h1_sums(cx: &Context) -> Vec<CheckRecord> {
    let h = &cx.log.header;
    let tol = cx.params.tol;
    let recs = &cx.log.records;
    let (nu, tau, th, l1) = (h.nu, h.tau, h.theta, h.lambda1);
    let f2 = sq(h.f_sup);
    let met_basic = cx.theta_at_least_half && cx.step_ok;
    let hyp_basic = "theta >= 1/2, tau <= kappa1";
    let mut out = Vec::new();

    // Fractional-level sums.
    let mid = prefix(recs.iter().map(|r| nu * tau * sq(r.mid_h1)));
    let mut cum = Tally::new(tol);
    for n in 0..recs.len() {
        cum.le(n, &[mid[n + 1]], &[sq(h.u0_l2), (n + 1) as f64 * tau * f2 / (nu * l1)]);
    }
    out.push(finish(
        Spec { id: "mid_gradient_sum", anchor: "L2(H1) bound on the blended states, cumulative from n = 0", group: Group::H, hypothesis: hyp_basic },
        cum, met_basic, None, false, None,
    ));
    for p in WINDOWS {
        let mut t = Tally::new(tol);
        for n in 0..recs.len().saturating_sub(p) {
            t.le(n, &[mid[n + p + 1] - mid[n]], &[sq(cx.l2[n]), (p + 1) as f64 * tau * f2 / (nu * l1)]);
        }
        out.push(finish(
            Spec {
                id: &format!("mid_gradient_window_p{p}"),
                anchor: "L2(H1) bound on the blended states over a window of p+1 steps",
                group: Group::H,
                hypothesis: hyp_basic,
            },
            t, met_basic, None, false, None,
        ));
    }

    // Integer-level estimates, which need the ledger.
    let hyp = "theta in (1/2,1), tau <= kappa1";
    let met = cx.theta_open && cx.step_ok;
    let Some(l) = &cx.ledger else {
        for id in ["energy_gradient_step", "gradient_sum"] {
            out.push(finish(Spec { id, anchor: "integer-level gradient estimate", group: Group::H, hypothesis: hyp }, Tally::new(tol), false, None, false, cx.ledger_note()));
        }
        for p in WINDOWS {
            out.push(finish(
                Spec { id: &format!("gradient_window_p{p}"), anchor: "integer-level gradient estimate over a window", group: Group::H, hypothesis: hyp },
                Tally::new(tol), false, None, false, cx.ledger_note(),
            ));
        }
        return out;
    };
    let d = 2.0 * th - 1.0;
    let pp = 4.0 * th * th - 6.0 * th + 3.0;
    let c1_4 = l.main.c1.powi(4);
    let g_signed = c1_4 * (1.0 - th).powi(4) * th.powi(3) / (nu.powi(3) * d.powi(3)) - nu / (2.0 * th);
    let mut e7 = Tally::new(tol);
    for r in recs {
        e7.le(
            r.n,
            &[
                0.5 * sq(r.next_l2),
                -0.5 * sq(r.u_l2),
                0.5 * sq(r.jump_l2),
                tau * nu * d / (16.0 * th) * sq(r.next_h1),
                tau * nu / (8.0 * th) * pp * sq(r.next_h1),
                -tau * nu / (8.0 * th) * pp * sq(r.u_h1),
            ],
            &[tau * 4.0 * th / (nu * d) * sq(r.f_mid_l2) / l1, tau * g_signed * sq(r.mid_h1)],
        );
    }
    out.push(finish(
        Spec { id: "energy_gradient_step", anchor: "per-step estimate behind the integer-level L2(H1) bounds", group: Group::H, hypothesis: hyp },
        e7, met, None, false, None,
    ));
    let coef = nu * d / (16.0 * th);
    let next = prefix(recs.iter().map(|r| coef * tau * sq(r.next_h1)));
    let mut cumg = Tally::new(tol);
    for n in 0..recs.len() {
        cumg.le(n, &[next[n + 1]], &[l.main.k2, (n + 1) as f64 * tau * l.main.k3]);
    }
    out.push(finish(
        Spec { id: "gradient_sum", anchor: "integer-level L2(H1) bound with K2, K3, cumulative from n = 0", group: Group::H, hypothesis: hyp },
        cumg, met, None, false, None,
    ));
    for p in WINDOWS {
        let mut t = Tally::new(tol);
        for n in 0..recs.len().saturating_sub(p) {
            t.le(
                n,
                &[next[n + p + 1] - next[n]],
                &[4.0 * l.main.k4 * l.main.k1, l.main.k3 * (p + 1) as f64 * tau, tau * nu / (8.0 * th) * pp * sq(cx.h1[n])],
            );
        }
        out.push(finish(
            Spec {
                id: &format!("gradient_window_p{p}"),
                anchor: "integer-level L2(H1) bound with K1, K3, K4 over a window of p+1 steps",
                group: Group::H,
                hypothesis: hyp,
            },
            t, met, None, false, None,
        ));
    }
    out
}

pub fn check_v_recursion(cx: &Context) -> Vec<CheckRecord> {
    let h = &cx.log.header;
    let tol = cx.params.tol;
    let (nu, tau, th, l1) = (h.nu, h.tau, h.theta, h.lambda1);
    let d = 2.0 * th - 1.0;
    let f2 = sq(h.f_sup);
    let mut out = Vec::new();

    let mut ineq = Tally::new(tol);
    for r in &cx.log.records {
        ineq.le(
            r.n,
            &[0.5 * sq(r.next_h1), -0.5 * sq(r.u_h1), 0.5 * d * sq(r.jump_h1), 0.5 * nu * tau * sq(r.mid_lap)],
            &[tau * f2 / nu, tau * 27.0 / (16.0 * nu.powi(3)) * sq(r.mid_l2) * r.mid_h1.powi(4)],
        );
    }
    out.push(finish(
        Spec { id: "gradient_energy_step", anchor: "gradient energy inequality of one step (Ladyzhenskaya and Young)", group: Group::V, hypothesis: "theta >= 1/2" },
        ineq, cx.theta_at_least_half, None, false, None,
    ));

    let hyp = "theta in (1/2,1), tau <= kappa1";
    let met = cx.theta_open && cx.step_ok;
    let ids = ["quadratic_dichotomy", "linear_gradient_bound", "discriminant_positive", "one_step_gradient_growth"];
    let Some(l) = &cx.ledger else {
        for id in ids {
            out.push(finish(Spec { id, anchor: "gradient recursion", group: Group::V, hypothesis: hyp }, Tally::new(tol), false, None, false, cx.ledger_note()));
        }
        return out;
    };
    let c = &l.main;
    let mk = l.m() * c.k1;
    let (mut quad, mut lin, mut disc, mut concl) = (Tally::new(tol), Tally::new(tol), Tally::new(tol), Tally::new(tol));
    let mut held = 0usize;
    for r in &cx.log.records {
        let (x, y) = (sq(r.next_h1), sq(r.u_h1));
        quad.le(r.n, &[x], &[tau * mk * x * x, y, tau * mk * y * y, 2.0 * tau * f2 / nu]);
        lin.le(r.n, &[x], &[2.0 * f2 / (nu * c.c3 * l1), c.c4 / c.c3 * y]);
        let hn = tau * mk * ((2.0 / (nu * c.c3 * l1) + 2.0 / (nu * nu * l1)) * f2 + (1.0 + c.c4 / c.c3) * y + 108.0 / nu.powi(4) / l1 * c.k1 * y * y);
        if hn <= 0.2 {
            held += 1;
            let delta = 1.0 - 4.0 * tau * mk * (y + tau * mk * y * y + 2.0 * tau * f2 / nu);
            disc.positive(r.n, delta);
            let growth = y * (1.0 + tau * mk * y) * (1.0 + 2.0 * tau * mk * (y + tau * mk * y * y));
            concl.le(r.n, &[x], &[growth, 18.0 / (5.0 * nu) * tau * f2]);
        }
    }
    let total = cx.log.records.len();
    let held_note = Some(format!("hypothesis held at {held} of {total} steps"));
    out.push(finish(
        Spec { id: "quadratic_dichotomy", anchor: "quadratic inequality in the new gradient norm", group: Group::V, hypothesis: hyp },
        quad, met, None, false, None,
    ));
    out.push(finish(
        Spec { id: "linear_gradient_bound", anchor: "new gradient norm bounded linearly by the old one through C3, C4", group: Group::V, hypothesis: hyp },
        lin, met, None, false, None,
    ));
    let cond = "theta in (1/2,1), tau <= kappa1, smallness hypothesis at step n";
    for (id, anchor, t) in [
        ("discriminant_positive", "discriminant of the quadratic dichotomy is positive", disc),
        ("one_step_gradient_growth", "one-step gradient growth bound under the smallness hypothesis", concl),
    ] {
        let mut rec = finish(Spec { id, anchor, group: Group::V, hypothesis: cond }, t, met, None, false, held_note.clone());
        if held == 0 && total > 0 {
            rec.status = Status::HypothesisUnmet;
        }
        out.push(rec);
    }
    out
}

pub fn check_v_longtime(cx: &Context) -> Vec<CheckRecord> {
    let h = &cx.log.header;
    let tol = cx.params.tol;
    let mut out = Vec::new();
    let names = ["finite_time_k5", "window_recursion", "uniform_gronwall_measured"];
    let Some(l) = &cx.ledger else {
        for id in names {
            out.push(finish(Spec { id, anchor: "long-time gradient bound", group: Group::V, hypothesis: "ledger available" }, Tally::new(tol), false, None, false, cx.ledger_note()));
        }
        for v in [Variant::DerivationConsistent, Variant::PaperLiteral] {
            for id in ["window_constants", "rho1_bound", "sup_k7", "sup_k6"] {
                out.push(finish(
                    Spec { id: &format!("{id}.{}", v.label()), anchor: "long-time gradient bound", group: Group::V, hypothesis: "ledger available" },
                    Tally::new(tol), false, Some(v), v != cx.params.variant, cx.ledger_note(),
                ));
            }
        }
        return out;
    };
    let (nu, tau) = (h.nu, h.tau);
    let f = h.f_sup;
    let steps = cx.log.records.len();
    let xi: Vec<f64> = cx.h1.iter().map(|v| sq(*v)).collect();

    // Finite-time bound up to the configured horizon.
    let horizon = l.inputs.horizon;
    let n_h = ((horizon / tau).floor() as usize).min(steps);
    let ln_tau = tau.ln();
    let finite_met = cx.theta_open
        && tau <= l.kappa1
        && tau <= l.kappa2
        && ln_tau <= l.ln_kappa3_at(horizon)
        && ln_tau <= l.ln_kappa4_at(horizon);
    let mut fin = Tally::new(tol);
    for (n, x) in xi.iter().enumerate().take(n_h + 1) {
        fin.le_log(n, *x, l.k5.ln_eval(h.u0_h1, f, n as f64 * tau));
    }
    out.push(finish(
        Spec { id: "finite_time_k5", anchor: "finite-time gradient bound K5 up to floor(T/tau)", group: Group::V, hypothesis: "tau <= min(kappa1, kappa2, kappa3(T), kappa4(T))" },
        fin, finite_met, None, false, Some(format!("T = {horizon}, steps checked = {}", n_h.min(steps) + 1)),
    ));

    // Uniform Grönwall windows with K1 replaced by 4*rho0.
    let m = l.m();
    let kk = 4.0 * l.rho0;
    let alpha: Vec<f64> = xi.iter().map(|x| m * kk * x).collect();
    let eta: Vec<f64> = xi.iter().map(|x| 2.0 * m * kk * (x + tau * m * kk * x * x)).collect();
    let zeta = vec![18.0 / (5.0 * nu) * f * f; xi.len()];
    let n_r = (l.inputs.r / tau).floor() as usize;
    let n0 = if l.t0.is_finite() { Some((l.t0 / tau).floor() as usize) } else { None };
    let primary = cx.params.variant;
    let admissible = |v: Variant| cx.theta_open && l.inputs.r >= 4.0 * l.kappa1 && ln_tau <= l.ln_admissible_tau(v);
    let mut rec = Tally::new(tol);
    let mut dugl = Tally::new(tol);
    let mut windows: Vec<(usize, crate::gronwall::WindowSums, usize)> = Vec::new();
    let mut skipped = 0usize;
    let bundle = SequenceBundle::new(tau, xi.clone(), alpha.clone(), eta.clone(), zeta.clone()).ok();
    if let (Some(n0), Some(b)) = (n0, &bundle) {
        if n_r >= 3 {
            let n2 = n_r - 2;
            let mut k = 0;
            while n0 + (k + 1) * n_r <= steps {
                let n_star = n0 + (k + 1) * n_r;
                let n1 = n_star + 1 - n_r;
                let mut ok = true;
                for n in n1..=n_star {
                    let rhs = [xi[n - 1] * (1.0 + tau * alpha[n - 1]) * (1.0 + tau * eta[n - 1]), tau * zeta[n]];
                    let before = rec.violations;
                    rec.le(n, &[xi[n]], &rhs);
                    ok &= rec.violations == before;
                }
                if let Ok(w) = verify_hypotheses(b, n1, n2, n_star) {
                    if ok {
                        let bound = w.bound(tau, n2).unwrap_or(f64::INFINITY);
                        for n in n1 + n2 + 1..=n_star {
                            dugl.le(n, &[xi[n]], &[bound]);
                        }
                    } else {
                        skipped += 1;
                    }
                    windows.push((n_star, w, n2));
                }
                k += 1;
            }
        }
    }
    let win_note = match n0 {
        Some(n0) => format!("N0 = {n0}, Nr = {n_r}, windows = {}, skipped (recursion failed) = {skipped}", windows.len()),
        None => "T0 infinite: no absorbing time".into(),
    };
    out.push(finish(
        Spec { id: "window_recursion", anchor: "one-step gradient recursion with K1 replaced by 4*rho0 after T0", group: Group::V, hypothesis: "tau <= admissible step" },
        rec, admissible(primary), Some(primary), false, Some(win_note.clone()),
    ));
    let mut rec_dugl = finish(
        Spec { id: "uniform_gronwall_measured", anchor: "discrete uniform Gronwall bound with window sums measured on the trajectory", group: Group::V, hypothesis: "recursion holds on the window" },
        dugl, true, None, false, Some(win_note),
    );
    if rec_dugl.evaluated == 0 && skipped > 0 {
        rec_dugl.status = Status::HypothesisUnmet;
        rec_dugl.hypothesis_met = false;
    }
    out.push(rec_dugl);

    for v in [Variant::DerivationConsistent, Variant::PaperLiteral] {
        let lt = l.long_time(v);
        let met = admissible(v);
        let shadow = v != primary;
        let mut consts = Tally::new(tol);
        let mut rho = Tally::new(tol);
        for (n_star, w, _) in &windows {
            consts.le(*n_star, &[w.a1], &[lt.a1]);
            consts.le(*n_star, &[w.a2], &[lt.a2]);
            consts.le(*n_star, &[w.a3], &[lt.a3]);
            consts.le(*n_star, &[w.a4], &[lt.a4]);
            rho.le_log(*n_star, xi[*n_star], lt.ln_rho1_sq);
        }
        let mut k7 = Tally::new(tol);
        for (n, x) in xi.iter().enumerate() {
            k7.le_log(n, *x, lt.ln_k7);
        }
        let mut k6 = Tally::new(tol);
        if let Some(n0) = n0 {
            for (n, x) in xi.iter().enumerate().skip(n0 + n_r) {
                k6.le_log(n, *x, lt.ln_k6);
            }
        }
        let hyp = "tau <= admissible step, r >= 4*kappa1, theta in (1/2,1)";
        let lab = v.label();
        out.push(finish(
            Spec { id: &format!("window_constants.{lab}"), anchor: "measured window sums a1..a4 within their analytic bounds", group: Group::V, hypothesis: hyp },
            consts, met, Some(v), shadow, None,
        ));
        out.push(finish(
            Spec { id: &format!("rho1_bound.{lab}"), anchor: "gradient at the end of each window below rho1^2", group: Group::V, hypothesis: hyp },
            rho, met, Some(v), shadow, None,
        ));
        out.push(finish(
            Spec { id: &format!("sup_k7.{lab}"), anchor: "global gradient bound K7", group: Group::V, hypothesis: hyp },
            k7, met, Some(v), shadow, Some(format!("ln K7 = {}", lt.ln_k7)),
        ));
        out.push(finish(
            Spec { id: &format!("sup_k6.{lab}"), anchor: "gradient bound K6 from N0 + Nr on, independent of the initial data", group: Group::V, hypothesis: hyp },
            k6, met, Some(v), shadow, Some(format!("ln K6 = {}", lt.ln_k6)),
        ));
    }
    out
}
