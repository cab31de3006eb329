use oneleg::constants::{check_identities, half_theta_obstruction, theta_constants_scaled};
use oneleg::gronwall::{dgl_bound, dugl_bound, verify_hypotheses, SequenceBundle};
use oneleg::spectral::{random_divfree_field, trilinear_b, Spectrum};
use oneleg::{BoundLedger, ForcingSpec, LedgerInputs, RunConfig, TorusGrid};
use proptest::prelude::*;

fn ledger(nu: f64, theta: f64, u0: f64, g0: f64, f: f64) -> BoundLedger {
    let r = 4.0 / nu;
    BoundLedger::new(LedgerInputs::new(nu, 1.0, theta, 0.01, u0, g0, f, r)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn theta_constants_in_range(theta in 0.5f64..1.0, x in 0.0f64..=1.0) {
        prop_assume!(theta > 0.5 && x > 0.0);
        let tc = theta_constants_scaled(theta, x).unwrap();
        prop_assert!(tc.alpha > 0.5 && tc.alpha <= 1.5, "alpha = {}", tc.alpha);
        prop_assert!(tc.epsilon > 0.0);
        prop_assert_eq!(tc.epsilon, (2.0 * theta - 1.0) * x);
        prop_assert!(tc.a.is_finite() && tc.b.is_finite());
        for r in check_identities(&tc) {
            prop_assert!(r <= 1e-12, "residual {r} at theta = {theta}, x = {x}");
        }
    }
}

proptest! {
    #[test]
    fn obstruction_vanishes_only_at_one_half(x in 0.0f64..=1.0, theta in 0.5f64..1.0) {
        let tc = theta_constants_scaled(0.5, x).unwrap();
        prop_assert_eq!((tc.a + tc.b).powi(2) + tc.epsilon, 0.0);
        prop_assert_eq!(half_theta_obstruction(0.5, x), 0.0);
        if theta > 0.5 {
            prop_assert!(half_theta_obstruction(theta, x) > 0.0);
        }
    }

    #[test]
    fn k5_is_monotone(
        nu in 0.2f64..5.0, theta in 0.55f64..0.95,
        x in 0.0f64..3.0, dx in 0.0f64..1.0,
        f in 0.0f64..2.0, df in 0.0f64..1.0,
        t in 0.0f64..10.0, dt in 0.0f64..5.0,
    ) {
        let l = ledger(nu, theta, 0.5, 0.5, 1.0);
        let base = l.k5.ln_eval(x, f, t);
        for up in [l.k5.ln_eval(x + dx, f, t), l.k5.ln_eval(x, f + df, t), l.k5.ln_eval(x, f, t + dt)] {
            prop_assert!(up >= base, "{up} < {base}");
        }
    }

    #[test]
    fn kappas_decrease_in_forcing(nu in 0.2f64..5.0, theta in 0.55f64..0.95, f in 0.01f64..2.0, df in 0.01f64..1.0, t in 0.1f64..10.0) {
        let lo = ledger(nu, theta, 0.5, 0.5, f);
        let hi = ledger(nu, theta, 0.5, 0.5, f + df);
        prop_assert!(hi.kappa2 < lo.kappa2);
        // κ₃, κ₄ underflow to zero for most data, so only the weak form is observable.
        prop_assert!(lo.kappa3(0.5, f + df, t) <= lo.kappa3(0.5, f, t));
        prop_assert!(lo.kappa4(0.5, f + df, t) <= lo.kappa4(0.5, f, t));
        prop_assert!(lo.kappa3(0.7, f, t) <= lo.kappa3(0.5, f, t));
    }

    #[test]
    fn default_auxiliaries_keep_c3_c4_positive(theta in 0.5f64..1.0, nu in 0.05f64..20.0) {
        prop_assume!(theta > 0.5);
        let l = ledger(nu, theta, 1.0, 1.0, 1.0);
        let c3 = 0.75 * nu * theta * theta;
        prop_assert!((l.main.c3 - c3).abs() <= 1e-12 * c3);
        prop_assert!(l.main.c4 > 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn field_norm_relations(seed in any::<u64>(), amp in 0.01f64..10.0, decay in 0.0f64..3.0) {
        let g = TorusGrid::standard(16).unwrap();
        let u = random_divfree_field(&g, seed, Spectrum { amplitude: amp, decay });
        let l2 = u.l2();
        prop_assert!((u.l2_quadrature() - l2).abs() <= 1e-12 * l2);
        prop_assert!(l2 <= g.lambda1().powf(-0.5) * u.h1() * (1.0 + 1e-13));
        prop_assert!(u.divergence_l2() <= 1e-13 * u.h1());
        // 2^{-1/4} with a 1.25 safety factor.
        let lady = u.l4() / (l2.sqrt() * u.h1().sqrt());
        prop_assert!(lady <= 2f64.powf(-0.25) * 1.25, "ratio {lady}");
    }

    #[test]
    fn trilinear_form_is_skew(s in any::<u64>()) {
        let g = TorusGrid::standard(16).unwrap();
        let sp = Spectrum::default();
        let u = random_divfree_field(&g, s, sp);
        let v = random_divfree_field(&g, s ^ 0x9e37, sp);
        let w = random_divfree_field(&g, s.wrapping_add(17), sp);
        let sum = trilinear_b(&u, &v, &w).unwrap() + trilinear_b(&u, &w, &v).unwrap();
        let scale = u.l2() * v.h1() * w.h1() / g.lambda1().sqrt();
        prop_assert!(sum.abs() <= 1e-12 * scale, "{sum} vs {scale}");
    }
}

fn rates(n: usize) -> impl Strategy<Value = (f64, f64, Vec<f64>, Vec<f64>, Vec<f64>)> {
    (
        0.01f64..1.0,
        0.0f64..10.0,
        prop::collection::vec(0.0f64..5.0, n),
        prop::collection::vec(0.0f64..5.0, n),
        prop::collection::vec(0.0f64..5.0, n),
    )
}

fn bundle() -> impl Strategy<Value = SequenceBundle> {
    (3usize..=51).prop_flat_map(rates).prop_map(|(tau, xi0, a, e, z)| {
        SequenceBundle::saturated(tau, xi0, a, e, z).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn dgl_dominates_the_equality_recursion(b in bundle()) {
        for n in 2..b.len() {
            let bound = dgl_bound(&b, n).unwrap();
            prop_assert!(bound >= b.xi[n] * (1.0 - 1e-12), "n = {n}: {bound} < {}", b.xi[n]);
        }
    }

    #[test]
    fn dugl_dominates_on_the_certified_range(b in bundle(), n1 in 0usize..20, n2 in 1usize..15) {
        let n_star = b.len() - 1;
        prop_assume!(n1 + n2 + 1 <= n_star);
        let w = verify_hypotheses(&b, n1, n2, n_star).unwrap();
        let bound = dugl_bound(w.a1, w.a2, w.a3, w.a4, b.tau, n2).unwrap();
        for n in n1 + n2 + 1..=n_star {
            prop_assert!(bound >= b.xi[n] * (1.0 - 1e-12), "n = {n}: {bound} < {}", b.xi[n]);
        }
    }

    #[test]
    fn dgl_is_monotone_in_its_data(b in bundle(), which in 0usize..4, at in 0usize..50, bump in 0.0f64..2.0) {
        let n = b.len() - 1;
        let i = at % b.len();
        let mut c = b.clone();
        match which {
            0 => c.xi[0] += bump,
            1 => c.alpha[i] += bump,
            2 => c.eta[i] += bump,
            _ => c.zeta[i] += bump,
        }
        prop_assert!(dgl_bound(&c, n).unwrap() >= dgl_bound(&b, n).unwrap() * (1.0 - 1e-14));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn steps_preserve_structure(seed in any::<u64>(), theta in 0.5f64..=1.0, amp in 0.1f64..3.0) {
        let g = TorusGrid::standard(16).unwrap();
        let u0 = random_divfree_field(&g, seed, Spectrum { amplitude: amp, decay: 1.0 });
        let cfg = RunConfig::new(u0, 0.1, theta, 0.02, 40)
            .with_forcing(ForcingSpec::single([2, 1], [[0.1, 0.05], [-0.2, -0.1]]));
        let log = oneleg::run(&cfg).unwrap();
        for r in &log.records {
            prop_assert!(r.recon_error <= 1e-13, "step {}: {}", r.n, r.recon_error);
            prop_assert!(r.div_error <= 1e-13, "step {}: {}", r.n, r.div_error);
        }
    }
}
