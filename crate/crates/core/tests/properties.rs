use ci_core::bounds::{objective_ub, objective_wyner};
use ci_core::synthesis::mixture_residual;
use ci_core::transport::solve_transport_masses;
use ci_core::{
    build_truncated_codebook, is_strongly_typical, kl_divergence, mixture_lambda, mixture_split,
    renyi_divergence, superblock_rate_check, synthesize, tv_distance, Channel, Decomposition,
    FiniteDist, Sense,
};
use proptest::prelude::*;

fn pmf(k: usize) -> impl Strategy<Value = FiniteDist> {
    prop::collection::vec(0.01f64..1.0, k).prop_map(|v| FiniteDist::normalize(&v).unwrap())
}

fn channel(inputs: usize, outputs: usize) -> impl Strategy<Value = Channel> {
    prop::collection::vec(pmf(outputs), inputs).prop_map(|rows| Channel::new(rows).unwrap())
}

fn decomposition() -> impl Strategy<Value = Decomposition> {
    (1usize..=4, 2usize..=3, 2usize..=3).prop_flat_map(|(w, x, y)| {
        (pmf(w), channel(w, x), channel(w, y))
            .prop_map(|(pw, cx, cy)| Decomposition::new(pw, cx, cy).unwrap())
    })
}

fn pair(k: usize) -> impl Strategy<Value = (FiniteDist, FiniteDist)> {
    (pmf(k), pmf(k))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn renyi_divergence_is_nondecreasing_in_order((p, q) in (2usize..6).prop_flat_map(pair)) {
        let orders = [0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 4.0, f64::INFINITY];
        let vals: Vec<f64> = orders.iter().map(|&o| renyi_divergence(&p, &q, o).unwrap()).collect();
        for w in vals.windows(2) {
            prop_assert!(w[0] <= w[1] + 1e-12, "{vals:?}");
        }
    }

    #[test]
    fn pinsker((p, q) in (2usize..6).prop_flat_map(pair)) {
        let tv = tv_distance(&p, &q).unwrap();
        prop_assert!(kl_divergence(&p, &q).unwrap() >= 2.0 * tv * tv - 1e-12);
    }

    #[test]
    fn transport_is_feasible_and_transpose_symmetric(
        (p, q, cost) in (1usize..4, 1usize..4).prop_flat_map(|(m, n)| (
            pmf(m),
            pmf(n),
            prop::collection::vec(prop::collection::vec(-3.0f64..3.0, n), m),
        ))
    ) {
        for sense in [Sense::Min, Sense::Max] {
            let plan = solve_transport_masses(&cost, p.as_slice(), q.as_slice(), sense).unwrap();
            for (a, b) in plan.row_sums().iter().zip(p.as_slice()) {
                prop_assert!((a - b).abs() < 1e-12);
            }
            for (a, b) in plan.col_sums().iter().zip(q.as_slice()) {
                prop_assert!((a - b).abs() < 1e-12);
            }
            prop_assert!(plan.as_slice().iter().all(|&v| v >= 0.0));
            let t: Vec<Vec<f64>> = (0..q.len()).map(|j| cost.iter().map(|row| row[j]).collect()).collect();
            let back = solve_transport_masses(&t, q.as_slice(), p.as_slice(), sense).unwrap();
            prop_assert!((plan.value - back.value).abs() < 1e-12);
        }
    }

    #[test]
    fn ub_objective_dominates_mutual_information(d in decomposition()) {
        let pi = synthesize(&d);
        prop_assert!(objective_ub(&pi, &d).unwrap() >= objective_wyner(&d) - 1e-9);
    }

    #[test]
    fn splitting_reconstructs_target((q, p) in (2usize..6).prop_flat_map(pair), slack in 1e-3f64..1.0) {
        let eps = renyi_divergence(&p, &q, f64::INFINITY).unwrap() + slack;
        let r = mixture_split(&q, &p, eps).unwrap();
        let w = (-eps).exp();
        for i in 0..q.len() {
            prop_assert!((w * p.get(i) + (1.0 - w) * r.get(i) - q.get(i)).abs() < 1e-12);
        }
    }

    #[test]
    fn lambda_is_the_largest_valid_weight((q, p) in (2usize..6).prop_flat_map(pair)) {
        let lam = mixture_lambda(&q, &p).unwrap();
        prop_assume!(lam > 1e-5 && lam < 1.0 - 1e-5);
        prop_assert!(mixture_residual(&q, &p, lam - 1e-6).unwrap().iter().all(|&v| v >= 0.0));
        prop_assert!(mixture_residual(&q, &p, lam + 1e-6).unwrap().iter().any(|&v| v < 0.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sampled_codewords_are_typical(d in decomposition(), n in 2usize..7, eps in 0.2f64..2.0, seed in any::<u64>()) {
        if let Ok(cb) = build_truncated_codebook(&d, n, eps, 0.4, seed) {
            prop_assert!(cb.words.iter().all(|w| is_strongly_typical(w, d.pw(), eps / 2.0)));
            prop_assert_eq!(cb.words.len(), (n as f64 * 0.4).exp().round() as usize);
        }
    }

    #[test]
    fn superblock_quantization_respects_its_bound(
        pw in (2usize..4).prop_flat_map(pmf),
        n in 1usize..6,
        eps in 0.05f64..1.0,
        excess in 0.0f64..2.0,
    ) {
        let k = pw.len();
        let id = Channel::new((0..k).map(|i| FiniteDist::point_mass(k, i).unwrap()).collect()).unwrap();
        let d = Decomposition::new(pw.clone(), id.clone(), id).unwrap();
        let rate = ci_core::entropy(&pw) + excess;
        match superblock_rate_check(&d, 1, n, eps, rate) {
            Ok(r) => {
                prop_assert!(r.measured <= r.bound + 1e-12, "{r:?}");
                prop_assert!(r.max_cell_error < 1.0 / r.m as f64 + 1e-15);
            }
            Err(e) => prop_assert!(matches!(e, ci_core::Error::EmptyTypicalSet(_)), "{e}"),
        }
    }
}
