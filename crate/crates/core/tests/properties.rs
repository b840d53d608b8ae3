use proptest::prelude::*;

use pullbound::drift::expr::{parse_expr, sgn, BinOp, Expr, Func};
use pullbound::mc::{containment_profile, McSettings};
use pullbound::{DriftSpec, NoiseSpec};

fn literal() -> impl Strategy<Value = f64> {
    prop_oneof![(0u32..1000).prop_map(f64::from), (0.0f64..100.0), (1e-6f64..1e-3),]
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![literal().prop_map(Expr::Num), Just(Expr::Var)];
    leaf.prop_recursive(6, 48, 3, |inner| {
        let op = prop_oneof![
            Just(BinOp::Add),
            Just(BinOp::Sub),
            Just(BinOp::Mul),
            Just(BinOp::Div),
            Just(BinOp::Pow),
        ];
        let unary = prop_oneof![Just(Func::Exp), Just(Func::Tanh), Just(Func::Abs), Just(Func::Sgn)];
        let binary = prop_oneof![Just(Func::Min), Just(Func::Max)];
        prop_oneof![
            inner.clone().prop_map(Expr::neg),
            (op, inner.clone(), inner.clone()).prop_map(|(op, a, b)| Expr::binary(op, a, b)),
            (unary, inner.clone()).prop_map(|(f, a)| Expr::Call(f, vec![a])),
            (binary, inner.clone(), inner).prop_map(|(f, a, b)| Expr::Call(f, vec![a, b])),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn render_then_parse_is_identity(e in expr()) {
        let text = e.render("x");
        let back = parse_expr(&text).map_err(|err| TestCaseError::fail(format!("{text}: {err}")))?;
        prop_assert_eq!(back, e, "{}", text);
    }
}

proptest! {
    #[test]
    fn sgn_is_odd(x in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO) {
        prop_assert_eq!(sgn(-x), -sgn(x));
        prop_assert!(sgn(x) == 0.0 || sgn(x).abs() == 1.0);
    }

    #[test]
    fn builtin_drifts_are_homogeneous(lambda in 0.1f64..50.0, x in -10.0f64..10.0, c in 0.0f64..5.0) {
        let ou = DriftSpec::ou(lambda, 1).unwrap();
        let fx = ou.eval(&[x]).unwrap()[0];
        let fcx = ou.eval(&[c * x]).unwrap()[0];
        prop_assert!((fcx - c * fx).abs() <= 1e-12 * (1.0 + fcx.abs()));
        let pw = DriftSpec::piecewise(lambda, 1.0).unwrap();
        let fx = pw.eval(&[x]).unwrap()[0];
        let fcx = pw.eval(&[c * x]).unwrap()[0];
        prop_assert!((fcx - c * fx).abs() <= 1e-12 * (1.0 + fcx.abs()));
    }
}

fn small_settings(seed: u64, bridge: bool) -> McSettings {
    McSettings {
        n_paths: 400,
        dt: 1e-2,
        master_seed: seed,
        bridge_correction: bridge,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    // One path set serves all (R, T) cells, so the events are nested.
    #[test]
    fn containment_is_monotone_in_radius_and_horizon(
        seed in any::<u64>(),
        mut radii in prop::collection::vec(0.2f64..3.0, 2..5),
        mut horizons in prop::collection::vec(0.1f64..2.0, 2..5),
    ) {
        radii.sort_by(f64::total_cmp);
        horizons.sort_by(f64::total_cmp);
        let p = containment_profile(
            &DriftSpec::ou(1.0, 1).unwrap(),
            NoiseSpec::new(1.0).unwrap(),
            &[0.0],
            &radii,
            &horizons,
            small_settings(seed, true),
        ).unwrap();
        for i in 0..radii.len() {
            for j in 0..horizons.len() {
                if i > 0 {
                    prop_assert!(p[i - 1][j].n_contained <= p[i][j].n_contained);
                }
                if j > 0 {
                    prop_assert!(p[i][j - 1].n_contained >= p[i][j].n_contained);
                }
            }
        }
    }

    #[test]
    fn bridge_correction_never_lowers_exit_frequency(seed in any::<u64>(), radius in 0.3f64..2.0) {
        let drift = DriftSpec::ou(1.0, 1).unwrap();
        let noise = NoiseSpec::new(1.0).unwrap();
        let run = |bridge| containment_profile(&drift, noise, &[0.0], &[radius], &[1.0], small_settings(seed, bridge))
            .unwrap()[0][0]
            .clone();
        let (on, off) = (run(true), run(false));
        prop_assert!(on.n_contained <= off.n_contained);
        prop_assert_eq!(on.n_contained_raw, off.n_contained);
    }

    #[test]
    fn worker_count_does_not_change_counts(seed in any::<u64>()) {
        let drift = DriftSpec::piecewise(5.0, 1.0).unwrap();
        let noise = NoiseSpec::new(1.0).unwrap();
        let run = |workers| {
            rayon::ThreadPoolBuilder::new().num_threads(workers).build().unwrap().install(|| {
                containment_profile(&drift, noise, &[0.0], &[0.5, 1.0], &[0.5, 1.0], small_settings(seed, true)).unwrap()
            })
        };
        let one = run(1);
        prop_assert_eq!(&one, &run(4));
        prop_assert_eq!(&one, &run(8));
    }
}
