use bocs_core::acquisition::{
    build_quadratic, round_geometric, sdp_solve_best_effort, to_plus_minus, Penalty, PenaltyKind,
    PlusMinusForm, QuadObjective, RoundingConfig, SdpConfig,
};
use bocs_core::benchmarks::BqpInstance;
use bocs_core::search::{
    oblivious_local_search, random_search, simulated_annealing, AnnealSchedule, SearchBudget,
};
use bocs_core::surrogate::{
    term_count, CoefficientDraw, Dataset, MonomialBasis, SurrogatePosterior,
};
use bocs_core::BinaryPoint;
use nalgebra::DVector;
use proptest::prelude::*;

fn point(d: usize) -> impl Strategy<Value = BinaryPoint> {
    proptest::collection::vec(0u8..2, d).prop_map(|b| BinaryPoint::new(b).unwrap())
}

fn quadratic_draw(d: usize) -> impl Strategy<Value = CoefficientDraw<f64>> {
    let p = term_count(d, 2);
    proptest::collection::vec(-3.0f64..3.0, p).prop_map(move |a| CoefficientDraw {
        alpha: DVector::from_vec(a),
        sigma2: 1.0,
        basis: MonomialBasis::quadratic(d).unwrap(),
    })
}

fn enumerate_max(q: &QuadObjective<f64>) -> f64 {
    (0..1u64 << q.dim())
        .map(|i| q.value(&BinaryPoint::from_index(i, q.dim())))
        .fold(f64::NEG_INFINITY, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dataset_rows_are_expansions((d, pts) in (1usize..8).prop_flat_map(|d| (Just(d), proptest::collection::vec(point(d), 1..12)))) {
        let basis = MonomialBasis::new(d, 3.min(d)).unwrap();
        let data = Dataset::<f64>::from_points(basis.clone(), pts.iter().cloned().map(|x| (x, 0.5))).unwrap();
        for (i, x) in data.points().iter().enumerate() {
            let row = basis.expand::<f64>(x).unwrap();
            let again = basis.expand::<f64>(&BinaryPoint::new(x.bits().to_vec()).unwrap()).unwrap();
            prop_assert_eq!(&row, &again);
            for (j, v) in row.iter().enumerate() {
                prop_assert_eq!(data.features()[(i, j)], *v);
            }
        }
    }

    #[test]
    fn quadratic_term_count(d in 1usize..64) {
        prop_assert_eq!(MonomialBasis::quadratic(d).unwrap().len(), 1 + d + d * (d - 1) / 2);
    }

    #[test]
    fn transform_is_exact(draw in (2usize..9).prop_flat_map(quadratic_draw), lambda in 0.0f64..2.0, l2 in any::<bool>()) {
        let kind = if l2 { PenaltyKind::L2Squared } else { PenaltyKind::L1 };
        let penalty = Penalty::new(kind, lambda).unwrap();
        let q = build_quadratic(&draw, &penalty).unwrap();
        let pm = to_plus_minus(&q).unwrap();
        let d = q.dim();
        for i in 0..1u64 << d {
            let x = BinaryPoint::from_index(i, d);
            let a = q.value(&x);
            let b = pm.value(&PlusMinusForm::<f64>::lift(&x));
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()), "{} vs {}", a, b);
            let direct = draw.predict(&x).unwrap() - penalty.value(&x);
            prop_assert!((a - direct).abs() <= 1e-9 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn relaxation_sandwich(draw in (2usize..9).prop_flat_map(quadratic_draw), seed in any::<u64>()) {
        let q = build_quadratic(&draw, &Penalty::none()).unwrap();
        let pm = to_plus_minus(&q).unwrap();
        let sol = sdp_solve_best_effort(&pm, &SdpConfig::default(), seed).unwrap();
        let bound = sol.upper_bound() + pm.constant;
        let opt = enumerate_max(&q);
        prop_assert!(opt <= bound + 1e-9, "{} > {}", opt, bound);
        for c in sol.v.column_iter() {
            prop_assert!((c.norm() - 1.0).abs() < 1e-6);
        }
        let x = round_geometric(&sol, &q, &RoundingConfig::default(), seed).unwrap();
        prop_assert_eq!(x.dim(), q.dim());
        prop_assert!(x.bits().iter().all(|&b| b <= 1));
        prop_assert!(q.value(&x) <= bound + 1e-9);
    }

    #[test]
    fn chain_keeps_variances_positive(seed in any::<u64>(), sweeps in 1usize..30, scale in prop_oneof![Just(1e-8), Just(1.0), Just(1e6)]) {
        let basis = MonomialBasis::quadratic(5).unwrap();
        let mut rng = bocs_core::seeding::rng_from(seed);
        let pts: Vec<_> = (0..8).map(|_| {
            let x = BinaryPoint::random(5, &mut rng);
            let y = scale * (x.count_ones() as f64 - 2.0);
            (x, y)
        }).collect();
        let data = Dataset::from_points(basis.clone(), pts).unwrap();
        let mut chain = SurrogatePosterior::<f64>::new(basis.len(), seed);
        for _ in 0..sweeps {
            chain.gibbs_sweep(&data).unwrap();
            prop_assert!(chain.sigma2 > 0.0 && chain.tau2 > 0.0 && chain.xi > 0.0);
            prop_assert!(chain.beta2.iter().all(|&b| b > 0.0));
            prop_assert!(chain.nu.iter().all(|&v| v > 0.0));
            prop_assert!(chain.alpha.iter().all(|a| a.is_finite()));
        }
    }

    #[test]
    fn searchers_respect_budget_and_are_deterministic(budget in 1usize..200, d in 1usize..12, seed in any::<u64>()) {
        let w: Vec<f64> = (0..d).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect();
        let f = |x: &BinaryPoint| Ok(x.bits().iter().zip(&w).map(|(&b, w)| b as f64 * w).sum::<f64>() - 0.3 * (x.count_ones() as f64).powi(2));
        let b = SearchBudget::charged(budget);
        let runs = [
            simulated_annealing(f, d, b, &AnnealSchedule::default(), seed).unwrap(),
            oblivious_local_search(f, d, b, seed).unwrap(),
            random_search(f, d, b, seed).unwrap(),
        ];
        let again = [
            simulated_annealing(f, d, b, &AnnealSchedule::default(), seed).unwrap(),
            oblivious_local_search(f, d, b, seed).unwrap(),
            random_search(f, d, b, seed).unwrap(),
        ];
        for (r, a) in runs.iter().zip(&again) {
            prop_assert_eq!(r.trace.len(), budget);
            prop_assert_eq!(r, a);
            let rb = r.running_best();
            prop_assert!(rb.windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn bqp_generation_is_bitwise_reproducible(d in 1usize..16, lc in 0.1f64..50.0, seed in any::<u64>()) {
        let a = BqpInstance::generate(d, lc, 0.0, seed).unwrap();
        let b = BqpInstance::generate(d, lc, 0.0, seed).unwrap();
        prop_assert!(a.q.iter().zip(&b.q).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}
