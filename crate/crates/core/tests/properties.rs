mod common;

use mdbspline::assembler::{auto_plan, build_matrix_mixed, build_matrix_rde, build_matrix_rki};
use mdbspline::eval::{eval_grid, uniform_grid};
use mdbspline::par::Execution;
use mdbspline::{MDSpace, Rational};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn space_strategy(max_degree: i64, max_breaks: usize) -> impl Strategy<Value = MDSpace> {
    any::<u64>().prop_map(move |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        common::random_space(&mut rng, max_degree, 0, max_breaks)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn three_constructions_agree_pointwise(s in space_strategy(10, 6)) {
        let a = build_matrix_rki::<f64>(&s).unwrap();
        let b = build_matrix_rde::<f64>(&s).unwrap();
        let c = build_matrix_mixed::<f64>(&s, &auto_plan(&s)).unwrap();
        let grid = uniform_grid(s.a, s.b, 97);
        let va = eval_grid(&a, &grid, Execution::Parallel).unwrap();
        for other in [&b, &c] {
            let vo = eval_grid(other, &grid, Execution::Parallel).unwrap();
            for (p, q) in va.iter().zip(&vo) {
                let (p, q) = (p.scatter(s.dim()), q.scatter(s.dim()));
                for (u, v) in p.iter().zip(&q) {
                    prop_assert!((u - v).abs() <= 1e-12, "{u} vs {v}");
                }
            }
        }
    }

    #[test]
    fn partition_of_unity_and_locality(s in space_strategy(12, 8)) {
        let b = build_matrix_rki::<f64>(&s).unwrap();
        let grid = common::interval_midpoints(&s);
        for (j, w) in eval_grid(&b, &grid, Execution::Sequential).unwrap().iter().enumerate() {
            prop_assert!((w.sum() - 1.0).abs() <= 1e-13);
            let nz = w.values.iter().filter(|v| **v > 0.0).count() as i64;
            prop_assert_eq!(nz, s.degrees[j] + 1);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    // small spaces keep the rational arithmetic cheap
    #[test]
    fn exact_columns_sum_to_one(s in space_strategy(5, 3)) {
        let m = build_matrix_rki::<Rational>(&s).unwrap();
        for c in m.matrix().column_sums() {
            prop_assert_eq!(c, <Rational as mdbspline::Scalar>::one());
        }
        let r = build_matrix_rde::<Rational>(&s).unwrap();
        for c in r.matrix().column_sums() {
            prop_assert_eq!(c, <Rational as mdbspline::Scalar>::one());
        }
    }
}
