use proptest::prelude::*;

use rip_lab_core::{
    block_compose, block_rip, coherence, exact_rip, gram, lazy_certify, lift_order,
    sym_eigenvalues, DenseMatrix, Direction, ExactOptions,
};

fn unit_column_matrix(rows: usize, cols: usize) -> impl Strategy<Value = DenseMatrix> {
    proptest::collection::vec(-1.0f64..1.0, rows * cols)
        .prop_filter("columns bounded away from zero", move |v| {
            (0..cols).all(|j| (0..rows).map(|i| v[i * cols + j].powi(2)).sum::<f64>() > 1e-3)
        })
        .prop_map(move |v| {
            let raw = DenseMatrix::from_row_major(rows, cols, v).unwrap();
            DenseMatrix::from_fn(rows, cols, |i, j| raw.get(i, j) / raw.column_norm(j))
        })
}

fn symmetric_matrix() -> impl Strategy<Value = DenseMatrix> {
    (1usize..9).prop_flat_map(|n| {
        proptest::collection::vec(-10.0f64..10.0, n * n).prop_map(move |v| {
            DenseMatrix::from_fn(n, n, |i, j| (v[i * n + j] + v[j * n + i]) / 2.0)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn eigenvalues_sum_to_trace(m in symmetric_matrix()) {
        let s = sym_eigenvalues(&m).unwrap();
        let sum: f64 = s.values.iter().sum();
        prop_assert!((sum - m.trace()).abs() <= 1e-9 * (1.0 + m.trace().abs()));
        prop_assert!(s.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn gram_is_psd(
        m in (1usize..7, 1usize..7).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-3.0f64..3.0, r * c)
                .prop_map(move |v| DenseMatrix::from_row_major(r, c, v).unwrap())
        })
    ) {
        let g = gram(&m);
        prop_assert_eq!(g.max_abs_asymmetry().unwrap(), 0.0);
        let s = sym_eigenvalues(&g).unwrap();
        prop_assert!(s.smallest() >= -1e-10 * (1.0 + s.largest().abs()));
    }

    #[test]
    fn rip_invariant_under_column_permutation_and_signs(
        m in unit_column_matrix(4, 7),
        perm in Just((0..7).collect::<Vec<usize>>()).prop_shuffle(),
        signs in proptest::collection::vec(any::<bool>(), 7),
        k in 2usize..4,
    ) {
        let moved = DenseMatrix::from_fn(4, 7, |i, j| {
            let s = if signs[j] { -1.0 } else { 1.0 };
            s * m.get(i, perm[j])
        });
        let a = exact_rip(&m, k).unwrap().0.value;
        let b = exact_rip(&moved, k).unwrap().0.value;
        prop_assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn rip_is_monotone_in_order(m in unit_column_matrix(5, 8)) {
        let values: Vec<f64> = (1..=5).map(|k| exact_rip(&m, k).unwrap().0.value).collect();
        prop_assert!(values[0] <= 1e-12);
        for w in values.windows(2) {
            prop_assert!(w[0] <= w[1] + 1e-12, "{values:?}");
        }
    }

    #[test]
    fn order_lifting_bounds_exact_values(m in unit_column_matrix(6, 9)) {
        let values: Vec<f64> = (0..=5)
            .map(|k| if k < 2 { 0.0 } else { exact_rip(&m, k).unwrap().0.value })
            .collect();
        for mm in 2..=5 {
            for k in mm..=5 {
                let bound = lift_order(values[mm], mm, k).unwrap();
                prop_assert!(values[k] <= bound + 1e-12, "delta_{} = {} > {}", k, values[k], bound);
            }
        }
        prop_assert!((values[2] - coherence(&m).unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn block_diagonal_takes_the_larger_block(
        a in unit_column_matrix(3, 5),
        b in unit_column_matrix(4, 4),
        k in 2usize..4,
    ) {
        let whole = exact_rip(&block_compose(&a, &b), k).unwrap().0.value;
        let ra = exact_rip(&a, k).unwrap().0.value;
        let rb = exact_rip(&b, k).unwrap().0.value;
        prop_assert!((whole - ra.max(rb)).abs() <= 1e-10);
        let (report, w) = block_rip(&a, &b, k, &ExactOptions::default()).unwrap();
        prop_assert!((report.value - whole).abs() <= 1e-10);
        prop_assert!((w.deviation - whole).abs() <= 1e-10);
    }

    #[test]
    fn lazy_certificate_is_sound(m in unit_column_matrix(6, 9), delta in 0.05f64..0.95) {
        let (cert, report) = lazy_certify(&m, 2, delta).unwrap();
        if cert.max_certified_order == 0 {
            prop_assert!(cert.probe_parameter > delta);
        } else {
            prop_assert_eq!(report.direction, Direction::UpperBound);
            let exact = exact_rip(&m, cert.max_certified_order).unwrap().0.value;
            prop_assert!(exact <= report.value + 1e-12);
            prop_assert!(report.value <= delta * (1.0 + 1e-12));
        }
    }

    #[test]
    fn threshold_exit_agrees_with_full_enumeration(m in unit_column_matrix(4, 8), t in 0.0f64..1.5) {
        let (full, _) = exact_rip(&m, 3).unwrap();
        let opts = ExactOptions { threshold: Some(t), ..ExactOptions::default() };
        let (early, w) = rip_lab_core::exact_rip_with(&m, 3, &opts).unwrap();
        if full.value > t {
            prop_assert_eq!(early.direction, Direction::LowerBound);
            prop_assert!(early.value > t && early.value <= full.value + 1e-12);
            prop_assert!((w.deviation - early.value).abs() <= 1e-12);
        } else {
            prop_assert_eq!(early.value.to_bits(), full.value.to_bits());
            prop_assert_eq!(early.subsets_examined, full.subsets_examined);
            prop_assert_eq!(early.direction, Direction::ExactMax);
        }
    }
}
