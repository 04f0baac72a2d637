//! Discrete pipeline against exact continuum solutions on random potentials.

use landscape_lab::continuum::{continuum_count, continuum_eigenvalues, continuum_landscape};
use landscape_lab::discretize::assemble;
use landscape_lab::landscape::landscape;
use landscape_lab::linalg::{lowest_eigenvalues, sturm_count};
use landscape_lab::potential::{generate, Distribution};
use proptest::prelude::*;

fn dist() -> impl Strategy<Value = Distribution> {
    prop_oneof![
        (0.2f64..0.9, 0.5f64..50.0).prop_map(|(p, v)| Distribution::Bernoulli { p_zero: p, vmax: v }),
        (0.0f64..2.0, 0.0f64..8.0).prop_map(|(lo, w)| Distribution::Uniform { lo, hi: lo + w }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn discrete_converges_to_continuum(d in dist(), len in 3usize..40, seed in any::<u64>()) {
        let pot = generate(d, len, 1.0, seed).unwrap();
        let lc = continuum_eigenvalues(&pot, 3).unwrap();
        let mut errs = Vec::new();
        for m in [32, 64] {
            let t = assemble(&pot, m).unwrap();
            let lh = lowest_eigenvalues(&t, 3, 1e-13).unwrap().eigenvalues;
            errs.push((lh[0] - lc[0]).abs() / lc[0]);
            prop_assert!(lh.iter().zip(&lc).all(|(a, b)| (a - b).abs() / b < 5e-3));
        }
        prop_assert!(errs[1] < errs[0] || errs[1] < 1e-9);
    }

    #[test]
    fn landscape_matches_exact_at_nodes(d in dist(), len in 2usize..30, seed in any::<u64>()) {
        let pot = generate(d, len, 1.0, seed).unwrap();
        let exact = continuum_landscape(&pot);
        let res = landscape(&assemble(&pot, 64).unwrap()).unwrap();
        let scale = exact.max().1;
        for (x, u) in res.x.iter().zip(&res.u) {
            prop_assert!((u - exact.eval(*x)).abs() <= 2e-3 * scale);
        }
    }

    #[test]
    fn ratio_bound_and_counts(d in dist(), len in 2usize..30, seed in any::<u64>(), k in 0.01f64..100.0) {
        let pot = generate(d, len, k, seed).unwrap();
        let l = continuum_eigenvalues(&pot, 4).unwrap();
        let u = continuum_landscape(&pot).max().1;
        prop_assert!(l[0] * u > 1.0 && l[0] * u < landscape_lab::VOGT_UPPER);
        // pairs split by less than the bisection width cannot be separated
        for (i, w) in l.windows(2).enumerate().filter(|(_, w)| w[1] - w[0] > 1e-9 * w[1]) {
            let mid = 0.5 * (w[0] + w[1]);
            prop_assert_eq!(continuum_count(&pot, mid), i + 1);
        }
        let t = assemble(&pot, 32).unwrap();
        let lh = lowest_eigenvalues(&t, 4, 1e-13).unwrap().eigenvalues;
        if lh[2] - lh[1] > 1e-9 * lh[2] {
            prop_assert_eq!(sturm_count(&t, 0.5 * (lh[1] + lh[2])), 2);
        }
    }

    #[test]
    fn stronger_coupling_lowers_landscape(d in dist(), len in 2usize..30, seed in any::<u64>(), k in 0.01f64..10.0) {
        let weak = generate(d, len, k, seed).unwrap();
        let strong = weak.with_coupling(2.0 * k);
        let (a, b) = (continuum_landscape(&weak), continuum_landscape(&strong));
        for i in 0..=4 * len {
            let x = i as f64 / 4.0;
            prop_assert!(b.eval(x) <= a.eval(x) * (1.0 + 1e-10) + 1e-14);
        }
        let la = continuum_eigenvalues(&weak, 1).unwrap()[0];
        let lb = continuum_eigenvalues(&strong, 1).unwrap()[0];
        prop_assert!(lb >= la);
    }
}
