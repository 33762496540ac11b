//! Property tests of the measurement utilities.

use proptest::prelude::*;

use exdisc::spectra::{sv_merge, weyl_fit, SpectrumReport};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Merging is invariant under permutation of the per-mode inputs.
    #[test]
    fn sv_merge_permutation_invariant(
        lists in proptest::collection::vec(
            proptest::collection::vec(1e-6f64..1e3, 1..6),
            1..8,
        ),
        shift in 0usize..7,
    ) {
        let mut per: Vec<(usize, Vec<f64>)> = lists
            .into_iter()
            .enumerate()
            .map(|(m, mut v)| {
                v.sort_by(|a, b| b.total_cmp(a));
                (m, v)
            })
            .collect();
        let base = sv_merge(&per, "t");
        let k = shift % per.len();
        per.rotate_left(k);
        let rotated = sv_merge(&per, "t");
        prop_assert_eq!(base.values(), rotated.values());
    }

    /// The fit recovers a synthetic power law C * l^{-alpha}.
    #[test]
    fn weyl_fit_recovers_power_law(
        alpha in 0.5f64..3.5,
        c in 0.1f64..10.0,
    ) {
        let per: Vec<(usize, Vec<f64>)> = (0..1)
            .map(|m| {
                (m, (1..=400).map(|l| c * (l as f64).powf(-alpha)).collect())
            })
            .collect();
        let series = sv_merge(&per, "t");
        let fit = weyl_fit(&series, None).unwrap();
        prop_assert!((fit.slope + alpha).abs() < 1e-6);
        prop_assert!((fit.constant - c).abs() < 1e-4 * c);
    }

    /// Counting functions are nondecreasing and consistent with the list.
    #[test]
    fn counting_function_monotone(
        evs in proptest::collection::vec(-5.0f64..5.0, 1..40),
    ) {
        let rep = SpectrumReport::from_modes(&[(0, {
            let mut v = evs.clone();
            v.sort_by(f64::total_cmp);
            v
        })]);
        let thresholds: Vec<f64> = (0..11).map(|i| -5.0 + i as f64).collect();
        let counts = rep.counting_function(&thresholds).unwrap();
        prop_assert!(counts.windows(2).all(|w| w[1] >= w[0]));
        prop_assert_eq!(*counts.last().unwrap(), evs.len());
    }
}
