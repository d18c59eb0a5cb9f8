use std::f64::consts::PI;

use proptest::prelude::*;
use sphere_l4::quadrature::build_grid;
use sphere_l4::random::{lambda4, monte_carlo_lambda4, sample_haar_unitary, CoefficientBasis};
use sphere_l4::runner::{random_onb, RandomOnbParams};
use sphere_l4::special::legendre_order_sweep;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn order_sweep_sums_to_dimension(k in 0usize..400, t in -1.0f64..=1.0) {
        let row = legendre_order_sweep(k, t).unwrap();
        let sum = row[0] * row[0] + 2.0 * row[1..].iter().map(|x| x * x).sum::<f64>();
        let expected = (2 * k + 1) as f64 / (4.0 * PI);
        prop_assert!((sum - expected).abs() <= 1e-12 * expected, "{sum} vs {expected}");
    }

    #[test]
    fn haar_samples_are_unitary(n in 1usize..40, seed in any::<u64>()) {
        let u = sample_haar_unitary(n, seed);
        prop_assert!(u.unitarity_defect() < 1e-12);
        prop_assert_eq!(u, sample_haar_unitary(n, seed));
    }

    // Cauchy-Schwarz on each function and on the pointwise sum give
    // N/(4π) <= Λ⁴ <= N²/(4π).
    #[test]
    fn lambda4_between_extremes(k in 1usize..12, seed in any::<u64>()) {
        let n = (2 * k + 1) as f64;
        let grid = build_grid(k, 1.0).unwrap();
        let basis = CoefficientBasis::from_unitary(k, &sample_haar_unitary(2 * k + 1, seed)).unwrap();
        let l4 = lambda4(&basis, &grid).unwrap();
        prop_assert!(l4 >= n / (4.0 * PI) * (1.0 - 1e-12));
        prop_assert!(l4 <= n * n / (4.0 * PI) * (1.0 + 1e-12));
    }
}

#[test]
fn monte_carlo_ignores_thread_count() {
    let grid = build_grid(6, 1.0).unwrap();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| monte_carlo_lambda4(6, 12, 99, &grid).unwrap())
    };
    let (a, b) = (run(1), run(4));
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    assert_eq!(a.values, b.values);
}

#[test]
fn random_onb_report_is_reproducible() {
    let p = RandomOnbParams {
        k: 5,
        trials: 6,
        seed: 3,
        oversample: 1.0,
        samples: 500,
    };
    let a = random_onb(&p).unwrap();
    let b = random_onb(&p).unwrap();
    assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
    let other = random_onb(&RandomOnbParams { seed: 4, ..p }).unwrap();
    assert_ne!(a.to_csv().unwrap(), other.to_csv().unwrap());
}
