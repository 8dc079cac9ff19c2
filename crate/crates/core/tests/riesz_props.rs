use grushin::hermite::{BasisSpec, MultiIndex, SpectralField};
use grushin::riesz::{
    apply_riesz, apply_truncated_riesz, riesz_multiplier, truncated_factor, vector_riesz, Eigenvalue, TruncationWindow,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn index(n: usize) -> impl Strategy<Value = MultiIndex> {
    prop::collection::vec(0usize..12, n).prop_map(|v| MultiIndex::new(&v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn squared_multipliers_sum_to_two((n, a) in (1usize..6).prop_flat_map(|n| (Just(n), index(n)))) {
        let mut sum = 0.0;
        for j in 0..n {
            for star in [false, true] {
                let m = riesz_multiplier(&a, j, n, star);
                prop_assert!(m <= 2f64.sqrt() + 1e-15);
                sum += m * m;
            }
        }
        prop_assert!((sum - 2.0).abs() <= 1e-14);
    }

    #[test]
    fn truncated_factor_is_a_monotone_fraction(nu in 0.01f64..400.0, e1 in 1e-3f64..1.0, e2 in 1e-3f64..1.0) {
        let nu = Eigenvalue::new(nu).unwrap();
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let a = truncated_factor(nu, TruncationWindow::new(lo).unwrap());
        let b = truncated_factor(nu, TruncationWindow::new(hi).unwrap());
        prop_assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b));
        prop_assert!(a + 1e-15 >= b);
    }

    #[test]
    fn truncation_never_increases_norm(
        l in 0.1f64..4.0,
        eps in 0.01f64..1.0,
        raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..20),
        j in 0usize..2,
    ) {
        let spec = BasisSpec::new(2, l, 5).unwrap();
        let f = SpectralField::from_coeffs(
            spec,
            MultiIndex::enumerate(2, 5).into_iter().zip(&raw).map(|(a, &(re, im))| (a, Complex64::new(re, im))),
        ).unwrap();
        let w = TruncationWindow::new(eps).unwrap();
        for star in [false, true] {
            let full = apply_riesz(&f, j, star).unwrap();
            let cut = apply_truncated_riesz(&f, j, star, w).unwrap();
            prop_assert!(cut.norm() <= full.norm() * (1.0 + 1e-14));
            prop_assert!(full.norm() <= 2f64.sqrt() * f.norm() * (1.0 + 1e-14));
        }
    }

    #[test]
    fn riesz_sees_only_the_sign_free_frequency(
        l in 0.1f64..4.0,
        raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..10),
    ) {
        let build = |lambda: f64| {
            let spec = BasisSpec::new(1, lambda, 9).unwrap();
            SpectralField::from_coeffs(
                spec,
                MultiIndex::enumerate(1, 9).into_iter().zip(&raw).map(|(a, &(re, im))| (a, Complex64::new(re, im))),
            ).unwrap()
        };
        let (pos, neg) = (build(l), build(-l));
        for star in [false, true] {
            let a = apply_riesz(&pos, 0, star).unwrap();
            let b = apply_riesz(&neg, 0, star).unwrap();
            for (k, c) in a.iter() {
                prop_assert_eq!(*c, b.get(k));
            }
        }
        let total: f64 = vector_riesz(&pos).iter().map(|g| g.norm_sqr()).sum();
        prop_assert!((total - 2.0 * pos.norm_sqr()).abs() <= 1e-12 * pos.norm_sqr().max(1e-300));
    }
}
