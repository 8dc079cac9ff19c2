use grushin::hermite::{
    analyze, apply_ladder, apply_semigroup, synthesize, BasisSpec, Ladder, MultiIndex, QuadratureGrid, SpectralField,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn lambda() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.5), Just(1.0), Just(2.0), Just(-1.0), 0.2f64..3.0]
}

/// Random field with `|α| ≤ degree` in `n` dimensions.
fn field(n: usize, degree: usize, lambda: f64, raw: &[(f64, f64)]) -> SpectralField {
    let spec = BasisSpec::new(n, lambda, degree).unwrap();
    let alphas = MultiIndex::enumerate(n, degree);
    let coeffs = alphas.into_iter().zip(raw.iter().cycle()).map(|(a, &(re, im))| (a, Complex64::new(re, im)));
    SpectralField::from_coeffs(spec, coeffs).unwrap()
}

fn coeffs() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..12)
}

fn max_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    a.sub(b).iter().map(|(_, c)| c.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multi_index_shift_and_lower(entries in prop::collection::vec(0usize..6, 1..4), j in 0usize..3) {
        let a = MultiIndex::new(&entries);
        let j = j % a.dim();
        prop_assert_eq!(a.order(), entries.iter().sum::<usize>());
        let up = a.shift(j);
        prop_assert_eq!(up.get(j), a.get(j) + 1);
        prop_assert_eq!(up.order(), a.order() + 1);
        prop_assert_eq!(up.lower(j), Some(a.clone()));
        prop_assert_eq!(a.lower(j).is_some(), a.get(j) >= 1);
    }

    #[test]
    fn basis_size_is_binomial(n in 1usize..4, degree in 0usize..9) {
        let spec = BasisSpec::new(n, 1.0, degree).unwrap();
        prop_assert_eq!(spec.size(), MultiIndex::enumerate(n, degree).len());
        let binom = (1..=n).fold(1usize, |acc, k| acc * (degree + k) / k);
        prop_assert_eq!(spec.size(), binom);
    }

    #[test]
    fn semigroup_composes(n in 1usize..3, l in lambda(), r in 0.0f64..1.0, s in 0.0f64..1.0, raw in coeffs()) {
        let f = field(n, 5, l, &raw);
        let two = apply_semigroup(&apply_semigroup(&f, r).unwrap(), s).unwrap();
        let one = apply_semigroup(&f, r + s).unwrap();
        prop_assert!(max_diff(&two, &one) <= 1e-15);
    }

    #[test]
    fn ladders_rebuild_the_eigenvalue(n in 1usize..4, l in lambda(), raw in coeffs()) {
        let f = field(n, 4, l, &raw);
        let nu_f = f.map_coeffs(|a, c| c * f.spec.eigenvalue(a));
        let mut acc = SpectralField::new(f.spec.with_degree(5));
        for j in 0..n {
            let ca = apply_ladder(&apply_ladder(&f, j, Ladder::Annihilation).unwrap(), j, Ladder::Creation).unwrap();
            let ac = apply_ladder(&apply_ladder(&f, j, Ladder::Creation).unwrap(), j, Ladder::Annihilation).unwrap();
            for (a, c) in ca.iter().chain(ac.iter()) {
                let prev = acc.get(a);
                acc.insert(a.clone(), prev + c * 0.5).unwrap();
            }
        }
        let scale = nu_f.iter().map(|(_, c)| c.norm()).fold(1.0, f64::max);
        for (a, c) in acc.iter() {
            prop_assert!((c - nu_f.get(a)).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn analyze_inverts_synthesize(n in 1usize..3, l in lambda(), raw in coeffs()) {
        let f = field(n, 6, l, &raw);
        let grid = QuadratureGrid::for_basis(&f.spec).unwrap();
        let samples = synthesize(&f, &grid.points());
        let back = analyze(&samples, &grid, &f.spec).unwrap();
        prop_assert!(max_diff(&back, &f) <= 1e-10);
    }

    #[test]
    fn parseval_on_a_fine_trapezoid(l in prop_oneof![Just(0.5), Just(1.0), Just(2.0)], raw in coeffs()) {
        let f = field(1, 6, l, &raw);
        let grid = QuadratureGrid::uniform(&[(-14.0, 14.0, 1401)]);
        let values = synthesize(&f, &grid.points());
        let l2: f64 = values.iter().zip(&grid.weights[0]).map(|(v, w)| w * v.norm_sqr()).sum();
        prop_assert!((l2 - f.norm_sqr()).abs() <= 1e-10 * f.norm_sqr().max(1.0));
    }
}
