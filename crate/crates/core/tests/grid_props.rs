use grushin::grid::{Axis, GridFunction};
use grushin::grushin::Grushin;
use grushin::sweep::{sweep_lp_norm, trial_ratio, Family, GridSpec, SweepConfig, SweepOp};
use grushin::Execution;
use num_complex::Complex64;
use proptest::prelude::*;

fn bump(c: f64, w: f64, k: f64) -> impl Fn(&[f64]) -> Complex64 {
    move |p: &[f64]| {
        let r = (p[0] - c) * (p[0] - c) / w + p[1] * p[1] / 2.0;
        Complex64::new((-r).exp() * (1.0 + k * p[1]), 0.0)
    }
}

fn grid(c: f64, w: f64, k: f64) -> GridFunction {
    let axes = vec![Axis::new(-8.0, 8.0, 65).unwrap(), Axis::centered(32, 0.4).unwrap()];
    GridFunction::from_fn(axes, bump(c, w, k))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn real_inputs_give_conjugate_slices(c in -1.0f64..1.0, w in 0.5f64..3.0, k in -0.5f64..0.5) {
        let s = Grushin::sequential().slices(&grid(c, w, k)).unwrap();
        let scale = s.energy().sqrt();
        for (i, &l) in s.lambdas.iter().enumerate() {
            let m = s.lambdas.iter().position(|&x| (x + l).abs() < 1e-12).expect("mirrored frequency");
            for (a, v) in s.slices[i].iter() {
                prop_assert!((v.conj() - s.slices[m].get(a)).norm() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn slicing_accounts_for_every_unit_of_energy(c in -1.0f64..1.0, w in 0.5f64..3.0, k in -0.5f64..0.5) {
        let g = Grushin::sequential();
        let f = grid(c, w, k);
        let s = g.slices(&f).unwrap();
        let total = sweep_lp_norm(&f, 2.0).powi(2);
        prop_assert!((s.energy() + s.discarded_energy - total).abs() <= 1e-12 * total);
        // what the expansions drop is exactly what the round trip loses
        let back = g.assemble(&s).unwrap();
        let lost = sweep_lp_norm(&back.sub(&f).unwrap(), 2.0);
        prop_assert!((lost - s.discarded_energy.sqrt()).abs() <= 1e-6 * total.sqrt());
    }

    #[test]
    fn grid_files_round_trip(c in -1.0f64..1.0, w in 0.5f64..3.0, k in -0.5f64..0.5) {
        let f = grid(c, w, k).map(|v| v * Complex64::new(1.0, -0.25));
        let mut buf = Vec::new();
        f.write_to(&mut buf).unwrap();
        let g = GridFunction::read_from(buf.as_slice()).unwrap();
        prop_assert_eq!(g.grid_hash(), f.grid_hash());
        prop_assert_eq!(g.values, f.values);
    }

    #[test]
    fn modes_agree_bit_for_bit(c in -1.0f64..1.0, w in 0.5f64..3.0) {
        let f = grid(c, w, 0.2);
        let seq = Grushin { exec: Execution::Sequential, ..Grushin::default() };
        let par = Grushin { exec: Execution::Parallel, ..Grushin::default() };
        prop_assert_eq!(seq.vector_magnitude(&f).unwrap().values, par.vector_magnitude(&f).unwrap().values);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn trials_reproduce_from_seed(seed in any::<u64>(), trial in 0usize..5, n in 1usize..3) {
        let config = SweepConfig {
            seed,
            grid: GridSpec { budget: 1 << 12, ..GridSpec::default() },
            op: SweepOp::Vector,
            family: Family::BumpMix,
            ..SweepConfig::default()
        };
        let a = trial_ratio(&config, n, 4.0, trial).unwrap();
        let b = trial_ratio(&config, n, 4.0, trial).unwrap();
        prop_assert_eq!(a.to_bits(), b.to_bits());
        prop_assert!(a >= 0.0);
    }
}
