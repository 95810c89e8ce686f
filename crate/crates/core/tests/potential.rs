use num_complex::Complex64;
use proptest::prelude::*;
use ptspectra::potential::STEP_HALF_WIDTH;
use ptspectra::{build_grid, evaluate, evaluate_on_grid, Family, PotentialSpec, TabulatedPotential};

fn families() -> impl Strategy<Value = Family> {
    prop::sample::select(Family::BUILTIN.to_vec())
}

proptest! {
    #[test]
    fn odd_and_imaginary(family in families(), a in -50.0f64..50.0, x in -40.0f64..40.0) {
        prop_assume!(x != 0.0 && (x.abs() - STEP_HALF_WIDTH).abs() > 1e-12);
        let spec = PotentialSpec::new(family, a).unwrap();
        let v: Complex64 = evaluate(&spec, x).unwrap();
        let w: Complex64 = evaluate(&spec, -x).unwrap();
        prop_assert_eq!(v.re, 0.0);
        prop_assert_eq!(w, -v);
    }

    #[test]
    fn linear_in_strength(family in families(), a in -20.0f64..20.0, x in -10.0f64..10.0) {
        let one: Complex64 = evaluate(&PotentialSpec::new(family, 1.0).unwrap(), x).unwrap();
        let v: Complex64 = evaluate(&PotentialSpec::new(family, a).unwrap(), x).unwrap();
        prop_assert!((v - one * a).norm() <= 1e-14 * v.norm().max(1.0));
    }

    #[test]
    fn interpolation_stays_between_samples(t in 0.0f64..1.0) {
        let table = TabulatedPotential::new(
            vec![-1.0, 0.0, 2.0],
            vec![Complex64::new(0.0, -1.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 3.0)],
        ).unwrap();
        let spec = PotentialSpec::custom(table, 1.0).unwrap();
        let x = 2.0 * t;
        let v: Complex64 = evaluate(&spec, x).unwrap();
        prop_assert!((v - Complex64::new(1.0 - t, 3.0 * t)).norm() < 1e-14);
    }
}

#[test]
fn decays_far_away() {
    for family in Family::BUILTIN {
        let spec = PotentialSpec::new(family, 30.0).unwrap();
        let v: Complex64 = evaluate(&spec, 1e6).unwrap();
        assert!(v.norm() < 1e-4, "{family}: {v}");
    }
}

#[test]
fn odd_grid_never_samples_the_step_discontinuity() {
    let grid = build_grid(10.0f64, 1023).unwrap();
    assert!(grid.nodes().iter().all(|&x| x != 0.0));
    let spec = PotentialSpec::new(Family::Step, 3.0).unwrap();
    let v: Vec<Complex64> = evaluate_on_grid(&spec, &grid);
    assert!(v.iter().all(|z| z.im == 0.0 || z.im.abs() == 3.0));
}

#[test]
fn rejects_non_finite_points() {
    let spec = PotentialSpec::scarf2(1.0);
    assert!(evaluate::<f64>(&spec, f64::NAN).is_err());
    assert!(evaluate::<f64>(&spec, f64::INFINITY).is_err());
}
