use num_complex::Complex64;
use proptest::prelude::*;
use ptspectra::{estimate_balmer, parse_two_column, richardson, RichardsonTable};

// Real parts of the first nine long-range bound states and the printed
// k^2 Re E_k column.
const RE: [f64; 9] = [0.83298288, 1.38356468, 1.19465086, 0.89645517, 0.66476032, 0.50352322, 0.39157331, 0.31203794, 0.25397318];
const RE_SCALED: [f64; 9] = [0.83298, 5.53426, 10.7519, 14.3433, 16.6190, 18.1268, 19.1871, 19.9704, 20.5718];
const IM: [f64; 9] = [3.90859038, 2.10981263, 1.06386938, 0.56168819, 0.32272930, 0.20043182, 0.13250064, 0.09200917, 0.06644330];

fn close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol
}

#[test]
fn printed_first_order_entries() {
    let r = richardson(&RE_SCALED, 1).unwrap();
    assert!(close(r[0], 10.23554, 1e-9));
    assert!(close(r[1], 21.18718, 1e-9));
    let r2 = richardson(&RE_SCALED, 2).unwrap();
    assert!(close(r2[0], 26.663, 1e-9));
    // Printed: 10.2355, 21.1871, 26.6628.
    assert!(close(r2[0], 26.6628, 5e-4));
}

#[test]
fn fifth_order_uses_alternating_signs() {
    let r = richardson(&RE_SCALED, 5).unwrap();
    // Printed value 24.2927; a `+k^5 a_k` last term would give 24.3059.
    assert!(close(r[0], 24.2920, 1e-4), "{}", r[0]);
    assert!(close(r[0], 24.2927, 1e-3));
}

#[test]
fn full_precision_inputs_reproduce_deepest_entries() {
    let a: Vec<f64> = RE.iter().enumerate().map(|(i, x)| ((i + 1) as f64).powi(2) * x).collect();
    let t = RichardsonTable::new(&a).unwrap();
    assert_eq!(t.max_order(), 5);
    assert!(close(*t.column(5).unwrap().last().unwrap(), 25.05998971533651, 1e-9));
    assert!(close(*t.column(4).unwrap().last().unwrap(), 25.119935783334466, 1e-9));
}

#[test]
fn balmer_constants_from_tabulated_states() {
    let e: Vec<Complex64> = RE.iter().zip(IM).map(|(&r, i)| Complex64::new(r, i)).collect();
    let est = estimate_balmer(&e).unwrap();
    assert!((24.0..=26.0).contains(&est.alpha), "alpha {}", est.alpha);
    assert!((60.0..=63.0).contains(&est.beta), "beta {}", est.beta);
    assert!(close(est.alpha, 25.05998971533651, 1e-9));
    assert!(close(est.beta, 60.92309019633103, 1e-9));
    assert!(close(est.alpha_spread, 25.119935783334466 - 25.05998971533651, 1e-9));
    assert!(close(est.beta_spread, 61.17211399499987 - 60.92309019633103, 1e-9));
}

#[test]
fn balmer_ignores_order_and_conjugation() {
    let mut e: Vec<Complex64> = RE.iter().zip(IM).map(|(&r, i)| Complex64::new(r, -i)).collect();
    e.reverse();
    let est = estimate_balmer(&e).unwrap();
    assert!(close(est.alpha, 25.05998971533651, 1e-9));
    assert!(est.ordered[0].im.abs() > est.ordered[1].im.abs());
}

#[test]
fn synthetic_balmer_sequence_is_exact() {
    let e: Vec<Complex64> = (1..=9)
        .map(|k| {
            let k = k as f64;
            Complex64::new(25.0 / (k * k), 61.0 / (k * k * k))
        })
        .collect();
    let est = estimate_balmer(&e).unwrap();
    assert!((est.alpha - 25.0).abs() < 1e-10);
    assert!((est.beta - 61.0).abs() < 1e-10);
}

#[test]
fn two_column_input() {
    let text: String = RE.iter().zip(IM).map(|(r, i)| format!("{r} {i}\n")).collect();
    let e = parse_two_column(&text).unwrap();
    assert_eq!(e.len(), 9);
    assert_eq!(e[3], Complex64::new(0.89645517, 0.56168819));
}

proptest! {
    #[test]
    fn exact_on_polynomials_in_inverse_k(order in 1usize..=5, c in prop::collection::vec(-10.0f64..10.0, 6), len in 6usize..=20) {
        let a: Vec<f64> = (1..=len)
            .map(|k| (0..=order).map(|i| c[i] / (k as f64).powi(i as i32)).sum())
            .collect();
        let max = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for r in richardson(&a, order).unwrap() {
            // The (k+j)^m weights amplify rounding by about 2^m len^m / m!.
            let amp = (2.0 * len as f64).powi(order as i32);
            prop_assert!((r - c[0]).abs() < 1e-13 * amp * max.max(1.0), "{} vs {}", r, c[0]);
        }
    }

    #[test]
    fn shift_invariance(order in 1usize..=5, a in prop::collection::vec(-5.0f64..5.0, 6..12), shift in -100.0f64..100.0) {
        let b: Vec<f64> = a.iter().map(|x| x + shift).collect();
        let ra = richardson(&a, order).unwrap();
        let rb = richardson(&b, order).unwrap();
        prop_assert_eq!(ra.len(), a.len() - order);
        let amp = (2.0 * a.len() as f64).powi(order as i32);
        for (x, y) in ra.iter().zip(&rb) {
            prop_assert!((y - x - shift).abs() < 1e-13 * amp * 100.0);
        }
    }
}
