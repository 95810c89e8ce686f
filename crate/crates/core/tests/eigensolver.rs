use num_complex::Complex;
use ptspectra::eigen::{balance, hessenberg_reduce};
use ptspectra::{eigenvalues, inverse_iteration, DenseMatrix, DoubleDouble, Eigensystem, OperatorMatrix, PotentialSpec, Route};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = Complex<f64>;

fn random_matrix(n: usize, seed: u64) -> DenseMatrix<C> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DenseMatrix::from_fn(n, n, |_, _| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn sorted(mut w: Vec<C>) -> Vec<C> {
    w.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    w
}

/// Greedy nearest matching; returns the largest distance.
fn multiset_distance(a: &[C], b: &[C]) -> f64 {
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

#[test]
fn box_spectrum() {
    let op = OperatorMatrix::<f64>::build(&PotentialSpec::scarf2(0.0), 10.0, 512).unwrap();
    let w = sorted(eigenvalues(&op.matrix, Route::Auto).unwrap().eigenvalues);
    for (n, z) in w.iter().take(10).enumerate() {
        let exact = ((n + 1) as f64 * std::f64::consts::PI / 20.0).powi(2);
        assert!(((z.re - exact) / exact).abs() < 1e-10, "level {}: {z} vs {exact}", n + 1);
        assert_eq!(z.im, 0.0);
    }
}

#[test]
fn companion_roots() {
    // x^4 - 10x^3 + 35x^2 - 50x + 24 = (x-1)(x-2)(x-3)(x-4)
    let c = [24.0, -50.0, 35.0, -10.0];
    let a = DenseMatrix::from_fn(4, 4, |i, j| {
        if i == 0 {
            C::new(-c[3 - j], 0.0)
        } else if i == j + 1 {
            C::new(1.0, 0.0)
        } else {
            C::new(0.0, 0.0)
        }
    });
    let w = sorted(eigenvalues(&a, Route::Complex).unwrap().eigenvalues);
    for (k, z) in w.iter().enumerate() {
        assert!((z - C::new((k + 1) as f64, 0.0)).norm() < 1e-12, "{z}");
    }
}

#[test]
fn random_matrix_properties() {
    let n = 100;
    for seed in 0..3 {
        let a = random_matrix(n, seed);
        let norm = a.frobenius_norm();
        let sol = eigenvalues(&a, Route::Auto).unwrap();
        assert_eq!(sol.route, Route::Complex);
        let sum: C = sol.eigenvalues.iter().sum();
        assert!((sum - a.trace()).norm() < 1e-10 * norm * n as f64);
        let wt = eigenvalues(&a.transpose(), Route::Complex).unwrap().eigenvalues;
        assert!(multiset_distance(&sol.eigenvalues, &wt) < 1e-10 * norm);
        for &z in sol.eigenvalues.iter().step_by(17) {
            let v = inverse_iteration(&a, z).unwrap();
            assert!(v.residual < 1e-10, "residual {}", v.residual);
        }
    }
}

#[test]
fn repeated_runs_are_bitwise_identical() {
    let a = random_matrix(60, 11);
    let w1 = eigenvalues(&a, Route::Complex).unwrap().eigenvalues;
    let w2 = eigenvalues(&a, Route::Complex).unwrap().eigenvalues;
    assert!(w1.iter().zip(&w2).all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()));
}

#[test]
fn balancing_is_a_similarity() {
    let mut a = random_matrix(12, 3);
    // Badly scaled rows and columns.
    for i in 0..12 {
        let s = 2f64.powi(3 * i as i32 - 18);
        for j in 0..12 {
            a[(i, j)] *= s;
            a[(j, i)] /= s;
        }
    }
    let (b, rec) = balance(&a);
    assert!(b.frobenius_norm() < a.frobenius_norm());
    assert!(rec.scale.iter().all(|d| d.log2().fract() == 0.0));
    // A D x = D B x for any x.
    let x: Vec<C> = (0..12).map(|k| C::new(k as f64, 1.0)).collect();
    let mut dx = x.clone();
    rec.apply(&mut dx);
    let lhs = a.matvec(&dx);
    let mut rhs = b.matvec(&x);
    rec.apply(&mut rhs);
    for (l, r) in lhs.iter().zip(&rhs) {
        assert!((l - r).norm() <= 1e-12 * l.norm().max(1.0));
    }
}

#[test]
fn hessenberg_preserves_spectrum() {
    let a = random_matrix(30, 5);
    let h = hessenberg_reduce(a.clone()).matrix();
    for i in 2..30 {
        for j in 0..i - 1 {
            assert_eq!(h[(i, j)], C::new(0.0, 0.0));
        }
    }
    let w1 = eigenvalues(&a, Route::Complex).unwrap().eigenvalues;
    let w2 = eigenvalues(&h, Route::Complex).unwrap().eigenvalues;
    assert!(multiset_distance(&w1, &w2) < 1e-11 * a.frobenius_norm());
}

#[test]
fn real_and_complex_routes_agree() {
    let spec = PotentialSpec::scarf2(30.0);
    let op = OperatorMatrix::<f64>::build(&spec, 10.0, 127).unwrap();
    let real = eigenvalues(&op.matrix, Route::PtReal).unwrap();
    let cplx = eigenvalues(&op.matrix, Route::Complex).unwrap();
    assert_eq!(real.route, Route::PtReal);
    // Low-lying eigenvalues are well conditioned.
    let low: Vec<C> = sorted(real.eigenvalues.clone()).into_iter().take(40).collect();
    for z in &low {
        let d = cplx.eigenvalues.iter().map(|y| (y - z).norm()).fold(f64::INFINITY, f64::min);
        assert!(d < 1e-8 * z.norm().max(1.0), "{z}: {d}");
    }
}

#[test]
fn real_route_requires_centro_hermitian_matrix() {
    let a = random_matrix(8, 1);
    assert!(Eigensystem::new(&a, Route::PtReal).is_err());
    let odd = OperatorMatrix::<f64>::build(&PotentialSpec::scarf2(1.0), 5.0, 10).unwrap();
    assert_eq!(odd.dimension() % 2, 1);
    assert_eq!(Eigensystem::new(&odd.matrix, Route::Auto).unwrap().route(), Route::Complex);
}

#[test]
fn rejects_bad_input() {
    let rect = DenseMatrix::<C>::zeros(3, 4);
    assert!(eigenvalues(&rect, Route::Auto).is_err());
    let mut a = random_matrix(4, 2);
    a[(1, 2)] = C::new(f64::NAN, 0.0);
    assert!(eigenvalues(&a, Route::Auto).is_err());
}

#[test]
fn extended_precision_residuals() {
    let n = 50;
    let a64 = random_matrix(n, 7);
    let a = a64.map(|z| Complex::new(DoubleDouble::from_f64(z.re), DoubleDouble::from_f64(z.im)));
    let system = Eigensystem::new(&a, Route::Complex).unwrap();
    let sol = system.eigenvalues().unwrap();
    let w64 = eigenvalues(&a64, Route::Complex).unwrap().eigenvalues;
    let wdd = sol.eigenvalues_f64();
    assert!(multiset_distance(&wdd, &w64) < 1e-11 * a64.frobenius_norm());
    for &z in sol.eigenvalues.iter().step_by(5) {
        let v = system.eigenvector(z).unwrap();
        assert!(v.residual < 1e-24, "residual {:e}", v.residual);
    }
}

#[test]
fn box_ground_state_is_a_sine() {
    let l = 10.0;
    let op = OperatorMatrix::<f64>::build(&PotentialSpec::scarf2(0.0), l, 128).unwrap();
    let system = Eigensystem::new(&op.matrix, Route::Auto).unwrap();
    let w = sorted(system.eigenvalues().unwrap().eigenvalues);
    let v = system.eigenvector(w[0]).unwrap();
    for (x, psi) in op.nodes().iter().zip(&v.vector) {
        let exact = (std::f64::consts::PI * (x + l) / (2.0 * l)).sin();
        assert!((psi - C::new(exact, 0.0)).norm() < 1e-8, "x={x}: {psi} vs {exact}");
    }
    assert_eq!(v.vector.iter().filter(|z| **z == C::new(1.0, 0.0)).count(), 1);
}
