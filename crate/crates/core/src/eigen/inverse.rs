//! Shifted inverse iteration on a Hessenberg matrix.

use num_complex::Complex;
use num_traits::Zero;

use crate::scalar::{Real, Scalar};

use super::hessenberg::Hessenberg;

/// Fixed start-vector stream: a 64-bit linear congruential generator
/// (Knuth's MMIX constants) seeded with 42, one complex entry per pair of
/// draws, each component uniform on `[-0.5, 0.5)`.
pub fn start_vector<T: Real>(n: usize) -> Vec<Complex<T>> {
    let mut state: u64 = 42;
    let mut next = || {
        state = state
            .wrapping_mul(6_364_136_223_846_793_005)
            .wrapping_add(1_442_695_040_888_963_407);
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    (0..n)
        .map(|_| {
            let re = next();
            let im = next();
            Complex::new(T::from_f64(re), T::from_f64(im))
        })
        .collect()
}

/// LU factors of `H - sigma I` with adjacent-row partial pivoting. The upper
/// factor keeps the full row-major layout; multipliers live in `mult`.
pub(crate) struct ShiftedLu<T: Real> {
    u: Vec<Complex<T>>,
    n: usize,
    mult: Vec<Complex<T>>,
    swapped: Vec<bool>,
}

impl<T: Real> ShiftedLu<T> {
    /// Factors `H - sigma I`. Pivots smaller than `tiny` are replaced by
    /// `tiny`, so an exact eigenvalue shift still yields a usable solve.
    pub(crate) fn new<S: Scalar<Real = T>>(hess: &Hessenberg<S>, sigma: Complex<T>, tiny: T) -> Self {
        let n = hess.dimension();
        let mut u = vec![Complex::zero(); n * n];
        for i in 0..n {
            let lo = i.saturating_sub(1);
            for j in lo..n {
                u[i * n + j] = hess.h(i, j).to_complex();
            }
            u[i * n + i] -= sigma;
        }
        let mut mult = vec![Complex::zero(); n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let tiny_c = Complex::new(tiny, T::zero());
        for k in 0..n.saturating_sub(1) {
            let (top, rest) = u[k * n..].split_at_mut(n);
            let next = &mut rest[..n];
            if next[k].abs1() > top[k].abs1() {
                for j in k..n {
                    std::mem::swap(&mut top[j], &mut next[j]);
                }
                swapped[k] = true;
            }
            if top[k].abs1() <= tiny {
                top[k] = tiny_c;
            }
            let l = next[k] / top[k];
            mult[k] = l;
            next[k] = Complex::zero();
            for j in k + 1..n {
                let t = top[j];
                next[j] -= l * t;
            }
        }
        if n > 0 && u[n * n - 1].abs1() <= tiny {
            u[n * n - 1] = tiny_c;
        }
        Self { u, n, mult, swapped }
    }

    /// Solves `(H - sigma I) y = x` in place.
    pub(crate) fn solve(&self, x: &mut [Complex<T>]) {
        let n = self.n;
        for k in 0..n.saturating_sub(1) {
            if self.swapped[k] {
                x.swap(k, k + 1);
            }
            let t = x[k];
            x[k + 1] -= self.mult[k] * t;
        }
        for i in (0..n).rev() {
            let row = &self.u[i * n..(i + 1) * n];
            let mut s = x[i];
            for j in i + 1..n {
                s -= row[j] * x[j];
            }
            x[i] = s / row[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::hessenberg::hessenberg_reduce;
    use crate::matrix::DenseMatrix;

    #[test]
    fn start_vector_is_fixed() {
        let a: Vec<Complex<f64>> = start_vector(5);
        let b: Vec<Complex<f64>> = start_vector(5);
        assert_eq!(a, b);
        assert!(a.iter().all(|z| z.re.abs() <= 0.5 && z.im.abs() <= 0.5));
        assert_ne!(a[0], a[1]);
    }

    #[test]
    fn lu_solve_matches_matvec() {
        let n = 6;
        let a = DenseMatrix::from_fn(n, n, |i, j| ((i * 5 + j * 3) % 7) as f64 - 3.0 + if i == j { 0.5 } else { 0.0 });
        let hess = hessenberg_reduce(a);
        let hm = hess.matrix().map(|x| Complex::new(x, 0.0));
        let sigma = Complex::new(0.3, -0.7);
        let lu = ShiftedLu::new(&hess, sigma, 1e-300);
        let b: Vec<Complex<f64>> = start_vector(n);
        let mut y = b.clone();
        lu.solve(&mut y);
        let mut r = hm.matvec(&y);
        for i in 0..n {
            r[i] -= sigma * y[i];
            assert!((r[i] - b[i]).norm() < 1e-12);
        }
    }
}
