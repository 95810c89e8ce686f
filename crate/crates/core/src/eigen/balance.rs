//! Diagonal similarity scaling by powers of two.

use num_traits::{One, Zero};

use crate::matrix::DenseMatrix;
use crate::scalar::{Real, Scalar};

/// Diagonal `D` of the similarity `A_b = D^-1 A D`.
#[derive(Debug, Clone, PartialEq)]
pub struct BalanceRecord<T> {
    pub scale: Vec<T>,
}

impl<T: Real> BalanceRecord<T> {
    pub fn identity(n: usize) -> Self {
        Self {
            scale: vec![T::one(); n],
        }
    }

    /// Maps an eigenvector of the balanced matrix to one of the original.
    pub fn apply<S: Scalar<Real = T>>(&self, x: &mut [S]) {
        for (v, &d) in x.iter_mut().zip(&self.scale) {
            *v = v.scale(d);
        }
    }
}

/// Balances in place and returns the scaling.
///
/// Each sweep compares the off-diagonal 1-norms of row and column `i` and
/// rescales by a power of two until they agree within a factor of two. Sweeps
/// repeat while some rescaling reduces `c + r` by at least 5%. No permutations
/// are applied: collocation operators are dense.
pub fn balance_in_place<S: Scalar>(a: &mut DenseMatrix<S>) -> BalanceRecord<S::Real> {
    let n = a.rows();
    let two = S::Real::from_f64(2.0);
    let four = S::Real::from_f64(4.0);
    let factor = S::Real::from_f64(0.95);
    let sfmin = S::Real::safe_min();
    let sfmax = S::Real::one() / sfmin;
    let mut scale = vec![S::Real::one(); n];
    let mut noconv = true;
    while noconv {
        noconv = false;
        for i in 0..n {
            let mut c = S::Real::zero();
            let mut r = S::Real::zero();
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs1();
                    r += a[(i, j)].abs1();
                }
            }
            if c == S::Real::zero() || r == S::Real::zero() {
                continue;
            }
            // Classic scheme: `c` tracks the column norm times f^2, so that
            // (c + r) / f is the new c + r after scaling column i by f and
            // row i by 1/f.
            let s = c + r;
            let mut f = S::Real::one();
            let g = r / two;
            while c < g && f < sfmax / four {
                f *= two;
                c *= four;
            }
            let g = r * two;
            while c >= g && f > sfmin * four {
                f /= two;
                c /= four;
            }
            if (c + r) / f >= factor * s {
                continue;
            }
            scale[i] *= f;
            noconv = true;
            let g = S::Real::one() / f;
            for v in a.row_mut(i) {
                *v = v.scale(g);
            }
            for j in 0..n {
                a[(j, i)] = a[(j, i)].scale(f);
            }
        }
    }
    BalanceRecord { scale }
}

/// Balanced copy of `a`.
pub fn balance<S: Scalar>(a: &DenseMatrix<S>) -> (DenseMatrix<S>, BalanceRecord<S::Real>) {
    let mut b = a.clone();
    let rec = balance_in_place(&mut b);
    (b, rec)
}
