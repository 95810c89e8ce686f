//! Householder reduction to upper Hessenberg form.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::matrix::DenseMatrix;
use crate::scalar::{Real, Scalar};

/// Reduced matrix `H = Q^H A Q` with `Q = P_0 P_1 ... P_{n-3}`.
///
/// `packed` holds `H` on and above the first subdiagonal and the tails of
/// the Householder vectors below it, LAPACK style: `P_k = I - tau_k u u^H`
/// with `u[k+1] = 1` and `u[k+2..]` stored in column `k`.
#[derive(Debug, Clone)]
pub struct Hessenberg<S: Scalar> {
    pub packed: DenseMatrix<S>,
    pub tau: Vec<S::Real>,
}

impl<S: Scalar> Hessenberg<S> {
    pub fn dimension(&self) -> usize {
        self.packed.rows()
    }

    /// Entry of `H`, zero below the subdiagonal.
    #[inline]
    pub fn h(&self, i: usize, j: usize) -> S {
        if i > j + 1 {
            S::zero()
        } else {
            self.packed[(i, j)]
        }
    }

    /// `H` with the reflector storage cleared.
    pub fn matrix(&self) -> DenseMatrix<S> {
        let n = self.dimension();
        DenseMatrix::from_fn(n, n, |i, j| self.h(i, j))
    }

    /// Overwrites `x` with `Q x`.
    pub fn apply_q(&self, x: &mut [Complex<S::Real>]) {
        let n = self.dimension();
        for k in (0..self.tau.len()).rev() {
            let tau = self.tau[k];
            if tau == S::Real::zero() {
                continue;
            }
            // s = u^H x
            let mut s = x[k + 1];
            for i in k + 2..n {
                s += self.packed[(i, k)].to_complex().conj() * x[i];
            }
            let s = s * tau;
            x[k + 1] -= s;
            for i in k + 2..n {
                x[i] -= self.packed[(i, k)].to_complex() * s;
            }
        }
    }

    /// The accumulated unitary `Q`, for tests and diagnostics.
    pub fn q(&self) -> DenseMatrix<Complex<S::Real>> {
        let n = self.dimension();
        let mut q = DenseMatrix::zeros(n, n);
        let mut col = vec![Complex::zero(); n];
        for j in 0..n {
            col.iter_mut().for_each(|c| *c = Complex::zero());
            col[j] = Complex::one();
            self.apply_q(&mut col);
            for i in 0..n {
                q[(i, j)] = col[i];
            }
        }
        q
    }
}

/// Reduces a square matrix to Hessenberg form by unitary similarity.
pub fn hessenberg_reduce<S: Scalar>(a: DenseMatrix<S>) -> Hessenberg<S> {
    assert!(a.is_square(), "Hessenberg reduction needs a square matrix");
    let n = a.rows();
    let mut h = a;
    let mut tau = Vec::with_capacity(n.saturating_sub(2));
    let mut u = vec![S::zero(); n];
    let mut w = vec![S::zero(); n];
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let alpha = h[(k + 1, k)];
        let mut xnorm = S::Real::zero();
        {
            let scale = (k + 2..n).fold(S::Real::zero(), |acc, i| Real::max(acc, h[(i, k)].modulus()));
            if scale > S::Real::zero() {
                let mut ss = S::Real::zero();
                for i in k + 2..n {
                    let r = h[(i, k)].modulus() / scale;
                    ss += r * r;
                }
                xnorm = scale * ss.sqrt();
            }
        }
        if xnorm == S::Real::zero() {
            tau.push(S::Real::zero());
            continue;
        }
        let amod = alpha.modulus();
        let norm = amod.hypot(xnorm);
        let phase = if amod == S::Real::zero() {
            S::one()
        } else {
            alpha.scale(S::Real::one() / amod)
        };
        let beta = -phase.scale(norm);
        let v0 = phase.scale(amod + norm);
        // u = x / v0 with u[0] = 1.
        let inv_v0 = S::one() / v0;
        u[0] = S::one();
        for i in 1..m {
            u[i] = h[(k + 1 + i, k)] * inv_v0;
        }
        let ratio = xnorm / (amod + norm);
        let t = S::Real::from_f64(2.0) / (S::Real::one() + ratio * ratio);
        h[(k + 1, k)] = beta;
        for i in 1..m {
            h[(k + 1 + i, k)] = u[i];
        }
        tau.push(t);

        // Left: rows k+1.., columns k+1.. ; w = u^H H, H -= tau u w.
        let c0 = k + 1;
        w[..n].iter_mut().for_each(|x| *x = S::zero());
        for i in 0..m {
            let ui = u[i].conj();
            let row = &h.row(c0 + i)[c0..];
            for (wj, &hij) in w[c0..n].iter_mut().zip(row) {
                *wj += ui * hij;
            }
        }
        for i in 0..m {
            let f = u[i].scale(t);
            let row = &mut h.row_mut(c0 + i)[c0..];
            for (hij, &wj) in row.iter_mut().zip(&w[c0..n]) {
                *hij -= f * wj;
            }
        }
        // Right: all rows, columns k+1.. ; H -= tau (H u) u^H.
        for r in 0..n {
            let row = &mut h.row_mut(r)[c0..];
            let mut s = S::zero();
            for (&hij, &uj) in row.iter().zip(&u[..m]) {
                s += hij * uj;
            }
            let s = s.scale(t);
            for (hij, &uj) in row.iter_mut().zip(&u[..m]) {
                *hij -= s * uj.conj();
            }
        }
    }
    Hessenberg { packed: h, tau }
}
