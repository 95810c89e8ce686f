//! Single-shift QR on a complex upper Hessenberg matrix, eigenvalues only.
//! Structured after LAPACK's `zlahqr` with `wantt = wantz = false`.

use num_complex::Complex;
use num_traits::Zero;

use super::{IterationStats, DAT1, EXCEPTIONAL_PERIOD};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::{complex_to_f64, csqrt, Real, Scalar};

#[inline]
fn cabs1<T: Real>(z: Complex<T>) -> T {
    z.re.abs() + z.im.abs()
}

/// Eigenvalues of the complex upper Hessenberg matrix `h`, which is destroyed.
pub fn complex_hessenberg_eigenvalues<T: Real>(
    h: &mut DenseMatrix<Complex<T>>,
    max_iter: usize,
) -> Result<(Vec<Complex<T>>, IterationStats)> {
    let n = h.rows();
    let zero = T::zero();
    let czero = Complex::new(zero, zero);
    let mut w = vec![czero; n];
    let mut stats = IterationStats::default();
    if n == 0 {
        return Ok((w, stats));
    }
    if n == 1 {
        w[0] = h[(0, 0)];
        return Ok((w, stats));
    }
    for j in 0..n.saturating_sub(3) {
        h[(j + 2, j)] = czero;
        h[(j + 3, j)] = czero;
    }
    if n >= 3 {
        h[(n - 1, n - 3)] = czero;
    }
    // Make the subdiagonal real by a diagonal unitary similarity.
    for i in 1..n {
        let z = h[(i, i - 1)];
        if z.im != zero {
            let m = z.norm_sqr().sqrt();
            let sc = z.conj().unscale(m);
            h[(i, i - 1)] = Complex::new(m, zero);
            for v in &mut h.row_mut(i)[i..] {
                *v *= sc;
            }
            let sc = sc.conj();
            for r in 0..=(i + 1).min(n - 1) {
                h[(r, i)] *= sc;
            }
        }
    }

    let ulp = T::epsilon();
    let safmin = T::safe_min();
    let smlnum = safmin * (T::from_usize(n) / ulp);
    let dat1 = T::from_f64(DAT1);
    let half = T::from_f64(0.5);

    let mut i = n as isize - 1;
    let mut kdefl = 0usize;
    while i >= 0 {
        let iu = i as usize;
        let mut l = 0usize;
        let mut converged = false;
        for its in 0..=max_iter {
            let mut k = iu;
            while k > l {
                let hk = cabs1(h[(k, k - 1)]);
                if hk <= smlnum {
                    break;
                }
                let mut tst = cabs1(h[(k - 1, k - 1)]) + cabs1(h[(k, k)]);
                if tst == zero {
                    if k >= 2 {
                        tst += h[(k - 1, k - 2)].re.abs();
                    }
                    if k + 1 < n {
                        tst += h[(k + 1, k)].re.abs();
                    }
                }
                if h[(k, k - 1)].re.abs() <= ulp * tst {
                    let hkk1 = cabs1(h[(k - 1, k)]);
                    let ab = hk.max(hkk1);
                    let ba = hk.min(hkk1);
                    let d = cabs1(h[(k - 1, k - 1)] - h[(k, k)]);
                    let hkk = cabs1(h[(k, k)]);
                    let aa = hkk.max(d);
                    let bb = hkk.min(d);
                    let s = aa + ab;
                    if ba * (ab / s) <= smlnum.max(ulp * (bb * (aa / s))) {
                        break;
                    }
                }
                k -= 1;
            }
            l = k;
            if l > 0 {
                h[(l, l - 1)] = czero;
            }
            if l >= iu {
                stats.record(its);
                converged = true;
                break;
            }
            kdefl += 1;
            let (i1, i2) = (l, iu);

            let t: Complex<T>;
            if kdefl % (2 * EXCEPTIONAL_PERIOD) == 0 {
                let s = dat1 * h[(iu, iu - 1)].re.abs();
                t = h[(iu, iu)] + Complex::new(s, zero);
                stats.exceptional_shifts += 1;
            } else if kdefl % EXCEPTIONAL_PERIOD == 0 {
                let s = dat1 * h[(l + 1, l)].re.abs();
                t = h[(l, l)] + Complex::new(s, zero);
                stats.exceptional_shifts += 1;
            } else {
                // Wilkinson shift: eigenvalue of the trailing 2x2 closer to h[i][i].
                let mut tt = h[(iu, iu)];
                let u = csqrt(h[(iu - 1, iu)]) * csqrt(h[(iu, iu - 1)]);
                let s = cabs1(u);
                if s != zero {
                    let x = (h[(iu - 1, iu - 1)] - tt).scale(half);
                    let sx = cabs1(x);
                    let s = s.max(sx);
                    let xs = x.unscale(s);
                    let us = u.unscale(s);
                    let mut y = csqrt(xs * xs + us * us).scale(s);
                    if sx > zero {
                        let xn = x.unscale(sx);
                        if xn.re * y.re + xn.im * y.im < zero {
                            y = -y;
                        }
                    }
                    tt -= u * (u / (x + y));
                }
                t = tt;
            }

            // Look for two consecutive small subdiagonal elements.
            let mut m = iu - 1;
            let (mut v0, mut v1);
            loop {
                let h11 = h[(m, m)];
                let h22 = h[(m + 1, m + 1)];
                let mut h11s = h11 - t;
                let mut h21 = h[(m + 1, m)].re;
                let s = cabs1(h11s) + h21.abs();
                h11s = h11s.unscale(s);
                h21 /= s;
                v0 = h11s;
                v1 = Complex::new(h21, zero);
                if m == l {
                    break;
                }
                let h10 = h[(m, m - 1)].re;
                if h10.abs() * h21.abs() <= ulp * (cabs1(h11s) * (cabs1(h11) + cabs1(h22))) {
                    break;
                }
                m -= 1;
            }

            // Single-shift QR sweep.
            for k in m..iu {
                if k > m {
                    v0 = h[(k, k - 1)];
                    v1 = h[(k + 1, k - 1)];
                }
                let t1 = reflector(&mut v0, &mut v1);
                if k > m {
                    h[(k, k - 1)] = v0;
                    h[(k + 1, k - 1)] = czero;
                }
                let v2 = v1;
                let t2 = (t1 * v2).re;
                {
                    let (r0, rest) = h.as_mut_slice()[k * n..].split_at_mut(n);
                    let r1 = &mut rest[..n];
                    let t1c = t1.conj();
                    for j in k..=i2 {
                        let sum = t1c * r0[j] + r1[j].scale(t2);
                        r0[j] -= sum;
                        r1[j] -= sum * v2;
                    }
                }
                let v2c = v2.conj();
                for j in i1..=(k + 2).min(iu) {
                    let row = h.row_mut(j);
                    let sum = t1 * row[k] + row[k + 1].scale(t2);
                    row[k] -= sum;
                    row[k + 1] -= sum * v2c;
                }
                if k == m && m > l {
                    // The first reflector leaves H(m+1, m) complex; rescale
                    // to keep the subdiagonal real.
                    let one_minus = Complex::new(T::one(), zero) - t1;
                    let temp = one_minus.unscale(one_minus.norm_sqr().sqrt());
                    h[(m + 1, m)] *= temp.conj();
                    if m + 2 <= iu {
                        h[(m + 2, m + 1)] *= temp;
                    }
                    for j in m..=iu {
                        if j != m + 1 {
                            if i2 > j {
                                for v in &mut h.row_mut(j)[j + 1..=i2] {
                                    *v *= temp;
                                }
                            }
                            let tc = temp.conj();
                            for r in i1..j {
                                h[(r, j)] *= tc;
                            }
                        }
                    }
                }
            }

            let z = h[(iu, iu - 1)];
            if z.im != zero {
                let rtemp = z.norm_sqr().sqrt();
                h[(iu, iu - 1)] = Complex::new(rtemp, zero);
                let temp = z.unscale(rtemp);
                for r in i1..iu {
                    h[(r, iu)] *= temp;
                }
            }
        }
        if !converged {
            let done: Vec<Complex<f64>> = w[iu + 1..].iter().map(|&z| complex_to_f64(z)).collect();
            return Err(Error::ConvergenceFailure {
                index: iu,
                iterations: max_iter,
                converged: done,
            });
        }
        w[iu] = h[(iu, iu)];
        kdefl = 0;
        i = l as isize - 1;
    }
    Ok((w, stats))
}

/// Complex elementary reflector for a 2-vector, as in `zlarfg`:
/// `H^H [alpha; x] = [beta; 0]` with `H = I - tau [1; v][1; v]^H`.
/// On return `alpha` holds `beta` (real) and `x` holds `v`.
fn reflector<T: Real>(alpha: &mut Complex<T>, x: &mut Complex<T>) -> Complex<T> {
    let zero = T::zero();
    let xnorm = x.re.hypot(x.im);
    let (ar, ai) = (alpha.re, alpha.im);
    if xnorm == zero && ai == zero {
        return Complex::zero();
    }
    let beta = -(ar.hypot(ai).hypot(xnorm)).copysign(ar);
    let tau = Complex::new((beta - ar) / beta, -ai / beta);
    let inv = Complex::new(T::one(), zero) / (*alpha - Complex::new(beta, zero));
    *x = *x * inv;
    *alpha = Complex::new(beta, zero);
    tau
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::hessenberg::hessenberg_reduce;

    fn eig(a: DenseMatrix<Complex<f64>>) -> Vec<Complex<f64>> {
        let n = a.rows();
        let mut h = hessenberg_reduce(a).matrix();
        let (mut w, _) = complex_hessenberg_eigenvalues(&mut h, 40 * n.max(10)).unwrap();
        w.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
        w
    }

    fn nearest(w: &[Complex<f64>], z: Complex<f64>) -> f64 {
        w.iter().map(|x| (x - z).norm()).fold(f64::INFINITY, f64::min)
    }

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn rotation() {
        let a = DenseMatrix::from_row_major(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]);
        let w = eig(a);
        assert!(nearest(&w, c(0.0, -1.0)) < 1e-15);
        assert!(nearest(&w, c(0.0, 1.0)) < 1e-15);
    }

    #[test]
    fn triangular_gives_diagonal() {
        let d = [c(3.0, 1.0), c(-2.0, 0.5), c(0.25, -4.0), c(1.0, 1.0)];
        let a = DenseMatrix::from_fn(4, 4, |i, j| {
            if i == j {
                d[i]
            } else if j > i {
                c((i + j) as f64, 1.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let w = eig(a);
        let mut e = d.to_vec();
        e.sort_by(|x, y| x.re.total_cmp(&y.re));
        for (x, y) in w.iter().zip(e) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn companion_cube_roots() {
        let z = c(0.0, 0.0);
        let o = c(1.0, 0.0);
        let a = DenseMatrix::from_row_major(3, 3, vec![z, z, o, o, z, z, z, o, z]);
        let w = eig(a);
        let s = 3f64.sqrt() / 2.0;
        for y in [c(-0.5, -s), c(-0.5, s), c(1.0, 0.0)] {
            assert!(nearest(&w, y) < 1e-12, "{y} missing from {w:?}");
        }
    }
}
