//! Francis double-shift QR on a real upper Hessenberg matrix, eigenvalues
//! only. Structured after LAPACK's `dlahqr` with `wantt = wantz = false`.

use num_complex::Complex;

use super::{IterationStats, DAT1, DAT2, EXCEPTIONAL_PERIOD};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Real;

/// Eigenvalues of the real upper Hessenberg matrix `h`, which is destroyed.
///
/// Complex eigenvalues come out as exact conjugate pairs. `max_iter` bounds
/// the iterations spent on any one deflation.
pub fn real_hessenberg_eigenvalues<T: Real>(
    h: &mut DenseMatrix<T>,
    max_iter: usize,
) -> Result<(Vec<Complex<T>>, IterationStats)> {
    let n = h.rows();
    let zero = T::zero();
    let mut wr = vec![zero; n];
    let mut wi = vec![zero; n];
    let mut stats = IterationStats::default();
    if n == 0 {
        return Ok((Vec::new(), stats));
    }
    if n == 1 {
        return Ok((vec![Complex::new(h[(0, 0)], zero)], stats));
    }
    for j in 0..n.saturating_sub(3) {
        h[(j + 2, j)] = zero;
        h[(j + 3, j)] = zero;
    }
    if n >= 3 {
        h[(n - 1, n - 3)] = zero;
    }
    let ulp = T::epsilon();
    let safmin = T::safe_min();
    let smlnum = safmin * (T::from_usize(n) / ulp);
    let dat1 = T::from_f64(DAT1);
    let dat2 = T::from_f64(DAT2);
    let half = T::from_f64(0.5);

    // Active block is rows/columns l..=i.
    let mut i = n as isize - 1;
    let mut kdefl = 0usize;
    while i >= 0 {
        let iu = i as usize;
        let mut l = 0usize;
        let mut converged = false;
        for its in 0..=max_iter {
            // Look for a single small subdiagonal element.
            let mut k = iu;
            while k > l {
                let hk = h[(k, k - 1)].abs();
                if hk <= smlnum {
                    break;
                }
                let mut tst = h[(k - 1, k - 1)].abs() + h[(k, k)].abs();
                if tst == zero {
                    if k >= 2 {
                        tst += h[(k - 1, k - 2)].abs();
                    }
                    if k + 1 < n {
                        tst += h[(k + 1, k)].abs();
                    }
                }
                // Conservative small-subdiagonal test of Ahues and Tisseur.
                if hk <= ulp * tst {
                    let hkk1 = h[(k - 1, k)].abs();
                    let ab = hk.max(hkk1);
                    let ba = hk.min(hkk1);
                    let d = (h[(k - 1, k - 1)] - h[(k, k)]).abs();
                    let hkk = h[(k, k)].abs();
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
                h[(l, l - 1)] = zero;
            }
            if l + 1 >= iu {
                stats.record(its);
                converged = true;
                break;
            }
            kdefl += 1;
            let (i1, i2) = (l, iu);

            // Shifts.
            let (h11, h12, h21, h22);
            if kdefl % (2 * EXCEPTIONAL_PERIOD) == 0 {
                let s = h[(iu, iu - 1)].abs() + h[(iu - 1, iu - 2)].abs();
                h11 = dat1 * s + h[(iu, iu)];
                h12 = dat2 * s;
                h21 = s;
                h22 = h11;
                stats.exceptional_shifts += 1;
            } else if kdefl % EXCEPTIONAL_PERIOD == 0 {
                let s = h[(l + 1, l)].abs() + h[(l + 2, l + 1)].abs();
                h11 = dat1 * s + h[(l, l)];
                h12 = dat2 * s;
                h21 = s;
                h22 = h11;
                stats.exceptional_shifts += 1;
            } else {
                h11 = h[(iu - 1, iu - 1)];
                h21 = h[(iu, iu - 1)];
                h12 = h[(iu - 1, iu)];
                h22 = h[(iu, iu)];
            }
            let s = h11.abs() + h12.abs() + h21.abs() + h22.abs();
            let (rt1r, rt1i, rt2r, rt2i);
            if s == zero {
                rt1r = zero;
                rt1i = zero;
                rt2r = zero;
                rt2i = zero;
            } else {
                let (h11, h12, h21, h22) = (h11 / s, h12 / s, h21 / s, h22 / s);
                let tr = (h11 + h22) * half;
                let det = (h11 - tr) * (h22 - tr) - h12 * h21;
                let rtdisc = det.abs().sqrt();
                if det >= zero {
                    rt1r = tr * s;
                    rt2r = rt1r;
                    rt1i = rtdisc * s;
                    rt2i = -rt1i;
                } else {
                    // Two real shifts; use the one closer to h22 twice.
                    let a = tr + rtdisc;
                    let b = tr - rtdisc;
                    let r = if (a - h22).abs() <= (b - h22).abs() { a * s } else { b * s };
                    rt1r = r;
                    rt2r = r;
                    rt1i = zero;
                    rt2i = zero;
                }
            }

            // Look for two consecutive small subdiagonal elements.
            let mut v = [zero; 3];
            let mut m = iu - 2;
            loop {
                let h21s = h[(m + 1, m)];
                let s = (h[(m, m)] - rt2r).abs() + rt2i.abs() + h21s.abs();
                let h21s = h21s / s;
                v[0] = h21s * h[(m, m + 1)] + (h[(m, m)] - rt1r) * ((h[(m, m)] - rt2r) / s) - rt1i * (rt2i / s);
                v[1] = h21s * (h[(m, m)] + h[(m + 1, m + 1)] - rt1r - rt2r);
                v[2] = h21s * h[(m + 2, m + 1)];
                let s = v[0].abs() + v[1].abs() + v[2].abs();
                v[0] /= s;
                v[1] /= s;
                v[2] /= s;
                if m == l {
                    break;
                }
                let h00 = h[(m, m - 1)].abs() * (v[1].abs() + v[2].abs());
                let h01 = v[0].abs() * (h[(m - 1, m - 1)].abs() + h[(m, m)].abs() + h[(m + 1, m + 1)].abs());
                if h00 <= ulp * h01 {
                    break;
                }
                m -= 1;
            }

            // Double-shift QR sweep.
            for k in m..iu {
                let nr = 3.min(iu - k + 1);
                if k > m {
                    for r in 0..nr {
                        v[r] = h[(k + r, k - 1)];
                    }
                }
                let t1 = householder(&mut v[..nr]);
                if k > m {
                    h[(k, k - 1)] = v[0];
                    h[(k + 1, k - 1)] = zero;
                    if k + 2 < iu + 1 && nr == 3 {
                        h[(k + 2, k - 1)] = zero;
                    }
                } else if m > l {
                    // Equivalent to negating H(k, k-1), robust when v[1..]
                    // underflows.
                    h[(k, k - 1)] *= T::one() - t1;
                }
                let v2 = v[1];
                let t2 = t1 * v2;
                if nr == 3 {
                    let v3 = v[2];
                    let t3 = t1 * v3;
                    {
                        let (r0, rest) = h.as_mut_slice()[k * n..].split_at_mut(n);
                        let (r1, rest) = rest.split_at_mut(n);
                        let r2 = &mut rest[..n];
                        for j in k..=i2 {
                            let sum = r0[j] + v2 * r1[j] + v3 * r2[j];
                            r0[j] -= sum * t1;
                            r1[j] -= sum * t2;
                            r2[j] -= sum * t3;
                        }
                    }
                    for j in i1..=(k + 3).min(iu) {
                        let row = h.row_mut(j);
                        let sum = row[k] + v2 * row[k + 1] + v3 * row[k + 2];
                        row[k] -= sum * t1;
                        row[k + 1] -= sum * t2;
                        row[k + 2] -= sum * t3;
                    }
                } else if nr == 2 {
                    {
                        let (r0, rest) = h.as_mut_slice()[k * n..].split_at_mut(n);
                        let r1 = &mut rest[..n];
                        for j in k..=i2 {
                            let sum = r0[j] + v2 * r1[j];
                            r0[j] -= sum * t1;
                            r1[j] -= sum * t2;
                        }
                    }
                    for j in i1..=iu {
                        let row = h.row_mut(j);
                        let sum = row[k] + v2 * row[k + 1];
                        row[k] -= sum * t1;
                        row[k + 1] -= sum * t2;
                    }
                }
            }
        }
        if !converged {
            let done: Vec<Complex<f64>> = ((iu + 1)..n)
                .map(|j| Complex::new(wr[j].to_f64(), wi[j].to_f64()))
                .collect();
            return Err(Error::ConvergenceFailure {
                index: iu,
                iterations: max_iter,
                converged: done,
            });
        }
        if l == iu {
            wr[iu] = h[(iu, iu)];
            wi[iu] = zero;
        } else {
            let (a, b, c, d) = (h[(iu - 1, iu - 1)], h[(iu - 1, iu)], h[(iu, iu - 1)], h[(iu, iu)]);
            let (e1, e2) = standardize_2x2(a, b, c, d);
            wr[iu - 1] = e1.re;
            wi[iu - 1] = e1.im;
            wr[iu] = e2.re;
            wi[iu] = e2.im;
        }
        kdefl = 0;
        i = l as isize - 1;
    }
    Ok((wr.into_iter().zip(wi).map(|(r, i)| Complex::new(r, i)).collect(), stats))
}

/// Elementary reflector `I - tau [1; v] [1; v]^T` mapping `x` onto a multiple
/// of `e_1`. On return `x[0]` holds that multiple and `x[1..]` the tail of
/// the reflector vector.
fn householder<T: Real>(x: &mut [T]) -> T {
    let zero = T::zero();
    let alpha = x[0];
    let mut xnorm = zero;
    for &v in &x[1..] {
        xnorm = xnorm.hypot(v);
    }
    if xnorm == zero {
        return zero;
    }
    let beta = -alpha.hypot(xnorm).copysign(alpha);
    let tau = (beta - alpha) / beta;
    let scal = T::one() / (alpha - beta);
    for v in &mut x[1..] {
        *v *= scal;
    }
    x[0] = beta;
    tau
}

/// Eigenvalues of the real 2x2 block `[[a, b], [c, d]]`, computed as in
/// LAPACK's `dlanv2`: a complex pair is returned exactly conjugate, and the
/// real case avoids cancellation.
pub fn standardize_2x2<T: Real>(mut a: T, mut b: T, mut c: T, mut d: T) -> (Complex<T>, Complex<T>) {
    let zero = T::zero();
    let one = T::one();
    let half = T::from_f64(0.5);
    let eps = T::epsilon();
    let sign = |x: T| if x >= zero { one } else { -one };
    if c == zero {
    } else if b == zero {
        std::mem::swap(&mut a, &mut d);
        b = -c;
        c = zero;
    } else if a - d == zero && sign(b) != sign(c) {
    } else {
        let temp = a - d;
        let mut p = half * temp;
        let bcmax = b.abs().max(c.abs());
        let bcmis = b.abs().min(c.abs()) * sign(b) * sign(c);
        let scale = p.abs().max(bcmax);
        let mut z = (p / scale) * p + (bcmax / scale) * bcmis;
        if z >= T::from_f64(4.0) * eps {
            // Real eigenvalues.
            z = p + (scale.sqrt() * z.sqrt()).copysign(p);
            a = d + z;
            d = d - (bcmax / z) * bcmis;
            b = b - c;
            c = zero;
        } else {
            // Complex or nearly equal real eigenvalues: equalize the diagonal.
            let sigma = b + c;
            let tau = sigma.hypot(temp);
            let cs = (half * (one + sigma.abs() / tau)).sqrt();
            let sn = -(p / (tau * cs)) * sign(sigma);
            let aa = a * cs + b * sn;
            let bb = -a * sn + b * cs;
            let cc = c * cs + d * sn;
            let dd = -c * sn + d * cs;
            a = aa * cs + cc * sn;
            b = bb * cs + dd * sn;
            c = -aa * sn + cc * cs;
            d = -bb * sn + dd * cs;
            let temp = half * (a + d);
            a = temp;
            d = temp;
            if c != zero {
                if b != zero {
                    if sign(b) == sign(c) {
                        // Real eigenvalues after all.
                        let sab = b.abs().sqrt();
                        let sac = c.abs().sqrt();
                        p = (sab * sac).copysign(c);
                        a = temp + p;
                        d = temp - p;
                        b = b - c;
                        c = zero;
                    }
                } else {
                    b = -c;
                    c = zero;
                }
            }
        }
    }
    let _ = b;
    if c == zero {
        (Complex::new(a, zero), Complex::new(d, zero))
    } else {
        let im = b.abs().sqrt() * c.abs().sqrt();
        (Complex::new(a, im), Complex::new(d, -im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eig(a: &DenseMatrix<f64>) -> Vec<Complex<f64>> {
        let mut h = super::super::hessenberg::hessenberg_reduce(a.clone()).matrix();
        let (mut w, _) = real_hessenberg_eigenvalues(&mut h, 40 * a.rows().max(10)).unwrap();
        w.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
        w
    }

    #[test]
    fn rotation() {
        let a = DenseMatrix::from_row_major(2, 2, vec![0.0, 1.0, -1.0, 0.0]);
        let w = eig(&a);
        assert_eq!(w, vec![Complex::new(0.0, -1.0), Complex::new(0.0, 1.0)]);
    }

    #[test]
    fn cube_roots_of_unity() {
        let a = DenseMatrix::from_row_major(3, 3, vec![0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let w = eig(&a);
        let s = 3f64.sqrt() / 2.0;
        let expected = [Complex::new(-0.5, -s), Complex::new(-0.5, s), Complex::new(1.0, 0.0)];
        for (x, y) in w.iter().zip(expected) {
            assert!((x - y).norm() < 1e-12, "{x} vs {y}");
        }
        assert_eq!(w[0], w[1].conj());
    }

    #[test]
    fn two_by_two_blocks() {
        let (a, b) = standardize_2x2(1.0, 2.0, 3.0, 4.0);
        let disc = (33.0f64).sqrt();
        let mut r = [a.re, b.re];
        r.sort_by(f64::total_cmp);
        assert!((r[0] - (5.0 - disc) / 2.0).abs() < 1e-14);
        assert!((r[1] - (5.0 + disc) / 2.0).abs() < 1e-14);
        let (a, b) = standardize_2x2(1.0, -4.0, 1.0, 1.0);
        assert_eq!(a, b.conj());
        assert!((a.re - 1.0).abs() < 1e-15 && (a.im.abs() - 2.0).abs() < 1e-15);
        let (a, b) = standardize_2x2(2.0, 5.0, 0.0, 3.0);
        assert_eq!((a, b), (Complex::new(2.0, 0.0), Complex::new(3.0, 0.0)));
    }
}
