//! Dirichlet-restricted collocation matrix of `H = -d²/dx² + V(x)`.

use std::io::{Read, Write};

use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use crate::chebdiff::{build_diff_matrices, build_grid, DiffMatrices, Grid};
use crate::error::{invalid, Result};
use crate::matrix::DenseMatrix;
use crate::potential::{evaluate_on_grid, PotentialSpec};
use crate::scalar::Real;

/// Assembled operator on the `N - 1` interior nodes.
#[derive(Debug, Clone)]
pub struct OperatorMatrix<T: Real> {
    pub matrix: DenseMatrix<Complex<T>>,
    pub grid: Grid<T>,
    pub spec: PotentialSpec,
}

/// Deletes the boundary rows and columns of `-d2` and adds `V` on the
/// diagonal.
pub fn assemble<T: Real>(grid: &Grid<T>, diff: &DiffMatrices<T>, spec: &PotentialSpec) -> Result<OperatorMatrix<T>> {
    let n = grid.n();
    if diff.d2.rows() != n + 1 || diff.d2.cols() != n + 1 {
        return Err(invalid(format!(
            "differentiation matrices are {}x{}, grid has {} nodes",
            diff.d2.rows(),
            diff.d2.cols(),
            n + 1
        )));
    }
    let v = evaluate_on_grid(spec, grid);
    let m = n - 1;
    let zero = T::zero();
    let mut matrix = DenseMatrix::zeros(m, m);
    for i in 0..m {
        let src = &diff.d2.row(i + 1)[1..n];
        let dst = matrix.row_mut(i);
        for (d, &s) in dst.iter_mut().zip(src) {
            *d = Complex::new(-s, zero);
        }
        dst[i] += v[i + 1];
    }
    Ok(OperatorMatrix {
        matrix,
        grid: grid.clone(),
        spec: spec.clone(),
    })
}

impl<T: Real> OperatorMatrix<T> {
    /// Grid, differentiation matrices and assembly in one step.
    pub fn build(spec: &PotentialSpec, half_width: f64, n: usize) -> Result<Self> {
        let grid = build_grid(T::from_f64(half_width), n)?;
        let diff = build_diff_matrices(&grid);
        assemble(&grid, &diff, spec)
    }

    pub fn dimension(&self) -> usize {
        self.matrix.rows()
    }

    /// Interior nodes, aligned with matrix rows.
    pub fn nodes(&self) -> &[T] {
        self.grid.interior()
    }

    pub fn hermiticity_report(&self) -> HermiticityReport {
        hermiticity_report(self)
    }

    /// Largest entry of `J conj(A) J - A`, where `J` reverses the node order.
    ///
    /// For an imaginary odd potential on a symmetric grid this is pure
    /// rounding in the collocation weights.
    pub fn centro_hermitian_defect(&self) -> f64 {
        centro_hermitian_defect(&self.matrix)
    }

    /// Real matrix unitarily similar to the centro-Hermitian part of the
    /// operator, or `None` when that part is not a faithful replacement
    /// (odd dimension, or a defect above `tolerance * ||A||_F`).
    pub fn pt_real_form(&self, tolerance: f64) -> Option<PtRealForm<T>> {
        let n = self.dimension();
        if n % 2 != 0 || n == 0 {
            return None;
        }
        let norm = self.matrix.frobenius_norm().to_f64();
        if self.centro_hermitian_defect() > tolerance * norm {
            return None;
        }
        Some(PtRealForm::new(&self.matrix))
    }

    /// Writes the matrix as raw row-major little-endian `(re, im)` pairs,
    /// each component 8 bytes (double) or 16 bytes (extended: high word then
    /// low word). There is no header; the order follows from the file size.
    pub fn dump(&self, out: &mut impl Write) -> std::io::Result<()> {
        write_matrix(&self.matrix, out)
    }
}

/// Largest entry of `|J conj(A) J - A|` (real and imaginary parts summed).
pub fn centro_hermitian_defect<T: Real>(a: &DenseMatrix<Complex<T>>) -> f64 {
    let n = a.rows();
    let mut worst = 0.0f64;
    for i in 0..n {
        let row = a.row(i);
        let mirror = a.row(n - 1 - i);
        for j in 0..n {
            let (z, w) = (row[j], mirror[n - 1 - j]);
            let d = (z.re - w.re).to_f64().abs() + (z.im + w.im).to_f64().abs();
            worst = worst.max(d);
        }
    }
    worst
}

/// Maps a vector of the real form back to the original basis: `v = U w`.
pub fn pt_back_map<T: Real>(w: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = w.len();
    let m = n / 2;
    let s = T::one() / T::from_f64(2.0).sqrt();
    let mut v = vec![Complex::zero(); n];
    for k in 0..m {
        let top = w[k];
        let bot = w[m + k];
        let ib = Complex::new(-bot.im, bot.re);
        v[k] = (top + ib) * s;
        v[n - 1 - k] = (top - ib) * s;
    }
    v
}

pub fn write_matrix<T: Real>(m: &DenseMatrix<Complex<T>>, out: &mut impl Write) -> std::io::Result<()> {
    let mut buf = Vec::with_capacity(m.cols() * 2 * T::BYTES);
    for i in 0..m.rows() {
        buf.clear();
        for z in m.row(i) {
            z.re.write_le(&mut buf);
            z.im.write_le(&mut buf);
        }
        out.write_all(&buf)?;
    }
    Ok(())
}

/// Reads a dump written by [`write_matrix`] with the same scalar width.
pub fn read_matrix<T: Real>(input: &mut impl Read) -> Result<DenseMatrix<Complex<T>>> {
    let mut bytes = Vec::new();
    input
        .read_to_end(&mut bytes)
        .map_err(|e| invalid(format!("reading matrix dump: {e}")))?;
    let entry = 2 * T::BYTES;
    if bytes.len() % entry != 0 {
        return Err(invalid(format!("dump length {} is not a multiple of {entry}", bytes.len())));
    }
    let count = bytes.len() / entry;
    let n = (count as f64).sqrt().round() as usize;
    if n * n != count {
        return Err(invalid(format!("dump holds {count} entries, not a square matrix")));
    }
    let data = bytes
        .chunks_exact(entry)
        .map(|c| Complex::new(T::read_le(&c[..T::BYTES]), T::read_le(&c[T::BYTES..])))
        .collect();
    Ok(DenseMatrix::from_row_major(n, n, data))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HermiticityReport {
    /// `max |Re a_ij - Re a_ji|`.
    pub real_asymmetry: f64,
    /// `max |Im a_ij|` over `i != j`.
    pub imag_off_diagonal: f64,
    /// `max |Im a_ii|`.
    pub imag_diagonal: f64,
}

pub fn hermiticity_report<T: Real>(op: &OperatorMatrix<T>) -> HermiticityReport {
    let a = &op.matrix;
    let n = a.rows();
    let mut r = HermiticityReport {
        real_asymmetry: 0.0,
        imag_off_diagonal: 0.0,
        imag_diagonal: 0.0,
    };
    for i in 0..n {
        for j in 0..n {
            let z = a[(i, j)];
            if i == j {
                r.imag_diagonal = r.imag_diagonal.max(z.im.to_f64().abs());
            } else {
                r.imag_off_diagonal = r.imag_off_diagonal.max(z.im.to_f64().abs());
                r.real_asymmetry = r.real_asymmetry.max((z.re - a[(j, i)].re).to_f64().abs());
            }
        }
    }
    r
}

/// Real form of a centro-Hermitian matrix.
///
/// With `J` the `m x m` exchange matrix and
/// `U = [[I, iI], [J, -iJ]] / sqrt 2`, a matrix of order `2m` satisfying
/// `J conj(A) J = A` has `U^H A U` real. Writing `B = A12 J`, that real matrix
/// is `[[Re(A11 + B), -Im(A11 - B)], [Im(A11 + B), Re(A11 - B)]]`.
#[derive(Debug, Clone)]
pub struct PtRealForm<T: Real> {
    pub matrix: DenseMatrix<T>,
}

impl<T: Real> PtRealForm<T> {
    /// Builds the real form from the centro-Hermitian part
    /// `(A + J conj(A) J) / 2`.
    pub fn new(a: &DenseMatrix<Complex<T>>) -> Self {
        let n = a.rows();
        let m = n / 2;
        let half = T::from_f64(0.5);
        let sym = |i: usize, j: usize| {
            let z = a[(i, j)];
            let w = a[(n - 1 - i, n - 1 - j)];
            Complex::new((z.re + w.re) * half, (z.im - w.im) * half)
        };
        let mut t = DenseMatrix::zeros(n, n);
        for i in 0..m {
            for j in 0..m {
                let a11 = sym(i, j);
                // (A12 J)_{ij} = A12_{i, m-1-j} = A_{i, 2m-1-j}
                let b = sym(i, n - 1 - j);
                let p = a11 + b;
                let q = a11 - b;
                t[(i, j)] = p.re;
                t[(i, m + j)] = -q.im;
                t[(m + i, j)] = p.im;
                t[(m + i, m + j)] = q.re;
            }
        }
        Self { matrix: t }
    }

    /// Maps a vector of the real form back to the original basis.
    pub fn to_original(&self, w: &[Complex<T>]) -> Vec<Complex<T>> {
        pt_back_map(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Family;

    fn op(family: Family, a: f64, l: f64, n: usize) -> OperatorMatrix<f64> {
        OperatorMatrix::build(&PotentialSpec::new(family, a).unwrap(), l, n).unwrap()
    }

    #[test]
    fn dimensions_and_mismatch() {
        let o = op(Family::Scarf2, 1.0, 10.0, 4);
        assert_eq!(o.dimension(), 3);
        let g = build_grid(10.0, 8).unwrap();
        let d = build_diff_matrices(&build_grid(10.0, 6).unwrap());
        assert!(assemble(&g, &d, &PotentialSpec::scarf2(1.0)).is_err());
    }

    #[test]
    fn diagonal_carries_potential() {
        let o = op(Family::Scarf2, 30.0, 10.0, 1023);
        let peak = (1.0 + 2f64.sqrt()).ln();
        let (i, _) = o
            .nodes()
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - peak).abs().total_cmp(&(b.1 - peak).abs()))
            .unwrap();
        let z = o.matrix[(i, i)];
        assert!((z.im - 15.0).abs() < 1e-3, "{z}");
        let g = build_grid(10.0, 1023).unwrap();
        let d = build_diff_matrices(&g);
        assert_eq!(z.re, -d.d2[(i + 1, i + 1)]);
    }

    #[test]
    fn imaginary_part_is_diagonal() {
        for fam in Family::BUILTIN {
            let r = op(fam, 30.0, 10.0, 63).hermiticity_report();
            assert_eq!(r.imag_off_diagonal, 0.0);
            assert!(r.imag_diagonal > 0.0);
        }
        let r = op(Family::Rational4, 0.0, 10.0, 63).hermiticity_report();
        assert_eq!(r.imag_diagonal, 0.0);
    }

    #[test]
    fn real_asymmetry_is_that_of_second_derivative() {
        let g = build_grid(100.0, 512).unwrap();
        let d = build_diff_matrices(&g);
        let o = assemble(&g, &d, &PotentialSpec::new(Family::Rational3, 30.0).unwrap()).unwrap();
        let mut expected = 0.0f64;
        for i in 1..512 {
            for j in 1..512 {
                if i != j {
                    expected = expected.max((d.d2[(i, j)] - d.d2[(j, i)]).abs());
                }
            }
        }
        assert_eq!(o.hermiticity_report().real_asymmetry, expected);
        assert!(expected > 0.0);
    }

    #[test]
    fn real_form_is_similar() {
        let o = op(Family::Rational4, 30.0, 10.0, 31);
        let n = o.dimension();
        let m = n / 2;
        assert!(o.centro_hermitian_defect() < 1e-12 * o.matrix.frobenius_norm());
        let form = o.pt_real_form(1e-12).unwrap();
        // Explicit U, then U^H A U against the closed form.
        let s = 1.0 / 2f64.sqrt();
        let mut u = DenseMatrix::<Complex<f64>>::zeros(n, n);
        for k in 0..m {
            u[(k, k)] = Complex::new(s, 0.0);
            u[(k, m + k)] = Complex::new(0.0, s);
            u[(n - 1 - k, k)] = Complex::new(s, 0.0);
            u[(n - 1 - k, m + k)] = Complex::new(0.0, -s);
        }
        let uh = u.transpose().map(|z| z.conj());
        let t = uh.matmul(&o.matrix).matmul(&u);
        let scale = o.matrix.max_abs();
        for i in 0..n {
            for j in 0..n {
                let z = t[(i, j)];
                assert!(z.im.abs() <= 1e-12 * scale);
                assert!((z.re - form.matrix[(i, j)]).abs() <= 1e-12 * scale);
            }
        }
        let w: Vec<Complex<f64>> = (0..n).map(|k| Complex::new(k as f64, 1.0 - k as f64)).collect();
        let v = form.to_original(&w);
        let direct = u.matvec(&w);
        for (a, b) in v.iter().zip(direct) {
            assert!((a - b).norm() < 1e-13);
        }
        assert!(op(Family::Rational4, 30.0, 10.0, 30).pt_real_form(1e-12).is_none());
    }

    #[test]
    fn dump_round_trip() {
        let o = op(Family::Step, 3.0, 10.0, 9);
        let mut bytes = Vec::new();
        o.dump(&mut bytes).unwrap();
        assert_eq!(bytes.len(), 64 * 16);
        // First entry: -d2[1][1] as little-endian f64, then a zero imaginary part.
        assert_eq!(&bytes[..8], &o.matrix[(0, 0)].re.to_le_bytes());
        let back: DenseMatrix<Complex<f64>> = read_matrix(&mut bytes.as_slice()).unwrap();
        assert_eq!(back, o.matrix);
        assert!(read_matrix::<f64>(&mut &bytes[..100]).is_err());

        let e: OperatorMatrix<crate::DoubleDouble> =
            OperatorMatrix::build(&PotentialSpec::new(Family::Step, 3.0).unwrap(), 10.0, 9).unwrap();
        let mut bytes = Vec::new();
        e.dump(&mut bytes).unwrap();
        assert_eq!(bytes.len(), 64 * 32);
        let back: DenseMatrix<Complex<crate::DoubleDouble>> = read_matrix(&mut bytes.as_slice()).unwrap();
        assert_eq!(back, e.matrix);
    }
}
