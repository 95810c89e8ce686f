//! Dense nonsymmetric eigensolver, generic over the working precision.
//!
//! The pipeline is balance, Hessenberg reduction, then an implicitly shifted
//! QR iteration that computes eigenvalues only. Eigenvectors are recovered
//! one at a time by inverse iteration on the retained Hessenberg form.
//!
//! Matrices with the symmetry of a PT operator on a symmetric grid
//! (`J conj(A) J = A`) and even order are first mapped to an equivalent real
//! matrix, which halves the storage and lets the real double-shift QR
//! deliver exactly real eigenvalues and exactly conjugate pairs.

pub mod balance;
pub mod complex_qr;
pub mod hessenberg;
pub mod inverse;
pub mod real_qr;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::matrix::{vec_norm, DenseMatrix};
use crate::operator::{centro_hermitian_defect, pt_back_map, PtRealForm};
use crate::scalar::{complex_to_f64, Precision, Real, Scalar};

pub use balance::{balance, BalanceRecord};
pub use hessenberg::{hessenberg_reduce, Hessenberg};

use inverse::{start_vector, ShiftedLu};

pub(crate) const EXCEPTIONAL_PERIOD: usize = 10;
pub(crate) const DAT1: f64 = 0.75;
pub(crate) const DAT2: f64 = -0.4375;

/// Iterations allowed per deflated eigenvalue, as a multiple of the order.
pub const ITERATIONS_PER_ORDER: usize = 40;

/// Inverse iteration gives up after this many solves.
pub const MAX_INVERSE_ITERATIONS: usize = 10;

/// Largest centro-Hermitian defect, relative to `||A||_F`, for which the
/// real route treats a matrix as exactly PT symmetric.
pub const PT_DEFECT_TOLERANCE: f64 = 1e-13;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IterationStats {
    pub total: usize,
    /// QR iterations spent before each deflation, in deflation order.
    pub per_deflation: Vec<usize>,
    pub exceptional_shifts: usize,
}

impl IterationStats {
    pub(crate) fn record(&mut self, its: usize) {
        self.total += its;
        self.per_deflation.push(its);
    }
}

/// Which QR variant to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Real route when the matrix qualifies, complex otherwise.
    #[default]
    Auto,
    Complex,
    PtReal,
}

impl FromStr for Route {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "auto" => Ok(Route::Auto),
            "complex" => Ok(Route::Complex),
            "pt_real" | "real" => Ok(Route::PtReal),
            other => Err(invalid(format!("unknown solver route '{other}'"))),
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Auto => "auto",
            Route::Complex => "complex",
            Route::PtReal => "pt_real",
        })
    }
}

#[derive(Debug, Clone)]
pub struct EigenSolution<T: Real> {
    pub eigenvalues: Vec<Complex<T>>,
    /// `n eps ||A||_F`: the scale of backward error to expect in each
    /// eigenvalue.
    pub residual_bound: f64,
    pub iteration_stats: IterationStats,
    /// The route actually taken (never `Auto`).
    pub route: Route,
}

impl<T: Real> EigenSolution<T> {
    pub fn precision(&self) -> Precision {
        T::PRECISION
    }

    pub fn eigenvalues_f64(&self) -> Vec<Complex<f64>> {
        self.eigenvalues.iter().map(|&z| complex_to_f64(z)).collect()
    }
}

#[derive(Debug, Clone)]
pub struct EigenvectorSample<T: Real> {
    pub eigenvalue: Complex<T>,
    /// Scaled so that the entry of largest modulus is exactly 1.
    pub vector: Vec<Complex<T>>,
    /// `||A v - lambda v||_2 / (||v||_2 ||A||_F)`.
    pub residual: f64,
    pub iterations: usize,
}

enum Reduced<T: Real> {
    Complex(Hessenberg<Complex<T>>, BalanceRecord<T>),
    Real(Hessenberg<T>, BalanceRecord<T>),
}

/// A matrix prepared for eigenvalue and eigenvector queries.
///
/// Holds the balanced Hessenberg form and its Householder vectors; the QR
/// iteration runs on a copy, so eigenvectors can be requested afterwards
/// and from several threads at once.
pub struct Eigensystem<'a, T: Real> {
    matrix: &'a DenseMatrix<Complex<T>>,
    norm: f64,
    reduced: Reduced<T>,
}

impl<'a, T: Real> Eigensystem<'a, T> {
    pub fn new(matrix: &'a DenseMatrix<Complex<T>>, route: Route) -> Result<Self> {
        if !matrix.is_square() {
            return Err(invalid(format!("matrix is {}x{}, not square", matrix.rows(), matrix.cols())));
        }
        if matrix.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("matrix has non-finite entries"));
        }
        let norm = matrix.frobenius_norm().to_f64();
        let n = matrix.rows();
        let real_ok = || n % 2 == 0 && n > 0 && centro_hermitian_defect(matrix) <= PT_DEFECT_TOLERANCE * norm;
        let use_real = match route {
            Route::Complex => false,
            Route::Auto => real_ok(),
            Route::PtReal => {
                if !real_ok() {
                    return Err(invalid("matrix is not centro-Hermitian of even order; the real route does not apply"));
                }
                true
            }
        };
        let reduced = if use_real {
            let mut t = PtRealForm::new(matrix).matrix;
            let rec = balance::balance_in_place(&mut t);
            Reduced::Real(hessenberg_reduce(t), rec)
        } else {
            let mut a = matrix.clone();
            let rec = balance::balance_in_place(&mut a);
            Reduced::Complex(hessenberg_reduce(a), rec)
        };
        Ok(Self { matrix, norm, reduced })
    }

    pub fn dimension(&self) -> usize {
        self.matrix.rows()
    }

    pub fn route(&self) -> Route {
        match self.reduced {
            Reduced::Complex(..) => Route::Complex,
            Reduced::Real(..) => Route::PtReal,
        }
    }

    /// Frobenius norm of the original matrix.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn eigenvalues(&self) -> Result<EigenSolution<T>> {
        let n = self.dimension();
        let max_iter = ITERATIONS_PER_ORDER * n.max(1);
        let (eigenvalues, iteration_stats) = match &self.reduced {
            Reduced::Complex(h, _) => complex_qr::complex_hessenberg_eigenvalues(&mut h.matrix(), max_iter)?,
            Reduced::Real(h, _) => real_qr::real_hessenberg_eigenvalues(&mut h.matrix(), max_iter)?,
        };
        Ok(EigenSolution {
            eigenvalues,
            residual_bound: n as f64 * T::PRECISION.epsilon() * self.norm,
            iteration_stats,
            route: self.route(),
        })
    }

    /// Eigenvector for a computed eigenvalue by inverse iteration.
    ///
    /// Fails with [`Error::RefinementFailure`] if the residual does not drop
    /// below the precision's tolerance within
    /// [`MAX_INVERSE_ITERATIONS`] solves.
    pub fn eigenvector(&self, shift: Complex<T>) -> Result<EigenvectorSample<T>> {
        let n = self.dimension();
        let tolerance = T::PRECISION.residual_tolerance();
        if n == 0 {
            return Err(invalid("empty matrix has no eigenvectors"));
        }
        let eps = T::epsilon();
        let mut best = f64::INFINITY;
        match &self.reduced {
            Reduced::Complex(h, rec) => {
                let tiny = hessenberg_norm(h) * eps;
                let lu = ShiftedLu::new(h, shift, tiny);
                let mut x = start_vector::<T>(n);
                for it in 1..=MAX_INVERSE_ITERATIONS {
                    lu.solve(&mut x);
                    normalize(&mut x);
                    let mut v = x.clone();
                    h.apply_q(&mut v);
                    rec.apply(&mut v);
                    let r = self.relative_residual(&v, shift);
                    best = best.min(r);
                    if r <= tolerance {
                        return Ok(self.sample(v, shift, r, it));
                    }
                }
            }
            Reduced::Real(h, rec) => {
                let tiny = hessenberg_norm(h) * eps;
                let lu = ShiftedLu::new(h, shift, tiny);
                let mut x = start_vector::<T>(n);
                for it in 1..=MAX_INVERSE_ITERATIONS {
                    lu.solve(&mut x);
                    normalize(&mut x);
                    let mut w = x.clone();
                    h.apply_q(&mut w);
                    rec.apply(&mut w);
                    let v = pt_back_map(&w);
                    let r = self.relative_residual(&v, shift);
                    best = best.min(r);
                    if r <= tolerance {
                        return Ok(self.sample(v, shift, r, it));
                    }
                }
            }
        }
        Err(Error::RefinementFailure {
            shift: complex_to_f64(shift),
            residual: best,
            tolerance,
        })
    }

    /// `||A v - lambda v||_2 / (||v||_2 ||A||_F)` against the original matrix.
    pub fn relative_residual(&self, v: &[Complex<T>], lambda: Complex<T>) -> f64 {
        let mut r = self.matrix.matvec(v);
        for (ri, &vi) in r.iter_mut().zip(v) {
            *ri -= lambda * vi;
        }
        let vn = vec_norm(v).to_f64();
        if vn == 0.0 || self.norm == 0.0 {
            return if vec_norm(&r).to_f64() == 0.0 { 0.0 } else { f64::INFINITY };
        }
        vec_norm(&r).to_f64() / (vn * self.norm)
    }

    fn sample(&self, mut v: Vec<Complex<T>>, shift: Complex<T>, residual: f64, iterations: usize) -> EigenvectorSample<T> {
        let (imax, _) = v
            .iter()
            .enumerate()
            .fold((0, T::zero()), |(bi, bm), (i, z)| {
                let m = z.modulus();
                if m > bm {
                    (i, m)
                } else {
                    (bi, bm)
                }
            });
        let pivot = v[imax];
        if !pivot.is_zero() {
            for z in v.iter_mut() {
                *z = *z / pivot;
            }
            v[imax] = Complex::new(T::one(), T::zero());
        }
        EigenvectorSample {
            eigenvalue: shift,
            vector: v,
            residual,
            iterations,
        }
    }
}

fn normalize<T: Real>(x: &mut [Complex<T>]) {
    let m = x.iter().fold(T::zero(), |acc, z| acc.max(z.abs1()));
    if m > T::zero() {
        let inv = T::one() / m;
        for z in x.iter_mut() {
            *z = z.scale(inv);
        }
    }
}

fn hessenberg_norm<S: Scalar>(h: &Hessenberg<S>) -> S::Real {
    let n = h.dimension();
    let mut m = S::Real::zero();
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            m = m.max(h.packed[(i, j)].abs1());
        }
    }
    m * S::Real::from_usize(n.max(1))
}

/// All eigenvalues of a square complex matrix.
pub fn eigenvalues<T: Real>(matrix: &DenseMatrix<Complex<T>>, route: Route) -> Result<EigenSolution<T>> {
    Eigensystem::new(matrix, route)?.eigenvalues()
}

/// Eigenvalues of a complex upper Hessenberg matrix by single-shift QR.
pub fn qr_eigenvalues<T: Real>(hessenberg: &DenseMatrix<Complex<T>>) -> Result<EigenSolution<T>> {
    let n = hessenberg.rows();
    let norm = hessenberg.frobenius_norm().to_f64();
    let mut h = hessenberg.clone();
    let (eigenvalues, iteration_stats) =
        complex_qr::complex_hessenberg_eigenvalues(&mut h, ITERATIONS_PER_ORDER * n.max(1))?;
    Ok(EigenSolution {
        eigenvalues,
        residual_bound: n as f64 * T::PRECISION.epsilon() * norm,
        iteration_stats,
        route: Route::Complex,
    })
}

/// Eigenvector of `matrix` for the eigenvalue nearest `shift`.
///
/// Reduces the matrix from scratch; for many shifts on one matrix, build an
/// [`Eigensystem`] once instead.
pub fn inverse_iteration<T: Real>(matrix: &DenseMatrix<Complex<T>>, shift: Complex<T>) -> Result<EigenvectorSample<T>> {
    Eigensystem::new(matrix, Route::Complex)?.eigenvector(shift)
}
