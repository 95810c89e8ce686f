//! Spectra of one-dimensional PT-symmetric Schrödinger operators
//! `H = -d²/dx² + V(x)` on a truncated interval, discretized by Chebyshev
//! collocation and solved with a dense QR eigensolver that runs in either
//! double or double-double precision.

pub mod chebdiff;
pub mod dd;
pub mod eigen;
pub mod error;
pub mod extrapolate;
pub mod matrix;
pub mod operator;
pub mod potential;
pub mod scalar;
pub mod spectrum;

pub use chebdiff::{build_diff_matrices, build_grid, DiffMatrices, Grid};
pub use dd::DoubleDouble;
pub use eigen::{eigenvalues, inverse_iteration, qr_eigenvalues, EigenSolution, Eigensystem, EigenvectorSample, Route};
pub use error::{Error, Result};
pub use extrapolate::{estimate_balmer, parse_two_column, richardson, BalmerEstimate, RichardsonTable};
pub use matrix::DenseMatrix;
pub use operator::{assemble, hermiticity_report, OperatorMatrix};
pub use potential::{evaluate, evaluate_on_grid, Family, PotentialSpec, TabulatedPotential};
pub use scalar::{Precision, Real, Scalar};
pub use spectrum::{analyze, classify, continuum_collapse_metric, detect_transition, pair_conjugates, ClassificationPolicy, EigenRecord, Label, SpectrumResult, Transition};
