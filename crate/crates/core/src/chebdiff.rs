//! Chebyshev collocation grid on `[-L, L]` and its differentiation matrices.
//!
//! Nodes are `x_j = L cos(pi j / N)` for `j = 0..=N`, ordered from `+L` down
//! to `-L`. The first-derivative matrix uses the classical collocation
//! weights with its diagonal set by the negative-sum rule, and the second
//! derivative is its square.

use crate::error::{invalid, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Real;

/// Chebyshev–Gauss–Lobatto points scaled to `[-L, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    half_width: T,
    n: usize,
    nodes: Vec<T>,
}

impl<T: Real> Grid<T> {
    /// Truncation half-width `L`.
    pub fn half_width(&self) -> T {
        self.half_width
    }

    /// Number of subintervals `N`; there are `N + 1` nodes.
    pub fn n(&self) -> usize {
        self.n
    }

    /// All `N + 1` nodes in descending order.
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    /// Nodes `1..N`, i.e. those that survive the Dirichlet restriction.
    pub fn interior(&self) -> &[T] {
        &self.nodes[1..self.n]
    }
}

/// Builds the grid `x_j = L cos(pi j / N)`.
///
/// The lower half is filled by negating the upper half, so the grid is
/// exactly symmetric about the origin (each mirrored node is still a
/// correctly rounded evaluation of the cosine up to one ulp). For even `N`
/// the middle node is exactly zero.
pub fn build_grid<T: Real>(half_width: T, n: usize) -> Result<Grid<T>> {
    if !(half_width > T::zero()) || !half_width.is_finite() {
        return Err(invalid(format!("half-width must be positive and finite, got {half_width}")));
    }
    if n < 4 {
        return Err(invalid(format!("need at least 4 subintervals, got {n}")));
    }
    let mut nodes = vec![T::zero(); n + 1];
    let step = T::pi() / T::from_usize(n);
    for j in 0..=n / 2 {
        if 2 * j == n {
            nodes[j] = T::zero();
        } else {
            let x = half_width * (step * T::from_usize(j)).cos();
            nodes[j] = x;
            nodes[n - j] = -x;
        }
    }
    Ok(Grid {
        half_width,
        n,
        nodes,
    })
}

/// First and second derivative collocation matrices, `(N+1) x (N+1)`.
#[derive(Debug, Clone)]
pub struct DiffMatrices<T: Real> {
    pub d1: DenseMatrix<T>,
    pub d2: DenseMatrix<T>,
}

impl<T: Real> DiffMatrices<T> {
    pub fn size(&self) -> usize {
        self.d1.rows()
    }
}

/// First derivative matrix only.
pub fn first_derivative<T: Real>(grid: &Grid<T>) -> DenseMatrix<T> {
    let n = grid.n;
    let x = &grid.nodes;
    // c_j = 2 at the endpoints, 1 inside, times (-1)^j.
    let weight = |j: usize| {
        let c = if j == 0 || j == n { T::from_f64(2.0) } else { T::one() };
        if j % 2 == 0 {
            c
        } else {
            -c
        }
    };
    let w: Vec<T> = (0..=n).map(weight).collect();
    let mut d1 = DenseMatrix::zeros(n + 1, n + 1);
    for i in 0..=n {
        let row = d1.row_mut(i);
        let mut sum = T::zero();
        for j in 0..=n {
            if i != j {
                let v = (w[i] / w[j]) / (x[i] - x[j]);
                row[j] = v;
                sum += v;
            }
        }
        row[i] = -sum;
    }
    d1
}

pub fn build_diff_matrices<T: Real>(grid: &Grid<T>) -> DiffMatrices<T> {
    let d1 = first_derivative(grid);
    let d2 = d1.matmul(&d1);
    DiffMatrices { d1, d2 }
}
