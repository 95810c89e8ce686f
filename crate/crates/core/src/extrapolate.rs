//! Richardson extrapolation and the Balmer-like constants of a bound-state
//! sequence `E_k ~ alpha/k^2 ± i beta/k^3`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub const MAX_ORDER: usize = 5;

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Order-`m` Richardson extrapolants of `a`, with `a[0]` holding `a_1`:
///
/// `R_k = (1/m!) sum_j (-1)^(m-j) C(m,j) (k+j)^m a_(k+j)`, for `k = 1..len-m`.
///
/// The sign pattern alternates through the last term, `(-1)^m k^m a_k`; this
/// is the form that eliminates `1/k, ..., 1/k^m` corrections exactly.
pub fn richardson(a: &[f64], order: usize) -> Result<Vec<f64>> {
    if !(1..=MAX_ORDER).contains(&order) {
        return Err(invalid(format!("order {order} outside 1..={MAX_ORDER}")));
    }
    if a.len() < order + 1 {
        return Err(invalid(format!(
            "order {order} needs at least {} terms, got {}",
            order + 1,
            a.len()
        )));
    }
    let m = order;
    let scale = factorial(m);
    Ok((1..=a.len() - m)
        .map(|k| {
            let s: f64 = (0..=m)
                .map(|j| {
                    let sign = if (m - j) % 2 == 0 { 1.0 } else { -1.0 };
                    sign * binomial(m, j) * ((k + j) as f64).powi(m as i32) * a[k + j - 1]
                })
                .sum();
            s / scale
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RichardsonTable {
    pub input: Vec<f64>,
    /// `columns[m - 1]` holds the order-`m` extrapolants.
    pub columns: Vec<Vec<f64>>,
}

impl RichardsonTable {
    /// All orders up to `min(MAX_ORDER, len - 1)`.
    pub fn new(input: &[f64]) -> Result<Self> {
        if input.len() < 2 {
            return Err(Error::InsufficientData(format!("{} terms; at least 2 needed", input.len())));
        }
        let top = MAX_ORDER.min(input.len() - 1);
        let columns = (1..=top).map(|m| richardson(input, m)).collect::<Result<_>>()?;
        Ok(Self {
            input: input.to_vec(),
            columns,
        })
    }

    pub fn max_order(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, order: usize) -> Option<&[f64]> {
        self.columns.get(order.checked_sub(1)?).map(|c| c.as_slice())
    }

    /// Last (largest-k) entry of each column, lowest order first.
    pub fn deepest(&self) -> Vec<f64> {
        self.columns.iter().filter_map(|c| c.last().copied()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalmerEstimate {
    pub alpha: f64,
    pub beta: f64,
    /// `|deepest(top) - deepest(top - 1)|` for each constant.
    pub alpha_spread: f64,
    pub beta_spread: f64,
    /// Deepest extrapolant of each order, lowest order first.
    pub alpha_by_order: Vec<f64>,
    pub beta_by_order: Vec<f64>,
    pub real_table: RichardsonTable,
    pub imag_table: RichardsonTable,
    /// The sequence after ordering, `k = 1` first.
    pub ordered: Vec<Complex64>,
}

/// Estimates `alpha` and `beta` from bound eigenvalues.
///
/// One member per conjugate pair is expected; the sign of `Im E` is
/// ignored. Values are ordered by decreasing `|Im E|`, so `k = 1` is the
/// deepest state. The estimates are the deepest entries of the highest
/// available order applied to `k^2 Re E_k` and `k^3 |Im E_k|`.
pub fn estimate_balmer(values: &[Complex64]) -> Result<BalmerEstimate> {
    if values.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} bound pairs; at least 3 needed",
            values.len()
        )));
    }
    if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(invalid("non-finite eigenvalue"));
    }
    let mut ordered = values.to_vec();
    ordered.sort_by(|a, b| b.im.abs().total_cmp(&a.im.abs()));
    let re: Vec<f64> = ordered
        .iter()
        .enumerate()
        .map(|(i, z)| ((i + 1) as f64).powi(2) * z.re)
        .collect();
    let im: Vec<f64> = ordered
        .iter()
        .enumerate()
        .map(|(i, z)| ((i + 1) as f64).powi(3) * z.im.abs())
        .collect();
    let real_table = RichardsonTable::new(&re)?;
    let imag_table = RichardsonTable::new(&im)?;
    let alpha_by_order = real_table.deepest();
    let beta_by_order = imag_table.deepest();
    let spread = |v: &[f64]| match v {
        [.., a, b] => (b - a).abs(),
        _ => f64::NAN,
    };
    Ok(BalmerEstimate {
        alpha: *alpha_by_order.last().expect("at least one order"),
        beta: *beta_by_order.last().expect("at least one order"),
        alpha_spread: spread(&alpha_by_order),
        beta_spread: spread(&beta_by_order),
        alpha_by_order,
        beta_by_order,
        real_table,
        imag_table,
        ordered,
    })
}

/// Parses whitespace- or comma-separated `re im` lines. Blank lines and
/// lines starting with `#` are skipped; a non-numeric first line is taken
/// as a header.
pub fn parse_two_column(text: &str) -> Result<Vec<Complex64>> {
    let mut out = Vec::new();
    let mut first = true;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        let parsed: Option<Vec<f64>> = fields.iter().map(|s| s.parse().ok()).collect();
        match parsed {
            Some(v) if v.len() == 2 => out.push(Complex64::new(v[0], v[1])),
            None if first => {}
            _ => {
                return Err(invalid(format!(
                    "line {}: expected two numbers, got '{line}'",
                    lineno + 1
                )))
            }
        }
        first = false;
    }
    Ok(out)
}
