//! Bound-state versus continuum classification.
//!
//! Eigenfunctions of genuine bound states decay smoothly and exponentially
//! well before the truncation boundary; continuum eigenfunctions stay
//! extended and are cut off abruptly by the Dirichlet condition. The tail
//! ratio measures how much of an eigenfunction survives near `±L`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_complex::{Complex, Complex64};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::{EigenSolution, Eigensystem, EigenvectorSample, Route};
use crate::error::{invalid, Error, Result};
use crate::operator::OperatorMatrix;
use crate::potential::{Family, PotentialSpec};
use crate::scalar::{complex_to_f64, Precision, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Bound,
    ContinuumComplex,
    ContinuumReal,
    Unresolved,
}

impl Label {
    pub fn name(self) -> &'static str {
        match self {
            Label::Bound => "bound",
            Label::ContinuumComplex => "continuum_complex",
            Label::ContinuumReal => "continuum_real",
            Label::Unresolved => "unresolved",
        }
    }

    pub fn is_continuum(self) -> bool {
        matches!(self, Label::ContinuumComplex | Label::ContinuumReal)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Label {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "bound" => Ok(Label::Bound),
            "continuum_complex" => Ok(Label::ContinuumComplex),
            "continuum_real" => Ok(Label::ContinuumReal),
            "unresolved" => Ok(Label::Unresolved),
            other => Err(invalid(format!("unknown label '{other}'"))),
        }
    }
}

/// Shape statistics of one eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailDiagnostics {
    /// `max |psi|` over `|x| >= band L`, relative to the global maximum.
    pub tail_ratio: f64,
    /// `|psi|` is non-increasing toward the boundary over the outermost
    /// nodes, on both sides.
    pub monotone_outer: bool,
    /// Smaller of the two sides' `-corr(|x|, log10 |psi|)` over the fit
    /// window; close to 1 for clean exponential decay.
    pub decay_correlation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenRecord {
    pub value: Complex64,
    pub label: Label,
    /// Present when an eigenvector was computed.
    pub tail_ratio: Option<f64>,
    pub pair_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<TailDiagnostics>,
    /// Relative residual of the eigenvector, if one was computed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    /// Eigenvector samples on the interior nodes, kept on request.
    #[serde(skip)]
    pub vector: Option<Vec<Complex64>>,
}

impl EigenRecord {
    pub fn raw(value: Complex64, label: Label) -> Self {
        Self {
            value,
            label,
            tail_ratio: None,
            pair_index: None,
            diagnostics: None,
            residual: None,
            vector: None,
        }
    }
}

/// Thresholds of the classifier.
///
/// The imaginary-part thresholds scale with the rounding level of the
/// computation, `eps ||A||_F`, so that they follow both the precision and
/// the size of the matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassificationPolicy {
    /// Strict rule: bound if the tail ratio is below this and the outer
    /// envelope is monotone.
    pub bound_tail_threshold: f64,
    /// Fraction of `L` beyond which the tail ratio is measured.
    pub tail_band: f64,
    /// Fraction of nodes at each end checked for a monotone envelope.
    pub monotone_fraction: f64,
    /// Relaxed rule for slowly decaying states: tail ratio below this ...
    pub relaxed_tail_threshold: f64,
    /// ... and decay correlation above this.
    pub relaxed_correlation: f64,
    /// Fit window `[lo, hi]` for the decay correlation, as fractions of `L`.
    pub fit_window: (f64, f64),
    /// Eigenvalues with `|Im| <= factor eps ||A||_F` are continuum_real.
    pub real_threshold_factor: f64,
    /// Eigenvectors are computed for `|Im| > factor eps ||A||_F`.
    pub vector_threshold_factor: f64,
    /// Conjugate pairing tolerance relative to `max |value|`.
    pub pairing_tolerance: f64,
    /// Minimum drop, in decades of `|Im|`, reported as a transition.
    pub jump_min_decades: f64,
    pub keep_vectors: bool,
}

impl Default for ClassificationPolicy {
    fn default() -> Self {
        Self {
            bound_tail_threshold: 1e-5,
            tail_band: 0.95,
            monotone_fraction: 0.05,
            relaxed_tail_threshold: 1e-2,
            relaxed_correlation: 0.999,
            fit_window: (0.5, 0.95),
            real_threshold_factor: 100.0,
            vector_threshold_factor: 100.0,
            pairing_tolerance: 1e-8,
            jump_min_decades: 6.0,
            keep_vectors: false,
        }
    }
}

impl ClassificationPolicy {
    pub fn validate(&self) -> Result<()> {
        let pos = |x: f64| x.is_finite() && x > 0.0;
        if !pos(self.bound_tail_threshold) || !pos(self.relaxed_tail_threshold) {
            return Err(invalid("tail thresholds must be positive"));
        }
        if !(self.tail_band > 0.0 && self.tail_band < 1.0) {
            return Err(invalid("tail band must lie in (0, 1)"));
        }
        if !(self.monotone_fraction > 0.0 && self.monotone_fraction < 0.5) {
            return Err(invalid("monotone fraction must lie in (0, 0.5)"));
        }
        let (lo, hi) = self.fit_window;
        if !(0.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(invalid("fit window must satisfy 0 <= lo < hi <= 1"));
        }
        if !pos(self.real_threshold_factor) || !pos(self.vector_threshold_factor) || !pos(self.pairing_tolerance) {
            return Err(invalid("threshold factors must be positive"));
        }
        if !(self.jump_min_decades >= 0.0) {
            return Err(invalid("jump_min_decades must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub family: Family,
    pub strength: f64,
    pub half_width: f64,
    pub n: usize,
    pub precision: Precision,
    pub route: Route,
    pub matrix_norm: f64,
    pub real_threshold: f64,
    pub vector_threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    /// Midpoint of the real parts straddling the drop.
    pub location: f64,
    pub drop_decades: f64,
    pub below: Complex64,
    pub above: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    /// Sorted by real part, ties by imaginary part.
    pub records: Vec<EigenRecord>,
    pub bound_pairs: usize,
    pub transition: Option<Transition>,
    pub metadata: RunMetadata,
}

impl SpectrumResult {
    pub fn transition_point(&self) -> Option<f64> {
        self.transition.as_ref().map(|t| t.location)
    }

    pub fn count(&self, label: Label) -> usize {
        self.records.iter().filter(|r| r.label == label).count()
    }

    /// Bound eigenvalues in the upper half plane, deepest (largest `Im`) first.
    pub fn bound_states(&self) -> Vec<Complex64> {
        let mut b: Vec<Complex64> = self
            .records
            .iter()
            .filter(|r| r.label == Label::Bound && r.value.im > 0.0)
            .map(|r| r.value)
            .collect();
        b.sort_by(|x, y| y.im.total_cmp(&x.im));
        b
    }

    /// Largest `|Im|` among continuum records.
    pub fn continuum_max_im(&self) -> f64 {
        self.records
            .iter()
            .filter(|r| r.label.is_continuum())
            .map(|r| r.value.im.abs())
            .fold(0.0, f64::max)
    }
}

fn order(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Shape statistics of `psi` sampled at `nodes` on `[-L, L]`.
pub fn tail_diagnostics(nodes: &[f64], psi: &[Complex64], half_width: f64, policy: &ClassificationPolicy) -> TailDiagnostics {
    let mag: Vec<f64> = psi.iter().map(|z| z.norm()).collect();
    let peak = mag.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 || !peak.is_finite() {
        return TailDiagnostics {
            tail_ratio: 1.0,
            monotone_outer: false,
            decay_correlation: 0.0,
        };
    }
    let band = policy.tail_band * half_width;
    let tail = nodes
        .iter()
        .zip(&mag)
        .filter(|(x, _)| x.abs() >= band)
        .map(|(_, m)| *m)
        .fold(0.0, f64::max);

    // Outermost nodes on each side, traversed toward the boundary.
    let n = mag.len();
    let k = ((policy.monotone_fraction * n as f64).ceil() as usize).clamp(2, n);
    // Values far below the tail threshold are rounding noise; clamp them so
    // that a fully decayed tail counts as flat.
    let noise = 1e-3 * policy.bound_tail_threshold * peak;
    let env = |j: usize| mag[j].max(noise);
    let right_mono = (0..k - 1).all(|j| env(j) <= env(j + 1));
    let left_mono = (n - k..n - 1).all(|j| env(j + 1) <= env(j));

    let (lo, hi) = (policy.fit_window.0 * half_width, policy.fit_window.1 * half_width);
    let floor = 1e-14 * peak;
    let side = |positive: bool| {
        let pts: Vec<(f64, f64)> = nodes
            .iter()
            .zip(&mag)
            .filter(|(x, _)| (**x > 0.0) == positive && x.abs() >= lo && x.abs() <= hi)
            .map(|(x, m)| (x.abs(), m.max(floor).log10()))
            .collect();
        -pearson(&pts)
    };
    let corr = side(true).min(side(false));
    TailDiagnostics {
        tail_ratio: tail / peak,
        monotone_outer: left_mono && right_mono,
        decay_correlation: corr,
    }
}

fn pearson(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 3 {
        return 0.0;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in pts {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

/// Applies the bound-state rules to a set of diagnostics.
pub fn is_bound(d: &TailDiagnostics, policy: &ClassificationPolicy) -> bool {
    let strict = d.tail_ratio < policy.bound_tail_threshold && d.monotone_outer;
    let relaxed = d.tail_ratio < policy.relaxed_tail_threshold && d.decay_correlation > policy.relaxed_correlation;
    strict || relaxed
}

/// Labels every eigenvalue of `op`.
///
/// Eigenvectors are computed, in parallel, only for eigenvalues whose
/// imaginary part exceeds the vector threshold. When the solver took the
/// real route the spectrum is exactly closed under conjugation and the
/// partner of `v` is `J conj(v)`, so only upper-half-plane vectors are
/// computed.
pub fn classify<T: Real>(
    solution: &EigenSolution<T>,
    system: &Eigensystem<'_, T>,
    op: &OperatorMatrix<T>,
    policy: &ClassificationPolicy,
) -> Result<SpectrumResult> {
    policy.validate()?;
    let norm = system.norm();
    let eps = T::PRECISION.epsilon();
    let real_threshold = policy.real_threshold_factor * eps * norm;
    let vector_threshold = policy.vector_threshold_factor * eps * norm;
    let half_width = op.grid.half_width().to_f64();
    let nodes: Vec<f64> = op.nodes().iter().map(|x| x.to_f64()).collect();
    let pt_pairs = system.route() == Route::PtReal;

    let mut values: Vec<(Complex<T>, Complex64)> =
        solution.eigenvalues.iter().map(|&z| (z, complex_to_f64(z))).collect();
    values.sort_by(|a, b| order(&a.1, &b.1));

    let wanted: Vec<usize> = (0..values.len())
        .filter(|&i| {
            let im = values[i].1.im;
            im.abs() > vector_threshold && (!pt_pairs || im > 0.0)
        })
        .collect();
    let vectors: Vec<(usize, Result<EigenvectorSample<T>>)> =
        wanted.par_iter().map(|&i| (i, system.eigenvector(values[i].0))).collect();

    let mut records: Vec<EigenRecord> = values
        .iter()
        .map(|&(_, v)| {
            let label = if v.im.abs() <= real_threshold {
                Label::ContinuumReal
            } else {
                Label::ContinuumComplex
            };
            EigenRecord::raw(v, label)
        })
        .collect();

    let apply = |idx: usize, psi: &[Complex64], residual: f64, records: &mut Vec<EigenRecord>| {
        let d = tail_diagnostics(&nodes, psi, half_width, policy);
        let r = &mut records[idx];
        r.label = if is_bound(&d, policy) {
            Label::Bound
        } else {
            Label::ContinuumComplex
        };
        r.tail_ratio = Some(d.tail_ratio);
        r.diagnostics = Some(d);
        r.residual = Some(residual);
        if policy.keep_vectors {
            r.vector = Some(psi.to_vec());
        }
    };

    for (i, res) in vectors {
        match res {
            Ok(sample) => {
                let psi: Vec<Complex64> = sample.vector.iter().map(|&z| complex_to_f64(z)).collect();
                apply(i, &psi, sample.residual, &mut records);
                if pt_pairs {
                    let target = values[i].1.conj();
                    if let Some(j) = find_exact(&values, target, i) {
                        let mirrored: Vec<Complex<T>> = sample.vector.iter().rev().map(|z| z.conj()).collect();
                        let residual = system_residual(system, &mirrored, values[j].0);
                        let psi: Vec<Complex64> = mirrored.iter().map(|&z| complex_to_f64(z)).collect();
                        apply(j, &psi, residual, &mut records);
                    }
                }
            }
            Err(_) => {
                records[i].label = Label::Unresolved;
                if pt_pairs {
                    if let Some(j) = find_exact(&values, values[i].1.conj(), i) {
                        records[j].label = Label::Unresolved;
                    }
                }
            }
        }
    }

    pair_conjugates(&mut records, real_threshold, policy.pairing_tolerance);

    let bound = records.iter().filter(|r| r.label == Label::Bound).count();
    let metadata = RunMetadata {
        family: op.spec.family,
        strength: op.spec.strength,
        half_width,
        n: op.grid.n(),
        precision: T::PRECISION,
        route: system.route(),
        matrix_norm: norm,
        real_threshold,
        vector_threshold,
    };
    let mut result = SpectrumResult {
        records,
        bound_pairs: bound / 2,
        transition: None,
        metadata,
    };
    result.transition = detect_transition(&result, policy.jump_min_decades);
    Ok(result)
}

fn find_exact<T: Real>(values: &[(Complex<T>, Complex64)], target: Complex64, not: usize) -> Option<usize> {
    let pos = values.partition_point(|(_, v)| order(v, &target) == Ordering::Less);
    (pos..values.len())
        .take_while(|&j| values[j].1 == target)
        .find(|&j| j != not)
}

fn system_residual<T: Real>(system: &Eigensystem<'_, T>, v: &[Complex<T>], lambda: Complex<T>) -> f64 {
    system.relative_residual(v, lambda)
}

/// Greedy nearest-conjugate matching.
///
/// Every record with `|Im| > real_threshold` is matched to the unmatched
/// record closest to its conjugate, within `tolerance * max |value|`.
/// Unmatched complex records become unresolved. A matched pair whose labels
/// disagree (one bound, one not) is also marked unresolved, so that a bound
/// label always comes with a bound partner.
pub fn pair_conjugates(records: &mut [EigenRecord], real_threshold: f64, tolerance: f64) {
    let scale = records.iter().map(|r| r.value.norm()).fold(0.0, f64::max);
    let tol = tolerance * scale.max(f64::MIN_POSITIVE);
    for r in records.iter_mut() {
        r.pair_index = None;
    }
    let complex: Vec<usize> = (0..records.len())
        .filter(|&i| records[i].value.im.abs() > real_threshold)
        .collect();
    // Sorted by real part, so candidates for a conjugate lie in a window.
    for (pos, &i) in complex.iter().enumerate() {
        if records[i].pair_index.is_some() {
            continue;
        }
        let target = records[i].value.conj();
        let mut best: Option<(usize, f64)> = None;
        let scan = |range: &mut dyn Iterator<Item = &usize>, best: &mut Option<(usize, f64)>| {
            for &j in range {
                if (records[j].value.re - target.re).abs() > tol {
                    break;
                }
                if j == i || records[j].pair_index.is_some() {
                    continue;
                }
                let d = (records[j].value - target).norm();
                if d <= tol && best.map_or(true, |(_, bd)| d < bd) {
                    *best = Some((j, d));
                }
            }
        };
        scan(&mut complex[pos + 1..].iter(), &mut best);
        scan(&mut complex[..pos].iter().rev(), &mut best);
        match best {
            Some((j, _)) => {
                records[i].pair_index = Some(j);
                records[j].pair_index = Some(i);
                let (a, b) = (records[i].label, records[j].label);
                if (a == Label::Bound) != (b == Label::Bound) {
                    records[i].label = Label::Unresolved;
                    records[j].label = Label::Unresolved;
                }
            }
            None => records[i].label = Label::Unresolved,
        }
    }
}

/// Location of the sharpest drop in `|Im|` along the continuum.
///
/// Continuum records with `Im >= 0` are scanned in order of real part
/// (conjugate partners would only repeat each value). The drop between
/// neighbours is measured in `log10(|Im| + floor)` with
/// `floor = eps max(|E|, 1)`, the rounding level of each eigenvalue.
pub fn detect_transition(result: &SpectrumResult, jump_min_decades: f64) -> Option<Transition> {
    let eps = result.metadata.precision.epsilon();
    let pts: Vec<Complex64> = result
        .records
        .iter()
        .filter(|r| r.label.is_continuum() && r.value.im >= 0.0)
        .map(|r| r.value)
        .collect();
    if pts.len() < 10 {
        return None;
    }
    let level = |z: Complex64| (z.im.abs() + eps * z.norm().max(1.0)).log10();
    let mut best: Option<Transition> = None;
    for w in pts.windows(2) {
        let drop = level(w[0]) - level(w[1]);
        if drop > best.as_ref().map_or(f64::NEG_INFINITY, |b| b.drop_decades) {
            best = Some(Transition {
                location: 0.5 * (w[0].re + w[1].re),
                drop_decades: drop,
                below: w[0],
                above: w[1],
            });
        }
    }
    best.filter(|t| t.drop_decades > jump_min_decades)
}

/// Per-run largest continuum `|Im|`, in the order given.
pub fn continuum_collapse_metric(results: &[SpectrumResult]) -> Vec<(f64, f64)> {
    results
        .iter()
        .map(|r| (r.metadata.half_width, r.continuum_max_im()))
        .collect()
}

/// Grid, assembly, eigensolve and classification for one configuration.
pub fn analyze<T: Real>(
    spec: &PotentialSpec,
    half_width: f64,
    n: usize,
    route: Route,
    policy: &ClassificationPolicy,
) -> Result<SpectrumResult> {
    let op = OperatorMatrix::<T>::build(spec, half_width, n)?;
    let system = Eigensystem::new(&op.matrix, route)?;
    let solution = system.eigenvalues()?;
    classify(&solution, &system, &op, policy)
}
