//! Imaginary odd potentials and tabulated custom potentials.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::chebdiff::Grid;
use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Half-width of the support of the step potential.
pub const STEP_HALF_WIDTH: f64 = 2.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `iA sech(x) tanh(x)`
    Scarf2,
    /// `iA x / (1 + x^4)`
    Rational4,
    /// `iA x / (1 + |x|^3)`
    Rational3,
    /// `iA sgn(x)` for `|x| <= 2.5`, zero outside
    Step,
    /// `iA x / (1 + x^2)`, decaying like `1/|x|`
    CoulombRegulated,
    /// Piecewise-linear interpolation of a table, scaled by `A`
    CustomTable,
}

impl Family {
    pub const BUILTIN: [Family; 5] = [
        Family::Scarf2,
        Family::Rational4,
        Family::Rational3,
        Family::Step,
        Family::CoulombRegulated,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Scarf2 => "scarf2",
            Family::Rational4 => "rational4",
            Family::Rational3 => "rational3",
            Family::Step => "step",
            Family::CoulombRegulated => "coulomb_regulated",
            Family::CustomTable => "custom_table",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    /// Accepts the canonical names and the short aliases `v1`..`v5`.
    fn from_str(s: &str) -> Result<Self> {
        let f = match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "scarf2" | "v1" => Family::Scarf2,
            "rational4" | "v2" => Family::Rational4,
            "rational3" | "v3" => Family::Rational3,
            "step" | "v4" => Family::Step,
            "coulomb_regulated" | "v5" => Family::CoulombRegulated,
            "custom_table" => Family::CustomTable,
            other => return Err(invalid(format!("unknown potential family '{other}'"))),
        };
        Ok(f)
    }
}

/// Samples of a complex potential on an ascending set of points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedPotential {
    points: Vec<f64>,
    values: Vec<(f64, f64)>,
}

impl TabulatedPotential {
    pub fn new(points: Vec<f64>, values: Vec<Complex<f64>>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(invalid("table points and values differ in length"));
        }
        if points.len() < 2 {
            return Err(invalid("a table needs at least two samples"));
        }
        if points.iter().any(|p| !p.is_finite()) || values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(invalid("table entries must be finite"));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("table points must be strictly ascending"));
        }
        Ok(Self {
            points,
            values: values.into_iter().map(|v| (v.re, v.im)).collect(),
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn values(&self) -> impl Iterator<Item = Complex<f64>> + '_ {
        self.values.iter().map(|&(re, im)| Complex::new(re, im))
    }

    /// Linear interpolation; zero outside the tabulated range.
    fn interpolate<T: Real>(&self, x: T) -> Complex<T> {
        let xf = x.to_f64();
        let first = self.points[0];
        let last = self.points[self.points.len() - 1];
        if xf < first || xf > last {
            return Complex::new(T::zero(), T::zero());
        }
        let i = match self.points.partition_point(|&p| p <= xf) {
            0 => 0,
            k if k >= self.points.len() => self.points.len() - 2,
            k => k - 1,
        };
        let (x0, x1) = (T::from_f64(self.points[i]), T::from_f64(self.points[i + 1]));
        let t = (x - x0) / (x1 - x0);
        let (a, b) = (self.values[i], self.values[i + 1]);
        let lerp = |p: f64, q: f64| T::from_f64(p) + t * (T::from_f64(q) - T::from_f64(p));
        Complex::new(lerp(a.0, b.0), lerp(a.1, b.1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub family: Family,
    pub strength: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<TabulatedPotential>,
}

impl PotentialSpec {
    pub fn new(family: Family, strength: f64) -> Result<Self> {
        if family == Family::CustomTable {
            return Err(invalid("custom_table needs a table; use PotentialSpec::custom"));
        }
        if !strength.is_finite() {
            return Err(invalid(format!("strength must be finite, got {strength}")));
        }
        Ok(Self {
            family,
            strength,
            table: None,
        })
    }

    pub fn custom(table: TabulatedPotential, strength: f64) -> Result<Self> {
        if !strength.is_finite() {
            return Err(invalid(format!("strength must be finite, got {strength}")));
        }
        Ok(Self {
            family: Family::CustomTable,
            strength,
            table: Some(table),
        })
    }

    pub fn scarf2(a: f64) -> Self {
        Self::new(Family::Scarf2, a).expect("finite strength")
    }

    /// True if the potential is imaginary and odd by construction.
    pub fn is_pt_symmetric(&self) -> bool {
        self.family != Family::CustomTable
    }

    /// Evaluates `V(x)`, assuming `x` is finite.
    pub fn value<T: Real>(&self, x: T) -> Complex<T> {
        let a = T::from_f64(self.strength);
        let zero = T::zero();
        let one = T::one();
        let im = match self.family {
            Family::Scarf2 => x.tanh() / x.cosh(),
            Family::Rational4 => {
                let x2 = x * x;
                x / (one + x2 * x2)
            }
            Family::Rational3 => x / (one + x.abs() * x * x),
            Family::Step => {
                let half = T::from_f64(STEP_HALF_WIDTH);
                if x.abs() > half || x == zero {
                    zero
                } else if x > zero {
                    one
                } else {
                    -one
                }
            }
            Family::CoulombRegulated => x / (one + x * x),
            Family::CustomTable => {
                let v = self
                    .table
                    .as_ref()
                    .map(|t| t.interpolate(x))
                    .unwrap_or_else(|| Complex::new(zero, zero));
                return Complex::new(v.re * a, v.im * a);
            }
        };
        Complex::new(zero, a * im)
    }
}

/// Evaluates the potential at a single point.
pub fn evaluate<T: Real>(spec: &PotentialSpec, x: T) -> Result<Complex<T>> {
    if !x.is_finite() {
        return Err(invalid(format!("potential evaluated at non-finite point {x}")));
    }
    Ok(spec.value(x))
}

/// Evaluates the potential at every node of `grid`, in node order.
pub fn evaluate_on_grid<T: Real>(spec: &PotentialSpec, grid: &Grid<T>) -> Vec<Complex<T>> {
    grid.nodes().iter().map(|&x| spec.value(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebdiff::build_grid;
    use crate::dd::DoubleDouble;

    fn v(family: Family, a: f64, x: f64) -> Complex<f64> {
        evaluate(&PotentialSpec::new(family, a).unwrap(), x).unwrap()
    }

    #[test]
    fn point_values() {
        assert_eq!(v(Family::Scarf2, 30.0, 0.0), Complex::new(0.0, 0.0));
        assert_eq!(v(Family::Step, 3.0, 1.0), Complex::new(0.0, 3.0));
        assert_eq!(v(Family::Step, 3.0, 3.0), Complex::new(0.0, 0.0));
        assert_eq!(v(Family::Step, 3.0, -2.5), Complex::new(0.0, -3.0));
        assert_eq!(v(Family::Step, 3.0, 0.0), Complex::new(0.0, 0.0));
        assert_eq!(v(Family::CoulombRegulated, 10.0, 1.0), Complex::new(0.0, 5.0));
        let r4 = v(Family::Rational4, 30.0, 10.0);
        assert_eq!(r4.re, 0.0);
        assert!((r4.im - 0.029_997_000_299_970_003).abs() < 1e-15);
        let r3 = v(Family::Rational3, 2.0, -2.0);
        assert!((r3.im + 4.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn peak_values() {
        let x = (1.0 + 2f64.sqrt()).ln();
        assert!((v(Family::Scarf2, 30.0, x).im - 15.0).abs() < 1e-13);
        let peak = (0..200_000)
            .map(|i| v(Family::Scarf2, 1.0, i as f64 * 1e-4).im)
            .fold(0.0, f64::max);
        assert!((peak - 0.5).abs() < 1e-8);
        let peak = (0..200_000)
            .map(|i| v(Family::CoulombRegulated, 1.0, i as f64 * 1e-4).im)
            .fold(0.0, f64::max);
        assert!((peak - 0.5).abs() < 1e-12);
    }

    #[test]
    fn far_field_is_harmless() {
        assert_eq!(v(Family::Scarf2, 30.0, 800.0), Complex::new(0.0, 0.0));
        let s = PotentialSpec::scarf2(30.0);
        let far = evaluate(&s, DoubleDouble::from(900.0)).unwrap();
        assert!(far.im.is_finite() && far.im.hi() == 0.0);
        assert!(evaluate(&s, f64::INFINITY).is_err());
        assert!(evaluate(&s, f64::NAN).is_err());
    }

    #[test]
    fn grid_evaluation_matches_pointwise() {
        let spec = PotentialSpec::new(Family::CoulombRegulated, 10.0).unwrap();
        let grid = build_grid(10.0, 8).unwrap();
        let on_grid = evaluate_on_grid(&spec, &grid);
        assert_eq!(on_grid.len(), 9);
        for (x, val) in grid.nodes().iter().zip(on_grid) {
            assert_eq!(val, evaluate(&spec, *x).unwrap());
        }
        let zero = PotentialSpec::new(Family::Step, 0.0).unwrap();
        assert!(evaluate_on_grid(&zero, &grid).iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn step_never_sampled_at_origin_on_odd_grid() {
        let grid = build_grid(10.0, 1023).unwrap();
        let spec = PotentialSpec::new(Family::Step, 3.0).unwrap();
        for (x, val) in grid.nodes().iter().zip(evaluate_on_grid(&spec, &grid)) {
            if x.abs() <= STEP_HALF_WIDTH {
                assert_eq!(val.im.abs(), 3.0);
            }
        }
    }

    #[test]
    fn extended_precision_agrees() {
        for fam in Family::BUILTIN {
            let spec = PotentialSpec::new(fam, 7.0).unwrap();
            for &x in &[-40.0, -3.1, -0.3, 0.7, 1.9, 12.0] {
                let d = spec.value(x);
                let e = spec.value(DoubleDouble::from(x));
                assert!((d.im - e.im.to_f64()).abs() <= 1e-15 * d.im.abs().max(1e-300), "{fam} {x}");
            }
        }
    }

    #[test]
    fn custom_table_interpolates() {
        let t = TabulatedPotential::new(
            vec![-1.0, 0.0, 2.0],
            vec![Complex::new(0.0, -1.0), Complex::new(1.0, 0.0), Complex::new(0.0, 4.0)],
        )
        .unwrap();
        let spec = PotentialSpec::custom(t, 2.0).unwrap();
        assert_eq!(spec.value(-0.5), Complex::new(1.0, -1.0));
        assert_eq!(spec.value(1.0), Complex::new(1.0, 4.0));
        assert_eq!(spec.value(2.0), Complex::new(0.0, 8.0));
        assert_eq!(spec.value(2.5), Complex::new(0.0, 0.0));
        assert_eq!(spec.value(-1.5), Complex::new(0.0, 0.0));
        assert!(!spec.is_pt_symmetric());
        assert!(TabulatedPotential::new(vec![1.0, 1.0], vec![Complex::new(0.0, 0.0); 2]).is_err());
        assert!(TabulatedPotential::new(vec![1.0], vec![Complex::new(0.0, 0.0)]).is_err());
    }

    #[test]
    fn family_names_round_trip() {
        for fam in Family::BUILTIN.into_iter().chain([Family::CustomTable]) {
            assert_eq!(fam.name().parse::<Family>().unwrap(), fam);
        }
        assert_eq!("V5".parse::<Family>().unwrap(), Family::CoulombRegulated);
        assert!("harmonic".parse::<Family>().is_err());
        assert!(PotentialSpec::new(Family::CustomTable, 1.0).is_err());
    }
}
