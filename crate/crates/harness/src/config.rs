//! Experiment configuration, read from TOML and overridable from the CLI.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use num_complex::Complex64;
use ptspectra::{ClassificationPolicy, Family, PotentialSpec, Precision, Route, TabulatedPotential};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Samples for the `custom_table` family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableConfig {
    pub points: Vec<f64>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: Family,
    pub strength: f64,
    #[serde(rename = "L")]
    pub half_widths: Vec<f64>,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default)]
    pub precision: Precision,
    #[serde(default)]
    pub solver: Route,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
    /// Concurrent per-L jobs.
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub dump_matrix: bool,
    #[serde(default)]
    pub policy: ClassificationPolicy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<TableConfig>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv]
}

fn default_workers() -> usize {
    1
}

impl ExperimentConfig {
    pub fn new(family: Family, strength: f64, half_widths: Vec<f64>, n: usize) -> Self {
        Self {
            family,
            strength,
            half_widths,
            n,
            precision: Precision::Double,
            solver: Route::Auto,
            output_dir: default_output_dir(),
            formats: default_formats(),
            workers: default_workers(),
            dump_matrix: false,
            policy: ClassificationPolicy::default(),
            table: None,
        }
    }

    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable in TOML")
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.n % 2 == 0 || self.n < 5 {
            bail!("N must be odd and at least 5 (got {}), so that no node sits at the origin", self.n);
        }
        if self.half_widths.is_empty() {
            bail!("L list is empty");
        }
        if self.half_widths.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            bail!("every L must be positive and finite");
        }
        if self.half_widths.windows(2).any(|w| w[0] >= w[1]) {
            bail!("L list must be strictly ascending");
        }
        if !self.strength.is_finite() {
            bail!("strength must be finite");
        }
        if self.workers == 0 {
            bail!("workers must be at least 1");
        }
        if self.formats.is_empty() {
            bail!("no output format selected");
        }
        self.policy.validate()?;
        self.potential()?;
        Ok(())
    }

    pub fn potential(&self) -> anyhow::Result<PotentialSpec> {
        match (self.family, &self.table) {
            (Family::CustomTable, Some(t)) => {
                if t.re.len() != t.points.len() || t.im.len() != t.points.len() {
                    bail!("table columns have different lengths");
                }
                let values = t.re.iter().zip(&t.im).map(|(&r, &i)| Complex64::new(r, i)).collect();
                Ok(PotentialSpec::custom(TabulatedPotential::new(t.points.clone(), values)?, self.strength)?)
            }
            (Family::CustomTable, None) => bail!("family custom_table needs a [table] section"),
            (_, Some(_)) => bail!("a [table] section is only valid with family custom_table"),
            (f, None) => Ok(PotentialSpec::new(f, self.strength)?),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let mut cfg = ExperimentConfig::new(Family::CoulombRegulated, 10.0, vec![10.0, 100.0], 1023);
        cfg.formats = vec![Format::Csv, Format::Json];
        cfg.policy.bound_tail_threshold = 3e-6;
        cfg.precision = Precision::Extended;
        let text = cfg.to_toml();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), cfg);
    }

    #[test]
    fn minimal_file() {
        let cfg = ExperimentConfig::from_toml("family = \"step\"\nstrength = 3\nL = [10, 100]\nN = 1023\n").unwrap();
        assert_eq!(cfg.family, Family::Step);
        assert_eq!(cfg.half_widths, vec![10.0, 100.0]);
        assert_eq!(cfg.solver, Route::Auto);
        assert_eq!(cfg.policy, ClassificationPolicy::default());
    }

    #[test]
    fn invariants_enforced() {
        let base = "family = \"scarf2\"\nstrength = 30\n";
        assert!(ExperimentConfig::from_toml(&format!("{base}L = [10]\nN = 1024\n")).is_err());
        assert!(ExperimentConfig::from_toml(&format!("{base}L = [100, 10]\nN = 1023\n")).is_err());
        assert!(ExperimentConfig::from_toml(&format!("{base}L = []\nN = 1023\n")).is_err());
        assert!(ExperimentConfig::from_toml(&format!("{base}L = [10]\nN = 1023\nbogus = 1\n")).is_err());
        let custom = "family = \"custom_table\"\nstrength = 1\nL = [5]\nN = 31\n";
        assert!(ExperimentConfig::from_toml(custom).is_err());
        let with_table = format!("{custom}[table]\npoints = [-1, 1]\nre = [0, 0]\nim = [-1, 1]\n");
        assert!(ExperimentConfig::from_toml(&with_table).is_ok());
    }
}
