//! Scenario configuration: JSON with unknown keys rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use euler_blowup::model::{Background, GasParameters, WeightFunction};
use euler_blowup::oracle::BumpAmplitudes;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    I,
    II,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasConfig {
    pub n: usize,
    pub gamma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    #[serde(rename = "R")]
    pub radius: f64,
    pub k: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackgroundConfig {
    pub rho_bar: f64,
    pub p_bar: f64,
    #[serde(rename = "R0")]
    pub r0: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpConfig {
    #[serde(default)]
    pub rho: f64,
    /// Velocity is `velocity · x · bump`; negative values converge.
    #[serde(default)]
    pub velocity: f64,
    #[serde(default)]
    pub pressure: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSource {
    /// Closed-form solution with `v(x, 0) = a0 x` (`n = 1`, `γ = 3`).
    Exact { a0: f64 },
    /// Bump perturbation of a constant state.
    Case2 {
        background: BackgroundConfig,
        #[serde(default)]
        bump: BumpConfig,
    },
    /// Radial table with header `r,rho,v_r,p`; Case II tables also name the background.
    File {
        path: PathBuf,
        #[serde(default)]
        background: Option<BackgroundConfig>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_cells")]
    pub cells: usize,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default = "default_domain")]
    pub domain: [f64; 2],
    /// Detector threshold as a multiple of the initial gradient.
    #[serde(default = "default_multiple")]
    pub detector_multiple: f64,
    #[serde(default = "default_probes")]
    pub probes: usize,
}

fn default_cells() -> usize {
    800
}
fn default_cfl() -> f64 {
    euler_blowup::solver::DEFAULT_CFL
}
fn default_domain() -> [f64; 2] {
    [-3.0, 3.0]
}
fn default_multiple() -> f64 {
    euler_blowup::solver::BlowupDetector::DEFAULT_MULTIPLE
}
fn default_probes() -> usize {
    120
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            cells: default_cells(),
            cfl: default_cfl(),
            domain: default_domain(),
            detector_multiple: default_multiple(),
            probes: default_probes(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

fn default_directory() -> PathBuf {
    PathBuf::from(".")
}
fn default_formats() -> Vec<Format> {
    vec![Format::Json, Format::Csv]
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: default_directory(),
            formats: default_formats(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    /// Number of random Case I data to draw.
    #[serde(default)]
    pub budget: usize,
    /// Mandatory when `budget > 0`.
    #[serde(default)]
    pub seed: Option<u64>,
    /// Number of `a0` values swept uniformly over `[-10, 10]`.
    #[serde(default)]
    pub exact_sweep: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub case: Case,
    pub gas: GasConfig,
    pub weight: WeightConfig,
    pub data: DataSource,
    /// End of the analysis window.
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    /// Overrides the entropy infimum measured on the data.
    #[serde(default)]
    pub entropy_inf: Option<f64>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
    #[serde(default)]
    pub search: Option<SearchConfig>,
}

fn default_horizon() -> f64 {
    1.0
}

/// Checked physical parameters of a scenario.
#[derive(Clone, Copy, Debug)]
pub struct Resolved {
    pub gas: GasParameters,
    pub weight: WeightFunction,
    pub background: Option<Background>,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Checks every physical constraint before any computation.
    pub fn validate(&self) -> Result<Resolved, CliError> {
        let gas = GasParameters::new(self.gas.n, self.gas.gamma)?;
        let weight = WeightFunction::new(self.weight.radius, self.weight.k)?;
        if !(self.weight.k > self.gas.n as f64) {
            return Err(CliError::Config(format!(
                "k = {} must exceed the dimension n = {}",
                self.weight.k, self.gas.n
            )));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(CliError::Config(format!("horizon must be positive, got {}", self.horizon)));
        }
        if let Some(s) = self.entropy_inf {
            if !s.is_finite() {
                return Err(CliError::Config("entropy_inf must be finite".into()));
            }
        }
        let s = &self.solver;
        if s.cells < 16 || !(s.cfl > 0.0 && s.cfl <= 1.0) || !(s.domain[0] < s.domain[1]) || !(s.detector_multiple > 1.0) {
            return Err(CliError::Config(
                "solver needs at least 16 cells, cfl in (0, 1], an increasing domain and a detector multiple above 1".into(),
            ));
        }
        if let Some(search) = &self.search {
            if search.budget > 0 && search.seed.is_none() {
                return Err(CliError::Config("search.seed is mandatory when search.budget > 0".into()));
            }
        }
        let background = match (&self.data, self.case) {
            (DataSource::Exact { a0 }, Case::I) => {
                if gas.n() != 1 || gas.gamma() != 3.0 {
                    return Err(CliError::Config("the exact solution needs n = 1 and gamma = 3".into()));
                }
                if !a0.is_finite() {
                    return Err(CliError::Config("a0 must be finite".into()));
                }
                None
            }
            (DataSource::Case2 { background, bump }, Case::II) => {
                let bg = background.resolve(&gas)?;
                euler_blowup::oracle::CaseIIGenerator::new(bg, bump.amplitudes(), gas)?;
                Some(bg)
            }
            (DataSource::File { background, .. }, case) => match (background, case) {
                (None, Case::I) => None,
                (Some(b), Case::II) => Some(b.resolve(&gas)?),
                (None, Case::II) => return Err(CliError::Config("Case II file data must name a background".into())),
                (Some(_), Case::I) => return Err(CliError::Config("Case I file data cannot have a background".into())),
            },
            (DataSource::Exact { .. }, Case::II) => {
                return Err(CliError::Config("the exact solution is Case I data".into()))
            }
            (DataSource::Case2 { .. }, Case::I) => {
                return Err(CliError::Config("bump perturbations are Case II data".into()))
            }
        };
        if let Some(bg) = &background {
            let inner = weight.inner_radius();
            if !(bg.r0 < inner) {
                return Err(CliError::Config(format!(
                    "R0 = {} must be below (k-1)R/k = {inner} for the Case II certificate",
                    bg.r0
                )));
            }
            if gas.n() == 1 && (s.domain[0] > -weight.radius() || s.domain[1] < weight.radius()) {
                return Err(CliError::Config("solver domain must contain [-R, R]".into()));
            }
        }
        Ok(Resolved {
            gas,
            weight,
            background,
        })
    }
}

impl BackgroundConfig {
    pub fn resolve(&self, gas: &GasParameters) -> Result<Background, CliError> {
        Ok(Background::new(self.rho_bar, self.p_bar, self.r0, gas)?)
    }
}

impl BumpConfig {
    pub fn amplitudes(&self) -> BumpAmplitudes {
        BumpAmplitudes {
            rho: self.rho,
            velocity: self.velocity,
            pressure: self.pressure,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const REFERENCE: &str = r#"{
        "case": "I",
        "gas": {"n": 1, "gamma": 3.0},
        "weight": {"R": 1.0, "k": 2.0},
        "data": {"type": "exact", "a0": -7.0}
    }"#;

    #[test]
    fn defaults_fill_in() {
        let c = ScenarioConfig::parse(REFERENCE).unwrap();
        assert_eq!(c.solver, SolverConfig::default());
        assert_eq!(c.outputs.formats, vec![Format::Json, Format::Csv]);
        assert!(c.validate().unwrap().background.is_none());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = REFERENCE.replace("\"k\": 2.0", "\"k\": 2.0, \"extra\": 1");
        assert!(matches!(ScenarioConfig::parse(&text), Err(CliError::Config(_))));
    }

    #[test]
    fn physical_constraints() {
        let gamma_one = REFERENCE.replace("\"gamma\": 3.0", "\"gamma\": 1.0");
        assert!(ScenarioConfig::parse(&gamma_one).unwrap().validate().is_err());
        let small_k = REFERENCE.replace("\"k\": 2.0", "\"k\": 1.0");
        assert!(ScenarioConfig::parse(&small_k).unwrap().validate().is_err());
        let wide = r#"{
            "case": "II",
            "gas": {"n": 1, "gamma": 3.0},
            "weight": {"R": 1.0, "k": 2.0},
            "data": {"type": "case2", "background": {"rho_bar": 1.0, "p_bar": 1.0, "R0": 0.5}}
        }"#;
        let err = ScenarioConfig::parse(wide).unwrap().validate().unwrap_err();
        assert_eq!(err.exit_code(), 64);
        let mismatched = REFERENCE.replace("\"case\": \"I\"", "\"case\": \"II\"");
        assert!(ScenarioConfig::parse(&mismatched).unwrap().validate().is_err());
    }

    #[test]
    fn random_search_needs_a_seed() {
        let text = REFERENCE.replace("\"data\"", "\"search\": {\"budget\": 5}, \"data\"");
        assert!(ScenarioConfig::parse(&text).unwrap().validate().is_err());
    }
}
