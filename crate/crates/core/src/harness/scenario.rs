use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::density::{DensityField, GaussianTerm};
use crate::error::{Error, Result};
use crate::geometry::{ConvexPolygon, Point};
use crate::lloyd::DescentSettings;
use crate::quadrature::Quadrature;

/// How the initial sensor configuration is drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    WeightedD2,
    Uniform,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::WeightedD2, Method::Uniform];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::WeightedD2 => "weighted_d2",
            Method::Uniform => "uniform",
        }
    }

    /// RNG stream index for this method within a trial.
    pub(crate) fn stream(self) -> u64 {
        match self {
            Method::WeightedD2 => 0,
            Method::Uniform => 1,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weighted_d2" | "weighted-d2" | "d2" => Ok(Method::WeightedD2),
            "uniform" => Ok(Method::Uniform),
            other => Err(Error::InvalidScenario(format!("unknown method {other:?}"))),
        }
    }
}

fn default_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}
fn default_runs() -> usize {
    50
}
fn default_gain() -> f64 {
    10.0
}
fn default_dt() -> f64 {
    0.01
}
fn default_threshold() -> f64 {
    1e-4
}
fn default_max_iterations() -> usize {
    10_000
}
fn default_depth() -> u32 {
    Quadrature::default().depth
}

/// On-disk scenario description (JSON).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub domain: Vec<[f64; 2]>,
    pub density: Vec<GaussianTerm>,
    pub k: usize,
    pub epsilon: f64,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_gain")]
    pub gain: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_threshold")]
    pub convergence_threshold: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    #[serde(default = "default_depth")]
    pub quadrature_depth: u32,
}

/// A validated experiment setup with the density already normalized.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub domain: ConvexPolygon,
    /// The raw density terms, as given.
    pub density_terms: Vec<GaussianTerm>,
    pub density: DensityField,
    pub k: usize,
    pub epsilon: f64,
    pub methods: Vec<Method>,
    pub runs: usize,
    pub master_seed: u64,
    pub descent: DescentSettings,
}

impl Scenario {
    pub fn from_file(file: ScenarioFile) -> Result<Self> {
        let domain = ConvexPolygon::new(file.domain.iter().map(|&p| Point::from(p)).collect())?;
        let density = DensityField::new(file.density.clone())?.normalize(&domain)?;
        let descent = DescentSettings {
            gain: file.gain,
            dt: file.dt,
            convergence_threshold: file.convergence_threshold,
            max_iterations: file.max_iterations,
            quadrature: Quadrature::new(file.quadrature_depth),
        };
        let scenario = Scenario {
            domain,
            density_terms: file.density,
            density,
            k: file.k,
            epsilon: file.epsilon,
            methods: file.methods,
            runs: file.runs,
            master_seed: file.master_seed,
            descent,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_file(&self) -> ScenarioFile {
        ScenarioFile {
            domain: self.domain.vertices().iter().map(|p| [p.x, p.y]).collect(),
            density: self.density_terms.clone(),
            k: self.k,
            epsilon: self.epsilon,
            methods: self.methods.clone(),
            runs: self.runs,
            master_seed: self.master_seed,
            gain: self.descent.gain,
            dt: self.descent.dt,
            convergence_threshold: self.descent.convergence_threshold,
            max_iterations: self.descent.max_iterations,
            quadrature_depth: self.descent.quadrature.depth,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Scenario::from_file(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(&self.to_file())?)?;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidScenario("k must be at least 1".into()));
        }
        if self.runs == 0 {
            return Err(Error::InvalidScenario("runs must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidScenario("no methods selected".into()));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidEpsilon(self.epsilon));
        }
        self.descent.validate()
    }

    /// Reference setup on the unit square with the two-Gaussian density.
    pub fn paper(k: usize, epsilon: f64) -> Self {
        Scenario::preset(DensityField::paper(), k, epsilon)
    }

    fn preset(density: DensityField, k: usize, epsilon: f64) -> Self {
        let domain = ConvexPolygon::unit_square();
        Scenario {
            density_terms: density.terms().to_vec(),
            density: density.normalize(&domain).expect("preset density has mass"),
            domain,
            k,
            epsilon,
            methods: default_methods(),
            runs: default_runs(),
            master_seed: 0,
            descent: DescentSettings::default(),
        }
    }

    /// Named presets: `paper` (k = 10, ε = 0.1) and `paper-printed`, the
    /// same setup with the second Gaussian's y-coefficient at 2.
    pub fn named(name: &str) -> Result<Self> {
        match name {
            "paper" => Ok(Scenario::paper(10, 0.1)),
            "paper-printed" => Ok(Scenario::preset(DensityField::paper_printed(), 10, 0.1)),
            other => Err(Error::InvalidScenario(format!("unknown preset {other:?}"))),
        }
    }

    /// The three reference scenarios: (k, ε) = (10, 0.1), (10, 0.05), (20, 0.05).
    pub fn paper_scenarios() -> [Scenario; 3] {
        [
            Scenario::paper(10, 0.1),
            Scenario::paper(10, 0.05),
            Scenario::paper(20, 0.05),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_keeps_setup() {
        let s = Scenario::paper(20, 0.05);
        let text = serde_json::to_string(&s.to_file()).unwrap();
        let back = Scenario::from_file(serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back.to_file(), s.to_file());
        assert_eq!(back.density.normalization(), s.density.normalization());
    }

    #[test]
    fn minimal_json_uses_defaults() {
        let text = r#"{
            "domain": [[0,0],[2,0],[2,1],[0,1]],
            "density": [{"amplitude": 1, "cx": 0, "cy": 0, "ax": 0, "ay": 0}],
            "k": 3,
            "epsilon": 0.25
        }"#;
        let s = Scenario::from_file(serde_json::from_str(text).unwrap()).unwrap();
        assert_eq!(s.methods, Method::ALL.to_vec());
        assert_eq!(s.runs, 50);
        assert_eq!(s.descent.gain, 10.0);
        assert_eq!(s.descent.dt, 0.01);
        assert!((s.density.normalization() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn invalid_scenarios() {
        let mut f = Scenario::paper(10, 0.1).to_file();
        f.k = 0;
        assert!(Scenario::from_file(f).is_err());
        let mut f = Scenario::paper(10, 0.1).to_file();
        f.runs = 0;
        assert!(Scenario::from_file(f).is_err());
        let mut f = Scenario::paper(10, 0.1).to_file();
        f.epsilon = -1.0;
        assert!(Scenario::from_file(f).is_err());
        let mut f = Scenario::paper(10, 0.1).to_file();
        f.dt = 0.5;
        assert!(Scenario::from_file(f).is_err());
        let mut f = Scenario::paper(10, 0.1).to_file();
        f.methods.clear();
        assert!(Scenario::from_file(f).is_err());
        assert!(serde_json::from_str::<ScenarioFile>(r#"{"domain": [], "k": 1}"#).is_err());
        assert!(Scenario::named("nope").is_err());
    }

    #[test]
    fn method_names() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("farthest".parse::<Method>().is_err());
    }
}
