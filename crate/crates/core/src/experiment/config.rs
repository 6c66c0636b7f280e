use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::analysis::CHECK_NAMES;
use crate::error::{Error, Result};
use crate::model::{check_assumptions, Dataset, Hyperparams, LossKind, LossModel};
use crate::optim::Optimizer;
use crate::vector::{dot, normalize};

/// Check names accepted in a config: the trajectory checks plus the corner test.
pub const CONFIG_CHECK_NAMES: [&str; 6] = [
    CHECK_NAMES[0],
    CHECK_NAMES[1],
    CHECK_NAMES[2],
    CHECK_NAMES[3],
    CHECK_NAMES[4],
    "corner_condition",
];

/// Planted-separator generator: a unit direction `s` and `N` standard normal
/// points with random labels, each moved so that `y_n ⟨s, x_n⟩ ≥ margin_floor`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub n: usize,
    pub p: usize,
    #[serde(default = "GeneratorSpec::default_margin_floor")]
    pub margin_floor: f64,
    pub seed: u64,
}

impl GeneratorSpec {
    pub const DEFAULT_MARGIN_FLOOR: f64 = 0.1;

    fn default_margin_floor() -> f64 {
        Self::DEFAULT_MARGIN_FLOOR
    }

    pub fn new(n: usize, p: usize, seed: u64) -> Self {
        Self {
            n,
            p,
            margin_floor: Self::DEFAULT_MARGIN_FLOOR,
            seed,
        }
    }

    /// Returns the dataset and the planted separator.
    pub fn generate(&self) -> Result<(Dataset, Vec<f64>)> {
        if self.n == 0 || self.p == 0 {
            return Err(Error::Config("generator needs n ≥ 1 and p ≥ 1".into()));
        }
        if !(self.margin_floor > 0.0 && self.margin_floor.is_finite()) {
            return Err(Error::Config("margin_floor must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let s = loop {
            let s: Vec<f64> = (0..self.p).map(|_| rng.sample(StandardNormal)).collect();
            if let Some(s) = normalize(&s) {
                break s;
            }
        };
        let mut features = Vec::with_capacity(self.n);
        let mut labels = Vec::with_capacity(self.n);
        for _ in 0..self.n {
            let y: f64 = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let mut x: Vec<f64> = (0..self.p).map(|_| rng.sample(StandardNormal)).collect();
            let side = dot(&s, &x);
            if y * side < 0.0 {
                // reflect across the hyperplane ⟨s, x⟩ = 0
                for (xi, si) in x.iter_mut().zip(&s) {
                    *xi -= 2.0 * side * si;
                }
            }
            let m = y * dot(&s, &x);
            if m < self.margin_floor {
                for (xi, si) in x.iter_mut().zip(&s) {
                    *xi += y * (self.margin_floor - m) * si;
                }
            }
            features.push(x);
            labels.push(y);
        }
        Ok((Dataset::new(features, labels)?, s))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DatasetSpec {
    Explicit { points: Vec<Vec<f64>>, labels: Vec<f64> },
    Generated { generator: GeneratorSpec },
}

impl DatasetSpec {
    pub fn build(&self) -> Result<Dataset> {
        match self {
            Self::Explicit { points, labels } => Dataset::new(points.clone(), labels.clone()),
            Self::Generated { generator } => Ok(generator.generate()?.0),
        }
    }
}

fn default_thinning() -> u64 {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub dataset: DatasetSpec,
    pub loss: LossKind,
    pub hyperparams: Hyperparams,
    /// When set, `η` is replaced by this fraction of the step-size bound at
    /// `w0` (useful for generated data where the bound is not known upfront).
    #[serde(default)]
    pub eta_fraction_of_bound: Option<f64>,
    pub runs: Vec<Optimizer>,
    pub outputs: PathBuf,
    #[serde(default = "default_thinning")]
    pub thinning: u64,
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default)]
    pub override_assumptions: bool,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs.is_empty() {
            return Err(Error::Config("runs list is empty".into()));
        }
        let mut seen = Vec::new();
        for r in &self.runs {
            if seen.contains(r) {
                return Err(Error::Config(format!("run {} listed twice", r.name())));
            }
            seen.push(*r);
        }
        if let Some(bad) = self.checks.iter().find(|c| !CONFIG_CHECK_NAMES.contains(&c.as_str())) {
            return Err(Error::Config(format!(
                "unknown check {bad:?}; expected one of {CONFIG_CHECK_NAMES:?}"
            )));
        }
        if self.thinning == 0 {
            return Err(Error::Config("thinning must be positive".into()));
        }
        if let Some(f) = self.eta_fraction_of_bound {
            if !(f > 0.0 && f.is_finite()) {
                return Err(Error::Config("eta_fraction_of_bound must be positive".into()));
            }
        }
        if self.eta_fraction_of_bound.is_none() {
            self.hyperparams.validate()?;
        }
        Ok(())
    }

    pub fn loss_model(&self) -> LossModel {
        LossModel::new(self.loss)
    }

    /// Dataset and hyperparameters with `eta_fraction_of_bound` applied.
    pub fn resolve(&self) -> Result<(Dataset, Hyperparams)> {
        let data = self.dataset.build()?;
        let mut hp = self.hyperparams.clone();
        if hp.w0.len() != data.dim() {
            return Err(Error::Config(format!(
                "w0 has length {}, dataset dimension is {}",
                hp.w0.len(),
                data.dim()
            )));
        }
        if let Some(f) = self.eta_fraction_of_bound {
            hp.eta = 1.0;
            hp.eta = f * check_assumptions(&self.loss_model(), &data, &hp)?.eta_bound;
        }
        hp.validate()?;
        Ok((data, hp))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "dataset": {"points": [[1, 0], [0, 1]], "labels": [1, 1]},
        "loss": "logistic",
        "hyperparams": {"eta": 1e-1, "epsilon": 1E-8, "w0": [0, 0]},
        "runs": ["adagrad", "gd"],
        "outputs": "out"
    }"#;

    #[test]
    fn parses_with_defaults() {
        let cfg = ExperimentConfig::from_json(MINIMAL).unwrap();
        assert_eq!(cfg.thinning, 100);
        assert_eq!(cfg.hyperparams.max_iters, 1_000_000);
        assert!(cfg.checks.is_empty());
        assert_eq!(cfg.runs, vec![Optimizer::AdaGrad, Optimizer::GradientDescent]);
        let again = ExperimentConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn rejects_bad_configs() {
        let empty_runs = MINIMAL.replace(r#"["adagrad", "gd"]"#, "[]");
        assert!(matches!(ExperimentConfig::from_json(&empty_runs), Err(Error::Config(_))));
        let bad_check = MINIMAL.replace(r#""outputs": "out""#, r#""outputs": "out", "checks": ["nope"]"#);
        assert!(matches!(ExperimentConfig::from_json(&bad_check), Err(Error::Config(_))));
        let no_seed = MINIMAL.replace(
            r#"{"points": [[1, 0], [0, 1]], "labels": [1, 1]}"#,
            r#"{"generator": {"n": 3, "p": 2}}"#,
        );
        assert!(ExperimentConfig::from_json(&no_seed).is_err());
    }

    #[test]
    fn generator_plants_a_margin() {
        let spec = GeneratorSpec::new(10, 4, 3);
        let (data, s) = spec.generate().unwrap();
        assert_eq!((data.len(), data.dim()), (10, 4));
        for m in data.margins(&s) {
            assert!(m >= spec.margin_floor - 1e-12);
        }
        assert_eq!(spec.generate().unwrap().0, data);
        assert_ne!(GeneratorSpec::new(10, 4, 4).generate().unwrap().0, data);
    }
}
