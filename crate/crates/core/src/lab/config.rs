//! JSON experiment configuration (one experiment per file).

use serde::{Deserialize, Deserializer, Serialize};

use crate::group_models::{LambdaGrid, ModelSpec};
use crate::multiplier::{HypWeight, TrialStrategy};

/// A parsed experiment file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub experiment: Experiment,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Required by trial-based experiments; `--seed` overrides it.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_strategy")]
    pub strategy: TrialStrategy,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_trials() -> usize {
    100
}

fn default_strategy() -> TrialStrategy {
    TrialStrategy::Mixed
}

/// Where and how reports are written.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub dir: Option<String>,
    #[serde(default)]
    pub format: Option<ReportFormat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

/// The experiment to run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    /// Round-trip one trial function and dump both sides.
    Transform,
    Verify { check: Check },
    Spectral { quantity: SpectralQuantity },
    Heat {
        #[serde(deserialize_with = "exponent")]
        p: f64,
        #[serde(deserialize_with = "exponent")]
        q: f64,
        times: Vec<f64>,
    },
    /// Runs `check` on models of increasing size.
    Scan { ladder: Vec<usize>, check: Check },
}

impl Experiment {
    pub fn uses_trials(&self) -> bool {
        matches!(self, Experiment::Transform | Experiment::Verify { .. } | Experiment::Scan { .. })
    }
}

/// An inequality check and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "inequality", rename_all = "snake_case", deny_unknown_fields)]
pub enum Check {
    Hyp {
        #[serde(deserialize_with = "exponent")]
        p: f64,
        #[serde(deserialize_with = "exponent")]
        b: f64,
        #[serde(default = "inverse_t")]
        weight: HypWeight,
    },
    Nikolskii {
        #[serde(deserialize_with = "exponent")]
        p: f64,
        #[serde(deserialize_with = "exponent")]
        q: f64,
    },
    Hormander {
        #[serde(deserialize_with = "exponent")]
        p: f64,
        #[serde(deserialize_with = "exponent")]
        q: f64,
        #[serde(default)]
        symbol: SymbolSpec,
    },
    BetaInfty {
        #[serde(deserialize_with = "exponent")]
        beta: f64,
        #[serde(default)]
        symbol: SymbolSpec,
    },
    Lizorkin {
        #[serde(deserialize_with = "exponent")]
        p: f64,
        #[serde(deserialize_with = "exponent")]
        q: f64,
        #[serde(default)]
        m: Option<f64>,
        #[serde(default)]
        symbol: SymbolSpec,
    },
}

fn inverse_t() -> HypWeight {
    HypWeight::InverseT
}

/// Multiplier symbols that can be named in a config.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SymbolSpec {
    #[default]
    Identity,
    /// `e^{-t (tag - 1)}`.
    Heat { t: f64 },
    /// `tag^{-gamma/2}`.
    Bessel { gamma: f64 },
    /// Uniform `[0, 1)` real diagonal entries.
    RandomDiagonal,
    /// Complex Gaussian blocks.
    RandomDense,
}

/// Spectral-side computations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpectralQuantity {
    /// Eigenvalue counts on the configured model at each level.
    Counting { levels: Vec<f64> },
    /// Heisenberg grid counts against the closed form.
    HeisenbergTrace { levels: Vec<f64> },
    /// Rockland counts and their fitted exponent.
    Rockland {
        n: usize,
        j: u32,
        grid: LambdaGrid,
        k: usize,
        levels: Vec<f64>,
    },
    /// `{|ξ|^degree <= s}` on a radial model.
    Homogeneous { degree: f64, levels: Vec<f64> },
    /// Two routes to `||φ(|L|)||_{L^{r,inf}}`.
    WeakNorm { phi: SpectralFunction, r: f64 },
    /// Embedding constants for each `gamma`.
    Embedding {
        #[serde(deserialize_with = "exponent")]
        p: f64,
        #[serde(deserialize_with = "exponent")]
        q: f64,
        gammas: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpectralFunction {
    /// `e^{-t u}`.
    Heat { t: f64 },
    /// `(1 + u)^{-gamma}`.
    Bessel { gamma: f64 },
}

impl SpectralFunction {
    pub fn eval(&self, u: f64) -> f64 {
        match *self {
            SpectralFunction::Heat { t } => (-t * u).exp(),
            SpectralFunction::Bessel { gamma } => (1.0 + u).powf(-gamma),
        }
    }
}

/// Accepts a number or one of the strings `"inf"`, `"infinity"`.
fn exponent<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }
    match Raw::deserialize(d)? {
        Raw::Num(x) => Ok(x),
        Raw::Text(s) if matches!(s.as_str(), "inf" | "infinity" | "Infinity") => Ok(f64::INFINITY),
        Raw::Text(s) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {s:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_verify_config() {
        let text = r#"{
            "model": {"kind": "cyclic", "n": 256},
            "experiment": {"kind": "verify", "check": {"inequality": "nikolskii", "p": 2, "q": "inf"}},
            "trials": 10,
            "seed": 42
        }"#;
        let c: ExperimentConfig = serde_json::from_str(text).unwrap();
        assert_eq!(c.strategy, TrialStrategy::Mixed);
        assert_eq!(
            c.experiment,
            Experiment::Verify { check: Check::Nikolskii { p: 2.0, q: f64::INFINITY } }
        );
    }

    #[test]
    fn rejects_unknown_fields() {
        let text = r#"{"model": {"kind": "cyclic", "n": 4}, "experiment": {"kind": "transform"}, "colour": 1}"#;
        assert!(serde_json::from_str::<ExperimentConfig>(text).is_err());
    }
}
