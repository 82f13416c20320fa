use std::path::Path;

use hilbert_ar::datagen::{LorenzParams, MackeyGlassParams};
use hilbert_ar::linear::MomentEstimator;
use hilbert_ar::preimage::Initializer;
use hilbert_ar::Method;
use serde::{Deserialize, Serialize};

use crate::dataset::Generators;
use crate::CliError;

/// Settings accepted from `--config`; command-line flags take precedence.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub dataset: Option<String>,
    pub length: Option<usize>,
    pub column: Option<usize>,
    pub take: Option<usize>,
    pub method: Option<Method>,
    pub w: Option<usize>,
    pub steps: Option<usize>,
    pub p_grid: Option<Vec<usize>>,
    pub lp_grid: Option<Vec<f64>>,
    pub trim: Option<bool>,
    pub jobs: Option<usize>,
    pub estimator: Option<MomentEstimator>,
    pub preimage: Option<PreimageFile>,
    pub mackey_glass: Option<MackeyGlassParams>,
    pub lorenz: Option<LorenzParams>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreimageFile {
    pub max_iterations: Option<usize>,
    pub tolerance: Option<f64>,
    pub denominator_floor: Option<f64>,
    pub initializer: Option<Initializer>,
}

impl ConfigFile {
    pub fn generators(&self) -> Generators {
        Generators {
            mackey_glass: self.mackey_glass.clone().unwrap_or_default(),
            lorenz: self.lorenz.clone().unwrap_or_default(),
        }
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_file() {
        let c: ConfigFile = toml::from_str(
            r#"
            dataset = "lorenz-x"
            method = "kem"
            w = 100
            p_grid = [1, 2, 3]
            lp_grid = [0.5, 1.0]
            trim = true
            estimator = "biased-centered"
            [preimage]
            initializer = "previous-value"
            [lorenz]
            sample_every = 1
            "#,
        )
        .unwrap();
        assert_eq!(c.method, Some(Method::Kem));
        assert_eq!(c.estimator, Some(MomentEstimator::BiasedCentered));
        assert_eq!(
            c.preimage.clone().unwrap().initializer,
            Some(Initializer::PreviousValue)
        );
        let g = c.generators();
        assert_eq!(g.lorenz.sample_every, 1);
        assert_eq!(g.lorenz.dt, LorenzParams::default().dt);
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(toml::from_str::<ConfigFile>("window = 3").is_err());
    }
}
