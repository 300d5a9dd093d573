//! Key-value scenario files.
//!
//! ```toml
//! K = 4
//! J = 50
//! n = 1000
//! epsilon = 0.1
//! midpoints = [0.4, 0.6, 0.6, 0.4]
//! d = 0.2
//! alpha = 2.0
//! base_seed = 0
//! ```
//!
//! Every key is optional in the file so that command-line flags can supply or
//! override any of them.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::env::{Scenario, DEFAULT_REWARD_WIDTH};
use crate::error::{Error, Result};

/// Default exploration exponent when neither file nor flags set one.
pub const DEFAULT_ALPHA: f64 = 2.0;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(rename = "K")]
    pub num_arms: Option<usize>,
    #[serde(rename = "J")]
    pub num_episodes: Option<usize>,
    #[serde(rename = "n")]
    pub episode_length: Option<usize>,
    pub epsilon: Option<f64>,
    pub midpoints: Option<Vec<f64>>,
    #[serde(rename = "d")]
    pub reward_width: Option<f64>,
    pub alpha: Option<f64>,
    pub base_seed: Option<u64>,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario file serializes")
    }

    /// Complete scenario; `d`, `alpha` and `base_seed` fall back to defaults.
    pub fn to_scenario(&self) -> Result<Scenario> {
        let missing = |key: &str| Error::Config(format!("missing key `{key}`"));
        let midpoints = self.midpoints.clone().ok_or_else(|| missing("midpoints"))?;
        if let Some(k) = self.num_arms {
            if k != midpoints.len() {
                return Err(Error::Config(format!(
                    "K = {k} but {} midpoints given",
                    midpoints.len()
                )));
            }
        }
        let scenario = Scenario {
            num_episodes: self.num_episodes.ok_or_else(|| missing("J"))?,
            episode_length: self.episode_length.ok_or_else(|| missing("n"))?,
            epsilon: self.epsilon.ok_or_else(|| missing("epsilon"))?,
            midpoints,
            reward_width: self.reward_width.unwrap_or(DEFAULT_REWARD_WIDTH),
            alpha: self.alpha.unwrap_or(DEFAULT_ALPHA),
            base_seed: self.base_seed.unwrap_or(0),
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

impl From<&Scenario> for ScenarioFile {
    fn from(s: &Scenario) -> Self {
        ScenarioFile {
            num_arms: Some(s.num_arms()),
            num_episodes: Some(s.num_episodes),
            episode_length: Some(s.episode_length),
            epsilon: Some(s.epsilon),
            midpoints: Some(s.midpoints.clone()),
            reward_width: Some(s.reward_width),
            alpha: Some(s.alpha),
            base_seed: Some(s.base_seed),
        }
    }
}
