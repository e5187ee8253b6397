//! Run configuration, read from a TOML file. Every field has a default, so
//! an empty file (or none) is a valid configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::domain::LearnerParams;
use crate::error::{Error, Result};
use crate::estimator::EstimatorConfig;
use crate::eval::CleanseRules;
use crate::learner::PolicyKind;
use crate::sim::{mix_seed, WorldConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EpisodeCounts {
    /// Training episodes.
    pub train: u64,
    /// Evaluation episodes per condition.
    pub eval: u64,
}

impl Default for EpisodeCounts {
    fn default() -> Self {
        Self {
            train: 300,
            eval: 150,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationConfig {
    /// Level at which the before/after comparison passes.
    pub significance: f64,
    pub cleanse: CleanseRules,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        Self {
            significance: 0.01,
            cleanse: CleanseRules::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub master_seed: u64,
    pub output_dir: PathBuf,
    /// Training episodes between checkpoints; 0 disables periodic checkpoints.
    pub checkpoint_every: u64,
    pub episodes: EpisodeCounts,
    /// Policy used while training.
    pub policy: PolicyKind,
    /// Policy used by frozen evaluation runs.
    pub eval_policy: PolicyKind,
    pub learner: LearnerParams,
    pub estimator: EstimatorConfig,
    pub world: WorldConfig,
    pub evaluation: EvaluationConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            master_seed: 0,
            output_dir: PathBuf::from("out"),
            checkpoint_every: 50,
            episodes: EpisodeCounts::default(),
            policy: PolicyKind::Softmax,
            eval_policy: PolicyKind::Greedy,
            learner: LearnerParams::default(),
            estimator: EstimatorConfig::default(),
            world: WorldConfig::default(),
            evaluation: EvaluationConfig::default(),
        }
    }
}

const TRAIN_SEED_TAG: u64 = 1;
const EVAL_SEED_TAG: u64 = 2;

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }

    pub fn validate(&self) -> Result<()> {
        if self.episodes.train == 0 || self.episodes.eval == 0 {
            return Err(Error::Config(
                "episodes.train and episodes.eval must be at least 1".into(),
            ));
        }
        if !(self.evaluation.significance > 0.0 && self.evaluation.significance < 1.0) {
            return Err(Error::Config(format!(
                "evaluation.significance must be in (0,1), got {}",
                self.evaluation.significance
            )));
        }
        self.learner.validate()?;
        self.estimator.validate()?;
        self.world.validate()?;
        self.policy.validate()?;
        self.eval_policy.validate()?;
        self.evaluation.cleanse.validate()
    }

    /// Seed of the training batch.
    pub fn train_seed(&self) -> u64 {
        mix_seed(self.master_seed, TRAIN_SEED_TAG)
    }

    /// Seed shared by the before and after evaluation batches, so both
    /// tables meet the same passersby.
    pub fn eval_seed(&self) -> u64 {
        mix_seed(self.master_seed, EVAL_SEED_TAG)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_through_toml() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        assert_eq!(RunConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
        assert_eq!(RunConfig::from_toml("").unwrap(), cfg);
    }

    #[test]
    fn partial_file_overrides_defaults() {
        let cfg = RunConfig::from_toml(
            "master_seed = 7\n[episodes]\ntrain = 10\n[policy]\nkind = \"epsilon_greedy\"\nepsilon = 0.2\n[world.behavior]\nannoy_prob = 0.9\n",
        )
        .unwrap();
        assert_eq!(cfg.master_seed, 7);
        assert_eq!(
            cfg.episodes,
            EpisodeCounts {
                train: 10,
                eval: 150
            }
        );
        assert_eq!(cfg.policy, PolicyKind::EpsilonGreedy { epsilon: 0.2 });
        assert_eq!(cfg.world.behavior.annoy_prob, 0.9);
        assert_eq!(cfg.learner, LearnerParams::default());
    }

    #[test]
    fn rejects_zero_episodes_and_unknown_keys() {
        let cfg = RunConfig {
            episodes: EpisodeCounts { train: 0, eval: 1 },
            ..Default::default()
        };
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        assert!(RunConfig::from_toml("mystery = 1").is_err());
        assert!(RunConfig::from_toml("[learner]\nalpa = 0.5").is_err());
    }

    #[test]
    fn seeds_differ_by_phase() {
        let cfg = RunConfig::default();
        assert_ne!(cfg.train_seed(), cfg.eval_seed());
        let other = RunConfig {
            master_seed: 1,
            ..Default::default()
        };
        assert_ne!(cfg.train_seed(), other.train_seed());
    }
}
