use serde::{Deserialize, Serialize};

use crate::domain::{BaseState, Episode, TransitionState};
use crate::error::{Error, Result};

/// Rules for discarding episodes that are not real visits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CleanseRules {
    /// Episodes shorter than this are dropped.
    pub min_duration_s: f64,
    /// Drop episodes whose decision stream never leaves `s00` (including
    /// episodes with no decision events at all).
    pub drop_all_s00: bool,
}

impl Default for CleanseRules {
    fn default() -> Self {
        Self {
            min_duration_s: 1.0,
            drop_all_s00: true,
        }
    }
}

impl CleanseRules {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_duration_s > 0.0 && self.min_duration_s.is_finite()) {
            return Err(Error::Config(format!(
                "evaluation.cleanse.min_duration_s must be positive, got {}",
                self.min_duration_s
            )));
        }
        Ok(())
    }

    pub fn keeps(&self, e: &Episode) -> bool {
        if e.duration() < self.min_duration_s {
            return false;
        }
        let s00 = TransitionState::new(BaseState::NotFound, BaseState::NotFound);
        !(self.drop_all_s00 && e.transitions.iter().all(|t| t.state == s00))
    }
}

/// Keeps the episodes that pass `rules`, in their original order.
pub fn cleanse(episodes: Vec<Episode>, rules: &CleanseRules) -> Vec<Episode> {
    episodes.into_iter().filter(|e| rules.keeps(e)).collect()
}
