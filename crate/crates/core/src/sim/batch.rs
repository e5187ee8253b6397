use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::episode::{mix_seed, run_episode};
use super::world::WorldConfig;
use crate::domain::{Condition, Episode, ScenarioKind};
use crate::estimator::EstimatorConfig;
use crate::learner::Agent;

const STREAM_KIND: u64 = 4;

/// Which passersby a batch draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mixture {
    /// Curious with probability `curious_weight`, otherwise pass-through.
    Weighted {
        curious_weight: f64,
    },
    Only {
        scenario: ScenarioKind,
    },
}

impl Mixture {
    pub fn from_world(world: &WorldConfig) -> Self {
        Self::Weighted {
            curious_weight: world.curious_weight,
        }
    }

    fn draw(&self, seed: u64) -> ScenarioKind {
        match *self {
            Self::Only { scenario } => scenario,
            Self::Weighted { curious_weight } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(STREAM_KIND);
                if rng.random_bool(curious_weight.clamp(0.0, 1.0)) {
                    ScenarioKind::Curious
                } else {
                    ScenarioKind::PassThrough
                }
            }
        }
    }
}

/// Seed of episode `index` in a batch seeded with `batch_seed`.
pub fn episode_seed(batch_seed: u64, index: u64) -> u64 {
    mix_seed(batch_seed, index)
}

/// Episode `index` of the batch seeded with `batch_seed`. [`run_batch`]
/// is this over `0..n`, so a batch can be split or resumed at any index.
pub fn run_indexed(
    agent: &mut Agent,
    world: &WorldConfig,
    est_cfg: &EstimatorConfig,
    mixture: Mixture,
    batch_seed: u64,
    index: u64,
    condition: Condition,
) -> Episode {
    let s = episode_seed(batch_seed, index);
    run_episode(agent, world, est_cfg, mixture.draw(s), s, index, condition)
}

/// Runs `n` episodes with ids `0..n`.
///
/// With `learning` on, episodes run in order and share the agent's table.
/// Otherwise each episode gets its own read-only copy of the agent and the
/// batch runs in parallel; the result does not depend on scheduling.
#[allow(clippy::too_many_arguments)]
pub fn run_batch(
    agent: &mut Agent,
    world: &WorldConfig,
    est_cfg: &EstimatorConfig,
    n: u64,
    mixture: Mixture,
    learning: bool,
    seed: u64,
    condition: Condition,
) -> Vec<Episode> {
    let one =
        |agent: &mut Agent, i: u64| run_indexed(agent, world, est_cfg, mixture, seed, i, condition);
    if learning {
        let saved = agent.learning;
        agent.learning = true;
        let episodes = (0..n).map(|i| one(agent, i)).collect();
        agent.learning = saved;
        episodes
    } else {
        let mut frozen = agent.clone();
        frozen.learning = false;
        (0..n)
            .into_par_iter()
            .map(|i| one(&mut frozen.clone(), i))
            .collect()
    }
}
