use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{Action, TransitionState};
use crate::error::{Error, Result};
use crate::qtable::QTable;

/// How the robot turns a row of action values into a choice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicyKind {
    Greedy,
    EpsilonGreedy {
        epsilon: f64,
    },
    /// Boltzmann selection using the state's annealed temperature.
    Softmax,
}

impl PolicyKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PolicyKind::EpsilonGreedy { epsilon } if !(0.0..=1.0).contains(&epsilon) => {
                Err(Error::InvalidParam {
                    field: "epsilon",
                    message: "epsilon must be in [0,1]".into(),
                })
            }
            _ => Ok(()),
        }
    }
}

/// Boltzmann probabilities `exp(q_i / T) / sum_j exp(q_j / T)`.
///
/// The row maximum is subtracted before exponentiating, so rows with large
/// values at small temperatures do not overflow.
pub fn softmax_probabilities(q_row: &[f64], temperature: f64) -> Result<Vec<f64>> {
    if !(temperature > 0.0) {
        return Err(Error::NonPositiveTemperature(temperature));
    }
    let max = q_row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut weights: Vec<f64> = q_row
        .iter()
        .map(|q| ((q - max) / temperature).exp())
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    Ok(weights)
}

/// Draws an index from a discrete distribution with one uniform variate.
fn sample_index<R: Rng + ?Sized>(probabilities: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probabilities.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // Rounding can leave the cumulative sum a hair under 1.
    probabilities.iter().rposition(|p| *p > 0.0).unwrap_or(0)
}

/// Action selector: picks `a` for the state observed at `t_c` and stamps it
/// with `t_a = t_c`.
pub fn select_action<R: Rng + ?Sized>(
    t_c: f64,
    s: TransitionState,
    table: &QTable,
    policy: PolicyKind,
    rng: &mut R,
) -> (Action, f64) {
    let action = match policy {
        PolicyKind::Greedy => table.greedy_action(s),
        PolicyKind::EpsilonGreedy { epsilon } => {
            if rng.random::<f64>() < epsilon {
                Action::from_index(rng.random_range(0..Action::COUNT)).expect("index in range")
            } else {
                table.greedy_action(s)
            }
        }
        PolicyKind::Softmax => {
            let probabilities = softmax_probabilities(table.row(s), table.temperature(s))
                .expect("table temperatures stay positive");
            Action::from_index(sample_index(&probabilities, rng)).expect("index in range")
        }
    };
    (action, t_c)
}
