//! Evaluation: cleansing, call/use classification, confusion matrices,
//! the before/after proportion test and Q-table exports.

mod cleanse;
mod heatmap;
mod report;
mod stats;

pub use cleanse::{cleanse, CleanseRules};
pub use heatmap::{export_heatmap, render_heatmap, HeatmapFormat, CELL_PX};
pub use report::{write_report, Comparison};
pub use stats::{
    accuracy, normal_pdf, normal_upper_tail, proportion_test, TestResult, REPORTED_LEVELS,
};

use crate::domain::{ConfusionMatrix, Episode};
use crate::error::{Error, Result};

/// `(called, used)` for one episode: whether the robot issued a verbal
/// attract call, and whether the passerby used the service.
pub fn classify_episode(e: &Episode) -> Result<(bool, bool)> {
    let called = e.events.iter().any(|a| a.action.is_attract_call());
    let labels = e.labels.ok_or(Error::MissingLabels(e.id))?;
    Ok((called, labels.used_service))
}

pub fn confusion_matrix<I>(classified: I) -> ConfusionMatrix
where
    I: IntoIterator<Item = (bool, bool)>,
{
    let mut m = ConfusionMatrix::default();
    for pair in classified {
        match pair {
            (true, true) => m.tp += 1,
            (true, false) => m.fp += 1,
            (false, true) => m.fn_ += 1,
            (false, false) => m.tn += 1,
        }
    }
    m
}

/// Classifies every episode and counts the outcomes.
pub fn evaluate_episodes(episodes: &[Episode]) -> Result<ConfusionMatrix> {
    let classified = episodes
        .iter()
        .map(classify_episode)
        .collect::<Result<Vec<_>>>()?;
    Ok(confusion_matrix(classified))
}
