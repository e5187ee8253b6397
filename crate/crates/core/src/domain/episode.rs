use serde::{Deserialize, Serialize};

use super::{Action, Trajectory, TransitionState};

/// The two passerby scenarios of the office entrance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    /// Heading from the seats to the restroom; not interested in the exhibit.
    PassThrough,
    /// Bored of waiting and drawn to the exhibit.
    Curious,
}

/// Which Q-table produced an episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Training,
    Before,
    After,
}

/// One robot action as logged by the experimental system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionEvent {
    pub t_a: f64,
    pub action: Action,
    pub state_at_selection: TransitionState,
    pub finished: bool,
}

/// A timestamped learner state from the estimator's change/tick stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionEvent {
    pub t: f64,
    pub state: TransitionState,
}

/// Ground truth known only to the simulator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimLabels {
    pub used_service: bool,
    pub discomforted: bool,
}

/// One passerby's visit to the sensed area.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Episode {
    pub id: u64,
    pub condition: Condition,
    pub scenario: Option<ScenarioKind>,
    pub frames: Trajectory,
    pub transitions: Vec<TransitionEvent>,
    pub events: Vec<ActionEvent>,
    /// Absent for field recordings.
    pub labels: Option<SimLabels>,
    /// Set when the episode hit the hard duration cap.
    #[serde(default)]
    pub truncated: bool,
}

impl Episode {
    /// `T_end` in seconds.
    pub fn duration(&self) -> f64 {
        self.frames.duration()
    }
}

/// Binary outcome counts where the prediction is "called" and the truth is "used".
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub const fn new(tp: u64, fp: u64, fn_: u64, tn: u64) -> Self {
        Self { tp, fp, fn_, tn }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn correct(&self) -> u64 {
        self.tp + self.tn
    }
}

impl std::fmt::Display for ConfusionMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "(TP,FP,FN,TN)=({},{},{},{})",
            self.tp, self.fp, self.fn_, self.tn
        )
    }
}
