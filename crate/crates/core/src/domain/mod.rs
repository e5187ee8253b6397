//! Vocabulary shared by the learner, the estimator, the simulator and the
//! evaluation pipeline.

mod action;
mod episode;
mod params;
mod state;
mod trajectory;

pub use action::{Action, ActionKind};
pub use episode::{
    ActionEvent, Condition, ConfusionMatrix, Episode, ScenarioKind, SimLabels, TransitionEvent,
};
pub use params::{validate_params, LearnerParams};
pub use state::{BaseState, TransitionState};
pub use trajectory::{HeadAngle, PasserbyFrame, Pose, Trajectory};
