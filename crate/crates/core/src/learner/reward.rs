use crate::domain::{Action, BaseState, LearnerParams, TransitionState};

/// Engagement progress of a base state. `Established` ranks highest; losing
/// a passerby (`Leaving`, `NotFound`) ranks lowest.
pub fn state_rank(b: BaseState) -> i32 {
    match b {
        BaseState::NotFound => 0,
        BaseState::PassingBy => 1,
        BaseState::LookAt => 2,
        BaseState::Hesitating => 3,
        BaseState::Approaching => 4,
        BaseState::Established => 5,
        BaseState::Leaving => 0,
    }
}

/// Reward for taking `action` in `s_ta` and observing `s_tc` when it finished.
///
/// Non-wait actions pay `action_cost`. A rank drop after a non-wait action is
/// penalised by `discomfort_scale` per step; a rank gain earns `goal_scale`
/// per step regardless of the action.
pub fn reward(
    s_ta: TransitionState,
    action: Action,
    s_tc: TransitionState,
    params: &LearnerParams,
) -> f64 {
    let before = state_rank(s_ta.to);
    let after = state_rank(s_tc.to);
    let mut r = 0.0;
    if !action.is_wait() {
        r -= params.action_cost;
    }
    if after < before && !action.is_wait() {
        r -= params.discomfort_scale * f64::from(before - after);
    }
    if after > before {
        r += params.goal_scale * f64::from(after - before);
    }
    r
}
