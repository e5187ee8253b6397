//! User-centered Q-learning: action selection, policy update, reward and the
//! designed initial table.

mod policy;
mod reward;

pub use policy::{select_action, softmax_probabilities, PolicyKind};
pub use reward::{reward, state_rank};

use rand::Rng;

use crate::domain::{Action, BaseState, LearnerParams, TransitionState};
use crate::qtable::QTable;

/// The designed starting table `Q_B`.
///
/// Greeting a passerby right after first detection is worth `q_C`; explaining
/// the service on arrival at `Established`, and saying goodbye when an
/// engaged passerby leaves or disappears, are worth `q_H`. Everything else
/// starts at zero.
pub fn make_initial_q(params: &LearnerParams) -> QTable {
    let mut q = QTable::zeros();
    let s = |i, j| TransitionState::from_codes(i, j).expect("codes below 7");
    for j in 1..=5 {
        q.set(s(0, j), Action::Greet, params.q_c);
    }
    for i in 1..=4 {
        q.set(s(i, 5), Action::ExplainService, params.q_h);
    }
    q.set(s(5, 6), Action::Goodbye, params.q_h);
    q.set(s(5, 0), Action::Goodbye, params.q_h);
    q
}

/// Advances the soft-max temperature of `s` by one update.
///
/// `T <- k_T * T` while `T >= T_min`; once `T` has dropped below the floor it
/// stays where it is. The update count grows either way.
pub fn update_temperature(table: &mut QTable, s: TransitionState, params: &LearnerParams) {
    let t = table.temperature(s);
    let next = if t < params.t_min { t } else { params.k_t * t };
    table.set_stats(s, table.visits(s) + 1, next);
}

/// Policy updater. Applies one Q-learning step for `(s_ta, a_ta)` once the
/// action has finished and returns the reward used; does nothing otherwise.
pub fn update_policy(
    table: &mut QTable,
    s_ta: TransitionState,
    a_ta: Action,
    s_tc: TransitionState,
    finished: bool,
    params: &LearnerParams,
) -> Option<f64> {
    if !finished {
        return None;
    }
    let r = reward(s_ta, a_ta, s_tc, params);
    let target = r + params.gamma * table.max_value(s_tc);
    apply(table, s_ta, a_ta, target, params);
    Some(r)
}

/// Update for an action cut short by the end of the episode: the reward is
/// computed against `s_tc` but nothing is bootstrapped past the episode.
pub fn update_terminal(
    table: &mut QTable,
    s_ta: TransitionState,
    a_ta: Action,
    s_tc: TransitionState,
    params: &LearnerParams,
) -> f64 {
    let r = reward(s_ta, a_ta, s_tc, params);
    apply(table, s_ta, a_ta, r, params);
    r
}

fn apply(table: &mut QTable, s: TransitionState, a: Action, target: f64, params: &LearnerParams) {
    let old = table.get(s, a);
    table.set(s, a, (1.0 - params.alpha) * old + params.alpha * target);
    update_temperature(table, s, params);
}

/// A robot running UCQL over one table.
#[derive(Debug, Clone)]
pub struct Agent {
    pub table: QTable,
    pub params: LearnerParams,
    pub policy: PolicyKind,
    pub learning: bool,
}

impl Agent {
    pub fn new(table: QTable, params: LearnerParams, policy: PolicyKind, learning: bool) -> Self {
        Self {
            table,
            params,
            policy,
            learning,
        }
    }

    /// Agent starting from `Q_B`.
    pub fn designed(params: LearnerParams, policy: PolicyKind, learning: bool) -> Self {
        Self::new(make_initial_q(&params), params, policy, learning)
    }

    pub fn select<R: Rng + ?Sized>(
        &self,
        t_c: f64,
        s: TransitionState,
        rng: &mut R,
    ) -> (Action, f64) {
        select_action(t_c, s, &self.table, self.policy, rng)
    }

    /// Reports a finished action. Returns the reward when learning is on.
    pub fn finish(
        &mut self,
        s_ta: TransitionState,
        a: Action,
        s_tc: TransitionState,
    ) -> Option<f64> {
        if !self.learning {
            return None;
        }
        update_policy(&mut self.table, s_ta, a, s_tc, true, &self.params)
    }

    /// Reports an action interrupted by the passerby leaving.
    pub fn finish_terminal(
        &mut self,
        s_ta: TransitionState,
        a: Action,
        last_base: BaseState,
    ) -> Option<f64> {
        if !self.learning {
            return None;
        }
        let s_tc = TransitionState::new(s_ta.to, last_base);
        Some(update_terminal(
            &mut self.table,
            s_ta,
            a,
            s_tc,
            &self.params,
        ))
    }
}
