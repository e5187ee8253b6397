use rand::Rng;
use serde::{Deserialize, Serialize};

use super::scenario::{Disposition, Gaze, Plan};
use super::world::{BehaviorParams, Layout};
use crate::domain::{Action, ActionKind, BaseState, ScenarioKind};

/// How a passerby reacts to a robot action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BehaviorModifier {
    None,
    /// Head for the exhibit right away.
    Divert,
    /// Annoyed: hurry out of the area.
    Annoy,
    /// Look at the robot for a moment.
    Glance,
}

/// Draws the reaction to `action`, delivered while the passerby is in
/// `truth` (the simulator's ground-truth base state).
pub fn passerby_response<R: Rng + ?Sized>(
    disposition: &Disposition,
    truth: BaseState,
    action: Action,
    params: &BehaviorParams,
    rng: &mut R,
) -> BehaviorModifier {
    match disposition.kind {
        ScenarioKind::Curious
            if action.is_attract_call()
                && matches!(truth, BaseState::LookAt | BaseState::Hesitating) =>
        {
            let p = (disposition.interest + params.greeting_boost).min(1.0);
            if rng.random_bool(p) {
                return BehaviorModifier::Divert;
            }
        }
        ScenarioKind::PassThrough
            if action.kind() == ActionKind::Verbal
                && truth == BaseState::PassingBy
                && rng.random_bool(params.annoy_prob) =>
        {
            return BehaviorModifier::Annoy;
        }
        _ => {}
    }
    if matches!(action, Action::LookAtPasserby | Action::ExpressJoy)
        && rng.random_bool(params.gaze_attraction)
    {
        return BehaviorModifier::Glance;
    }
    BehaviorModifier::None
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Phase {
    Walking,
    Dwelling { elapsed: f64 },
}

/// Ground-truth kinematics of one passerby following a [`Plan`].
#[derive(Debug, Clone)]
pub struct Passerby {
    plan: Plan,
    pos: [f64; 2],
    heading: f64,
    /// Index into the plan's waypoints; `waypoints.len()` means heading for the exit.
    leg: usize,
    phase: Phase,
    speed_factor: f64,
    glance_left: f64,
    engaged: bool,
    extra_dwell: f64,
    served: bool,
    discomforted: bool,
}

impl Passerby {
    pub fn new(plan: Plan) -> Self {
        let first = plan.waypoints.first().map_or(plan.exit, |w| w.pos);
        let heading = (first[1] - plan.entry[1]).atan2(first[0] - plan.entry[0]);
        Self {
            pos: plan.entry,
            heading,
            leg: 0,
            phase: Phase::Walking,
            speed_factor: 1.0,
            glance_left: 0.0,
            engaged: false,
            extra_dwell: 0.0,
            served: false,
            discomforted: false,
            plan,
        }
    }

    pub fn plan(&self) -> &Plan {
        &self.plan
    }

    pub fn position(&self) -> [f64; 2] {
        self.pos
    }

    pub fn served(&self) -> bool {
        self.served
    }

    pub fn discomforted(&self) -> bool {
        self.discomforted
    }

    fn exiting(&self) -> bool {
        self.leg >= self.plan.waypoints.len()
    }

    fn target(&self) -> [f64; 2] {
        self.plan
            .waypoints
            .get(self.leg)
            .map_or(self.plan.exit, |w| w.pos)
    }

    fn viewing(&self) -> bool {
        self.plan.disposition.kind == ScenarioKind::Curious && self.leg == Plan::VIEWING_LEG
    }

    /// The state a perfect observer would assign.
    pub fn truth_state(&self, behavior: &BehaviorParams) -> BaseState {
        match self.plan.disposition.kind {
            ScenarioKind::PassThrough => {
                if self.glance_left > 0.0 {
                    BaseState::LookAt
                } else {
                    BaseState::PassingBy
                }
            }
            ScenarioKind::Curious => match (self.leg, self.phase) {
                (Plan::HESITATION_LEG, Phase::Walking) => BaseState::LookAt,
                (Plan::HESITATION_LEG, Phase::Dwelling { .. }) => BaseState::Hesitating,
                (Plan::VIEWING_LEG, Phase::Walking) => BaseState::Approaching,
                (Plan::VIEWING_LEG, Phase::Dwelling { elapsed }) => {
                    if elapsed >= behavior.established_after_s {
                        BaseState::Established
                    } else {
                        BaseState::Approaching
                    }
                }
                _ if self.engaged => BaseState::Leaving,
                _ => BaseState::PassingBy,
            },
        }
    }

    /// Applies a reaction drawn by [`passerby_response`].
    pub fn apply(&mut self, modifier: BehaviorModifier, behavior: &BehaviorParams) {
        match modifier {
            BehaviorModifier::None => {}
            BehaviorModifier::Divert => {
                if self.leg == Plan::HESITATION_LEG && !self.engaged {
                    self.engaged = true;
                    self.leg = Plan::VIEWING_LEG;
                    self.phase = Phase::Walking;
                }
            }
            BehaviorModifier::Annoy => {
                self.discomforted = true;
                self.speed_factor = behavior.hurry_factor;
            }
            BehaviorModifier::Glance => self.glance_left = behavior.glance_s,
        }
    }

    /// The robot starts explaining its service. Only an engaged visitor
    /// takes it up; they stay on for the length of the service.
    pub fn offer_service(&mut self, behavior: &BehaviorParams) -> bool {
        if self.served || self.truth_state(behavior) != BaseState::Established {
            return false;
        }
        self.served = true;
        self.extra_dwell = behavior.service_time_s;
        true
    }

    /// Current head yaw.
    pub fn yaw(&self, layout: &Layout, behavior: &BehaviorParams) -> f64 {
        let to_exhibit = (layout.exhibit[1] - self.pos[1]).atan2(layout.exhibit[0] - self.pos[0]);
        if self.glance_left > 0.0 {
            return to_exhibit;
        }
        let gaze = match (self.plan.waypoints.get(self.leg), self.phase) {
            (Some(w), Phase::Walking) => w.walk_gaze,
            (Some(w), Phase::Dwelling { .. }) => w.dwell_gaze,
            (None, _) => Gaze::Ahead,
        };
        match gaze {
            Gaze::Ahead => self.heading,
            Gaze::Exhibit => to_exhibit,
            Gaze::Alternate => {
                let elapsed = match self.phase {
                    Phase::Dwelling { elapsed } => elapsed,
                    Phase::Walking => 0.0,
                };
                if ((elapsed / behavior.gaze_switch_s).floor() as i64) % 2 == 0 {
                    to_exhibit
                } else {
                    self.heading
                }
            }
        }
    }

    /// Advances by `dt` seconds. The engage decision at the end of a
    /// hesitation is drawn from `rng`.
    pub fn step<R: Rng + ?Sized>(&mut self, dt: f64, rng: &mut R) {
        self.glance_left = (self.glance_left - dt).max(0.0);
        match self.phase {
            Phase::Walking => {
                let target = self.target();
                let speed = self
                    .plan
                    .waypoints
                    .get(self.leg)
                    .map_or(self.plan.disposition.walk_speed, |w| w.speed)
                    * self.speed_factor;
                let dx = target[0] - self.pos[0];
                let dy = target[1] - self.pos[1];
                let dist = dx.hypot(dy);
                let stride = speed * dt;
                if dist > 1e-9 {
                    self.heading = dy.atan2(dx);
                }
                if dist <= stride {
                    self.pos = target;
                    if self.exiting() {
                        // Keep walking in the same direction past the exit point.
                        let rest = stride - dist;
                        self.pos[0] += rest * self.heading.cos();
                        self.pos[1] += rest * self.heading.sin();
                    } else {
                        self.phase = Phase::Dwelling { elapsed: 0.0 };
                    }
                } else {
                    self.pos[0] += stride * dx / dist;
                    self.pos[1] += stride * dy / dist;
                }
            }
            Phase::Dwelling { elapsed } => {
                let elapsed = elapsed + dt;
                let wp = self.plan.waypoints[self.leg];
                let total = wp.dwell_s
                    + if self.viewing() {
                        self.extra_dwell
                    } else {
                        0.0
                    };
                if elapsed + 1e-9 >= total {
                    self.finish_dwell(rng);
                } else {
                    self.phase = Phase::Dwelling { elapsed };
                }
            }
        }
    }

    fn finish_dwell<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let curious = self.plan.disposition.kind == ScenarioKind::Curious;
        if curious && self.leg == Plan::HESITATION_LEG {
            if rng.random_bool(self.plan.disposition.interest.clamp(0.0, 1.0)) {
                self.engaged = true;
                self.leg = Plan::VIEWING_LEG;
            } else {
                self.leg = self.plan.waypoints.len();
            }
        } else {
            self.leg += 1;
        }
        self.phase = Phase::Walking;
    }
}
