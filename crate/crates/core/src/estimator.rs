//! Rule-based passerby state estimator.
//!
//! Each frame is classified into a [`BaseState`] from the recent trajectory:
//! position and velocity relative to the exhibit, and where the head points.
//! Velocities are least-squares slopes over a short sliding window and gaze is
//! the circular mean of the head yaw over the same window, which keeps sensor
//! jitter from flipping states frame to frame.
//!
//! The rules are tried in a fixed order and the first match wins:
//!
//! 1. `NotFound` when nobody is detected.
//! 2. `Established` when the passerby has stood close to the exhibit, facing
//!    it, for the dwell time (or was already established and still is).
//! 3. `Leaving` when a passerby who had shown interest moves radially away
//!    faster than walking pace.
//! 4. `Approaching` when walking toward the exhibit with a closing distance,
//!    or when arrived in front of it but not yet established.
//! 5. `Hesitating` when slow and the gaze switches in and out of the exhibit.
//! 6. `LookAt` when the gaze is on the exhibit.
//! 7. `PassingBy` otherwise.

use serde::{Deserialize, Serialize};

use crate::domain::{BaseState, PasserbyFrame, TransitionEvent, TransitionState};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorConfig {
    pub exhibit_pos: [f64; 2],
    pub engage_radius: f64,
    pub look_cone_rad: f64,
    pub walk_speed_min: f64,
    pub dwell_established_s: f64,
    pub approach_dot_min: f64,
    /// Sliding window for velocity and gaze.
    pub window_s: f64,
    /// Look-back span for gaze alternation.
    pub alternation_s: f64,
    /// Period of the self-transition tick in the decision stream.
    pub tick_s: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            exhibit_pos: [0.0, 0.0],
            engage_radius: 1.0,
            look_cone_rad: 0.5,
            walk_speed_min: 0.3,
            dwell_established_s: 3.0,
            approach_dot_min: 0.5,
            window_s: 0.5,
            alternation_s: 2.0,
            tick_s: 1.0,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("engage_radius", self.engage_radius),
            ("look_cone_rad", self.look_cone_rad),
            ("walk_speed_min", self.walk_speed_min),
            ("dwell_established_s", self.dwell_established_s),
            ("approach_dot_min", self.approach_dot_min),
            ("window_s", self.window_s),
            ("alternation_s", self.alternation_s),
            ("tick_s", self.tick_s),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!(
                    "estimator.{name} must be positive, got {v}"
                )));
            }
        }
        if !self.exhibit_pos.iter().all(|v| v.is_finite()) {
            return Err(Error::Config("estimator.exhibit_pos must be finite".into()));
        }
        Ok(())
    }

    /// How far back the rules ever look.
    fn horizon_s(&self) -> f64 {
        self.dwell_established_s.max(self.alternation_s) + self.window_s + 0.5
    }
}

/// Estimator output for one frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatedState {
    pub base: BaseState,
    pub transition: TransitionState,
    pub t: f64,
}

/// `s_{prev,curr}`.
pub fn step_transition(prev: BaseState, curr: BaseState) -> TransitionState {
    TransitionState::new(prev, curr)
}

// Slack for comparing frame times that are multiples of the timestep.
const TIME_EPS: f64 = 1e-9;

fn wrap_angle(a: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut a = a % two_pi;
    if a > std::f64::consts::PI {
        a -= two_pi;
    } else if a < -std::f64::consts::PI {
        a += two_pi;
    }
    a
}

fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

/// Kinematic features at one frame of a history.
struct Features {
    pos: [f64; 2],
    dist: f64,
    velocity: Option<[f64; 2]>,
    /// Smoothed absolute angle between head yaw and the exhibit bearing.
    gaze_offset: f64,
    /// Same, unsmoothed.
    raw_gaze_offset: f64,
}

impl Features {
    fn speed(&self) -> Option<f64> {
        self.velocity.map(norm)
    }
}

/// Indices of detected frames in `[t - span, t]`, contiguous detections only.
fn window_start(history: &[PasserbyFrame], idx: usize, span: f64) -> usize {
    let t = history[idx].t;
    let mut start = idx;
    while start > 0 {
        let prev = &history[start - 1];
        if prev.pose.is_none() || prev.t < t - span - TIME_EPS {
            break;
        }
        start -= 1;
    }
    start
}

fn features_at(history: &[PasserbyFrame], idx: usize, cfg: &EstimatorConfig) -> Option<Features> {
    let pose = history[idx].pose?;
    let pos = pose.xy();
    let to_exhibit = [cfg.exhibit_pos[0] - pos[0], cfg.exhibit_pos[1] - pos[1]];
    let dist = norm(to_exhibit);
    let bearing = to_exhibit[1].atan2(to_exhibit[0]);

    let start = window_start(history, idx, cfg.window_s);
    let window = &history[start..=idx];

    // Least-squares slope of x(t) and y(t).
    let velocity = if window.len() >= 3 {
        let n = window.len() as f64;
        let t_mean = window.iter().map(|f| f.t).sum::<f64>() / n;
        let mut sxx = 0.0;
        let mut sxy = [0.0, 0.0];
        let mut mean = [0.0, 0.0];
        for f in window {
            let p = f.pose.expect("window holds detections").p;
            mean[0] += p[0] / n;
            mean[1] += p[1] / n;
        }
        for f in window {
            let p = f.pose.expect("window holds detections").p;
            let dt = f.t - t_mean;
            sxx += dt * dt;
            sxy[0] += dt * (p[0] - mean[0]);
            sxy[1] += dt * (p[1] - mean[1]);
        }
        Some([sxy[0] / sxx, sxy[1] / sxx])
    } else {
        None
    };

    let (mut sin, mut cos) = (0.0, 0.0);
    for f in window {
        let yaw = f.pose.expect("window holds detections").theta.yaw;
        sin += yaw.sin();
        cos += yaw.cos();
    }
    let mean_yaw = sin.atan2(cos);

    Some(Features {
        pos,
        dist,
        velocity,
        gaze_offset: wrap_angle(mean_yaw - bearing).abs(),
        raw_gaze_offset: wrap_angle(pose.theta.yaw - bearing).abs(),
    })
}

/// Close to the exhibit, still, and facing it.
fn engaged_pose(f: &Features, cfg: &EstimatorConfig) -> bool {
    f.dist <= cfg.engage_radius
        && f.speed().is_some_and(|s| s < cfg.walk_speed_min)
        && f.gaze_offset <= cfg.look_cone_rad
}

/// Engaged pose held at every frame of the last `dwell_established_s`.
fn dwelled(history: &[PasserbyFrame], idx: usize, cfg: &EstimatorConfig) -> bool {
    let t = history[idx].t;
    let start = window_start(history, idx, cfg.dwell_established_s);
    if history[start].t > t - cfg.dwell_established_s + TIME_EPS {
        return false;
    }
    (start..=idx).all(|k| features_at(history, k, cfg).is_some_and(|f| engaged_pose(&f, cfg)))
}

fn gaze_alternates(history: &[PasserbyFrame], idx: usize, cfg: &EstimatorConfig) -> bool {
    let start = window_start(history, idx, cfg.alternation_s);
    let mut switches = 0;
    let mut last: Option<bool> = None;
    for k in start..=idx {
        let Some(f) = features_at(history, k, cfg) else {
            continue;
        };
        let inside = f.raw_gaze_offset <= cfg.look_cone_rad;
        if last.is_some_and(|l| l != inside) {
            switches += 1;
        }
        last = Some(inside);
    }
    switches >= 2
}

/// Classifies the last frame of `history`.
///
/// `history` must end with `frame`; an empty history is treated as the
/// first detection with `prev = NotFound`.
pub fn classify_base(
    frame: &PasserbyFrame,
    history: &[PasserbyFrame],
    cfg: &EstimatorConfig,
    prev: BaseState,
) -> BaseState {
    let single = [*frame];
    let (history, prev) = if history.is_empty() {
        (&single[..], BaseState::NotFound)
    } else {
        (history, prev)
    };
    debug_assert_eq!(history.last().map(|f| f.t), Some(frame.t));
    let idx = history.len() - 1;

    let Some(f) = features_at(history, idx, cfg) else {
        return BaseState::NotFound;
    };

    let pose_held = engaged_pose(&f, cfg);
    if pose_held && (prev == BaseState::Established || dwelled(history, idx, cfg)) {
        return BaseState::Established;
    }

    if let Some(v) = f.velocity {
        let speed = norm(v);
        let interested = matches!(
            prev,
            BaseState::Established
                | BaseState::Approaching
                | BaseState::Hesitating
                | BaseState::Leaving
        );
        if interested && f.dist > 0.0 {
            let away = [f.pos[0] - cfg.exhibit_pos[0], f.pos[1] - cfg.exhibit_pos[1]];
            let radial = (v[0] * away[0] + v[1] * away[1]) / f.dist;
            if radial > cfg.walk_speed_min {
                return BaseState::Leaving;
            }
        }
        // The windowed velocity lags a passerby who just turned to go.
        if prev == BaseState::Established && f.dist <= cfg.engage_radius {
            return BaseState::Established;
        }

        if speed >= cfg.walk_speed_min && f.dist > 0.0 {
            let toward = [
                (cfg.exhibit_pos[0] - f.pos[0]) / f.dist,
                (cfg.exhibit_pos[1] - f.pos[1]) / f.dist,
            ];
            let heading = (v[0] * toward[0] + v[1] * toward[1]) / speed;
            // Closing speed equals the heading component, so a positive
            // heading already implies a shrinking distance.
            if heading >= cfg.approach_dot_min {
                return BaseState::Approaching;
            }
        }
    }
    if pose_held && matches!(prev, BaseState::Approaching | BaseState::Established) {
        return BaseState::Approaching;
    }

    if f.speed().is_some_and(|s| s < cfg.walk_speed_min) && gaze_alternates(history, idx, cfg) {
        return BaseState::Hesitating;
    }

    if f.gaze_offset <= cfg.look_cone_rad {
        return BaseState::LookAt;
    }

    BaseState::PassingBy
}

/// Streaming estimator for one passerby.
///
/// Besides the per-frame estimate it produces the decision stream consumed
/// by the learner: an event whenever the base state changes, and a
/// self-transition tick when it has not changed for `tick_s`.
#[derive(Debug, Clone)]
pub struct Estimator {
    cfg: EstimatorConfig,
    history: Vec<PasserbyFrame>,
    prev: BaseState,
    last_event_t: Option<f64>,
}

impl Estimator {
    pub fn new(cfg: EstimatorConfig) -> Self {
        Self {
            cfg,
            history: Vec::new(),
            prev: BaseState::NotFound,
            last_event_t: None,
        }
    }

    pub fn config(&self) -> &EstimatorConfig {
        &self.cfg
    }

    pub fn current(&self) -> BaseState {
        self.prev
    }

    pub fn push(&mut self, frame: PasserbyFrame) -> (EstimatedState, Option<TransitionEvent>) {
        let horizon = self.cfg.horizon_s();
        let keep_from = self
            .history
            .partition_point(|f| f.t < frame.t - horizon - TIME_EPS);
        self.history.drain(..keep_from);
        self.history.push(frame);

        let prev = self.prev;
        let base = classify_base(&frame, &self.history, &self.cfg, prev);
        let transition = step_transition(prev, base);
        self.prev = base;

        let event = match self.last_event_t {
            None => Some(transition),
            Some(_) if base != prev => Some(transition),
            Some(last) if frame.t - last >= self.cfg.tick_s - TIME_EPS => Some(transition),
            Some(_) => None,
        };
        let event = event.map(|state| {
            self.last_event_t = Some(frame.t);
            TransitionEvent { t: frame.t, state }
        });
        (
            EstimatedState {
                base,
                transition,
                t: frame.t,
            },
            event,
        )
    }
}

/// Runs a fresh estimator over a recorded trajectory.
pub fn estimate_all(frames: &[PasserbyFrame], cfg: &EstimatorConfig) -> Vec<EstimatedState> {
    let mut est = Estimator::new(cfg.clone());
    frames.iter().map(|f| est.push(*f).0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{HeadAngle, Pose};

    const DT: f64 = 0.1;

    fn pose(x: f64, y: f64, yaw: f64) -> Pose {
        Pose {
            p: [x, y, 1.6],
            theta: HeadAngle {
                yaw,
                roll: 0.0,
                pitch: 0.0,
            },
        }
    }

    fn bearing_to_exhibit(x: f64, y: f64) -> f64 {
        (-y).atan2(-x)
    }

    /// Frames sampled from a motion function at `DT`.
    fn synth(n: usize, mut f: impl FnMut(f64) -> Option<Pose>) -> Vec<PasserbyFrame> {
        (0..n)
            .map(|k| {
                let t = k as f64 * DT;
                PasserbyFrame { t, pose: f(t) }
            })
            .collect()
    }

    fn run(frames: &[PasserbyFrame]) -> Vec<BaseState> {
        estimate_all(frames, &EstimatorConfig::default())
            .into_iter()
            .map(|e| e.base)
            .collect()
    }

    #[test]
    fn nobody_is_not_found() {
        let frame = PasserbyFrame::missing(0.0);
        let cfg = EstimatorConfig::default();
        assert_eq!(
            classify_base(&frame, &[], &cfg, BaseState::Established),
            BaseState::NotFound
        );
        assert_eq!(run(&synth(5, |_| None)), vec![BaseState::NotFound; 5]);
    }

    #[test]
    fn aisle_walker_looking_ahead_is_passing_by() {
        // 1.2 m/s along the aisle at y = 5, head pointing along +x.
        let frames = synth(40, |t| Some(pose(-2.4 + 1.2 * t, 5.0, 0.0)));
        assert!(run(&frames).iter().all(|b| *b == BaseState::PassingBy));
    }

    #[test]
    fn standing_at_exhibit_becomes_established() {
        let (x, y) = (0.0, 0.6);
        let yaw = bearing_to_exhibit(x, y);
        let frames = synth(41, |_| Some(pose(x, y, yaw)));
        let states = run(&frames);
        assert_eq!(*states.last().unwrap(), BaseState::Established);
        // Not before the dwell time has elapsed.
        assert_ne!(states[25], BaseState::Established);
        let first = states
            .iter()
            .position(|b| *b == BaseState::Established)
            .unwrap();
        // Velocity needs three frames, so the dwell clock starts at the third.
        assert!(
            (frames[first].t - 3.2).abs() < 0.05,
            "established at {}",
            frames[first].t
        );
    }

    #[test]
    fn walking_straight_at_the_exhibit_is_approaching() {
        let frames = synth(30, |t| {
            Some(pose(0.0, 5.0 - 0.8 * t, -std::f64::consts::FRAC_PI_2))
        });
        let states = run(&frames);
        assert!(
            states[3..].iter().all(|b| *b == BaseState::Approaching),
            "{states:?}"
        );
    }

    #[test]
    fn walking_with_gaze_on_exhibit_is_look_at() {
        let frames = synth(20, |t| {
            let (x, y) = (-2.4 + 0.8 * t, 5.0);
            Some(pose(x, y, bearing_to_exhibit(x, y)))
        });
        assert!(run(&frames).iter().all(|b| *b == BaseState::LookAt));
    }

    #[test]
    fn standing_with_alternating_gaze_is_hesitating() {
        let (x, y) = (-1.2, 5.0);
        let frames = synth(40, |t| {
            let yaw = if (t / 0.7).floor() as i64 % 2 == 0 {
                bearing_to_exhibit(x, y)
            } else {
                0.0
            };
            Some(pose(x, y, yaw))
        });
        let states = run(&frames);
        assert!(
            states[20..].iter().all(|b| *b == BaseState::Hesitating),
            "{states:?}"
        );
    }

    #[test]
    fn walking_away_after_engagement_is_leaving() {
        let frames = synth(60, |t| {
            if t < 4.0 {
                Some(pose(0.0, 0.6, bearing_to_exhibit(0.0, 0.6)))
            } else {
                let d = (t - 4.0) * 1.1;
                Some(pose(0.6 * d, 0.6 + 0.8 * d, 0.9))
            }
        });
        let states = run(&frames);
        assert_eq!(states[38], BaseState::Established);
        assert!(
            states[50..].iter().all(|b| *b == BaseState::Leaving),
            "{states:?}"
        );
    }

    #[test]
    fn not_found_only_when_undetected() {
        let frames = synth(30, |t| {
            if (1.0..1.5).contains(&t) {
                None
            } else {
                Some(pose(t, 5.0, 0.0))
            }
        });
        for (f, b) in frames.iter().zip(run(&frames)) {
            assert_eq!(f.is_detected(), b != BaseState::NotFound);
        }
    }

    #[test]
    fn step_transition_examples() {
        assert_eq!(
            step_transition(BaseState::NotFound, BaseState::NotFound).symbol(),
            "s00"
        );
        assert_eq!(
            step_transition(BaseState::NotFound, BaseState::PassingBy).symbol(),
            "s01"
        );
        assert_eq!(
            step_transition(BaseState::Leaving, BaseState::Leaving).symbol(),
            "s66"
        );
    }

    #[test]
    fn decision_stream_changes_and_ticks() {
        let frames = synth(35, |t| Some(pose(-2.4 + 1.2 * t, 5.0, 0.0)));
        let mut est = Estimator::new(EstimatorConfig::default());
        let events: Vec<_> = frames.iter().filter_map(|f| est.push(*f).1).collect();
        let symbols: Vec<_> = events.iter().map(|e| e.state.symbol()).collect();
        assert_eq!(symbols, vec!["s01", "s11", "s11", "s11"]);
        let times: Vec<_> = events.iter().map(|e| (e.t * 10.0).round() as i64).collect();
        assert_eq!(times, vec![0, 10, 20, 30]);
    }

    #[test]
    fn estimates_chain_consistently() {
        let frames = synth(80, |t| {
            if t < 1.0 {
                None
            } else if t < 4.0 {
                Some(pose(
                    -2.4 + 0.8 * (t - 1.0),
                    5.0,
                    bearing_to_exhibit(-2.4 + 0.8 * (t - 1.0), 5.0),
                ))
            } else {
                Some(pose(0.0, 0.6, bearing_to_exhibit(0.0, 0.6)))
            }
        });
        let estimates = estimate_all(&frames, &EstimatorConfig::default());
        for pair in estimates.windows(2) {
            assert_eq!(pair[1].transition.from, pair[0].transition.to);
            assert_eq!(pair[1].transition.to, pair[1].base);
        }
    }

    #[test]
    fn invalid_config_rejected() {
        let cfg = EstimatorConfig {
            engage_radius: 0.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        assert!(EstimatorConfig::default().validate().is_ok());
    }
}
