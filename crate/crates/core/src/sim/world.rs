use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned rectangle on the floor plan, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl Rect {
    pub const fn new(min: [f64; 2], max: [f64; 2]) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.min[0] && p[0] <= self.max[0] && p[1] >= self.min[1] && p[1] <= self.max[1]
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.max[0] > self.min[0] && self.max[1] > self.min[1])
    }

    pub fn center(&self) -> [f64; 2] {
        [
            (self.min[0] + self.max[0]) / 2.0,
            (self.min[1] + self.max[1]) / 2.0,
        ]
    }
}

/// Floor plan of the entrance. The exhibit faces +y from the origin; the
/// aisle runs along x between the seats (west) and the restroom (east).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Layout {
    pub exhibit: [f64; 2],
    pub sensing: Rect,
    pub exhibition_space: Rect,
    pub aisle: Rect,
    pub seat_space: Rect,
    pub wc_path: Rect,
    /// Distance from the exhibit at which a curious visitor stops to watch.
    pub viewing_distance: f64,
}

impl Default for Layout {
    fn default() -> Self {
        Self {
            exhibit: [0.0, 0.0],
            sensing: Rect::new([-2.5, 0.0], [2.5, 6.5]),
            exhibition_space: Rect::new([-1.2, 0.0], [1.2, 1.2]),
            aisle: Rect::new([-4.0, 4.6], [4.0, 5.4]),
            seat_space: Rect::new([-6.0, 3.5], [-3.0, 6.5]),
            wc_path: Rect::new([3.0, 4.4], [6.0, 5.6]),
            viewing_distance: 0.6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseParams {
    pub position_sigma: f64,
    pub yaw_sigma: f64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self {
            position_sigma: 0.03,
            yaw_sigma: 0.05,
        }
    }
}

/// Passerby reaction model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BehaviorParams {
    /// Chance a curious visitor walks up to the exhibit on their own.
    pub curious_base_engage: f64,
    /// Same for someone on the way to the restroom.
    pub passthrough_base_engage: f64,
    /// Added to the engage chance by a call while looking or hesitating.
    pub greeting_boost: f64,
    /// Chance that a verbal action annoys someone just passing by.
    pub annoy_prob: f64,
    /// Chance that looking at or gesturing to someone draws a glance.
    pub gaze_attraction: f64,
    pub glance_s: f64,
    /// Speed multiplier of an annoyed passerby.
    pub hurry_factor: f64,
    /// Time a served visitor stays for the service.
    pub service_time_s: f64,
    /// Time in front of the exhibit before the visitor counts as engaged.
    pub established_after_s: f64,
    /// Period of gaze switching while hesitating.
    pub gaze_switch_s: f64,
}

impl Default for BehaviorParams {
    fn default() -> Self {
        Self {
            curious_base_engage: 0.35,
            passthrough_base_engage: 0.0,
            greeting_boost: 0.5,
            annoy_prob: 0.5,
            gaze_attraction: 0.1,
            glance_s: 0.6,
            hurry_factor: 1.8,
            service_time_s: 8.0,
            established_after_s: 3.0,
            gaze_switch_s: 0.7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorldConfig {
    /// Simulation timestep in seconds.
    pub dt: f64,
    /// Hard cap on episode length.
    pub max_duration_s: f64,
    /// Share of curious visitors in a mixed batch.
    pub curious_weight: f64,
    pub layout: Layout,
    pub noise: NoiseParams,
    pub behavior: BehaviorParams,
}

impl Default for WorldConfig {
    fn default() -> Self {
        Self {
            dt: 0.1,
            max_duration_s: 120.0,
            curious_weight: 0.4,
            layout: Layout::default(),
            noise: NoiseParams::default(),
            behavior: BehaviorParams::default(),
        }
    }
}

impl WorldConfig {
    /// Same world with noiseless sensing.
    pub fn noiseless(mut self) -> Self {
        self.noise = NoiseParams {
            position_sigma: 0.0,
            yaw_sigma: 0.0,
        };
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(format!("world.{msg}")));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return fail(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.max_duration_s > self.dt) {
            return fail("max_duration_s must exceed dt".into());
        }
        let l = &self.layout;
        for (name, r) in [
            ("sensing", l.sensing),
            ("exhibition_space", l.exhibition_space),
            ("aisle", l.aisle),
            ("seat_space", l.seat_space),
            ("wc_path", l.wc_path),
        ] {
            if r.is_degenerate() {
                return fail(format!("layout.{name} is degenerate"));
            }
        }
        if !l.sensing.contains(l.exhibit) {
            return fail("layout.exhibit must lie inside the sensing region".into());
        }
        if !(l.viewing_distance > 0.0) {
            return fail("layout.viewing_distance must be positive".into());
        }
        let b = &self.behavior;
        for (name, p) in [
            ("curious_weight", self.curious_weight),
            ("behavior.curious_base_engage", b.curious_base_engage),
            (
                "behavior.passthrough_base_engage",
                b.passthrough_base_engage,
            ),
            ("behavior.greeting_boost", b.greeting_boost),
            ("behavior.annoy_prob", b.annoy_prob),
            ("behavior.gaze_attraction", b.gaze_attraction),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return fail(format!("{name} must be a probability, got {p}"));
            }
        }
        for (name, v) in [
            ("behavior.glance_s", b.glance_s),
            ("behavior.hurry_factor", b.hurry_factor),
            ("behavior.service_time_s", b.service_time_s),
            ("behavior.established_after_s", b.established_after_s),
            ("behavior.gaze_switch_s", b.gaze_switch_s),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return fail(format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.noise.position_sigma >= 0.0 && self.noise.yaw_sigma >= 0.0) {
            return fail("noise sigmas must be non-negative".into());
        }
        Ok(())
    }

    /// Number of whole timesteps covering `seconds`, at least one.
    pub fn ticks(&self, seconds: f64) -> u64 {
        ((seconds / self.dt).round() as u64).max(1)
    }
}
