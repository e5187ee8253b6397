use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::world::WorldConfig;
use crate::domain::ScenarioKind;

/// Where the head points while following a leg of the plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gaze {
    /// Along the walking direction.
    Ahead,
    /// At the exhibit.
    Exhibit,
    /// Switching between the exhibit and straight ahead.
    Alternate,
}

/// Walk to `pos` at `speed`, then stay there for `dwell_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub pos: [f64; 2],
    pub speed: f64,
    pub walk_gaze: Gaze,
    pub dwell_s: f64,
    pub dwell_gaze: Gaze,
}

/// Latent traits of a passerby, hidden from the robot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disposition {
    pub kind: ScenarioKind,
    /// Chance of walking up to the exhibit without being called.
    pub interest: f64,
    pub walk_speed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub disposition: Disposition,
    /// Seat the visitor got up from (outside the sensed area).
    pub origin: [f64; 2],
    /// First sensed position.
    pub entry: [f64; 2],
    pub waypoints: Vec<Waypoint>,
    /// Point outside the sensed area the passerby heads for when done.
    pub exit: [f64; 2],
}

impl Plan {
    /// Index of the hesitation stop of a curious plan.
    pub const HESITATION_LEG: usize = 0;
    /// Index of the viewing spot in front of the exhibit.
    pub const VIEWING_LEG: usize = 1;
}

/// Builds the route and disposition of one passerby, deterministic in `seed`.
///
/// A pass-through visitor crosses the aisle from the seats toward the
/// restroom. A curious visitor walks in looking at the exhibit, stops to
/// hesitate, and plans to end in front of the exhibit; whether they actually
/// go there is decided while the episode runs.
pub fn generate_scenario(world: &WorldConfig, kind: ScenarioKind, seed: u64) -> Plan {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = &world.layout;
    let b = &world.behavior;

    let lane_y = |rng: &mut ChaCha8Rng| rng.random_range(l.aisle.min[1]..=l.aisle.max[1]);
    let entry_y = lane_y(&mut rng);
    let entry = [l.sensing.min[0] + 0.05, entry_y];
    let origin = [
        rng.random_range(l.seat_space.min[0]..=l.seat_space.max[0]),
        rng.random_range(l.seat_space.min[1]..=l.seat_space.max[1]),
    ];
    let exit = [
        l.wc_path.max[0],
        lane_y(&mut rng).clamp(l.wc_path.min[1], l.wc_path.max[1]),
    ];

    match kind {
        ScenarioKind::PassThrough => {
            let walk_speed = rng.random_range(1.0..=1.4);
            Plan {
                disposition: Disposition {
                    kind,
                    interest: b.passthrough_base_engage,
                    walk_speed,
                },
                origin,
                entry,
                waypoints: vec![Waypoint {
                    pos: exit,
                    speed: walk_speed,
                    walk_gaze: Gaze::Ahead,
                    dwell_s: 0.0,
                    dwell_gaze: Gaze::Ahead,
                }],
                exit,
            }
        }
        ScenarioKind::Curious => {
            let stroll = rng.random_range(0.6..=0.9);
            let hesitate_x = rng.random_range(-1.6..=-1.0);
            let hesitate_s = rng.random_range(2.0..=3.5);
            let approach = rng.random_range(0.7..=0.9);
            let view_x = rng.random_range(-0.3..=0.3);
            let view_y = (l.viewing_distance.powi(2) - view_x * view_x).sqrt();
            let dwell_s = rng.random_range(8.0..=14.0);
            let walk_speed = rng.random_range(1.0..=1.2);
            Plan {
                disposition: Disposition {
                    kind,
                    interest: b.curious_base_engage,
                    walk_speed,
                },
                origin,
                entry,
                waypoints: vec![
                    Waypoint {
                        pos: [hesitate_x, entry_y],
                        speed: stroll,
                        walk_gaze: Gaze::Exhibit,
                        dwell_s: hesitate_s,
                        dwell_gaze: Gaze::Alternate,
                    },
                    Waypoint {
                        pos: [l.exhibit[0] + view_x, l.exhibit[1] + view_y],
                        speed: approach,
                        walk_gaze: Gaze::Exhibit,
                        dwell_s,
                        dwell_gaze: Gaze::Exhibit,
                    },
                ],
                exit,
            }
        }
    }
}
