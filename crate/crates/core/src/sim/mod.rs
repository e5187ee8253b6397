//! Office-entrance pedestrian simulator.

mod batch;
mod behavior;
mod episode;
pub mod log;
mod scenario;
mod world;

pub use batch::{episode_seed, run_batch, run_indexed, Mixture};
pub use behavior::{passerby_response, BehaviorModifier, Passerby};
pub use episode::{mix_seed, run_episode};
pub use scenario::{generate_scenario, Disposition, Gaze, Plan, Waypoint};
pub use world::{BehaviorParams, Layout, NoiseParams, Rect, WorldConfig};
