use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::behavior::{passerby_response, Passerby};
use super::scenario::generate_scenario;
use super::world::WorldConfig;
use crate::domain::{
    Action, ActionEvent, Condition, Episode, HeadAngle, PasserbyFrame, Pose, ScenarioKind,
    SimLabels, Trajectory, TransitionState,
};
use crate::estimator::{Estimator, EstimatorConfig};
use crate::learner::Agent;

/// Head height used for the z coordinate of every pose.
const HEAD_HEIGHT_M: f64 = 1.6;

const STREAM_PLAN: u64 = 0;
const STREAM_NOISE: u64 = 1;
const STREAM_RESPONSE: u64 = 2;
const STREAM_AGENT: u64 = 3;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Mixes two words into a well-spread seed (splitmix64 finaliser).
pub fn mix_seed(a: u64, b: u64) -> u64 {
    let mut z = a ^ b
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Running {
    action: Action,
    s_ta: TransitionState,
    ends_at: u64,
    event: usize,
}

/// Simulates one passerby from first detection until they leave the sensed
/// area (or the duration cap is hit).
///
/// The robot is driven by the estimator's decision stream: it picks an
/// action at the first event, and every time an action finishes it reports
/// the state it is in now (composed from the state at selection) and picks
/// the next one there. When the passerby disappears mid-action, the action
/// is reported as interrupted.
pub fn run_episode(
    agent: &mut Agent,
    world: &WorldConfig,
    est_cfg: &EstimatorConfig,
    kind: ScenarioKind,
    seed: u64,
    id: u64,
    condition: Condition,
) -> Episode {
    let plan = generate_scenario(world, kind, stream(seed, STREAM_PLAN).next_u64());
    let mut noise_rng = stream(seed, STREAM_NOISE);
    let mut response_rng = stream(seed, STREAM_RESPONSE);
    let mut agent_rng = stream(seed, STREAM_AGENT);
    let pos_noise = Normal::new(0.0, world.noise.position_sigma).expect("validated sigma");
    let yaw_noise = Normal::new(0.0, world.noise.yaw_sigma).expect("validated sigma");

    let behavior = &world.behavior;
    let mut passerby = Passerby::new(plan);
    let mut estimator = Estimator::new(est_cfg.clone());
    let mut frames = Trajectory::new();
    let mut transitions = Vec::new();
    let mut events: Vec<ActionEvent> = Vec::new();
    let mut running: Option<Running> = None;
    let max_tick = (world.max_duration_s / world.dt).floor() as u64;
    let mut truncated = false;

    let mut tick: u64 = 0;
    loop {
        let t = tick as f64 * world.dt;
        let inside = world.layout.sensing.contains(passerby.position());
        let frame = if inside {
            let [x, y] = passerby.position();
            let yaw = passerby.yaw(&world.layout, behavior);
            PasserbyFrame::detected(
                t,
                Pose {
                    p: [
                        x + pos_noise.sample(&mut noise_rng),
                        y + pos_noise.sample(&mut noise_rng),
                        HEAD_HEIGHT_M,
                    ],
                    theta: HeadAngle {
                        yaw: yaw + yaw_noise.sample(&mut noise_rng),
                        roll: 0.0,
                        pitch: 0.0,
                    },
                },
            )
        } else {
            PasserbyFrame::missing(t)
        };
        frames.push(frame).expect("ticks increase");
        let (_, event) = estimator.push(frame);
        if let Some(ev) = event {
            transitions.push(ev);
        }

        if !inside {
            if let Some(r) = running.take() {
                agent.finish_terminal(r.s_ta, r.action, estimator.current());
            }
            break;
        }

        // Decision point: first event of the episode, or the running action ends.
        let decide_at = match &running {
            None => event.map(|e| e.state),
            Some(r) if tick >= r.ends_at => {
                let s_tc = TransitionState::new(r.s_ta.to, estimator.current());
                events[r.event].finished = true;
                agent.finish(r.s_ta, r.action, s_tc);
                Some(s_tc)
            }
            Some(_) => None,
        };
        if let Some(s) = decide_at {
            let (action, t_a) = agent.select(t, s, &mut agent_rng);
            let truth = passerby.truth_state(behavior);
            let modifier = passerby_response(
                &passerby.plan().disposition,
                truth,
                action,
                behavior,
                &mut response_rng,
            );
            passerby.apply(modifier, behavior);
            if action == Action::ExplainService {
                passerby.offer_service(behavior);
            }
            events.push(ActionEvent {
                t_a,
                action,
                state_at_selection: s,
                finished: false,
            });
            running = Some(Running {
                action,
                s_ta: s,
                ends_at: tick + world.ticks(action.duration_s()),
                event: events.len() - 1,
            });
        }

        if tick >= max_tick {
            log::warn!(
                "episode {id} hit the {} s cap and was truncated",
                world.max_duration_s
            );
            truncated = true;
            if let Some(r) = running.take() {
                agent.finish_terminal(r.s_ta, r.action, estimator.current());
            }
            break;
        }
        passerby.step(world.dt, &mut response_rng);
        tick += 1;
    }

    Episode {
        id,
        condition,
        scenario: Some(kind),
        frames,
        transitions,
        events,
        labels: Some(SimLabels {
            used_service: passerby.served(),
            discomforted: passerby.discomforted(),
        }),
        truncated,
    }
}
