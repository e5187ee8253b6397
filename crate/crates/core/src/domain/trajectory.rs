use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Head orientation in radians. Yaw is measured in the floor plane,
/// counter-clockwise from the +x axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeadAngle {
    pub yaw: f64,
    pub roll: f64,
    pub pitch: f64,
}

/// What the sensor extracted for a detected passerby.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    /// Position `(x, y, z)` in meters.
    pub p: [f64; 3],
    pub theta: HeadAngle,
}

impl Pose {
    pub fn xy(&self) -> [f64; 2] {
        [self.p[0], self.p[1]]
    }
}

/// One sensor sample. `pose` is `None` when nobody was detected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PasserbyFrame {
    /// Seconds since the start of the episode.
    pub t: f64,
    pub pose: Option<Pose>,
}

impl PasserbyFrame {
    pub fn detected(t: f64, pose: Pose) -> Self {
        Self {
            t,
            pose: Some(pose),
        }
    }

    pub fn missing(t: f64) -> Self {
        Self { t, pose: None }
    }

    pub fn is_detected(&self) -> bool {
        self.pose.is_some()
    }
}

/// Time-ordered frames of one episode.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<PasserbyFrame>", into = "Vec<PasserbyFrame>")]
pub struct Trajectory {
    frames: Vec<PasserbyFrame>,
}

impl Trajectory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_frames(frames: Vec<PasserbyFrame>) -> Result<Self, Error> {
        let mut trajectory = Self::new();
        for frame in frames {
            trajectory.push(frame)?;
        }
        Ok(trajectory)
    }

    /// Appends a frame; timestamps must be non-negative and strictly increasing.
    pub fn push(&mut self, frame: PasserbyFrame) -> Result<(), Error> {
        if !(frame.t >= 0.0) {
            return Err(Error::Trajectory(format!(
                "negative or NaN timestamp {}",
                frame.t
            )));
        }
        if let Some(last) = self.frames.last() {
            if frame.t <= last.t {
                return Err(Error::Trajectory(format!(
                    "timestamp {} does not follow {}",
                    frame.t, last.t
                )));
            }
        }
        self.frames.push(frame);
        Ok(())
    }

    pub fn frames(&self) -> &[PasserbyFrame] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn last(&self) -> Option<&PasserbyFrame> {
        self.frames.last()
    }

    /// `T_end`: time of the last frame, or 0 for an empty trajectory.
    pub fn duration(&self) -> f64 {
        self.frames.last().map_or(0.0, |f| f.t)
    }
}

impl TryFrom<Vec<PasserbyFrame>> for Trajectory {
    type Error = Error;

    fn try_from(frames: Vec<PasserbyFrame>) -> Result<Self, Self::Error> {
        Self::from_frames(frames)
    }
}

impl From<Trajectory> for Vec<PasserbyFrame> {
    fn from(t: Trajectory) -> Self {
        t.frames
    }
}
