use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Engagement stage of a single passerby, as reported by the state estimator.
///
/// The integer codes are stable and match the `s_i` subscripts used for the
/// transition states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseState {
    NotFound = 0,
    PassingBy = 1,
    LookAt = 2,
    Hesitating = 3,
    Approaching = 4,
    Established = 5,
    Leaving = 6,
}

impl BaseState {
    pub const COUNT: usize = 7;

    pub const ALL: [BaseState; Self::COUNT] = [
        BaseState::NotFound,
        BaseState::PassingBy,
        BaseState::LookAt,
        BaseState::Hesitating,
        BaseState::Approaching,
        BaseState::Established,
        BaseState::Leaving,
    ];

    pub fn code(self) -> usize {
        self as usize
    }

    pub fn from_code(code: usize) -> Option<Self> {
        Self::ALL.get(code).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            BaseState::NotFound => "Not Found",
            BaseState::PassingBy => "Passing By",
            BaseState::LookAt => "Look At",
            BaseState::Hesitating => "Hesitating",
            BaseState::Approaching => "Approaching",
            BaseState::Established => "Established",
            BaseState::Leaving => "Leaving",
        }
    }
}

impl fmt::Display for BaseState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Learner state `s_ij`: the passerby moved from base state `i` to base state `j`.
///
/// Self transitions (`s_ii`) stand for "no change since the last observation".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TransitionState {
    pub from: BaseState,
    pub to: BaseState,
}

impl TransitionState {
    pub const COUNT: usize = BaseState::COUNT * BaseState::COUNT;

    pub const fn new(from: BaseState, to: BaseState) -> Self {
        Self { from, to }
    }

    /// Row-major index in `(from, to)`; `s_00` is 0 and `s_66` is 48.
    pub fn index(self) -> usize {
        self.from.code() * BaseState::COUNT + self.to.code()
    }

    pub fn from_index(index: usize) -> Option<Self> {
        if index >= Self::COUNT {
            return None;
        }
        Some(Self::new(
            BaseState::ALL[index / BaseState::COUNT],
            BaseState::ALL[index % BaseState::COUNT],
        ))
    }

    /// All 49 states in index order.
    pub fn all() -> impl Iterator<Item = TransitionState> {
        (0..Self::COUNT).map(|i| Self::from_index(i).expect("index in range"))
    }

    /// `s_ij` from the two subscripts.
    pub fn from_codes(from: usize, to: usize) -> Option<Self> {
        Some(Self::new(
            BaseState::from_code(from)?,
            BaseState::from_code(to)?,
        ))
    }

    pub fn is_self_transition(self) -> bool {
        self.from == self.to
    }

    /// Symbol used in table headers and logs, e.g. `s01`.
    pub fn symbol(self) -> String {
        format!("s{}{}", self.from.code(), self.to.code())
    }
}

impl fmt::Display for TransitionState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}{}", self.from.code(), self.to.code())
    }
}

impl FromStr for TransitionState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s.strip_prefix('s').ok_or_else(|| {
            Error::Parse(format!(
                "transition state symbol must start with 's': {s:?}"
            ))
        })?;
        let bytes = digits.as_bytes();
        if bytes.len() != 2 || !bytes.iter().all(u8::is_ascii_digit) {
            return Err(Error::Parse(format!(
                "malformed transition state symbol {s:?}"
            )));
        }
        let from = (bytes[0] - b'0') as usize;
        let to = (bytes[1] - b'0') as usize;
        Self::from_codes(from, to)
            .ok_or_else(|| Error::Parse(format!("transition state {s:?} out of range")))
    }
}

impl Serialize for TransitionState {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TransitionState {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
