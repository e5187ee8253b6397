use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    Wait,
    Verbal,
    NonVerbal,
}

/// Robot action `a0` .. `a9`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Wait = 0,
    Greet = 1,
    LookAtPasserby = 2,
    ExpressJoy = 3,
    Blink = 4,
    SaySorry = 5,
    SayExcuseMe = 6,
    SmallTalk = 7,
    ExplainService = 8,
    Goodbye = 9,
}

impl Action {
    pub const COUNT: usize = 10;

    pub const ALL: [Action; Self::COUNT] = [
        Action::Wait,
        Action::Greet,
        Action::LookAtPasserby,
        Action::ExpressJoy,
        Action::Blink,
        Action::SaySorry,
        Action::SayExcuseMe,
        Action::SmallTalk,
        Action::ExplainService,
        Action::Goodbye,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn kind(self) -> ActionKind {
        match self {
            Action::Wait => ActionKind::Wait,
            Action::LookAtPasserby | Action::ExpressJoy | Action::Blink => ActionKind::NonVerbal,
            Action::Greet
            | Action::SaySorry
            | Action::SayExcuseMe
            | Action::SmallTalk
            | Action::ExplainService
            | Action::Goodbye => ActionKind::Verbal,
        }
    }

    pub fn is_wait(self) -> bool {
        self == Action::Wait
    }

    /// Verbal utterances meant to get a passerby's attention. The service
    /// explanation and the farewell presuppose an engagement and are excluded.
    pub fn is_attract_call(self) -> bool {
        matches!(
            self,
            Action::Greet | Action::SaySorry | Action::SayExcuseMe | Action::SmallTalk
        )
    }

    /// How long the robot is occupied by the action, in seconds.
    pub fn duration_s(self) -> f64 {
        match self {
            Action::Wait => 5.0,
            Action::Greet => 2.0,
            Action::LookAtPasserby => 1.0,
            Action::ExpressJoy => 2.0,
            Action::Blink => 1.0,
            Action::SaySorry => 1.5,
            Action::SayExcuseMe => 1.5,
            Action::SmallTalk => 2.0,
            Action::ExplainService => 4.0,
            Action::Goodbye => 1.5,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Action::Wait => "Robot waits for 5 secs until somebody comes.",
            Action::Greet => "Robot calls a passerby with a greeting.",
            Action::LookAtPasserby => "Robot looks at a passerby.",
            Action::ExpressJoy => "Robot represents joy by the robot's motion.",
            Action::Blink => "Robot blinks the robot's eyes.",
            Action::SaySorry => "Robot says \"I'm sorry.\" in Japanese.",
            Action::SayExcuseMe => "Robot says \"Excuse me.\" in Japanese.",
            Action::SmallTalk => "Robot says \"It's rainy today.\" in Japanese.",
            Action::ExplainService => "Robot says how to start their own service.",
            Action::Goodbye => "Robot says goodbye.",
        }
    }

    pub fn symbol(self) -> String {
        format!("a{}", self.index())
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.index())
    }
}

impl FromStr for Action {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.strip_prefix('a')
            .filter(|d| d.len() == 1)
            .and_then(|d| d.parse::<usize>().ok())
            .and_then(Action::from_index)
            .ok_or_else(|| Error::Parse(format!("unknown action symbol {s:?}")))
    }
}

impl Serialize for Action {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Action {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
