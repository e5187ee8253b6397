//! User-centered Q-learning (UCQL) for a robot that greets passersby.
//!
//! The crate holds the learner, a rule-based engagement-state estimator, a
//! pedestrian simulator of an office entrance, and the evaluation pipeline
//! that compares the designed initial table against a trained one.

// Validation uses `!(x > 0.0)` style checks so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod domain;
pub mod error;
pub mod estimator;
pub mod eval;
pub mod learner;
pub mod qtable;
pub mod sim;

pub use error::{Error, Result};
