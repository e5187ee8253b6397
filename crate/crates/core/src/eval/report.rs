use std::io::Write;

use serde::{Deserialize, Serialize};

use super::stats::{proportion_test, TestResult};
use crate::domain::ConfusionMatrix;
use crate::error::Result;

/// Before/after comparison at a chosen significance level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub before: ConfusionMatrix,
    pub after: ConfusionMatrix,
    pub test: TestResult,
    pub significance: f64,
    /// Episodes per condition before and after cleansing, when simulated.
    pub episode_counts: Option<[(usize, usize); 2]>,
}

impl Comparison {
    pub fn new(before: ConfusionMatrix, after: ConfusionMatrix, significance: f64) -> Result<Self> {
        let test = proportion_test(&before, &after)?;
        Ok(Self {
            before,
            after,
            test,
            significance,
            episode_counts: None,
        })
    }

    /// Accuracy improved and the improvement is significant.
    pub fn passed(&self) -> bool {
        self.test.accuracy_after > self.test.accuracy_before
            && self.test.significant(self.significance)
    }
}

pub fn write_report<W: Write>(mut out: W, c: &Comparison) -> std::io::Result<()> {
    let t = &c.test;
    if let Some([(rb, kb), (ra, ka)]) = c.episode_counts {
        writeln!(
            out,
            "episodes (raw -> cleansed): before {rb} -> {kb}, after {ra} -> {ka}"
        )?;
    }
    writeln!(
        out,
        "before: {}  accuracy {:.4}",
        c.before, t.accuracy_before
    )?;
    writeln!(out, "after:  {}  accuracy {:.4}", c.after, t.accuracy_after)?;
    writeln!(
        out,
        "one-sided pooled two-proportion test: z = {:.4}, p = {:.3e}",
        t.z, t.p
    )?;
    let levels: Vec<String> = t.significant_at.iter().map(|l| l.to_string()).collect();
    writeln!(
        out,
        "significant at: {}",
        if levels.is_empty() {
            "none".to_string()
        } else {
            levels.join(", ")
        }
    )?;
    writeln!(
        out,
        "{} (alpha = {})",
        if c.passed() { "PASS" } else { "FAIL" },
        c.significance
    )
}
