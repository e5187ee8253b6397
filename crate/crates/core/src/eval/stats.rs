use serde::{Deserialize, Serialize};

use crate::domain::ConfusionMatrix;
use crate::error::{Error, Result};

/// Significance levels reported by [`proportion_test`].
pub const REPORTED_LEVELS: [f64; 3] = [0.05, 0.01, 0.001];

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Upper tail `P(Z > x)` of the standard normal.
///
/// Uses the Taylor series of `Phi(x) - 1/2` near the origin and the
/// Laplace continued fraction further out, evaluated with the modified
/// Lentz method. Relative accuracy is close to machine precision for
/// `x >= 0`; the lower half follows by symmetry.
pub fn normal_upper_tail(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 1.0 - normal_upper_tail(-x);
    }
    if x < 2.5 {
        0.5 - normal_pdf(x) * central_series(x)
    } else {
        normal_pdf(x) * mills_ratio_cf(x)
    }
}

/// `sum x^(2n+1) / (1*3*...*(2n+1))`, so that `Phi(x) - 1/2 = pdf(x) * sum`.
fn central_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut k = 1.0;
    while term > sum * 1e-17 {
        k += 2.0;
        term *= x2 / k;
        sum += term;
    }
    sum
}

/// Mills ratio `1 / (x + 1/(x + 2/(x + 3/(x + ...))))`.
fn mills_ratio_cf(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..1000 {
        let a = n as f64;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / f
}

/// Share of correct predictions, `(TP + TN) / total`.
pub fn accuracy(m: &ConfusionMatrix) -> Result<f64> {
    match m.total() {
        0 => Err(Error::UndefinedInput(
            "accuracy of an empty confusion matrix".into(),
        )),
        n => Ok(m.correct() as f64 / n as f64),
    }
}

/// Outcome of the one-sided before/after comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub z: f64,
    /// One-sided p-value for "after is more accurate than before".
    pub p: f64,
    pub accuracy_before: f64,
    pub accuracy_after: f64,
    /// Levels from [`REPORTED_LEVELS`] with `p` below them.
    pub significant_at: Vec<f64>,
}

impl TestResult {
    pub fn significant(&self, level: f64) -> bool {
        self.p < level
    }
}

/// Pooled two-proportion z-test of the accuracies, without continuity
/// correction, against the alternative that `after` is higher.
pub fn proportion_test(before: &ConfusionMatrix, after: &ConfusionMatrix) -> Result<TestResult> {
    let accuracy_before = accuracy(before)?;
    let accuracy_after = accuracy(after)?;
    let (n1, n2) = (before.total() as f64, after.total() as f64);
    let pooled = (before.correct() + after.correct()) as f64 / (n1 + n2);
    let se = (pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2)).sqrt();
    let (z, p) = if se > 0.0 {
        let z = (accuracy_after - accuracy_before) / se;
        (z, normal_upper_tail(z))
    } else if accuracy_before == accuracy_after {
        (0.0, 0.5)
    } else {
        return Err(Error::UndefinedInput(
            "zero pooled variance with unequal proportions".into(),
        ));
    };
    let significant_at = REPORTED_LEVELS.iter().copied().filter(|l| p < *l).collect();
    Ok(TestResult {
        z,
        p,
        accuracy_before,
        accuracy_after,
        significant_at,
    })
}
