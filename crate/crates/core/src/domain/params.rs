use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Learning rates, temperature schedule, initial-value magnitudes and reward scales.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnerParams {
    pub alpha: f64,
    pub gamma: f64,
    pub k_t: f64,
    pub t_min: f64,
    /// Initial value of greeting a newly detected passerby.
    pub q_c: f64,
    /// Initial value of the service explanation and the farewell.
    pub q_h: f64,
    /// Cost charged for every non-wait action.
    pub action_cost: f64,
    /// Penalty per rank step lost after an action.
    pub discomfort_scale: f64,
    /// Reward per rank step gained.
    pub goal_scale: f64,
}

impl Default for LearnerParams {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            gamma: 0.999,
            k_t: 0.98,
            t_min: 0.01,
            q_c: 1.0,
            q_h: 5.0,
            action_cost: 0.1,
            discomfort_scale: 1.0,
            goal_scale: 1.0,
        }
    }
}

impl LearnerParams {
    pub fn validate(&self) -> Result<(), Error> {
        validate_params(self)
    }
}

fn check(ok: bool, field: &'static str, bound: &'static str) -> Result<(), Error> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParam {
            field,
            message: format!("{field} must be in {bound}"),
        })
    }
}

/// Checks every bound on the learner parameters, reporting the first violation.
pub fn validate_params(p: &LearnerParams) -> Result<(), Error> {
    check(p.alpha > 0.0 && p.alpha <= 1.0, "alpha", "(0,1]")?;
    check(p.gamma > 0.0 && p.gamma <= 1.0, "gamma", "(0,1]")?;
    check(p.k_t > 0.0 && p.k_t < 1.0, "k_T", "(0,1)")?;
    check(p.t_min > 0.0 && p.t_min < 1.0, "T_min", "(0,1)")?;
    check(p.q_c.is_finite(), "q_C", "the finite reals")?;
    check(p.q_h.is_finite(), "q_H", "the finite reals")?;
    check(
        p.action_cost >= 0.0 && p.action_cost.is_finite(),
        "c_a",
        "[0,inf)",
    )?;
    check(
        p.discomfort_scale >= 0.0 && p.discomfort_scale.is_finite(),
        "c_s",
        "[0,inf)",
    )?;
    check(
        p.goal_scale >= 0.0 && p.goal_scale.is_finite(),
        "c_g",
        "[0,inf)",
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let p = LearnerParams::default();
        assert_eq!((p.alpha, p.gamma, p.k_t, p.t_min), (0.5, 0.999, 0.98, 0.01));
        assert!(validate_params(&p).is_ok());
    }

    #[test]
    fn alpha_zero_rejected() {
        let p = LearnerParams {
            alpha: 0.0,
            ..Default::default()
        };
        let err = validate_params(&p).unwrap_err();
        assert_eq!(err.to_string(), "invalid parameter: alpha must be in (0,1]");
    }

    #[test]
    fn k_t_above_one_rejected() {
        let p = LearnerParams {
            k_t: 1.2,
            ..Default::default()
        };
        let err = validate_params(&p).unwrap_err();
        assert_eq!(err.to_string(), "invalid parameter: k_T must be in (0,1)");
    }

    #[test]
    fn first_violation_reported() {
        let p = LearnerParams {
            gamma: 0.0,
            t_min: 2.0,
            ..Default::default()
        };
        match validate_params(&p) {
            Err(Error::InvalidParam { field, .. }) => assert_eq!(field, "gamma"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negative_scales_rejected() {
        for p in [
            LearnerParams {
                action_cost: -0.1,
                ..Default::default()
            },
            LearnerParams {
                discomfort_scale: -1.0,
                ..Default::default()
            },
            LearnerParams {
                goal_scale: f64::NAN,
                ..Default::default()
            },
            LearnerParams {
                alpha: f64::NAN,
                ..Default::default()
            },
        ] {
            assert!(validate_params(&p).is_err());
        }
    }
}
