//! Simultaneous perturbation stochastic approximation.
//!
//! Each step probes the objective at two points along a random Rademacher
//! direction and moves against the estimated gradient. Gains decay as
//! `a_t = a/(t+1)^alpha`, `c_t = c/(t+1)^gamma`. When no step scale `a` is
//! given, it is calibrated from the first gradient estimate so the first
//! update moves every parameter by about 0.1 radians.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Magnitude of the first per-parameter update used for auto-calibration.
/// The gain schedule has no stability offset, so the first steps must be
/// large for useful step sizes to survive a few hundred decayed iterations.
const FIRST_STEP_TARGET: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpsaConfig {
    /// Step scale; `None` auto-calibrates on the first step.
    pub a: Option<f64>,
    /// Perturbation scale.
    pub c: f64,
    /// Step decay exponent.
    pub alpha: f64,
    /// Perturbation decay exponent.
    pub gamma: f64,
    pub max_iterations: u64,
    pub seed: u64,
}

impl Default for SpsaConfig {
    fn default() -> Self {
        SpsaConfig {
            a: None,
            c: 0.2,
            alpha: 0.602,
            gamma: 0.101,
            max_iterations: 100,
            seed: 0,
        }
    }
}

impl SpsaConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(a) = self.a {
            if a <= 0.0 || !a.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "spsa a must be positive, got {a}"
                )));
            }
        }
        if self.c <= 0.0 || !self.c.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "spsa c must be positive, got {}",
                self.c
            )));
        }
        for (name, v) in [("alpha", self.alpha), ("gamma", self.gamma)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "spsa {name} must lie in (0, 1], got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Result of one SPSA step: exactly two objective evaluations were made.
#[derive(Debug, Clone)]
pub struct SpsaStep {
    pub params: Vec<f64>,
    /// True when a probe returned a non-finite objective; the parameters
    /// are returned unchanged in that case.
    pub aborted: bool,
}

pub struct Spsa {
    cfg: SpsaConfig,
    rng: ChaCha8Rng,
    a_effective: Option<f64>,
}

impl Spsa {
    pub fn new(cfg: SpsaConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Spsa {
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            a_effective: cfg.a,
            cfg,
        })
    }

    /// The step scale in use (after calibration, if it happened yet).
    pub fn step_scale(&self) -> Option<f64> {
        self.a_effective
    }

    /// One update from iteration counter `t >= 0`.
    pub fn step<F: FnMut(&[f64]) -> f64>(
        &mut self,
        params: &[f64],
        mut objective: F,
        t: u64,
    ) -> SpsaStep {
        let decay = (t + 1) as f64;
        let c_t = self.cfg.c / decay.powf(self.cfg.gamma);

        let delta: Vec<f64> = (0..params.len())
            .map(|_| if self.rng.random_bool(0.5) { 1.0 } else { -1.0 })
            .collect();
        let plus: Vec<f64> = params
            .iter()
            .zip(&delta)
            .map(|(&p, &d)| p + c_t * d)
            .collect();
        let minus: Vec<f64> = params
            .iter()
            .zip(&delta)
            .map(|(&p, &d)| p - c_t * d)
            .collect();

        let f_plus = objective(&plus);
        let f_minus = objective(&minus);
        if !f_plus.is_finite() || !f_minus.is_finite() {
            return SpsaStep {
                params: params.to_vec(),
                aborted: true,
            };
        }

        // g_i = (f+ - f-) / (2 c_t delta_i); for Rademacher entries the
        // elementwise inverse is delta itself.
        let g_scale = (f_plus - f_minus) / (2.0 * c_t);

        let a = *self.a_effective.get_or_insert_with(|| {
            let g_mag = g_scale.abs();
            if g_mag > 1e-12 {
                FIRST_STEP_TARGET / g_mag
            } else {
                FIRST_STEP_TARGET
            }
        });
        let a_t = a / decay.powf(self.cfg.alpha);

        let params = params
            .iter()
            .zip(&delta)
            .map(|(&p, &d)| p - a_t * g_scale * d)
            .collect();
        SpsaStep {
            params,
            aborted: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_objective_leaves_params_unchanged() {
        let mut spsa = Spsa::new(SpsaConfig::default()).unwrap();
        let params = vec![0.3, -0.7, 1.1];
        let step = spsa.step(&params, |_| 2.5, 0);
        assert!(!step.aborted);
        assert_eq!(step.params, params);
    }

    #[test]
    fn one_dim_quadratic_moves_toward_zero() {
        let mut spsa = Spsa::new(SpsaConfig {
            a: Some(0.05),
            ..SpsaConfig::default()
        })
        .unwrap();
        let step = spsa.step(&[1.0], |p| p[0] * p[0], 0);
        assert!(!step.aborted);
        assert!(step.params[0] < 1.0 && step.params[0] > 0.0);
    }

    #[test]
    fn four_dim_bowl_converges() {
        let mut spsa = Spsa::new(SpsaConfig {
            seed: 3,
            ..SpsaConfig::default()
        })
        .unwrap();
        let mut params = vec![1.0, -1.5, 0.8, 2.0];
        let norm0: f64 = params.iter().map(|p| p * p).sum::<f64>().sqrt();
        for t in 0..200 {
            params = spsa
                .step(&params, |p| p.iter().map(|x| x * x).sum(), t)
                .params;
        }
        let norm: f64 = params.iter().map(|p| p * p).sum::<f64>().sqrt();
        assert!(norm < 0.1 * norm0, "|theta| = {norm} (started at {norm0})");
    }

    #[test]
    fn non_finite_objective_aborts_step() {
        let mut spsa = Spsa::new(SpsaConfig::default()).unwrap();
        let params = vec![0.5, 0.5];
        let step = spsa.step(&params, |_| f64::NAN, 0);
        assert!(step.aborted);
        assert_eq!(step.params, params);
    }

    #[test]
    fn calibration_sets_first_step_to_target() {
        let mut spsa = Spsa::new(SpsaConfig {
            seed: 9,
            ..SpsaConfig::default()
        })
        .unwrap();
        let params = vec![0.4, 1.2, -0.3];
        let step = spsa.step(&params, |p| p.iter().sum::<f64>() * 3.0, 0);
        for (before, after) in params.iter().zip(&step.params) {
            assert!(((before - after).abs() - FIRST_STEP_TARGET).abs() < 1e-9);
        }
    }

    #[test]
    fn exactly_two_evaluations_per_step() {
        let mut spsa = Spsa::new(SpsaConfig::default()).unwrap();
        let mut calls = 0;
        spsa.step(
            &[0.1, 0.2],
            |p| {
                calls += 1;
                p[0] + p[1]
            },
            0,
        );
        assert_eq!(calls, 2);
    }

    #[test]
    fn config_validation() {
        assert!(Spsa::new(SpsaConfig {
            c: 0.0,
            ..SpsaConfig::default()
        })
        .is_err());
        assert!(Spsa::new(SpsaConfig {
            alpha: 1.2,
            ..SpsaConfig::default()
        })
        .is_err());
        assert!(Spsa::new(SpsaConfig {
            a: Some(-1.0),
            ..SpsaConfig::default()
        })
        .is_err());
    }
}
