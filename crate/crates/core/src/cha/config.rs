use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DEFAULT_LOG_FLOOR;

/// Knobs of the active-learning loop and its inner simplex solver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ActiveLearningConfig {
    /// Number of candidate product states per iteration, anchors included.
    pub pool_size: usize,
    pub outer_iterations: usize,
    /// Minimum weight for a candidate to count as useful.
    pub weight_threshold: f64,
    pub delta0: f64,
    pub delta_decay: f64,
    pub delta_floor: f64,
    /// Perturbed copies drawn around each useful candidate.
    pub resample_per_useful: usize,
    /// Minimum share of every new pool drawn fresh from the Haar measure.
    pub fresh_fraction: f64,
    pub solver_tol_nats: f64,
    pub solver_max_iters: usize,
    pub log_floor: f64,
}

impl Default for ActiveLearningConfig {
    fn default() -> Self {
        ActiveLearningConfig {
            pool_size: 2000,
            outer_iterations: 50,
            weight_threshold: 1e-6,
            delta0: 0.2,
            delta_decay: 0.85,
            delta_floor: 0.01,
            resample_per_useful: 20,
            fresh_fraction: 0.25,
            solver_tol_nats: 1e-7,
            solver_max_iters: 5000,
            log_floor: DEFAULT_LOG_FLOOR,
        }
    }
}

impl ActiveLearningConfig {
    /// Smaller pool and fewer iterations; what the test suite runs.
    pub fn desk() -> Self {
        ActiveLearningConfig {
            pool_size: 500,
            outer_iterations: 20,
            ..Self::default()
        }
    }

    /// Perturbation scale used when resampling after iteration `k`.
    pub fn delta_at(&self, k: usize) -> f64 {
        (self.delta0 * self.delta_decay.powi(k as i32)).max(self.delta_floor)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("pool_size", self.pool_size as f64),
            ("outer_iterations", self.outer_iterations as f64),
            ("weight_threshold", self.weight_threshold),
            ("delta0", self.delta0),
            ("delta_decay", self.delta_decay),
            ("delta_floor", self.delta_floor),
            ("resample_per_useful", self.resample_per_useful as f64),
            ("solver_tol_nats", self.solver_tol_nats),
            ("solver_max_iters", self.solver_max_iters as f64),
            ("log_floor", self.log_floor),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::invalid(name, v, "must be positive"));
            }
        }
        if !(0.0..=1.0).contains(&self.fresh_fraction) {
            return Err(Error::invalid("fresh_fraction", self.fresh_fraction, "must lie in [0, 1]"));
        }
        if self.delta_decay > 1.0 {
            return Err(Error::invalid("delta_decay", self.delta_decay, "must lie in (0, 1]"));
        }
        Ok(())
    }

    pub(crate) fn validate_for(&self, dim: usize) -> Result<()> {
        self.validate()?;
        if self.pool_size <= dim {
            return Err(Error::invalid(
                "pool_size",
                self.pool_size as f64,
                format!("must exceed the {dim} basis anchors"),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        ActiveLearningConfig::default().validate().unwrap();
        ActiveLearningConfig::desk().validate().unwrap();
    }

    #[test]
    fn delta_schedule_decays_to_floor() {
        let cfg = ActiveLearningConfig::default();
        assert_eq!(cfg.delta_at(0), 0.2);
        assert!((cfg.delta_at(1) - 0.17).abs() < 1e-15);
        assert_eq!(cfg.delta_at(200), 0.01);
    }

    #[test]
    fn rejects_bad_values() {
        let bad = ActiveLearningConfig { fresh_fraction: 1.5, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = ActiveLearningConfig { delta_decay: 1.2, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = ActiveLearningConfig { weight_threshold: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let small = ActiveLearningConfig { pool_size: 4, ..Default::default() };
        assert!(small.validate_for(4).is_err());
    }
}
