use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::seed;
use crate::states::{DensityMatrix, ProductKet};

use super::pool::{self, CandidatePool, PoolComposition};
use super::simplex::{solve_simplex_from, SimplexSolution};
use super::ActiveLearningConfig;

/// One pass of solve → select → resample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Bound from this iteration's pool; `None` if the solve failed.
    pub value_bits: Option<f64>,
    /// Best value over this and all earlier iterations.
    pub best_bits: Option<f64>,
    pub composition: PoolComposition,
    /// Perturbation scale used to build the next pool.
    pub delta: f64,
    pub useful: usize,
    pub solver_iterations: usize,
    pub fw_gap_nats: Option<f64>,
    pub converged: bool,
    pub error: Option<String>,
}

/// A vertex of the best hull point with its weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportPoint {
    pub weight: f64,
    pub ket: ProductKet,
}

#[derive(Clone, Debug)]
pub struct UpperBoundReport {
    pub best_value_bits: f64,
    pub best_solution: SimplexSolution,
    /// Nonzero-weight vertices of `best_solution`, heaviest first.
    pub best_support: Vec<SupportPoint>,
    pub best_iteration: usize,
    pub history: Vec<IterationRecord>,
    pub total_wall_seconds: f64,
    pub seed: u64,
}

impl UpperBoundReport {
    pub fn converged(&self) -> bool {
        self.best_solution.converged
    }

    pub fn sigma(&self) -> &DensityMatrix {
        &self.best_solution.sigma
    }
}

/// Runs the active-learning loop and returns the smallest bound seen.
///
/// Iteration `k` solves over the current pool (warm-started from the weights
/// carried over from iteration `k−1`), keeps the useful candidates, and
/// rebuilds the pool with perturbation scale `cfg.delta_at(k)`. A failed
/// solve is recorded and the loop moves on with a fresh pool.
pub fn upper_bound(rho: &DensityMatrix, cfg: &ActiveLearningConfig, seed: u64) -> Result<UpperBoundReport> {
    let start = Instant::now();
    cfg.validate_for(rho.dim())?;
    let (dim_a, dim_b) = (rho.dim_a(), rho.dim_b());
    let mut pool = CandidatePool::with_fresh(dim_a, dim_b, cfg.pool_size, seed::derive_path(seed, &[0]));
    let mut warm: Option<Vec<f64>> = None;
    let mut best: Option<(SimplexSolution, Vec<ProductKet>, usize)> = None;
    let mut history = Vec::with_capacity(cfg.outer_iterations);

    for k in 0..cfg.outer_iterations {
        let delta = cfg.delta_at(k);
        let next_seed = seed::derive_path(seed, &[1, k as u64]);
        let composition = pool.composition();
        match solve_simplex_from(rho, &pool, cfg, warm.as_deref()) {
            Ok(sol) => {
                let value = sol.objective_bits();
                let keep = pool::select_useful(&sol.weights, &pool, cfg.weight_threshold);
                let useful: Vec<ProductKet> = keep
                    .iter()
                    .filter(|&&i| !pool.is_anchor(i))
                    .map(|&i| pool.ket(i).clone())
                    .collect();
                let next = pool::resample(dim_a, dim_b, &useful, cfg, delta, next_seed)?;
                // anchors and kept candidates sit at the front of the new pool
                // in the order `keep` lists them
                let mut carried = vec![0.0; next.len()];
                let kept_useful = next.composition().useful;
                for (slot, &i) in keep.iter().take(next.n_anchors() + kept_useful).enumerate() {
                    carried[slot] = sol.weights[i];
                }
                let improved = best.as_ref().is_none_or(|(b, _, _)| sol.objective_nats < b.objective_nats);
                history.push(IterationRecord {
                    iteration: k,
                    value_bits: Some(value),
                    best_bits: None,
                    composition,
                    delta,
                    useful: useful.len(),
                    solver_iterations: sol.iterations,
                    fw_gap_nats: Some(sol.fw_gap_nats),
                    converged: sol.converged,
                    error: None,
                });
                if improved {
                    best = Some((sol, pool.kets().to_vec(), k));
                }
                warm = Some(carried);
                pool = next;
            }
            Err(e) => {
                history.push(IterationRecord {
                    iteration: k,
                    value_bits: None,
                    best_bits: None,
                    composition,
                    delta,
                    useful: 0,
                    solver_iterations: 0,
                    fw_gap_nats: None,
                    converged: false,
                    error: Some(e.to_string()),
                });
                warm = None;
                pool = CandidatePool::with_fresh(dim_a, dim_b, cfg.pool_size, next_seed);
            }
        }
        let best_bits = best.as_ref().map(|(b, _, _)| b.objective_bits());
        history.last_mut().expect("just pushed").best_bits = best_bits;
    }

    let Some((solution, kets, best_iteration)) = best else {
        let last = history.last().and_then(|h| h.error.clone()).unwrap_or_default();
        return Err(Error::Numerical(format!("every active-learning iteration failed: {last}")));
    };
    let mut best_support: Vec<SupportPoint> = solution
        .support()
        .map(|(i, w)| SupportPoint { weight: w, ket: kets[i].clone() })
        .collect();
    best_support.sort_by(|a, b| b.weight.total_cmp(&a.weight));
    Ok(UpperBoundReport {
        best_value_bits: linalg::nats_to_bits(solution.objective_nats),
        best_solution: solution,
        best_support,
        best_iteration,
        history,
        total_wall_seconds: start.elapsed().as_secs_f64(),
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{self, ProductKet};

    fn quick() -> ActiveLearningConfig {
        ActiveLearningConfig { pool_size: 120, outer_iterations: 6, ..ActiveLearningConfig::desk() }
    }

    #[test]
    fn product_state_bound_is_zero() {
        let rho = states::product_projector(&ProductKet::basis(2, 3, 1, 2));
        let r = upper_bound(&rho, &quick(), 1).unwrap();
        assert!(r.best_value_bits.abs() < 1e-6, "{}", r.best_value_bits);
    }

    #[test]
    fn random_product_state_bound_is_small() {
        let rho = states::product_projector(&states::random_product_ket(2, 3, 8));
        let r = upper_bound(&rho, &quick(), 1).unwrap();
        assert!(r.best_value_bits >= 0.0 && r.best_value_bits < 0.05, "{}", r.best_value_bits);
    }

    #[test]
    fn best_is_prefix_minimum_of_history() {
        let rho = states::random_entangled(2, 2, 3, 100).unwrap();
        let r = upper_bound(&rho, &quick(), 5).unwrap();
        assert_eq!(r.history.len(), 6);
        let mut running = f64::INFINITY;
        for h in &r.history {
            running = running.min(h.value_bits.unwrap());
            assert_eq!(h.best_bits.unwrap(), running);
        }
        assert_eq!(r.best_value_bits, running);
        assert!(r.best_value_bits >= -1e-9);
        let w: f64 = r.best_support.iter().map(|s| s.weight).sum();
        assert!((w - 1.0).abs() < 1e-10);
    }

    #[test]
    fn deterministic_per_seed() {
        let rho = states::werner(2, 0.9).unwrap();
        let a = upper_bound(&rho, &quick(), 42).unwrap();
        let b = upper_bound(&rho, &quick(), 42).unwrap();
        assert_eq!(a.best_value_bits.to_bits(), b.best_value_bits.to_bits());
        assert_eq!(a.history, b.history);
    }

    #[test]
    fn rejects_pool_smaller_than_anchors() {
        let rho = states::werner(3, 0.9).unwrap();
        let cfg = ActiveLearningConfig { pool_size: 9, ..quick() };
        assert!(upper_bound(&rho, &cfg, 0).is_err());
    }
}
