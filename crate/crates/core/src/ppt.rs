//! Relative entropy to the set of PPT states.
//!
//! The PPT set (positive semidefinite, positive partial transpose, unit
//! trace) contains every separable state, so its minimum relative entropy
//! sits below the separable one. The value here is the objective at the last
//! feasible iterate of projected gradient descent, i.e. an estimate of that
//! minimum from above; `converged` and `grad_norm` tell how tight it is.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, partial_transpose_raw, HermitianOperator, LogBase, DEFAULT_LOG_FLOOR};
use crate::states::DensityMatrix;

/// Nearest positive semidefinite matrix in Frobenius norm.
pub fn project_psd(a: &HermitianOperator) -> HermitianOperator {
    a.eig().map(|l| l.max(0.0))
}

/// Euclidean projection of `v` onto `{x ≥ 0, Σx = total}`.
pub fn project_simplex(v: &[f64], total: f64) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &x) in u.iter().enumerate() {
        cumulative += x;
        let t = (cumulative - total) / (k + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Nearest density matrix (PSD, unit trace).
fn project_density(a: &HermitianOperator) -> HermitianOperator {
    let s = a.eig();
    s.with_eigenvalues(&project_simplex(&s.eigenvalues, 1.0))
}

/// Nearest unit-trace matrix with PSD partial transpose. The partial
/// transpose is an isometric involution, so this is `Γ ∘ P ∘ Γ`.
fn project_pt_density(a: &HermitianOperator, dim_a: usize, dim_b: usize) -> HermitianOperator {
    let pt = HermitianOperator::hermitize(partial_transpose_raw(a.matrix(), dim_a, dim_b));
    HermitianOperator::hermitize(partial_transpose_raw(project_density(&pt).matrix(), dim_a, dim_b))
}

#[derive(Clone, Debug)]
pub struct FeasibleProjection {
    pub matrix: HermitianOperator,
    pub sweeps: usize,
    /// Frobenius change over the last sweep.
    pub residual: f64,
    pub converged: bool,
}

/// Frobenius-nearest PPT state to `a`, by Dykstra's alternating projections.
///
/// The two sets alternated are {PSD, trace one} and {PSD partial transpose,
/// trace one}; both have closed-form projections. A final mix with the
/// maximally mixed state removes any roundoff-level infeasibility, so the
/// output is PSD, PPT and unit trace even when the sweep cap is hit.
pub fn project_feasible(
    a: &HermitianOperator,
    dim_a: usize,
    dim_b: usize,
    tol: f64,
    max_sweeps: usize,
) -> Result<FeasibleProjection> {
    let n = a.dim();
    if dim_a * dim_b != n || dim_a == 0 {
        return Err(Error::BadFactorization { dim: n, dim_a, dim_b });
    }
    let mut x = a.clone();
    let mut p = HermitianOperator::zeros(n);
    let mut q = HermitianOperator::zeros(n);
    let mut residual = f64::INFINITY;
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < max_sweeps {
        let y = project_density(&(&x + &p));
        p = &(&x + &p) - &y;
        let x_next = project_pt_density(&(&y + &q), dim_a, dim_b);
        q = &(&y + &q) - &x_next;
        residual = (&x_next - &x).frobenius_norm().max((&x_next - &y).frobenius_norm());
        x = x_next;
        sweeps += 1;
        if residual < tol {
            converged = true;
            break;
        }
    }
    Ok(FeasibleProjection {
        matrix: make_feasible(x, dim_a, dim_b),
        sweeps,
        residual,
        converged,
    })
}

/// Mixes in just enough of `I/n` to clear negative eigenvalues of the
/// matrix and its partial transpose, then fixes the trace to one.
fn make_feasible(x: HermitianOperator, dim_a: usize, dim_b: usize) -> HermitianOperator {
    let n = x.dim();
    let x = x.scaled(1.0 / x.trace());
    let pt = HermitianOperator::hermitize(partial_transpose_raw(x.matrix(), dim_a, dim_b));
    let m = x.min_eigenvalue().min(pt.min_eigenvalue());
    if m >= 0.0 {
        return x;
    }
    let inv = 1.0 / n as f64;
    // a hair past the exact mixing weight so roundoff lands on the right side
    let t = ((-m) / (-m + inv) * (1.0 + 1e-9)).min(1.0);
    x.scaled(1.0 - t).add_scaled(&HermitianOperator::identity(n), t * inv)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PptConfig {
    /// Stop when the gradient-mapping norm falls below this.
    pub tol_nats: f64,
    pub max_iters: usize,
    /// Weight of `I/n` mixed into the projected input to start from.
    pub eta: f64,
    pub dykstra_tol: f64,
    pub dykstra_max_sweeps: usize,
    pub log_floor: f64,
    /// First smoothing shift `ε`; each later stage divides it by
    /// `smoothing_ratio` until `smoothing_final`.
    pub smoothing_start: f64,
    pub smoothing_final: f64,
    pub smoothing_ratio: f64,
}

impl Default for PptConfig {
    fn default() -> Self {
        PptConfig {
            tol_nats: 1e-7,
            max_iters: 3000,
            eta: 1e-3,
            dykstra_tol: 1e-12,
            dykstra_max_sweeps: 5000,
            log_floor: DEFAULT_LOG_FLOOR,
            smoothing_start: 1e-4,
            smoothing_final: 1e-10,
            smoothing_ratio: 100.0,
        }
    }
}

impl PptConfig {
    /// The `ε` of every smoothing stage, largest first.
    pub fn smoothing_stages(&self) -> Vec<f64> {
        let mut out = vec![self.smoothing_start];
        let mut e = self.smoothing_start;
        while e > self.smoothing_final * (1.0 + 1e-9) && self.smoothing_ratio > 1.0 {
            e = (e / self.smoothing_ratio).max(self.smoothing_final);
            out.push(e);
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct PptSolution {
    pub sigma: DensityMatrix,
    pub value_bits: f64,
    /// Gradient-mapping norm `‖σ⁺ − σ‖/t` at the last step.
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Smoothed objective (nats) at the start of each smoothing stage and
    /// after every accepted step. Non-increasing within a stage.
    pub objective_trace: Vec<f64>,
    /// Index into `objective_trace` where each stage begins.
    pub stage_starts: Vec<usize>,
}

struct Point {
    sigma: HermitianOperator,
    spectral: linalg::Spectral,
    /// Smoothed objective, nats.
    value: f64,
}

/// `S_ε(σ) = Tr(ρ log ρ) − Tr(ρ log(σ + εI))`. Convex in `σ`, below the
/// unsmoothed objective, with curvature bounded by `1/ε²`.
fn evaluate(rho: &HermitianOperator, neg_entropy: f64, sigma: HermitianOperator, eps: f64) -> Point {
    let spectral = sigma.eig();
    let rt = spectral.to_eigenbasis(rho);
    let cross: f64 = spectral
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &l)| rt[(k, k)].re * (l + eps).max(f64::MIN_POSITIVE).ln())
        .sum();
    Point { sigma, spectral, value: neg_entropy - cross }
}

/// Gradient of `S_ε`: minus the Fréchet derivative of `log` at `σ + εI`
/// applied to `ρ`.
fn shifted_gradient(spectral: &linalg::Spectral, rho: &HermitianOperator, eps: f64) -> HermitianOperator {
    let lam: Vec<f64> = spectral.eigenvalues.iter().map(|&l| (l + eps).max(f64::MIN_POSITIVE)).collect();
    let mut g = spectral.to_eigenbasis(rho);
    let n = lam.len();
    for k in 0..n {
        for j in 0..n {
            g[(j, k)] *= -linalg::log_divided_difference(lam[j], lam[k]);
        }
    }
    spectral.from_eigenbasis(&g)
}

/// Gradient-mapping norm under which a stalled line search still counts as
/// converged, as a multiple of the tolerance.
const STALL_TOL_FACTOR: f64 = 1e3;

struct Stage {
    iterations: usize,
    grad_norm: f64,
    converged: bool,
}

/// Projected gradient on `S_ε` from `cur`, appending accepted values to
/// `trace`.
fn descend<P>(
    rho: &HermitianOperator,
    neg_entropy: f64,
    cur: &mut Point,
    eps: f64,
    cfg: &PptConfig,
    budget: usize,
    project: &P,
    trace: &mut Vec<f64>,
) -> Result<Stage>
where
    P: Fn(&HermitianOperator) -> Result<HermitianOperator>,
{
    let mut step = 1.0;
    let mut prev: Option<(HermitianOperator, HermitianOperator)> = None;
    let mut stage = Stage { iterations: 0, grad_norm: f64::INFINITY, converged: false };
    while stage.iterations < budget {
        if !cur.value.is_finite() {
            return Err(Error::Numerical(format!("PPT objective is {} at iteration {}", cur.value, stage.iterations)));
        }
        let grad = shifted_gradient(&cur.spectral, rho, eps);
        if let Some((s_prev, g_prev)) = &prev {
            let s = &cur.sigma - s_prev;
            let y = &grad - g_prev;
            let sy = linalg::trace_inner_raw(s.matrix(), y.matrix());
            if sy > 0.0 {
                step = linalg::trace_inner_raw(s.matrix(), s.matrix()) / sy;
            }
        }
        let mut accepted = None;
        let mut first_norm = None;
        for _ in 0..60 {
            let cand = project(&cur.sigma.add_scaled(&grad, -step))?;
            let d = &cand - &cur.sigma;
            let dn2 = linalg::trace_inner_raw(d.matrix(), d.matrix());
            first_norm.get_or_insert(dn2.sqrt() / step);
            let next = evaluate(rho, neg_entropy, cand, eps);
            let bound = cur.value + linalg::trace_inner_raw(grad.matrix(), d.matrix()) + dn2 / (2.0 * step);
            if next.value <= bound && next.value <= cur.value {
                accepted = Some((next, dn2.sqrt()));
                break;
            }
            step *= 0.5;
        }
        stage.iterations += 1;
        let Some((next, dn)) = accepted else {
            // no decrease at any step size: the objective is flat to working
            // precision, so the stall counts as convergence when the gradient
            // mapping at the first trial step is small as well
            stage.grad_norm = first_norm.unwrap_or(f64::INFINITY);
            stage.converged = stage.grad_norm < STALL_TOL_FACTOR * cfg.tol_nats;
            break;
        };
        stage.grad_norm = dn / step;
        prev = Some((cur.sigma.clone(), grad));
        *cur = next;
        trace.push(cur.value);
        if stage.grad_norm < cfg.tol_nats {
            stage.converged = true;
            break;
        }
    }
    Ok(stage)
}

/// [`ppt_relative_entropy_with`] at default settings apart from the
/// stopping rule.
pub fn ppt_relative_entropy(rho: &DensityMatrix, tol_nats: f64, max_iters: usize) -> Result<PptSolution> {
    let cfg = PptConfig { tol_nats, max_iters, ..PptConfig::default() };
    ppt_relative_entropy_with(rho, &cfg)
}

/// Minimizes `S(ρ‖σ)` over PPT states by projected gradient descent with a
/// Barzilai–Borwein trial step and backtracking on the descent-lemma bound.
///
/// The descent runs on the smoothed objective `S_ε` for each `ε` of
/// [`PptConfig::smoothing_stages`] in turn, warm-starting every stage from
/// the last. Without smoothing, rank-deficient `ρ` drive eigenvalues of `σ`
/// towards zero where the curvature grows without bound and the iteration
/// stalls short of the minimum. The reported value is the unsmoothed
/// objective (log floor `cfg.log_floor`) at the final feasible `σ`.
pub fn ppt_relative_entropy_with(rho: &DensityMatrix, cfg: &PptConfig) -> Result<PptSolution> {
    let (dim_a, dim_b) = (rho.dim_a(), rho.dim_b());
    let n = rho.dim();
    let project = |a: &HermitianOperator| -> Result<HermitianOperator> {
        Ok(project_feasible(a, dim_a, dim_b, cfg.dykstra_tol, cfg.dykstra_max_sweeps)?.matrix)
    };
    let neg_entropy = -linalg::entropy_of_spectrum(&rho.op().eig().eigenvalues, LogBase::E);
    let start = project(rho.op())?
        .scaled(1.0 - cfg.eta)
        .add_scaled(&HermitianOperator::identity(n), cfg.eta / n as f64);
    let stages = cfg.smoothing_stages();
    let mut cur = evaluate(rho.op(), neg_entropy, start, stages[0]);
    let mut trace = Vec::new();
    let mut stage_starts = Vec::with_capacity(stages.len());
    let mut iterations = 0;
    let mut last = Stage { iterations: 0, grad_norm: f64::INFINITY, converged: false };
    for &eps in &stages {
        cur = evaluate(rho.op(), neg_entropy, cur.sigma, eps);
        stage_starts.push(trace.len());
        trace.push(cur.value);
        last = descend(rho.op(), neg_entropy, &mut cur, eps, cfg, cfg.max_iters - iterations, &project, &mut trace)?;
        iterations += last.iterations;
        if iterations >= cfg.max_iters {
            break;
        }
    }
    let complete = stage_starts.len() == stages.len();
    let value = neg_entropy - linalg::trace_inner_raw(rho.op().matrix(), cur.spectral.log_floored(cfg.log_floor).0.matrix());

    Ok(PptSolution {
        value_bits: linalg::nats_to_bits(value),
        sigma: DensityMatrix::assume_valid(cur.sigma, dim_a, dim_b),
        grad_norm: last.grad_norm,
        iterations,
        converged: complete && last.converged,
        objective_trace: trace,
        stage_starts,
    })
}
