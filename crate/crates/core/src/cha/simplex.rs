//! Relative-entropy minimization over the convex hull of a candidate pool.
//!
//! The variable is a weight vector `c` on the probability simplex and the
//! objective is `f(c) = Tr(ρ log ρ) − Tr(ρ log Σ cᵢ Pᵢ)`. The solver is
//! Frank–Wolfe with away steps; the linear minimization oracle is an argmin
//! over pool vertices, and the Frank–Wolfe gap bounds the distance to the
//! optimum over this pool.

use crate::error::{Error, Result};
use crate::linalg::{self, log_divided_difference, CMatrix, HermitianOperator, LogBase, Spectral};
use crate::states::DensityMatrix;

use super::{ActiveLearningConfig, CandidatePool};

#[derive(Clone, Debug)]
pub struct SimplexSolution {
    pub weights: Vec<f64>,
    pub sigma: DensityMatrix,
    pub objective_nats: f64,
    pub fw_gap_nats: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl SimplexSolution {
    pub fn objective_bits(&self) -> f64 {
        linalg::nats_to_bits(self.objective_nats)
    }

    pub fn support(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.weights.iter().copied().enumerate().filter(|&(_, w)| w > 0.0)
    }
}

/// `Σ cᵢ |vᵢ⟩⟨vᵢ|`.
pub fn mixture(pool: &CandidatePool, weights: &[f64]) -> HermitianOperator {
    let n = pool.dim();
    let mut m = CMatrix::zeros(n, n);
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        let v = pool.vector(i);
        for k in 0..n {
            let ck = v[k].conj() * w;
            for j in 0..n {
                m[(j, k)] += v[j] * ck;
            }
        }
    }
    HermitianOperator::hermitize(m)
}

/// Objective evaluated at one `σ`, with the pieces its derivatives reuse.
struct Eval {
    spectral: Spectral,
    /// `ρ` in the eigenbasis of `σ`.
    rho_tilde: CMatrix,
    value: f64,
}

struct Objective<'a> {
    rho: &'a HermitianOperator,
    neg_entropy: f64,
    floor: f64,
}

impl<'a> Objective<'a> {
    fn new(rho: &'a HermitianOperator, floor: f64) -> Self {
        let neg_entropy = -linalg::entropy_of_spectrum(&rho.eig().eigenvalues, LogBase::E);
        Objective { rho, neg_entropy, floor }
    }

    fn eval(&self, sigma: &HermitianOperator) -> Eval {
        let spectral = sigma.eig();
        let rho_tilde = spectral.to_eigenbasis(self.rho);
        let cross: f64 = spectral
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(k, &l)| rho_tilde[(k, k)].re * l.max(self.floor).ln())
            .sum();
        Eval {
            spectral,
            rho_tilde,
            value: self.neg_entropy - cross,
        }
    }

    /// `D log σ [ρ]` in the eigenbasis of `σ`; the Euclidean gradient of the
    /// objective with respect to `σ` is its negative.
    fn dlog_rho_tilde(&self, e: &Eval) -> CMatrix {
        let lam: Vec<f64> = e.spectral.eigenvalues.iter().map(|&l| l.max(self.floor)).collect();
        let n = lam.len();
        let mut g = e.rho_tilde.clone();
        for k in 0..n {
            for j in 0..n {
                g[(j, k)] *= log_divided_difference(lam[j], lam[k]);
            }
        }
        g
    }

    fn dlog_rho(&self, e: &Eval) -> HermitianOperator {
        e.spectral.from_eigenbasis(&self.dlog_rho_tilde(e))
    }

    /// Directional derivative of the objective at `e` along `dir`.
    fn slope(&self, e: &Eval, dir: &HermitianOperator) -> f64 {
        let g = self.dlog_rho_tilde(e);
        let d = e.spectral.to_eigenbasis(dir);
        -linalg::trace_inner_raw(&g, &d)
    }
}

fn check_inputs(rho: &DensityMatrix, pool: &CandidatePool) -> Result<()> {
    if pool.is_empty() {
        return Err(Error::invalid("pool", 0.0, "candidate pool is empty"));
    }
    if rho.dim() != pool.dim() {
        return Err(Error::DimensionMismatch {
            expected: pool.dim(),
            found: rho.dim(),
        });
    }
    Ok(())
}

/// `f(c)` in nats.
pub fn simplex_objective(rho: &DensityMatrix, pool: &CandidatePool, weights: &[f64], floor: f64) -> Result<f64> {
    check_inputs(rho, pool)?;
    let obj = Objective::new(rho.op(), floor);
    Ok(obj.eval(&mixture(pool, weights)).value)
}

/// `∂f/∂cᵢ = −⟨vᵢ| D log σ [ρ] |vᵢ⟩` for every vertex.
pub fn simplex_gradient(rho: &DensityMatrix, pool: &CandidatePool, weights: &[f64], floor: f64) -> Result<Vec<f64>> {
    check_inputs(rho, pool)?;
    let obj = Objective::new(rho.op(), floor);
    let e = obj.eval(&mixture(pool, weights));
    Ok(vertex_gradient(&obj.dlog_rho(&e), pool))
}

fn vertex_gradient(dlog_rho: &HermitianOperator, pool: &CandidatePool) -> Vec<f64> {
    pool.vectors().iter().map(|v| -dlog_rho.expectation(v)).collect()
}

const LINE_SEARCH_SLOPE_FRACTION: f64 = 0.05;

fn uniform(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

/// Line search on `γ ↦ f(σ + γ·dir)` over `[0, γ_max]`.
///
/// Looks for a root of the (increasing) directional derivative: starting at
/// `guess`, the bracket is grown by secant extrapolation until the slope
/// turns positive, then narrowed by Illinois false position until the slope
/// is within a small fraction of `slope0`. A backtracking guard on `f`
/// itself follows.
fn line_search(
    obj: &Objective,
    sigma: &HermitianOperator,
    at0: &Eval,
    dir: &HermitianOperator,
    gamma_max: f64,
    slope0: f64,
    guess: f64,
) -> (f64, Option<Eval>) {
    let at = |g: f64| obj.eval(&sigma.add_scaled(dir, g));
    let tol = LINE_SEARCH_SLOPE_FRACTION * slope0.abs();
    let (mut a, mut fa) = (0.0, slope0);
    let mut x = guess.clamp(1e-12 * gamma_max, gamma_max);
    let mut e = at(x);
    let mut dx = obj.slope(&e, dir);
    // grow until the slope changes sign or the step hits its cap
    let mut grow = 0;
    while dx < -tol && x < gamma_max && grow < 60 {
        let (prev, fprev) = (a, fa);
        a = x;
        fa = dx;
        let secant = if fa > fprev { a - fa * (a - prev) / (fa - fprev) } else { f64::INFINITY };
        x = secant.clamp(2.0 * a, 16.0 * a).min(gamma_max);
        e = at(x);
        dx = obj.slope(&e, dir);
        grow += 1;
    }
    let (mut gamma, mut eval) = (x, e);
    if dx > tol {
        let (mut b, mut fb) = (x, dx);
        let mut side = 0i8;
        for _ in 0..60 {
            let mut m = (a * fb - b * fa) / (fb - fa);
            if !(m > a && m < b) {
                m = 0.5 * (a + b);
            }
            let em = at(m);
            let dm = obj.slope(&em, dir);
            gamma = m;
            eval = em;
            if dm.abs() <= tol || b - a <= 1e-15 * gamma_max {
                break;
            }
            if dm < 0.0 {
                a = m;
                fa = dm;
                if side == -1 {
                    fb *= 0.5;
                }
                side = -1;
            } else {
                b = m;
                fb = dm;
                if side == 1 {
                    fa *= 0.5;
                }
                side = 1;
            }
        }
    }
    let mut halvings = 0;
    while !(eval.value <= at0.value) {
        if halvings == 60 {
            return (0.0, None);
        }
        gamma *= 0.5;
        eval = at(gamma);
        halvings += 1;
    }
    (gamma, Some(eval))
}

/// Minimizes the relative entropy to `rho` over the hull of `pool`, starting
/// from uniform weights.
pub fn solve_simplex(rho: &DensityMatrix, pool: &CandidatePool, cfg: &ActiveLearningConfig) -> Result<SimplexSolution> {
    solve_simplex_from(rho, pool, cfg, None)
}

/// As [`solve_simplex`], starting from `start` (renormalized) when given.
pub fn solve_simplex_from(
    rho: &DensityMatrix,
    pool: &CandidatePool,
    cfg: &ActiveLearningConfig,
    start: Option<&[f64]>,
) -> Result<SimplexSolution> {
    check_inputs(rho, pool)?;
    let n = pool.len();
    let mut c = match start {
        Some(w) => {
            if w.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: w.len() });
            }
            let total: f64 = w.iter().map(|x| x.max(0.0)).sum();
            if !(total > 0.0) {
                uniform(n)
            } else {
                w.iter().map(|x| x.max(0.0) / total).collect()
            }
        }
        None => uniform(n),
    };
    let obj = Objective::new(rho.op(), cfg.log_floor);
    let mut sigma = mixture(pool, &c);
    let mut eval = obj.eval(&sigma);
    let mut steps = 0;
    // last accepted step of each kind, as a fraction of its cap
    let mut last_toward = 0.1;
    let mut last_away = 0.1;
    for it in 0..cfg.solver_max_iters {
        if !eval.value.is_finite() {
            return Err(nan_failure(it, pool, &eval));
        }
        let g = vertex_gradient(&obj.dlog_rho(&eval), pool);
        let gc: f64 = c.iter().zip(&g).map(|(a, b)| a * b).sum();
        let (s, gs) = argmin(&g);
        let fw_gain = gc - gs;
        if fw_gain <= cfg.solver_tol_nats {
            break;
        }
        let (v, gv) = (0..n)
            .filter(|&i| c[i] > 0.0)
            .map(|i| (i, g[i]))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("weights have nonempty support");
        let away_gain = gv - gc;
        let toward = fw_gain >= away_gain || c[v] >= 1.0;
        let (dir, gamma_max, gain) = if toward {
            (pool_projector(pool, s).add_scaled(&sigma, -1.0), 1.0, fw_gain)
        } else {
            (sigma.add_scaled(&pool_projector(pool, v), -1.0), c[v] / (1.0 - c[v]), away_gain)
        };
        let guess = gamma_max * if toward { last_toward } else { last_away };
        let (gamma, next) = line_search(&obj, &sigma, &eval, &dir, gamma_max, -gain, guess);
        let Some(next) = next else { break };
        if gamma <= 0.0 {
            break;
        }
        if toward {
            last_toward = gamma / gamma_max;
        } else {
            last_away = gamma / gamma_max;
        }
        if toward {
            c.iter_mut().for_each(|x| *x *= 1.0 - gamma);
            c[s] += gamma;
        } else {
            c.iter_mut().for_each(|x| *x *= 1.0 + gamma);
            c[v] -= gamma;
            if gamma >= gamma_max {
                c[v] = 0.0;
            }
        }
        steps += 1;
        if steps % 64 == 0 {
            sanitize(&mut c);
            sigma = mixture(pool, &c);
            eval = obj.eval(&sigma);
        } else {
            sigma = sigma.add_scaled(&dir, gamma);
            eval = next;
        }
    }

    sanitize(&mut c);
    let sigma = mixture(pool, &c);
    let eval = obj.eval(&sigma);
    if !eval.value.is_finite() {
        return Err(nan_failure(steps, pool, &eval));
    }
    let g = vertex_gradient(&obj.dlog_rho(&eval), pool);
    let gc: f64 = c.iter().zip(&g).map(|(a, b)| a * b).sum();
    let gap = (gc - argmin(&g).1).max(0.0);
    Ok(SimplexSolution {
        weights: c,
        sigma: DensityMatrix::assume_valid(sigma, pool.dim_a(), pool.dim_b()),
        objective_nats: eval.value,
        fw_gap_nats: gap,
        iterations: steps,
        converged: gap <= cfg.solver_tol_nats,
    })
}

fn pool_projector(pool: &CandidatePool, i: usize) -> HermitianOperator {
    HermitianOperator::projector(pool.vector(i))
}

fn argmin(g: &[f64]) -> (usize, f64) {
    g.iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty gradient")
}

fn sanitize(c: &mut [f64]) {
    for x in c.iter_mut() {
        if *x < 1e-300 {
            *x = 0.0;
        }
    }
    let total: f64 = c.iter().sum();
    c.iter_mut().for_each(|x| *x /= total);
}

fn nan_failure(iteration: usize, pool: &CandidatePool, eval: &Eval) -> Error {
    let comp = pool.composition();
    Error::Numerical(format!(
        "simplex objective is {} at iteration {iteration}; pool of {} candidates \
         ({} anchors, {} useful, {} perturbed, {} fresh), sigma eigenvalues in [{:e}, {:e}]",
        eval.value,
        pool.len(),
        comp.anchors,
        comp.useful,
        comp.perturbed,
        comp.fresh,
        eval.spectral.eigenvalues.first().copied().unwrap_or(f64::NAN),
        eval.spectral.eigenvalues.last().copied().unwrap_or(f64::NAN),
    ))
}
