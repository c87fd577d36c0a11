//! Parameter sweeps, random-state studies and single-state runs.
//!
//! Every runner returns one [`ExperimentRecord`] per state, in input order.
//! Records are computed in parallel on a rayon pool; each record gets its own
//! seed derived from the run seed and its index, so the output does not
//! depend on the thread count. The CSV and JSON writers live in [`table`],
//! the matrix and config file formats in [`files`].

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analytic;
use crate::cha::{upper_bound, ActiveLearningConfig, IterationRecord, SupportPoint, UpperBoundReport};
use crate::error::{Error, Result};
use crate::linalg::CVector;
use crate::ppt::{ppt_relative_entropy_with, PptConfig, PptSolution};
use crate::seed;
use crate::states::{self, DensityMatrix};

pub mod files;
pub mod table;

pub use files::{apply_config_text, read_matrix_file, write_matrix_file, MatrixFile};
pub use table::{write_csv, write_csv_string, write_json, Report, Timings, CSV_COLUMNS};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "ERBOUND_THREADS";

pub const EXIT_INVALID_INPUT: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

/// Draws allowed per state when sampling random entangled states.
pub const RANDOM_MAX_TRIES: usize = 100_000;

/// Level above which a tiles-family bound counts as clearly nonzero.
pub const TILES_NONZERO_BITS: f64 = 0.01;

/// Smallest bound used to fit the tiles onset.
pub const TILES_DETECT_BITS: f64 = 1e-3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Cha,
    Ppt,
    #[default]
    Both,
}

impl Method {
    pub fn wants_cha(self) -> bool {
        matches!(self, Method::Cha | Method::Both)
    }

    pub fn wants_ppt(self) -> bool {
        matches!(self, Method::Ppt | Method::Both)
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cha" => Ok(Method::Cha),
            "ppt" => Ok(Method::Ppt),
            "both" => Ok(Method::Both),
            other => Err(Error::Parse(format!("unknown method `{other}` (expected cha, ppt or both)"))),
        }
    }
}

/// Everything that determines the numbers a run produces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub cha: ActiveLearningConfig,
    pub ppt: PptConfig,
    pub method: Method,
    pub seed: u64,
    /// Worker threads; `None` lets rayon decide. Never affects results.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            cha: ActiveLearningConfig::default(),
            ppt: PptConfig::default(),
            method: Method::Both,
            seed: 0,
            threads: None,
        }
    }
}

impl Settings {
    /// Desk-scale active learning (see [`ActiveLearningConfig::desk`]).
    pub fn desk() -> Self {
        Settings {
            cha: ActiveLearningConfig::desk(),
            ..Self::default()
        }
    }

    /// First 16 hex digits of the SHA-256 of the solver configs and method.
    /// The seed is reported separately and is not part of the hash.
    pub fn config_hash(&self) -> String {
        let payload = serde_json::to_vec(&(&self.cha, &self.ppt, self.method)).expect("configs serialize");
        hex_prefix(&Sha256::digest(&payload), 16)
    }

    pub fn validate(&self) -> Result<()> {
        self.cha.validate()?;
        if !(self.ppt.tol_nats > 0.0) {
            return Err(Error::invalid("ppt_tol_nats", self.ppt.tol_nats, "must be positive"));
        }
        if self.ppt.max_iters == 0 {
            return Err(Error::invalid("ppt_max_iters", 0.0, "must be positive"));
        }
        if self.threads == Some(0) {
            return Err(Error::invalid("threads", 0.0, "must be positive"));
        }
        Ok(())
    }
}

pub(crate) fn hex_prefix(bytes: &[u8], len: usize) -> String {
    let mut s: String = bytes.iter().map(|b| format!("{b:02x}")).collect();
    s.truncate(len);
    s
}

/// Thread count from [`THREADS_ENV`], if set.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| Error::Parse(format!("{THREADS_ENV}=`{v}` is not a positive integer"))),
        Err(_) => Ok(None),
    }
}

/// One row of output: a state and whichever bounds were computed for it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub experiment: String,
    /// Family and parameters, or `file:<sha256 prefix>` for input files.
    pub state: String,
    pub alpha: Option<f64>,
    pub analytic_bits: Option<f64>,
    pub ppt_bits: Option<f64>,
    pub cha_bits: Option<f64>,
    pub seed: u64,
    pub cha_seconds: Option<f64>,
    pub ppt_seconds: Option<f64>,
    pub cha_converged: Option<bool>,
    pub ppt_converged: Option<bool>,
    /// Solver failures, `; `-separated.
    pub error: Option<String>,
}

impl ExperimentRecord {
    fn new(experiment: &str, state: String, alpha: Option<f64>, seed: u64) -> Self {
        ExperimentRecord {
            experiment: experiment.to_string(),
            state,
            alpha,
            analytic_bits: None,
            ppt_bits: None,
            cha_bits: None,
            seed,
            cha_seconds: None,
            ppt_seconds: None,
            cha_converged: None,
            ppt_converged: None,
            error: None,
        }
    }

    /// `cha_bits − ppt_bits` when both are present.
    pub fn gap_bits(&self) -> Option<f64> {
        Some(self.cha_bits? - self.ppt_bits?)
    }

    fn push_error(&mut self, what: &str, e: &Error) {
        let msg = format!("{what}: {e}");
        self.error = Some(match self.error.take() {
            Some(prev) => format!("{prev}; {msg}"),
            None => msg,
        });
    }

    /// True when a value `method` asks for is missing, or the PPT solver
    /// stopped without meeting its tolerance. The active-learning value is a
    /// valid upper bound whether or not its last inner solve converged.
    pub fn missing_required(&self, method: Method) -> bool {
        (method.wants_cha() && self.cha_bits.is_none())
            || (method.wants_ppt() && (self.ppt_bits.is_none() || self.ppt_converged != Some(true)))
    }
}

/// Exit status for a finished run: 0, or [`EXIT_NOT_CONVERGED`] if any
/// record lacks a required value.
pub fn exit_code(records: &[ExperimentRecord], method: Method) -> i32 {
    if records.iter().any(|r| r.missing_required(method)) {
        EXIT_NOT_CONVERGED
    } else {
        0
    }
}

/// A record together with the full solver outputs behind it.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub record: ExperimentRecord,
    pub cha: Option<UpperBoundReport>,
    pub ppt: Option<PptSolution>,
}

/// Runs the solvers `settings.method` selects on one state. Solver errors
/// end up in the record rather than failing the call.
pub fn evaluate(mut record: ExperimentRecord, rho: &DensityMatrix, settings: &Settings) -> Evaluation {
    let mut cha = None;
    let mut ppt = None;
    if settings.method.wants_ppt() {
        let t = Instant::now();
        match ppt_relative_entropy_with(rho, &settings.ppt) {
            Ok(sol) => {
                record.ppt_bits = Some(sol.value_bits);
                record.ppt_converged = Some(sol.converged);
                ppt = Some(sol);
            }
            Err(e) => record.push_error("ppt", &e),
        }
        record.ppt_seconds = Some(t.elapsed().as_secs_f64());
    }
    if settings.method.wants_cha() {
        let t = Instant::now();
        match upper_bound(rho, &settings.cha, seed::derive_seed(record.seed, 1)) {
            Ok(rep) => {
                record.cha_bits = Some(rep.best_value_bits);
                record.cha_converged = Some(rep.converged());
                cha = Some(rep);
            }
            Err(e) => record.push_error("cha", &e),
        }
        record.cha_seconds = Some(t.elapsed().as_secs_f64());
    }
    Evaluation { record, cha, ppt }
}

/// Maps `f` over `0..n` on a pool of `threads` workers, keeping order.
fn par_indexed<T, F>(n: usize, threads: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Numerical(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| (0..n).into_par_iter().map(f).collect()))
}

/// `start:stop:step`, inclusive of `stop` up to roundoff. Grid points are
/// rounded to 12 decimals so `0.7` prints as `0.7`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad number `{s}` in grid `{spec}`")))
    };
    match parts.as_slice() {
        [one] => Ok(vec![num(one)?]),
        [start, stop, step] => grid(num(start)?, num(stop)?, num(step)?),
        _ => Err(Error::Parse(format!("grid `{spec}` is not start:stop:step"))),
    }
}

pub fn grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::invalid("alpha_grid", step, "need step > 0 and stop >= start"));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12).collect())
}

fn family_sweep<S, A>(experiment: &str, d: usize, alphas: &[f64], settings: &Settings, state: S, exact: A) -> Result<Vec<ExperimentRecord>>
where
    S: Fn(usize, f64) -> Result<DensityMatrix> + Sync,
    A: Fn(usize, f64) -> Result<analytic::AnalyticValue> + Sync,
{
    settings.validate()?;
    // reject bad grids up front rather than per point
    for &a in alphas {
        state(d, a)?;
    }
    par_indexed(alphas.len(), settings.threads, |i| {
        let a = alphas[i];
        let rho = state(d, a).expect("checked above");
        let mut rec = ExperimentRecord::new(experiment, format!("{experiment}(d={d},alpha={a})"), Some(a), seed::derive_seed(settings.seed, i as u64));
        rec.analytic_bits = Some(exact(d, a).expect("checked above").value_bits);
        evaluate(rec, &rho, settings).record
    })
}

/// Werner states `ρ_W(d, α)` over `alphas`, with the closed form alongside.
pub fn werner_sweep(d: usize, alphas: &[f64], settings: &Settings) -> Result<Vec<ExperimentRecord>> {
    family_sweep("werner", d, alphas, settings, states::werner, analytic::werner_er)
}

/// Isotropic states over `alphas`, with the closed form alongside.
pub fn isotropic_sweep(d: usize, alphas: &[f64], settings: &Settings) -> Result<Vec<ExperimentRecord>> {
    family_sweep("isotropic", d, alphas, settings, states::isotropic, analytic::isotropic_er)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TilesSummary {
    /// Smallest grid `α` whose upper bound exceeds [`TILES_NONZERO_BITS`].
    pub first_nonzero_alpha: Option<f64>,
    /// Where the bound leaves zero, from a linear fit of `sqrt(bound)`
    /// through the first two grid points above [`TILES_DETECT_BITS`]. The
    /// bound grows quadratically away from the separable set, so the root of
    /// the fit estimates the boundary.
    pub onset_alpha: Option<f64>,
}

impl TilesSummary {
    pub fn from_records(records: &[ExperimentRecord]) -> Self {
        let mut pts: Vec<(f64, f64)> = records.iter().filter_map(|r| Some((r.alpha?, r.cha_bits?))).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let first_nonzero_alpha = pts.iter().find(|p| p.1 > TILES_NONZERO_BITS).map(|p| p.0);
        let above: Vec<(f64, f64)> = pts.iter().copied().filter(|p| p.1 > TILES_DETECT_BITS).take(2).collect();
        let onset_alpha = match above.as_slice() {
            [(a1, v1), (a2, v2)] => {
                let (s1, s2) = (v1.sqrt(), v2.sqrt());
                (s2 > s1).then(|| a1 - s1 * (a2 - a1) / (s2 - s1))
            }
            _ => None,
        };
        TilesSummary { first_nonzero_alpha, onset_alpha }
    }
}

/// `α·ρ_tiles + (1−α)·I/9` over `alphas`.
pub fn tiles_sweep(alphas: &[f64], settings: &Settings) -> Result<(Vec<ExperimentRecord>, TilesSummary)> {
    settings.validate()?;
    for &a in alphas {
        states::tiles_family(a)?;
    }
    let records = par_indexed(alphas.len(), settings.threads, |i| {
        let a = alphas[i];
        let rho = states::tiles_family(a).expect("checked above");
        let rec = ExperimentRecord::new("tiles", format!("tiles(alpha={a})"), Some(a), seed::derive_seed(settings.seed, i as u64));
        evaluate(rec, &rho, settings).record
    })?;
    let summary = TilesSummary::from_records(&records);
    Ok((records, summary))
}

/// `count` random entangled states on `dim_a ⊗ dim_b`. State `i` is drawn
/// from its record seed.
pub fn random_study(dim_a: usize, dim_b: usize, count: usize, settings: &Settings) -> Result<Vec<ExperimentRecord>> {
    settings.validate()?;
    if count == 0 {
        return Err(Error::invalid("count", 0.0, "must be at least 1"));
    }
    if dim_a < 2 || dim_b < 2 {
        return Err(Error::invalid("dim", dim_a.min(dim_b) as f64, "both factors need dimension at least 2"));
    }
    par_indexed(count, settings.threads, |i| {
        let s = seed::derive_seed(settings.seed, i as u64);
        let mut rec = ExperimentRecord::new("random", format!("random({dim_a}x{dim_b},#{i})"), None, s);
        match states::random_entangled(dim_a, dim_b, s, RANDOM_MAX_TRIES) {
            Ok(rho) => evaluate(rec, &rho, settings).record,
            Err(e) => {
                rec.push_error("sample", &e);
                rec
            }
        }
    })
}

/// Bounds for a state read from a matrix file.
pub fn bound_file(path: &std::path::Path, settings: &Settings) -> Result<Evaluation> {
    settings.validate()?;
    let (rho, digest) = read_matrix_file(path)?;
    let rec = ExperimentRecord::new("bound", format!("file:{digest}"), None, settings.seed);
    Ok(evaluate(rec, &rho, settings))
}

/// `(|00⟩ + |11⟩ + |12⟩)/√3` on `2 ⊗ 3`.
pub fn demo_pure_vector() -> CVector {
    let r = Complex64::new(1.0 / 3f64.sqrt(), 0.0);
    let mut psi = CVector::zeros(6);
    psi[0] = r;
    psi[4] = r;
    psi[5] = r;
    psi
}

/// The pure-state benchmark with its per-iteration history.
#[derive(Clone, Debug)]
pub struct PureDemo {
    pub record: ExperimentRecord,
    pub history: Vec<IterationRecord>,
    pub support: Vec<SupportPoint>,
}

pub fn demo_pure(settings: &Settings) -> Result<PureDemo> {
    settings.validate()?;
    let psi = demo_pure_vector();
    let rho = DensityMatrix::pure(&psi, 2, 3)?;
    let mut rec = ExperimentRecord::new("demo-pure", "pure((|00>+|11>+|12>)/sqrt3)".to_string(), None, settings.seed);
    rec.analytic_bits = Some(analytic::pure_state_er(&psi, 2, 3)?.value_bits);
    let ev = evaluate(rec, &rho, settings);
    let (history, support) = match ev.cha {
        Some(rep) => (rep.history, rep.best_support),
        None => (Vec::new(), Vec::new()),
    };
    Ok(PureDemo { record: ev.record, history, support })
}
