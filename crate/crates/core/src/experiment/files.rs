//! Matrix input files and flat config files.
//!
//! A matrix file is JSON: `{"dim_a": 2, "dim_b": 2, "matrix": [[re, im], ...]}`
//! with the `(dim_a·dim_b)²` entries in row-major order.
//!
//! A config file has one `key = value` per line; `#` starts a comment. Keys
//! are the [`ActiveLearningConfig`](crate::cha::ActiveLearningConfig) field
//! names plus `method`, `seed`, `ppt_tol_nats` and `ppt_max_iters`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, HermitianOperator};
use crate::ppt::project_psd;
use crate::states::DensityMatrix;

use super::{hex_prefix, Settings};

/// Tolerance on Hermiticity, trace and positivity for matrix files.
pub const FILE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub dim_a: usize,
    pub dim_b: usize,
    pub matrix: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        let m = rho.op().matrix();
        let n = rho.dim();
        let mut matrix = Vec::with_capacity(n * n);
        for j in 0..n {
            for k in 0..n {
                matrix.push([m[(j, k)].re, m[(j, k)].im]);
            }
        }
        MatrixFile { dim_a: rho.dim_a(), dim_b: rho.dim_b(), matrix }
    }

    /// Validates to [`FILE_TOL`], then returns the nearest exact state
    /// (Hermitian part, negative eigenvalues clipped, unit trace).
    pub fn to_density(&self) -> Result<DensityMatrix> {
        let n = self.dim_a * self.dim_b;
        if n == 0 {
            return Err(Error::BadFactorization { dim: 0, dim_a: self.dim_a, dim_b: self.dim_b });
        }
        if self.matrix.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: self.matrix.len() });
        }
        if let Some(bad) = self.matrix.iter().flatten().find(|x| !x.is_finite()) {
            return Err(Error::Parse(format!("matrix entry {bad} is not finite")));
        }
        let m = CMatrix::from_fn(n, n, |j, k| {
            let [re, im] = self.matrix[j * n + k];
            Complex64::new(re, im)
        });
        let op = HermitianOperator::with_tolerance(m, FILE_TOL)?;
        let checked = DensityMatrix::with_tolerance(op, self.dim_a, self.dim_b, FILE_TOL, FILE_TOL)?;
        let clipped = project_psd(checked.op());
        let t = clipped.trace();
        Ok(DensityMatrix::assume_valid(clipped.scaled(1.0 / t), self.dim_a, self.dim_b))
    }
}

/// Reads and validates a matrix file. Also returns the first 16 hex digits
/// of the SHA-256 of its bytes.
pub fn read_matrix_file(path: &Path) -> Result<(DensityMatrix, String)> {
    let bytes = std::fs::read(path)?;
    let digest = hex_prefix(&Sha256::digest(&bytes), 16);
    let file: MatrixFile = serde_json::from_slice(&bytes)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok((file.to_density()?, digest))
}

pub fn write_matrix_file(path: &Path, rho: &DensityMatrix) -> Result<()> {
    let text = serde_json::to_string_pretty(&MatrixFile::from_density(rho))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

/// Applies a flat `key = value` config on top of `settings`.
pub fn apply_config_text(settings: &mut Settings, text: &str) -> Result<()> {
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("config line {}: expected key = value", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |what: &str| Error::Parse(format!("config line {}: `{key}` needs {what}, got `{value}`", lineno + 1));
        let int = || value.parse::<usize>().map_err(|_| bad("a non-negative integer"));
        let real = || value.parse::<f64>().map_err(|_| bad("a number"));
        let c = &mut settings.cha;
        match key {
            "pool_size" => c.pool_size = int()?,
            "outer_iterations" => c.outer_iterations = int()?,
            "weight_threshold" | "epsilon" => c.weight_threshold = real()?,
            "delta0" => c.delta0 = real()?,
            "delta_decay" => c.delta_decay = real()?,
            "delta_floor" => c.delta_floor = real()?,
            "resample_per_useful" => c.resample_per_useful = int()?,
            "fresh_fraction" => c.fresh_fraction = real()?,
            "solver_tol_nats" => c.solver_tol_nats = real()?,
            "solver_max_iters" => c.solver_max_iters = int()?,
            "log_floor" => {
                c.log_floor = real()?;
                settings.ppt.log_floor = c.log_floor;
            }
            "ppt_tol_nats" => settings.ppt.tol_nats = real()?,
            "ppt_max_iters" => settings.ppt.max_iters = int()?,
            "method" => settings.method = value.parse()?,
            "seed" => settings.seed = value.parse().map_err(|_| bad("an unsigned integer"))?,
            _ => return Err(Error::Parse(format!("config line {}: unknown key `{key}`", lineno + 1))),
        }
    }
    Ok(())
}
