//! Dense complex Hermitian linear algebra.
//!
//! Everything downstream (states, objectives, gradients, projections) is
//! expressed through [`HermitianOperator`] and its [`Spectral`] decomposition.
//! Logarithms are natural; conversion to bits happens only through
//! [`LogBase`] at reporting boundaries.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Eigenvalue floor applied inside every matrix logarithm.
pub const DEFAULT_LOG_FLOOR: f64 = 1e-14;

/// Absolute tolerance of the Hermitian-symmetry check.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogBase {
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "e")]
    E,
}

impl LogBase {
    /// Converts a quantity measured in nats into this base.
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            LogBase::Two => nats / std::f64::consts::LN_2,
            LogBase::E => nats,
        }
    }

    pub fn to_nats(self, value: f64) -> f64 {
        match self {
            LogBase::Two => value * std::f64::consts::LN_2,
            LogBase::E => value,
        }
    }
}

pub fn nats_to_bits(nats: f64) -> f64 {
    LogBase::Two.from_nats(nats)
}

pub fn bits_to_nats(bits: f64) -> f64 {
    LogBase::Two.to_nats(bits)
}

/// Dense square complex matrix that equals its own conjugate transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator(CMatrix);

impl HermitianOperator {
    /// Validates symmetry to [`HERMITIAN_TOL`]. The stored matrix is the
    /// exact Hermitian part of the input.
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::with_tolerance(m, HERMITIAN_TOL)
    }

    pub fn with_tolerance(m: CMatrix, tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        let (row, col, deviation) = worst_asymmetry(&m);
        if !(deviation <= tol) {
            return Err(Error::NotHermitian {
                row,
                col,
                deviation,
            });
        }
        Ok(Self::hermitize(m))
    }

    /// Takes the Hermitian part `(m + m†)/2` without checking. Used for
    /// matrices that are Hermitian up to roundoff by construction.
    pub fn hermitize(m: CMatrix) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        let n = m.nrows();
        let mut out = m;
        for j in 0..n {
            let d = out[(j, j)].re;
            out[(j, j)] = Complex64::new(d, 0.0);
            for k in (j + 1)..n {
                let avg = (out[(j, k)] + out[(k, j)].conj()) * 0.5;
                out[(j, k)] = avg;
                out[(k, j)] = avg.conj();
            }
        }
        HermitianOperator(out)
    }

    pub fn identity(dim: usize) -> Self {
        HermitianOperator(CMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianOperator(CMatrix::zeros(dim, dim))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = CMatrix::zeros(n, n);
        for (j, &d) in diag.iter().enumerate() {
            m[(j, j)] = Complex64::new(d, 0.0);
        }
        HermitianOperator(m)
    }

    /// Rank-one operator `|v⟩⟨v|` (not normalized).
    pub fn projector(v: &CVector) -> Self {
        let n = v.len();
        let mut m = CMatrix::zeros(n, n);
        for k in 0..n {
            let ck = v[k].conj();
            for j in 0..n {
                m[(j, k)] = v[j] * ck;
            }
        }
        Self::hermitize(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|j| self.0[(j, j)].re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        HermitianOperator(self.0.map(|z| z * s))
    }

    /// `self + s·other`.
    pub fn add_scaled(&self, other: &HermitianOperator, s: f64) -> Self {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        HermitianOperator(self.0.zip_map(&other.0, |a, b| a + b * s))
    }

    /// Real expectation value `⟨v|A|v⟩`.
    pub fn expectation(&self, v: &CVector) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for k in 0..n {
            let mut col = Complex64::new(0.0, 0.0);
            for j in 0..n {
                col += v[j].conj() * self.0[(j, k)];
            }
            acc += (col * v[k]).re;
        }
        acc
    }

    /// Matrix product as a plain complex matrix (generally not Hermitian).
    pub fn mul_matrix(&self, other: &HermitianOperator) -> CMatrix {
        &self.0 * &other.0
    }

    pub fn eig(&self) -> Spectral {
        hermitian_eig(self)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eig().eigenvalues[0]
    }
}

impl AsRef<HermitianOperator> for HermitianOperator {
    fn as_ref(&self) -> &HermitianOperator {
        self
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: &HermitianOperator) -> HermitianOperator {
        self.add_scaled(rhs, 1.0)
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: &HermitianOperator) -> HermitianOperator {
        self.add_scaled(rhs, -1.0)
    }
}

impl Mul<f64> for &HermitianOperator {
    type Output = HermitianOperator;
    fn mul(self, rhs: f64) -> HermitianOperator {
        self.scaled(rhs)
    }
}

fn worst_asymmetry(m: &CMatrix) -> (usize, usize, f64) {
    let n = m.nrows();
    let mut worst = (0, 0, 0.0_f64);
    for j in 0..n {
        for k in j..n {
            let dev = (m[(j, k)] - m[(k, j)].conj()).norm();
            if dev > worst.2 || dev.is_nan() {
                worst = (j, k, dev);
                if dev.is_nan() {
                    return worst;
                }
            }
        }
    }
    worst
}

/// Eigendecomposition with eigenvalues ascending and eigenvectors as
/// columns of a unitary matrix.
#[derive(Clone, Debug)]
pub struct Spectral {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

pub fn hermitian_eig(a: &HermitianOperator) -> Spectral {
    let eig = a.0.clone().symmetric_eigen();
    let n = a.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Spectral {
        eigenvalues,
        eigenvectors,
    }
}

/// Side information from a floored logarithm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogDiagnostics {
    pub min_eigenvalue: f64,
    /// Number of eigenvalues raised to the floor.
    pub clamped: usize,
    /// Set when some eigenvalue is below `-100·floor`.
    pub positivity_warning: bool,
}

impl Spectral {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V·diag(f(λ))·V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianOperator {
        let vals: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        self.with_eigenvalues(&vals)
    }

    pub fn with_eigenvalues(&self, vals: &[f64]) -> HermitianOperator {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (k, &l) in vals.iter().enumerate() {
            scaled.column_mut(k).scale_mut(l);
        }
        HermitianOperator::hermitize(scaled * v.adjoint())
    }

    pub fn reconstruct(&self) -> HermitianOperator {
        self.with_eigenvalues(&self.eigenvalues)
    }

    pub fn log_floored(&self, floor: f64) -> (HermitianOperator, LogDiagnostics) {
        let diag = self.log_diagnostics(floor);
        (self.map(|l| l.max(floor).ln()), diag)
    }

    pub fn log_diagnostics(&self, floor: f64) -> LogDiagnostics {
        let min = self.eigenvalues.first().copied().unwrap_or(0.0);
        LogDiagnostics {
            min_eigenvalue: min,
            clamped: self.eigenvalues.iter().filter(|&&l| l < floor).count(),
            positivity_warning: min < -100.0 * floor,
        }
    }

    /// Rotates `x` into this eigenbasis: `V†·x·V`.
    pub fn to_eigenbasis(&self, x: &HermitianOperator) -> CMatrix {
        self.eigenvectors.adjoint() * x.matrix() * &self.eigenvectors
    }

    pub fn from_eigenbasis(&self, m: &CMatrix) -> HermitianOperator {
        HermitianOperator::hermitize(&self.eigenvectors * m * self.eigenvectors.adjoint())
    }

    /// Fréchet derivative of the floored logarithm at the decomposed
    /// operator, applied to `x` (Daleckii–Krein).
    pub fn frechet_log(&self, x: &HermitianOperator, floor: f64) -> Result<HermitianOperator> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        let lam: Vec<f64> = self.eigenvalues.iter().map(|&l| l.max(floor)).collect();
        let mut xt = self.to_eigenbasis(x);
        let n = self.dim();
        for k in 0..n {
            for j in 0..n {
                xt[(j, k)] *= log_divided_difference(lam[j], lam[k]);
            }
        }
        Ok(self.from_eigenbasis(&xt))
    }
}

/// `(log u − log v)/(u − v)`, with the limit `1/u` on the diagonal.
pub fn log_divided_difference(u: f64, v: f64) -> f64 {
    if u == v {
        return 1.0 / u;
    }
    let r = (u - v) / v;
    if r.abs() < 1e-8 {
        (1.0 - r / 2.0 + r * r / 3.0) / v
    } else {
        r.ln_1p() / (u - v)
    }
}

/// `V·diag(ln max(λ, floor))·V†`.
pub fn matrix_log_floored(a: &HermitianOperator, floor: f64) -> HermitianOperator {
    a.eig().log_floored(floor).0
}

pub fn matrix_log_with_diagnostics(
    a: &HermitianOperator,
    floor: f64,
) -> (HermitianOperator, LogDiagnostics) {
    a.eig().log_floored(floor)
}

/// Directional derivative of the floored matrix logarithm at `a` along `x`.
pub fn frechet_log(
    a: &HermitianOperator,
    x: &HermitianOperator,
    floor: f64,
) -> Result<HermitianOperator> {
    if a.dim() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: x.dim(),
        });
    }
    a.eig().frechet_log(x, floor)
}

pub fn kron(a: &HermitianOperator, b: &HermitianOperator) -> HermitianOperator {
    HermitianOperator(a.0.kronecker(&b.0))
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    let mut out = CVector::zeros(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i * b.len() + j] = x * y;
        }
    }
    out
}

fn check_factorization(dim: usize, dim_a: usize, dim_b: usize) -> Result<()> {
    if dim_a == 0 || dim_b == 0 || dim_a * dim_b != dim {
        return Err(Error::BadFactorization { dim, dim_a, dim_b });
    }
    Ok(())
}

/// Transpose of the second tensor factor. A pure entry permutation, so it is
/// an exact involution and preserves trace and Frobenius norm.
pub fn partial_transpose(
    a: &HermitianOperator,
    dim_a: usize,
    dim_b: usize,
) -> Result<HermitianOperator> {
    check_factorization(a.dim(), dim_a, dim_b)?;
    Ok(HermitianOperator(partial_transpose_raw(&a.0, dim_a, dim_b)))
}

pub(crate) fn partial_transpose_raw(m: &CMatrix, dim_a: usize, dim_b: usize) -> CMatrix {
    let n = dim_a * dim_b;
    let mut out = CMatrix::zeros(n, n);
    for i in 0..dim_a {
        for k in 0..dim_a {
            for j in 0..dim_b {
                for l in 0..dim_b {
                    out[(i * dim_b + l, k * dim_b + j)] = m[(i * dim_b + j, k * dim_b + l)];
                }
            }
        }
    }
    out
}

pub fn partial_trace_b(
    a: &HermitianOperator,
    dim_a: usize,
    dim_b: usize,
) -> Result<HermitianOperator> {
    check_factorization(a.dim(), dim_a, dim_b)?;
    let mut out = CMatrix::zeros(dim_a, dim_a);
    for i in 0..dim_a {
        for k in 0..dim_a {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..dim_b {
                acc += a.0[(i * dim_b + j, k * dim_b + j)];
            }
            out[(i, k)] = acc;
        }
    }
    Ok(HermitianOperator::hermitize(out))
}

/// Real part of `Tr(a·b)`.
pub fn trace_inner(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(trace_inner_raw(&a.0, &b.0))
}

pub(crate) fn trace_inner_raw(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for k in 0..n {
        for j in 0..n {
            let x = a[(j, k)];
            let y = b[(k, j)];
            acc += x.re * y.re - x.im * y.im;
        }
    }
    acc
}

/// `−Σ λ log λ` over eigenvalues above [`DEFAULT_LOG_FLOOR`].
pub fn entropy_of_spectrum(eigenvalues: &[f64], base: LogBase) -> f64 {
    let nats: f64 = eigenvalues
        .iter()
        .filter(|&&l| l > DEFAULT_LOG_FLOOR)
        .map(|&l| -l * l.ln())
        .sum();
    base.from_nats(nats.max(0.0))
}

pub fn von_neumann_entropy(rho: impl AsRef<HermitianOperator>, base: LogBase) -> f64 {
    entropy_of_spectrum(&rho.as_ref().eig().eigenvalues, base)
}

/// Binary Shannon entropy in bits.
pub fn binary_entropy_bits(p: f64) -> f64 {
    entropy_of_spectrum(&[p, 1.0 - p], LogBase::Two)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelativeEntropy {
    pub value: f64,
    pub base: LogBase,
    /// `ρ` has weight on eigendirections of `σ` that were clamped to the floor.
    pub support_violation: bool,
    pub sigma_diagnostics: LogDiagnostics,
}

const TRACE_TOL: f64 = 1e-8;

/// `Tr(ρ log ρ) − Tr(ρ log σ)` with floored logarithms.
pub fn relative_entropy(
    rho: impl AsRef<HermitianOperator>,
    sigma: impl AsRef<HermitianOperator>,
    base: LogBase,
    floor: f64,
) -> Result<RelativeEntropy> {
    let (rho, sigma) = (rho.as_ref(), sigma.as_ref());
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    for t in [rho.trace(), sigma.trace()] {
        if (t - 1.0).abs() > TRACE_TOL {
            return Err(Error::TraceViolation { trace: t });
        }
    }
    let neg_entropy = -entropy_of_spectrum(&rho.eig().eigenvalues, LogBase::E);
    let sig = sigma.eig();
    let (log_sigma, diag) = sig.log_floored(floor);
    let cross = trace_inner_raw(&rho.0, &log_sigma.0);
    let mut leaked = 0.0;
    for (k, &l) in sig.eigenvalues.iter().enumerate() {
        if l <= floor {
            let v = sig.eigenvectors.column(k).into_owned();
            leaked += rho.expectation(&v);
        }
    }
    Ok(RelativeEntropy {
        value: base.from_nats(neg_entropy - cross),
        base,
        support_violation: leaked > 1e-12,
        sigma_diagnostics: diag,
    })
}
