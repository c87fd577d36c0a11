//! Bipartite density matrices: named families, random ensembles, product
//! kets and the PPT test.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, HermitianOperator};
use crate::seed;

pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-10;
pub const NORM_TOL: f64 = 1e-12;

/// Default tolerance of [`is_ppt`].
pub const DEFAULT_PPT_TOL: f64 = 1e-10;

/// Unit-trace positive semidefinite operator on `C^dim_a ⊗ C^dim_b`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dim_a: usize,
    dim_b: usize,
    op: HermitianOperator,
}

impl DensityMatrix {
    pub fn new(op: HermitianOperator, dim_a: usize, dim_b: usize) -> Result<Self> {
        Self::with_tolerance(op, dim_a, dim_b, TRACE_TOL, PSD_TOL)
    }

    pub fn with_tolerance(
        op: HermitianOperator,
        dim_a: usize,
        dim_b: usize,
        trace_tol: f64,
        psd_tol: f64,
    ) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 || dim_a * dim_b != op.dim() {
            return Err(Error::BadFactorization {
                dim: op.dim(),
                dim_a,
                dim_b,
            });
        }
        let trace = op.trace();
        if !((trace - 1.0).abs() <= trace_tol) {
            return Err(Error::TraceViolation { trace });
        }
        let min = op.min_eigenvalue();
        if !(min >= -psd_tol) {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        Ok(DensityMatrix { dim_a, dim_b, op })
    }

    /// Skips validation. For operators that are states by construction.
    pub(crate) fn assume_valid(op: HermitianOperator, dim_a: usize, dim_b: usize) -> Self {
        debug_assert_eq!(op.dim(), dim_a * dim_b);
        DensityMatrix { dim_a, dim_b, op }
    }

    /// Rescales a PSD operator to unit trace.
    pub fn normalized(op: HermitianOperator, dim_a: usize, dim_b: usize) -> Result<Self> {
        let t = op.trace();
        if !(t > 0.0) {
            return Err(Error::TraceViolation { trace: t });
        }
        Self::new(op.scaled(1.0 / t), dim_a, dim_b)
    }

    pub fn maximally_mixed(dim_a: usize, dim_b: usize) -> Self {
        let n = dim_a * dim_b;
        Self::assume_valid(HermitianOperator::identity(n).scaled(1.0 / n as f64), dim_a, dim_b)
    }

    pub fn pure(psi: &CVector, dim_a: usize, dim_b: usize) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(HermitianOperator::projector(psi), dim_a, dim_b)
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn into_op(self) -> HermitianOperator {
        self.op
    }

    pub fn partial_transpose(&self) -> HermitianOperator {
        HermitianOperator::hermitize(linalg::partial_transpose_raw(
            self.op.matrix(),
            self.dim_a,
            self.dim_b,
        ))
    }

    pub fn min_pt_eigenvalue(&self) -> f64 {
        self.partial_transpose().min_eigenvalue()
    }

    /// Convex combination `w·self + (1−w)·other`.
    pub fn mix(&self, other: &DensityMatrix, w: f64) -> Result<Self> {
        if self.dim_a != other.dim_a || self.dim_b != other.dim_b {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::invalid("w", w, "mixing weight must lie in [0, 1]"));
        }
        let op = self.op.scaled(w).add_scaled(&other.op, 1.0 - w);
        Ok(Self::assume_valid(op, self.dim_a, self.dim_b))
    }
}

impl AsRef<HermitianOperator> for DensityMatrix {
    fn as_ref(&self) -> &HermitianOperator {
        &self.op
    }
}

/// `|a⟩ ⊗ |b⟩` with both factors normalized; its projector is an extreme
/// point of the separable set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductKet {
    pub ket_a: Vec<Complex64>,
    pub ket_b: Vec<Complex64>,
}

impl ProductKet {
    pub fn new(ket_a: Vec<Complex64>, ket_b: Vec<Complex64>) -> Result<Self> {
        for k in [&ket_a, &ket_b] {
            let norm = k.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if !((norm - 1.0).abs() <= NORM_TOL) {
                return Err(Error::NotNormalized { norm });
            }
        }
        Ok(ProductKet { ket_a, ket_b })
    }

    /// `|i⟩ ⊗ |j⟩` in the computational basis.
    pub fn basis(dim_a: usize, dim_b: usize, i: usize, j: usize) -> Self {
        let mut ket_a = vec![Complex64::new(0.0, 0.0); dim_a];
        let mut ket_b = vec![Complex64::new(0.0, 0.0); dim_b];
        ket_a[i] = Complex64::new(1.0, 0.0);
        ket_b[j] = Complex64::new(1.0, 0.0);
        ProductKet { ket_a, ket_b }
    }

    pub fn dim_a(&self) -> usize {
        self.ket_a.len()
    }

    pub fn dim_b(&self) -> usize {
        self.ket_b.len()
    }

    /// The full vector `a ⊗ b`.
    pub fn vector(&self) -> CVector {
        linalg::kron_vec(
            &CVector::from_column_slice(&self.ket_a),
            &CVector::from_column_slice(&self.ket_b),
        )
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &ProductKet) -> f64 {
        let ip = |x: &[Complex64], y: &[Complex64]| -> Complex64 {
            x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
        };
        (ip(&self.ket_a, &other.ket_a) * ip(&self.ket_b, &other.ket_b)).norm_sqr()
    }
}

pub fn product_projector(k: &ProductKet) -> DensityMatrix {
    DensityMatrix::assume_valid(HermitianOperator::projector(&k.vector()), k.dim_a(), k.dim_b())
}

fn check_local_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::invalid("d", d as f64, "local dimension must be at least 2"));
    }
    Ok(())
}

/// Swap `F = Σ |ij⟩⟨ji|` on `C^d ⊗ C^d`.
pub fn swap_operator(d: usize) -> HermitianOperator {
    let n = d * d;
    let mut m = CMatrix::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + j, j * d + i)] = Complex64::new(1.0, 0.0);
        }
    }
    HermitianOperator::hermitize(m)
}

/// `|ψ+⟩ = Σ_j |jj⟩ / √d`.
pub fn max_entangled_vector(d: usize) -> CVector {
    let mut v = CVector::zeros(d * d);
    let amp = 1.0 / (d as f64).sqrt();
    for j in 0..d {
        v[j * d + j] = Complex64::new(amp, 0.0);
    }
    v
}

pub fn max_entangled(d: usize) -> Result<DensityMatrix> {
    check_local_dim(d)?;
    Ok(DensityMatrix::assume_valid(
        HermitianOperator::projector(&max_entangled_vector(d)),
        d,
        d,
    ))
}

/// Werner state `(I − α F)/(d² − dα)`, valid for `α ∈ [−1, 1]`.
pub fn werner(d: usize, alpha: f64) -> Result<DensityMatrix> {
    check_local_dim(d)?;
    if !(-1.0..=1.0).contains(&alpha) {
        return Err(Error::invalid("alpha", alpha, "Werner parameter must lie in [-1, 1]"));
    }
    let n = d * d;
    let df = d as f64;
    let op = HermitianOperator::identity(n)
        .add_scaled(&swap_operator(d), -alpha)
        .scaled(1.0 / (df * df - df * alpha));
    Ok(DensityMatrix::assume_valid(op, d, d))
}

/// Isotropic state `(1−α)/d²·I + α|ψ+⟩⟨ψ+|`, valid for `α ∈ [−1/(d²−1), 1]`.
pub fn isotropic(d: usize, alpha: f64) -> Result<DensityMatrix> {
    check_local_dim(d)?;
    let n = d * d;
    let lo = -1.0 / (n as f64 - 1.0);
    if !(alpha >= lo - 1e-15 && alpha <= 1.0) {
        return Err(Error::invalid(
            "alpha",
            alpha,
            format!("isotropic parameter must lie in [{lo}, 1]"),
        ));
    }
    let op = HermitianOperator::identity(n)
        .scaled((1.0 - alpha) / n as f64)
        .add_scaled(&HermitianOperator::projector(&max_entangled_vector(d)), alpha);
    Ok(DensityMatrix::assume_valid(op, d, d))
}

/// The five product vectors of the two-qutrit "tiles" unextendible product basis.
pub fn tiles_upb() -> [CVector; 5] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let ket = |terms: &[(usize, f64)]| {
        let mut v = CVector::zeros(9);
        for &(idx, amp) in terms {
            v[idx] += Complex64::new(amp, 0.0);
        }
        v
    };
    let idx = |i: usize, j: usize| 3 * i + j;
    [
        ket(&[(idx(0, 0), s), (idx(0, 1), -s)]),
        ket(&[(idx(2, 1), s), (idx(2, 2), -s)]),
        ket(&[(idx(0, 2), s), (idx(1, 2), -s)]),
        ket(&[(idx(1, 0), s), (idx(2, 0), -s)]),
        ket(&(0..9).map(|k| (k, 1.0 / 3.0)).collect::<Vec<_>>()),
    ]
}

/// Normalized projector onto the complement of the tiles UPB. PPT yet
/// entangled.
pub fn tiles_state() -> DensityMatrix {
    let mut op = HermitianOperator::identity(9);
    for v in tiles_upb() {
        op = op.add_scaled(&HermitianOperator::projector(&v), -1.0);
    }
    DensityMatrix::assume_valid(op.scaled(0.25), 3, 3)
}

/// `α·ρ_tiles + (1−α)/9·I` for `α ∈ [0, 1]`.
pub fn tiles_family(alpha: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::invalid("alpha", alpha, "tiles mixing must lie in [0, 1]"));
    }
    tiles_state().mix(&DensityMatrix::maximally_mixed(3, 3), alpha)
}

fn gaussian_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// `G·G†/Tr(G·G†)` with `G` a `dim × rank` Ginibre matrix drawn from `seed`.
pub fn random_density(dim_a: usize, dim_b: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    let n = dim_a * dim_b;
    if dim_a == 0 || dim_b == 0 {
        return Err(Error::BadFactorization { dim: n, dim_a, dim_b });
    }
    if rank == 0 || rank > n {
        return Err(Error::invalid("rank", rank as f64, format!("rank must lie in [1, {n}]")));
    }
    let mut rng = seed::rng(seed);
    let g = CMatrix::from_fn(n, rank, |_, _| gaussian_complex(&mut rng));
    let op = HermitianOperator::hermitize(&g * g.adjoint());
    let t = op.trace();
    Ok(DensityMatrix::assume_valid(op.scaled(1.0 / t), dim_a, dim_b))
}

/// Full-rank Ginibre state conditioned on a negative partial transpose.
/// Retry `t` uses child seed `t` of `seed`.
pub fn random_entangled(dim_a: usize, dim_b: usize, seed: u64, max_tries: usize) -> Result<DensityMatrix> {
    let n = dim_a * dim_b;
    for t in 0..max_tries {
        let rho = random_density(dim_a, dim_b, n, seed::derive_seed(seed, t as u64))?;
        if rho.min_pt_eigenvalue() < -DEFAULT_PPT_TOL {
            return Ok(rho);
        }
    }
    Err(Error::SamplingExhausted { tries: max_tries })
}

fn random_unit_vector(dim: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-300 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Haar-random product ket.
pub fn random_product_ket(dim_a: usize, dim_b: usize, seed: u64) -> ProductKet {
    let mut rng = seed::rng(seed);
    let ket_a = random_unit_vector(dim_a, &mut rng);
    let ket_b = random_unit_vector(dim_b, &mut rng);
    ProductKet { ket_a, ket_b }
}

/// GUE sample: off-diagonal entries with `E|h|² = 1`, real diagonal with
/// unit variance.
pub fn random_gue(dim: usize, rng: &mut impl Rng) -> HermitianOperator {
    let mut m = CMatrix::zeros(dim, dim);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..dim {
        m[(j, j)] = Complex64::new(rng.sample(StandardNormal), 0.0);
        for k in (j + 1)..dim {
            let z = gaussian_complex(rng) * s;
            m[(j, k)] = z;
            m[(k, j)] = z.conj();
        }
    }
    HermitianOperator::hermitize(m)
}

fn evolve(ket: &[Complex64], h: &HermitianOperator, delta: f64) -> Vec<Complex64> {
    let s = h.eig();
    let v = &s.eigenvectors;
    let n = ket.len();
    // exp(-iHδ)|k⟩ = V·diag(e^{-iλδ})·V†|k⟩
    let coeffs: Vec<Complex64> = (0..n)
        .map(|k| {
            let c: Complex64 = (0..n).map(|j| v[(j, k)].conj() * ket[j]).sum();
            c * Complex64::from_polar(1.0, -s.eigenvalues[k] * delta)
        })
        .collect();
    let out: Vec<Complex64> = (0..n)
        .map(|j| (0..n).map(|k| v[(j, k)] * coeffs[k]).sum())
        .collect();
    let norm = out.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    out.into_iter().map(|z| z / norm).collect()
}

/// Moves each factor by `exp(−iHδ)` with an independent GUE `H`.
pub fn perturb_ket(k: &ProductKet, delta: f64, seed: u64) -> Result<ProductKet> {
    if !(delta >= 0.0) {
        return Err(Error::invalid("delta", delta, "perturbation strength must be nonnegative"));
    }
    if delta == 0.0 {
        return Ok(k.clone());
    }
    let mut rng = seed::rng(seed);
    let ha = random_gue(k.dim_a(), &mut rng);
    let hb = random_gue(k.dim_b(), &mut rng);
    Ok(ProductKet {
        ket_a: evolve(&k.ket_a, &ha, delta),
        ket_b: evolve(&k.ket_b, &hb, delta),
    })
}

/// True iff the partial transpose has no eigenvalue below `−tol`.
pub fn is_ppt(rho: &DensityMatrix, tol: f64) -> bool {
    rho.min_pt_eigenvalue() >= -tol
}
