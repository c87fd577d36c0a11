//! Closed-form relative entropy of entanglement for Werner, isotropic and
//! pure states. These are the reference values every solver is checked
//! against.
//!
//! The isotropic formula uses `log d` as its leading term. With `log 2`
//! instead, the maximally entangled two-qutrit state would come out at one
//! bit rather than `log2 3`; [`isotropic_er_log2_leading`] keeps that reading
//! around for comparison only.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, binary_entropy_bits, CVector, HermitianOperator, LogBase};
use crate::states;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formula {
    Werner,
    Isotropic,
    Pure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum AnalyticInputs {
    Werner { d: usize, alpha: f64 },
    Isotropic { d: usize, alpha: f64 },
    Pure { dim_a: usize, dim_b: usize, psi: Vec<(f64, f64)> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticValue {
    pub value_bits: f64,
    pub formula: Formula,
    pub inputs: AnalyticInputs,
}

/// `Tr(ρ_W(α)·F)` in closed form.
pub fn werner_swap_expectation(d: usize, alpha: f64) -> f64 {
    let df = d as f64;
    (1.0 - alpha * df) / (df - alpha)
}

/// `e_R(f) = 1 − H₂((1+f)/2)` bits for `f < 0`, zero otherwise.
pub fn werner_er_from_swap(f: f64) -> f64 {
    if f >= 0.0 {
        0.0
    } else {
        (1.0 - binary_entropy_bits((1.0 + f) / 2.0)).max(0.0)
    }
}

pub fn werner_er(d: usize, alpha: f64) -> Result<AnalyticValue> {
    states::werner(d, alpha)?;
    Ok(AnalyticValue {
        value_bits: werner_er_from_swap(werner_swap_expectation(d, alpha)),
        formula: Formula::Werner,
        inputs: AnalyticInputs::Werner { d, alpha },
    })
}

/// Overlap `⟨ψ+|ρ_iso(α)|ψ+⟩`.
pub fn isotropic_fidelity(d: usize, alpha: f64) -> f64 {
    let n = (d * d) as f64;
    (1.0 - alpha) / n + alpha
}

fn isotropic_er_with_leading(d: usize, alpha: f64, leading_bits: f64) -> f64 {
    let df = d as f64;
    let fid = isotropic_fidelity(d, alpha);
    if fid <= 1.0 / df {
        return 0.0;
    }
    let tail = if d > 2 { (1.0 - fid) * (df - 1.0).log2() } else { 0.0 };
    (leading_bits - tail - binary_entropy_bits(fid)).max(0.0)
}

pub fn isotropic_er(d: usize, alpha: f64) -> Result<AnalyticValue> {
    states::isotropic(d, alpha)?;
    Ok(AnalyticValue {
        value_bits: isotropic_er_with_leading(d, alpha, (d as f64).log2()),
        formula: Formula::Isotropic,
        inputs: AnalyticInputs::Isotropic { d, alpha },
    })
}

/// Same expression with a leading `log 2` in place of `log d`. Coincides with
/// [`isotropic_er`] at `d = 2` and is wrong at `d ≥ 3`.
pub fn isotropic_er_log2_leading(d: usize, alpha: f64) -> Result<f64> {
    states::isotropic(d, alpha)?;
    Ok(isotropic_er_with_leading(d, alpha, 1.0))
}

/// Entanglement entropy of a pure bipartite state, in bits.
pub fn pure_state_er(psi: &CVector, dim_a: usize, dim_b: usize) -> Result<AnalyticValue> {
    let norm = psi.norm();
    if !((norm - 1.0).abs() <= 1e-10) {
        return Err(Error::NotNormalized { norm });
    }
    let proj = HermitianOperator::projector(psi);
    let reduced = linalg::partial_trace_b(&proj, dim_a, dim_b)?;
    Ok(AnalyticValue {
        value_bits: linalg::von_neumann_entropy(&reduced, LogBase::Two),
        formula: Formula::Pure,
        inputs: AnalyticInputs::Pure {
            dim_a,
            dim_b,
            psi: psi.iter().map(|z: &Complex64| (z.re, z.im)).collect(),
        },
    })
}

/// Largest separable Werner parameter.
pub fn werner_threshold(d: usize) -> f64 {
    1.0 / d as f64
}

/// Largest separable isotropic parameter, `1/(d+1)`.
pub fn isotropic_threshold(d: usize) -> f64 {
    1.0 / (d as f64 + 1.0)
}
