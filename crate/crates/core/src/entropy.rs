//! Shannon, von Neumann, and relative entropies.

use crate::error::{QentError, Result};
use crate::linalg::hermitian_eigen;
use crate::state::DensityMatrix;
use crate::tol;

/// Logarithm base for all information quantities. Base 2 reports bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Two,
    E,
}

impl LogBase {
    /// ln(x) / ln_divisor() == log_base(x)
    pub fn ln_divisor(self) -> f64 {
        match self {
            LogBase::Two => std::f64::consts::LN_2,
            LogBase::E => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LogBase::Two => "bits",
            LogBase::E => "nats",
        }
    }
}

/// -sum p log p with 0 log 0 := 0; entries at or below the eigenvalue clip
/// are treated as exactly zero.
pub fn shannon_entropy(probs: &[f64], base: LogBase) -> f64 {
    let mut h = 0.0;
    for &p in probs {
        if p > tol::EIGENVALUE_CLIP {
            h -= p * p.ln();
        }
    }
    h / base.ln_divisor()
}

pub fn binary_entropy(x: f64, base: LogBase) -> f64 {
    shannon_entropy(&[x, 1.0 - x], base)
}

/// Von Neumann entropy S = -tr rho log rho.
pub fn von_neumann_entropy(rho: &DensityMatrix, base: LogBase) -> f64 {
    shannon_entropy(&rho.eigenvalues(), base)
}

/// Relative entropy S(rho || sigma) = tr rho log rho - tr rho log sigma,
/// computed on the support of sigma.
///
/// Returns +infinity when rho leaks outside sigma's support by more than
/// the support tolerance. The result is clamped at 0 to absorb negative
/// numerical dust.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix, base: LogBase) -> Result<f64> {
    if rho.layout() != sigma.layout() {
        return Err(QentError::LayoutMismatch);
    }
    let (svals, svecs) = hermitian_eigen(&sigma.hermitian_part());
    let rho_m = rho.matrix();
    let mut tr_rho_log_sigma = 0.0;
    let mut support_weight = 0.0;
    for (w, v) in svals.iter().zip(&svecs) {
        if *w > tol::EIGENVALUE_CLIP {
            let diag = (v.adjoint() * rho_m * v)[(0, 0)].re;
            tr_rho_log_sigma += diag * w.ln();
            support_weight += diag;
        }
    }
    let leak = rho.trace().re - support_weight;
    if leak > tol::SUPPORT_LEAK {
        return Ok(f64::INFINITY);
    }
    let tr_rho_log_rho: f64 = rho
        .eigenvalues()
        .iter()
        .filter(|&&w| w > tol::EIGENVALUE_CLIP)
        .map(|&w| w * w.ln())
        .sum();
    Ok(((tr_rho_log_rho - tr_rho_log_sigma) / base.ln_divisor()).max(0.0))
}
