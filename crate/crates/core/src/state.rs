use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{QentError, Result};
use crate::layout::{permute_amplitudes, SubsystemLayout};
use crate::linalg;
use crate::tol;

/// Pure state over a subsystem layout, row-major amplitudes with the
/// first party as the most significant index.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    layout: SubsystemLayout,
    amps: DVector<Complex64>,
}

impl PureState {
    /// Constructs a state, checking only that the amplitude count matches
    /// the layout. Normalization is an invariant reported by [`PureState::validate`].
    pub fn new(layout: SubsystemLayout, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != layout.total_dim() {
            return Err(QentError::ShapeMismatch {
                expected: layout.total_dim(),
                actual: amps.len(),
            });
        }
        Ok(Self {
            layout,
            amps: DVector::from_vec(amps),
        })
    }

    pub(crate) fn from_vector(layout: SubsystemLayout, amps: DVector<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), layout.total_dim());
        Self { layout, amps }
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amps
    }

    pub fn norm_residual(&self) -> f64 {
        (self.amps.norm_squared() - 1.0).abs()
    }

    pub fn validate(&self) -> StateReport {
        let norm_residual = self.norm_residual();
        StateReport {
            norm_residual: Some(norm_residual),
            hermiticity_residual: None,
            trace_residual: None,
            min_eigenvalue: None,
            pass: norm_residual <= tol::NORM,
        }
    }

    /// Errors unless the state passes [`PureState::validate`].
    pub fn ensure_valid(&self) -> Result<()> {
        let r = self.validate();
        if r.pass {
            Ok(())
        } else {
            Err(QentError::InvalidState(format!(
                "norm residual {:.3e} exceeds {:.0e}",
                r.norm_residual.unwrap(),
                tol::NORM
            )))
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            layout: self.layout.clone(),
            matrix: &self.amps * self.amps.adjoint(),
        }
    }

    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amps.dotc(&other.amps)
    }

    /// |<self|other>|^2.
    pub fn fidelity(&self, other: &PureState) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Returns the amplitudes re-indexed with parties in `perm` order
    /// (`perm[k]` = current position landing at new position `k`).
    pub(crate) fn permuted_amplitudes(&self, perm: &[usize]) -> DVector<Complex64> {
        permute_amplitudes(&self.amps, self.layout.dims(), perm)
    }

    /// Applies one unitary per party (in layout order).
    pub fn apply_local_unitaries(&self, unitaries: &[DMatrix<Complex64>]) -> Result<PureState> {
        let dims = self.layout.dims();
        if unitaries.len() != dims.len() {
            return Err(QentError::InvalidConfig(format!(
                "{} unitaries for {} parties",
                unitaries.len(),
                dims.len()
            )));
        }
        for (u, &d) in unitaries.iter().zip(dims) {
            if u.nrows() != d || u.ncols() != d {
                return Err(QentError::ShapeMismatch {
                    expected: d,
                    actual: u.nrows(),
                });
            }
            let res = linalg::unitarity_residual(u);
            if res > tol::UNITARITY {
                return Err(QentError::NonUnitary { residual: res });
            }
        }
        // Apply axis by axis: view the amplitudes as (left, d, right) and
        // contract the unitary over the middle index.
        let mut amps = self.amps.clone();
        let n = amps.len();
        for (axis, u) in unitaries.iter().enumerate() {
            let d = dims[axis];
            let right: usize = dims[axis + 1..].iter().product();
            let left = n / (d * right);
            let mut out = DVector::zeros(n);
            for l in 0..left {
                for r in 0..right {
                    for a in 0..d {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for b in 0..d {
                            acc += u[(a, b)] * amps[(l * d + b) * right + r];
                        }
                        out[(l * d + a) * right + r] = acc;
                    }
                }
            }
            amps = out;
        }
        Ok(PureState::from_vector(self.layout.clone(), amps))
    }
}

/// Density operator over a subsystem layout.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    layout: SubsystemLayout,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Constructs the operator, checking only the matrix shape against the
    /// layout. Hermiticity/positivity/trace are reported by [`DensityMatrix::validate`].
    pub fn new(layout: SubsystemLayout, matrix: DMatrix<Complex64>) -> Result<Self> {
        let d = layout.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(QentError::ShapeMismatch {
                expected: d,
                actual: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Self { layout, matrix })
    }

    pub(crate) fn from_matrix(layout: SubsystemLayout, matrix: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(matrix.nrows(), layout.total_dim());
        Self { layout, matrix }
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Eigenvalues sorted ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.hermitian_part())
    }

    /// (rho + rho^dagger) / 2; used so spectra of slightly non-Hermitian
    /// inputs are still well defined for diagnostics.
    pub(crate) fn hermitian_part(&self) -> DMatrix<Complex64> {
        (&self.matrix + self.matrix.adjoint()).map(|z| z * Complex64::new(0.5, 0.0))
    }

    pub fn hermiticity_residual(&self) -> f64 {
        linalg::max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    pub fn validate(&self) -> StateReport {
        let herm = self.hermiticity_residual();
        let trace = (self.trace().re - 1.0).abs().max(self.trace().im.abs());
        let min_eig = self.eigenvalues().first().copied().unwrap_or(0.0);
        let pass =
            herm <= tol::HERMITICITY && trace <= tol::TRACE && min_eig >= tol::EIGENVALUE_FLOOR;
        StateReport {
            norm_residual: None,
            hermiticity_residual: Some(herm),
            trace_residual: Some(trace),
            min_eigenvalue: Some(min_eig),
            pass,
        }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let r = self.validate();
        if r.pass {
            Ok(())
        } else {
            Err(QentError::InvalidState(format!("{r}")))
        }
    }

    /// Numerical rank with the relative eigenvalue threshold.
    pub fn rank(&self) -> usize {
        let eigs = self.eigenvalues();
        let max = eigs.iter().cloned().fold(0.0, f64::max);
        if max <= 0.0 {
            return 0;
        }
        eigs.iter().filter(|&&w| w > tol::RANK_REL * max).count()
    }

    /// tr(rho^2).
    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }
}

/// Residuals from validating a state against its invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct StateReport {
    pub norm_residual: Option<f64>,
    pub hermiticity_residual: Option<f64>,
    pub trace_residual: Option<f64>,
    pub min_eigenvalue: Option<f64>,
    pub pass: bool,
}

impl fmt::Display for StateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(r) = self.norm_residual {
            parts.push(format!("norm residual {r:.3e} (tol {:.0e})", tol::NORM));
        }
        if let Some(r) = self.hermiticity_residual {
            parts.push(format!(
                "hermiticity residual {r:.3e} (tol {:.0e})",
                tol::HERMITICITY
            ));
        }
        if let Some(r) = self.trace_residual {
            parts.push(format!("trace residual {r:.3e} (tol {:.0e})", tol::TRACE));
        }
        if let Some(r) = self.min_eigenvalue {
            parts.push(format!(
                "min eigenvalue {r:.3e} (floor {:.0e})",
                tol::EIGENVALUE_FLOOR
            ));
        }
        write!(
            f,
            "{}: {}",
            if self.pass { "pass" } else { "FAIL" },
            parts.join(", ")
        )
    }
}
