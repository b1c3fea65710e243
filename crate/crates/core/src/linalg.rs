//! Small dense linear-algebra helpers shared across the crate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub(crate) fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.kronecker(b)
}

pub(crate) fn kron_vec(a: &DVector<Complex64>, b: &DVector<Complex64>) -> DVector<Complex64> {
    let mut out = DVector::zeros(a.len() * b.len());
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i * b.len() + j] = ai * bj;
        }
    }
    out
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub(crate) fn hermitian_eigen(m: &DMatrix<Complex64>) -> (Vec<f64>, Vec<DVector<Complex64>>) {
    let sym = nalgebra::SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..sym.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| sym.eigenvalues[a].total_cmp(&sym.eigenvalues[b]));
    let vals = order.iter().map(|&i| sym.eigenvalues[i]).collect();
    let vecs = order
        .iter()
        .map(|&i| DVector::from_column_slice(sym.eigenvectors.column(i).as_slice()))
        .collect();
    (vals, vecs)
}

/// Hermitian eigenvalues only, ascending.
pub(crate) fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut vals: Vec<f64> = nalgebra::SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Hermitian PSD square root via eigendecomposition; negative dust clipped.
pub(crate) fn hermitian_sqrt(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (vals, vecs) = hermitian_eigen(m);
    let n = m.nrows();
    let mut out = DMatrix::zeros(n, n);
    for (w, v) in vals.iter().zip(&vecs) {
        if *w > 0.0 {
            let s = Complex64::new(w.sqrt(), 0.0);
            out += (v * v.adjoint()).map(|z| z * s);
        }
    }
    out
}

pub(crate) fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Max elementwise deviation of `u` from unitarity.
pub(crate) fn unitarity_residual(u: &DMatrix<Complex64>) -> f64 {
    let n = u.nrows();
    if n != u.ncols() {
        return f64::INFINITY;
    }
    let g = u.adjoint() * u;
    max_abs(&(g - DMatrix::identity(n, n)))
}

/// Reference observable used to resolve degenerate Schmidt subspaces:
/// the discrete-Fourier conjugate of the position operator diag(0..d-1).
///
/// Its eigenbasis is the Fourier basis, so on a fully degenerate qubit
/// space the resolved vectors are |+> and |-> in that order.
pub(crate) fn dft_reference(d: usize) -> DMatrix<Complex64> {
    let f = DMatrix::from_fn(d, d, |j, k| {
        Complex64::from_polar(
            1.0 / (d as f64).sqrt(),
            -2.0 * std::f64::consts::PI * (j as f64) * (k as f64) / d as f64,
        )
    });
    let diag = DMatrix::from_fn(d, d, |j, k| {
        if j == k {
            Complex64::new(j as f64, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    &f * diag * f.adjoint()
}

/// Rotate `v` so its largest-magnitude component is real positive;
/// ties broken by lowest index. Returns the applied phase factor.
pub(crate) fn fix_phase(v: &mut DVector<Complex64>) -> Complex64 {
    let mut best = 0usize;
    let mut best_mag = 0.0f64;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm();
        if m > best_mag + 1e-15 {
            best_mag = m;
            best = i;
        }
    }
    if best_mag == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let phase = v[best] / Complex64::new(best_mag, 0.0);
    let correction = phase.conj();
    for z in v.iter_mut() {
        *z *= correction;
    }
    correction
}
