use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{QentError, Result};

/// Ordered collection of parties with their local Hilbert-space dimensions.
///
/// Amplitude and operator indices are row-major with the first party as the
/// most significant index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemLayout {
    labels: Vec<String>,
    dims: Vec<usize>,
}

impl SubsystemLayout {
    pub fn new(labels: Vec<String>, dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(QentError::InvalidLayout("dims must be nonempty".into()));
        }
        if labels.len() != dims.len() {
            return Err(QentError::InvalidLayout(format!(
                "{} labels for {} dims",
                labels.len(),
                dims.len()
            )));
        }
        if dims.contains(&0) {
            return Err(QentError::InvalidLayout("party dimension 0".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(QentError::InvalidLayout(format!("duplicate label {l:?}")));
            }
        }
        Ok(Self { labels, dims })
    }

    /// Layout with the given dims and generated labels A, B, C, ...
    pub fn with_default_labels(dims: Vec<usize>) -> Result<Self> {
        let labels = default_labels(dims.len());
        Self::new(labels, dims)
    }

    /// `n` qubit parties labelled A, B, C, ...
    pub fn qubits(n: usize) -> Self {
        Self::with_default_labels(vec![2; n]).expect("n >= 1")
    }

    /// Single-party layout, used for marginals.
    pub fn single(label: &str, dim: usize) -> Self {
        Self::new(vec![label.to_string()], vec![dim]).expect("dim >= 1")
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| QentError::UnknownParty(label.to_string()))
    }

    pub fn party_dim(&self, label: &str) -> Result<usize> {
        Ok(self.dims[self.position(label)?])
    }

    /// Positions of the given labels, in the order given.
    pub fn positions_of(&self, labels: &[impl AsRef<str>]) -> Result<Vec<usize>> {
        labels.iter().map(|l| self.position(l.as_ref())).collect()
    }
}

pub(crate) fn default_labels(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| {
            if n <= 26 {
                char::from(b'A' + i as u8).to_string()
            } else {
                format!("P{}", i + 1)
            }
        })
        .collect()
}

/// Row-major strides for the given dims.
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Reorder the axes of a row-major amplitude vector.
///
/// `perm[k]` is the old axis that lands at new position `k`; the result is
/// indexed row-major over the permuted dims.
pub(crate) fn permute_amplitudes(
    amps: &DVector<Complex64>,
    dims: &[usize],
    perm: &[usize],
) -> DVector<Complex64> {
    debug_assert_eq!(amps.len(), dims.iter().product::<usize>());
    debug_assert_eq!(perm.len(), dims.len());
    let old_strides = strides(dims);
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let mut out = DVector::zeros(amps.len());
    let n = dims.len();
    let mut multi = vec![0usize; n];
    for new_flat in 0..amps.len() {
        // decompose new_flat over new_dims
        let mut rem = new_flat;
        for k in (0..n).rev() {
            multi[k] = rem % new_dims[k];
            rem /= new_dims[k];
        }
        let mut old_flat = 0usize;
        for k in 0..n {
            old_flat += multi[k] * old_strides[perm[k]];
        }
        out[new_flat] = amps[old_flat];
    }
    out
}
