//! Partial traces, single-party marginals, and the uncorrelated product.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::entropy::{shannon_entropy, LogBase};
use crate::error::{QentError, Result};
use crate::layout::{strides, SubsystemLayout};
use crate::linalg::kron;
use crate::state::{DensityMatrix, PureState};
use crate::tol;

/// Reduced operator on the kept parties (in layout order).
pub fn partial_trace(rho: &DensityMatrix, keep: &[&str]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(QentError::EmptyPartition);
    }
    let layout = rho.layout();
    let mut keep_pos = layout.positions_of(keep)?;
    keep_pos.sort_unstable();
    keep_pos.dedup();
    if keep_pos.len() != keep.len() {
        return Err(QentError::InvalidConfig(
            "duplicate party in keep set".into(),
        ));
    }
    let dims = layout.dims();
    let st = strides(dims);
    let trace_pos: Vec<usize> = (0..dims.len()).filter(|p| !keep_pos.contains(p)).collect();

    let keep_dims: Vec<usize> = keep_pos.iter().map(|&p| dims[p]).collect();
    let trace_dims: Vec<usize> = trace_pos.iter().map(|&p| dims[p]).collect();
    let dk: usize = keep_dims.iter().product();
    let dt: usize = trace_dims.iter().product();

    // flat offsets contributed by each block of indices
    let offsets = |positions: &[usize], block_dims: &[usize]| -> Vec<usize> {
        let total: usize = block_dims.iter().product();
        let mut out = vec![0usize; total];
        let bst = strides(block_dims);
        for (flat, slot) in out.iter_mut().enumerate() {
            let mut acc = 0usize;
            for (k, &p) in positions.iter().enumerate() {
                acc += (flat / bst[k] % block_dims[k]) * st[p];
            }
            *slot = acc;
        }
        out
    };
    let keep_off = offsets(&keep_pos, &keep_dims);
    let trace_off = offsets(&trace_pos, &trace_dims);

    let m = rho.matrix();
    let mut out = DMatrix::zeros(dk, dk);
    for i in 0..dk {
        for j in 0..dk {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..dt {
                acc += m[(keep_off[i] + trace_off[t], keep_off[j] + trace_off[t])];
            }
            out[(i, j)] = acc;
        }
    }
    let new_layout = SubsystemLayout::new(
        keep_pos
            .iter()
            .map(|&p| layout.labels()[p].clone())
            .collect(),
        keep_dims,
    )?;
    Ok(DensityMatrix::from_matrix(new_layout, out))
}

/// All single-party marginals of a state, their sorted spectra, the count
/// of distinct spectra, and numerical ranks.
#[derive(Debug, Clone)]
pub struct MarginalSet {
    /// One unipartite density matrix per party, in layout order.
    pub marginals: Vec<DensityMatrix>,
    /// Eigenvalues per party, sorted descending.
    pub spectra: Vec<Vec<f64>>,
    /// Number of distinct spectra (elementwise tolerance [`tol::SPECTRA_EQ`]).
    pub n_ms: usize,
    /// Numerical rank per party.
    pub ranks: Vec<usize>,
}

impl MarginalSet {
    fn from_marginals(marginals: Vec<DensityMatrix>) -> Self {
        let spectra: Vec<Vec<f64>> = marginals
            .iter()
            .map(|m| {
                let mut s = m.eigenvalues();
                s.reverse();
                s
            })
            .collect();
        let ranks = spectra
            .iter()
            .map(|s| {
                let max = s.first().copied().unwrap_or(0.0);
                if max <= 0.0 {
                    0
                } else {
                    s.iter().filter(|&&w| w > tol::RANK_REL * max).count()
                }
            })
            .collect();
        let n_ms = count_distinct_spectra(&spectra);
        Self {
            marginals,
            spectra,
            n_ms,
            ranks,
        }
    }

    /// Entropy of each marginal, summed; equals S(rho_check) by additivity.
    pub fn entropy_sum(&self, base: LogBase) -> f64 {
        self.spectra.iter().map(|s| shannon_entropy(s, base)).sum()
    }
}

fn count_distinct_spectra(spectra: &[Vec<f64>]) -> usize {
    let mut representatives: Vec<&Vec<f64>> = Vec::new();
    for s in spectra {
        let seen = representatives.iter().any(|r| {
            r.len() == s.len()
                && r.iter()
                    .zip(s.iter())
                    .all(|(a, b)| (a - b).abs() <= tol::SPECTRA_EQ)
        });
        if !seen {
            representatives.push(s);
        }
    }
    representatives.len()
}

impl PureState {
    /// Single-party marginals via the Gram trick on the reshaped amplitudes.
    pub fn marginals(&self) -> MarginalSet {
        let dims = self.layout().dims();
        let n = dims.len();
        let marginals = (0..n)
            .map(|axis| {
                let d = dims[axis];
                let right: usize = dims[axis + 1..].iter().product();
                let total = self.amplitudes().len();
                let left = total / (d * right);
                let mut rho = DMatrix::zeros(d, d);
                for a in 0..d {
                    for b in 0..=a {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for l in 0..left {
                            for r in 0..right {
                                acc += self.amplitudes()[(l * d + a) * right + r]
                                    * self.amplitudes()[(l * d + b) * right + r].conj();
                            }
                        }
                        rho[(a, b)] = acc;
                        rho[(b, a)] = acc.conj();
                    }
                }
                DensityMatrix::from_matrix(
                    SubsystemLayout::single(&self.layout().labels()[axis], d),
                    rho,
                )
            })
            .collect();
        MarginalSet::from_marginals(marginals)
    }
}

impl DensityMatrix {
    pub fn marginals(&self) -> MarginalSet {
        let labels = self.layout().labels();
        let marginals = labels
            .iter()
            .map(|l| partial_trace(self, &[l.as_str()]).expect("label from layout"))
            .collect();
        MarginalSet::from_marginals(marginals)
    }
}

/// The joint uncorrelated state rho_check: the tensor product of all
/// single-party marginals in layout order.
pub fn uncorrelated_product(m: &MarginalSet) -> DensityMatrix {
    let mut acc = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
    let mut labels = Vec::new();
    let mut dims = Vec::new();
    for marg in &m.marginals {
        acc = kron(&acc, marg.matrix());
        labels.push(marg.layout().labels()[0].clone());
        dims.push(marg.layout().dims()[0]);
    }
    DensityMatrix::from_matrix(
        SubsystemLayout::new(labels, dims).expect("marginal labels are distinct"),
        acc,
    )
}
