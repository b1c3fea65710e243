//! JSON wire formats: state files, decomposition trees, and reports.
//!
//! Pure states are stored as
//! `{"dims": [d1,...], "labels": ["A",...], "amplitudes": [[re,im],...]}`
//! and density matrices as `{"dims": ..., "labels": ..., "matrix":
//! [[[re,im],...],...]}`. Amplitude index i maps to the multi-index
//! (i_1,...,i_N) row-major with the first party most significant. Floats
//! are serialized in shortest round-trip form, so emitted files re-parse
//! bit-identically; non-finite residuals serialize as null.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::entropy::LogBase;
use crate::error::{QentError, Result};
use crate::layout::SubsystemLayout;
use crate::measures::{MembershipReport, ProductMixture, PureMeasureResult, ReeResult};
use crate::roof::{EnsembleDecomposition, RoofResult};
use crate::schmidt::{DecompositionTree, Ordering, SeparableDecohered, TreeNode, TreeReport};
use crate::state::{DensityMatrix, PureState, StateReport};
use crate::three_qubit::{StandardForm3Q, ThreeQubitClass};

type ComplexPair = [f64; 2];

fn pairs(v: &DVector<Complex64>) -> Vec<ComplexPair> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn vector(pairs: &[ComplexPair]) -> DVector<Complex64> {
    DVector::from_iterator(
        pairs.len(),
        pairs.iter().map(|p| Complex64::new(p[0], p[1])),
    )
}

/// On-disk state document; exactly one of `amplitudes` / `matrix` is set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<ComplexPair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<ComplexPair>>>,
}

/// A parsed state file.
#[derive(Debug, Clone)]
pub enum ParsedState {
    Pure(PureState),
    Density(DensityMatrix),
}

impl StateFile {
    pub fn from_pure(psi: &PureState) -> Self {
        StateFile {
            dims: psi.layout().dims().to_vec(),
            labels: Some(psi.layout().labels().to_vec()),
            amplitudes: Some(pairs(psi.amplitudes())),
            matrix: None,
        }
    }

    pub fn from_density(rho: &DensityMatrix) -> Self {
        let d = rho.layout().total_dim();
        let rows = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        let z = rho.matrix()[(i, j)];
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        StateFile {
            dims: rho.layout().dims().to_vec(),
            labels: Some(rho.layout().labels().to_vec()),
            amplitudes: None,
            matrix: Some(rows),
        }
    }

    pub fn parse(&self) -> Result<ParsedState> {
        let layout = match &self.labels {
            Some(labels) => SubsystemLayout::new(labels.clone(), self.dims.clone())?,
            None => SubsystemLayout::with_default_labels(self.dims.clone())?,
        };
        match (&self.amplitudes, &self.matrix) {
            (Some(amps), None) => {
                let v = vector(amps);
                Ok(ParsedState::Pure(PureState::new(
                    layout,
                    v.iter().copied().collect(),
                )?))
            }
            (None, Some(rows)) => {
                let d = layout.total_dim();
                if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                    return Err(QentError::ShapeMismatch {
                        expected: d,
                        actual: rows.len(),
                    });
                }
                let m = DMatrix::from_fn(d, d, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1]));
                Ok(ParsedState::Density(DensityMatrix::new(layout, m)?))
            }
            _ => Err(QentError::InvalidConfig(
                "state file must set exactly one of amplitudes/matrix".into(),
            )),
        }
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Serialized decomposition tree node: branch nodes carry one ket per
/// branch, leaf nodes carry the shared weight with a ket for each of the
/// two final parties.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeDoc {
    Branch {
        party: String,
        branches: Vec<BranchDoc>,
    },
    Leaf {
        leaf_parties: [String; 2],
        terms: Vec<LeafTermDoc>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BranchDoc {
    pub weight: f64,
    pub ket: Vec<ComplexPair>,
    pub child: Box<NodeDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LeafTermDoc {
    pub weight: f64,
    pub ket_left: Vec<ComplexPair>,
    pub ket_right: Vec<ComplexPair>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeDoc {
    pub ordering: Vec<String>,
    pub dropped_weight: f64,
    pub leaf_weights: Vec<f64>,
    pub root: NodeDoc,
}

fn node_doc(node: &TreeNode) -> NodeDoc {
    match node {
        TreeNode::Branch(b) => NodeDoc::Branch {
            party: b.party.clone(),
            branches: b
                .branches
                .iter()
                .map(|br| BranchDoc {
                    weight: br.weight,
                    ket: pairs(&br.ket),
                    child: Box::new(node_doc(&br.child)),
                })
                .collect(),
        },
        TreeNode::Leaf(l) => NodeDoc::Leaf {
            leaf_parties: [l.parties.0.clone(), l.parties.1.clone()],
            terms: l
                .terms
                .iter()
                .map(|t| LeafTermDoc {
                    weight: t.weight,
                    ket_left: pairs(&t.left_ket),
                    ket_right: pairs(&t.right_ket),
                })
                .collect(),
        },
    }
}

impl TreeDoc {
    pub fn from_tree(tree: &DecompositionTree) -> Self {
        TreeDoc {
            ordering: tree.ordering.labels().to_vec(),
            dropped_weight: tree.dropped_weight,
            leaf_weights: tree.leaf_weights(),
            root: node_doc(&tree.root),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeReportDoc {
    pub max_ket_orthonormality_residual: f64,
    pub max_mate_orthonormality_residual: f64,
    pub max_probability_sum_residual: f64,
    pub reconstruction_fidelity: f64,
    pub pass: bool,
}

impl TreeReportDoc {
    pub fn from_report(r: &TreeReport) -> Self {
        TreeReportDoc {
            max_ket_orthonormality_residual: r.max_ket_orthonormality_residual,
            max_mate_orthonormality_residual: r.max_mate_orthonormality_residual,
            max_probability_sum_residual: r.max_probability_sum_residual,
            reconstruction_fidelity: r.reconstruction_fidelity,
            pass: r.pass,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeparableTermDoc {
    pub weight: f64,
    pub kets: Vec<Vec<ComplexPair>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeparableDoc {
    pub labels: Vec<String>,
    pub terms: Vec<SeparableTermDoc>,
}

impl SeparableDoc {
    pub fn from_state(s: &SeparableDecohered) -> Self {
        SeparableDoc {
            labels: s.layout.labels().to_vec(),
            terms: s
                .terms
                .iter()
                .map(|t| SeparableTermDoc {
                    weight: t.weight,
                    kets: t.kets.iter().map(pairs).collect(),
                })
                .collect(),
        }
    }

    pub fn from_mixture(s: &ProductMixture) -> Self {
        SeparableDoc {
            labels: s.layout.labels().to_vec(),
            terms: s
                .weights
                .iter()
                .zip(&s.kets)
                .map(|(w, kets)| SeparableTermDoc {
                    weight: *w,
                    kets: kets.iter().map(pairs).collect(),
                })
                .collect(),
        }
    }
}

/// Membership residual report; null residuals mean +infinity (a support
/// condition failed).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MembershipDoc {
    pub ordering: Vec<String>,
    pub separable_by_construction: bool,
    pub marginal_residual: Option<f64>,
    pub contrast_line_residual: Option<f64>,
    pub additivity_residual: Option<f64>,
    pub entropy_rho: f64,
    pub entropy_sigma: f64,
    pub entropy_uncorrelated: f64,
    pub rel_entropy_rho_sigma: Option<f64>,
    pub support_contained: bool,
    pub log_base: String,
}

impl MembershipDoc {
    pub fn from_report(ordering: &Ordering, r: &MembershipReport) -> Self {
        MembershipDoc {
            ordering: ordering.labels().to_vec(),
            separable_by_construction: r.separable_by_construction,
            marginal_residual: finite(r.marginal_residual),
            contrast_line_residual: finite(r.contrast_line_residual),
            additivity_residual: finite(r.additivity_residual),
            entropy_rho: r.entropy_rho,
            entropy_sigma: r.entropy_sigma,
            entropy_uncorrelated: r.entropy_uncorrelated,
            rel_entropy_rho_sigma: finite(r.rel_entropy_rho_sigma),
            support_contained: r.contrast_line_residual.is_finite(),
            log_base: r.log_base.name().to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureDoc {
    pub value: f64,
    pub argmin_ordering: Vec<String>,
    pub per_ordering: Vec<(String, f64)>,
    pub correlation_rho: f64,
    pub correlation_sigma: f64,
    pub sigma: SeparableDoc,
    pub log_base: String,
}

impl MeasureDoc {
    pub fn from_result(r: &PureMeasureResult) -> Self {
        MeasureDoc {
            value: r.value,
            argmin_ordering: r.argmin_ordering.labels().to_vec(),
            per_ordering: r
                .per_ordering
                .iter()
                .map(|(o, s)| (o.to_string(), *s))
                .collect(),
            correlation_rho: r.correlation_rho,
            correlation_sigma: r.correlation_sigma,
            sigma: SeparableDoc::from_state(&r.sigma),
            log_base: r.log_base.name().to_string(),
        }
    }
}

/// Classification report; `Ec_bits` is always in bits regardless of the
/// session log base.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct ClassifyDoc {
    pub class: String,
    pub ranks: [usize; 3],
    pub n_ms: usize,
    pub spectra: Vec<Vec<f64>>,
    pub schmidt_decomposable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub confirmation: Option<bool>,
    pub p: [f64; 4],
    pub alpha: f64,
    pub beta: f64,
    pub theta_b: f64,
    pub theta_c: f64,
    pub degenerate_angles: bool,
    pub Ec_bits: f64,
    pub argmin_ordering: Vec<String>,
}

impl ClassifyDoc {
    pub fn new(class: &ThreeQubitClass, sf: &StandardForm3Q, measure: &PureMeasureResult) -> Self {
        ClassifyDoc {
            class: class.label.to_string(),
            ranks: class.marginal_ranks,
            n_ms: class.n_ms,
            spectra: class.spectra.clone(),
            schmidt_decomposable: class.schmidt_decomposable,
            confirmation: class.confirmation,
            p: sf.p,
            alpha: sf.alpha,
            beta: sf.beta,
            theta_b: sf.theta_b,
            theta_c: sf.theta_c,
            degenerate_angles: sf.degenerate,
            Ec_bits: measure.value,
            argmin_ordering: measure.argmin_ordering.labels().to_vec(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleDoc {
    pub weights: Vec<f64>,
    pub states: Vec<Vec<ComplexPair>>,
    pub isometry: Vec<Vec<ComplexPair>>,
}

impl EnsembleDoc {
    pub fn from_ensemble(e: &EnsembleDecomposition) -> Self {
        EnsembleDoc {
            weights: e.weights.clone(),
            states: e.states.iter().map(|s| pairs(s.amplitudes())).collect(),
            isometry: (0..e.isometry.nrows())
                .map(|i| {
                    (0..e.isometry.ncols())
                        .map(|j| {
                            let z = e.isometry[(i, j)];
                            [z.re, z.im]
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoofDoc {
    pub value: f64,
    pub ensemble_size: usize,
    pub restarts_used: usize,
    pub converged: Vec<bool>,
    pub best_ensemble: EnsembleDoc,
    pub log_base: String,
}

impl RoofDoc {
    pub fn from_result(r: &RoofResult) -> Self {
        RoofDoc {
            value: r.value,
            ensemble_size: r.ensemble_size,
            restarts_used: r.restarts_used,
            converged: r.converged.clone(),
            best_ensemble: EnsembleDoc::from_ensemble(&r.best_ensemble),
            log_base: r.log_base.name().to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReeDoc {
    pub value: f64,
    pub converged: bool,
    pub restarts_used: usize,
    pub witness: SeparableDoc,
    pub log_base: String,
}

impl ReeDoc {
    pub fn from_result(r: &ReeResult) -> Self {
        ReeDoc {
            value: r.value,
            converged: r.converged,
            restarts_used: r.restarts_used,
            witness: SeparableDoc::from_mixture(&r.witness),
            log_base: r.log_base.name().to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidateDoc {
    pub kind: String,
    pub norm_residual: Option<f64>,
    pub hermiticity_residual: Option<f64>,
    pub trace_residual: Option<f64>,
    pub min_eigenvalue: Option<f64>,
    pub pass: bool,
}

impl ValidateDoc {
    pub fn from_report(kind: &str, r: &StateReport) -> Self {
        ValidateDoc {
            kind: kind.to_string(),
            norm_residual: r.norm_residual,
            hermiticity_residual: r.hermiticity_residual,
            trace_residual: r.trace_residual,
            min_eigenvalue: r.min_eigenvalue,
            pass: r.pass,
        }
    }
}

/// Parses a state document from JSON text.
pub fn state_from_json(text: &str) -> Result<ParsedState> {
    let file: StateFile = serde_json::from_str(text)
        .map_err(|e| QentError::InvalidConfig(format!("state file parse error: {e}")))?;
    file.parse()
}

/// Serializes a state document to JSON text.
pub fn state_to_json(state: &ParsedState) -> String {
    let file = match state {
        ParsedState::Pure(p) => StateFile::from_pure(p),
        ParsedState::Density(d) => StateFile::from_density(d),
    };
    serde_json::to_string_pretty(&file).expect("state files serialize")
}

pub fn log_base_from_name(name: &str) -> Result<LogBase> {
    match name {
        "bits" | "2" => Ok(LogBase::Two),
        "nats" | "e" => Ok(LogBase::E),
        other => Err(QentError::InvalidConfig(format!(
            "unknown log base {other:?}"
        ))),
    }
}
