//! Numerical toolkit for multipartite entanglement analysis.
//!
//! The crate computes compact (continued) Schmidt decompositions of pure
//! states, the entanglement measure derived from their decohered forms,
//! three-qubit standard forms and classification, and a convex-roof
//! extension of the measure to mixed states.

pub mod entropy;
pub mod error;
pub mod io;
pub mod layout;
mod linalg;
pub mod marginals;
pub mod measures;
mod opt;
pub mod random;
pub mod roof;
pub mod schmidt;
pub mod state;
pub mod three_qubit;

pub use entropy::{
    binary_entropy, relative_entropy, shannon_entropy, von_neumann_entropy, LogBase,
};
pub use error::{QentError, Result};
pub use layout::SubsystemLayout;
pub use marginals::{partial_trace, uncorrelated_product, MarginalSet};
pub use measures::{
    entanglement_pure, entanglement_pure_sampled, nested_entropy, ordering_entropy,
    relative_entropy_of_entanglement_estimate, verify_membership, MembershipReport, NestedEntropy,
    ProductMixture, PureMeasureResult, ReeConfig, ReeResult,
};
pub use random::{haar_random_density, haar_random_state, haar_random_unitary};
pub use roof::{
    ensemble_from_isometry, roof_minimize, wootters_ef, EnsembleDecomposition, RoofConfig,
    RoofResult,
};
pub use schmidt::{
    bipartite_schmidt, compact_decomposition, decohere, enumerate_orderings,
    enumerate_orderings_lazy, is_schmidt_decomposable, reconstruct, verify_tree, BipartiteSchmidt,
    BranchNode, DecompositionTree, LeafNode, LeafTerm, Ordering, SchmidtWitness,
    SeparableDecohered, TreeBranch, TreeNode, TreeReport,
};
pub use state::{DensityMatrix, PureState, StateReport};
pub use three_qubit::{
    classify, eq6_state, make_named_state, standard_form, standard_form_with_ordering,
    verify_constraint, ClassLabel, ConstraintReport, NamedState, StandardForm3Q, ThreeQubitClass,
};

/// Numerical tolerances used across the crate.
///
/// These are part of the library contract: validation reports and
/// decomposition invariants are always checked against the values below.
pub mod tol {
    /// Allowed deviation of a pure state's squared norm from 1.
    pub const NORM: f64 = 1e-12;
    /// Allowed max elementwise deviation from Hermiticity.
    pub const HERMITICITY: f64 = 1e-12;
    /// Allowed deviation of a density-matrix trace from 1.
    pub const TRACE: f64 = 1e-12;
    /// Most negative admissible density-matrix eigenvalue.
    pub const EIGENVALUE_FLOOR: f64 = -1e-10;
    /// Eigenvalues below this are treated as exactly zero before logarithms.
    pub const EIGENVALUE_CLIP: f64 = 1e-12;
    /// Threshold on tr[P_sigma_perp rho] beyond which relative entropy is +inf.
    pub const SUPPORT_LEAK: f64 = 1e-10;
    /// Elementwise tolerance for declaring two sorted marginal spectra equal.
    pub const SPECTRA_EQ: f64 = 1e-9;
    /// Relative eigenvalue threshold for numerical rank.
    pub const RANK_REL: f64 = 1e-10;
    /// Schmidt weights at or below this are pruned from decompositions.
    pub const PRUNE: f64 = 1e-12;
    /// Absolute gap under which adjacent Schmidt weights form a degenerate group.
    pub const DEGENERACY_GROUP: f64 = 1e-12;
    /// Orthonormality residual allowed for decomposition kets.
    pub const ORTHONORMALITY: f64 = 1e-10;
    /// Allowed deviation of per-node weight sums from 1.
    pub const PROBABILITY_SUM: f64 = 1e-10;
    /// Allowed unitarity residual for caller-supplied local unitaries.
    pub const UNITARITY: f64 = 1e-10;
    /// Reconstruction fidelity must reach 1 minus this value.
    pub const FIDELITY: f64 = 1e-10;
    /// Largest total dimension accepted by the optimization routines.
    pub const DIMENSION_CAP: usize = 64;
}
