//! Correlation information, membership verification, and the pure-state
//! entanglement measure with its nested-entropy cross-check.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::entropy::{relative_entropy, shannon_entropy, von_neumann_entropy, LogBase};
use crate::error::{QentError, Result};
use crate::layout::SubsystemLayout;
use crate::linalg::kron_vec;
use crate::marginals::uncorrelated_product;
use crate::opt;
use crate::schmidt::{
    compact_decomposition, decohere, enumerate_orderings, DecompositionTree, Ordering,
    SeparableDecohered, TreeNode,
};
use crate::state::{DensityMatrix, PureState};
use crate::tol;

/// C = S(rho_check) - S(rho): the total correlation information of a state
/// relative to the uncorrelated product of its marginals.
impl DensityMatrix {
    pub fn correlation_information(&self, base: LogBase) -> f64 {
        let m = self.marginals();
        (m.entropy_sum(base) - von_neumann_entropy(self, base)).max(0.0)
    }
}

impl PureState {
    /// For pure states S(rho) = 0, so C is the sum of marginal entropies.
    pub fn correlation_information(&self, base: LogBase) -> f64 {
        self.marginals().entropy_sum(base)
    }
}

/// Residuals of the three membership conditions and the contrast
/// additivity identity for a candidate separable state.
#[derive(Debug, Clone)]
pub struct MembershipReport {
    /// Condition (i): the candidate is a mixture of product projectors.
    pub separable_by_construction: bool,
    /// Condition (ii): max elementwise deviation between the marginals of
    /// sigma and rho.
    pub marginal_residual: f64,
    /// Condition (iii): |tr[(sigma - rho) log sigma]|.
    pub contrast_line_residual: f64,
    /// |S(rho||sigma) + S(sigma||rho_check) - S(rho||rho_check)|.
    pub additivity_residual: f64,
    pub entropy_rho: f64,
    pub entropy_sigma: f64,
    pub entropy_uncorrelated: f64,
    pub rel_entropy_rho_sigma: f64,
    pub log_base: LogBase,
}

/// Evaluates the membership conditions of `sigma` against `rho`.
///
/// Residuals are +infinity where a support condition fails; the report is
/// always returned.
pub fn verify_membership(
    rho: &DensityMatrix,
    sigma: &SeparableDecohered,
    base: LogBase,
) -> Result<MembershipReport> {
    if rho.layout() != &sigma.layout {
        return Err(QentError::LayoutMismatch);
    }
    let sigma_dm = sigma.to_density();

    let rho_marg = rho.marginals();
    let sigma_marg = sigma_dm.marginals();
    let mut marginal_residual = 0.0f64;
    for (a, b) in rho_marg.marginals.iter().zip(&sigma_marg.marginals) {
        let diff = (a.matrix() - b.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        marginal_residual = marginal_residual.max(diff);
    }

    // tr[(sigma - rho) log sigma] on sigma's support, +inf if rho leaks out.
    let (svals, svecs) = crate::linalg::hermitian_eigen(&sigma_dm.hermitian_part());
    let mut contrast = 0.0f64;
    let mut rho_weight_on_support = 0.0f64;
    for (w, v) in svals.iter().zip(&svecs) {
        if *w > tol::EIGENVALUE_CLIP {
            let rho_diag = (v.adjoint() * rho.matrix() * v)[(0, 0)].re;
            contrast += (w - rho_diag) * w.ln();
            rho_weight_on_support += rho_diag;
        }
    }
    let contrast_line_residual = if rho.trace().re - rho_weight_on_support > tol::SUPPORT_LEAK {
        f64::INFINITY
    } else {
        (contrast / base.ln_divisor()).abs()
    };

    let rho_check = uncorrelated_product(&rho_marg);
    let s_rho_sigma = relative_entropy(rho, &sigma_dm, base)?;
    let s_sigma_check = relative_entropy(&sigma_dm, &rho_check, base)?;
    let s_rho_check = relative_entropy(rho, &rho_check, base)?;
    let additivity_residual =
        if s_rho_sigma.is_finite() && s_sigma_check.is_finite() && s_rho_check.is_finite() {
            (s_rho_sigma + s_sigma_check - s_rho_check).abs()
        } else {
            f64::INFINITY
        };

    Ok(MembershipReport {
        separable_by_construction: true,
        marginal_residual,
        contrast_line_residual,
        additivity_residual,
        entropy_rho: von_neumann_entropy(rho, base),
        entropy_sigma: shannon_entropy(
            &sigma.terms.iter().map(|t| t.weight).collect::<Vec<_>>(),
            base,
        ),
        entropy_uncorrelated: von_neumann_entropy(&rho_check, base),
        rel_entropy_rho_sigma: s_rho_sigma,
        log_base: base,
    })
}

/// Result of minimizing the decohered entropy over all subsystem orderings.
#[derive(Debug, Clone)]
pub struct PureMeasureResult {
    /// The entanglement value: min over orderings of S(sigma).
    pub value: f64,
    pub argmin_ordering: Ordering,
    /// Entropy of the decohered state for every canonical ordering, in
    /// enumeration order.
    pub per_ordering: Vec<(Ordering, f64)>,
    /// Decohered separable state of the argmin ordering.
    pub sigma: SeparableDecohered,
    pub correlation_rho: f64,
    pub correlation_sigma: f64,
    pub log_base: LogBase,
}

/// Entropy of the decohered compact decomposition along one ordering.
pub fn ordering_entropy(psi: &PureState, ordering: &Ordering, base: LogBase) -> Result<f64> {
    let tree = compact_decomposition(psi, ordering)?;
    Ok(shannon_entropy(&tree.leaf_weights(), base))
}

/// The pure-state entanglement measure: the minimum decohered entropy over
/// all N!/2 canonical orderings. Ties resolve to the first ordering in
/// enumeration order.
pub fn entanglement_pure(psi: &PureState, base: LogBase) -> Result<PureMeasureResult> {
    let orderings = enumerate_orderings(psi.layout())?;
    entanglement_pure_sampled(psi, &orderings, base)
}

/// Same minimization restricted to a caller-chosen sample of orderings;
/// used when N!/2 is out of reach.
pub fn entanglement_pure_sampled(
    psi: &PureState,
    orderings: &[Ordering],
    base: LogBase,
) -> Result<PureMeasureResult> {
    if orderings.is_empty() {
        return Err(QentError::InvalidConfig("no orderings supplied".into()));
    }
    let mut per_ordering = Vec::with_capacity(orderings.len());
    let mut best: Option<(usize, f64, DecompositionTree)> = None;
    for (i, o) in orderings.iter().enumerate() {
        let tree = compact_decomposition(psi, o)?;
        let s = shannon_entropy(&tree.leaf_weights(), base);
        per_ordering.push((o.clone(), s));
        let better = match &best {
            Some((_, bs, _)) => s < *bs,
            None => true,
        };
        if better {
            best = Some((i, s, tree));
        }
    }
    let (argmin_idx, value, tree) = best.expect("at least one ordering");
    let sigma = decohere(&tree);
    let correlation_rho = psi.correlation_information(base);
    let correlation_sigma = correlation_rho - value;
    Ok(PureMeasureResult {
        value,
        argmin_ordering: orderings[argmin_idx].clone(),
        per_ordering,
        sigma,
        correlation_rho,
        correlation_sigma,
        log_base: base,
    })
}

/// Minimal-value fast path used inside optimizer loops.
pub(crate) fn pure_ec_value(psi: &PureState, base: LogBase) -> Result<f64> {
    let mut best = f64::INFINITY;
    for o in enumerate_orderings(psi.layout())? {
        best = best.min(ordering_entropy(psi, &o, base)?);
    }
    Ok(best)
}

/// Per-level terms of the nested entropy evaluation.
#[derive(Debug, Clone)]
pub struct NestedEntropy {
    /// Total; equals the flat leaf-weight entropy by the chain rule.
    pub total: f64,
    /// Contribution of each tree level: level 0 is the root weight set,
    /// the last level is the weighted average over the final Schmidt pairs.
    pub per_level: Vec<f64>,
}

/// Evaluates the entropy of a tree level by level:
/// H(root weights) + sum of branch-weighted child entropies.
pub fn nested_entropy(tree: &DecompositionTree, base: LogBase) -> NestedEntropy {
    let mut per_level = Vec::new();
    accumulate_nested(&tree.root, 1.0, 0, base, &mut per_level);
    NestedEntropy {
        total: per_level.iter().sum(),
        per_level,
    }
}

fn accumulate_nested(
    node: &TreeNode,
    path_weight: f64,
    level: usize,
    base: LogBase,
    acc: &mut Vec<f64>,
) {
    if acc.len() <= level {
        acc.resize(level + 1, 0.0);
    }
    match node {
        TreeNode::Branch(b) => {
            let w: Vec<f64> = b.branches.iter().map(|br| br.weight).collect();
            acc[level] += path_weight * shannon_entropy(&w, base);
            for br in &b.branches {
                accumulate_nested(&br.child, path_weight * br.weight, level + 1, base, acc);
            }
        }
        TreeNode::Leaf(l) => {
            let w: Vec<f64> = l.terms.iter().map(|t| t.weight).collect();
            acc[level] += path_weight * shannon_entropy(&w, base);
        }
    }
}

/// Configuration for the relative-entropy-of-entanglement upper bound.
#[derive(Debug, Clone)]
pub struct ReeConfig {
    /// Number of product states in the separable ansatz; default twice the
    /// total dimension.
    pub num_products: Option<usize>,
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for ReeConfig {
    fn default() -> Self {
        Self {
            num_products: None,
            restarts: 8,
            max_iters: 200,
            seed: 0,
            tol: 1e-9,
        }
    }
}

/// Convex mixture of product pure states: the separable ansatz and the
/// witness returned by the estimator.
#[derive(Debug, Clone)]
pub struct ProductMixture {
    pub layout: SubsystemLayout,
    pub weights: Vec<f64>,
    /// kets[term][party]
    pub kets: Vec<Vec<DVector<Complex64>>>,
}

impl ProductMixture {
    pub fn to_density(&self) -> DensityMatrix {
        let d = self.layout.total_dim();
        let mut m = nalgebra::DMatrix::zeros(d, d);
        for (w, kets) in self.weights.iter().zip(&self.kets) {
            let mut v = DVector::from_element(1, Complex64::new(1.0, 0.0));
            for k in kets {
                v = kron_vec(&v, k);
            }
            m += (&v * v.adjoint()).map(|z| z * Complex64::new(*w, 0.0));
        }
        DensityMatrix::from_matrix(self.layout.clone(), m)
    }
}

/// Upper-bound estimate of the relative entropy of entanglement.
#[derive(Debug, Clone)]
pub struct ReeResult {
    /// Best S(rho || sigma) found over the separable ansatz; an upper
    /// bound on the relative entropy of entanglement.
    pub value: f64,
    pub witness: ProductMixture,
    pub converged: bool,
    pub restarts_used: usize,
    pub log_base: LogBase,
}

struct ReeParametrization {
    layout: SubsystemLayout,
    num_products: usize,
    dims: Vec<usize>,
}

impl ReeParametrization {
    fn param_len(&self) -> usize {
        let per_term: usize = self.dims.iter().map(|d| 2 * d).sum();
        self.num_products * (1 + per_term)
    }

    fn mixture(&self, params: &[f64]) -> ProductMixture {
        let k = self.num_products;
        let logits = &params[..k];
        let max_logit = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut weights: Vec<f64> = logits.iter().map(|l| (l - max_logit).exp()).collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        let mut kets = Vec::with_capacity(k);
        let mut cursor = k;
        for _ in 0..k {
            let mut term = Vec::with_capacity(self.dims.len());
            for &d in &self.dims {
                let chunk = &params[cursor..cursor + 2 * d];
                cursor += 2 * d;
                let mut v = DVector::from_iterator(
                    d,
                    (0..d).map(|i| Complex64::new(chunk[2 * i], chunk[2 * i + 1])),
                );
                let n = v.norm();
                if n > 1e-12 {
                    v /= Complex64::new(n, 0.0);
                } else {
                    v = DVector::zeros(d);
                    v[0] = Complex64::new(1.0, 0.0);
                }
                term.push(v);
            }
            kets.push(term);
        }
        ProductMixture {
            layout: self.layout.clone(),
            weights,
            kets,
        }
    }

    fn embed(&self, weights: &[f64], kets: &[Vec<DVector<Complex64>>]) -> Vec<f64> {
        let k = self.num_products;
        let mut params = vec![0.0; self.param_len()];
        for slot in params[..k].iter_mut() {
            *slot = -40.0;
        }
        for (i, w) in weights.iter().enumerate().take(k) {
            params[i] = w.max(1e-18).ln();
        }
        let per_term: usize = self.dims.iter().map(|d| 2 * d).sum();
        for (i, term) in kets.iter().enumerate().take(k) {
            let mut cursor = k + i * per_term;
            for v in term {
                for z in v.iter() {
                    params[cursor] = z.re;
                    params[cursor + 1] = z.im;
                    cursor += 2;
                }
            }
        }
        // unused slots hold deterministic basis states
        for i in kets.len()..k {
            let mut cursor = k + i * per_term;
            for &d in &self.dims {
                params[cursor] = 1.0;
                cursor += 2 * d;
            }
        }
        params
    }
}

/// Minimizes S(rho || sigma) over mixtures of product pure states by
/// multistart local optimization. The result is an upper bound on the
/// relative entropy of entanglement; the decohered compact states are
/// always among the starting candidates, so for a pure `rho` the bound
/// never exceeds the compact-decomposition entanglement.
pub fn relative_entropy_of_entanglement_estimate(
    rho: &DensityMatrix,
    config: &ReeConfig,
    base: LogBase,
) -> Result<ReeResult> {
    let dim = rho.layout().total_dim();
    if dim > tol::DIMENSION_CAP {
        return Err(QentError::DimensionCap {
            dim,
            cap: tol::DIMENSION_CAP,
        });
    }
    if config.restarts == 0 {
        return Err(QentError::InvalidConfig("restarts must be positive".into()));
    }
    let num_products = config.num_products.unwrap_or(2 * dim).max(1);
    let par = ReeParametrization {
        layout: rho.layout().clone(),
        num_products,
        dims: rho.layout().dims().to_vec(),
    };

    let objective = |params: &[f64]| -> f64 {
        let sigma = par.mixture(params);
        relative_entropy(rho, &sigma.to_density(), base).unwrap_or(f64::INFINITY)
    };

    let mut starts: Vec<Vec<f64>> = Vec::new();
    for sigma in decohered_seeds(rho)? {
        let weights: Vec<f64> = sigma.terms.iter().map(|t| t.weight).collect();
        let kets: Vec<Vec<DVector<Complex64>>> =
            sigma.terms.iter().map(|t| t.kets.clone()).collect();
        starts.push(par.embed(&weights, &kets));
    }
    // the diagonal of rho in the computational product basis is separable
    starts.push(par.embed(&diag_weights(rho), &basis_product_kets(rho.layout())));
    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
    while starts.len() < config.restarts.max(starts.len()) {
        let n = par.param_len();
        starts.push((0..n).map(|_| rng.random_range(-1.0..1.0)).collect());
    }

    let runs: Vec<opt::MinimizeResult> = starts
        .par_iter()
        .map(|s| opt::minimize(objective, s, config.max_iters, config.tol))
        .collect();
    let best = runs
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.value.total_cmp(&b.value).then(i.cmp(j)))
        .map(|(_, r)| r)
        .expect("at least one restart");

    Ok(ReeResult {
        value: best.value,
        witness: par.mixture(&best.x),
        converged: best.converged && best.value.is_finite(),
        restarts_used: runs.len(),
        log_base: base,
    })
}

/// Separable seed states: for (numerically) pure rho the decohered compact
/// decompositions of its state vector, for mixed rho the eigenvalue-weighted
/// mixture of each eigenvector's decohered form.
fn decohered_seeds(rho: &DensityMatrix) -> Result<Vec<SeparableDecohered>> {
    let (vals, vecs) = crate::linalg::hermitian_eigen(&rho.hermitian_part());
    let max = vals.iter().cloned().fold(0.0, f64::max);
    let layout = rho.layout().clone();
    let orderings = enumerate_orderings(&layout)?;
    let significant: Vec<(f64, DVector<Complex64>)> = vals
        .iter()
        .zip(&vecs)
        .filter(|(&w, _)| w > tol::RANK_REL * max)
        .map(|(&w, v)| (w, v.clone()))
        .collect();
    let mut seeds = Vec::new();
    for o in &orderings {
        let mut terms = Vec::new();
        for (w, v) in &significant {
            let psi = PureState::from_vector(layout.clone(), v.clone());
            let tree = compact_decomposition(&psi, o)?;
            for t in decohere(&tree).terms {
                terms.push(crate::schmidt::DecoheredTerm {
                    weight: w * t.weight,
                    kets: t.kets,
                });
            }
        }
        seeds.push(SeparableDecohered {
            layout: layout.clone(),
            terms,
        });
    }
    Ok(seeds)
}

fn diag_weights(rho: &DensityMatrix) -> Vec<f64> {
    let d = rho.layout().total_dim();
    let mut w: Vec<f64> = (0..d).map(|i| rho.matrix()[(i, i)].re.max(0.0)).collect();
    let total: f64 = w.iter().sum();
    if total > 0.0 {
        for x in &mut w {
            *x /= total;
        }
    }
    w
}

fn basis_product_kets(layout: &SubsystemLayout) -> Vec<Vec<DVector<Complex64>>> {
    let dims = layout.dims();
    let d: usize = dims.iter().product();
    let strides = crate::layout::strides(dims);
    (0..d)
        .map(|flat| {
            dims.iter()
                .enumerate()
                .map(|(axis, &dp)| {
                    let idx = flat / strides[axis] % dp;
                    let mut v = DVector::zeros(dp);
                    v[idx] = Complex64::new(1.0, 0.0);
                    v
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::haar_random_state;
    use crate::three_qubit::{make_named_state, NamedState};
    use approx::assert_relative_eq;

    fn bell() -> PureState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(
            SubsystemLayout::qubits(2),
            vec![
                Complex64::new(s, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(s, 0.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn correlation_information_examples() {
        assert!(
            make_named_state(NamedState::Product)
                .correlation_information(LogBase::Two)
                .abs()
                < 1e-12
        );
        assert_relative_eq!(
            bell().correlation_information(LogBase::Two),
            2.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            make_named_state(NamedState::Ghz).correlation_information(LogBase::Two),
            3.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn membership_of_own_decohered_state() {
        let ghz = make_named_state(NamedState::Ghz);
        let ordering = Ordering::new(ghz.layout().labels().to_vec());
        let tree = compact_decomposition(&ghz, &ordering).unwrap();
        let sigma = decohere(&tree);
        let report = verify_membership(&ghz.to_density(), &sigma, LogBase::Two).unwrap();
        assert!(report.marginal_residual <= 1e-10, "{report:?}");
        assert!(report.contrast_line_residual <= 1e-10);
        assert!(report.additivity_residual <= 1e-10);
        assert_relative_eq!(report.rel_entropy_rho_sigma, 1.0, epsilon = 1e-10);
        assert_relative_eq!(report.entropy_sigma, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn membership_of_product_projector_is_exact() {
        let p = make_named_state(NamedState::Product);
        let ordering = Ordering::new(p.layout().labels().to_vec());
        let sigma = decohere(&compact_decomposition(&p, &ordering).unwrap());
        let report = verify_membership(&p.to_density(), &sigma, LogBase::Two).unwrap();
        assert!(report.marginal_residual < 1e-12);
        assert!(report.contrast_line_residual < 1e-12);
        assert!(report.additivity_residual < 1e-12);
        assert!(report.entropy_sigma < 1e-12);
    }

    #[test]
    fn skewed_mixture_breaks_the_contrast_line() {
        // sigma' = 0.6 |+++><+++| + 0.4 |---><---| has the right support but
        // the wrong weights: conditions (ii) and (iii) both fail, with the
        // contrast residual t = 0.1 log2(1.5) from the brute-force trace.
        let ghz = make_named_state(NamedState::Ghz);
        let ordering = Ordering::new(ghz.layout().labels().to_vec());
        let mut sigma = decohere(&compact_decomposition(&ghz, &ordering).unwrap());
        sigma.terms[0].weight = 0.6;
        sigma.terms[1].weight = 0.4;
        let report = verify_membership(&ghz.to_density(), &sigma, LogBase::Two).unwrap();
        let expected = 0.1 * 1.5f64.log2();
        assert_relative_eq!(report.contrast_line_residual, expected, epsilon = 1e-10);
        assert_relative_eq!(report.additivity_residual, expected, epsilon = 1e-9);
        assert_relative_eq!(report.marginal_residual, 0.1, epsilon = 1e-10);
    }

    #[test]
    fn entanglement_of_named_states() {
        let ghz = entanglement_pure(&make_named_state(NamedState::Ghz), LogBase::Two).unwrap();
        assert_relative_eq!(ghz.value, 1.0, epsilon = 1e-12);
        assert_eq!(ghz.per_ordering.len(), 3);

        let w = entanglement_pure(&make_named_state(NamedState::W), LogBase::Two).unwrap();
        assert_relative_eq!(w.value, 3.0f64.log2(), epsilon = 1e-12);

        let bp =
            entanglement_pure(&make_named_state(NamedState::BellTimesPure), LogBase::Two).unwrap();
        assert_relative_eq!(bp.value, 1.0, epsilon = 1e-12);

        // value equals the per-ordering minimum and the correlation identity
        for r in [&ghz, &w, &bp] {
            let min = r
                .per_ordering
                .iter()
                .map(|(_, s)| *s)
                .fold(f64::INFINITY, f64::min);
            assert_relative_eq!(r.value, min, epsilon = 1e-12);
            assert_relative_eq!(
                r.correlation_rho - r.correlation_sigma,
                r.value,
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn nested_entropy_matches_flat_and_tracks_levels() {
        let w = make_named_state(NamedState::W);
        let ordering = Ordering::new(w.layout().labels().to_vec());
        let tree = compact_decomposition(&w, &ordering).unwrap();
        let nested = nested_entropy(&tree, LogBase::Two);
        assert_relative_eq!(nested.total, 3.0f64.log2(), epsilon = 1e-12);
        assert_eq!(nested.per_level.len(), 2);
        // H(2/3, 1/3) at the root plus (2/3) H(1/2, 1/2) below
        assert_relative_eq!(
            nested.per_level[0],
            shannon_entropy(&[2.0 / 3.0, 1.0 / 3.0], LogBase::Two),
            epsilon = 1e-12
        );
        assert_relative_eq!(nested.per_level[1], 2.0 / 3.0, epsilon = 1e-12);

        let product = make_named_state(NamedState::Product);
        let tree = compact_decomposition(&product, &ordering).unwrap();
        assert!(nested_entropy(&tree, LogBase::Two).total < 1e-12);
    }

    #[test]
    fn nested_entropy_agrees_with_flat_on_random_states() {
        for n in [3usize, 4] {
            let layout = SubsystemLayout::qubits(n);
            for seed in 0..25 {
                let psi = haar_random_state(&layout, seed);
                for o in enumerate_orderings(&layout).unwrap() {
                    let tree = compact_decomposition(&psi, &o).unwrap();
                    let flat = shannon_entropy(&tree.leaf_weights(), LogBase::Two);
                    let nested = nested_entropy(&tree, LogBase::Two).total;
                    assert_relative_eq!(flat, nested, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn ree_estimate_on_bell_state_is_one_bit() {
        let rho = bell().to_density();
        let config = ReeConfig {
            restarts: 4,
            max_iters: 60,
            ..Default::default()
        };
        let r = relative_entropy_of_entanglement_estimate(&rho, &config, LogBase::Two).unwrap();
        assert_relative_eq!(r.value, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn ree_estimate_vanishes_on_separable_mixture() {
        let layout = SubsystemLayout::qubits(2);
        let mut m = nalgebra::DMatrix::zeros(4, 4);
        m[(0, 0)] = Complex64::new(0.5, 0.0);
        m[(3, 3)] = Complex64::new(0.5, 0.0);
        let rho = DensityMatrix::new(layout, m).unwrap();
        let config = ReeConfig {
            restarts: 4,
            max_iters: 60,
            ..Default::default()
        };
        let r = relative_entropy_of_entanglement_estimate(&rho, &config, LogBase::Two).unwrap();
        assert!(r.value <= 1e-6, "value {}", r.value);
    }

    #[test]
    fn ree_estimate_never_exceeds_compact_entanglement() {
        let layout = SubsystemLayout::qubits(3);
        let config = ReeConfig {
            restarts: 3,
            max_iters: 40,
            ..Default::default()
        };
        for seed in 0..5 {
            let psi = haar_random_state(&layout, seed);
            let ec = entanglement_pure(&psi, LogBase::Two).unwrap().value;
            let r =
                relative_entropy_of_entanglement_estimate(&psi.to_density(), &config, LogBase::Two)
                    .unwrap();
            assert!(r.value <= ec + 1e-9, "seed {seed}: {} vs {ec}", r.value);
        }
    }

    #[test]
    fn ree_dimension_cap_is_enforced() {
        let layout = SubsystemLayout::qubits(7);
        let rho = haar_random_state(&layout, 0).to_density();
        assert!(matches!(
            relative_entropy_of_entanglement_estimate(&rho, &ReeConfig::default(), LogBase::Two),
            Err(QentError::DimensionCap { .. })
        ));
    }
}
