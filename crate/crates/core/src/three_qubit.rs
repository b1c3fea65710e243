//! Three-qubit standard form, angle constraint, and classification.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::entropy::LogBase;
use crate::error::{QentError, Result};
use crate::layout::SubsystemLayout;
use crate::linalg::{fix_phase, kron_vec};
use crate::schmidt::{
    compact_decomposition, is_schmidt_decomposable, DecompositionTree, Ordering, TreeNode,
};
use crate::state::PureState;
use crate::tol;

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn plus() -> DVector<Complex64> {
    DVector::from_vec(vec![
        Complex64::new(SQRT_HALF, 0.0),
        Complex64::new(SQRT_HALF, 0.0),
    ])
}

fn minus() -> DVector<Complex64> {
    DVector::from_vec(vec![
        Complex64::new(SQRT_HALF, 0.0),
        Complex64::new(-SQRT_HALF, 0.0),
    ])
}

/// cos(theta/2)|+> + sin(theta/2)|->
fn theta_plus(theta: f64) -> DVector<Complex64> {
    plus() * Complex64::new((theta / 2.0).cos(), 0.0)
        + minus() * Complex64::new((theta / 2.0).sin(), 0.0)
}

/// sin(theta/2)|+> - cos(theta/2)|->
fn theta_minus(theta: f64) -> DVector<Complex64> {
    plus() * Complex64::new((theta / 2.0).sin(), 0.0)
        - minus() * Complex64::new((theta / 2.0).cos(), 0.0)
}

/// Four-term standard form of a three-qubit pure state.
///
/// The parameters describe the state
/// `sqrt(p1)|+++> + sqrt(p2) e^{ia}|+--> + sqrt(p3)|-,tb+,tc+> + sqrt(p4)
/// e^{ib}|-,tb-,tc->`, reached from the input by the recorded local
/// unitaries.
#[derive(Debug, Clone)]
pub struct StandardForm3Q {
    pub p: [f64; 4],
    pub alpha: f64,
    pub beta: f64,
    pub theta_b: f64,
    pub theta_c: f64,
    /// Unitaries (A, B, C in the decomposition ordering) mapping the input
    /// to the standard form.
    pub local_unitaries: [DMatrix<Complex64>; 3],
    /// Set when the second root branch is absent (p3 = p4 = 0) and the
    /// angles are conventional zeros rather than derived quantities.
    pub degenerate: bool,
    /// Ordering used for the underlying compact decomposition.
    pub ordering: Ordering,
}

impl StandardForm3Q {
    /// The standard-form state itself, on the given layout.
    pub fn reconstruct_standard(&self, layout: &SubsystemLayout) -> PureState {
        eq6_state(
            layout,
            self.p,
            self.alpha,
            self.beta,
            self.theta_b,
            self.theta_c,
        )
    }
}

/// Builds the state of the four-term standard form with the given
/// parameters, in the computational basis.
pub fn eq6_state(
    layout: &SubsystemLayout,
    p: [f64; 4],
    alpha: f64,
    beta: f64,
    theta_b: f64,
    theta_c: f64,
) -> PureState {
    assert_eq!(layout.dims(), &[2, 2, 2], "standard form is three-qubit");
    let mut amps = DVector::zeros(8);
    let mut add = |w: f64,
                   phase: f64,
                   a: &DVector<Complex64>,
                   b: &DVector<Complex64>,
                   c: &DVector<Complex64>| {
        if w > 0.0 {
            let v = kron_vec(&kron_vec(a, b), c);
            amps += v * Complex64::from_polar(w.sqrt(), phase);
        }
    };
    add(p[0], 0.0, &plus(), &plus(), &plus());
    add(p[1], alpha, &plus(), &minus(), &minus());
    add(
        p[2],
        0.0,
        &minus(),
        &theta_plus(theta_b),
        &theta_plus(theta_c),
    );
    add(
        p[3],
        beta,
        &minus(),
        &theta_minus(theta_b),
        &theta_minus(theta_c),
    );
    PureState::from_vector(layout.clone(), amps)
}

fn orthogonal_complement(v: &DVector<Complex64>) -> DVector<Complex64> {
    let mut w = DVector::from_vec(vec![-v[1].conj(), v[0].conj()]);
    fix_phase(&mut w);
    w
}

struct BranchData {
    mu: [f64; 2],
    b: [DVector<Complex64>; 2],
    c: [DVector<Complex64>; 2],
    present: [bool; 2],
}

fn leaf_data(node: &TreeNode) -> BranchData {
    let leaf = match node {
        TreeNode::Leaf(l) => l,
        TreeNode::Branch(_) => unreachable!("three-qubit subtree is a leaf"),
    };
    let t0 = &leaf.terms[0];
    if leaf.terms.len() >= 2 {
        let t1 = &leaf.terms[1];
        BranchData {
            mu: [t0.weight, t1.weight],
            b: [t0.left_ket.clone(), t1.left_ket.clone()],
            c: [t0.right_ket.clone(), t1.right_ket.clone()],
            present: [true, true],
        }
    } else {
        BranchData {
            mu: [t0.weight, 0.0],
            b: [t0.left_ket.clone(), orthogonal_complement(&t0.left_ket)],
            c: [t0.right_ket.clone(), orthogonal_complement(&t0.right_ket)],
            present: [true, false],
        }
    }
}

/// Standard form along the default ordering (the first canonical one).
pub fn standard_form(psi: &PureState) -> Result<StandardForm3Q> {
    let ordering = Ordering::new(psi.layout().labels().to_vec());
    standard_form_with_ordering(psi, &ordering)
}

/// Reduces `psi` to the four-term standard form via its compact
/// decomposition along `ordering`, returning the parameters and the local
/// unitaries that achieve the form.
pub fn standard_form_with_ordering(psi: &PureState, ordering: &Ordering) -> Result<StandardForm3Q> {
    if psi.layout().dims() != [2, 2, 2] {
        return Err(QentError::WrongDims {
            expected: vec![2, 2, 2],
        });
    }
    let tree = compact_decomposition(psi, ordering)?;
    Ok(standard_form_from_tree(&tree))
}

pub(crate) fn standard_form_from_tree(tree: &DecompositionTree) -> StandardForm3Q {
    let root = match &tree.root {
        TreeNode::Branch(b) => b,
        TreeNode::Leaf(_) => unreachable!("three parties have a branch root"),
    };
    let lam0 = root.branches[0].weight;
    let a0 = root.branches[0].ket.clone();
    let (lam1, a1, second) = if root.branches.len() >= 2 {
        (
            root.branches[1].weight,
            root.branches[1].ket.clone(),
            Some(leaf_data(&root.branches[1].child)),
        )
    } else {
        (0.0, orthogonal_complement(&a0), None)
    };
    let first = leaf_data(&root.branches[0].child);

    let p = [
        lam0 * first.mu[0],
        lam0 * first.mu[1],
        second.as_ref().map_or(0.0, |s| lam1 * s.mu[0]),
        second.as_ref().map_or(0.0, |s| lam1 * s.mu[1]),
    ];

    let u_a = &plus() * a0.adjoint() + &minus() * a1.adjoint();
    let u_b = &plus() * first.b[0].adjoint() + &minus() * first.b[1].adjoint();
    let u_c = &plus() * first.c[0].adjoint() + &minus() * first.c[1].adjoint();

    let second = match second {
        Some(s) => s,
        None => {
            // single root branch: only the first two terms exist
            return StandardForm3Q {
                p,
                alpha: 0.0,
                beta: 0.0,
                theta_b: 0.0,
                theta_c: 0.0,
                local_unitaries: [u_a, u_b, u_c],
                degenerate: true,
                ordering: tree.ordering.clone(),
            };
        }
    };

    // Transformed second-branch kets, expressed in the +/- basis.
    let pm_components =
        |v: &DVector<Complex64>| -> (Complex64, Complex64) { (plus().dotc(v), minus().dotc(v)) };
    let b1 = &u_b * &second.b[0];
    let b2 = &u_b * &second.b[1];
    let c1 = &u_c * &second.c[0];
    let c2 = &u_c * &second.c[1];

    let angle_of = |v: &DVector<Complex64>| -> (f64, f64, f64) {
        let (cp, cm) = pm_components(v);
        let theta = 2.0 * cm.norm().atan2(cp.norm());
        let gamma = if cp.norm() > 1e-12 && cm.norm() > 1e-12 {
            cm.arg() - cp.arg()
        } else {
            0.0
        };
        let phi = if cp.norm() > 1e-12 {
            cp.arg()
        } else {
            cm.arg()
        };
        (theta, gamma, phi)
    };
    let (theta_b, gamma_b, phi_b1) = angle_of(&b1);
    let (theta_c, gamma_c, phi_c1) = angle_of(&c1);

    // Diagonal phase rotations (in the +/- basis) that make the branch-2
    // kets real in the theta parametrization.
    let diag_pm = |phase: f64| -> DMatrix<Complex64> {
        &plus() * plus().adjoint()
            + (&minus() * minus().adjoint()).map(|z| z * Complex64::from_polar(1.0, phase))
    };
    let d_b = diag_pm(-gamma_b);
    let d_c = diag_pm(-gamma_c);

    let second_present = second.present[1];
    let (phi_b2, phi_c2) = if second_present && p[3] > tol::PRUNE {
        let tb_minus = theta_minus(theta_b);
        let tc_minus = theta_minus(theta_c);
        let b2r = &d_b * &b2;
        let c2r = &d_c * &c2;
        (tb_minus.dotc(&b2r).arg(), tc_minus.dotc(&c2r).arg())
    } else {
        (0.0, 0.0)
    };

    let wrap = |x: f64| -> f64 {
        let mut y = x % (2.0 * PI);
        if y < 0.0 {
            y += 2.0 * PI;
        }
        if y > 2.0 * PI - 1e-12 {
            y = 0.0;
        }
        y
    };
    let alpha = wrap(-gamma_b - gamma_c);
    let beta = wrap(phi_b2 + phi_c2 - phi_b1 - phi_c1);
    let d_a = diag_pm(-(phi_b1 + phi_c1));

    StandardForm3Q {
        p,
        alpha,
        beta,
        theta_b,
        theta_c,
        local_unitaries: [&d_a * u_a, &d_b * u_b, &d_c * u_c],
        degenerate: false,
        ordering: tree.ordering.clone(),
    }
}

/// Residuals of the angle constraint tying the four real angles of the
/// standard form to the weights.
#[derive(Debug, Clone)]
pub struct ConstraintReport {
    /// |tan(th_b/2) tan(th_c/2) + N/D|; absent when the denominator is
    /// singular.
    pub quotient_residual: Option<f64>,
    /// |N cos(th_b/2) cos(th_c/2) + D sin(th_b/2) sin(th_c/2)|, the
    /// cross-multiplied form, defined for every parameter set.
    pub cross_residual: f64,
    /// Denominator modulus below 1e-12 (degenerate parameter region).
    pub singular_denominator: bool,
}

/// Evaluates the constraint
/// tan(th_b/2) tan(th_c/2) = -(sqrt(p1 p3) + sqrt(p2 p4) e^{i(beta-alpha)})
/// / (sqrt(p1 p4) e^{i beta} + sqrt(p2 p3) e^{-i alpha}).
pub fn verify_constraint(sf: &StandardForm3Q) -> ConstraintReport {
    let [p1, p2, p3, p4] = sf.p;
    let numer = Complex64::new((p1 * p3).sqrt(), 0.0)
        + Complex64::from_polar((p2 * p4).sqrt(), sf.beta - sf.alpha);
    let denom = Complex64::from_polar((p1 * p4).sqrt(), sf.beta)
        + Complex64::from_polar((p2 * p3).sqrt(), -sf.alpha);
    let cb = (sf.theta_b / 2.0).cos();
    let sb = (sf.theta_b / 2.0).sin();
    let cc = (sf.theta_c / 2.0).cos();
    let sc = (sf.theta_c / 2.0).sin();
    let cross =
        (numer * Complex64::new(cb * cc, 0.0) + denom * Complex64::new(sb * sc, 0.0)).norm();
    let singular = denom.norm() < 1e-12 || cb * cc < 1e-12;
    let quotient = if singular {
        None
    } else {
        Some((Complex64::new((sb / cb) * (sc / cc), 0.0) + numer / denom).norm())
    };
    ConstraintReport {
        quotient_residual: quotient,
        cross_residual: cross,
        singular_denominator: denom.norm() < 1e-12,
    }
}

/// Classification label by marginal ranks and the number of distinct
/// marginal spectra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassLabel {
    I,
    II,
    IIIa,
    IIIb,
    IIIc,
}

impl std::fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ClassLabel::I => "I",
            ClassLabel::II => "II",
            ClassLabel::IIIa => "III-a",
            ClassLabel::IIIb => "III-b",
            ClassLabel::IIIc => "III-c",
        };
        write!(f, "{s}")
    }
}

/// Classification record for a three-qubit pure state.
#[derive(Debug, Clone)]
pub struct ThreeQubitClass {
    pub label: ClassLabel,
    pub marginal_ranks: [usize; 3],
    pub n_ms: usize,
    /// Raw sorted spectra so callers can re-threshold near boundaries.
    pub spectra: Vec<Vec<f64>>,
    /// Diagonality witness from the Schmidt-decomposability test.
    pub schmidt_decomposable: bool,
    /// For III-a: witness agrees with the label. For III-b: theta_b equals
    /// theta_c within 1e-8 in the standard form that peels the
    /// odd-spectrum party first. Absent for other classes.
    pub confirmation: Option<bool>,
}

/// Classifies a three-qubit pure state by marginal ranks and n_ms.
pub fn classify(psi: &PureState) -> Result<ThreeQubitClass> {
    if psi.layout().dims() != [2, 2, 2] {
        return Err(QentError::WrongDims {
            expected: vec![2, 2, 2],
        });
    }
    psi.ensure_valid()?;
    let m = psi.marginals();
    let ranks = [m.ranks[0], m.ranks[1], m.ranks[2]];
    let rank_ones = ranks.iter().filter(|&&r| r == 1).count();
    let label = if rank_ones == 3 {
        ClassLabel::I
    } else if rank_ones >= 1 {
        ClassLabel::II
    } else {
        match m.n_ms {
            1 => ClassLabel::IIIa,
            2 => ClassLabel::IIIb,
            _ => ClassLabel::IIIc,
        }
    };
    let witness = is_schmidt_decomposable(psi)?;
    let confirmation = match label {
        ClassLabel::IIIa => Some(witness.decomposable),
        ClassLabel::IIIb => {
            // peel the party whose spectrum differs from the equal pair
            let odd = odd_spectrum_party(&m.spectra).unwrap_or(0);
            let labels = psi.layout().labels();
            let mut order: Vec<String> = vec![labels[odd].clone()];
            order.extend(labels.iter().enumerate().filter_map(|(i, l)| {
                if i != odd {
                    Some(l.clone())
                } else {
                    None
                }
            }));
            let sf = standard_form_with_ordering(psi, &Ordering::new(order))?;
            Some((sf.theta_b - sf.theta_c).abs() <= 1e-8)
        }
        _ => None,
    };
    Ok(ThreeQubitClass {
        label,
        marginal_ranks: ranks,
        n_ms: m.n_ms,
        spectra: m.spectra.clone(),
        schmidt_decomposable: witness.decomposable,
        confirmation,
    })
}

fn odd_spectrum_party(spectra: &[Vec<f64>]) -> Option<usize> {
    let eq = |a: &[f64], b: &[f64]| -> bool {
        a.iter()
            .zip(b)
            .all(|(x, y)| (x - y).abs() <= tol::SPECTRA_EQ)
    };
    for i in 0..3 {
        let others: Vec<usize> = (0..3).filter(|&j| j != i).collect();
        if eq(&spectra[others[0]], &spectra[others[1]]) && !eq(&spectra[i], &spectra[others[0]]) {
            return Some(i);
        }
    }
    None
}

/// Named fixture states used throughout the tests and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedState {
    /// (|+++> + |--->)/sqrt(2)
    Ghz,
    /// (|001> + |010> + |100>)/sqrt(3)
    W,
    /// The four-term state with p = 1/4, alpha = 0, beta = pi, th_b = 0,
    /// th_c = pi; equal to (|000> + |111>)/sqrt(2).
    Eq8Max,
    /// |+++>
    Product,
    /// |+> on A times a Bell pair on BC.
    BellTimesPure,
}

impl std::str::FromStr for NamedState {
    type Err = QentError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ghz" => Ok(NamedState::Ghz),
            "w" => Ok(NamedState::W),
            "eq8_max" => Ok(NamedState::Eq8Max),
            "product" => Ok(NamedState::Product),
            "bell_times_pure" => Ok(NamedState::BellTimesPure),
            other => Err(QentError::UnknownName(other.to_string())),
        }
    }
}

impl NamedState {
    pub const ALL: [NamedState; 5] = [
        NamedState::Ghz,
        NamedState::W,
        NamedState::Eq8Max,
        NamedState::Product,
        NamedState::BellTimesPure,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NamedState::Ghz => "ghz",
            NamedState::W => "w",
            NamedState::Eq8Max => "eq8_max",
            NamedState::Product => "product",
            NamedState::BellTimesPure => "bell_times_pure",
        }
    }
}

/// Exact amplitude vectors of the named three-qubit states.
pub fn make_named_state(name: NamedState) -> PureState {
    let layout = SubsystemLayout::qubits(3);
    let mut amps = vec![Complex64::new(0.0, 0.0); 8];
    match name {
        NamedState::Ghz => {
            // (|+++> + |--->)/sqrt(2) = (|000>+|011>+|101>+|110>)/2
            for idx in [0b000, 0b011, 0b101, 0b110] {
                amps[idx] = Complex64::new(0.5, 0.0);
            }
        }
        NamedState::W => {
            let a = 1.0 / 3.0f64.sqrt();
            for idx in [0b001, 0b010, 0b100] {
                amps[idx] = Complex64::new(a, 0.0);
            }
        }
        NamedState::Eq8Max => {
            amps[0b000] = Complex64::new(SQRT_HALF, 0.0);
            amps[0b111] = Complex64::new(SQRT_HALF, 0.0);
        }
        NamedState::Product => {
            let a = 0.5 * SQRT_HALF;
            for slot in amps.iter_mut() {
                *slot = Complex64::new(a, 0.0);
            }
        }
        NamedState::BellTimesPure => {
            // |+> x (|00>+|11>)/sqrt(2)
            for idx in [0b000, 0b011, 0b100, 0b111] {
                amps[idx] = Complex64::new(0.5, 0.0);
            }
        }
    }
    PureState::new(layout, amps).expect("static amplitude tables are sized correctly")
}

/// Fixture states covering every classification label, built from the
/// standard-form parameter settings each class corresponds to.
pub fn class_fixture(label: ClassLabel) -> PureState {
    let layout = SubsystemLayout::qubits(3);
    match label {
        ClassLabel::I => make_named_state(NamedState::Product),
        ClassLabel::II => make_named_state(NamedState::BellTimesPure),
        ClassLabel::IIIa => make_named_state(NamedState::Ghz),
        ClassLabel::IIIb => {
            // p chosen so the constraint admits theta_b = theta_c with
            // alpha = 0, beta = pi: tan^2(th/2) = 0.1096.../0.04495...
            let p: [f64; 4] = [0.1, 0.2, 0.3, 0.4];
            let t2 = ((p[1] * p[3]).sqrt() - (p[0] * p[2]).sqrt())
                / ((p[1] * p[2]).sqrt() - (p[0] * p[3]).sqrt());
            let theta = 2.0 * t2.sqrt().atan();
            eq6_state(&layout, p, 0.0, PI, theta, theta)
        }
        ClassLabel::IIIc => crate::random::haar_random_state(&layout, 424242),
    }
}

/// Entropy of the standard form's weight distribution.
pub fn standard_form_entropy(sf: &StandardForm3Q, base: LogBase) -> f64 {
    crate::entropy::shannon_entropy(&sf.p, base)
}
