//! Convex-roof extension of the pure-state measure to mixed states, with
//! the closed-form two-qubit entanglement of formation as an independent
//! validation oracle.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::entropy::{binary_entropy, LogBase};
use crate::error::{QentError, Result};
use crate::linalg::{hermitian_eigen, hermitian_eigenvalues, hermitian_sqrt, max_abs};
use crate::measures::pure_ec_value;
use crate::opt;
use crate::state::{DensityMatrix, PureState};
use crate::tol;

/// Weighted pure-state ensemble representing a mixed state, together with
/// the isometry that generated it from the eigen-ensemble.
#[derive(Debug, Clone)]
pub struct EnsembleDecomposition {
    pub weights: Vec<f64>,
    pub states: Vec<PureState>,
    /// m x r matrix with orthonormal columns; row alpha mixes the scaled
    /// eigenvectors into member alpha.
    pub isometry: DMatrix<Complex64>,
}

impl EnsembleDecomposition {
    /// Max elementwise deviation of sum_a w_a |psi_a><psi_a| from rho.
    pub fn representation_residual(&self, rho: &DensityMatrix) -> f64 {
        let d = rho.layout().total_dim();
        let mut m = DMatrix::zeros(d, d);
        for (w, psi) in self.weights.iter().zip(&self.states) {
            m += (psi.amplitudes() * psi.amplitudes().adjoint())
                .map(|z| z * Complex64::new(*w, 0.0));
        }
        max_abs(&(m - rho.matrix()))
    }
}

/// Scaled eigenvectors of rho: column k is sqrt(mu_k) |e_k>, restricted to
/// the numerical rank.
fn scaled_eigenvectors(rho: &DensityMatrix) -> (DMatrix<Complex64>, usize) {
    let (vals, vecs) = hermitian_eigen(&rho.hermitian_part());
    let max = vals.iter().cloned().fold(0.0, f64::max);
    let kept: Vec<(f64, &DVector<Complex64>)> = vals
        .iter()
        .zip(&vecs)
        .filter(|(&w, _)| w > tol::RANK_REL * max)
        .map(|(&w, v)| (w, v))
        .rev() // descending eigenvalue order
        .collect();
    let d = rho.layout().total_dim();
    let r = kept.len();
    let mut a = DMatrix::zeros(d, r);
    for (k, (w, v)) in kept.iter().enumerate() {
        let s = Complex64::new(w.sqrt(), 0.0);
        for i in 0..d {
            a[(i, k)] = v[i] * s;
        }
    }
    (a, r)
}

/// Builds the ensemble generated by an isometry V (m x r, orthonormal
/// columns): member alpha is sum_k V[alpha,k] sqrt(mu_k)|e_k>, normalized,
/// with weight its squared norm.
pub fn ensemble_from_isometry(
    rho: &DensityMatrix,
    v: &DMatrix<Complex64>,
) -> Result<EnsembleDecomposition> {
    let (a, r) = scaled_eigenvectors(rho);
    if v.ncols() != r {
        return Err(QentError::RankOutOfRange {
            rank: v.ncols(),
            max: r,
        });
    }
    if v.nrows() < r {
        return Err(QentError::InvalidConfig(
            "ensemble size must be at least the rank".into(),
        ));
    }
    let gram = v.adjoint() * v;
    let residual = max_abs(&(gram - DMatrix::identity(r, r)));
    if residual > tol::ORTHONORMALITY {
        return Err(QentError::NonIsometric { residual });
    }
    Ok(build_ensemble(rho, &a, v))
}

fn build_ensemble(
    rho: &DensityMatrix,
    a: &DMatrix<Complex64>,
    v: &DMatrix<Complex64>,
) -> EnsembleDecomposition {
    let m = v.nrows();
    let mut weights = Vec::with_capacity(m);
    let mut states = Vec::with_capacity(m);
    for alpha in 0..m {
        let mut member: DVector<Complex64> = DVector::zeros(a.nrows());
        for k in 0..v.ncols() {
            member += a.column(k) * v[(alpha, k)];
        }
        let p = member.norm_squared();
        if p > tol::SUPPORT_LEAK {
            member /= Complex64::new(p.sqrt(), 0.0);
            weights.push(p);
            states.push(PureState::from_vector(rho.layout().clone(), member));
        }
    }
    EnsembleDecomposition {
        weights,
        states,
        isometry: v.clone(),
    }
}

/// Configuration of the roof search.
#[derive(Debug, Clone)]
pub struct RoofConfig {
    /// Ensemble size m; default 2r.
    pub ensemble_size: Option<usize>,
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for RoofConfig {
    fn default() -> Self {
        Self {
            ensemble_size: None,
            restarts: 16,
            max_iters: 400,
            seed: 0,
            tol: 1e-9,
        }
    }
}

/// Best ensemble-averaged entanglement found by the roof search.
#[derive(Debug, Clone)]
pub struct RoofResult {
    /// Upper bound on the roof-extended entanglement of rho.
    pub value: f64,
    pub best_ensemble: EnsembleDecomposition,
    pub restarts_used: usize,
    pub converged: Vec<bool>,
    pub ensemble_size: usize,
    pub log_base: LogBase,
}

fn thin_q(g: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let qr = g.clone().qr();
    qr.q()
}

fn params_to_isometry(params: &[f64], m: usize, r: usize) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(m, r, |i, j| {
        Complex64::new(params[i * r + j], params[m * r + i * r + j])
    });
    thin_q(&g)
}

/// Minimizes the ensemble-averaged pure-state entanglement over isometries
/// by multistart local optimization. Restart 0 always starts from the
/// eigen-ensemble, so the result never exceeds the eigen-ensemble average.
pub fn roof_minimize(
    rho: &DensityMatrix,
    config: &RoofConfig,
    base: LogBase,
) -> Result<RoofResult> {
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
    rho.ensure_valid()?;
    let (a, r) = scaled_eigenvectors(rho);
    let m = config.ensemble_size.unwrap_or(2 * r).max(r);
    let n_params = 2 * m * r;

    let objective = |params: &[f64]| -> f64 {
        let v = params_to_isometry(params, m, r);
        let ens = build_ensemble(rho, &a, &v);
        let mut total = 0.0;
        for (w, psi) in ens.weights.iter().zip(&ens.states) {
            if *w > 1e-10 {
                total += w * pure_ec_value(psi, base).expect("member state is valid");
            }
        }
        total
    };

    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(config.restarts);
    // eigen-ensemble start: V = [I_r; 0]
    let mut eigen_start = vec![0.0; n_params];
    for k in 0..r {
        eigen_start[k * r + k] = 1.0;
    }
    starts.push(eigen_start);
    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
    while starts.len() < config.restarts {
        starts.push((0..n_params).map(|_| rng.random_range(-1.0..1.0)).collect());
    }

    let runs: Vec<opt::MinimizeResult> = starts
        .par_iter()
        .map(|s| opt::minimize(objective, s, config.max_iters, config.tol))
        .collect();
    let best_idx = runs
        .iter()
        .enumerate()
        .min_by(|(i, x), (j, y)| x.value.total_cmp(&y.value).then(i.cmp(j)))
        .map(|(i, _)| i)
        .expect("at least one restart");
    // polish the winning restart with a tighter budget
    let polished = opt::minimize(objective, &runs[best_idx].x, 2 * config.max_iters, 1e-12);
    let (best_params, best_value) = if polished.value < runs[best_idx].value {
        (polished.x, polished.value)
    } else {
        (runs[best_idx].x.clone(), runs[best_idx].value)
    };

    let v = params_to_isometry(&best_params, m, r);
    Ok(RoofResult {
        value: best_value,
        best_ensemble: build_ensemble(rho, &a, &v),
        restarts_used: runs.len(),
        converged: runs.iter().map(|r| r.converged).collect(),
        ensemble_size: m,
        log_base: base,
    })
}

/// Exact two-qubit entanglement of formation from the concurrence.
pub fn wootters_ef(rho: &DensityMatrix, base: LogBase) -> Result<f64> {
    Ok(binary_entropy(
        (1.0 + (1.0 - concurrence(rho)?.powi(2)).max(0.0).sqrt()) / 2.0,
        base,
    ))
}

/// Two-qubit concurrence C = max(0, s1 - s2 - s3 - s4) from the square
/// roots of the eigenvalues of rho (sy x sy) rho* (sy x sy).
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.layout().dims() != [2, 2] {
        return Err(QentError::WrongDims {
            expected: vec![2, 2],
        });
    }
    let yy = {
        let mut m = DMatrix::zeros(4, 4);
        // sigma_y x sigma_y = antidiag(-1, 1, 1, -1)
        m[(0, 3)] = Complex64::new(-1.0, 0.0);
        m[(1, 2)] = Complex64::new(1.0, 0.0);
        m[(2, 1)] = Complex64::new(1.0, 0.0);
        m[(3, 0)] = Complex64::new(-1.0, 0.0);
        m
    };
    let spun = &yy * rho.matrix().map(|z| z.conj()) * &yy;
    let sqrt_rho = hermitian_sqrt(&rho.hermitian_part());
    let a = &sqrt_rho * spun * &sqrt_rho;
    let mut s: Vec<f64> = hermitian_eigenvalues(&a)
        .into_iter()
        .map(|w| w.max(0.0).sqrt())
        .collect();
    s.sort_by(|x, y| y.total_cmp(x));
    Ok((s[0] - s[1] - s[2] - s[3]).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::SubsystemLayout;
    use crate::measures::entanglement_pure;
    use crate::random::{haar_random_density, haar_random_state};
    use approx::assert_relative_eq;

    fn bell_density() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = PureState::new(
            SubsystemLayout::qubits(2),
            vec![
                Complex64::new(s, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(s, 0.0),
            ],
        )
        .unwrap();
        psi.to_density()
    }

    #[test]
    fn identity_isometry_recovers_eigen_ensemble() {
        let layout = SubsystemLayout::qubits(2);
        let rho = haar_random_density(&layout, 2, 7).unwrap();
        let v = DMatrix::identity(2, 2);
        let ens = ensemble_from_isometry(&rho, &v).unwrap();
        assert_eq!(ens.states.len(), 2);
        assert!(ens.representation_residual(&rho) < 1e-12);
        let eigs = rho.eigenvalues();
        let mut w = ens.weights.clone();
        w.sort_by(f64::total_cmp);
        assert_relative_eq!(w[0], eigs[2], epsilon = 1e-10);
        assert_relative_eq!(w[1], eigs[3], epsilon = 1e-10);
    }

    #[test]
    fn pure_rho_members_all_equal_the_state() {
        let layout = SubsystemLayout::qubits(2);
        let psi = haar_random_state(&layout, 5);
        let rho = psi.to_density();
        // any 3x1 isometry
        let mut v = DMatrix::zeros(3, 1);
        v[(0, 0)] = Complex64::new(0.6, 0.0);
        v[(1, 0)] = Complex64::new(0.0, 0.8);
        let ens = ensemble_from_isometry(&rho, &v).unwrap();
        for member in &ens.states {
            assert!(member.fidelity(&psi) > 1.0 - 1e-10);
        }
        assert!(ens.representation_residual(&rho) < 1e-9);
    }

    #[test]
    fn hadamard_mix_of_bell_diagonal_state() {
        let layout = SubsystemLayout::qubits(2);
        // rank-2 Bell-diagonal mixture
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi_plus = DVector::from_vec(vec![
            Complex64::new(s, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(s, 0.0),
        ]);
        let phi_minus = DVector::from_vec(vec![
            Complex64::new(s, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-s, 0.0),
        ]);
        let m = (&phi_plus * phi_plus.adjoint()).map(|z| z * Complex64::new(0.7, 0.0))
            + (&phi_minus * phi_minus.adjoint()).map(|z| z * Complex64::new(0.3, 0.0));
        let rho = DensityMatrix::new(layout, m).unwrap();
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let v = DMatrix::from_row_slice(2, 2, &[h, h, h, -h]);
        let ens = ensemble_from_isometry(&rho, &v).unwrap();
        assert!(ens.representation_residual(&rho) < 1e-12);
        assert_relative_eq!(ens.weights[0], 0.5, epsilon = 1e-10);
        assert_relative_eq!(ens.weights[1], 0.5, epsilon = 1e-10);
    }

    #[test]
    fn non_isometric_input_is_rejected() {
        let rho = bell_density();
        let v = DMatrix::from_element(1, 1, Complex64::new(2.0, 0.0));
        assert!(matches!(
            ensemble_from_isometry(&rho, &v),
            Err(QentError::NonIsometric { .. })
        ));
        let v = DMatrix::identity(4, 3);
        assert!(matches!(
            ensemble_from_isometry(&rho, &v),
            Err(QentError::RankOutOfRange { .. })
        ));
    }

    #[test]
    fn roof_of_pure_state_is_its_entanglement() {
        let layout = SubsystemLayout::qubits(2);
        let psi = haar_random_state(&layout, 12);
        let ec = entanglement_pure(&psi, LogBase::Two).unwrap().value;
        let config = RoofConfig {
            restarts: 2,
            max_iters: 40,
            ..Default::default()
        };
        let r = roof_minimize(&psi.to_density(), &config, LogBase::Two).unwrap();
        assert!((r.value - ec).abs() <= 1e-9, "{} vs {ec}", r.value);
    }

    #[test]
    fn roof_of_classical_mixture_vanishes() {
        let layout = SubsystemLayout::qubits(2);
        let mut m = DMatrix::zeros(4, 4);
        m[(0, 0)] = Complex64::new(0.5, 0.0);
        m[(3, 3)] = Complex64::new(0.5, 0.0);
        let rho = DensityMatrix::new(layout, m).unwrap();
        let config = RoofConfig {
            restarts: 4,
            max_iters: 100,
            ..Default::default()
        };
        let r = roof_minimize(&rho, &config, LogBase::Two).unwrap();
        assert!(r.value <= 1e-6, "value {}", r.value);
    }

    #[test]
    fn wootters_closed_form_examples() {
        assert_relative_eq!(
            wootters_ef(&bell_density(), LogBase::Two).unwrap(),
            1.0,
            epsilon = 1e-12
        );

        let layout = SubsystemLayout::qubits(2);
        let mixed = DensityMatrix::new(
            layout.clone(),
            DMatrix::from_diagonal(&DVector::from_element(4, Complex64::new(0.25, 0.0))),
        )
        .unwrap();
        assert!(wootters_ef(&mixed, LogBase::Two).unwrap() < 1e-12);

        // 0.9 Bell + 0.1 I/4: the spin-flipped matrix coincides with rho, so
        // the s-values are its eigenvalues (0.925, 0.025 x3) and C = 0.85.
        let m = bell_density().matrix() * Complex64::new(0.9, 0.0)
            + DMatrix::from_diagonal(&DVector::from_element(4, Complex64::new(0.025, 0.0)));
        let rho = DensityMatrix::new(layout, m).unwrap();
        assert_relative_eq!(concurrence(&rho).unwrap(), 0.85, epsilon = 1e-12);
        let expected = binary_entropy((1.0 + (1.0 - 0.85f64.powi(2)).sqrt()) / 2.0, LogBase::Two);
        assert_relative_eq!(
            wootters_ef(&rho, LogBase::Two).unwrap(),
            expected,
            epsilon = 1e-12
        );
    }

    #[test]
    fn roof_matches_oracle_on_werner_like_state() {
        let layout = SubsystemLayout::qubits(2);
        let m = bell_density().matrix() * Complex64::new(0.9, 0.0)
            + DMatrix::from_diagonal(&DVector::from_element(4, Complex64::new(0.025, 0.0)));
        let rho = DensityMatrix::new(layout, m).unwrap();
        let oracle = wootters_ef(&rho, LogBase::Two).unwrap();
        let config = RoofConfig {
            ensemble_size: Some(4),
            restarts: 8,
            max_iters: 250,
            seed: 3,
            tol: 1e-9,
        };
        let r = roof_minimize(&rho, &config, LogBase::Two).unwrap();
        assert!(
            (r.value - oracle).abs() <= 5e-3,
            "roof {} vs oracle {oracle}",
            r.value
        );
        assert!(r.best_ensemble.representation_residual(&rho) < 1e-9);
    }

    #[test]
    fn roof_never_exceeds_eigen_ensemble_average() {
        let layout = SubsystemLayout::qubits(2);
        for seed in 40..45 {
            let rho = haar_random_density(&layout, 2, seed).unwrap();
            let eigen = ensemble_from_isometry(&rho, &DMatrix::identity(2, 2)).unwrap();
            let eigen_avg: f64 = eigen
                .weights
                .iter()
                .zip(&eigen.states)
                .map(|(w, psi)| w * entanglement_pure(psi, LogBase::Two).unwrap().value)
                .sum();
            let config = RoofConfig {
                ensemble_size: Some(4),
                restarts: 2,
                max_iters: 80,
                seed,
                tol: 1e-9,
            };
            let r = roof_minimize(&rho, &config, LogBase::Two).unwrap();
            assert!(
                r.value <= eigen_avg + 1e-12,
                "seed {seed}: {} vs eigen average {eigen_avg}",
                r.value
            );
        }
    }

    #[test]
    fn roof_result_is_deterministic() {
        let layout = SubsystemLayout::qubits(2);
        let rho = haar_random_density(&layout, 2, 31).unwrap();
        let config = RoofConfig {
            ensemble_size: Some(4),
            restarts: 4,
            max_iters: 60,
            seed: 9,
            tol: 1e-9,
        };
        let a = roof_minimize(&rho, &config, LogBase::Two).unwrap();
        let b = roof_minimize(&rho, &config, LogBase::Two).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.converged, b.converged);
    }
}
