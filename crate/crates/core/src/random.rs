//! Seeded Haar-random states, densities, and unitaries.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{QentError, Result};
use crate::layout::SubsystemLayout;
use crate::state::{DensityMatrix, PureState};

fn complex_gaussian(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) / 2.0f64.sqrt()
}

/// Haar-random pure state: i.i.d. standard complex Gaussian amplitudes,
/// normalized. Deterministic for a given seed.
pub fn haar_random_state(layout: &SubsystemLayout, seed: u64) -> PureState {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    haar_random_state_with(layout, &mut rng)
}

pub fn haar_random_state_with(layout: &SubsystemLayout, rng: &mut impl Rng) -> PureState {
    let d = layout.total_dim();
    let mut amps = DVector::from_iterator(d, (0..d).map(|_| complex_gaussian(rng)));
    let norm = amps.norm();
    amps /= Complex64::new(norm, 0.0);
    PureState::from_vector(layout.clone(), amps)
}

/// Random density matrix rho = G G^dagger / tr(G G^dagger) with G a
/// total-dim x rank complex Gaussian matrix.
pub fn haar_random_density(
    layout: &SubsystemLayout,
    rank: usize,
    seed: u64,
) -> Result<DensityMatrix> {
    let d = layout.total_dim();
    if rank == 0 || rank > d {
        return Err(QentError::RankOutOfRange { rank, max: d });
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(d, rank, |_, _| complex_gaussian(&mut rng));
    let mut m = &g * g.adjoint();
    let tr = m.trace().re;
    m /= Complex64::new(tr, 0.0);
    Ok(DensityMatrix::from_matrix(layout.clone(), m))
}

/// Haar-random unitary: QR of a complex Ginibre matrix with the R-diagonal
/// phase correction.
pub fn haar_random_unitary(dim: usize, seed: u64) -> DMatrix<Complex64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    haar_random_unitary_with(dim, &mut rng)
}

pub fn haar_random_unitary_with(dim: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / Complex64::new(d.norm(), 0.0)
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}
