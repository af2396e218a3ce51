//! Fixtures for the benchmarks: seeded Gaussian subspaces and states.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use projsplit_core::{Matrix, Subspace};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

pub fn gaussian_vector(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| StandardNormal.sample(rng)).collect()
}

/// Ranges of Gaussian `d × k` matrices.
pub fn random_subspaces(seed: u64, d: usize, dims: &[usize]) -> Vec<Subspace> {
    let mut r = rng(seed);
    dims.iter()
        .map(|&k| Subspace::from_basis(&gaussian_matrix(&mut r, d, k)).expect("full-rank draw"))
        .collect()
}
