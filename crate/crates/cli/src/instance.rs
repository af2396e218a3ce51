//! Seeded random instances.
//!
//! Generator: ChaCha8 (`rand_chacha`), seeded from the configured 64-bit
//! seed. Every instance and every (instance, start) pair reads its own
//! ChaCha stream, so results do not depend on evaluation order or thread
//! count. Basis entries and starting points are i.i.d. standard normal.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use projsplit_core::subspace::{intersect_many, intersect_via_nullspace};
use projsplit_core::{Error, Matrix, Result, Subspace};

/// Largest Frobenius gap accepted between the two intersection routes.
pub const ORACLE_TOL: f64 = 1e-8;

const START_STREAM_BIT: u64 = 1 << 63;

#[derive(Clone, Debug)]
pub struct InstanceRecord {
    pub instance_id: usize,
    pub subspaces: Vec<Subspace>,
    pub intersection: Subspace,
}

/// Stream for instance `id`.
pub fn instance_rng(seed: u64, id: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id as u64);
    rng
}

/// Stream for start `start` of instance `id`.
pub fn start_rng(seed: u64, id: usize, start: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(START_STREAM_BIT | ((id as u64) << 32) | start as u64);
    rng
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

pub fn gaussian_vector(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| StandardNormal.sample(rng)).collect()
}

fn draw(rng: &mut ChaCha8Rng, d: usize, dims: &[usize]) -> Result<(Vec<Subspace>, Subspace)> {
    let mut subspaces = Vec::with_capacity(dims.len());
    for &k in dims {
        let s = Subspace::from_basis(&gaussian_matrix(rng, d, k))?;
        if s.dim() != k {
            return Err(Error::Degraded(format!(
                "drawn basis has rank {} < {k}",
                s.dim()
            )));
        }
        subspaces.push(s);
    }
    let intersection = intersect_many(&subspaces)?;
    let oracle = intersect_via_nullspace(&subspaces)?;
    let gap = intersection.projector().distance(oracle.projector());
    if gap > ORACLE_TOL || intersection.dim() != oracle.dim() {
        return Err(Error::Degraded(format!(
            "intersection disagrees with the nullspace oracle by {gap:.3e}"
        )));
    }
    let floor = dims.iter().sum::<usize>() as isize - (dims.len() as isize - 1) * d as isize;
    if (intersection.dim() as isize) < floor {
        return Err(Error::Degraded(format!(
            "intersection dimension {} below the count bound {floor}",
            intersection.dim()
        )));
    }
    Ok((subspaces, intersection))
}

/// Draws `B_i ∈ R^{d×d_i}` and sets `U_i = range(B_i)`. A degenerate draw is
/// redrawn once from the same stream; a second failure is an error.
pub fn random_instance(seed: u64, id: usize, d: usize, dims: &[usize]) -> Result<InstanceRecord> {
    if d == 0 || dims.is_empty() || dims.iter().any(|&k| k == 0 || k > d) {
        return Err(Error::InvalidArgument(format!(
            "subspace dimensions {dims:?} invalid in R^{d}"
        )));
    }
    let mut rng = instance_rng(seed, id);
    let (subspaces, intersection) = match draw(&mut rng, d, dims) {
        Ok(v) => v,
        Err(_) => draw(&mut rng, d, dims)?,
    };
    Ok(InstanceRecord {
        instance_id: id,
        subspaces,
        intersection,
    })
}

/// Starting point `x0 ∈ R^d` for start `start` of instance `id`.
pub fn random_start(seed: u64, id: usize, start: usize, d: usize) -> Vec<f64> {
    gaussian_vector(&mut start_rng(seed, id, start), d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let a = random_instance(7, 3, 6, &[5, 5, 5]).unwrap();
        let b = random_instance(7, 3, 6, &[5, 5, 5]).unwrap();
        for (u, v) in a.subspaces.iter().zip(&b.subspaces) {
            assert_eq!(u.projector().as_slice(), v.projector().as_slice());
        }
        assert_eq!(random_start(7, 3, 1, 6), random_start(7, 3, 1, 6));
        assert_ne!(random_start(7, 3, 1, 6), random_start(7, 3, 2, 6));
    }

    #[test]
    fn dimension_count() {
        for id in 0..10 {
            let r = random_instance(1, id, 6, &[5, 5, 5]).unwrap();
            assert!(r.intersection.dim() >= 3);
        }
    }

    #[test]
    fn full_space_instance() {
        let r = random_instance(1, 0, 6, &[6, 6, 6]).unwrap();
        assert_eq!(r.intersection.dim(), 6);
        assert!(r.intersection.projector().distance(&Matrix::identity(6)) < 1e-10);
    }

    #[test]
    fn rejects_oversized_dims() {
        assert!(random_instance(1, 0, 4, &[5, 3, 3]).is_err());
    }
}
