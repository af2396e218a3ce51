//! Linear subspaces carried by their orthogonal projectors, and the
//! projector calculus used to build fixed-point projectors: complements,
//! Anderson–Duffin intersections, sums, products, diagonals and ranges.

use crate::eigen::symmetric_eig;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::pinv::{numerical_rank, pseudoinverse};

/// Idempotency residual above which one polish step `3P² − 2P³` is applied.
const POLISH_THRESHOLD: f64 = 1e-11;
/// Largest accepted ‖P² − P‖_F for a returned projector.
const IDEMPOTENCY_TOL: f64 = 1e-9;
/// Largest accepted |trace(P) − round(trace(P))|.
const TRACE_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct Subspace {
    projector: Matrix,
    basis: Option<Matrix>,
    dim: usize,
}

impl Subspace {
    /// Validates a user-supplied projector: square, symmetric within 1e-10,
    /// idempotent within 1e-9.
    pub fn from_projector(p: &Matrix) -> Result<Self> {
        if !p.is_square() {
            return Err(Error::NotSquare {
                rows: p.rows(),
                cols: p.cols(),
            });
        }
        let asym = p.asymmetry();
        if asym > 1e-10 {
            return Err(Error::InvalidSubspace(format!(
                "projector asymmetry {asym:.3e} exceeds 1e-10"
            )));
        }
        let res = idempotency_residual(p);
        if res > IDEMPOTENCY_TOL {
            return Err(Error::InvalidSubspace(format!(
                "idempotency residual {res:.3e} exceeds {IDEMPOTENCY_TOL:e}"
            )));
        }
        Self::finish(p.clone())
    }

    /// Subspace spanned by the columns of `b`, with projector `B·B†`.
    /// A zero matrix yields the trivial subspace.
    pub fn from_basis(b: &Matrix) -> Result<Self> {
        let projector = b * &pseudoinverse(b);
        let mut s = Self::finish(projector)?;
        let rank = if b.max_abs() == 0.0 {
            0
        } else {
            numerical_rank(b)
        };
        if rank != s.dim {
            return Err(Error::Degraded(format!(
                "basis rank {rank} disagrees with projector trace {}",
                s.dim
            )));
        }
        s.basis = Some(b.clone());
        Ok(s)
    }

    pub fn trivial(ambient_dim: usize) -> Self {
        Self {
            projector: Matrix::zeros(ambient_dim, ambient_dim),
            basis: None,
            dim: 0,
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            projector: Matrix::identity(ambient_dim),
            basis: None,
            dim: ambient_dim,
        }
    }

    /// Wraps a computed projector: symmetrizes, polishes once if needed and
    /// checks projector structure.
    pub(crate) fn finish(p: Matrix) -> Result<Self> {
        let mut p = p.symmetrize();
        if idempotency_residual(&p) > POLISH_THRESHOLD {
            let p2 = &p * &p;
            let p3 = &p2 * &p;
            p = (&p2.scale(3.0) - &p3.scale(2.0)).symmetrize();
        }
        let res = idempotency_residual(&p);
        if res > IDEMPOTENCY_TOL {
            return Err(Error::Degraded(format!(
                "idempotency residual {res:.3e} after polishing"
            )));
        }
        let tr = p.trace();
        let dim = tr.round();
        if (tr - dim).abs() > TRACE_TOL || dim < 0.0 {
            return Err(Error::Degraded(format!(
                "projector trace {tr} is not integral"
            )));
        }
        Ok(Self {
            projector: p,
            basis: None,
            dim: dim as usize,
        })
    }

    pub fn projector(&self) -> &Matrix {
        &self.projector
    }

    pub fn basis(&self) -> Option<&Matrix> {
        self.basis.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ambient_dim(&self) -> usize {
        self.projector.rows()
    }

    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        self.projector.matvec(x)
    }

    /// Orthogonal complement, `Id − P`.
    pub fn complement(&self) -> Subspace {
        let n = self.ambient_dim();
        Subspace {
            projector: &Matrix::identity(n) - &self.projector,
            basis: None,
            dim: n - self.dim,
        }
    }

    fn check_same_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim() != other.ambient_dim() {
            return Err(Error::DimensionMismatch(format!(
                "subspaces live in R^{} and R^{}",
                self.ambient_dim(),
                other.ambient_dim()
            )));
        }
        Ok(())
    }
}

fn idempotency_residual(p: &Matrix) -> f64 {
    (p * p).distance(p)
}

/// Anderson–Duffin: `P_{U∩V} = 2·P_U·(P_U + P_V)†·P_V`.
pub fn intersect2(u: &Subspace, v: &Subspace) -> Result<Subspace> {
    u.check_same_ambient(v)?;
    let pu = u.projector();
    let pv = v.projector();
    let middle = pseudoinverse(&(pu + pv));
    Subspace::finish((&(pu * &middle) * pv).scale(2.0))
}

/// Left fold of [`intersect2`]: `((U₁ ∩ U₂) ∩ U₃) ∩ …`.
pub fn intersect_many(subspaces: &[Subspace]) -> Result<Subspace> {
    let (first, rest) = subspaces
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("cannot intersect an empty list".into()))?;
    rest.iter()
        .try_fold(first.clone(), |acc, s| intersect2(&acc, s))
}

/// `P_{U+V} = Id − P_{U^⊥ ∩ V^⊥}`.
pub fn sum_projector(u: &Subspace, v: &Subspace) -> Result<Subspace> {
    let perp = intersect2(&u.complement(), &v.complement())?;
    Ok(perp.complement())
}

/// Projector onto the diagonal of `(R^d)^copies`: every block becomes the
/// mean of all blocks.
pub fn diagonal_projector(ambient_dim: usize, copies: usize) -> Result<Subspace> {
    if copies < 2 {
        return Err(Error::InvalidArgument(format!(
            "a diagonal needs at least 2 copies, got {copies}"
        )));
    }
    let w = 1.0 / copies as f64;
    let n = ambient_dim * copies;
    let projector = Matrix::from_fn(n, n, |i, j| {
        if i % ambient_dim == j % ambient_dim {
            w
        } else {
            0.0
        }
    });
    Ok(Subspace {
        projector,
        basis: None,
        dim: ambient_dim,
    })
}

/// Block-diagonal projector onto `U₁ × … × U_m`.
pub fn product_projector(subspaces: &[Subspace]) -> Result<Subspace> {
    if subspaces.is_empty() {
        return Err(Error::InvalidArgument("empty product".into()));
    }
    let blocks: Vec<&Matrix> = subspaces.iter().map(Subspace::projector).collect();
    Ok(Subspace {
        projector: Matrix::block_diag(&blocks),
        basis: None,
        dim: subspaces.iter().map(Subspace::dim).sum(),
    })
}

/// Projector onto the column space of `a`, `A·A†`.
pub fn range_projector(a: &Matrix) -> Result<Subspace> {
    Subspace::finish(a * &pseudoinverse(a))
}

/// Intersection through the kernel of the stacked complements.
///
/// `x ∈ ∩ U_i` iff `Σ ‖(Id − P_i)x‖² = 0`, so the intersection is the
/// eigenspace of `Σ (Id − P_i)` for eigenvalue zero. This route uses only
/// the symmetric eigensolver and never a pseudoinverse, which makes it an
/// independent check on the Anderson–Duffin path.
pub fn intersect_via_nullspace(subspaces: &[Subspace]) -> Result<Subspace> {
    let first = subspaces
        .first()
        .ok_or_else(|| Error::InvalidArgument("cannot intersect an empty list".into()))?;
    let n = first.ambient_dim();
    let mut gram = Matrix::zeros(n, n);
    for s in subspaces {
        first.check_same_ambient(s)?;
        gram = &gram + s.complement().projector();
    }
    let (values, vectors) = symmetric_eig(&gram)?;
    let kernel: Vec<usize> = (0..n).filter(|&i| values[i].abs() < 1e-8).collect();
    if kernel.is_empty() {
        return Ok(Subspace::trivial(n));
    }
    let q = Matrix::from_fn(n, kernel.len(), |i, j| vectors[(i, kernel[j])]);
    Ok(Subspace {
        projector: (&q * &q.transpose()).symmetrize(),
        basis: Some(q),
        dim: kernel.len(),
    })
}

/// An affine subspace `anchor + parallel`.
#[derive(Clone, Debug)]
pub struct AffineSubspace {
    parallel: Subspace,
    anchor: Vec<f64>,
}

impl AffineSubspace {
    pub fn new(parallel: Subspace, anchor: Vec<f64>) -> Result<Self> {
        if anchor.len() != parallel.ambient_dim() {
            return Err(Error::DimensionMismatch(format!(
                "anchor of length {} for a subspace of R^{}",
                anchor.len(),
                parallel.ambient_dim()
            )));
        }
        if anchor.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite anchor".into()));
        }
        Ok(Self { parallel, anchor })
    }

    pub fn linear(parallel: Subspace) -> Self {
        let n = parallel.ambient_dim();
        Self {
            parallel,
            anchor: vec![0.0; n],
        }
    }

    pub fn parallel(&self) -> &Subspace {
        &self.parallel
    }

    pub fn anchor(&self) -> &[f64] {
        &self.anchor
    }

    /// `P_U x + P_{U^⊥} v`.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let px = self.parallel.project(x);
        let pv = self.parallel.project(&self.anchor);
        px.iter()
            .zip(&self.anchor)
            .zip(&pv)
            .map(|((a, v), p)| a + v - p)
            .collect()
    }
}
