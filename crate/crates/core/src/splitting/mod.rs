//! Splitting schemes for normal cones of linear subspaces, as explicit
//! matrices.
//!
//! Each builder returns a [`SplittingScheme`] holding the operator `T`, the
//! inner map `M` whose outputs form the shadow sequence, the projector onto
//! `Fix T`, the projector onto the intersection `Z`, and two small maps used
//! by the iteration engine: `shadow` (state to shadow point) and `reference`
//! (state to the point whose projection onto `Z` the shadow converges to).
//!
//! Argument order is part of the contract: for Malitsky–Tam and Campoy the
//! state lives in `(R^d)^(n-1)` and the **last** subspace plays the
//! distinguished role (the closing projector of the MT cascade, the
//! averaged factor in Campoy's first resolvent).

mod affine;
mod generic;

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::pinv::pseudoinverse;
use crate::subspace::{intersect2, intersect_many, product_projector, range_projector, Subspace};
use crate::textio::format_matrix;

pub use affine::{build_affine, AffineConjugation};
pub use generic::{apply_generic_step, evaluate_generic, GenericOutput, ResolventOracle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeKind {
    Ryu,
    MalitskyTam,
    Campoy,
    Pocs,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] = [
        SchemeKind::Ryu,
        SchemeKind::MalitskyTam,
        SchemeKind::Campoy,
        SchemeKind::Pocs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Ryu => "ryu",
            SchemeKind::MalitskyTam => "mt",
            SchemeKind::Campoy => "campoy",
            SchemeKind::Pocs => "pocs",
        }
    }

    /// Whether the scheme accepts `n` subspaces.
    pub fn supports(self, n: usize) -> bool {
        match self {
            SchemeKind::Ryu | SchemeKind::Pocs => n == 3,
            SchemeKind::MalitskyTam | SchemeKind::Campoy => n >= 3,
        }
    }

    /// Dimension of the governing state for `n` subspaces of `R^d`.
    pub fn state_dim(self, d: usize, n: usize) -> usize {
        match self {
            SchemeKind::Pocs => d,
            _ => (n - 1) * d,
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ryu" => Ok(SchemeKind::Ryu),
            "mt" | "malitsky-tam" => Ok(SchemeKind::MalitskyTam),
            "campoy" => Ok(SchemeKind::Campoy),
            "pocs" => Ok(SchemeKind::Pocs),
            other => Err(Error::InvalidArgument(format!(
                "unknown algorithm `{other}`"
            ))),
        }
    }
}

/// A built splitting algorithm instance. Immutable once constructed.
#[derive(Clone, Debug)]
pub struct SplittingScheme {
    kind: SchemeKind,
    ambient_dim: usize,
    n_subspaces: usize,
    operator: Matrix,
    inner: Matrix,
    fixed_projector: Matrix,
    solution_projector: Matrix,
    shadow: Matrix,
    reference: Matrix,
}

impl SplittingScheme {
    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn n_subspaces(&self) -> usize {
        self.n_subspaces
    }

    pub fn state_dim(&self) -> usize {
        self.operator.rows()
    }

    /// The splitting operator `T`.
    pub fn operator(&self) -> &Matrix {
        &self.operator
    }

    /// The inner map `M` (resolvent cascade).
    pub fn inner(&self) -> &Matrix {
        &self.inner
    }

    /// Projector onto `Fix T`.
    pub fn fixed_projector(&self) -> &Matrix {
        &self.fixed_projector
    }

    /// Projector onto the intersection `Z`.
    pub fn solution_projector(&self) -> &Matrix {
        &self.solution_projector
    }

    /// `d x state_dim` map from state to shadow point.
    pub fn shadow(&self) -> &Matrix {
        &self.shadow
    }

    /// `d x state_dim` map from a starting state to the point whose
    /// projection onto `Z` is the shadow limit: the first block for Ryu,
    /// the block average for MT and Campoy, the state itself for POCS.
    pub fn reference(&self) -> &Matrix {
        &self.reference
    }

    /// Starting state with every block equal to `x0`.
    pub fn replicate(&self, x0: &[f64]) -> Vec<f64> {
        assert_eq!(x0.len(), self.ambient_dim);
        let copies = self.state_dim() / self.ambient_dim;
        x0.repeat(copies)
    }

    /// Named matrices in the dump format: `T`, `M`, `P_fix`, `P_Z`, `shadow`.
    pub fn named_matrices(&self) -> [(&'static str, &Matrix); 5] {
        [
            ("T", &self.operator),
            ("M", &self.inner),
            ("P_fix", &self.fixed_projector),
            ("P_Z", &self.solution_projector),
            ("shadow", &self.shadow),
        ]
    }

    /// Writes `<name>.txt` for each named matrix into `dir`.
    pub fn write_dump(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        for (name, m) in self.named_matrices() {
            fs::write(dir.join(format!("{name}.txt")), format_matrix(m))?;
        }
        Ok(())
    }

    /// Concatenated stream: a `# <name>` line before each matrix.
    pub fn dump_string(&self) -> String {
        self.named_matrices()
            .iter()
            .map(|(name, m)| format!("# {name}\n{}", format_matrix(m)))
            .collect()
    }
}

fn check_subspaces(kind: SchemeKind, subspaces: &[Subspace]) -> Result<usize> {
    if !kind.supports(subspaces.len()) {
        return Err(Error::InvalidArgument(format!(
            "{kind} does not accept {} subspaces",
            subspaces.len()
        )));
    }
    let d = subspaces[0].ambient_dim();
    if let Some(bad) = subspaces.iter().find(|s| s.ambient_dim() != d) {
        return Err(Error::DimensionMismatch(format!(
            "subspaces live in R^{d} and R^{}",
            bad.ambient_dim()
        )));
    }
    Ok(d)
}

/// Builds any scheme from its subspaces.
pub fn build_scheme(kind: SchemeKind, subspaces: &[Subspace]) -> Result<SplittingScheme> {
    match kind {
        SchemeKind::Ryu => {
            check_subspaces(kind, subspaces)?;
            build_ryu(&subspaces[0], &subspaces[1], &subspaces[2])
        }
        SchemeKind::MalitskyTam => build_mt(subspaces),
        SchemeKind::Campoy => build_campoy(subspaces),
        SchemeKind::Pocs => build_pocs(subspaces),
    }
}

/// `[Id Id … Id] / copies`, a `d x copies·d` averaging map.
fn block_average(d: usize, copies: usize) -> Matrix {
    let w = 1.0 / copies as f64;
    Matrix::from_fn(d, copies * d, |i, j| if j % d == i { w } else { 0.0 })
}

/// `d x copies·d` selector of block `k`.
fn block_selector(d: usize, copies: usize, k: usize) -> Matrix {
    Matrix::from_fn(d, copies * d, |i, j| if j == k * d + i { 1.0 } else { 0.0 })
}

/// Ryu splitting for three subspaces; state `(x, y) ∈ R^d × R^d`.
pub fn build_ryu(u: &Subspace, v: &Subspace, w: &Subspace) -> Result<SplittingScheme> {
    let subspaces = [u.clone(), v.clone(), w.clone()];
    let d = check_subspaces(SchemeKind::Ryu, &subspaces)?;
    let (pu, pv, pw) = (u.projector(), v.projector(), w.projector());
    let id = Matrix::identity(d);
    let zero = Matrix::zeros(d, d);

    let pv_pu = pv * pu;
    let pw_pu = pw * pu;
    let pw_pv_pu = pw * &pv_pu;
    let pw_pv = pw * pv;
    let m3x = &(&pw_pu + &pw_pv_pu) - pw;
    let m3y = &pw_pv - pw;
    let inner = Matrix::block_assemble(&[
        vec![pu.clone(), zero.clone()],
        vec![pv_pu, pv.clone()],
        vec![m3x, m3y],
    ])?;
    let diff = Matrix::block_assemble(&[
        vec![-&id, zero.clone(), id.clone()],
        vec![zero.clone(), -&id, id.clone()],
    ])?;
    let operator = &Matrix::identity(2 * d) + &(&diff * &inner);

    let z = intersect_many(&subspaces)?;
    let p_z = z.projector().clone();

    // E = (U^⊥ × V^⊥) ∩ (Δ^⊥ + ({0} × W^⊥))
    let left = product_projector(&[u.complement(), v.complement()])?;
    let ones =
        Matrix::block_assemble(&[vec![id.clone(), id.clone()], vec![id.clone(), id.clone()]])?;
    let gram = Matrix::block_assemble(&[
        vec![id.scale(3.0), id.clone()],
        vec![id.clone(), &id + &pw.scale(2.0)],
    ])?;
    let x_times_w = Matrix::block_diag(&[&id, pw]);
    let right = Subspace::finish(
        &Matrix::identity(2 * d) - &(&(&ones * &pseudoinverse(&gram)) * &x_times_w).scale(2.0),
    )?;
    let e = intersect2(&left, &right)?;
    let z_block = Matrix::block_diag(&[&p_z, &zero]);
    let fixed = Subspace::finish(&z_block + e.projector())?;

    Ok(SplittingScheme {
        kind: SchemeKind::Ryu,
        ambient_dim: d,
        n_subspaces: 3,
        operator,
        inner,
        fixed_projector: fixed.projector().clone(),
        solution_projector: p_z,
        shadow: Matrix::block_assemble(&[vec![pu.clone(), zero.clone()]])?,
        reference: Matrix::block_assemble(&[vec![id, zero]])?,
    })
}

/// Malitsky–Tam splitting for `n ≥ 3` subspaces; state in `(R^d)^(n-1)`.
pub fn build_mt(subspaces: &[Subspace]) -> Result<SplittingScheme> {
    let d = check_subspaces(SchemeKind::MalitskyTam, subspaces)?;
    let n = subspaces.len();
    let m = n - 1;
    let proj: Vec<&Matrix> = subspaces.iter().map(Subspace::projector).collect();
    let sel: Vec<Matrix> = (0..m).map(|k| block_selector(d, m, k)).collect();

    // Each output x_i as a d x (n-1)d row block acting on z.
    let mut outputs: Vec<Matrix> = Vec::with_capacity(n);
    outputs.push(proj[0] * &sel[0]);
    for i in 1..m {
        let arg = &(&outputs[i - 1] + &sel[i]) - &sel[i - 1];
        outputs.push(proj[i] * &arg);
    }
    let closing = &(&outputs[0] + &outputs[m - 1]) - &sel[m - 1];
    outputs.push(proj[n - 1] * &closing);

    let inner =
        Matrix::block_assemble(&outputs.iter().map(|x| vec![x.clone()]).collect::<Vec<_>>())?;
    let steps: Vec<Vec<Matrix>> = (0..m)
        .map(|i| vec![&outputs[i + 1] - &outputs[i]])
        .collect();
    let operator = &Matrix::identity(m * d) + &Matrix::block_assemble(&steps)?;

    let z = intersect_many(subspaces)?;
    let p_z = z.projector().clone();

    // D = {(z, …, z) : z ∈ Z}, blocks P_Z/(n-1)
    let p_d = Matrix::from_fn(m * d, m * d, |i, j| p_z[(i % d, j % d)] / m as f64);

    // E = ran Ψ ∩ (X^(n-2) × U_n^⊥), Ψ lower-triangular with blocks P_{U_j^⊥}
    let complements: Vec<Matrix> = subspaces[..m]
        .iter()
        .map(|s| s.complement().projector().clone())
        .collect();
    let mut psi = Matrix::zeros(m * d, m * d);
    for i in 0..m {
        for (j, q) in complements.iter().enumerate().take(i + 1) {
            psi.set_block(i * d, j * d, q);
        }
    }
    let ran_psi = range_projector(&psi)?;
    let mut factors: Vec<Subspace> = (0..m - 1).map(|_| Subspace::full(d)).collect();
    factors.push(subspaces[n - 1].complement());
    let tail = product_projector(&factors)?;
    let e = intersect2(&ran_psi, &tail)?;
    let fixed = Subspace::finish(&p_d + e.projector())?;

    let mut shadow = Matrix::zeros(d, m * d);
    for x in &outputs {
        shadow = &shadow + x;
    }
    let shadow = shadow.scale(1.0 / n as f64);

    Ok(SplittingScheme {
        kind: SchemeKind::MalitskyTam,
        ambient_dim: d,
        n_subspaces: n,
        operator,
        inner,
        fixed_projector: fixed.projector().clone(),
        solution_projector: p_z,
        shadow,
        reference: block_average(d, m),
    })
}

/// Campoy splitting for `n ≥ 3` subspaces; state in `(R^d)^(n-1)`.
pub fn build_campoy(subspaces: &[Subspace]) -> Result<SplittingScheme> {
    let d = check_subspaces(SchemeKind::Campoy, subspaces)?;
    let n = subspaces.len();
    let m = n - 1;
    let last = subspaces[n - 1].projector();

    // M = J_A: every block P_n/(n-1); it is also the projector onto
    // Ũ = U_n^(n-1) ∩ Δ since P_{U_n^(n-1)} and P_Δ commute.
    let inner = Matrix::from_fn(m * d, m * d, |i, j| last[(i % d, j % d)] / m as f64);
    let v_tilde = product_projector(&subspaces[..m])?;
    let id = Matrix::identity(m * d);
    let reflect_a = &inner.scale(2.0) - &id;
    let s = v_tilde.projector() * &reflect_a;
    let operator = &(&id + &s.scale(2.0)) - &inner.scale(2.0);

    let u_tilde = Subspace::finish(inner.clone())?;
    let both = intersect2(&u_tilde, &v_tilde)?;
    let neither = intersect2(&u_tilde.complement(), &v_tilde.complement())?;
    let fixed = Subspace::finish(both.projector() + neither.projector())?;

    let z = intersect_many(subspaces)?;
    let shadow = inner.submatrix(0, 0, d, m * d)?;

    Ok(SplittingScheme {
        kind: SchemeKind::Campoy,
        ambient_dim: d,
        n_subspaces: n,
        operator,
        inner,
        fixed_projector: fixed.projector().clone(),
        solution_projector: z.projector().clone(),
        shadow,
        reference: block_average(d, m),
    })
}

/// Relaxed POCS for exactly three subspaces: `T = (4/3)·P_W P_V P_U − (1/3)·Id`,
/// so that `T_{3/4}` is the plain composition.
pub fn build_pocs(subspaces: &[Subspace]) -> Result<SplittingScheme> {
    let d = check_subspaces(SchemeKind::Pocs, subspaces)?;
    let composition =
        &(subspaces[2].projector() * subspaces[1].projector()) * subspaces[0].projector();
    let id = Matrix::identity(d);
    let operator = &composition.scale(4.0 / 3.0) - &id.scale(1.0 / 3.0);
    let z = intersect_many(subspaces)?;
    Ok(SplittingScheme {
        kind: SchemeKind::Pocs,
        ambient_dim: d,
        n_subspaces: 3,
        operator,
        inner: composition,
        fixed_projector: z.projector().clone(),
        solution_projector: z.projector().clone(),
        shadow: id.clone(),
        reference: id,
    })
}

#[cfg(test)]
mod tests;
