//! Best approximation from files: project a start onto the intersection of
//! user-supplied (optionally affine) subspaces with one splitting scheme and
//! compare against the direct Anderson–Duffin projection.

use std::fmt::Write as _;
use std::path::PathBuf;

use projsplit_core::matrix::distance;
use projsplit_core::subspace::intersect_many;
use projsplit_core::textio::{fmt_g17, read_matrix, read_vector};
use projsplit_core::{
    build_affine, build_scheme, iterate, iterate_affine, AffineSubspace, Error, Result, SchemeKind,
    StopRule, StopTarget, Subspace,
};

#[derive(Clone, Debug)]
pub struct SolveRequest {
    /// One matrix file per subspace: a basis (columns) or, with
    /// `projector_input`, the orthogonal projector itself.
    pub subspaces: Vec<PathBuf>,
    pub projector_input: bool,
    /// Empty for linear subspaces, otherwise one anchor file per subspace.
    pub anchors: Vec<PathBuf>,
    pub start: PathBuf,
    pub algorithm: SchemeKind,
    pub lambda: f64,
    pub epsilon: f64,
    pub max_iters: usize,
    pub dump_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub algorithm: SchemeKind,
    pub lambda: f64,
    pub iterations: usize,
    pub converged: bool,
    pub splitting: Vec<f64>,
    pub anderson_duffin: Vec<f64>,
    pub distance: f64,
}

impl SolveResult {
    /// Comment lines with the run summary, then `index,splitting,anderson_duffin`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# algorithm={} lambda={} iterations={} converged={}",
            self.algorithm,
            fmt_g17(self.lambda),
            self.iterations,
            self.converged
        );
        let _ = writeln!(out, "# distance={}", fmt_g17(self.distance));
        out.push_str("index,splitting,anderson_duffin\n");
        for (i, (s, a)) in self.splitting.iter().zip(&self.anderson_duffin).enumerate() {
            let _ = writeln!(out, "{i},{},{}", fmt_g17(*s), fmt_g17(*a));
        }
        out
    }
}

pub fn load_subspaces(paths: &[PathBuf], projector_input: bool) -> Result<Vec<Subspace>> {
    paths
        .iter()
        .map(|p| {
            let m = read_matrix(p)?;
            if projector_input {
                Subspace::from_projector(&m)
            } else {
                Subspace::from_basis(&m)
            }
        })
        .collect()
}

pub fn run_solve(req: &SolveRequest) -> Result<SolveResult> {
    let subspaces = load_subspaces(&req.subspaces, req.projector_input)?;
    let x0 = read_vector(&req.start)?;
    let anchors = req
        .anchors
        .iter()
        .map(read_vector)
        .collect::<Result<Vec<_>>>()?;
    solve(
        req.algorithm,
        &subspaces,
        &anchors,
        &x0,
        req.lambda,
        req.epsilon,
        req.max_iters,
        req.dump_dir.as_ref(),
    )
}

/// In-memory form of [`run_solve`]. `anchors` is empty or has one entry per
/// subspace.
#[allow(clippy::too_many_arguments)]
pub fn solve(
    algorithm: SchemeKind,
    subspaces: &[Subspace],
    anchors: &[Vec<f64>],
    x0: &[f64],
    lambda: f64,
    epsilon: f64,
    max_iters: usize,
    dump_dir: Option<&PathBuf>,
) -> Result<SolveResult> {
    let d = subspaces
        .first()
        .ok_or_else(|| Error::InvalidArgument("no subspaces given".into()))?
        .ambient_dim();
    if x0.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "start has length {}, subspaces live in R^{d}",
            x0.len()
        )));
    }
    if !anchors.is_empty() && anchors.len() != subspaces.len() {
        return Err(Error::InvalidArgument(format!(
            "{} anchors for {} subspaces",
            anchors.len(),
            subspaces.len()
        )));
    }
    let stop = StopRule::new(epsilon, max_iters, StopTarget::Shadow)?;

    let (scheme, trace, splitting, direct) = if anchors.is_empty() {
        let scheme = build_scheme(algorithm, subspaces)?;
        let z0 = scheme.replicate(x0);
        let trace = iterate(&scheme, &z0, lambda, stop)?;
        let splitting = scheme.shadow().matvec(&trace.final_state);
        let direct = intersect_many(subspaces)?.project(x0);
        (scheme, trace, splitting, direct)
    } else {
        let sets = subspaces
            .iter()
            .zip(anchors)
            .map(|(s, a)| AffineSubspace::new(s.clone(), a.clone()))
            .collect::<Result<Vec<_>>>()?;
        let (scheme, conj) = build_affine(algorithm, &sets)?;
        let z0 = scheme.replicate(x0);
        let trace = iterate_affine(&scheme, &conj, &z0, lambda, stop)?;
        let splitting = conj.shadow(&scheme, &trace.final_state);
        let direct = conj.project_solution(&scheme, x0);
        (scheme, trace, splitting, direct)
    };
    if let Some(dir) = dump_dir {
        scheme.write_dump(dir)?;
    }
    Ok(SolveResult {
        algorithm,
        lambda,
        iterations: trace.iterations_run,
        converged: trace.converged_at.is_some(),
        distance: distance(&splitting, &direct),
        splitting,
        anderson_duffin: direct,
    })
}
