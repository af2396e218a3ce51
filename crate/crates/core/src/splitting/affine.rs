//! Consistent affine subspaces, reduced to the linear case.
//!
//! With anchors the step is `T_aff(z) = L z + b` where `L` is the operator
//! built from the parallel subspaces and `b = T_aff(0)`. When the system is
//! consistent, `a = (Id − L)†b` is a fixed point of `T_aff`, and iterating
//! `T_aff` from `z0` is the same as `a + L^k (z0 − a)`.

use crate::error::{Error, Result};
use crate::matrix::{norm, Matrix};
use crate::pinv::pseudoinverse;
use crate::subspace::{AffineSubspace, Subspace};

use super::generic::{evaluate_generic, ResolventOracle};
use super::{build_scheme, SchemeKind, SplittingScheme};

/// Translation data tying the affine scheme to its linear part.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineConjugation {
    /// Fixed point `a` of the affine operator, orthogonal to `Fix L`.
    pub translation: Vec<f64>,
    /// `b = T_aff(0)`.
    pub offset: Vec<f64>,
    /// Shadow of the zero state, so `shadow_aff(z) = S z + c`.
    pub shadow_offset: Vec<f64>,
    /// A point of the affine intersection (the shadow at `a`).
    pub solution_anchor: Vec<f64>,
}

impl AffineConjugation {
    pub fn shadow(&self, scheme: &SplittingScheme, state: &[f64]) -> Vec<f64> {
        let mut s = scheme.shadow().matvec(state);
        for (v, c) in s.iter_mut().zip(&self.shadow_offset) {
            *v += c;
        }
        s
    }

    /// Projection onto `Fix T_aff`: `P_Fix(L) z + a`.
    pub fn fixed_point_projection(&self, scheme: &SplittingScheme, z: &[f64]) -> Vec<f64> {
        let mut p = scheme.fixed_projector().matvec(z);
        for (v, a) in p.iter_mut().zip(&self.translation) {
            *v += a;
        }
        p
    }

    /// Projection of `x` onto the affine intersection.
    pub fn project_solution(&self, scheme: &SplittingScheme, x: &[f64]) -> Vec<f64> {
        let shifted: Vec<f64> = x
            .iter()
            .zip(&self.solution_anchor)
            .map(|(x, p)| x - p)
            .collect();
        let mut out = scheme.solution_projector().matvec(&shifted);
        for (v, p) in out.iter_mut().zip(&self.solution_anchor) {
            *v += p;
        }
        out
    }
}

/// Builds the linear scheme on the parallel subspaces and the conjugation
/// data. Fails with [`Error::InconsistentAffine`] when the anchors admit no
/// common point.
pub fn build_affine(
    kind: SchemeKind,
    sets: &[AffineSubspace],
) -> Result<(SplittingScheme, AffineConjugation)> {
    let parallels: Vec<Subspace> = sets.iter().map(|s| s.parallel().clone()).collect();
    let scheme = build_scheme(kind, &parallels)?;
    let oracles: Vec<ResolventOracle> = sets.iter().map(ResolventOracle::affine).collect();

    let zero = vec![0.0; scheme.state_dim()];
    let at_zero = evaluate_generic(kind, &oracles, &zero)?;
    let b = at_zero.next;
    let c = at_zero.shadow;

    let n = scheme.state_dim();
    let gap = &Matrix::identity(n) - scheme.operator();
    let a = pseudoinverse(&gap).matvec(&b);
    let residual: Vec<f64> = gap.matvec(&a).iter().zip(&b).map(|(x, y)| x - y).collect();
    let tolerance = 1e-8 * (1.0 + norm(&b));
    let r = norm(&residual);
    if r > tolerance {
        return Err(Error::InconsistentAffine {
            residual: r,
            tolerance,
        });
    }

    // A fixed point can exist without a common point (plain composition on
    // disjoint sets), so the shadow there must also be feasible.
    let mut anchor = scheme.shadow().matvec(&a);
    for (v, c) in anchor.iter_mut().zip(&c) {
        *v += c;
    }
    let scale = 1.0 + norm(&anchor);
    for set in sets {
        let miss: Vec<f64> = set
            .project(&anchor)
            .iter()
            .zip(&anchor)
            .map(|(p, x)| p - x)
            .collect();
        let r = norm(&miss);
        if r > 1e-8 * scale {
            return Err(Error::InconsistentAffine {
                residual: r,
                tolerance: 1e-8 * scale,
            });
        }
    }

    Ok((
        scheme,
        AffineConjugation {
            translation: a,
            offset: b,
            shadow_offset: c,
            solution_anchor: anchor,
        },
    ))
}
