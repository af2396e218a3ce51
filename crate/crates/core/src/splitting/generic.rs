//! Matrix-free evaluation of one step of each scheme from resolvent
//! oracles. For linear subspaces the oracles are the projectors and the
//! result agrees with multiplying by `T`; for affine subspaces this is the
//! only place where the anchors enter.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matrix::{distance, Matrix};
use crate::subspace::{AffineSubspace, Subspace};

use super::SchemeKind;

type ResolventFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// A firmly nonexpansive map on `R^d`, here always a (possibly affine)
/// projector.
#[derive(Clone)]
pub struct ResolventOracle {
    dim: usize,
    map: Arc<ResolventFn>,
}

impl fmt::Debug for ResolventOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ResolventOracle")
            .field("dim", &self.dim)
            .finish()
    }
}

impl ResolventOracle {
    pub fn new(dim: usize, map: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        let oracle = Self {
            dim,
            map: Arc::new(map),
        };
        debug_assert!(
            oracle.spot_check_nonexpansive(4),
            "resolvent expands distances"
        );
        oracle
    }

    pub fn projector(p: &Matrix) -> Self {
        let p = p.clone();
        Self::new(p.rows(), move |x| p.matvec(x))
    }

    pub fn subspace(s: &Subspace) -> Self {
        Self::projector(s.projector())
    }

    pub fn affine(s: &AffineSubspace) -> Self {
        let s = s.clone();
        Self::new(s.parallel().ambient_dim(), move |x| s.project(x))
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(dim, |x| x.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (self.map)(x)
    }

    // Pairs from a small LCG; deterministic and dependency-free.
    fn spot_check_nonexpansive(&self, pairs: usize) -> bool {
        let mut state: u64 = 0x2545_f491_4f6c_dd1d;
        let mut next = || {
            state = state
                .wrapping_mul(6_364_136_223_846_793_005)
                .wrapping_add(1_442_695_040_888_963_407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        (0..pairs).all(|_| {
            let x: Vec<f64> = (0..self.dim).map(|_| next()).collect();
            let y: Vec<f64> = (0..self.dim).map(|_| next()).collect();
            let before = distance(&x, &y);
            distance(&self.apply(&x), &self.apply(&y)) <= before * (1.0 + 1e-9) + 1e-12
        })
    }
}

/// Result of one generic step.
#[derive(Clone, Debug, PartialEq)]
pub struct GenericOutput {
    pub next: Vec<f64>,
    pub shadow: Vec<f64>,
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// One unrelaxed step of `kind` from `state`, plus the shadow point
/// computed along the way.
pub fn evaluate_generic(
    kind: SchemeKind,
    oracles: &[ResolventOracle],
    state: &[f64],
) -> Result<GenericOutput> {
    let n = oracles.len();
    if !kind.supports(n) {
        return Err(Error::InvalidArgument(format!(
            "{kind} does not accept {n} resolvents"
        )));
    }
    let d = oracles[0].dim();
    if oracles.iter().any(|o| o.dim() != d) {
        return Err(Error::DimensionMismatch(
            "resolvents of different dimension".into(),
        ));
    }
    let want = kind.state_dim(d, n);
    if state.len() != want {
        return Err(Error::DimensionMismatch(format!(
            "state of length {} for {kind} on R^{d} with {n} sets (expected {want})",
            state.len()
        )));
    }
    let blocks: Vec<&[f64]> = state.chunks(d).collect();

    let out = match kind {
        SchemeKind::Ryu => {
            let (x, y) = (blocks[0], blocks[1]);
            let x1 = oracles[0].apply(x);
            let x2 = oracles[1].apply(&add(&x1, y));
            let arg = sub(&add(&x1, &x2), &add(x, y));
            let x3 = oracles[2].apply(&arg);
            let mut next = add(x, &sub(&x3, &x1));
            next.extend(add(y, &sub(&x3, &x2)));
            GenericOutput { next, shadow: x1 }
        }
        SchemeKind::MalitskyTam => {
            let m = n - 1;
            let mut xs: Vec<Vec<f64>> = Vec::with_capacity(n);
            xs.push(oracles[0].apply(blocks[0]));
            for i in 1..m {
                let arg = sub(&add(blocks[i], &xs[i - 1]), blocks[i - 1]);
                xs.push(oracles[i].apply(&arg));
            }
            let closing = sub(&add(&xs[0], &xs[m - 1]), blocks[m - 1]);
            xs.push(oracles[n - 1].apply(&closing));
            let next = (0..m)
                .flat_map(|i| add(blocks[i], &sub(&xs[i + 1], &xs[i])))
                .collect();
            let mut shadow = vec![0.0; d];
            for x in &xs {
                for (s, v) in shadow.iter_mut().zip(x) {
                    *s += v / n as f64;
                }
            }
            GenericOutput { next, shadow }
        }
        SchemeKind::Campoy => {
            let m = n - 1;
            let mut mean = vec![0.0; d];
            for b in &blocks {
                for (s, v) in mean.iter_mut().zip(b.iter()) {
                    *s += v / m as f64;
                }
            }
            let a = oracles[n - 1].apply(&mean);
            let mut next = Vec::with_capacity(state.len());
            for (i, b) in blocks.iter().enumerate() {
                let reflected: Vec<f64> =
                    a.iter().zip(b.iter()).map(|(p, z)| 2.0 * p - z).collect();
                let s = oracles[i].apply(&reflected);
                next.extend(
                    b.iter()
                        .zip(&s)
                        .zip(&a)
                        .map(|((z, s), p)| z + 2.0 * s - 2.0 * p),
                );
            }
            GenericOutput { next, shadow: a }
        }
        SchemeKind::Pocs => {
            let c = oracles[2].apply(&oracles[1].apply(&oracles[0].apply(state)));
            let next = c
                .iter()
                .zip(state)
                .map(|(p, x)| 4.0 / 3.0 * p - x / 3.0)
                .collect();
            GenericOutput {
                next,
                shadow: state.to_vec(),
            }
        }
    };
    Ok(out)
}

/// One unrelaxed step through the resolvent oracles.
pub fn apply_generic_step(
    kind: SchemeKind,
    oracles: &[ResolventOracle],
    state: &[f64],
) -> Result<Vec<f64>> {
    evaluate_generic(kind, oracles, state).map(|o| o.next)
}
