//! Relaxed fixed-point iteration `z ↦ (1 − λ)z + λTz` with error traces
//! measured against limits computed in advance from `P_Fix` and the shadow
//! map.
//!
//! Index convention: entry `k` of a trace is the error of `z_k`, with
//! `z_0` the start. A run that stops at `converged_at = k` has performed
//! `k` steps.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::matrix::{distance, Matrix};
use crate::splitting::{AffineConjugation, SplittingScheme};
use crate::textio::fmt_g17;

/// `(1 − λ)·Id + λ·T`.
pub fn relax(t: &Matrix, lambda: f64) -> Matrix {
    assert!(t.is_square(), "relax needs a square operator");
    let mut out = t.scale(lambda);
    for i in 0..t.rows() {
        out[(i, i)] += 1.0 - lambda;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopTarget {
    Governing,
    Shadow,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StopRule {
    pub epsilon: f64,
    pub max_iters: usize,
    pub target: StopTarget,
}

impl StopRule {
    pub fn new(epsilon: f64, max_iters: usize, target: StopTarget) -> Result<Self> {
        if !(epsilon > 0.0) || max_iters == 0 {
            return Err(Error::InvalidArgument(format!(
                "stop rule needs epsilon > 0 and max_iters >= 1 (got {epsilon}, {max_iters})"
            )));
        }
        Ok(Self {
            epsilon,
            max_iters,
            target,
        })
    }

    /// Run exactly `iters` steps regardless of the errors.
    pub fn fixed(iters: usize) -> Self {
        Self {
            epsilon: 0.0,
            max_iters: iters,
            target: StopTarget::Governing,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationTrace {
    pub lambda: f64,
    pub iterations_run: usize,
    pub governing_errors: Vec<f64>,
    pub shadow_errors: Vec<f64>,
    pub converged_at: Option<usize>,
    pub limit_governing: Vec<f64>,
    pub limit_shadow: Vec<f64>,
    /// `λ ≥ 1`: convergence is not guaranteed.
    pub unguaranteed: bool,
    /// The last iterate, `z_{iterations_run}`.
    pub final_state: Vec<f64>,
}

impl IterationTrace {
    /// CSV with header `k,governing_error,shadow_error`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,governing_error,shadow_error\n");
        for (k, (g, s)) in self
            .governing_errors
            .iter()
            .zip(&self.shadow_errors)
            .enumerate()
        {
            let _ = writeln!(out, "{k},{},{}", fmt_g17(*g), fmt_g17(*s));
        }
        out
    }
}

struct Limits {
    governing: Vec<f64>,
    shadow: Vec<f64>,
    shadow_offset: Option<Vec<f64>>,
}

fn check_start(scheme: &SplittingScheme, z0: &[f64], lambda: f64) -> Result<()> {
    if z0.len() != scheme.state_dim() {
        return Err(Error::DimensionMismatch(format!(
            "start of length {} for a state of dimension {}",
            z0.len(),
            scheme.state_dim()
        )));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    if z0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteIterate(0));
    }
    Ok(())
}

fn shadow_of(scheme: &SplittingScheme, z: &[f64], offset: Option<&[f64]>) -> Vec<f64> {
    let mut s = scheme.shadow().matvec(z);
    if let Some(c) = offset {
        for (v, c) in s.iter_mut().zip(c) {
            *v += c;
        }
    }
    s
}

/// Core loop. `step` maps `z_k` to `z_{k+1}` in place.
fn run(
    scheme: &SplittingScheme,
    z0: &[f64],
    lambda: f64,
    stop: StopRule,
    limits: Limits,
    mut step: impl FnMut(&[f64], &mut Vec<f64>, usize),
) -> Result<IterationTrace> {
    let offset = limits.shadow_offset.as_deref();
    let mut z = z0.to_vec();
    let mut next = vec![0.0; z.len()];
    let mut governing = Vec::with_capacity(stop.max_iters.min(1 << 16) + 1);
    let mut shadow = Vec::with_capacity(stop.max_iters.min(1 << 16) + 1);
    let mut converged_at = None;
    let mut k = 0;
    loop {
        let g = distance(&z, &limits.governing);
        let s = distance(&shadow_of(scheme, &z, offset), &limits.shadow);
        governing.push(g);
        shadow.push(s);
        let tracked = match stop.target {
            StopTarget::Governing => g,
            StopTarget::Shadow => s,
        };
        if tracked <= stop.epsilon {
            converged_at = Some(k);
            break;
        }
        if k == stop.max_iters {
            break;
        }
        step(&z, &mut next, k);
        k += 1;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteIterate(k));
        }
        std::mem::swap(&mut z, &mut next);
    }
    Ok(IterationTrace {
        lambda,
        iterations_run: k,
        governing_errors: governing,
        shadow_errors: shadow,
        converged_at,
        limit_governing: limits.governing,
        limit_shadow: limits.shadow,
        unguaranteed: lambda >= 1.0,
        final_state: z,
    })
}

/// Runs `T_λ` from `z0` until the tracked error is at most `ε` or
/// `max_iters` steps have been taken.
pub fn iterate(
    scheme: &SplittingScheme,
    z0: &[f64],
    lambda: f64,
    stop: StopRule,
) -> Result<IterationTrace> {
    check_start(scheme, z0, lambda)?;
    let t = relax(scheme.operator(), lambda);
    let governing = scheme.fixed_projector().matvec(z0);
    let shadow = scheme.shadow().matvec(&governing);
    let limits = Limits {
        governing,
        shadow,
        shadow_offset: None,
    };
    run(scheme, z0, lambda, stop, limits, |z, out, _| {
        t.matvec_into(z, out)
    })
}

/// Affine run by conjugation: `z_k = a + L_λ^k (z0 − a)`.
pub fn iterate_affine(
    scheme: &SplittingScheme,
    conj: &AffineConjugation,
    z0: &[f64],
    lambda: f64,
    stop: StopRule,
) -> Result<IterationTrace> {
    check_start(scheme, z0, lambda)?;
    let t = relax(scheme.operator(), lambda);
    let a = &conj.translation;
    let governing = conj.fixed_point_projection(scheme, z0);
    let shadow = conj.shadow(scheme, &governing);
    let limits = Limits {
        governing,
        shadow,
        shadow_offset: Some(conj.shadow_offset.clone()),
    };
    let mut w = vec![0.0; a.len()];
    let mut lw = vec![0.0; a.len()];
    run(scheme, z0, lambda, stop, limits, |z, out, _| {
        for ((w, z), a) in w.iter_mut().zip(z).zip(a) {
            *w = z - a;
        }
        t.matvec_into(&w, &mut lw);
        for ((o, v), a) in out.iter_mut().zip(&lw).zip(a) {
            *o = v + a;
        }
        if cfg!(debug_assertions) {
            // direct affine step: (1 − λ)z + λ(Lz + b)
            let tz = scheme.operator().matvec(z);
            let direct: Vec<f64> = z
                .iter()
                .zip(&tz)
                .zip(&conj.offset)
                .map(|((z, t), b)| (1.0 - lambda) * z + lambda * (t + b))
                .collect();
            let scale = 1.0 + crate::matrix::norm(z);
            debug_assert!(
                distance(&direct, out) <= 1e-9 * scale,
                "affine conjugation drifted"
            );
        }
    })
}

/// Iteration counts to reach `ε` in governing and shadow error, in a single
/// run that keeps no trace. `None` means the cap was hit first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HittingTimes {
    pub governing: Option<usize>,
    pub shadow: Option<usize>,
}

pub fn hitting_times(
    scheme: &SplittingScheme,
    relaxed: &Matrix,
    z0: &[f64],
    epsilon: f64,
    max_iters: usize,
) -> Result<HittingTimes> {
    let limit = scheme.fixed_projector().matvec(z0);
    let limit_shadow = scheme.shadow().matvec(&limit);
    let mut z = z0.to_vec();
    let mut next = vec![0.0; z.len()];
    let mut times = HittingTimes {
        governing: None,
        shadow: None,
    };
    for k in 0..=max_iters {
        if times.governing.is_none() && distance(&z, &limit) <= epsilon {
            times.governing = Some(k);
        }
        if times.shadow.is_none() && distance(&scheme.shadow().matvec(&z), &limit_shadow) <= epsilon
        {
            times.shadow = Some(k);
        }
        if (times.governing.is_some() && times.shadow.is_some()) || k == max_iters {
            break;
        }
        relaxed.matvec_into(&z, &mut next);
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteIterate(k + 1));
        }
        std::mem::swap(&mut z, &mut next);
    }
    Ok(times)
}

/// Default trailing window for [`estimate_rate`].
pub const DEFAULT_RATE_WINDOW: usize = 50;

/// Geometric-mean ratio of consecutive governing errors over the trailing
/// `window` steps among the entries above `1e-14`.
pub fn estimate_rate(trace: &IterationTrace, window: usize) -> Result<f64> {
    geometric_rate(&trace.governing_errors, window)
}

/// [`estimate_rate`] on a bare error sequence.
pub fn geometric_rate(errors: &[f64], window: usize) -> Result<f64> {
    if window == 0 {
        return Err(Error::InvalidArgument(
            "rate window must be positive".into(),
        ));
    }
    let usable = errors.iter().take_while(|&&e| e > 1e-14).count();
    if usable < window + 1 {
        return Err(Error::InsufficientData(format!(
            "{usable} usable errors, need {}",
            window + 1
        )));
    }
    let last = errors[usable - 1];
    let first = errors[usable - 1 - window];
    Ok(((last / first).ln() / window as f64).exp())
}
