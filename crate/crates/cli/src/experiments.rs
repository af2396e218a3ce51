//! The sweeps behind each subcommand. Every function returns the complete
//! CSV text; work items run on the rayon pool and are reduced in a fixed
//! (algorithm, λ, instance, start) order afterwards.

use std::fmt::Write as _;

use rayon::prelude::*;

use projsplit_core::iteration::{hitting_times, HittingTimes};
use projsplit_core::spectral::{pocs_three_lines_norm, three_lines};
use projsplit_core::textio::fmt_g17;
use projsplit_core::{
    build_scheme, iterate, pocs_three_lines_eigenvalues, rate_bounds, relax, Error, RateBounds,
    Result, SchemeKind, SplittingScheme, StopRule,
};

use crate::config::{exp3_lambda, Experiment, ExperimentConfig, EXP3_ITERATIONS};
use crate::instance::{random_instance, random_start, InstanceRecord};
use crate::stats::{Stat, Summary};

pub const EXP1_HEADER: &str = "algorithm,lambda,stat,spectral_radius,operator_norm,samples";
pub const EXP2_HEADER: &str = "algorithm,lambda,sequence,stat,iterations,samples";
pub const EXP3_HEADER: &str = "algorithm,k,sequence,stat,distance,samples";
pub const THREE_LINES_HEADER: &str =
    "algorithm,theta,lambda,spectral_radius,operator_norm,closed_form_radius,closed_form_norm";

const SEQUENCES: [&str; 2] = ["governing", "shadow"];

/// Runs the experiment named in `config`. `solve` has its own entry point.
pub fn run_experiment(config: &ExperimentConfig) -> Result<String> {
    config.validate()?;
    match config.experiment {
        Experiment::Exp1 => run_exp1(config),
        Experiment::Exp2 => run_exp2(config),
        Experiment::Exp3 => run_exp3(config),
        Experiment::ThreeLines => run_three_lines(config),
        Experiment::Solve => Err(Error::InvalidArgument(
            "solve takes input files, not a sweep configuration".into(),
        )),
    }
}

/// Accumulates `# skipped` lines that are appended after the data rows.
#[derive(Default)]
struct Skips(Vec<String>);

impl Skips {
    fn push(&mut self, what: String, err: &Error) {
        self.0.push(format!("# skipped {what}: {err}"));
    }

    fn append_to(self, out: &mut String) {
        for line in self.0 {
            out.push_str(&line);
            out.push('\n');
        }
    }
}

pub fn generate_instances(config: &ExperimentConfig) -> Vec<Result<InstanceRecord>> {
    (0..config.n_instances)
        .into_par_iter()
        .map(|id| random_instance(config.seed, id, config.d, &config.subspace_dims))
        .collect()
}

fn build_all(
    instances: &[Result<InstanceRecord>],
    kinds: &[SchemeKind],
) -> Vec<Vec<Result<SplittingScheme>>> {
    instances
        .par_iter()
        .map(|inst| {
            kinds
                .iter()
                .map(|&k| match inst {
                    Ok(r) => build_scheme(k, &r.subspaces),
                    Err(e) => Err(Error::Degraded(format!("instance generation failed: {e}"))),
                })
                .collect()
        })
        .collect()
}

/// Spectral radius and operator norm of `T_λ − P_Fix` over the λ grid.
pub fn run_exp1(config: &ExperimentConfig) -> Result<String> {
    let kinds = config.active_algorithms();
    let instances = generate_instances(config);
    let schemes = build_all(&instances, &kinds);
    // bounds[instance][algorithm][λ]
    let bounds: Vec<Vec<Vec<Result<RateBounds>>>> = schemes
        .par_iter()
        .map(|per_kind| {
            per_kind
                .iter()
                .map(|s| {
                    config
                        .lambda_grid
                        .iter()
                        .map(|&l| match s {
                            Ok(s) => rate_bounds(s, l),
                            Err(e) => Err(Error::Degraded(e.to_string())),
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let mut out = format!("{EXP1_HEADER}\n");
    let mut skips = Skips::default();
    for (a, kind) in kinds.iter().enumerate() {
        for (li, &lambda) in config.lambda_grid.iter().enumerate() {
            let mut rho = Vec::new();
            let mut norm = Vec::new();
            for (i, per) in bounds.iter().enumerate() {
                match &per[a][li] {
                    Ok(b) => {
                        rho.push(b.spectral_radius);
                        norm.push(b.operator_norm);
                    }
                    Err(e) => {
                        skips.push(format!("{kind} lambda={} instance={i}", fmt_g17(lambda)), e)
                    }
                }
            }
            if let (Some(r), Some(n)) = (Summary::of(&rho), Summary::of(&norm)) {
                for stat in Stat::ALL {
                    let _ = writeln!(
                        out,
                        "{kind},{},{},{},{},{}",
                        fmt_g17(lambda),
                        stat.name(),
                        fmt_g17(r.get(stat)),
                        fmt_g17(n.get(stat)),
                        r.samples
                    );
                }
            }
        }
    }
    skips.append_to(&mut out);
    Ok(out)
}

/// Iterations to reach ε in governing and shadow error, censored at the cap.
pub fn run_exp2(config: &ExperimentConfig) -> Result<String> {
    let kinds = config.active_algorithms();
    let instances = generate_instances(config);
    let schemes = build_all(&instances, &kinds);
    let starts: Vec<Vec<Vec<f64>>> = (0..config.n_instances)
        .into_par_iter()
        .map(|i| {
            (0..config.n_starts)
                .map(|j| random_start(config.seed, i, j, config.d))
                .collect()
        })
        .collect();

    // counts[instance][algorithm][λ][start] = [governing, shadow]
    type Counts = Result<[f64; 2]>;
    let counts: Vec<Vec<Vec<Vec<Counts>>>> = schemes
        .par_iter()
        .zip(&starts)
        .map(|(per_kind, xs)| {
            per_kind
                .iter()
                .map(|s| {
                    config
                        .lambda_grid
                        .iter()
                        .map(|&l| {
                            let s = match s {
                                Ok(s) => s,
                                Err(e) => {
                                    let msg = e.to_string();
                                    return xs
                                        .iter()
                                        .map(|_| Err(Error::Degraded(msg.clone())))
                                        .collect();
                                }
                            };
                            let t = relax(s.operator(), l);
                            xs.iter()
                                .map(|x0| {
                                    let z0 = s.replicate(x0);
                                    // a run that overflows never reaches ε: censored like a cap hit
                                    let h = match hitting_times(
                                        s,
                                        &t,
                                        &z0,
                                        config.epsilon,
                                        config.max_iters,
                                    ) {
                                        Err(Error::NonFiniteIterate(_)) => HittingTimes {
                                            governing: None,
                                            shadow: None,
                                        },
                                        other => other?,
                                    };
                                    let cap = config.max_iters as f64;
                                    let g = h.governing.map_or(cap, |k| k as f64);
                                    let sh = h.shadow.map_or(cap, |k| k as f64);
                                    // POCS: the governing sequence is the shadow sequence
                                    let g = if s.kind() == SchemeKind::Pocs { sh } else { g };
                                    Ok([g, sh])
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let mut out = format!("{EXP2_HEADER}\n");
    let mut skips = Skips::default();
    for (a, kind) in kinds.iter().enumerate() {
        for (li, &lambda) in config.lambda_grid.iter().enumerate() {
            let mut seqs = [Vec::new(), Vec::new()];
            for (i, per) in counts.iter().enumerate() {
                for (j, c) in per[a][li].iter().enumerate() {
                    match c {
                        Ok(v) => {
                            seqs[0].push(v[0]);
                            seqs[1].push(v[1]);
                        }
                        Err(e) => skips.push(
                            format!("{kind} lambda={} instance={i} start={j}", fmt_g17(lambda)),
                            e,
                        ),
                    }
                }
            }
            for (name, values) in SEQUENCES.iter().zip(&seqs) {
                if let Some(s) = Summary::of(values) {
                    for stat in Stat::ALL {
                        let _ = writeln!(
                            out,
                            "{kind},{},{name},{},{},{}",
                            fmt_g17(lambda),
                            stat.name(),
                            fmt_g17(s.get(stat)),
                            s.samples
                        );
                    }
                }
            }
        }
    }
    skips.append_to(&mut out);
    Ok(out)
}

/// Per-iteration governing and shadow distances at a fixed λ per algorithm.
pub fn run_exp3(config: &ExperimentConfig) -> Result<String> {
    let kinds = config.active_algorithms();
    let instances = generate_instances(config);
    let schemes = build_all(&instances, &kinds);
    let iters = EXP3_ITERATIONS;

    // errors[instance][algorithm][start] = (governing, shadow), k = 0..=iters
    type Trace = Result<(Vec<f64>, Vec<f64>)>;
    let errors: Vec<Vec<Vec<Trace>>> = schemes
        .par_iter()
        .enumerate()
        .map(|(i, per_kind)| {
            per_kind
                .iter()
                .map(|s| {
                    (0..config.n_starts)
                        .map(|j| {
                            let s = s.as_ref().map_err(|e| Error::Degraded(e.to_string()))?;
                            let z0 = s.replicate(&random_start(config.seed, i, j, config.d));
                            let tr =
                                iterate(s, &z0, exp3_lambda(s.kind()), StopRule::fixed(iters))?;
                            Ok((
                                pad(tr.governing_errors, iters),
                                pad(tr.shadow_errors, iters),
                            ))
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let mut out = String::new();
    let lambdas: Vec<String> = kinds
        .iter()
        .map(|&k| format!("{k}={}", fmt_g17(exp3_lambda(k))))
        .collect();
    let _ = writeln!(out, "# lambda {}", lambdas.join(" "));
    if kinds.contains(&SchemeKind::Pocs) {
        out.push_str("# pocs lambda is a default choice with no reference value\n");
    }
    out.push_str(EXP3_HEADER);
    out.push('\n');
    let mut skips = Skips::default();
    for (a, kind) in kinds.iter().enumerate() {
        let mut ok: Vec<&(Vec<f64>, Vec<f64>)> = Vec::new();
        for (i, per) in errors.iter().enumerate() {
            for (j, t) in per[a].iter().enumerate() {
                match t {
                    Ok(t) => ok.push(t),
                    Err(e) => skips.push(format!("{kind} instance={i} start={j}"), e),
                }
            }
        }
        for (si, name) in SEQUENCES.iter().enumerate() {
            for k in 1..=iters {
                let values: Vec<f64> = ok
                    .iter()
                    .map(|t| if si == 0 { t.0[k] } else { t.1[k] })
                    .collect();
                if let Some(s) = Summary::of(&values) {
                    for stat in Stat::ALL {
                        let _ = writeln!(
                            out,
                            "{kind},{k},{name},{},{},{}",
                            stat.name(),
                            fmt_g17(s.get(stat)),
                            s.samples
                        );
                    }
                }
            }
        }
    }
    skips.append_to(&mut out);
    Ok(out)
}

/// A run that hit zero error stops early; its remaining entries stay put.
fn pad(mut v: Vec<f64>, iters: usize) -> Vec<f64> {
    let last = *v.last().expect("traces record z_0");
    v.resize(iters + 1, last);
    v
}

/// Rate bounds for the three-lines family over the θ and λ grids. POCS rows
/// also carry the closed-form radius and norm at the row's λ.
pub fn run_three_lines(config: &ExperimentConfig) -> Result<String> {
    let kinds: Vec<SchemeKind> = config
        .algorithms
        .iter()
        .copied()
        .filter(|k| k.supports(3))
        .collect();
    let mut items = Vec::new();
    for &kind in &kinds {
        for &theta in &config.theta_grid {
            for &lambda in &config.lambda_grid {
                items.push((kind, theta, lambda));
            }
        }
    }
    let rows: Vec<Result<String>> = items
        .par_iter()
        .map(|&(kind, theta, lambda)| {
            let scheme = build_scheme(kind, &three_lines(theta))?;
            let b = rate_bounds(&scheme, lambda)?;
            let (cf_rho, cf_norm) = if kind == SchemeKind::Pocs {
                let (e1, e2) = pocs_three_lines_eigenvalues(theta, lambda);
                (
                    fmt_g17(e1.abs().max(e2.abs())),
                    fmt_g17(pocs_three_lines_norm(theta, lambda)),
                )
            } else {
                (String::new(), String::new())
            };
            Ok(format!(
                "{kind},{},{},{},{},{cf_rho},{cf_norm}",
                fmt_g17(theta),
                fmt_g17(lambda),
                fmt_g17(b.spectral_radius),
                fmt_g17(b.operator_norm)
            ))
        })
        .collect();
    let mut out = format!("{THREE_LINES_HEADER}\n");
    let mut skips = Skips::default();
    for ((kind, theta, lambda), row) in items.iter().zip(rows) {
        match row {
            Ok(r) => {
                out.push_str(&r);
                out.push('\n');
            }
            Err(e) => skips.push(
                format!(
                    "{kind} theta={} lambda={}",
                    fmt_g17(*theta),
                    fmt_g17(*lambda)
                ),
                &e,
            ),
        }
    }
    skips.append_to(&mut out);
    Ok(out)
}
