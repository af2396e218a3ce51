//! Experiment configuration: defaults, a flat `key=value` file format and
//! command-line overrides.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use projsplit_core::{Error, Result, SchemeKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Exp1,
    Exp2,
    Exp3,
    ThreeLines,
    Solve,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Exp1 => "exp1",
            Experiment::Exp2 => "exp2",
            Experiment::Exp3 => "exp3",
            Experiment::ThreeLines => "three-lines",
            Experiment::Solve => "solve",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exp1" => Ok(Experiment::Exp1),
            "exp2" => Ok(Experiment::Exp2),
            "exp3" => Ok(Experiment::Exp3),
            "three-lines" | "three_lines" => Ok(Experiment::ThreeLines),
            "solve" => Ok(Experiment::Solve),
            other => Err(Error::InvalidArgument(format!(
                "unknown experiment `{other}`"
            ))),
        }
    }
}

/// Fixed relaxation per algorithm for the convergence-plot experiment.
pub fn exp3_lambda(kind: SchemeKind) -> f64 {
    match kind {
        SchemeKind::Ryu => 0.99,
        SchemeKind::MalitskyTam => 0.97,
        SchemeKind::Campoy => 0.57,
        SchemeKind::Pocs => 0.99,
    }
}

/// Iterations in the convergence-plot experiment.
pub const EXP3_ITERATIONS: usize = 150;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub d: usize,
    pub subspace_dims: Vec<usize>,
    pub n_instances: usize,
    pub n_starts: usize,
    pub lambda_grid: Vec<f64>,
    pub theta_grid: Vec<f64>,
    pub epsilon: f64,
    pub max_iters: usize,
    pub algorithms: Vec<SchemeKind>,
    pub output_path: Option<PathBuf>,
}

/// `1 + ceil(2d/3)`, capped at `d`.
pub fn default_subspace_dim(d: usize) -> usize {
    (1 + (2 * d).div_ceil(3)).min(d)
}

/// `start + i·step` for `i = 0, 1, …` up to `end` (inclusive, with a
/// half-step tolerance).
pub fn linear_grid(start: f64, step: f64, end: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !start.is_finite() || !end.is_finite() || end < start {
        return Err(Error::InvalidArgument(format!(
            "bad grid {start}:{step}:{end}"
        )));
    }
    let count = ((end - start) / step + 0.5).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

/// `0.01·k` for `k = 1..=last`.
pub fn hundredths(last: usize) -> Vec<f64> {
    (1..=last).map(|k| k as f64 / 100.0).collect()
}

/// Parses `start:step:end` or a comma-separated list. Entries may use `pi`
/// as a factor, as in `pi/12`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    let parts: Vec<&str> = text.split(':').collect();
    let grid = if parts.len() == 3 {
        linear_grid(
            parse_real(parts[0])?,
            parse_real(parts[1])?,
            parse_real(parts[2])?,
        )?
    } else if parts.len() == 1 {
        text.split(',')
            .map(parse_real)
            .collect::<Result<Vec<_>>>()?
    } else {
        return Err(Error::InvalidArgument(format!("bad grid `{text}`")));
    };
    check_grid(&grid)?;
    Ok(grid)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// A real number, optionally written with `pi`: `0.5`, `pi/6`, `5pi/12`,
/// `4/3`.
pub fn parse_real(text: &str) -> Result<f64> {
    let t = text.trim().to_ascii_lowercase();
    let bad = || Error::InvalidArgument(format!("cannot parse `{text}` as a number"));
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (
            n.trim().to_string(),
            d.trim().parse::<f64>().map_err(|_| bad())?,
        ),
        None => (t.clone(), 1.0),
    };
    let value = if let Some(coef) = num.strip_suffix("pi") {
        let coef = coef.trim().trim_end_matches('*');
        let c = if coef.is_empty() {
            1.0
        } else {
            coef.parse::<f64>().map_err(|_| bad())?
        };
        c * PI
    } else {
        num.parse::<f64>().map_err(|_| bad())?
    };
    let v = value / den;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

pub fn parse_list<T: FromStr>(text: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|_| Error::InvalidArgument(format!("bad list entry `{s}`")))
        })
        .collect()
}

fn parse_bool(text: &str) -> Result<bool> {
    match text.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(Error::InvalidArgument(format!("bad boolean `{other}`"))),
    }
}

impl ExperimentConfig {
    /// Desk-scale defaults for `experiment`.
    pub fn new(experiment: Experiment) -> Self {
        let d = 6;
        let lambda_grid = match experiment {
            Experiment::Exp1 => hundredths(110),
            Experiment::Exp2 => hundredths(199),
            Experiment::ThreeLines => vec![0.25, 0.5, 0.75, 1.0, 4.0 / 3.0],
            Experiment::Exp3 | Experiment::Solve => vec![0.5],
        };
        Self {
            experiment,
            seed: 2022,
            d,
            subspace_dims: vec![default_subspace_dim(d); 3],
            n_instances: 100,
            n_starts: 100,
            lambda_grid,
            theta_grid: (1..=5).map(|k| k as f64 * PI / 12.0).collect(),
            epsilon: 1e-6,
            max_iters: 10_000,
            algorithms: SchemeKind::ALL.to_vec(),
            output_path: None,
        }
    }

    /// Instance counts used in the source experiments: 1000 instances for
    /// the bound sweep, 100 instances × 100 starts for the others.
    pub fn paper_scale(&mut self) {
        self.n_instances = match self.experiment {
            Experiment::Exp1 => 1000,
            _ => 100,
        };
        self.n_starts = 100;
    }

    /// Applies one `key=value` setting. Keys match the long flag names;
    /// `_` and `-` are interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('_', "-");
        match key.as_str() {
            "seed" => self.seed = parse_scalar(value)?,
            "dim" | "d" => {
                self.d = parse_scalar(value)?;
                self.subspace_dims = vec![default_subspace_dim(self.d); 3];
            }
            "subspace-dims" => self.subspace_dims = parse_list(value)?,
            "instances" => self.n_instances = parse_scalar(value)?,
            "starts" => self.n_starts = parse_scalar(value)?,
            "lambda-grid" => self.lambda_grid = parse_grid(value)?,
            "theta-grid" => self.theta_grid = parse_grid(value)?,
            "epsilon" => self.epsilon = parse_real(value)?,
            "max-iters" => self.max_iters = parse_scalar(value)?,
            "algorithms" => self.algorithms = parse_list(value)?,
            "out" => self.output_path = Some(PathBuf::from(value.trim())),
            "paper-scale" => {
                if parse_bool(value)? {
                    self.paper_scale();
                }
            }
            "experiment" => {}
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown config key `{other}`"
                )))
            }
        }
        Ok(())
    }

    /// Reads a flat `key=value` file; blank lines and `#` comments are
    /// skipped.
    pub fn load_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: format!("expected key=value, got `{line}`"),
            })?;
            self.set(k, v).map_err(|e| Error::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.d == 0 {
            return bad("dimension must be positive".into());
        }
        if self.subspace_dims.len() < 3 {
            return bad("need at least three subspaces".into());
        }
        if let Some(k) = self.subspace_dims.iter().find(|&&k| k == 0 || k > self.d) {
            return bad(format!("subspace dimension {k} outside 1..={}", self.d));
        }
        if self.n_instances == 0 || self.n_starts == 0 || self.max_iters == 0 {
            return bad("instances, starts and max-iters must be positive".into());
        }
        if !(self.epsilon > 0.0) {
            return bad("epsilon must be positive".into());
        }
        if self.algorithms.is_empty() {
            return bad("no algorithms selected".into());
        }
        check_grid(&self.lambda_grid)?;
        if self.lambda_grid[0] <= 0.0 {
            return bad("lambda must be positive".into());
        }
        check_grid(&self.theta_grid)?;
        if self.theta_grid.iter().any(|&t| t <= 0.0 || t >= PI / 2.0) {
            return bad("theta must lie strictly between 0 and pi/2".into());
        }
        Ok(())
    }

    /// Algorithms that accept the configured number of subspaces.
    pub fn active_algorithms(&self) -> Vec<SchemeKind> {
        let n = self.subspace_dims.len();
        self.algorithms
            .iter()
            .copied()
            .filter(|k| k.supports(n))
            .collect()
    }
}

fn parse_scalar<T: FromStr>(text: &str) -> Result<T> {
    text.trim()
        .parse::<T>()
        .map_err(|_| Error::InvalidArgument(format!("cannot parse `{}`", text.trim())))
}
