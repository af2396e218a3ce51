//! Experiment harness for `projsplit-core`: seeded random instances,
//! parameter sweeps with median/min/max aggregation, and CSV output.

pub mod config;
pub mod experiments;
pub mod instance;
pub mod solve;
pub mod stats;

pub use config::{Experiment, ExperimentConfig};
pub use experiments::{
    run_exp1, run_exp2, run_exp3, run_experiment, run_three_lines, EXP1_HEADER, EXP2_HEADER,
    EXP3_HEADER, THREE_LINES_HEADER,
};
pub use instance::{random_instance, random_start, InstanceRecord};
pub use solve::{run_solve, solve, SolveRequest, SolveResult};
pub use stats::{Stat, Summary};
