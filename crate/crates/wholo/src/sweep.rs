//! Parallel verification over parameter tuples.
//!
//! Tasks are independent; results come back in the order of the (sorted)
//! input so output is reproducible regardless of scheduling.

use rayon::prelude::*;
use wholo_core::congruence::{verify_jmo, verify_main_theorem};
use wholo_core::{CongruenceReport, JmoParams, Result, TheoremParams};

/// A tuple to verify.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Task {
    Main(TheoremParams),
    Jmo(JmoParams),
}

impl Task {
    pub fn run(&self, h_prec: Option<i64>) -> Result<CongruenceReport> {
        match self {
            Task::Main(p) => verify_main_theorem(p, h_prec),
            Task::Jmo(p) => verify_jmo(p),
        }
    }
}

/// Sorts and dedups `tasks`, then verifies them in parallel.
pub fn run_all(mut tasks: Vec<Task>, h_prec: Option<i64>) -> Vec<(Task, Result<CongruenceReport>)> {
    tasks.sort();
    tasks.dedup();
    tasks.into_par_iter().map(|t| (t, t.run(h_prec))).collect()
}
