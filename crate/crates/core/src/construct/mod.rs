//! Building point sets: greedy extension, multi-restart optimization and
//! cross-evaluation of the results.

mod crosseval;
mod greedy;
mod optimize;

use serde::{Deserialize, Serialize};

use crate::point_set::PointSet;

pub use crosseval::{cross_evaluate, RatioMatrix};
pub use greedy::{greedy_extend, GreedyConfig};
pub use optimize::{optimize, OptimizerConfig};

/// History of a construction run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    /// Best squared value seen so far, one entry per iteration (optimizer)
    /// or per step (greedy). Never increases.
    pub best: Vec<f64>,
    /// Squared value at each iteration or step, before taking the running
    /// minimum.
    pub values: Vec<f64>,
    /// Verified squared value of each restart's returned set.
    pub restart_values: Vec<f64>,
    /// Index of the restart whose set was returned.
    pub winner: usize,
    /// Objective evaluations across all restarts.
    pub evaluations: u64,
    #[serde(skip)]
    pub final_set: Option<PointSet>,
}

impl Trace {
    pub(crate) fn from_values(values: Vec<f64>) -> Self {
        let mut best = Vec::with_capacity(values.len());
        let mut low = f64::INFINITY;
        for &v in &values {
            low = low.min(v);
            best.push(low);
        }
        Trace {
            best,
            values,
            restart_values: Vec::new(),
            winner: 0,
            evaluations: 0,
            final_set: None,
        }
    }
}
