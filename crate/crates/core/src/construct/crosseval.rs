//! How sets optimized for one measure fare under the others.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::squared_discrepancy;
use crate::kernels::kernel_spec;
use crate::measure::MeasureId;
use crate::point_set::PointSet;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioMatrix {
    pub measures: Vec<MeasureId>,
    /// `roots[m][m2]`: root discrepancy under measure `m` of the set
    /// optimized for `m2`.
    pub roots: Vec<Vec<f64>>,
    /// `ratios[m][m2] = roots[m][m2] / roots[m][m]`.
    pub ratios: Vec<Vec<f64>>,
}

impl RatioMatrix {
    fn index(&self, m: MeasureId) -> Option<usize> {
        self.measures.iter().position(|&x| x == m)
    }

    /// Ratio for the set optimized for `optimized_for`, evaluated under `evaluated`.
    pub fn ratio(&self, evaluated: MeasureId, optimized_for: MeasureId) -> Option<f64> {
        Some(self.ratios[self.index(evaluated)?][self.index(optimized_for)?])
    }

    /// Smallest off-diagonal ratio.
    pub fn min_off_diagonal(&self) -> f64 {
        let mut low = f64::INFINITY;
        for (i, row) in self.ratios.iter().enumerate() {
            for (j, &r) in row.iter().enumerate() {
                if i != j {
                    low = low.min(r);
                }
            }
        }
        low
    }
}

/// Evaluates each set in `sets` under each of `measures`. Every listed
/// measure needs a set, and all sets must share a dimension.
pub fn cross_evaluate(sets: &BTreeMap<MeasureId, PointSet>, measures: &[MeasureId]) -> Result<RatioMatrix> {
    let chosen: Vec<&PointSet> = measures
        .iter()
        .map(|m| sets.get(m).ok_or_else(|| Error::Config(format!("no set optimized for {m}"))))
        .collect::<Result<_>>()?;
    let d = chosen.first().map(|s| s.dim()).ok_or(Error::EmptyPointSet)?;
    let mut roots = Vec::with_capacity(measures.len());
    for &m in measures {
        let spec = kernel_spec(m, d, None)?;
        let row = chosen
            .iter()
            .map(|set| squared_discrepancy(&spec, set).map(|v| v.root()))
            .collect::<Result<Vec<_>>>()?;
        roots.push(row);
    }
    let ratios = roots
        .iter()
        .enumerate()
        .map(|(i, row)| row.iter().map(|&r| if i < row.len() { r / row[i] } else { f64::NAN }).collect())
        .collect();
    Ok(RatioMatrix {
        measures: measures.to_vec(),
        roots,
        ratios,
    })
}
