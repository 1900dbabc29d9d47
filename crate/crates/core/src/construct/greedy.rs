//! Greedy extension: grid search for the next point (or batch of points),
//! then compass pattern search around the winner.

use crate::error::{Error, Result};
use crate::evaluator::{batch_value, squared_discrepancy};
use crate::generators::lattice;
use crate::kernels::KernelSpec;
use crate::point_set::PointSet;
use crate::sum::indexed_map;

use super::Trace;

/// Largest candidate grid accepted, in points.
const MAX_GRID: usize = 1 << 22;
/// Candidate counts from which grid scans run in parallel.
const PARALLEL_CANDIDATES: usize = 512;
/// Passes of cyclic re-selection inside a batch.
const BATCH_SWEEPS: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct GreedyConfig {
    /// Points added per step.
    pub batch: usize,
    /// Candidates are the `k^d` lattice points `c / (k - 1)`.
    pub grid_k: usize,
    /// First pattern-search step; `None` means half the grid spacing.
    pub initial_step: Option<f64>,
    pub shrink: f64,
    pub min_step: f64,
    /// Objective evaluations allowed for refinement in one step. The grid
    /// scan is not counted against it.
    pub refine_budget: u64,
}

impl Default for GreedyConfig {
    fn default() -> Self {
        GreedyConfig {
            batch: 1,
            grid_k: 101,
            initial_step: None,
            shrink: 0.5,
            min_step: 1e-9,
            refine_budget: 10_000,
        }
    }
}

impl GreedyConfig {
    fn validate(&self, d: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.batch == 0 {
            return bad("batch must be positive".into());
        }
        if self.grid_k < 2 {
            return bad("grid resolution must be at least 2".into());
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return bad("shrink factor must be in (0, 1)".into());
        }
        let positive = |s: f64| s > 0.0 && s.is_finite();
        if !positive(self.min_step) || self.initial_step.is_some_and(|s| !positive(s)) {
            return bad("pattern-search steps must be positive".into());
        }
        let count = u32::try_from(d).ok().and_then(|d| self.grid_k.checked_pow(d));
        if count.map_or(true, |c| c > MAX_GRID) {
            return bad(format!("{}^{d} candidates is too many; lower the grid resolution", self.grid_k));
        }
        Ok(())
    }

    fn first_step(&self) -> f64 {
        self.initial_step.unwrap_or(0.5 / (self.grid_k - 1) as f64)
    }
}

/// Appends `steps` batches to `points`. Each batch minimizes the exact
/// batch contribution, so the result also minimizes the extended squared
/// discrepancy among the candidates tried. Ties go to the earlier grid
/// point. Works for every measure; kinks and jumps only affect how far the
/// pattern search gets.
pub fn greedy_extend(spec: &KernelSpec, points: &PointSet, steps: usize, cfg: &GreedyConfig) -> Result<(PointSet, Trace)> {
    let d = points.dim();
    if d != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: d,
        });
    }
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    cfg.validate(d)?;
    let grid = lattice(cfg.grid_k, d)?;
    let mut current = points.clone();
    let mut values = Vec::with_capacity(steps);
    let mut evaluations = 0;
    for _ in 0..steps {
        let (ys, used) = next_batch(spec, &current, &grid, cfg);
        evaluations += used;
        current = current.with_points(ys.chunks_exact(d))?;
        values.push(squared_discrepancy(spec, &current)?.value);
    }
    let mut trace = Trace::from_values(values);
    trace.restart_values = vec![trace.values.last().copied().unwrap_or(squared_discrepancy(spec, points)?.value)];
    trace.evaluations = evaluations;
    trace.final_set = Some(current.clone());
    Ok((current, trace))
}

fn next_batch(spec: &KernelSpec, points: &PointSet, grid: &PointSet, cfg: &GreedyConfig) -> (Vec<f64>, u64) {
    let d = points.dim();
    let b = cfg.batch;
    let mut evaluations = 0;
    let mut ys: Vec<f64> = Vec::with_capacity(b * d);
    for k in 0..b {
        ys.extend_from_slice(grid.row(0));
        let (pick, _) = scan(spec, points, grid, &ys, k);
        ys[k * d..].copy_from_slice(grid.row(pick));
        evaluations += grid.len() as u64;
    }
    if b > 1 {
        for _ in 0..BATCH_SWEEPS {
            let mut moved = false;
            for k in 0..b {
                let here = batch_value(spec, points, &ys);
                let (pick, value) = scan(spec, points, grid, &ys, k);
                evaluations += grid.len() as u64 + 1;
                if value < here {
                    ys[k * d..(k + 1) * d].copy_from_slice(grid.row(pick));
                    moved = true;
                }
            }
            if !moved {
                break;
            }
        }
    }
    evaluations += refine(spec, points, &mut ys, cfg);
    (ys, evaluations)
}

/// Best grid point for slot `k` of the batch `ys`, the other slots fixed.
fn scan(spec: &KernelSpec, points: &PointSet, grid: &PointSet, ys: &[f64], k: usize) -> (usize, f64) {
    let d = points.dim();
    let scores = indexed_map(grid.len(), grid.len() >= PARALLEL_CANDIDATES, |c| {
        let mut trial = ys.to_vec();
        trial[k * d..(k + 1) * d].copy_from_slice(grid.row(c));
        batch_value(spec, points, &trial)
    });
    argmin(&scores)
}

fn argmin(scores: &[f64]) -> (usize, f64) {
    let mut best = (0, scores[0]);
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s < best.1 {
            best = (i, s);
        }
    }
    best
}

/// Compass search over all batch coordinates: try `±step` along each axis,
/// take the best improving move, otherwise shrink the step.
fn refine(spec: &KernelSpec, points: &PointSet, ys: &mut [f64], cfg: &GreedyConfig) -> u64 {
    let mut current = batch_value(spec, points, ys);
    let mut evaluations = 1;
    let mut step = cfg.first_step();
    let moves = ys.len();
    while step >= cfg.min_step && evaluations < cfg.refine_budget {
        let scores = indexed_map(2 * moves, false, |m| {
            let mut trial = ys.to_vec();
            let (axis, sign) = (m / 2, if m % 2 == 0 { -1.0 } else { 1.0 });
            trial[axis] = (trial[axis] + sign * step).clamp(0.0, 1.0);
            if trial[axis] == ys[axis] {
                f64::INFINITY
            } else {
                batch_value(spec, points, &trial)
            }
        });
        evaluations += scores.len() as u64;
        let (m, value) = argmin(&scores);
        if value < current {
            let (axis, sign) = (m / 2, if m % 2 == 0 { -1.0 } else { 1.0 });
            ys[axis] = (ys[axis] + sign * step).clamp(0.0, 1.0);
            current = value;
        } else {
            step *= cfg.shrink;
        }
    }
    evaluations
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::contribution;
    use crate::generators::iid_uniform;
    use crate::kernels::kernel_spec;
    use crate::measure::MeasureId;

    fn grid_only(k: usize) -> GreedyConfig {
        GreedyConfig {
            grid_k: k,
            refine_budget: 0,
            ..GreedyConfig::default()
        }
    }

    #[test]
    fn centered_next_point_ties_along_the_center_cross() {
        // From the center, F vanishes whenever one coordinate is 1/2, so the
        // center is optimal but shares the minimum with 200 other grid points.
        let spec = kernel_spec(MeasureId::Ctr, 2, None).unwrap();
        let start = PointSet::new(2, vec![0.5, 0.5]).unwrap();
        let grid = lattice(101, 2).unwrap();
        let f: Vec<f64> = grid.rows().map(|y| contribution(&spec, &start, y)).collect();
        let (_, low) = argmin(&f);
        assert_eq!(low, 0.0);
        assert_eq!(contribution(&spec, &start, &[0.5, 0.5]), 0.0);
        assert_eq!(f.iter().filter(|&&v| v == low).count(), 201);
        let (set, _) = greedy_extend(&spec, &start, 1, &GreedyConfig::default()).unwrap();
        assert_eq!(contribution(&spec, &start, set.row(1)), 0.0);
        assert!(set.row(1).contains(&0.5));
    }

    #[test]
    fn grid_pick_is_the_brute_force_argmin() {
        for m in [MeasureId::Star, MeasureId::Asd, MeasureId::Per, MeasureId::Cad] {
            for (start, d) in [(PointSet::new(1, vec![0.5]).unwrap(), 1), (iid_uniform(5, 2, 3).unwrap(), 2)] {
                let spec = kernel_spec(m, d, None).unwrap();
                let grid = lattice(21, d).unwrap();
                let full: Vec<f64> = grid
                    .rows()
                    .map(|y| squared_discrepancy(&spec, &start.with_point(y).unwrap()).unwrap().value)
                    .collect();
                let (brute, _) = argmin(&full);
                let (set, _) = greedy_extend(&spec, &start, 1, &grid_only(21)).unwrap();
                let picked = set.row(start.len());
                let f_pick = contribution(&spec, &start, picked);
                let f_brute = contribution(&spec, &start, grid.row(brute));
                assert!((f_pick - f_brute).abs() < 1e-12, "{m}: {picked:?} vs {:?}", grid.row(brute));
            }
        }
    }

    #[test]
    fn star_single_point_in_one_dimension() {
        // After refinement the pick is a local minimizer of F to within the final step.
        let spec = kernel_spec(MeasureId::Star, 1, None).unwrap();
        let start = PointSet::new(1, vec![0.5]).unwrap();
        let (set, trace) = greedy_extend(&spec, &start, 1, &GreedyConfig::default()).unwrap();
        let y = set.get(1, 0);
        let f = |t: f64| contribution(&spec, &start, &[t]);
        assert!(f(y) <= f((y - 1e-6).max(0.0)) + 1e-15 && f(y) <= f((y + 1e-6).min(1.0)) + 1e-15);
        assert_eq!(trace.values.len(), 1);
    }

    #[test]
    fn batches_interact_and_traces_are_monotone() {
        let spec = kernel_spec(MeasureId::Star, 2, None).unwrap();
        let start = PointSet::new(2, vec![0.5, 0.5]).unwrap();
        let cfg = GreedyConfig {
            batch: 4,
            grid_k: 17,
            ..GreedyConfig::default()
        };
        let (set, trace) = greedy_extend(&spec, &start, 3, &cfg).unwrap();
        assert_eq!(set.len(), 13);
        assert!(trace.best.windows(2).all(|w| w[1] <= w[0]));
        let (again, trace2) = greedy_extend(&spec, &start, 3, &cfg).unwrap();
        assert_eq!(set, again);
        assert_eq!(trace, trace2);
        // The four points of a batch are distinct.
        let first: Vec<&[f64]> = (1..5).map(|i| set.row(i)).collect();
        for i in 0..4 {
            for j in i + 1..4 {
                assert_ne!(first[i], first[j]);
            }
        }
    }

    #[test]
    fn refinement_never_hurts() {
        let spec = kernel_spec(MeasureId::Mix, 2, None).unwrap();
        let start = iid_uniform(6, 2, 11).unwrap();
        let (coarse, _) = greedy_extend(&spec, &start, 1, &grid_only(9)).unwrap();
        let cfg = GreedyConfig {
            grid_k: 9,
            ..GreedyConfig::default()
        };
        let (fine, _) = greedy_extend(&spec, &start, 1, &cfg).unwrap();
        let v = |s: &PointSet| squared_discrepancy(&spec, s).unwrap().value;
        assert!(v(&fine) <= v(&coarse));
    }

    #[test]
    fn config_is_validated() {
        let spec = kernel_spec(MeasureId::Star, 2, None).unwrap();
        let start = PointSet::new(2, vec![0.5, 0.5]).unwrap();
        for cfg in [
            GreedyConfig { grid_k: 1, ..GreedyConfig::default() },
            GreedyConfig { shrink: 1.0, ..GreedyConfig::default() },
            GreedyConfig { batch: 0, ..GreedyConfig::default() },
        ] {
            assert!(greedy_extend(&spec, &start, 1, &cfg).is_err());
        }
    }
}
