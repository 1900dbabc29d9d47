//! Projected gradient descent with momentum and restarts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::evaluator::{squared_discrepancy, value_grad_serial, GradScratch};
use crate::generators::iid_uniform;
use crate::kernels::KernelSpec;
use crate::point_set::PointSet;
use crate::sum::indexed_map;

use super::Trace;

/// Iterations between convergence checks.
const WINDOW: usize = 5000;
/// Iterations without progress that end one descent.
const STALL: usize = 200;
/// Uniform jitter half-width, in units of the typical spacing `n^(-1/d)`.
const HOP_SCALE: f64 = 0.25;
const SECOND_MOMENT: f64 = 0.999;
const EPS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub iterations: usize,
    /// Initial step; `None` means `0.05 / sqrt(d)`.
    pub step: Option<f64>,
    /// Factor applied to the step every `decay_every` iterations.
    pub decay: f64,
    pub decay_every: usize,
    pub momentum: f64,
    pub seed: u64,
    /// A restart stops once its best value improved by less than this
    /// fraction over the last 5000 iterations.
    pub tolerance: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 20,
            iterations: 50_000,
            step: None,
            decay: 0.98,
            decay_every: 100,
            momentum: 0.9,
            seed: 0,
            tolerance: 1e-9,
        }
    }
}

impl OptimizerConfig {
    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.into()));
        if self.restarts == 0 || self.iterations == 0 || self.decay_every == 0 {
            return bad("restarts, iterations and decay interval must be positive");
        }
        if self.step.is_some_and(|s| !(s > 0.0 && s.is_finite())) {
            return bad("step must be positive");
        }
        if !(self.decay > 0.0 && self.decay <= 1.0) {
            return bad("decay must be in (0, 1]");
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return bad("momentum must be in [0, 1)");
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return bad("tolerance must be positive");
        }
        Ok(())
    }
}

struct Run {
    set: PointSet,
    value: f64,
    values: Vec<f64>,
    evaluations: u64,
}

/// Minimizes the squared discrepancy of `spec` over sets of `init.len()`
/// points. Restart 0 starts from `init`, restart `r > 0` from IID points
/// drawn with seed `cfg.seed + r`. Within a restart, each descent runs until
/// it stalls; the best set so far is then perturbed (one point moved, or all
/// points jittered) and descent resumes with fresh momentum. The returned set has the lowest verified
/// value, ties going to the lower restart index.
pub fn optimize(spec: &KernelSpec, init: &PointSet, cfg: &OptimizerConfig) -> Result<(PointSet, Trace)> {
    if !spec.is_continuous() {
        return Err(Error::NotDifferentiable(spec.measure()));
    }
    if init.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: init.dim(),
        });
    }
    cfg.validate()?;
    let (n, d) = (init.len(), init.dim());
    let runs: Vec<Result<Run>> = indexed_map(cfg.restarts, cfg.restarts > 1, |r| {
        let start = if r == 0 {
            init.clone()
        } else {
            iid_uniform(n, d, cfg.seed.wrapping_add(r as u64))?
        };
        descend(spec, start, r, cfg)
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let mut winner = 0;
    for (r, run) in runs.iter().enumerate() {
        if run.value < runs[winner].value {
            winner = r;
        }
    }
    let restart_values = runs.iter().map(|r| r.value).collect();
    let evaluations = runs.iter().map(|r| r.evaluations).sum();
    let run = runs.into_iter().nth(winner).expect("winner index in range");
    let mut trace = Trace::from_values(run.values);
    trace.restart_values = restart_values;
    trace.winner = winner;
    trace.evaluations = evaluations;
    trace.final_set = Some(run.set.clone());
    Ok((run.set, trace))
}

fn descend(spec: &KernelSpec, start: PointSet, restart: usize, cfg: &OptimizerConfig) -> Result<Run> {
    let d = start.dim();
    let n = start.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(restart as u64);
    let jitter = HOP_SCALE * (n as f64).powf(-1.0 / d as f64);
    let mut x = start.into_coords();
    let len = x.len();
    let mut grad = vec![0.0; len];
    let mut first = vec![0.0; len];
    let mut second = vec![0.0; len];
    let mut scratch = GradScratch::new(d);
    let mut best_x = x.clone();
    let mut best = f64::INFINITY;
    let mut values = Vec::with_capacity(cfg.iterations);
    let initial_step = cfg.step.unwrap_or(0.05 / (d as f64).sqrt());
    let mut checkpoint = f64::INFINITY;
    let mut it = 0;
    let mut hops = 0u64;
    'outer: while it < cfg.iterations {
        // One descent from `x` with fresh momentum.
        first.fill(0.0);
        second.fill(0.0);
        let (mut bias1, mut bias2) = (1.0, 1.0);
        let mut local = f64::INFINITY;
        let mut local_x = x.clone();
        let mut last_gain = it;
        while it < cfg.iterations && it - last_gain < STALL {
            let value = value_grad_serial(spec, &x, d, &mut grad, &mut scratch);
            values.push(value);
            if value < local {
                if value < local - 1e-12 * value.abs() {
                    last_gain = it;
                }
                local = value;
                local_x.copy_from_slice(&x);
            }
            if local < best {
                best = local;
                best_x.copy_from_slice(&local_x);
            }
            it += 1;
            if it % WINDOW == 0 {
                if checkpoint.is_finite() && checkpoint - best <= cfg.tolerance * checkpoint.abs() {
                    break 'outer;
                }
                checkpoint = best;
            }
            let step = initial_step * cfg.decay.powi((it / cfg.decay_every) as i32);
            bias1 *= cfg.momentum;
            bias2 *= SECOND_MOMENT;
            for i in 0..len {
                let g = grad[i];
                first[i] = cfg.momentum * first[i] + (1.0 - cfg.momentum) * g;
                second[i] = SECOND_MOMENT * second[i] + (1.0 - SECOND_MOMENT) * g * g;
                let m = first[i] / (1.0 - bias1);
                let v = second[i] / (1.0 - bias2);
                x[i] = (x[i] - step * m / (v.sqrt() + EPS)).clamp(0.0, 1.0);
            }
        }
        // Hop: perturb the best set found so far.
        hops += 1;
        x.copy_from_slice(&best_x);
        if hops % 2 == 1 {
            let i = rng.gen_range(0..n);
            for c in &mut x[i * d..(i + 1) * d] {
                *c = rng.gen::<f64>();
            }
        } else {
            for c in &mut x {
                *c = (*c + jitter * (2.0 * rng.gen::<f64>() - 1.0)).clamp(0.0, 1.0);
            }
        }
    }
    let evaluations = values.len() as u64;
    let set = PointSet::from_clamped(d, best_x);
    let value = squared_discrepancy(spec, &set)?.value;
    Ok(Run {
        set,
        value,
        values,
        evaluations,
    })
}
