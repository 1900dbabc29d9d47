//! Monte-Carlo estimates of the geometric definitions.
//!
//! Each geometric measure is an integral of `δ(A)²` over a family of test
//! sets `A` indexed by one or two uniform points. The oracle samples the
//! index points, counts members directly and never touches a kernel, so it is
//! an independent check on the closed forms.
//!
//! Intervals are half-open `[lo, hi)`, except that an upper end equal to 1 is
//! closed so that points on the far face of the cube are counted. On the
//! torus the coordinate 1 is identified with 0.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::raw_value;
use crate::kernels::KernelSpec;
use crate::measure::MeasureId;
use crate::point_set::{vertex_coordinate, PointSet};
use crate::sum::indexed_map;

/// Samples drawn per random stream. Each chunk has its own ChaCha stream, so
/// the estimate does not depend on how chunks are scheduled.
const CHUNK: usize = 1 << 14;

/// A Monte-Carlo mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(samples)`.
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

impl OracleEstimate {
    /// `|value - mean|` in units of the standard error.
    pub fn z_score(&self, value: f64) -> f64 {
        if self.stderr == 0.0 {
            if value == self.mean {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (value - self.mean).abs() / self.stderr
        }
    }

    /// Whether `value` lies within `k` standard errors of the mean.
    pub fn covers(&self, value: f64, k: f64) -> bool {
        self.z_score(value) < k
    }
}

/// Membership of one point in a test set, together with the set's volume.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Membership {
    pub inside: bool,
    pub volume: f64,
}

/// `(1/n) Σ_i 1{x_i ∈ A} - vol(A)`.
pub fn local_discrepancy<F: Fn(&[f64]) -> bool>(points: &PointSet, inside: F, volume: f64) -> f64 {
    let count = points.rows().filter(|x| inside(x)).count();
    count as f64 / points.len() as f64 - volume
}

#[inline]
fn in_interval(x: f64, lo: f64, hi: f64) -> bool {
    lo <= x && (x < hi || (hi == 1.0 && x == 1.0))
}

#[inline]
fn torus(x: f64) -> f64 {
    if x == 1.0 {
        0.0
    } else {
        x
    }
}

/// Whether `x` lies in the wrapped interval `W(a, b)`.
#[inline]
fn in_wrapped(x: f64, a: f64, b: f64) -> bool {
    let x = torus(x);
    if a <= b {
        a <= x && x < b
    } else {
        x < b || a <= x
    }
}

#[inline]
fn wrapped_length(a: f64, b: f64) -> f64 {
    if a <= b {
        b - a
    } else {
        1.0 - a + b
    }
}

/// Test-set membership for one measure.
///
/// `b` is the second corner for `ext` and `per` and must be absent
/// otherwise. For `ext`, a pair with `a ≰ b` indexes no box: the result is
/// `Ok(None)` and the pair contributes zero to the integral.
pub fn box_membership(measure: MeasureId, x: &[f64], a: &[f64], b: Option<&[f64]>) -> Result<Option<Membership>> {
    if !measure.has_geometric_oracle() {
        return Err(Error::NoGeometricDefinition(measure));
    }
    let d = a.len();
    for len in [Some(x.len()), b.map(<[f64]>::len)].into_iter().flatten() {
        if len != d {
            return Err(Error::DimensionMismatch { expected: d, found: len });
        }
    }
    let needs_b = matches!(measure, MeasureId::Ext | MeasureId::Per);
    let b = match (needs_b, b) {
        (true, Some(b)) => b,
        (false, None) => &[][..],
        (true, None) => return Err(Error::Config(format!("{measure} needs a second corner"))),
        (false, Some(_)) => return Err(Error::Config(format!("{measure} takes one corner"))),
    };
    if measure == MeasureId::Ext && a.iter().zip(b).any(|(lo, hi)| lo > hi) {
        return Ok(None);
    }
    let inside = point_in(measure, x, a, b);
    Ok(Some(Membership {
        inside,
        volume: volume(measure, a, b),
    }))
}

fn point_in(measure: MeasureId, x: &[f64], a: &[f64], b: &[f64]) -> bool {
    match measure {
        MeasureId::Star => x.iter().zip(a).all(|(&x, &a)| in_interval(x, 0.0, a)),
        MeasureId::Ext => x.iter().zip(a).zip(b).all(|((&x, &a), &b)| in_interval(x, a, b)),
        MeasureId::Per => x.iter().zip(a).zip(b).all(|((&x, &a), &b)| in_wrapped(x, a, b)),
        MeasureId::Ctr => x.iter().zip(a).all(|(&x, &a)| {
            if vertex_coordinate(a) == 1.0 {
                in_interval(x, a, 1.0)
            } else {
                in_interval(x, 0.0, a)
            }
        }),
        MeasureId::Cad => x.iter().zip(a).all(|(&x, &a)| {
            if a >= 0.5 {
                in_interval(x, 0.5, a)
            } else {
                in_interval(x, a, 0.5)
            }
        }),
        // x lies in rect(a, v) for the v with v_j = 1{x_j >= a_j}; the union
        // over even v contains x exactly when that v is even.
        MeasureId::Sym => x.iter().zip(a).filter(|(&x, &a)| x >= a).count() % 2 == 0,
        MeasureId::Mix | MeasureId::Asd | MeasureId::CtrWeighted | MeasureId::SymWeighted => {
            unreachable!("no single test set")
        }
    }
}

fn volume(measure: MeasureId, a: &[f64], b: &[f64]) -> f64 {
    match measure {
        MeasureId::Star => a.iter().product(),
        MeasureId::Ext => a.iter().zip(b).map(|(lo, hi)| hi - lo).product(),
        MeasureId::Per => a.iter().zip(b).map(|(&lo, &hi)| wrapped_length(lo, hi)).product(),
        MeasureId::Ctr => a.iter().map(|&t| (t - vertex_coordinate(t)).abs()).product(),
        MeasureId::Cad => a.iter().map(|&t| (t - 0.5).abs()).product(),
        MeasureId::Sym => even_orthant_volume(a),
        _ => unreachable!("no single test set"),
    }
}

/// `|O_e(a)| = (1 + Π_j (2 a_j - 1)) / 2`.
pub fn even_orthant_volume(a: &[f64]) -> f64 {
    (1.0 + a.iter().map(|&t| 2.0 * t - 1.0).product::<f64>()) / 2.0
}

/// `|O_e(a)|` summed over the even vertices directly; `2^{d-1}` terms.
pub fn even_orthant_volume_by_vertices(a: &[f64]) -> f64 {
    let d = a.len();
    (0u64..1 << d)
        .filter(|v| v.count_ones() % 2 == 0)
        .map(|v| {
            (0..d)
                .map(|j| if v >> j & 1 == 1 { 1.0 - a[j] } else { a[j] })
                .product::<f64>()
        })
        .fold(0.0, |acc, t| acc + t)
}

/// Running moments of one chunk: count, mean and sum of squared deviations.
#[derive(Clone, Copy)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn of(values: impl Iterator<Item = f64>) -> Self {
        let mut m = Moments {
            count: 0.0,
            mean: 0.0,
            m2: 0.0,
        };
        for v in values {
            m.count += 1.0;
            let delta = v - m.mean;
            m.mean += delta / m.count;
            m.m2 += delta * (v - m.mean);
        }
        m
    }

    fn merge(self, other: Moments) -> Moments {
        if other.count == 0.0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        Moments {
            count,
            mean: self.mean + delta * other.count / count,
            m2: self.m2 + other.m2 + delta * delta * self.count * other.count / count,
        }
    }
}

/// Draws `samples` values `f(rng)` over independent chunk streams and
/// combines them in chunk order.
fn estimate<F>(samples: usize, seed: u64, f: F) -> OracleEstimate
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync + Send,
{
    let chunks = samples.div_ceil(CHUNK);
    let parts = indexed_map(chunks, chunks > 1, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        let size = CHUNK.min(samples - c * CHUNK);
        Moments::of((0..size).map(|_| f(&mut rng)))
    });
    let total = parts.into_iter().fold(
        Moments {
            count: 0.0,
            mean: 0.0,
            m2: 0.0,
        },
        Moments::merge,
    );
    let variance = if total.count > 1.0 {
        total.m2 / (total.count - 1.0)
    } else {
        0.0
    };
    OracleEstimate {
        mean: total.mean,
        stderr: (variance / total.count).sqrt(),
        samples,
        seed,
    }
}

/// Estimates the geometric integral `∫ δ(A)²` for `measure` by sampling
/// test-set corners uniformly.
pub fn mc_squared_discrepancy(measure: MeasureId, points: &PointSet, samples: usize, seed: u64) -> Result<OracleEstimate> {
    if !measure.has_geometric_oracle() {
        return Err(Error::NoGeometricDefinition(measure));
    }
    if samples == 0 {
        return Err(Error::Config("samples must be positive".into()));
    }
    Ok(estimate(samples, seed, |rng| squared_local(measure, points, rng)))
}

/// `δ(A)²` for one random test set `A`.
///
/// For `asd` the test set is a star box after a uniformly chosen partial
/// reflection, which is the average over reflections written as an integral.
fn squared_local(measure: MeasureId, points: &PointSet, rng: &mut ChaCha8Rng) -> f64 {
    let d = points.dim();
    let a: Vec<f64> = (0..d).map(|_| rng.gen()).collect();
    let delta = if measure == MeasureId::Asd {
        let flip: Vec<bool> = (0..d).map(|_| rng.gen()).collect();
        let inside = |x: &[f64]| {
            x.iter()
                .zip(&a)
                .zip(&flip)
                .all(|((&x, &a), &f)| in_interval(if f { 1.0 - x } else { x }, 0.0, a))
        };
        local_discrepancy(points, inside, a.iter().product())
    } else {
        let two = matches!(measure, MeasureId::Ext | MeasureId::Per);
        let b: Vec<f64> = if two { (0..d).map(|_| rng.gen()).collect() } else { Vec::new() };
        if measure == MeasureId::Ext && a.iter().zip(&b).any(|(lo, hi)| lo > hi) {
            return 0.0;
        }
        local_discrepancy(points, |x| point_in(measure, x, &a, &b), volume(measure, &a, &b))
    };
    delta * delta
}

/// Mean squared discrepancy of `n` IID uniform points over `replications`
/// independent draws.
pub fn mc_expected_iid(spec: &KernelSpec, n: usize, replications: usize, seed: u64) -> Result<OracleEstimate> {
    if n == 0 || replications == 0 {
        return Err(Error::Config("n and replications must be positive".into()));
    }
    let d = spec.dim();
    Ok(estimate(replications, seed, |rng| {
        let coords: Vec<f64> = (0..n * d).map(|_| rng.gen()).collect();
        raw_value(spec, &PointSet::from_clamped(d, coords), false)
    }))
}

/// `E[D²]` for `n` IID uniform points, estimated from the geometric
/// definition alone: every sample draws a fresh point set and one test set,
/// so no closed form is involved.
pub fn mc_expected_iid_geometric(measure: MeasureId, n: usize, d: usize, samples: usize, seed: u64) -> Result<OracleEstimate> {
    if !measure.has_geometric_oracle() {
        return Err(Error::NoGeometricDefinition(measure));
    }
    if n == 0 || d == 0 || samples == 0 {
        return Err(Error::Config("n, d and samples must be positive".into()));
    }
    Ok(estimate(samples, seed, |rng| {
        let coords: Vec<f64> = (0..n * d).map(|_| rng.gen()).collect();
        squared_local(measure, &PointSet::from_clamped(d, coords), rng)
    }))
}
