//! Generic `O(d n²)` evaluation of every measure from its kernel triple.
//!
//! The pair sum visits each unordered pair once. For row `i` the partial sum
//! is `C(x_i, x_i) + 2 Σ_{i' > i} C(x_i, x_i')`, with `i'` ascending; the row
//! partials are then added in ascending `i`. That order is the same whether
//! rows are processed on one thread or many.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::measure::{MeasureId, SquaredDiscrepancy};
use crate::point_set::PointSet;
use crate::sum::{indexed_map, indexed_sum, PARALLEL_ROWS};

/// Largest dimension accepted by [`asd_by_reflection`].
pub const MAX_REFLECTION_DIM: usize = 20;

/// `∂(squared discrepancy)/∂x_ij`, stored row-major like the point set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientMatrix {
    n: usize,
    d: usize,
    entries: Vec<f64>,
}

impl GradientMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.d + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.d..(i + 1) * self.d]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, g| m.max(g.abs()))
    }
}

fn check_dim(spec: &KernelSpec, dim: usize) -> Result<()> {
    if spec.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: dim,
        });
    }
    Ok(())
}

/// `Π_j B_j(x_j)`, stopping at an exact zero factor.
#[inline]
pub(crate) fn point_product(spec: &KernelSpec, x: &[f64]) -> f64 {
    let mut p = 1.0;
    for (j, &xj) in x.iter().enumerate() {
        p *= spec.point_unchecked(j, xj);
        if p == 0.0 {
            break;
        }
    }
    p
}

/// `Π_j C_j(x_j, z_j)`, stopping at an exact zero factor.
#[inline]
pub(crate) fn pair_product(spec: &KernelSpec, x: &[f64], z: &[f64]) -> f64 {
    let mut p = 1.0;
    for (j, (&xj, &zj)) in x.iter().zip(z).enumerate() {
        p *= spec.pair(j, xj, zj);
        if p == 0.0 {
            break;
        }
    }
    p
}

/// Squared discrepancy of `points` under `spec`.
pub fn squared_discrepancy(spec: &KernelSpec, points: &PointSet) -> Result<SquaredDiscrepancy> {
    check_dim(spec, points.dim())?;
    Ok(SquaredDiscrepancy {
        measure: spec.measure(),
        value: raw_value(spec, points, points.len() >= PARALLEL_ROWS),
        n: points.len(),
        d: points.dim(),
    })
}

pub(crate) fn raw_value(spec: &KernelSpec, points: &PointSet, parallel: bool) -> f64 {
    let n = points.len();
    let nf = n as f64;
    let pairs = indexed_sum(n, parallel, |i| {
        let xi = points.row(i);
        let mut off = 0.0;
        for k in i + 1..n {
            off += pair_product(spec, xi, points.row(k));
        }
        pair_product(spec, xi, xi) + 2.0 * off
    });
    let mut value = spec.constant();
    if spec.has_point_term() {
        let points_sum = indexed_sum(n, parallel, |i| point_product(spec, points.row(i)));
        value -= 2.0 / nf * points_sum;
    }
    value + pairs / (nf * nf)
}

/// The average squared discrepancy computed from its definition: the star
/// discrepancy averaged over all `2^d` partial reflections. Meant as a check
/// on the closed form, so it refuses `d > 20`.
pub fn asd_by_reflection(points: &PointSet) -> Result<SquaredDiscrepancy> {
    let d = points.dim();
    if d > MAX_REFLECTION_DIM {
        return Err(Error::TooManyReflections {
            dim: d,
            limit: MAX_REFLECTION_DIM,
        });
    }
    let star = KernelSpec::new(MeasureId::Star, d, None)?;
    let parallel = points.len() >= PARALLEL_ROWS;
    let mut keep = vec![false; d];
    let mut total = 0.0;
    for mask in 0u32..1 << d {
        for (j, k) in keep.iter_mut().enumerate() {
            *k = mask >> j & 1 == 1;
        }
        total += raw_value(&star, &points.reflect_mask(&keep), parallel);
    }
    Ok(SquaredDiscrepancy {
        measure: MeasureId::Asd,
        value: total / f64::from(1u32 << d),
        n: points.len(),
        d,
    })
}

/// Analytic gradient of the squared discrepancy with respect to every
/// coordinate. At kinks of `|·|` the subderivative 0 is taken; where `max`
/// or `min` ties, the mean of the one-sided derivatives.
pub fn gradient(spec: &KernelSpec, points: &PointSet) -> Result<GradientMatrix> {
    value_and_gradient(spec, points).map(|(_, g)| g)
}

/// Value and gradient from one pass over the pairs.
pub fn value_and_gradient(spec: &KernelSpec, points: &PointSet) -> Result<(SquaredDiscrepancy, GradientMatrix)> {
    check_dim(spec, points.dim())?;
    if !spec.is_continuous() {
        return Err(Error::NotDifferentiable(spec.measure()));
    }
    let (n, d) = (points.len(), points.dim());
    let nf = n as f64;
    let parallel = n >= PARALLEL_ROWS;
    let rows: Vec<(f64, f64, Vec<f64>)> = indexed_map(n, parallel, |i| row_terms(spec, points, i));

    let mut value = spec.constant();
    let mut point_sum = 0.0;
    let mut pair_sum = 0.0;
    let mut entries = Vec::with_capacity(n * d);
    for (p, c, g) in rows {
        point_sum += p;
        pair_sum += c;
        entries.extend(g);
    }
    if spec.has_point_term() {
        value -= 2.0 / nf * point_sum;
    }
    value += pair_sum / (nf * nf);
    let sq = SquaredDiscrepancy {
        measure: spec.measure(),
        value,
        n,
        d,
    };
    Ok((sq, GradientMatrix { n, d, entries }))
}

/// Per-row contributions: `Π B(x_i)`, the row's share of the pair sum under
/// the upper-triangle order, and the gradient row.
fn row_terms(spec: &KernelSpec, points: &PointSet, i: usize) -> (f64, f64, Vec<f64>) {
    let (n, d) = (points.len(), points.dim());
    let nf = n as f64;
    let xi = points.row(i);
    let mut grad = vec![0.0; d];
    let mut vals = vec![0.0; d];
    let mut slopes = vec![0.0; d];
    let mut partial = vec![0.0; d];

    let point = if spec.has_point_term() {
        for j in 0..d {
            vals[j] = spec.point_unchecked(j, xi[j]);
            slopes[j] = spec.point_slope(j, xi[j]);
        }
        leave_one_out(&vals, &mut partial);
        for j in 0..d {
            grad[j] -= 2.0 / nf * slopes[j] * partial[j];
        }
        vals.iter().product()
    } else {
        0.0
    };

    // Each off-diagonal pair appears twice in the double sum; the diagonal
    // term C(x, x) has derivative 2 ∂₁C(x, x). Both give the factor 2.
    // The value share keeps the upper-triangle order.
    let scale = 2.0 / (nf * nf);
    let mut off = 0.0;
    let mut diag = 0.0;
    for k in 0..n {
        let xk = points.row(k);
        for j in 0..d {
            vals[j] = spec.pair(j, xi[j], xk[j]);
            slopes[j] = spec.pair_slope(j, xi[j], xk[j]);
        }
        leave_one_out(&vals, &mut partial);
        for j in 0..d {
            grad[j] += scale * slopes[j] * partial[j];
        }
        if k == i {
            diag = pair_product(spec, xi, xk);
        } else if k > i {
            off += pair_product(spec, xi, xk);
        }
    }
    (point, diag + 2.0 * off, grad)
}

/// Buffers for [`value_grad_serial`].
pub(crate) struct GradScratch {
    vals: Vec<f64>,
    slopes: Vec<f64>,
    back: Vec<f64>,
    partial: Vec<f64>,
}

impl GradScratch {
    pub(crate) fn new(d: usize) -> Self {
        GradScratch {
            vals: vec![0.0; d],
            slopes: vec![0.0; d],
            back: vec![0.0; d],
            partial: vec![0.0; d],
        }
    }
}

/// Single-threaded value and gradient over the upper triangle of pairs, for
/// inner loops that already run in parallel at a coarser level. `coords` is
/// row-major with `d` columns and `grad` is overwritten.
pub(crate) fn value_grad_serial(spec: &KernelSpec, coords: &[f64], d: usize, grad: &mut [f64], scratch: &mut GradScratch) -> f64 {
    let n = coords.len() / d;
    let nf = n as f64;
    let GradScratch {
        vals,
        slopes,
        back,
        partial,
    } = scratch;
    grad.fill(0.0);
    let mut point_sum = 0.0;
    let mut pair_sum = 0.0;
    let point_scale = 2.0 / nf;
    let pair_scale = 2.0 / (nf * nf);
    for i in 0..n {
        let xi = &coords[i * d..(i + 1) * d];
        if spec.has_point_term() {
            for j in 0..d {
                vals[j] = spec.point_unchecked(j, xi[j]);
                slopes[j] = spec.point_slope(j, xi[j]);
            }
            leave_one_out(vals, partial);
            for j in 0..d {
                grad[i * d + j] -= point_scale * slopes[j] * partial[j];
            }
            point_sum += vals.iter().product::<f64>();
        }
        for j in 0..d {
            vals[j] = spec.pair(j, xi[j], xi[j]);
            slopes[j] = spec.pair_slope(j, xi[j], xi[j]);
        }
        leave_one_out(vals, partial);
        for j in 0..d {
            grad[i * d + j] += pair_scale * slopes[j] * partial[j];
        }
        pair_sum += vals.iter().product::<f64>();
        for k in i + 1..n {
            let xk = &coords[k * d..(k + 1) * d];
            for j in 0..d {
                vals[j] = spec.pair(j, xi[j], xk[j]);
                slopes[j] = spec.pair_slope(j, xi[j], xk[j]);
                back[j] = spec.pair_slope(j, xk[j], xi[j]);
            }
            leave_one_out(vals, partial);
            for j in 0..d {
                grad[i * d + j] += pair_scale * slopes[j] * partial[j];
                grad[k * d + j] += pair_scale * back[j] * partial[j];
            }
            pair_sum += 2.0 * vals.iter().product::<f64>();
        }
    }
    spec.constant() - point_scale * point_sum + pair_sum / (nf * nf)
}

/// `out[j] = Π_{l != j} vals[l]` without division.
fn leave_one_out(vals: &[f64], out: &mut [f64]) {
    let mut prefix = 1.0;
    for (o, &v) in out.iter_mut().zip(vals) {
        *o = prefix;
        prefix *= v;
    }
    let mut suffix = 1.0;
    for (o, &v) in out.iter_mut().zip(vals).rev() {
        *o *= suffix;
        suffix *= v;
    }
}

/// Greedy contribution of a new point `y`:
/// `F(y) = -2 Π B(y) + [2 Σ_i Π C(x_i, y) + Π C(y, y)] / (n + 1)`.
///
/// `(n + 1) · D²(P ∪ {y}) - F(y)` does not depend on `y`, so minimizing `F`
/// over candidates picks the same point as minimizing the extended value.
pub fn greedy_contribution(spec: &KernelSpec, points: &PointSet, y: &[f64]) -> Result<f64> {
    check_dim(spec, points.dim())?;
    check_candidate(y, points.dim())?;
    Ok(contribution(spec, points, y))
}

pub(crate) fn contribution(spec: &KernelSpec, points: &PointSet, y: &[f64]) -> f64 {
    let n = points.len() as f64;
    let cross = points.rows().fold(0.0, |acc, x| acc + pair_product(spec, x, y));
    let own = if spec.has_point_term() { point_product(spec, y) } else { 0.0 };
    -2.0 * own + (2.0 * cross + pair_product(spec, y, y)) / (n + 1.0)
}

/// The `y`-dependent part of `(n + b)² · D²` after appending the batch
/// `ys` (row-major, `b` points):
///
/// ```text
/// -2 (n + b) Σ_k Π B(y_k) + 2 Σ_i Σ_k Π C(x_i, y_k) + Σ_k Σ_k' Π C(y_k, y_k')
/// ```
///
/// Points in one batch interact through the last term. For `b = 1` this is
/// `(n + 1) F(y)`.
pub fn batch_contribution(spec: &KernelSpec, points: &PointSet, ys: &[f64]) -> Result<f64> {
    let d = points.dim();
    check_dim(spec, d)?;
    if ys.is_empty() || ys.len() % d != 0 {
        return Err(Error::RaggedRows {
            row: ys.len() / d.max(1),
            expected: d,
            found: ys.len() % d,
        });
    }
    for y in ys.chunks_exact(d) {
        check_candidate(y, d)?;
    }
    Ok(batch_value(spec, points, ys))
}

pub(crate) fn batch_value(spec: &KernelSpec, points: &PointSet, ys: &[f64]) -> f64 {
    let d = points.dim();
    let b = ys.len() / d;
    let total = (points.len() + b) as f64;
    let mut value = 0.0;
    for (k, yk) in ys.chunks_exact(d).enumerate() {
        if spec.has_point_term() {
            value -= 2.0 * total * point_product(spec, yk);
        }
        let cross = points.rows().fold(0.0, |acc, x| acc + pair_product(spec, x, yk));
        value += 2.0 * cross;
        let mut within = 0.0;
        for yl in ys.chunks_exact(d).skip(k + 1) {
            within += pair_product(spec, yk, yl);
        }
        value += pair_product(spec, yk, yk) + 2.0 * within;
    }
    value
}

fn check_candidate(y: &[f64], d: usize) -> Result<()> {
    if y.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: y.len(),
        });
    }
    for (col, &value) in y.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::OutsideUnitCube { row: 0, col, value });
        }
    }
    Ok(())
}
