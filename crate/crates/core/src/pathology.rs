//! Replicated special points versus IID sampling.
//!
//! For IID uniform points the expected squared discrepancy is
//!
//! ```text
//! E[D²] = A - 2 Π E[B] + (1 - 1/n) Π E[C(u, v)] + (1/n) Π E[C(u, u)] = K + M / n
//! ```
//!
//! and `n` copies of one point `p` give the `n`-free value
//! `S = A - 2 Π B(p) + Π C(p, p)`. IID sampling wins exactly when
//! `n > M / (S - K)`. For every measure here `K` vanishes.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::{pair_product, point_product};
use crate::kernels::{kernel_spec, KernelSpec};
use crate::measure::MeasureId;
use crate::oracle::{mc_expected_iid, mc_expected_iid_geometric, mc_squared_discrepancy, OracleEstimate};
use crate::point_set::PointSet;

/// Relative tolerance for agreement with the published closed forms.
pub const TABLE1_RTOL: f64 = 1e-10;

/// Where the replicated points sit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Anchor {
    /// The vertex `(1, …, 1)` opposite the origin.
    AllOnes,
    /// Any vertex; `(0, …, 0)` is used.
    AnyVertex,
    /// Any point; the center is used.
    AnyPoint,
    /// The center `(1/2, …, 1/2)`.
    Center,
}

impl Anchor {
    /// The anchor used for `measure` in the pathology table.
    pub fn for_measure(measure: MeasureId) -> Anchor {
        match measure {
            MeasureId::Star => Anchor::AllOnes,
            MeasureId::Ext | MeasureId::Mix => Anchor::AnyVertex,
            MeasureId::Per => Anchor::AnyPoint,
            _ => Anchor::Center,
        }
    }

    pub fn point(self, d: usize) -> Vec<f64> {
        let t = match self {
            Anchor::AllOnes => 1.0,
            Anchor::AnyVertex => 0.0,
            Anchor::AnyPoint | Anchor::Center => 0.5,
        };
        vec![t; d]
    }

    pub fn describe(self) -> &'static str {
        match self {
            Anchor::AllOnes => "(1,...,1)",
            Anchor::AnyVertex => "any vertex",
            Anchor::AnyPoint => "any point",
            Anchor::Center => "center",
        }
    }
}

/// `S = A - 2 Π B(p) + Π C(p, p)`: the squared discrepancy of any number of
/// copies of `p`.
pub fn single_point_value(spec: &KernelSpec, p: &[f64]) -> Result<f64> {
    if p.len() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: p.len(),
        });
    }
    PointSet::from_rows([p])?;
    let point = if spec.has_point_term() { point_product(spec, p) } else { 0.0 };
    Ok(spec.constant() - 2.0 * point + pair_product(spec, p, p))
}

/// `(K, M)` with `E[D²] = K + M / n` for `n` IID uniform points.
pub fn iid_coefficients(spec: &KernelSpec) -> (f64, f64) {
    let point = if spec.has_point_term() { spec.expected_point_product() } else { 0.0 };
    let cross = spec.expected_cross_product();
    let diagonal = spec.expected_diagonal_product();
    (spec.constant() - 2.0 * point + cross, diagonal - cross)
}

/// `E[D²]` for `n` IID uniform points.
pub fn expected_iid_squared(spec: &KernelSpec, n: usize) -> f64 {
    let point = if spec.has_point_term() { spec.expected_point_product() } else { 0.0 };
    let nf = n as f64;
    spec.constant() - 2.0 * point + (1.0 - 1.0 / nf) * spec.expected_cross_product()
        + spec.expected_diagonal_product() / nf
}

/// Where IID sampling overtakes `n` copies of one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    /// IID is better exactly for `n > value`; infinite if it never is.
    pub value: f64,
    /// Smallest integer `n0` with IID better for every `n > n0`.
    pub crossover: Option<u64>,
}

/// The threshold for replicating `p`.
pub fn iid_threshold(spec: &KernelSpec, p: &[f64]) -> Result<Threshold> {
    let single = single_point_value(spec, p)?;
    let (k, m) = iid_coefficients(spec);
    let gap = single - k;
    if gap <= 0.0 {
        return Ok(Threshold {
            value: f64::INFINITY,
            crossover: None,
        });
    }
    let value = m / gap;
    // A threshold that is an integer up to rounding is that integer: the
    // strict inequality n > t then excludes it.
    let nearest = value.round();
    let crossover = if (value - nearest).abs() <= TABLE1_RTOL * value.abs().max(1.0) {
        nearest
    } else {
        value.floor()
    };
    Ok(Threshold {
        value,
        crossover: Some(crossover.max(0.0) as u64),
    })
}

/// Whether `n` IID points beat `n` copies of the center under the average
/// squared discrepancy, decided in exact integer arithmetic.
///
/// Scaled by `24^d`, the comparison reads
/// `12^d - 8^d < n (12^d - 2·9^d + 8^d)`.
pub fn check_asd_superiority(d: u32, n: u64) -> bool {
    let pow = |b: u32| BigUint::from(b).pow(d);
    let lhs = pow(12) - pow(8);
    let rhs = BigUint::from(n) * (pow(12) + pow(8) - BigUint::from(2u32) * pow(9));
    lhs < rhs
}

/// How a computed entry compares with the published one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableMatch {
    Match,
    Mismatch,
    NotListed,
}

/// A published threshold entry.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum PublishedThreshold {
    /// A closed form in `d`.
    Closed(f64),
    /// A bare integer, read as the integer crossover.
    Integer(u64),
    /// An asymptotic approximation, compared within 10%.
    Approximate(f64),
}

/// Relative slack for thresholds published as approximations.
pub const APPROXIMATE_RTOL: f64 = 0.1;

/// One published row of the pathology summary, evaluated at `d`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PublishedRow {
    pub n_times_expected: f64,
    pub single_value: Option<f64>,
    pub threshold: PublishedThreshold,
}

/// The published closed forms for the unweighted measures.
pub fn published_row(measure: MeasureId, d: u32) -> Option<PublishedRow> {
    let p = |b: f64| b.powi(d as i32);
    let closed = PublishedThreshold::Closed;
    let row = |n_e: f64, single: Option<f64>, threshold| PublishedRow {
        n_times_expected: n_e,
        single_value: single,
        threshold,
    };
    Some(match measure {
        MeasureId::Star => row(p(0.5) - p(1.0 / 3.0), Some(p(1.0 / 3.0)), closed(p(1.5) - 1.0)),
        MeasureId::Ext => row(p(1.0 / 6.0) - p(1.0 / 12.0), Some(p(1.0 / 12.0)), closed(p(2.0) - 1.0)),
        MeasureId::Per => row(p(0.5) - p(1.0 / 3.0), Some(p(1.0 / 3.0)), closed(p(1.5) - 1.0)),
        MeasureId::Ctr => row(p(0.25) - p(1.0 / 12.0), Some(p(1.0 / 12.0)), closed(p(3.0) - 1.0)),
        MeasureId::Cad => row(
            p(0.5) - p(1.0 / 12.0),
            Some(p(1.0 / 12.0) - 2.0 * p(0.125) + p(0.5)),
            closed(p(6.0) - 1.0),
        ),
        MeasureId::Mix => row(p(0.75) - p(7.0 / 12.0), None, PublishedThreshold::Approximate(p(9.0 / 7.0))),
        MeasureId::Sym => row(
            p(0.25) - p(1.0 / 12.0),
            Some(p(1.0 / 12.0) - 2.0 * p(0.125) + p(0.25)),
            PublishedThreshold::Integer(1),
        ),
        MeasureId::Asd => row(
            p(0.5) - p(1.0 / 3.0),
            Some(p(0.5) - 2.0 * p(0.375) + p(1.0 / 3.0)),
            PublishedThreshold::Integer(1),
        ),
        MeasureId::CtrWeighted | MeasureId::SymWeighted => return None,
    })
}

fn close(a: f64, b: f64, rtol: f64) -> bool {
    (a - b).abs() <= rtol * b.abs()
}

fn compare(computed: f64, published: Option<f64>) -> TableMatch {
    match published {
        None => TableMatch::NotListed,
        Some(p) if close(computed, p, TABLE1_RTOL) => TableMatch::Match,
        Some(_) => TableMatch::Mismatch,
    }
}

fn compare_threshold(computed: &Threshold, published: PublishedThreshold) -> TableMatch {
    let ok = match published {
        PublishedThreshold::Closed(t) => close(computed.value, t, TABLE1_RTOL),
        PublishedThreshold::Integer(k) => computed.crossover == Some(k),
        PublishedThreshold::Approximate(t) => close(computed.value, t, APPROXIMATE_RTOL),
    };
    if ok {
        TableMatch::Match
    } else {
        TableMatch::Mismatch
    }
}

/// Monte-Carlo values for rows whose published entries disagree with the
/// kernels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arbitration {
    /// Number of points in each IID draw.
    pub n: usize,
    /// Estimate of `n E[D²]`, mean and standard error both scaled by `n`.
    pub n_times_expected: OracleEstimate,
    /// True when the estimate came from the test-set definition; false for
    /// measures without one, where the kernel value of random sets is averaged.
    pub geometric: bool,
    /// Geometric estimate of the replicated value, where available.
    pub single_value: Option<OracleEstimate>,
}

/// Settings for [`Arbitration`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArbitrationConfig {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for ArbitrationConfig {
    fn default() -> Self {
        ArbitrationConfig {
            n: 4,
            samples: 200_000,
            seed: 2024,
        }
    }
}

/// Measures whose published rows disagree with the kernels.
pub const ARBITRATED: [MeasureId; 3] = [MeasureId::Per, MeasureId::Cad, MeasureId::Mix];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathologyRow {
    pub measure: MeasureId,
    pub d: usize,
    pub anchor: Anchor,
    /// `M`, which equals `n E[D²]` since `K` vanishes.
    pub n_times_expected: f64,
    /// `K`, kept to show that it vanishes.
    pub iid_constant: f64,
    pub single_value: f64,
    pub threshold: Threshold,
    pub published: Option<PublishedRow>,
    pub n_times_expected_match: TableMatch,
    pub single_value_match: TableMatch,
    pub threshold_match: TableMatch,
    pub arbitration: Option<Arbitration>,
}

impl PathologyRow {
    /// `Match` only when every listed column matches.
    pub fn table1_match(&self) -> TableMatch {
        let cols = [self.n_times_expected_match, self.single_value_match, self.threshold_match];
        if self.published.is_none() {
            TableMatch::NotListed
        } else if cols.contains(&TableMatch::Mismatch) {
            TableMatch::Mismatch
        } else {
            TableMatch::Match
        }
    }
}

/// Builds one row for an unweighted measure.
pub fn pathology_row(measure: MeasureId, d: usize, arbitrate: Option<ArbitrationConfig>) -> Result<PathologyRow> {
    let spec = kernel_spec(measure, d, None)?;
    let anchor = Anchor::for_measure(measure);
    let p = anchor.point(d);
    let single_value = single_point_value(&spec, &p)?;
    let (k, m) = iid_coefficients(&spec);
    let threshold = iid_threshold(&spec, &p)?;
    let published = published_row(measure, d as u32);
    let (n_e_match, single_match, threshold_match) = match published {
        Some(row) => (
            compare(m, Some(row.n_times_expected)),
            compare(single_value, row.single_value),
            compare_threshold(&threshold, row.threshold),
        ),
        None => (TableMatch::NotListed, TableMatch::NotListed, TableMatch::NotListed),
    };
    let arbitration = match arbitrate {
        Some(cfg) if ARBITRATED.contains(&measure) => Some(arbitrate_row(&spec, &p, cfg)?),
        _ => None,
    };
    Ok(PathologyRow {
        measure,
        d,
        anchor,
        n_times_expected: m,
        iid_constant: k,
        single_value,
        threshold,
        published,
        n_times_expected_match: n_e_match,
        single_value_match: single_match,
        threshold_match,
        arbitration,
    })
}

fn arbitrate_row(spec: &KernelSpec, p: &[f64], cfg: ArbitrationConfig) -> Result<Arbitration> {
    let measure = spec.measure();
    let geometric = measure.has_geometric_oracle();
    let raw = if geometric {
        mc_expected_iid_geometric(measure, cfg.n, spec.dim(), cfg.samples, cfg.seed)?
    } else {
        mc_expected_iid(spec, cfg.n, cfg.samples, cfg.seed)?
    };
    let scale = cfg.n as f64;
    let n_times_expected = OracleEstimate {
        mean: raw.mean * scale,
        stderr: raw.stderr * scale,
        ..raw
    };
    let single_value = if geometric {
        Some(mc_squared_discrepancy(
            measure,
            &PointSet::from_rows([p])?,
            cfg.samples,
            cfg.seed.wrapping_add(1),
        )?)
    } else {
        None
    };
    Ok(Arbitration {
        n: cfg.n,
        n_times_expected,
        geometric,
        single_value,
    })
}

/// Every unweighted measure at every dimension in `dims`, in measure order.
pub fn pathology_table(dims: &[usize], arbitrate: Option<ArbitrationConfig>) -> Result<Vec<PathologyRow>> {
    let mut rows = Vec::new();
    for measure in MeasureId::UNWEIGHTED {
        for &d in dims {
            rows.push(pathology_row(measure, d, arbitrate)?);
        }
    }
    Ok(rows)
}
