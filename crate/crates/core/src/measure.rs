use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute rounding allowance for squared values: closed forms may land a
/// hair below zero, anything further is a numeric fault.
pub const NEGATIVE_ALLOWANCE: f64 = 1e-12;

/// The L2 discrepancy measures this crate evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureId {
    /// Star discrepancy, boxes anchored at the origin.
    Star,
    /// Extreme discrepancy, all boxes `[a, b)`.
    Ext,
    /// Periodic (wraparound) discrepancy on the torus.
    Per,
    /// Centered discrepancy, boxes from a point to its nearest vertex.
    Ctr,
    /// Centered-anchor discrepancy, boxes from a point to the cube center.
    Cad,
    /// Symmetric discrepancy, unions of even orthants.
    Sym,
    /// Mixture discrepancy.
    Mix,
    /// Average squared discrepancy: the star discrepancy averaged over all
    /// `2^d` vertex anchors.
    Asd,
    /// Centered discrepancy with marginal weights.
    CtrWeighted,
    /// Symmetric discrepancy with marginal weights.
    SymWeighted,
}

impl MeasureId {
    pub const ALL: [MeasureId; 10] = [
        MeasureId::Star,
        MeasureId::Ext,
        MeasureId::Per,
        MeasureId::Ctr,
        MeasureId::Cad,
        MeasureId::Sym,
        MeasureId::Mix,
        MeasureId::Asd,
        MeasureId::CtrWeighted,
        MeasureId::SymWeighted,
    ];

    /// The measures that take no weight vector.
    pub const UNWEIGHTED: [MeasureId; 8] = [
        MeasureId::Star,
        MeasureId::Ext,
        MeasureId::Per,
        MeasureId::Ctr,
        MeasureId::Cad,
        MeasureId::Sym,
        MeasureId::Mix,
        MeasureId::Asd,
    ];

    /// The measures that can be optimized and compared in the numerical study.
    pub const OPTIMIZABLE: [MeasureId; 7] = [
        MeasureId::Star,
        MeasureId::Ext,
        MeasureId::Per,
        MeasureId::Ctr,
        MeasureId::Sym,
        MeasureId::Asd,
        MeasureId::Mix,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            MeasureId::Star => "star",
            MeasureId::Ext => "ext",
            MeasureId::Per => "per",
            MeasureId::Ctr => "ctr",
            MeasureId::Cad => "cad",
            MeasureId::Sym => "sym",
            MeasureId::Mix => "mix",
            MeasureId::Asd => "asd",
            MeasureId::CtrWeighted => "ctr_weighted",
            MeasureId::SymWeighted => "sym_weighted",
        }
    }

    pub fn is_weighted(self) -> bool {
        matches!(self, MeasureId::CtrWeighted | MeasureId::SymWeighted)
    }

    /// False only for `cad`, whose kernel jumps at one half.
    pub fn is_continuous(self) -> bool {
        self != MeasureId::Cad
    }

    /// Whether the measure is defined as an integral over a family of test
    /// sets that the Monte-Carlo oracle can sample.
    pub fn has_geometric_oracle(self) -> bool {
        !matches!(
            self,
            MeasureId::Mix | MeasureId::CtrWeighted | MeasureId::SymWeighted
        )
    }
}

impl fmt::Display for MeasureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for MeasureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MeasureId::ALL
            .into_iter()
            .find(|m| m.tag() == s)
            .ok_or_else(|| Error::UnknownMeasure(s.to_owned()))
    }
}

/// Non-negative per-coordinate weights `γ_1, …, γ_d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(gamma: Vec<f64>) -> Result<Self> {
        if gamma.is_empty() {
            return Err(Error::Config("weight vector is empty".into()));
        }
        for (index, &value) in gamma.iter().enumerate() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidWeight { index, value });
            }
        }
        Ok(WeightVector(gamma))
    }

    pub fn uniform(value: f64, dim: usize) -> Result<Self> {
        WeightVector::new(vec![value; dim])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = Error;

    fn try_from(gamma: Vec<f64>) -> Result<Self> {
        WeightVector::new(gamma)
    }
}

impl From<WeightVector> for Vec<f64> {
    fn from(w: WeightVector) -> Self {
        w.0
    }
}

impl FromStr for WeightVector {
    type Err = Error;

    /// Parses a comma-separated list such as `4,4,4`.
    fn from_str(s: &str) -> Result<Self> {
        let gamma = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Config(format!("weight `{t}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        WeightVector::new(gamma)
    }
}

/// A squared discrepancy as computed, before any clamping.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SquaredDiscrepancy {
    pub measure: MeasureId,
    pub value: f64,
    pub n: usize,
    pub d: usize,
}

impl SquaredDiscrepancy {
    /// `sqrt(max(value, 0))`; clamping happens here and nowhere earlier.
    pub fn root(&self) -> f64 {
        self.value.max(0.0).sqrt()
    }

    /// Fails when the raw value is negative beyond rounding.
    pub fn checked(self) -> Result<Self> {
        if self.value < -NEGATIVE_ALLOWANCE || self.value.is_nan() {
            Err(Error::NegativeSquared(self.value))
        } else {
            Ok(self)
        }
    }
}
