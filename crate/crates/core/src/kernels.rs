//! Kernel triples for every measure.
//!
//! Each squared discrepancy has the shape
//!
//! ```text
//! A - (2/n) Σ_i Π_j B_j(x_ij) + (1/n²) Σ_i Σ_i' Π_j C_j(x_ij, x_i'j)
//! ```
//!
//! with a constant `A`, a one-point kernel `B` and a symmetric two-point
//! kernel `C`. Unweighted measures share one `B` and `C` across coordinates;
//! the weighted variants scale theirs by `γ_j`. The periodic measure has no
//! one-point term at all, which is recorded as a flag rather than `B ≡ 0`.
//!
//! Alongside the kernels a [`KernelSpec`] stores the moments `E[B(u)]`,
//! `E[C(u, v)]` and `E[C(u, u)]` for independent uniform `u, v`, which drive
//! the expected value of the discrepancy of IID points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{MeasureId, WeightVector};
use crate::point_set::vertex_coordinate;
use crate::quadrature;

/// `E[B(u)]`, `E[C(u, v)]` and `E[C(u, u)]` for one coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelMoments {
    pub point: f64,
    pub cross: f64,
    pub diagonal: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelSpec {
    measure: MeasureId,
    dim: usize,
    gamma: Option<WeightVector>,
    constant: f64,
    moments: Vec<KernelMoments>,
}

/// Builds the kernel triple of `measure` in dimension `dim`.
///
/// `gamma` must be given exactly for the weighted measures and must have
/// length `dim`.
pub fn kernel_spec(measure: MeasureId, dim: usize, gamma: Option<WeightVector>) -> Result<KernelSpec> {
    KernelSpec::new(measure, dim, gamma)
}

/// Recomputes the kernel moments of every coordinate by quadrature.
pub fn expectation_constants(spec: &KernelSpec) -> Vec<KernelMoments> {
    (0..spec.dim).map(|j| spec.integrate_moments(j)).collect()
}

impl KernelSpec {
    pub fn new(measure: MeasureId, dim: usize, gamma: Option<WeightVector>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyPointSet);
        }
        match (&gamma, measure.is_weighted()) {
            (Some(_), false) => return Err(Error::UnexpectedWeights(measure)),
            (None, true) => return Err(Error::MissingWeights(measure)),
            (Some(g), true) if g.len() != dim => {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: g.len(),
                })
            }
            _ => {}
        }
        let d = dim as i32;
        let constant = match measure {
            MeasureId::Star | MeasureId::Asd => 3f64.powi(-d),
            MeasureId::Per => -(3f64.powi(-d)),
            MeasureId::Ext | MeasureId::Ctr | MeasureId::Cad | MeasureId::Sym => 12f64.powi(-d),
            MeasureId::Mix => (7.0 / 12.0f64).powi(d),
            MeasureId::CtrWeighted | MeasureId::SymWeighted => gamma
                .as_ref()
                .map(|g| g.as_slice().iter().map(|&w| 1.0 + w / 12.0).product())
                .unwrap_or(1.0),
        };
        let mut spec = KernelSpec {
            measure,
            dim,
            gamma,
            constant,
            moments: Vec::new(),
        };
        spec.moments = expectation_constants(&spec);
        Ok(spec)
    }

    pub fn measure(&self) -> MeasureId {
        self.measure
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gamma(&self) -> Option<&WeightVector> {
        self.gamma.as_ref()
    }

    /// The constant `A`.
    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// False for the periodic measure, which has no one-point sum.
    pub fn has_point_term(&self) -> bool {
        self.measure != MeasureId::Per
    }

    pub fn is_continuous(&self) -> bool {
        self.measure.is_continuous()
    }

    pub fn has_geometric_oracle(&self) -> bool {
        self.measure.has_geometric_oracle()
    }

    /// Stored moments of coordinate `j`.
    pub fn moments(&self, j: usize) -> KernelMoments {
        self.moments[j]
    }

    #[inline]
    fn weight(&self, j: usize) -> f64 {
        self.gamma.as_ref().map_or(1.0, |g| g.as_slice()[j])
    }

    /// One-point kernel `B_j(x)`, or `None` for the periodic measure.
    pub fn point(&self, j: usize, x: f64) -> Option<f64> {
        self.has_point_term().then(|| self.point_unchecked(j, x))
    }

    #[inline]
    pub(crate) fn point_unchecked(&self, j: usize, x: f64) -> f64 {
        match self.measure {
            MeasureId::Star => (1.0 - x * x) / 2.0,
            MeasureId::Ext | MeasureId::Cad | MeasureId::Sym => x * (1.0 - x) / 2.0,
            MeasureId::Per => 0.0,
            MeasureId::Ctr => {
                let t = (x - 0.5).abs();
                (t - t * t) / 2.0
            }
            MeasureId::Mix => {
                let t = (x - 0.5).abs();
                2.0 / 3.0 - t / 4.0 - t * t / 4.0
            }
            MeasureId::Asd => (1.0 + 2.0 * x - 2.0 * x * x) / 4.0,
            MeasureId::CtrWeighted => {
                let t = (x - 0.5).abs();
                1.0 + self.weight(j) / 2.0 * (t - t * t)
            }
            MeasureId::SymWeighted => 1.0 + self.weight(j) / 2.0 * (x * (1.0 - x)),
        }
    }

    /// Two-point kernel `C_j(x, z)`. Every branch is written with
    /// commutative sub-expressions so `pair(j, x, z) == pair(j, z, x)` holds
    /// bit for bit.
    #[inline]
    pub fn pair(&self, j: usize, x: f64, z: f64) -> f64 {
        match self.measure {
            MeasureId::Star => 1.0 - x.max(z),
            MeasureId::Ext => x.min(z) - x * z,
            MeasureId::Per => {
                let t = (x - z).abs();
                0.5 - t + t * t
            }
            MeasureId::Ctr => ((x - 0.5).abs() + (z - 0.5).abs() - (x - z).abs()) / 2.0,
            MeasureId::Cad => {
                let (vx, vz) = (vertex_coordinate(x), vertex_coordinate(z));
                if vx == vz {
                    (x - vx).abs().min((z - vz).abs())
                } else {
                    0.0
                }
            }
            MeasureId::Sym => (1.0 - 2.0 * (x - z).abs()) / 4.0,
            MeasureId::Mix => {
                let t = (x - z).abs();
                7.0 / 8.0 - ((x - 0.5).abs() + (z - 0.5).abs()) / 4.0 - 3.0 * t / 4.0 + t * t / 2.0
            }
            MeasureId::Asd => (1.0 - (x - z).abs()) / 2.0,
            MeasureId::CtrWeighted => {
                let s = (x - 0.5).abs() + (z - 0.5).abs() - (x - z).abs();
                1.0 + self.weight(j) / 2.0 * s
            }
            MeasureId::SymWeighted => 1.0 + self.weight(j) / 4.0 * (1.0 - 2.0 * (x - z).abs()),
        }
    }

    /// `dB_j/dx`, with subderivative 0 at `|x - 1/2|` kinks.
    #[inline]
    pub(crate) fn point_slope(&self, j: usize, x: f64) -> f64 {
        let s = sign(x - 0.5);
        match self.measure {
            MeasureId::Star => -x,
            MeasureId::Ext | MeasureId::Cad | MeasureId::Sym | MeasureId::Asd => (1.0 - 2.0 * x) / 2.0,
            MeasureId::Per => 0.0,
            MeasureId::Ctr => (s - 2.0 * (x - 0.5)) / 2.0,
            MeasureId::Mix => -s / 4.0 - (x - 0.5) / 2.0,
            MeasureId::CtrWeighted => self.weight(j) / 2.0 * (s - 2.0 * (x - 0.5)),
            MeasureId::SymWeighted => self.weight(j) / 2.0 * (1.0 - 2.0 * x),
        }
    }

    /// `∂C_j(x, z)/∂x`. At `|·|` kinks the subderivative 0 is used; at ties
    /// of `max`/`min` the mean of the two one-sided derivatives.
    #[inline]
    pub(crate) fn pair_slope(&self, j: usize, x: f64, z: f64) -> f64 {
        let sd = sign(x - z);
        match self.measure {
            // d/dx (1 - max(x, z)): -1 above z, 0 below.
            MeasureId::Star => -step(x - z),
            // d/dx min(x, z) = 1 below z, 0 above.
            MeasureId::Ext => step(z - x) - z,
            MeasureId::Per => -sd + 2.0 * (x - z),
            MeasureId::Ctr => (sign(x - 0.5) - sd) / 2.0,
            MeasureId::Cad => 0.0,
            MeasureId::Sym | MeasureId::Asd => -sd / 2.0,
            MeasureId::Mix => -sign(x - 0.5) / 4.0 - 3.0 * sd / 4.0 + (x - z),
            MeasureId::CtrWeighted => self.weight(j) / 2.0 * (sign(x - 0.5) - sd),
            MeasureId::SymWeighted => -self.weight(j) / 2.0 * sd,
        }
    }

    fn integrate_moments(&self, j: usize) -> KernelMoments {
        let point = if self.has_point_term() {
            quadrature::unit_interval(|u| self.point_unchecked(j, u))
        } else {
            0.0
        };
        KernelMoments {
            point,
            cross: quadrature::unit_square(|u, v| self.pair(j, u, v)),
            diagonal: quadrature::unit_interval(|u| self.pair(j, u, u)),
        }
    }

    /// `Π_j E[B_j(u)]`.
    pub fn expected_point_product(&self) -> f64 {
        self.moments.iter().map(|m| m.point).product()
    }

    /// `Π_j E[C_j(u, v)]`.
    pub fn expected_cross_product(&self) -> f64 {
        self.moments.iter().map(|m| m.cross).product()
    }

    /// `Π_j E[C_j(u, u)]`.
    pub fn expected_diagonal_product(&self) -> f64 {
        self.moments.iter().map(|m| m.diagonal).product()
    }
}

#[inline]
fn sign(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else if t < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Heaviside step with value one half at zero.
#[inline]
fn step(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else if t < 0.0 {
        0.0
    } else {
        0.5
    }
}
