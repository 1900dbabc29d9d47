//! Point sets in the unit cube.
//!
//! A [`PointSet`] is an ordered, immutable list of `n` points in `[0, 1]^d`
//! stored row-major. Row order is significant: every transformation keeps it,
//! and all pair sums walk rows in ascending order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointSetRepr", into = "PointSetRepr")]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct PointSetRepr {
    d: usize,
    points: Vec<Vec<f64>>,
}

impl TryFrom<PointSetRepr> for PointSet {
    type Error = Error;

    fn try_from(repr: PointSetRepr) -> Result<Self> {
        let set = PointSet::from_rows(repr.points)?;
        if set.dim() != repr.d {
            return Err(Error::DimensionMismatch {
                expected: repr.d,
                found: set.dim(),
            });
        }
        Ok(set)
    }
}

impl From<PointSet> for PointSetRepr {
    fn from(set: PointSet) -> Self {
        PointSetRepr {
            d: set.dim,
            points: set.rows().map(<[f64]>::to_vec).collect(),
        }
    }
}

impl PointSet {
    /// Builds a point set from row-major coordinates.
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || coords.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        if coords.len() % dim != 0 {
            return Err(Error::RaggedRows {
                row: coords.len() / dim,
                expected: dim,
                found: coords.len() % dim,
            });
        }
        for (k, &value) in coords.iter().enumerate() {
            // NaN fails both comparisons.
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::OutsideUnitCube {
                    row: k / dim,
                    col: k % dim,
                    value,
                });
            }
        }
        Ok(PointSet { dim, coords })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: impl IntoIterator<Item = R>) -> Result<Self> {
        let mut coords = Vec::new();
        let mut dim = None;
        for (row, point) in rows.into_iter().enumerate() {
            let point = point.as_ref();
            let expected = *dim.get_or_insert(point.len());
            if point.len() != expected {
                return Err(Error::RaggedRows {
                    row,
                    expected,
                    found: point.len(),
                });
            }
            coords.extend_from_slice(point);
        }
        PointSet::new(dim.unwrap_or(0), coords)
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    /// Always false: a point set holds at least one point.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.coords[i * self.dim + j]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    /// Returns a new set with `point` appended after the existing rows.
    pub fn with_point(&self, point: &[f64]) -> Result<Self> {
        self.with_points(std::iter::once(point))
    }

    pub fn with_points<'a>(&self, points: impl IntoIterator<Item = &'a [f64]>) -> Result<Self> {
        let mut coords = self.coords.clone();
        for (k, point) in points.into_iter().enumerate() {
            if point.len() != self.dim {
                return Err(Error::RaggedRows {
                    row: self.len() + k,
                    expected: self.dim,
                    found: point.len(),
                });
            }
            coords.extend_from_slice(point);
        }
        PointSet::new(self.dim, coords)
    }

    /// Partial reflection: coordinate `j` is kept when `j + 1` is in `keep`
    /// (1-based indices) and replaced by `1 - x` otherwise.
    pub fn reflect(&self, keep: &[usize]) -> Result<Self> {
        let mut mask = vec![false; self.dim];
        for &index in keep {
            if index == 0 || index > self.dim {
                return Err(Error::InvalidSubset {
                    index,
                    dim: self.dim,
                });
            }
            mask[index - 1] = true;
        }
        Ok(self.reflect_mask(&mask))
    }

    /// Same as [`PointSet::reflect`] with the kept coordinates given as a
    /// boolean mask of length `d`.
    pub(crate) fn reflect_mask(&self, keep: &[bool]) -> Self {
        debug_assert_eq!(keep.len(), self.dim);
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(k, &x)| if keep[k % self.dim] { x } else { 1.0 - x })
            .collect();
        PointSet {
            dim: self.dim,
            coords,
        }
    }

    /// Reorders coordinate columns: output column `j` is input column `order[j]`.
    pub fn permute_columns(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: order.len(),
            });
        }
        let mut seen = vec![false; self.dim];
        for &c in order {
            if c >= self.dim || std::mem::replace(&mut seen[c], true) {
                return Err(Error::InvalidSubset {
                    index: c + 1,
                    dim: self.dim,
                });
            }
        }
        let coords = self
            .rows()
            .flat_map(|row| order.iter().map(move |&c| row[c]))
            .collect();
        Ok(PointSet {
            dim: self.dim,
            coords,
        })
    }

    /// Projects each coordinate back into the cube, leaving the row order intact.
    pub(crate) fn from_clamped(dim: usize, mut coords: Vec<f64>) -> Self {
        for x in &mut coords {
            *x = x.clamp(0.0, 1.0);
        }
        PointSet { dim, coords }
    }
}

/// Nearest vertex coordinate: `1` when `t >= 1/2`, else `0`.
#[inline]
pub fn vertex_coordinate(t: f64) -> f64 {
    if t >= 0.5 {
        1.0
    } else {
        0.0
    }
}

/// Vertex of `{0,1}^d` closest to `a`, with ties at one half going to 1.
pub fn nearest_vertex(a: &[f64]) -> Result<Vec<u8>> {
    a.iter()
        .enumerate()
        .map(|(col, &t)| {
            if (0.0..=1.0).contains(&t) {
                Ok(u8::from(t >= 0.5))
            } else {
                Err(Error::OutsideUnitCube { row: 0, col, value: t })
            }
        })
        .collect()
}
