//! L2 discrepancy measures of point sets in `[0, 1]^d`.
//!
//! [`evaluator::squared_discrepancy`] evaluates any measure from its
//! [`kernels::KernelSpec`]. [`oracle`] estimates the same quantities by
//! sampling test boxes. [`pathology`] compares random sets with
//! repeated points, and [`construct`] builds sets greedily or by
//! optimization. The `l2disc` binary wraps all of it ([`cli`]).
//!
//! ```
//! use l2disc::{kernel_spec, squared_discrepancy, MeasureId, PointSet};
//!
//! let set = PointSet::from_rows([[0.5]])?;
//! let ext = squared_discrepancy(&kernel_spec(MeasureId::Ext, 1, None)?, &set)?;
//! assert!((ext.value - 1.0 / 12.0).abs() < 1e-15);
//! # Ok::<(), l2disc::Error>(())
//! ```

pub mod cli;
pub mod construct;
pub mod error;
pub mod evaluator;
pub mod generators;
pub mod kernels;
pub mod measure;
pub mod oracle;
pub mod pathology;
pub mod point_set;
pub mod quadrature;
pub mod reference;
pub mod sobol;
pub mod sum;

pub use error::{Error, Result};
pub use evaluator::squared_discrepancy;
pub use kernels::{kernel_spec, KernelSpec};
pub use measure::{MeasureId, SquaredDiscrepancy, WeightVector};
pub use point_set::PointSet;
