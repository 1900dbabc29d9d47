//! Baseline and starting point sets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::point_set::PointSet;

pub use crate::sobol::{sobol, DirectionNumbers};

/// `n` IID uniform points in `[0, 1)^d`, a pure function of `seed`.
pub fn iid_uniform(n: usize, d: usize, seed: u64) -> Result<PointSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PointSet::new(d, (0..n * d).map(|_| rng.gen::<f64>()).collect())
}

/// `n` copies of the point `p`.
pub fn replicated_point(p: &[f64], n: usize) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::EmptyPointSet);
    }
    PointSet::from_rows(std::iter::repeat(p).take(n))
}

/// `{(i/n, frac(i φ)) : i = 0, …, n-1}` with `φ` the golden ratio.
pub fn fibonacci_lattice(n: usize) -> Result<PointSet> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let nf = n as f64;
    PointSet::from_rows((0..n).map(|i| {
        let i = i as f64;
        [i / nf, (i * phi).fract()]
    }))
}

/// The `k^d` cell centers `((2 c_j + 1) / 2k)_j`, first coordinate slowest.
pub fn grid(k: usize, d: usize) -> Result<PointSet> {
    if k == 0 {
        return Err(Error::Config("grid needs k >= 1".into()));
    }
    product_grid(k, d, |c| (2 * c + 1) as f64 / (2 * k) as f64)
}

/// The `k^d` lattice points `(c_j / (k - 1))_j`, which include every vertex
/// and, for odd `k`, the center.
pub fn lattice(k: usize, d: usize) -> Result<PointSet> {
    if k < 2 {
        return Err(Error::Config("lattice needs k >= 2".into()));
    }
    product_grid(k, d, |c| c as f64 / (k - 1) as f64)
}

fn product_grid(k: usize, d: usize, coord: impl Fn(usize) -> f64) -> Result<PointSet> {
    if d == 0 {
        return Err(Error::EmptyPointSet);
    }
    let count = u32::try_from(d)
        .ok()
        .and_then(|d| k.checked_pow(d))
        .ok_or_else(|| Error::Config(format!("{k}^{d} grid points overflow")))?;
    let axis: Vec<f64> = (0..k).map(coord).collect();
    let mut coords = Vec::with_capacity(count * d);
    for idx in 0..count {
        let mut rest = idx;
        let start = coords.len();
        coords.resize(start + d, 0.0);
        for j in (0..d).rev() {
            coords[start + j] = axis[rest % k];
            rest /= k;
        }
    }
    PointSet::new(d, coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::squared_discrepancy;
    use crate::kernels::kernel_spec;
    use crate::measure::MeasureId;

    #[test]
    fn iid_is_reproducible_and_centered() {
        assert_eq!(iid_uniform(3, 2, 7).unwrap(), iid_uniform(3, 2, 7).unwrap());
        assert_ne!(iid_uniform(3, 2, 7).unwrap(), iid_uniform(3, 2, 8).unwrap());
        let p = iid_uniform(10_000, 1, 99).unwrap();
        let mean = p.as_slice().iter().sum::<f64>() / 1e4;
        assert!((mean - 0.5).abs() < 4.0 / (12.0f64 * 1e4).sqrt());
        let big = iid_uniform(10_000, 2, 3).unwrap();
        let star = squared_discrepancy(&kernel_spec(MeasureId::Star, 2, None).unwrap(), &big).unwrap().value;
        let expected = (0.25 - 1.0 / 9.0) / 1e4;
        assert!(star < 10.0 * expected && star > expected / 10.0);
    }

    #[test]
    fn replicated_examples() {
        let p = replicated_point(&[1.0, 1.0], 5).unwrap();
        assert_eq!(p.len(), 5);
        assert!(p.rows().all(|r| r == [1.0, 1.0]));
        assert!(replicated_point(&[0.5], 0).is_err());
    }

    #[test]
    fn fibonacci_examples() {
        assert_eq!(fibonacci_lattice(1).unwrap().as_slice(), &[0.0, 0.0]);
        let two = fibonacci_lattice(2).unwrap();
        assert_eq!(two.row(1)[0], 0.5);
        assert!((two.row(1)[1] - 0.618_033_988_749_895).abs() < 1e-15);
    }

    #[test]
    fn fibonacci_beats_random_on_the_torus() {
        let per = kernel_spec(MeasureId::Per, 2, None).unwrap();
        let fib = squared_discrepancy(&per, &fibonacci_lattice(64).unwrap()).unwrap().value;
        let mean: f64 = (0..100)
            .map(|s| squared_discrepancy(&per, &iid_uniform(64, 2, s).unwrap()).unwrap().value)
            .sum::<f64>()
            / 100.0;
        assert!(fib < mean, "{fib} vs {mean}");
    }

    #[test]
    fn grid_examples() {
        assert_eq!(grid(2, 1).unwrap().as_slice(), &[0.25, 0.75]);
        assert_eq!(grid(3, 2).unwrap().len(), 9);
        assert_eq!(grid(1, 2).unwrap().as_slice(), &[0.5, 0.5]);
        let l = lattice(3, 2).unwrap();
        assert_eq!(l.row(0), &[0.0, 0.0]);
        assert_eq!(l.row(4), &[0.5, 0.5]);
        assert_eq!(l.row(8), &[1.0, 1.0]);
        assert!(lattice(1, 2).is_err());
    }
}
