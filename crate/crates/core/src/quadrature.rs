//! Composite Gauss–Legendre quadrature on `[0, 1]` and `[0, 1]^2`.
//!
//! Kernels in this crate are piecewise polynomials of low degree whose kinks
//! sit at `x = 1/2` and on the diagonal `x = z`. Splitting panels at those
//! lines makes every panel integrand a polynomial, which an eight-node rule
//! integrates exactly up to rounding.

use std::sync::OnceLock;

const NODES: usize = 8;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
fn rule() -> &'static [(f64, f64); NODES] {
    static RULE: OnceLock<[(f64, f64); NODES]> = OnceLock::new();
    RULE.get_or_init(|| {
        let m = NODES;
        let mut out = [(0.0, 0.0); NODES];
        for (k, slot) in out.iter_mut().enumerate() {
            // Chebyshev initial guess, then Newton on P_m.
            let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(m, x);
                dp = d;
                let step = p / d;
                x -= step;
                if step.abs() < 1e-17 {
                    break;
                }
            }
            let (_, d) = legendre(m, x);
            if d != 0.0 {
                dp = d;
            }
            *slot = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        out
    })
}

/// Value and derivative of the Legendre polynomial `P_m` at `x`.
fn legendre(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=m {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrates `f` over `[lo, hi]`, splitting at every breakpoint strictly
/// inside the interval.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, breaks: &[f64]) -> f64 {
    let mut cuts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&b| b > lo && b < hi)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(lo);
    edges.extend(cuts);
    edges.push(hi);
    edges
        .windows(2)
        .map(|w| panel(&f, w[0], w[1]))
        .fold(0.0, |acc, v| acc + v)
}

fn panel<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> f64 {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    half * rule()
        .iter()
        .fold(0.0, |acc, &(x, w)| acc + w * f(mid + half * x))
}

/// `∫_0^1 f(u) du` with a panel break at one half.
pub fn unit_interval<F: Fn(f64) -> f64>(f: F) -> f64 {
    integrate(f, 0.0, 1.0, &[0.5])
}

/// `∫_0^1 ∫_0^1 f(u, v) dv du` with panel breaks at one half in both
/// variables and along the diagonal `v = u`.
pub fn unit_square<F: Fn(f64, f64) -> f64>(f: F) -> f64 {
    unit_interval(|u| integrate(|v| f(u, v), 0.0, 1.0, &[0.5, u]))
}
