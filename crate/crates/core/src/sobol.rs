//! Unscrambled Sobol' points.
//!
//! Point `i` is the digital image of the binary expansion of `i`: the XOR of
//! the direction integers for every set bit. No Gray-code reordering, so the
//! sequence starts at the origin and its first `2^m` points form a `(t, m,
//! s)`-net in base 2.

use std::path::Path;

use crate::error::{Error, Result};
use crate::point_set::PointSet;

const BITS: usize = 32;

/// Primitive-polynomial data for dimensions `2, 3, …`; dimension 1 is the van
/// der Corput sequence and needs no row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectionNumbers {
    rows: Vec<DirectionRow>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct DirectionRow {
    /// Degree of the primitive polynomial.
    s: u32,
    /// Interior coefficients packed as bits, highest degree first.
    a: u32,
    /// Initial direction integers `m_1 … m_s`.
    m: Vec<u32>,
}

/// `(s, a, m)` for dimensions 2 to 16 of the new-joe-kuo-6.21201 table.
const EMBEDDED: [(u32, u32, &[u32]); 15] = [
    (1, 0, &[1]),
    (2, 1, &[1, 3]),
    (3, 1, &[1, 3, 1]),
    (3, 2, &[1, 1, 1]),
    (4, 1, &[1, 1, 3, 3]),
    (4, 4, &[1, 3, 5, 13]),
    (5, 2, &[1, 1, 5, 5, 17]),
    (5, 4, &[1, 1, 5, 5, 5]),
    (5, 7, &[1, 1, 7, 11, 19]),
    (5, 11, &[1, 1, 5, 1, 1]),
    (5, 13, &[1, 1, 1, 3, 11]),
    (5, 14, &[1, 3, 5, 5, 31]),
    (6, 1, &[1, 3, 3, 9, 7, 49]),
    (6, 13, &[1, 1, 1, 15, 21, 21]),
    (6, 16, &[1, 3, 1, 13, 27, 49]),
];

impl DirectionNumbers {
    /// The built-in table, good for `d <= 16`.
    pub fn embedded() -> Self {
        let rows = EMBEDDED
            .iter()
            .map(|&(s, a, m)| DirectionRow { s, a, m: m.to_vec() })
            .collect();
        DirectionNumbers { rows }
    }

    /// Parses the usual text format: a header line, then rows
    /// `d s a m_1 … m_s` with `d = 2, 3, …` in order.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |line: usize, msg: String| Error::DirectionNumbers(format!("line {line}: {msg}"));
        let mut rows = Vec::new();
        for (k, line) in text.lines().enumerate().skip(1) {
            let line_no = k + 1;
            let fields: Vec<u32> = line
                .split_whitespace()
                .map(|t| t.parse::<u32>().map_err(|e| bad(line_no, format!("`{t}`: {e}"))))
                .collect::<Result<_>>()?;
            if fields.is_empty() {
                continue;
            }
            if fields.len() < 4 {
                return Err(bad(line_no, "expected `d s a m_1 … m_s`".into()));
            }
            let (dim, s, a) = (fields[0], fields[1], fields[2]);
            let expected = rows.len() as u32 + 2;
            if dim != expected {
                return Err(bad(line_no, format!("dimension {dim} out of order, expected {expected}")));
            }
            let m = fields[3..].to_vec();
            if s == 0 || s as usize >= BITS || m.len() != s as usize {
                return Err(bad(line_no, format!("degree {s} with {} initial numbers", m.len())));
            }
            for (i, &mi) in m.iter().enumerate() {
                if mi % 2 == 0 || mi >= 1 << (i + 1) {
                    return Err(bad(line_no, format!("m_{} = {mi} must be odd and below 2^{}", i + 1, i + 1)));
                }
            }
            rows.push(DirectionRow { s, a, m });
        }
        Ok(DirectionNumbers { rows })
    }

    pub fn load(path: &Path) -> Result<Self> {
        DirectionNumbers::parse(&std::fs::read_to_string(path)?)
    }

    /// Largest supported dimension.
    pub fn max_dim(&self) -> usize {
        self.rows.len() + 1
    }

    /// Direction integers `v_1 … v_32` of dimension `j` (0-based), left
    /// aligned in 32 bits.
    fn directions(&self, j: usize) -> [u32; BITS] {
        let mut m = [0u32; BITS];
        if j == 0 {
            m = [1; BITS];
        } else {
            let row = &self.rows[j - 1];
            let s = row.s as usize;
            m[..s].copy_from_slice(&row.m);
            for k in s..BITS {
                let mut next = m[k - s] ^ (m[k - s] << s);
                for r in 1..s {
                    if row.a >> (s - 1 - r) & 1 == 1 {
                        next ^= m[k - r] << r;
                    }
                }
                m[k] = next;
            }
        }
        let mut v = [0u32; BITS];
        for (k, slot) in v.iter_mut().enumerate() {
            *slot = m[k] << (BITS - 1 - k);
        }
        v
    }
}

/// The first `n` points of the Sobol' sequence in dimension `d`, starting
/// with the origin.
pub fn sobol(n: usize, d: usize, dirnums: &DirectionNumbers) -> Result<PointSet> {
    if n == 0 || d == 0 {
        return Err(Error::EmptyPointSet);
    }
    if d > dirnums.max_dim() {
        return Err(Error::SobolDimension {
            requested: d,
            available: dirnums.max_dim(),
        });
    }
    if n as u64 > 1 << BITS {
        return Err(Error::Config(format!("at most 2^{BITS} Sobol' points")));
    }
    let scale = (BITS as f64).exp2().recip();
    let dirs: Vec<[u32; BITS]> = (0..d).map(|j| dirnums.directions(j)).collect();
    let mut coords = Vec::with_capacity(n * d);
    for i in 0..n as u64 {
        for v in &dirs {
            let mut x = 0u32;
            let mut bits = i;
            let mut k = 0;
            while bits != 0 {
                if bits & 1 == 1 {
                    x ^= v[k];
                }
                bits >>= 1;
                k += 1;
            }
            coords.push(f64::from(x) * scale);
        }
    }
    PointSet::new(d, coords)
}
