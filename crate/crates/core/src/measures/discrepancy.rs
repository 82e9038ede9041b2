use serde::{Deserialize, Serialize};

use crate::arithmetic::{frac_mul_add, CirclePoint};
use crate::error::{Error, Result};

/// Largest point count for the exact pairwise algorithm.
pub const EXACT_LIMIT: usize = 10_000;

/// Extreme discrepancy `sup_{[a,b]} |#{x_i in [a,b]}/N - (b - a)|`, either
/// exact (`lower == upper`) or as a certified enclosure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub n: usize,
    pub lower: f64,
    pub upper: f64,
}

impl Discrepancy {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    /// The exact value, or the upper end of the enclosure.
    pub fn value(&self) -> f64 {
        self.upper
    }
}

fn sorted_values(points: &[CirclePoint]) -> Result<Vec<f64>> {
    if points.is_empty() {
        return Err(Error::InvalidArgument(
            "discrepancy of an empty point set".into(),
        ));
    }
    let mut xs: Vec<f64> = points.iter().map(|p| p.value()).collect();
    xs.sort_by(f64::total_cmp);
    Ok(xs)
}

/// Discrepancy over intervals `[a, b]` of `[0, 1]`.
///
/// Exact for `N <= 10^4` by scanning all pairs of points as endpoints:
/// closed intervals `[x_i, x_j]` give the excess of points and open intervals
/// between consecutive candidates (including 0 and 1) give the deficit.
/// Larger sets get `[max(D*, 1/N), min(2 D*, 1)]`.
pub fn discrepancy(points: &[CirclePoint]) -> Result<Discrepancy> {
    let xs = sorted_values(points)?;
    let n = xs.len();
    if n > EXACT_LIMIT {
        let ds = star_of_sorted(&xs);
        let inv = 1.0 / n as f64;
        return Ok(Discrepancy {
            n,
            lower: ds.max(inv),
            upper: (2.0 * ds).min(1.0),
        });
    }
    let nf = n as f64;
    let mut best: f64 = 0.0;
    for i in 0..n {
        let xi = xs[i];
        for (j, &xj) in xs.iter().enumerate().skip(i) {
            // [x_i, x_j] holds at least j - i + 1 points
            best = best.max((j - i + 1) as f64 / nf - (xj - xi));
        }
    }
    // open gaps with virtual endpoints 0 and 1
    let mut ext = Vec::with_capacity(n + 2);
    ext.push(0.0);
    ext.extend_from_slice(&xs);
    ext.push(1.0);
    for i in 0..ext.len() {
        let xi = ext[i];
        for (j, &xj) in ext.iter().enumerate().skip(i + 1) {
            best = best.max((xj - xi) - (j - i - 1) as f64 / nf);
        }
    }
    let d = best.min(1.0);
    Ok(Discrepancy {
        n,
        lower: d,
        upper: d,
    })
}

fn star_of_sorted(xs: &[f64]) -> f64 {
    let nf = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let k = (i + 1) as f64;
            (k / nf - x).max(x - (k - 1.0) / nf)
        })
        .fold(0.0, f64::max)
}

/// Star discrepancy `sup_t |#{x_i < t}/N - t|` by the sorted-order formula.
pub fn star_discrepancy(points: &[CirclePoint]) -> Result<f64> {
    Ok(star_of_sorted(&sorted_values(points)?))
}

/// `x_i = x0 + i alpha` mod 1 for `i = 1..=n`, each phase computed exactly
/// before the final rounding. The starting point itself is not included.
pub fn rotation_orbit(alpha: f64, x0: CirclePoint, n: usize) -> Vec<CirclePoint> {
    (1..=n as u64)
        .map(|k| CirclePoint::wrap(frac_mul_add(k, alpha, x0.value())))
        .collect()
}
