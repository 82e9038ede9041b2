//! Circular `W_1` between probability measures on `R/Z`.
//!
//! With `F`, `G` the distribution functions on `[0, 1)`,
//! `W_1 = min_c int_0^1 |F - G - c| dx`, attained at a median of `F - G`
//! with respect to Lebesgue measure.

use super::{AtomicMeasure, ContinuousMeasure, FourierDensity, Lebesgue, PushforwardLebesgue};
use crate::error::Result;
use crate::numeric::Accum;

/// Borrowed view of a measure accepted by [`wasserstein`].
#[derive(Clone, Copy)]
pub enum MeasureRef<'a> {
    Atomic(&'a AtomicMeasure),
    Continuous(&'a dyn ContinuousMeasure),
}

impl<'a> From<&'a AtomicMeasure> for MeasureRef<'a> {
    fn from(m: &'a AtomicMeasure) -> Self {
        MeasureRef::Atomic(m)
    }
}

impl<'a> From<&'a Lebesgue> for MeasureRef<'a> {
    fn from(m: &'a Lebesgue) -> Self {
        MeasureRef::Continuous(m)
    }
}

impl<'a> From<&'a FourierDensity> for MeasureRef<'a> {
    fn from(m: &'a FourierDensity) -> Self {
        MeasureRef::Continuous(m)
    }
}

impl<'a> From<&'a PushforwardLebesgue> for MeasureRef<'a> {
    fn from(m: &'a PushforwardLebesgue) -> Self {
        MeasureRef::Continuous(m)
    }
}

/// Sample count for the continuous-vs-continuous case.
const DENSE_SAMPLES: usize = 1 << 16;

pub fn wasserstein<'a, 'b>(
    mu: impl Into<MeasureRef<'a>>,
    nu: impl Into<MeasureRef<'b>>,
) -> Result<f64> {
    use MeasureRef::*;
    match (mu.into(), nu.into()) {
        (Atomic(a), Atomic(b)) => Ok(atomic_atomic(a, b)),
        (Atomic(a), Continuous(c)) | (Continuous(c), Atomic(a)) => {
            c.check_probability()?;
            Ok(atomic_continuous(a, c))
        }
        (Continuous(c1), Continuous(c2)) => {
            c1.check_probability()?;
            c2.check_probability()?;
            Ok(continuous_continuous(c1, c2))
        }
    }
}

/// `min_c sum len_k |v_k - c|` over a step function.
fn l1_median_deviation(mut steps: Vec<(f64, f64)>) -> f64 {
    steps.retain(|s| s.0 > 0.0);
    if steps.is_empty() {
        return 0.0;
    }
    let total: f64 = steps.iter().map(|s| s.0).sum();
    let mut sorted = steps.clone();
    sorted.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut acc = 0.0;
    let mut c = sorted[sorted.len() - 1].1;
    for &(len, v) in &sorted {
        acc += len;
        if acc >= 0.5 * total {
            c = v;
            break;
        }
    }
    let mut out = Accum::default();
    for (len, v) in steps {
        out.add(len * (v - c).abs());
    }
    out.value()
}

fn atomic_atomic(a: &AtomicMeasure, b: &AtomicMeasure) -> f64 {
    let (xa, xb) = (a.atoms(), b.atoms());
    let mut steps = Vec::with_capacity(xa.len() + xb.len() + 1);
    let (mut i, mut j) = (0, 0);
    let mut prev = 0.0;
    let mut diff = Accum::default();
    while i < xa.len() || j < xb.len() {
        let pa = xa.get(i).map_or(f64::INFINITY, |x| x.position.value());
        let pb = xb.get(j).map_or(f64::INFINITY, |x| x.position.value());
        let p = pa.min(pb);
        steps.push((p - prev, diff.value()));
        if pa == p {
            diff.add(xa[i].weight);
            i += 1;
        }
        if pb == p {
            diff.add(-xb[j].weight);
            j += 1;
        }
        prev = p;
    }
    steps.push((1.0 - prev, diff.value()));
    l1_median_deviation(steps)
}

fn atomic_continuous(a: &AtomicMeasure, c: &dyn ContinuousMeasure) -> f64 {
    // pieces [t_k, t_{k+1}) with atomic CDF value A_k
    let atoms = a.atoms();
    let mut pieces = Vec::with_capacity(atoms.len() + 1);
    let mut mass = Accum::default();
    let mut prev = 0.0;
    for atom in atoms {
        let t = atom.position.value();
        pieces.push((prev, t, mass.value()));
        mass.add(atom.weight);
        prev = t;
    }
    pieces.push((prev, 1.0, mass.value()));
    pieces.retain(|p| p.1 > p.0);

    // Lebesgue measure of {A - G < c}; non-decreasing in c
    let below = |cc: f64| -> f64 {
        let mut acc = Accum::default();
        for &(lo, hi, v) in &pieces {
            let s = v - cc;
            let z = if s <= 0.0 {
                lo
            } else if s >= 1.0 {
                hi
            } else {
                c.quantile(s).clamp(lo, hi)
            };
            acc.add(hi - z);
        }
        acc.value()
    };
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid) < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let cc = 0.5 * (lo + hi);
    let mut acc = Accum::default();
    for &(lo, hi, v) in &pieces {
        acc.add(c.abs_deviation(lo, hi, v - cc));
    }
    acc.value()
}

fn continuous_continuous(c1: &dyn ContinuousMeasure, c2: &dyn ContinuousMeasure) -> f64 {
    let h = 1.0 / DENSE_SAMPLES as f64;
    let steps = (0..DENSE_SAMPLES)
        .map(|k| {
            let x = (k as f64 + 0.5) * h;
            (h, c1.cdf(x) - c2.cdf(x))
        })
        .collect();
    l1_median_deviation(steps)
}
