use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::arithmetic::frac;
use crate::error::{Error, Result};

/// Degree-one circle diffeomorphism
/// `h(x) = x + sum_n (a_n sin 2 pi n x + b_n cos 2 pi n x) / (2 pi n)`.
///
/// With `sum (|a_n| + |b_n|) < 1` the derivative
/// `h'(x) = 1 + sum (a_n cos 2 pi n x - b_n sin 2 pi n x)` stays positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConjugacy", into = "RawConjugacy")]
pub struct ConjugacyDiffeo {
    a: Vec<f64>,
    b: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawConjugacy {
    a: Vec<f64>,
    #[serde(default)]
    b: Vec<f64>,
}

impl TryFrom<RawConjugacy> for ConjugacyDiffeo {
    type Error = Error;
    fn try_from(r: RawConjugacy) -> Result<Self> {
        ConjugacyDiffeo::new(r.a, r.b)
    }
}

impl From<ConjugacyDiffeo> for RawConjugacy {
    fn from(h: ConjugacyDiffeo) -> Self {
        RawConjugacy { a: h.a, b: h.b }
    }
}

const NEWTON_CAP: usize = 50;
const INVERSE_TOL: f64 = 1e-13;

impl ConjugacyDiffeo {
    pub fn new(mut a: Vec<f64>, mut b: Vec<f64>) -> Result<Self> {
        let n = a.len().max(b.len());
        a.resize(n, 0.0);
        b.resize(n, 0.0);
        if a.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "non-finite conjugacy coefficient".into(),
            ));
        }
        let total: f64 = a.iter().chain(&b).map(|v| v.abs()).sum();
        if total >= 1.0 {
            return Err(Error::InvalidArgument(format!(
                "conjugacy coefficients must satisfy sum |a_n| + |b_n| < 1, got {total}"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn identity() -> Self {
        Self {
            a: Vec::new(),
            b: Vec::new(),
        }
    }

    /// `h(x) = x + amplitude * sin(2 pi x) / (2 pi)`.
    pub fn single_mode(amplitude: f64) -> Result<Self> {
        Self::new(vec![amplitude], Vec::new())
    }

    pub fn coefficient_sum(&self) -> f64 {
        self.a.iter().chain(&self.b).map(|v| v.abs()).sum()
    }

    pub fn modes(&self) -> usize {
        self.a.len()
    }

    /// Periodic part `h(x) - x`.
    pub fn displacement(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (k, (a, b)) in self.a.iter().zip(&self.b).enumerate() {
            let n = (k + 1) as f64;
            let (s, c) = (TAU * frac(n * x)).sin_cos();
            acc += (a * s + b * c) / (TAU * n);
        }
        acc
    }

    /// The lift `R -> R`.
    pub fn eval(&self, x: f64) -> f64 {
        x + self.displacement(x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let mut acc = 1.0;
        for (k, (a, b)) in self.a.iter().zip(&self.b).enumerate() {
            let n = (k + 1) as f64;
            let (s, c) = (TAU * frac(n * x)).sin_cos();
            acc += a * c - b * s;
        }
        acc
    }

    /// Inverse of the lift by safeguarded Newton, started from `y`.
    ///
    /// The root lies within `sum/(2 pi)` of `y`, which brackets it; steps
    /// leaving the bracket fall back to bisection.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if self.a.is_empty() {
            return Ok(y);
        }
        let r = self.coefficient_sum() / TAU + 1e-12;
        let (mut lo, mut hi) = (y - r, y + r);
        let mut x = y;
        for _ in 0..NEWTON_CAP {
            let f = self.eval(x) - y;
            if f == 0.0 {
                return Ok(x);
            }
            if f > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let mut next = x - f / self.derivative(x);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let step = (next - x).abs();
            x = next;
            if step <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let residual = (self.eval(x) - y).abs();
        if residual > INVERSE_TOL {
            return Err(Error::NewtonNonConvergence { x: y, residual });
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_inadmissible_coefficients() {
        assert!(ConjugacyDiffeo::new(vec![0.6], vec![0.5]).is_err());
        assert!(ConjugacyDiffeo::new(vec![0.2, 0.3], vec![0.1]).is_ok());
    }

    #[test]
    fn derivative_positive_and_inverse_accurate() {
        let h = ConjugacyDiffeo::new(vec![0.5, -0.2], vec![0.15, 0.1]).unwrap();
        for i in 0..10_000 {
            let x = i as f64 / 10_000.0;
            assert!(h.derivative(x) > 0.0);
            let y = h.eval(x);
            assert!((h.inverse(y).unwrap() - x).abs() < 1e-13);
        }
    }

    #[test]
    fn lift_has_degree_one() {
        let h = ConjugacyDiffeo::single_mode(0.2).unwrap();
        for &x in &[-1.3, 0.0, 0.4, 2.7] {
            assert!((h.eval(x + 1.0) - h.eval(x) - 1.0).abs() < 1e-12);
        }
    }
}
