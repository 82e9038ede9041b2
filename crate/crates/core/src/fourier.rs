//! Real trigonometric polynomials stored by their non-negative Fourier
//! coefficients; `c(-n)` is always the conjugate of `c(n)`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arithmetic::frac;
use crate::error::{Error, Result};

/// Real-valued trigonometric polynomial `sum_{|n| <= n_max} c(n) e^{2 pi i n x}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries {
    /// `coeffs[n]` is `c(n)` for `0 <= n <= n_max`; `coeffs[0]` is real.
    coeffs: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct Coefficient {
    n: usize,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct FourierRepr {
    coefficients: Vec<Coefficient>,
}

impl Serialize for FourierSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FourierRepr {
            coefficients: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| Coefficient {
                    n,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FourierSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = FourierRepr::deserialize(d)?;
        let n_max = repr.coefficients.iter().map(|c| c.n).max().unwrap_or(0);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n_max.max(1) + 1];
        for c in repr.coefficients {
            coeffs[c.n] += Complex64::new(c.re, c.im);
        }
        coeffs[0].im = 0.0;
        Ok(FourierSeries { coeffs })
    }
}

impl FourierSeries {
    /// Zero polynomial with room for frequencies up to `n_max` (at least 1).
    pub fn zero(n_max: usize) -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); n_max.max(1) + 1],
        }
    }

    pub fn constant(c: f64) -> Self {
        let mut s = Self::zero(1);
        s.coeffs[0] = Complex64::new(c, 0.0);
        s
    }

    /// From complex coefficients `c(0), c(1), ..., c(n_max)`.
    pub fn from_coefficients(mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("empty coefficient list".into()));
        }
        if coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::InvalidArgument(
                "non-finite Fourier coefficient".into(),
            ));
        }
        if coeffs[0].im != 0.0 {
            return Err(Error::InvalidArgument(
                "mean coefficient of a real series must be real".into(),
            ));
        }
        if coeffs.len() < 2 {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        Ok(Self { coeffs })
    }

    /// `a0 + sum_n (cos[n-1] cos 2 pi n x + sin[n-1] sin 2 pi n x)`.
    pub fn from_cos_sin(a0: f64, cos: &[f64], sin: &[f64]) -> Self {
        let n_max = cos.len().max(sin.len()).max(1);
        let mut s = Self::zero(n_max);
        s.coeffs[0] = Complex64::new(a0, 0.0);
        for n in 1..=n_max {
            let a = cos.get(n - 1).copied().unwrap_or(0.0);
            let b = sin.get(n - 1).copied().unwrap_or(0.0);
            s.coeffs[n] = Complex64::new(a / 2.0, -b / 2.0);
        }
        s
    }

    /// `amplitude * cos(2 pi n x)`.
    pub fn cosine(n: usize, amplitude: f64) -> Self {
        let mut cos = vec![0.0; n.max(1)];
        if n == 0 {
            return Self::constant(amplitude);
        }
        cos[n - 1] = amplitude;
        Self::from_cos_sin(0.0, &cos, &[])
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Highest frequency with a nonzero coefficient.
    pub fn degree(&self) -> usize {
        (1..self.coeffs.len())
            .rev()
            .find(|&n| self.coeffs[n] != Complex64::new(0.0, 0.0))
            .unwrap_or(0)
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// `c(n)` for any integer `n`.
    pub fn coefficient(&self, n: i64) -> Complex64 {
        let k = n.unsigned_abs() as usize;
        match self.coeffs.get(k) {
            None => Complex64::new(0.0, 0.0),
            Some(c) if n < 0 => c.conj(),
            Some(&c) => c,
        }
    }

    /// Non-negative half of the coefficient vector.
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = self.coeffs[0].re;
        for (n, c) in self.coeffs.iter().enumerate().skip(1) {
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            let (s, co) = (TAU * frac(n as f64 * x)).sin_cos();
            acc += 2.0 * (c.re * co - c.im * s);
        }
        acc
    }

    pub fn derivative(&self) -> FourierSeries {
        let mut d = Self::zero(self.n_max());
        for (n, c) in self.coeffs.iter().enumerate().skip(1) {
            d.coeffs[n] = *c * Complex64::new(0.0, TAU * n as f64);
        }
        d
    }

    /// Upper bound `|c(0)| + 2 sum |c(n)|` on the sup norm.
    pub fn sup_bound(&self) -> f64 {
        self.coeffs[0].norm() + 2.0 * self.coeffs.iter().skip(1).map(|c| c.norm()).sum::<f64>()
    }

    /// Upper bound on the sup norm of the derivative.
    pub fn derivative_sup_bound(&self) -> f64 {
        2.0 * self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, c)| TAU * n as f64 * c.norm())
            .sum::<f64>()
    }

    /// `x -> f(x + shift)`.
    pub fn shifted(&self, shift: f64) -> FourierSeries {
        let mut out = self.clone();
        for (n, c) in out.coeffs.iter_mut().enumerate().skip(1) {
            *c *= Complex64::from_polar(1.0, TAU * frac(n as f64 * shift));
        }
        out
    }

    /// `int_0^1 f(x) g(x) dx`.
    pub fn pairing(&self, other: &FourierSeries) -> f64 {
        let mut acc = self.mean() * other.mean();
        for n in 1..=self.n_max().min(other.n_max()) {
            acc += 2.0 * (self.coeffs[n].conj() * other.coeffs[n]).re;
        }
        acc
    }

    pub fn scale(&self, k: f64) -> FourierSeries {
        FourierSeries {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    pub fn add(&self, other: &FourierSeries) -> FourierSeries {
        let n = self.n_max().max(other.n_max());
        let mut out = Self::zero(n);
        for k in 0..=n {
            out.coeffs[k] = self.coefficient(k as i64) + other.coefficient(k as i64);
        }
        out
    }
}
