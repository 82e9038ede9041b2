use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arithmetic::frac;
use crate::error::{Error, Result};
use crate::fourier::FourierSeries;
use crate::maps::ConjugacyDiffeo;
use crate::numeric::gauss_legendre;

/// Absolutely continuous probability measure on the circle, described on the
/// fundamental domain `[0, 1]`.
pub trait ContinuousMeasure: Sync {
    /// `G(x) = mu([0, x])` for `x` in `[0, 1]`.
    fn cdf(&self, x: f64) -> f64;

    /// Inverse of `cdf` on `[0, 1]`.
    fn quantile(&self, t: f64) -> f64;

    fn density(&self, x: f64) -> f64;

    /// `int_a^b |s - G(x)| dx` for `0 <= a <= b <= 1`.
    ///
    /// The integrand is smooth on either side of the crossing `G(z) = s`, so
    /// the default splits there and applies Gauss-Legendre panels.
    fn abs_deviation(&self, a: f64, b: f64, s: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let z = if s <= 0.0 {
            a
        } else if s >= 1.0 {
            b
        } else {
            self.quantile(s).clamp(a, b)
        };
        let f = |x: f64| (s - self.cdf(x)).abs();
        gauss_legendre(f, a, z, 1.0 / 64.0) + gauss_legendre(f, z, b, 1.0 / 64.0)
    }

    /// Rejects signed or unnormalized instances.
    fn check_probability(&self) -> Result<()> {
        Ok(())
    }
}

/// Lebesgue (Haar) measure on the circle.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Lebesgue;

impl ContinuousMeasure for Lebesgue {
    fn cdf(&self, x: f64) -> f64 {
        x.clamp(0.0, 1.0)
    }

    fn quantile(&self, t: f64) -> f64 {
        t.clamp(0.0, 1.0)
    }

    fn density(&self, _x: f64) -> f64 {
        1.0
    }

    fn abs_deviation(&self, a: f64, b: f64, s: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let z = s.clamp(a, b);
        (z - a) * (s - 0.5 * (a + z)) + (b - z) * (0.5 * (z + b) - s)
    }
}

/// Density given by a real trigonometric polynomial.
///
/// Probability densities have mean coefficient 1 and are non-negative;
/// zero-mass signed densities (response densities) are also representable
/// but rejected by transport computations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FourierDensity {
    series: FourierSeries,
}

impl FourierDensity {
    /// Probability density; checks `c(0) = 1` and non-negativity on a grid
    /// fine enough to resolve the highest mode.
    pub fn probability(series: FourierSeries) -> Result<Self> {
        let d = FourierDensity { series };
        d.check_probability()?;
        Ok(d)
    }

    /// Any real density, including signed zero-mass ones.
    pub fn signed(series: FourierSeries) -> Self {
        FourierDensity { series }
    }

    pub fn series(&self) -> &FourierSeries {
        &self.series
    }

    pub fn coefficient(&self, n: i64) -> Complex64 {
        self.series.coefficient(n)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.series.eval(x)
    }

    /// `int_0^1 rho dm`.
    pub fn total_mass(&self) -> f64 {
        self.series.mean()
    }
}

impl ContinuousMeasure for FourierDensity {
    fn cdf(&self, x: f64) -> f64 {
        let c = self.series.coefficients();
        let mut acc = c[0].re * x;
        for (n, cn) in c.iter().enumerate().skip(1) {
            if cn.re == 0.0 && cn.im == 0.0 {
                continue;
            }
            let w = TAU * n as f64;
            let (s, co) = (TAU * frac(n as f64 * x)).sin_cos();
            // (e^{iwx} - 1) / (iw)
            let prim = Complex64::new(s / w, (1.0 - co) / w);
            acc += 2.0 * (cn * prim).re;
        }
        acc
    }

    fn quantile(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return 1.0;
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        let mut x = t;
        for _ in 0..100 {
            let g = self.cdf(x) - t;
            if g == 0.0 {
                return x;
            }
            if g > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let d = self.density(x);
            let mut next = if d > 0.0 { x - g / d } else { f64::NAN };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 1e-17 || hi - lo <= 1e-16 {
                return next;
            }
            x = next;
        }
        x
    }

    fn density(&self, x: f64) -> f64 {
        self.series.eval(x)
    }

    fn check_probability(&self) -> Result<()> {
        if (self.series.mean() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidMeasure(format!(
                "density has total mass {}",
                self.series.mean()
            )));
        }
        let m = 64 * self.series.n_max() + 256;
        let min = (0..m)
            .map(|i| self.series.eval(i as f64 / m as f64))
            .fold(f64::INFINITY, f64::min);
        if min < -1e-12 {
            return Err(Error::InvalidMeasure(format!(
                "density takes negative value {min}"
            )));
        }
        Ok(())
    }
}

/// `h_* m`, the invariant measure of the conjugated rotation
/// `h o R_alpha o h^{-1}`, with density `1 / h'(h^{-1}(x))`.
#[derive(Debug, Clone, PartialEq)]
pub struct PushforwardLebesgue {
    h: ConjugacyDiffeo,
    /// `h^{-1}(0)` on the lift.
    base: f64,
}

impl PushforwardLebesgue {
    pub fn new(h: ConjugacyDiffeo) -> Result<Self> {
        let base = h.inverse(0.0)?;
        Ok(Self { h, base })
    }

    pub fn conjugacy(&self) -> &ConjugacyDiffeo {
        &self.h
    }
}

impl ContinuousMeasure for PushforwardLebesgue {
    fn cdf(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        // the inverse exists for every admissible h; identity as a fallback
        let y = self.h.inverse(x).unwrap_or(x);
        (y - self.base).clamp(0.0, 1.0)
    }

    fn quantile(&self, t: f64) -> f64 {
        self.h.eval(t.clamp(0.0, 1.0) + self.base).clamp(0.0, 1.0)
    }

    fn density(&self, x: f64) -> f64 {
        let y = self.h.inverse(frac(x)).unwrap_or(x);
        1.0 / self.h.derivative(y)
    }
}
