use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::discrepancy::{discrepancy, rotation_orbit, Discrepancy};
use crate::arithmetic::{frac, golden_mean, CirclePoint};
use crate::error::{Error, Result};
use crate::numeric::Accum;

/// `amplitude * cos(2 pi frequency x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub amplitude: f64,
    pub frequency: u128,
}

impl TrigTerm {
    /// `frequency * x mod 1`. Power-of-two frequencies scale exactly; others
    /// must fit in 53 bits.
    fn phase(&self, x: f64) -> f64 {
        let f = self.frequency;
        if f.is_power_of_two() {
            let k = f.trailing_zeros() as i32;
            frac(x * 2f64.powi(k))
        } else {
            crate::arithmetic::frac_mul_add(f as u64, x, 0.0)
        }
    }

    fn eval(&self, x: f64) -> f64 {
        self.amplitude * (TAU * self.phase(x)).cos()
    }

    /// Variation over one period of the circle: `2 f` monotone laps of
    /// height `2 |A|`.
    pub fn variation(&self) -> f64 {
        4.0 * self.amplitude.abs() * self.frequency as f64
    }
}

/// Observable with closed-form total variation on the circle and known
/// Lebesgue integral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum BVObservable {
    Constant {
        value: f64,
    },
    /// Indicator of the closed arc `[a, b]`, `0 <= a <= b <= 1`.
    Indicator {
        a: f64,
        b: f64,
    },
    /// Periodic linear interpolation through `(x_k, y_k)`, `x` increasing in
    /// `[0, 1)`.
    PiecewiseLinear {
        knots: Vec<(f64, f64)>,
    },
    /// Sum of cosine terms with positive integer frequencies.
    Trig {
        terms: Vec<TrigTerm>,
    },
}

impl BVObservable {
    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        if !(0.0 <= a && a <= b && b <= 1.0) {
            return Err(Error::InvalidArgument(format!("bad arc [{a}, {b}]")));
        }
        Ok(BVObservable::Indicator { a, b })
    }

    pub fn piecewise_linear(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty()
            || knots
                .windows(2)
                .any(|w| w[0].0.is_nan() || w[0].0 >= w[1].0)
            || knots[0].0 < 0.0
            || knots[knots.len() - 1].0 >= 1.0
            || knots.iter().any(|k| !k.0.is_finite() || !k.1.is_finite())
        {
            return Err(Error::InvalidArgument(
                "knots must be finite with increasing positions in [0, 1)".into(),
            ));
        }
        Ok(BVObservable::PiecewiseLinear { knots })
    }

    pub fn trig(terms: Vec<TrigTerm>) -> Result<Self> {
        for t in &terms {
            if t.frequency == 0 || !t.amplitude.is_finite() {
                return Err(Error::InvalidArgument(
                    "trig terms need positive frequency and finite amplitude".into(),
                ));
            }
            if !t.frequency.is_power_of_two() && t.frequency > (1u128 << 53) {
                return Err(Error::InvalidArgument(format!(
                    "frequency {} is neither a power of two nor below 2^53",
                    t.frequency
                )));
            }
        }
        Ok(BVObservable::Trig { terms })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = frac(x);
        match self {
            BVObservable::Constant { value } => *value,
            BVObservable::Indicator { a, b } => {
                if *a <= x && x <= *b || *b == 1.0 && x == 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            BVObservable::PiecewiseLinear { knots } => {
                let k = knots.partition_point(|p| p.0 <= x);
                let (x0, y0, x1, y1) = if k == 0 || k == knots.len() {
                    let (l, f) = (knots[knots.len() - 1], knots[0]);
                    (l.0, l.1, f.0 + 1.0, f.1)
                } else {
                    (knots[k - 1].0, knots[k - 1].1, knots[k].0, knots[k].1)
                };
                let xx = if x < x0 { x + 1.0 } else { x };
                if x1 == x0 {
                    y0
                } else {
                    y0 + (y1 - y0) * (xx - x0) / (x1 - x0)
                }
            }
            BVObservable::Trig { terms } => {
                let mut acc = Accum::default();
                for t in terms {
                    acc.add(t.eval(x));
                }
                acc.value()
            }
        }
    }

    /// Total variation on the circle; for trig sums this is the sum of the
    /// per-term variations, an upper bound.
    pub fn variation(&self) -> f64 {
        match self {
            BVObservable::Constant { .. } => 0.0,
            BVObservable::Indicator { a, b } => {
                if b - a >= 1.0 {
                    0.0
                } else {
                    2.0
                }
            }
            BVObservable::PiecewiseLinear { knots } => {
                let n = knots.len();
                (0..n)
                    .map(|k| (knots[(k + 1) % n].1 - knots[k].1).abs())
                    .sum()
            }
            BVObservable::Trig { terms } => terms.iter().map(TrigTerm::variation).sum(),
        }
    }

    /// `int f dm`.
    pub fn integral(&self) -> f64 {
        match self {
            BVObservable::Constant { value } => *value,
            BVObservable::Indicator { a, b } => b - a,
            BVObservable::PiecewiseLinear { knots } => {
                let n = knots.len();
                let mut acc = 0.0;
                for k in 0..n {
                    let (x0, y0) = knots[k];
                    let (x1, y1) = if k + 1 == n {
                        (knots[0].0 + 1.0, knots[0].1)
                    } else {
                        knots[k + 1]
                    };
                    acc += 0.5 * (y0 + y1) * (x1 - x0);
                }
                acc
            }
            BVObservable::Trig { .. } => 0.0,
        }
    }
}

/// Outcome of a Denjoy-Koksma check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DkReport {
    /// `|(1/N) sum f(x_i) - int f dm|`.
    pub lhs: f64,
    /// `V(f) * D_N`, using the upper end of the discrepancy enclosure.
    pub bound: f64,
    pub ok: bool,
    pub discrepancy: Discrepancy,
}

pub fn dk_check(f: &BVObservable, points: &[CirclePoint]) -> Result<DkReport> {
    let d = discrepancy(points)?;
    let mut acc = Accum::default();
    for p in points {
        acc.add(f.eval(p.value()));
    }
    let lhs = (acc.value() / points.len() as f64 - f.integral()).abs();
    let bound = f.variation() * d.value();
    Ok(DkReport {
        lhs,
        bound,
        ok: lhs <= bound + 1e-12,
        discrepancy: d,
    })
}

/// One randomized Denjoy-Koksma case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DkCase {
    pub observable: BVObservable,
    pub x0: f64,
    pub n: usize,
    pub report: DkReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DkSuiteReport {
    pub cases: usize,
    pub violations: usize,
    /// Largest `lhs / bound` seen.
    pub worst_ratio: f64,
    pub failures: Vec<DkCase>,
}

/// Random observable from the library: arcs, piecewise linear loops, low
/// frequency trig sums and the two-term dyadic lacunary sum.
pub fn random_observable<R: Rng>(rng: &mut R) -> BVObservable {
    match rng.random_range(0..4) {
        0 => {
            let a = rng.random::<f64>();
            let b = rng.random::<f64>();
            BVObservable::Indicator {
                a: a.min(b),
                b: a.max(b),
            }
        }
        1 => {
            let k = rng.random_range(2..8);
            let mut xs: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
            xs.sort_by(f64::total_cmp);
            xs.dedup();
            let knots = xs
                .into_iter()
                .map(|x| (x, rng.random_range(-1.0..1.0)))
                .collect();
            BVObservable::PiecewiseLinear { knots }
        }
        2 => {
            let terms = (0..rng.random_range(1..4))
                .map(|_| TrigTerm {
                    amplitude: rng.random_range(-1.0..1.0),
                    frequency: rng.random_range(1..32),
                })
                .collect();
            BVObservable::Trig { terms }
        }
        _ => lacunary_observable(2).expect("two terms are in range"),
    }
}

/// `cases` Birkhoff sums along golden rotation orbits from random starting
/// points, with lengths log-uniform in `[10, 1e5]`.
pub fn dk_suite(cases: usize, seed: u64) -> Result<DkSuiteReport> {
    let alpha = golden_mean();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<(BVObservable, f64, usize)> = (0..cases)
        .map(|_| {
            let f = random_observable(&mut rng);
            let x0 = rng.random::<f64>();
            let n = 10f64.powf(rng.random_range(1.0..=5.0)).round() as usize;
            (f, x0, n)
        })
        .collect();
    let done = draws
        .into_par_iter()
        .map(|(observable, x0, n)| {
            let pts = rotation_orbit(alpha, CirclePoint::wrap(x0), n);
            let report = dk_check(&observable, &pts)?;
            Ok(DkCase {
                observable,
                x0,
                n,
                report,
            })
        })
        .collect::<Result<Vec<DkCase>>>()?;
    let worst_ratio = done
        .iter()
        .filter(|c| c.report.bound > 0.0)
        .map(|c| c.report.lhs / c.report.bound)
        .fold(0.0, f64::max);
    let failures: Vec<DkCase> = done.into_iter().filter(|c| !c.report.ok).collect();
    Ok(DkSuiteReport {
        cases,
        violations: failures.len(),
        worst_ratio,
        failures,
    })
}

/// `psi(x) = sum_{i=1}^{terms} 2^{-2^{2i+1}} cos(2^{2^{2i}} 2 pi x)`, i.e.
/// amplitude `f_i^{-2}` at frequency `f_i = 2^{2^{2i}}`.
pub fn lacunary_observable(terms: u32) -> Result<BVObservable> {
    if terms == 0 {
        return Err(Error::InvalidArgument("need at least one term".into()));
    }
    if terms > 3 {
        return Err(Error::InvalidArgument(format!(
            "{terms} terms requested: the frequency 2^256 of term 4 does not fit in 128 bits"
        )));
    }
    let list = (1..=terms)
        .map(|i| {
            let e = 1u32 << (2 * i);
            TrigTerm {
                amplitude: 2f64.powi(-2 * e as i32),
                frequency: 1u128 << e,
            }
        })
        .collect();
    BVObservable::trig(list)
}

/// Exact `(1/q) sum_{k<q} f(k/q)` for a trig observable: by orthogonality of
/// roots of unity only terms with `q | frequency` survive, each contributing
/// its amplitude.
pub fn periodic_average_exact(f: &BVObservable, q: u64) -> Result<BigRational> {
    let BVObservable::Trig { terms } = f else {
        return Err(Error::InvalidArgument(
            "exact orbit averages are implemented for trig observables".into(),
        ));
    };
    if q == 0 {
        return Err(Error::InvalidArgument("q must be positive".into()));
    }
    let mut acc = BigRational::zero();
    for t in terms {
        if t.frequency % q as u128 == 0 {
            acc += BigRational::from_f64(t.amplitude).ok_or(Error::NonFinite(t.amplitude))?;
        }
    }
    Ok(acc)
}

/// `(1/2) (2^{-2^{2j}})^2` as an exact rational.
pub fn lacunary_lower_bound(j: u32) -> BigRational {
    let e = 2usize << (2 * j);
    BigRational::new(BigInt::from(1), BigInt::from(2) << e)
}
