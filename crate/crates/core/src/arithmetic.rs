//! Circle arithmetic, continued fractions and Diophantine-type estimation.
//!
//! Points of the circle are represented by their canonical representative in
//! `[0, 1)`. Rotation numbers enter as exact rationals (every `f64` is one),
//! so continued-fraction expansions and the approximation errors
//! `|alpha - p/q|` are computed with big integers and only rounded at the end.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the circle `R/Z`, stored as its representative in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CirclePoint(f64);

impl CirclePoint {
    pub const ZERO: CirclePoint = CirclePoint(0.0);

    /// Reduces `x` modulo 1.
    pub fn new(x: f64) -> Result<Self> {
        canonicalize(x)
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn dist(self, other: CirclePoint) -> f64 {
        circle_dist(self, other)
    }

    /// Reduction for values already known to be finite.
    #[inline]
    pub(crate) fn wrap(x: f64) -> Self {
        CirclePoint(frac(x))
    }
}

impl fmt::Display for CirclePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `x - floor(x)`, with the rounding case `-tiny -> 1.0` folded back to 0.
#[inline]
pub fn frac(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

pub fn canonicalize(x: f64) -> Result<CirclePoint> {
    if !x.is_finite() {
        return Err(Error::NonFinite(x));
    }
    Ok(CirclePoint(frac(x)))
}

#[inline]
pub fn circle_dist(x: CirclePoint, y: CirclePoint) -> f64 {
    let d = (x.0 - y.0).abs();
    d.min(1.0 - d)
}

/// Fractional part of `n * alpha + offset`. The product is split exactly with
/// an FMA so the result does not lose the `log2(n)` bits a plain multiply
/// would.
#[inline]
pub fn frac_mul_add(n: u64, alpha: f64, offset: f64) -> f64 {
    let nf = n as f64;
    let hi = nf * alpha;
    let lo = nf.mul_add(alpha, -hi);
    frac(frac(hi) + (lo + offset))
}

/// A real number in `(0, 1)` held exactly as `num / den`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactReal {
    num: BigUint,
    den: BigUint,
}

impl ExactReal {
    pub fn from_ratio(num: BigUint, den: BigUint) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        let g = num.gcd(&den);
        let (num, den) = (&num / &g, &den / &g);
        if num.is_zero() || num >= den {
            return Err(Error::InvalidArgument(
                "alpha must lie strictly inside (0, 1)".into(),
            ));
        }
        Ok(Self { num, den })
    }

    /// The exact binary rational carried by an `f64`.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::NonFinite(x));
        }
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha must lie strictly inside (0, 1), got {x}"
            )));
        }
        let bits = x.to_bits();
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac_bits = bits & ((1u64 << 52) - 1);
        let (mant, shift) = if exp == 0 {
            (frac_bits, 1074)
        } else {
            (frac_bits | (1u64 << 52), 1075 - exp)
        };
        let tz = (mant.trailing_zeros() as i64).min(shift);
        let num = BigUint::from(mant >> tz);
        let den = BigUint::one() << ((shift - tz) as usize);
        Self::from_ratio(num, den)
    }

    /// `sum_i 2^(-e_i)` for distinct positive exponents.
    pub fn dyadic_sum(exponents: &[u32]) -> Result<Self> {
        let max = *exponents
            .iter()
            .max()
            .ok_or_else(|| Error::InvalidArgument("empty dyadic sum".into()))?;
        let den = BigUint::one() << (max as usize);
        let mut num = BigUint::zero();
        for &e in exponents {
            if e == 0 {
                return Err(Error::InvalidArgument("exponent 0 gives alpha >= 1".into()));
            }
            num += BigUint::one() << ((max - e) as usize);
        }
        Self::from_ratio(num, den)
    }

    /// `sum_{i=1}^{terms} 2^(-2^(2i))`, the truncated very-Liouville-like
    /// number whose convergent denominators are `2^(2^(2i))`.
    pub fn lacunary(terms: u32) -> Result<Self> {
        if terms == 0 || terms > 4 {
            return Err(Error::InvalidArgument(
                "lacunary number supports 1..=4 terms".into(),
            ));
        }
        let exps: Vec<u32> = (1..=terms).map(|i| 1u32 << (2 * i)).collect();
        Self::dyadic_sum(&exps)
    }

    pub fn numerator(&self) -> &BigUint {
        &self.num
    }

    pub fn denominator(&self) -> &BigUint {
        &self.den
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.num, &self.den)
    }

    /// Sign of `self - p/q`.
    pub fn cmp_rational(&self, p: u64, q: u64) -> Ordering {
        let lhs = &self.num * BigUint::from(q);
        let rhs = BigUint::from(p) * &self.den;
        lhs.cmp(&rhs)
    }

    /// `|self - p/q|` rounded once to `f64`.
    pub fn distance_to(&self, p: u64, q: u64) -> f64 {
        let lhs = BigInt::from(&self.num * BigUint::from(q));
        let rhs = BigInt::from(BigUint::from(p) * &self.den);
        let diff = (lhs - rhs).magnitude().clone();
        ratio_to_f64(&diff, &(BigUint::from(q) * &self.den))
    }
}

impl FromStr for ExactReal {
    type Err = Error;

    /// Accepts `golden`, `silver` (= sqrt 2 - 1), `lacunary` (three terms),
    /// `lacunary:<terms>`, a fraction `p/q`, or a decimal literal.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "golden" => return Self::from_f64(golden_mean()),
            "silver" => return Self::from_f64(std::f64::consts::SQRT_2 - 1.0),
            "lacunary" => return Self::lacunary(3),
            _ => {}
        }
        if let Some(t) = s.strip_prefix("lacunary:") {
            let terms = t
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad term count in {s:?}")))?;
            return Self::lacunary(terms);
        }
        if let Some((p, q)) = s.split_once('/') {
            let p: BigUint = p
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad numerator in {s:?}")))?;
            let q: BigUint = q
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad denominator in {s:?}")))?;
            return Self::from_ratio(p, q);
        }
        let x: f64 = s
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("cannot parse alpha from {s:?}")))?;
        Self::from_f64(x)
    }
}

/// `(sqrt 5 - 1) / 2`.
pub fn golden_mean() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

/// Correctly scaled quotient of two big integers (about 1 ulp).
fn ratio_to_f64(n: &BigUint, d: &BigUint) -> f64 {
    if n.is_zero() {
        return 0.0;
    }
    let sn = n.bits().saturating_sub(64);
    let sd = d.bits().saturating_sub(64);
    let mn = (n >> sn).to_f64().unwrap_or(f64::INFINITY);
    let md = (d >> sd).to_f64().unwrap_or(f64::INFINITY);
    let e = sn as i64 - sd as i64;
    (mn / md) * 2f64.powi(e.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
}

/// One convergent `p/q` of a continued fraction together with `|alpha - p/q|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Convergent {
    pub p: u64,
    pub q: u64,
    pub delta: f64,
}

/// Continued fraction data and approximation exponents of a rotation number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiophantineProfile {
    pub alpha: f64,
    pub partial_quotients: Vec<u64>,
    pub convergents: Vec<Convergent>,
    pub gamma_hat: Option<f64>,
    /// Optional `(c, tau)`-Diophantine metadata; never used numerically.
    pub tau: Option<f64>,
    pub c: Option<f64>,
}

impl DiophantineProfile {
    pub fn with_diophantine_pair(mut self, c: f64, tau: f64) -> Self {
        self.c = Some(c);
        self.tau = Some(tau);
        self
    }

    pub fn convergent(&self, j: usize) -> Result<&Convergent> {
        self.convergents.get(j).ok_or(Error::IndexOutOfRange {
            index: j,
            available: self.convergents.len(),
        })
    }

    pub fn depth(&self) -> usize {
        self.convergents.len()
    }
}

/// Largest denominator accepted for a convergent.
const MAX_DENOMINATOR: u64 = 1 << 63;

/// First `k` partial quotients and convergents of the binary rational `alpha`.
pub fn continued_fraction(alpha: f64, k: usize) -> Result<DiophantineProfile> {
    continued_fraction_exact(&ExactReal::from_f64(alpha)?, k)
}

pub fn continued_fraction_exact(alpha: &ExactReal, k: usize) -> Result<DiophantineProfile> {
    if k == 0 {
        return Err(Error::InvalidArgument("depth k must be at least 1".into()));
    }
    let mut num = alpha.num.clone();
    let mut den = alpha.den.clone();
    // (p_{j-2}, q_{j-2}), (p_{j-1}, q_{j-1}) for alpha = [0; a_1, a_2, ...]
    let (mut p0, mut q0) = (BigUint::one(), BigUint::zero());
    let (mut p1, mut q1) = (BigUint::zero(), BigUint::one());
    let mut quotients = Vec::with_capacity(k);
    let mut convergents = Vec::with_capacity(k);

    while quotients.len() < k {
        if num.is_zero() {
            return Err(Error::Truncated {
                requested: k,
                achieved: quotients.len(),
            });
        }
        let (a, rem) = den.div_rem(&num);
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        let (Some(a64), Some(p64), Some(q64)) = (a.to_u64(), p2.to_u64(), q2.to_u64()) else {
            return Err(Error::Truncated {
                requested: k,
                achieved: quotients.len(),
            });
        };
        if q64 > MAX_DENOMINATOR {
            return Err(Error::Truncated {
                requested: k,
                achieved: quotients.len(),
            });
        }
        quotients.push(a64);
        convergents.push(Convergent {
            p: p64,
            q: q64,
            delta: alpha.distance_to(p64, q64),
        });
        den = num;
        num = rem;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
    }

    let mut profile = DiophantineProfile {
        alpha: alpha.to_f64(),
        partial_quotients: quotients,
        convergents,
        gamma_hat: None,
        tau: None,
        c: None,
    };
    profile.gamma_hat = diophantine_type_estimate(&profile).ok();
    Ok(profile)
}

/// Estimated Diophantine type from the available convergents.
///
/// Works on the points `(log q_j, log 1/delta_j)` of the last half of the
/// usable convergents (`q_j >= 2`, `delta_j > 0`). Two upper-side estimates of
/// `limsup log(1/delta_j)/log q_j - 1` are formed:
///
/// * the largest least-squares slope (minus one) over contiguous windows of
///   at least three nearly collinear points (`r^2 >= 0.999`), which removes
///   the constant in `delta_j ~ c q_j^{-(gamma+1)}`;
/// * the largest pointwise exponent, which is exact for sparse
///   limsup-type patterns but carries a `log(1/c)/log q_j` bias.
///
/// The smaller of the two is returned. When no window is regular enough the
/// convergents follow a sparse pattern and the pointwise value is used.
pub fn diophantine_type_estimate(profile: &DiophantineProfile) -> Result<f64> {
    if profile.convergents.len() < 4 {
        return Err(Error::InsufficientData {
            needed: 4,
            got: profile.convergents.len(),
        });
    }
    let pts: Vec<(f64, f64)> = profile
        .convergents
        .iter()
        .filter(|c| c.q >= 2 && c.delta > 0.0)
        .map(|c| ((c.q as f64).ln(), -c.delta.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: pts.len(),
        });
    }
    let tail = &pts[pts.len() / 2..];
    let tail = if tail.len() < 2 {
        &pts[pts.len() - 2..]
    } else {
        tail
    };

    let pointwise = tail
        .iter()
        .map(|&(lq, ld)| ld / lq - 1.0)
        .fold(f64::NEG_INFINITY, f64::max);

    let min_window = tail.len().min(3);
    let mut fitted = f64::NEG_INFINITY;
    for start in 0..tail.len() {
        for end in start + min_window..=tail.len() {
            if let Some((s, r2)) = ols_slope(&tail[start..end]) {
                if r2 >= REGULAR_R2 {
                    fitted = fitted.max(s - 1.0);
                }
            }
        }
    }
    Ok(if fitted.is_finite() {
        fitted.min(pointwise)
    } else {
        pointwise
    })
}

const REGULAR_R2: f64 = 0.999;

/// Slope and coefficient of determination.
fn ols_slope(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Some((sxy / sxx, r2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonicalize_examples() {
        assert_eq!(canonicalize(1.25).unwrap().value(), 0.25);
        assert_eq!(canonicalize(-0.25).unwrap().value(), 0.75);
        assert_eq!(canonicalize(0.0).unwrap().value(), 0.0);
        assert_eq!(canonicalize(-1e-20).unwrap().value(), 0.0);
        assert!(canonicalize(f64::NAN).is_err());
        assert!(canonicalize(f64::INFINITY).is_err());
    }

    #[test]
    fn circle_dist_examples() {
        let p = |x| CirclePoint::new(x).unwrap();
        assert!((circle_dist(p(0.1), p(0.9)) - 0.2).abs() < 1e-15);
        assert_eq!(circle_dist(p(0.0), p(0.5)), 0.5);
        assert_eq!(circle_dist(p(0.3), p(0.3)), 0.0);
    }

    #[test]
    fn golden_convergents_are_fibonacci() {
        let prof = continued_fraction(golden_mean(), 6).unwrap();
        assert_eq!(prof.partial_quotients, vec![1; 6]);
        let pq: Vec<(u64, u64)> = prof.convergents.iter().map(|c| (c.p, c.q)).collect();
        assert_eq!(pq, vec![(1, 1), (1, 2), (2, 3), (3, 5), (5, 8), (8, 13)]);
    }

    #[test]
    fn one_over_pi_quotients() {
        // 1/pi = [0; 3, 7, 15, 1, 292, ...]
        let prof = continued_fraction(1.0 / std::f64::consts::PI, 3).unwrap();
        assert_eq!(prof.partial_quotients, vec![3, 7, 15]);
    }

    #[test]
    fn binary_rational_truncates() {
        let err = continued_fraction(0.375, 5).unwrap_err();
        // 3/8 = [0; 2, 1, 2]
        assert!(matches!(
            err,
            Error::Truncated {
                requested: 5,
                achieved: 3
            }
        ));
        let prof = continued_fraction(0.375, 3).unwrap();
        assert_eq!(prof.convergents.last().unwrap().delta, 0.0);
    }

    #[test]
    fn type_estimate_needs_four_convergents() {
        let prof = continued_fraction(golden_mean(), 3).unwrap();
        assert!(prof.gamma_hat.is_none());
        assert!(matches!(
            diophantine_type_estimate(&prof),
            Err(Error::InsufficientData { needed: 4, got: 3 })
        ));
    }

    #[test]
    fn type_estimates() {
        let g = continued_fraction(golden_mean(), 20).unwrap().gamma_hat.unwrap();
        assert!((g - 1.0).abs() < 0.05, "{g}");
        let s = continued_fraction(std::f64::consts::SQRT_2 - 1.0, 20).unwrap();
        assert!((s.gamma_hat.unwrap() - 1.0).abs() < 0.05);
        // q = 16 and 65536 satisfy |alpha - p/q| ~ q^-4, an exponent of 3
        let lac = continued_fraction_exact(&ExactReal::lacunary(3).unwrap(), 5).unwrap();
        let qs: Vec<u64> = lac.convergents.iter().map(|c| c.q).collect();
        assert!(qs.contains(&16) && qs.contains(&65536), "{qs:?}");
        assert!((lac.gamma_hat.unwrap() - 3.0).abs() < 0.05, "{:?}", lac.gamma_hat);
    }

    /// Partial quotients chosen so that `q_{j+1} ~ q_j^t`, which makes the
    /// type `t`.
    #[test]
    fn prescribed_growth_is_recovered() {
        for t in [1.5f64, 2.0] {
            let (mut q0, mut q1) = (1u128, 1u128);
            let mut quotients = vec![1u64];
            loop {
                let a = ((q1 as f64).powf(t - 1.0).round() as u64).max(1);
                if a as u128 * q1 + q0 > 1 << 56 {
                    break;
                }
                quotients.push(a);
                (q0, q1) = (q1, a as u128 * q1 + q0);
            }
            quotients.extend([1; 8]);
            // evaluate [0; a1, a2, ...] exactly from the tail up
            let (mut num, mut den) = (BigUint::from(0u32), BigUint::from(1u32));
            for &a in quotients.iter().rev() {
                let next = BigUint::from(a) * &den + &num;
                num = den;
                den = next;
            }
            let x = ExactReal::from_ratio(num, den).unwrap();
            let prof = continued_fraction_exact(&x, quotients.len() - 8).unwrap();
            assert_eq!(prof.partial_quotients, quotients[..quotients.len() - 8]);
            let g = prof.gamma_hat.unwrap();
            assert!((g - t).abs() < 0.1, "t = {t}: {g}");
        }
    }

    #[test]
    fn exact_real_parsing() {
        let a: ExactReal = "3/7".parse().unwrap();
        assert_eq!(a.cmp_rational(3, 7), Ordering::Equal);
        assert!("7/3".parse::<ExactReal>().is_err());
        assert!("banana".parse::<ExactReal>().is_err());
        let g: ExactReal = "golden".parse().unwrap();
        assert_eq!(g.to_f64(), golden_mean());
        let x = ExactReal::from_f64(0.1).unwrap();
        assert_eq!(x.to_f64(), 0.1);
    }

    #[test]
    fn frac_mul_add_matches_exact_product() {
        let a = golden_mean();
        let ex = ExactReal::from_f64(a).unwrap();
        for n in [1u64, 7, 1_000_003, 987_654_321] {
            let got = frac_mul_add(n, a, 0.0);
            // exact: n*num mod den / den
            let r = (BigUint::from(n) * ex.numerator()) % ex.denominator();
            let want = ratio_to_f64(&r, ex.denominator());
            assert!((got - want).abs() < 1e-16, "n = {n}: {got} vs {want}");
        }
    }
}
