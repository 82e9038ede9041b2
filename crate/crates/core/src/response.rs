//! Linear response of rotation-number-preserving families through the
//! homological equation `v(x + alpha) - v(x) = u(x) - <u>`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arithmetic::{frac_mul_add, DiophantineProfile};
use crate::error::{Error, Result};
use crate::fourier::FourierSeries;
use crate::invariant::birkhoff_average;
use crate::maps::{tune_rotation_number, DEFAULT_TUNING_TOL};
use crate::measures::FourierDensity;

/// Divisors `|1 - e^{2 pi i n alpha}|` below this are a hard error.
pub const SMALL_DIVISOR_FLOOR: f64 = 1e-13;

pub const DEFAULT_ORBIT_LEN: u64 = 10_000_000;
pub const DEFAULT_BURN_IN: u64 = 1_000;

/// `e^{2 pi i n alpha} - 1` without cancellation: the phase is reduced
/// exactly and `cos - 1` is written as `-2 sin^2`.
fn rotation_minus_one(n: usize, alpha: f64) -> Complex64 {
    let theta = frac_mul_add(n as u64, alpha, 0.0);
    let s = (PI * theta).sin();
    Complex64::new(-2.0 * s * s, (TAU * theta).sin())
}

/// `|1 - e^{2 pi i n alpha}| = 2 |sin(pi n alpha)|`.
pub fn small_divisor(n: usize, alpha: f64) -> f64 {
    2.0 * (PI * frac_mul_add(n as u64, alpha, 0.0)).sin().abs()
}

/// Zero-mean solution `v` of the homological equation.
pub fn solve_homological(u: &FourierSeries, alpha: f64, n_max: usize) -> Result<FourierSeries> {
    if !alpha.is_finite() {
        return Err(Error::NonFinite(alpha));
    }
    if n_max < u.degree() {
        return Err(Error::InvalidArgument(format!(
            "n_max = {n_max} is below the degree {} of u",
            u.degree()
        )));
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n_max.max(1) + 1];
    for (n, slot) in coeffs.iter_mut().enumerate().skip(1) {
        let un = u.coefficient(n as i64);
        if un == Complex64::new(0.0, 0.0) {
            continue;
        }
        let mag = small_divisor(n, alpha);
        if mag < SMALL_DIVISOR_FLOOR {
            return Err(Error::SmallDivisor { n, magnitude: mag });
        }
        *slot = un / rotation_minus_one(n, alpha);
    }
    FourierSeries::from_coefficients(coeffs)
}

/// Infinitesimal change of the invariant density along `x + alpha + eps u`:
/// `c(n) = 2 pi i n u(n) / (1 - e^{2 pi i n alpha})`, the coefficients of
/// `-v'`.
pub fn linear_response_density(u: &FourierSeries, alpha: f64) -> Result<FourierDensity> {
    let v = solve_homological(u, alpha, u.degree().max(1))?;
    Ok(FourierDensity::signed(v.derivative().scale(-1.0)))
}

/// `int psi d(mu_dot)`.
pub fn response_pairing(u: &FourierSeries, alpha: f64, psi: &FourierSeries) -> Result<f64> {
    let rho = linear_response_density(u, alpha)?;
    Ok(psi.pairing(rho.series()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FdPoint {
    pub epsilon: f64,
    /// Tuned offset.
    pub c: f64,
    /// Birkhoff average of `psi` along the tuned map.
    pub average: f64,
    /// `(average - int psi dm) / epsilon`.
    pub quotient: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FdResponse {
    pub alpha: f64,
    /// Richardson extrapolation from the two smallest `epsilon`.
    pub estimate: f64,
    pub per_eps: Vec<FdPoint>,
    pub orbit_len: u64,
    pub burn_in: u64,
}

/// Finite-difference response along `f_eps = x + c(eps) + eps u(x)` with
/// `c(eps)` tuned so that `rot(f_eps) = alpha`.
///
/// Ladder points run in parallel. The extrapolation
/// `(e1 Q(e2) - e2 Q(e1)) / (e1 - e2)` cancels the first-order error term.
pub fn fd_response(
    u: &FourierSeries,
    profile: &DiophantineProfile,
    psi: &FourierSeries,
    eps_ladder: &[f64],
    orbit_len: u64,
    burn_in: u64,
) -> Result<FdResponse> {
    if eps_ladder.is_empty() {
        return Err(Error::InvalidArgument("empty epsilon ladder".into()));
    }
    if eps_ladder.iter().any(|e| !(e.is_finite() && *e != 0.0)) {
        return Err(Error::InvalidArgument(
            "ladder entries must be finite and nonzero".into(),
        ));
    }
    if orbit_len == 0 {
        return Err(Error::InvalidArgument(
            "orbit length must be positive".into(),
        ));
    }
    let alpha = profile.alpha;
    let mean = psi.mean();
    let mut per_eps = eps_ladder
        .par_iter()
        .map(|&eps| -> Result<FdPoint> {
            let tuned = tune_rotation_number(u, eps, alpha, DEFAULT_TUNING_TOL).map_err(|e| {
                Error::Tuning {
                    epsilon: eps,
                    source: Box::new(e),
                }
            })?;
            let average = birkhoff_average(&tuned.map, 0.0, orbit_len, burn_in, |x| psi.eval(x));
            Ok(FdPoint {
                epsilon: eps,
                c: tuned.c,
                average,
                quotient: (average - mean) / eps,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    per_eps.sort_by(|a, b| b.epsilon.abs().total_cmp(&a.epsilon.abs()));
    let estimate = match per_eps.len() {
        1 => per_eps[0].quotient,
        k => {
            let (p1, p2) = (&per_eps[k - 2], &per_eps[k - 1]);
            (p1.epsilon * p2.quotient - p2.epsilon * p1.quotient) / (p1.epsilon - p2.epsilon)
        }
    };
    Ok(FdResponse {
        alpha,
        estimate,
        per_eps,
        orbit_len,
        burn_in,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmallDivisorProfile {
    pub alpha: f64,
    /// `magnitudes[k]` is `|1 - e^{2 pi i (k+1) alpha}|`.
    pub magnitudes: Vec<f64>,
    pub min: f64,
    pub argmin: usize,
    /// Some divisor is below the floor; `alpha` is rational to working
    /// precision at this depth.
    pub degenerate: bool,
}

pub fn small_divisor_profile(alpha: f64, n_max: usize) -> Result<SmallDivisorProfile> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    if !alpha.is_finite() {
        return Err(Error::NonFinite(alpha));
    }
    let magnitudes: Vec<f64> = (1..=n_max).map(|n| small_divisor(n, alpha)).collect();
    let (k, &min) = magnitudes
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("n_max >= 1");
    Ok(SmallDivisorProfile {
        alpha,
        magnitudes,
        min,
        argmin: k + 1,
        degenerate: min < SMALL_DIVISOR_FLOOR,
    })
}

/// Leading behaviour `<u(., eps)> = A eps^m + o(eps^m)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AverageExpansion {
    pub a: f64,
    /// Fitted order; in the degenerate case the sample count, read as
    /// "at least this many".
    pub m: u32,
    /// Relative least-squares residual of the single-term fit.
    pub residual: f64,
    /// All sampled averages vanish.
    pub degenerate: bool,
}

const MAX_ORDER: u32 = 8;

/// Fits `A eps^m` to the means of `family(eps)` by least squares for each
/// `m = 0..=8` and keeps the order with the smallest relative residual.
pub fn average_expansion<F>(family: F, eps_samples: &[f64]) -> Result<AverageExpansion>
where
    F: Fn(f64) -> FourierSeries,
{
    if eps_samples.len() < 4 {
        return Err(Error::InsufficientData {
            needed: 4,
            got: eps_samples.len(),
        });
    }
    if eps_samples.iter().any(|e| !(e.is_finite() && *e != 0.0)) {
        return Err(Error::InvalidArgument(
            "samples must be finite and nonzero".into(),
        ));
    }
    let means: Vec<f64> = eps_samples.iter().map(|&e| family(e).mean()).collect();
    let norm = means.iter().map(|m| m * m).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Ok(AverageExpansion {
            a: 0.0,
            m: eps_samples.len() as u32,
            residual: 0.0,
            degenerate: true,
        });
    }
    let mut best: Option<AverageExpansion> = None;
    for m in 0..=MAX_ORDER {
        let basis: Vec<f64> = eps_samples.iter().map(|e| e.powi(m as i32)).collect();
        let bb: f64 = basis.iter().map(|b| b * b).sum();
        let a = basis.iter().zip(&means).map(|(b, y)| b * y).sum::<f64>() / bb;
        let res = basis
            .iter()
            .zip(&means)
            .map(|(b, y)| (y - a * b).powi(2))
            .sum::<f64>()
            .sqrt()
            / norm;
        if best.as_ref().is_none_or(|b| res < b.residual - 1e-12) {
            best = Some(AverageExpansion {
                a,
                m,
                residual: res,
                degenerate: false,
            });
        }
    }
    Ok(best.expect("at least one order is tried"))
}
