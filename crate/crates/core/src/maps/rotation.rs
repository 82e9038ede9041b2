//! Numerical rotation numbers and offset tuning of smooth families.

use serde::{Deserialize, Serialize};

use crate::arithmetic::frac;
use crate::error::{Error, Result};
use crate::fourier::FourierSeries;

use super::CircleMapSpec;

/// Rotation-number estimate of a circle homeomorphism.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationEstimate {
    /// Smoothly weighted average of the displacement along the orbit of 0.
    pub value: f64,
    /// Difference between the weighted averages over the full orbit and its
    /// first half.
    pub error_estimate: f64,
    /// Rigorous enclosure `(F^n(0) - 0)/n +- 1/n`.
    pub enclosure: (f64, f64),
    pub iters: u64,
}

/// Bump weight `exp(-1/(t(1-t)))` on `(0, 1)`; averaging with it converges
/// faster than any power of `1/n` for smooth quasi-periodic orbits.
#[inline]
fn bump(t: f64) -> f64 {
    let s = t * (1.0 - t);
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

/// Rotation number from the orbit of 0.
///
/// Fails with [`Error::RotationNotConverged`] (carrying the best estimate)
/// when the weighted averages over `iters` and `iters/2` steps differ by
/// more than `tol`.
pub fn rotation_number(map: &CircleMapSpec, iters: u64, tol: f64) -> Result<RotationEstimate> {
    if !map.is_homeomorphism() {
        return Err(Error::InvalidArgument(
            "rotation number needs an orientation-preserving homeomorphism, not a discretized map"
                .into(),
        ));
    }
    if iters < 2 {
        return Err(Error::InvalidArgument("need at least 2 iterations".into()));
    }
    if let CircleMapSpec::Rotation { alpha } = map {
        let r = frac(*alpha);
        let w = 1.0 / iters as f64;
        return Ok(RotationEstimate {
            value: r,
            error_estimate: 0.0,
            enclosure: (r - w, r + w),
            iters,
        });
    }

    let n = iters;
    let half = n / 2;
    let (nf, hf) = (n as f64, half as f64);
    let mut x = 0.0;
    let (mut plain, mut comp) = (0.0f64, 0.0f64);
    let (mut wsum_full, mut wd_full) = (0.0, 0.0);
    let (mut wsum_half, mut wd_half) = (0.0, 0.0);
    for k in 0..n {
        let d = map.displacement(x);
        // Kahan sum of displacements for the enclosure
        let y = d - comp;
        let t = plain + y;
        comp = (t - plain) - y;
        plain = t;

        let wf = bump((k as f64 + 0.5) / nf);
        wsum_full += wf;
        wd_full += wf * d;
        if k < half {
            let wh = bump((k as f64 + 0.5) / hf);
            wsum_half += wh;
            wd_half += wh * d;
        }
        x = frac(x + d);
    }
    let mean = plain / nf;
    let full = wd_full / wsum_full;
    let half_est = if wsum_half > 0.0 {
        wd_half / wsum_half
    } else {
        mean
    };
    let est = RotationEstimate {
        value: full,
        error_estimate: (full - half_est).abs(),
        enclosure: (mean - 1.0 / nf, mean + 1.0 / nf),
        iters,
    };
    if est.error_estimate > tol {
        return Err(Error::RotationNotConverged {
            estimate: est.value,
            error_bound: est.error_estimate,
        });
    }
    Ok(est)
}

pub const DEFAULT_TUNING_TOL: f64 = 1e-12;
const TUNING_ITERS: u64 = 1 << 16;
const BISECTION_CAP: usize = 200;

/// A `TunedFamily` map whose rotation number was matched to a target.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tuning {
    pub map: CircleMapSpec,
    pub c: f64,
    pub rotation: RotationEstimate,
    pub bisection_steps: usize,
}

fn rot_of_offset(u: &FourierSeries, epsilon: f64, c: f64, tol: f64) -> (f64, f64) {
    let map = CircleMapSpec::tuned(u.clone(), epsilon, c);
    match rotation_number(&map, TUNING_ITERS, tol) {
        Ok(r) => (r.value, r.error_estimate),
        Err(Error::RotationNotConverged {
            estimate,
            error_bound,
        }) => (estimate, error_bound),
        Err(_) => unreachable!("tuned families are homeomorphisms"),
    }
}

/// Finds `c` so that `x -> x + c + epsilon u(x)` has rotation number
/// `target_alpha` (mod 1) within `tol`.
///
/// The rotation number is non-decreasing in `c` and lies in
/// `[c - |epsilon| |u|_inf, c + |epsilon| |u|_inf]`, which gives the initial
/// bracket for bisection.
pub fn tune_rotation_number(
    u: &FourierSeries,
    epsilon: f64,
    target_alpha: f64,
    tol: f64,
) -> Result<Tuning> {
    if !(epsilon.is_finite() && target_alpha.is_finite() && tol > 0.0) {
        return Err(Error::InvalidArgument("bad tuning parameters".into()));
    }
    let lip = epsilon.abs() * u.derivative_sup_bound();
    if lip >= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "|epsilon| max|u'| must be < 1 for a diffeomorphism (bound {lip})"
        )));
    }
    let target = frac(target_alpha);
    if epsilon == 0.0 || u.degree() == 0 && u.mean() == 0.0 {
        let map = CircleMapSpec::tuned(u.clone(), 0.0, target);
        let rotation = rotation_number(&map, TUNING_ITERS, tol)?;
        return Ok(Tuning {
            map: CircleMapSpec::tuned(u.clone(), epsilon, target),
            c: target,
            rotation,
            bisection_steps: 0,
        });
    }

    let spread = epsilon.abs() * u.sup_bound();
    let inner_tol = tol / 8.0;
    let (mut lo, mut hi) = (target - spread, target + spread);
    // the rotation number of the lift is continuous in c, so compare lifts
    let (r_lo, _) = rot_of_offset(u, epsilon, lo, inner_tol);
    let (r_hi, _) = rot_of_offset(u, epsilon, hi, inner_tol);
    let lift_of = |r: f64, c: f64| r + (c - r).round();
    let (r_lo, r_hi) = (lift_of(r_lo, lo), lift_of(r_hi, hi));
    if !(r_lo <= target && target <= r_hi) {
        return Err(Error::Bracket {
            lo,
            hi,
            rot_lo: r_lo,
            rot_hi: r_hi,
        });
    }

    let mut steps = 0;
    while hi - lo > tol / 4.0 && steps < BISECTION_CAP {
        let mid = 0.5 * (lo + hi);
        let (r, _) = rot_of_offset(u, epsilon, mid, inner_tol);
        let r = lift_of(r, mid);
        if r < target {
            lo = mid;
        } else {
            hi = mid;
        }
        steps += 1;
    }
    let c = 0.5 * (lo + hi);
    let map = CircleMapSpec::tuned(u.clone(), epsilon, c);
    let rotation = rotation_number(&map, TUNING_ITERS, inner_tol)?;
    let achieved = lift_of(rotation.value, c);
    if (achieved - target).abs() > tol {
        return Err(Error::RotationNotConverged {
            estimate: achieved,
            error_bound: (achieved - target).abs(),
        });
    }
    Ok(Tuning {
        map,
        c,
        rotation,
        bisection_steps: steps,
    })
}
