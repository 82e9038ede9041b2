use crate::arithmetic::{frac, CirclePoint};
use crate::error::{Error, Result};

use super::CircleMapSpec;

/// A periodic orbit of a circle homeomorphism together with the derivative
/// of the return map along it.
#[derive(Debug, Clone)]
pub struct PeriodicOrbit {
    /// The orbit in dynamical order, starting from the refined seed.
    pub points: Vec<CirclePoint>,
    /// `(F^q)'` at the orbit; below one means attracting.
    pub multiplier: f64,
}

impl PeriodicOrbit {
    pub fn is_attracting(&self) -> bool {
        self.multiplier < 1.0
    }
}

/// `(F^q(x) - x, (F^q)'(x))` with the integer part of the lift tracked
/// separately so the orbit stays in `[0, 1)`.
fn return_map(map: &CircleMapSpec, x: f64, q: u64) -> Option<(f64, f64)> {
    let start = frac(x);
    let mut y = start;
    let mut wraps = 0.0;
    let mut d = 1.0;
    for _ in 0..q {
        d *= map.derivative(y)?;
        let z = y + map.displacement(y);
        let fl = z.floor();
        wraps += fl;
        y = z - fl;
    }
    Some((wraps + (y - start), d))
}

/// Newton refinement of a solution of `F^q(x) = x + p` near `seed`.
pub fn periodic_orbit(map: &CircleMapSpec, seed: f64, p: u64, q: u64) -> Result<PeriodicOrbit> {
    if q == 0 {
        return Err(Error::InvalidArgument("period must be positive".into()));
    }
    if !map.is_homeomorphism() {
        return Err(Error::PeriodicOrbit(
            "Newton refinement needs a differentiable map".into(),
        ));
    }
    let target = p as f64;
    let mut x = seed;
    let mut residual = f64::INFINITY;
    for _ in 0..100 {
        let (shift, d) = return_map(map, x, q)
            .ok_or_else(|| Error::PeriodicOrbit("map has no derivative".into()))?;
        let g = shift - target;
        residual = g.abs();
        if residual < 1e-15 {
            break;
        }
        let slope = d - 1.0;
        if slope == 0.0 {
            break;
        }
        let step = g / slope;
        x -= step;
        if step.abs() < 1e-16 {
            break;
        }
    }
    if residual.is_nan() || residual >= 1e-11 {
        return Err(Error::PeriodicOrbit(format!(
            "no period-{q} orbit near {seed} (residual {residual:e})"
        )));
    }
    let (_, multiplier) = return_map(map, x, q).expect("checked above");
    let mut points = Vec::with_capacity(q as usize);
    let mut y = CirclePoint::wrap(x);
    for _ in 0..q {
        points.push(y);
        y = map.eval(y);
    }
    Ok(PeriodicOrbit { points, multiplier })
}

/// Forward iteration from `x0` for `burn_in` steps, then Newton refinement
/// of the period-`q` orbit that attracted the point. Fails if the refined
/// orbit is not attracting.
pub fn attracting_cycle(
    map: &CircleMapSpec,
    x0: CirclePoint,
    p: u64,
    q: u64,
    burn_in: u64,
) -> Result<PeriodicOrbit> {
    let mut x = x0.value();
    for _ in 0..burn_in {
        x = frac(x + map.displacement(x));
    }
    let orbit = periodic_orbit(map, x, p, q)?;
    if !orbit.is_attracting() {
        return Err(Error::PeriodicOrbit(format!(
            "orbit reached from {} has multiplier {} >= 1",
            x0, orbit.multiplier
        )));
    }
    Ok(orbit)
}
