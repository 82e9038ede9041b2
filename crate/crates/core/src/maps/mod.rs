//! Circle maps: rotations, the attractor/repeller perturbation family,
//! offset-tuned smooth families, conjugated rotations, grid discretizations
//! and compositions of these.

mod conjugacy;
mod orbits;
mod rotation;

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use conjugacy::ConjugacyDiffeo;
pub use orbits::{attracting_cycle, periodic_orbit, PeriodicOrbit};
pub use rotation::{
    rotation_number, tune_rotation_number, RotationEstimate, Tuning, DEFAULT_TUNING_TOL,
};

use crate::arithmetic::{frac, CirclePoint, DiophantineProfile};
use crate::error::{Error, Result};
use crate::fourier::FourierSeries;

/// Closed algebra of circle maps.
///
/// Every variant except `Discretized` has a continuous, strictly increasing
/// degree-one lift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum CircleMapSpec {
    /// `x -> x + alpha`.
    Rotation { alpha: f64 },
    /// `x -> D(x + p/q)` with `D(y) = y + delta * g(y)` and
    /// `g(y) = -bump_strength * sin(2 pi q y) / (2 pi q)`. The orbit
    /// `{i/q}` attracts, `{i/q + 1/(2q)}` repels. `delta` is `|alpha - p/q|`.
    AttractorRepeller {
        alpha: f64,
        j: usize,
        p: u64,
        q: u64,
        delta: f64,
        bump_strength: f64,
    },
    /// `x -> x + c + epsilon * u(x)`.
    TunedFamily {
        u: FourierSeries,
        epsilon: f64,
        c: f64,
    },
    /// `h o R_alpha o h^{-1}`.
    ConjugatedRotation { alpha: f64, h: ConjugacyDiffeo },
    /// `x -> floor(n * T(x)) / n`.
    Discretized { inner: Box<CircleMapSpec>, n: u64 },
    /// Applied left to right; empty means identity.
    Composition { maps: Vec<CircleMapSpec> },
}

/// Largest accepted grid size.
pub const GRID_CAP: u64 = 10_000_000;

impl CircleMapSpec {
    pub fn rotation(alpha: f64) -> Self {
        CircleMapSpec::Rotation { alpha }
    }

    pub fn identity() -> Self {
        CircleMapSpec::Composition { maps: Vec::new() }
    }

    pub fn conjugated(alpha: f64, h: ConjugacyDiffeo) -> Self {
        CircleMapSpec::ConjugatedRotation { alpha, h }
    }

    pub fn tuned(u: FourierSeries, epsilon: f64, c: f64) -> Self {
        CircleMapSpec::TunedFamily { u, epsilon, c }
    }

    /// Structural checks on parameters.
    pub fn validate(&self) -> Result<()> {
        use CircleMapSpec::*;
        let finite = |v: f64, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{what} must be finite")))
            }
        };
        match self {
            Rotation { alpha } => finite(*alpha, "alpha"),
            AttractorRepeller {
                alpha,
                q,
                delta,
                bump_strength,
                ..
            } => {
                finite(*alpha, "alpha")?;
                finite(*delta, "delta")?;
                if *q == 0 {
                    return Err(Error::InvalidArgument("q must be positive".into()));
                }
                if !(*bump_strength > 0.0 && *bump_strength <= 1.0) {
                    return Err(Error::InvalidArgument(
                        "bump_strength must lie in (0, 1]".into(),
                    ));
                }
                Ok(())
            }
            TunedFamily { epsilon, c, .. } => {
                finite(*epsilon, "epsilon")?;
                finite(*c, "c")
            }
            ConjugatedRotation { alpha, .. } => finite(*alpha, "alpha"),
            Discretized { inner, n } => {
                if *n == 0 {
                    return Err(Error::InvalidArgument("grid size must be positive".into()));
                }
                inner.validate()
            }
            Composition { maps } => maps.iter().try_for_each(|m| m.validate()),
        }
    }

    /// False if a discretization appears anywhere in the spec.
    pub fn is_homeomorphism(&self) -> bool {
        match self {
            CircleMapSpec::Discretized { .. } => false,
            CircleMapSpec::Composition { maps } => maps.iter().all(|m| m.is_homeomorphism()),
            _ => true,
        }
    }

    /// Degree-one lift evaluated at any real `x`.
    pub fn lift(&self, x: f64) -> f64 {
        use CircleMapSpec::*;
        match self {
            Rotation { alpha } => x + alpha,
            AttractorRepeller { .. } | TunedFamily { .. } => x + self.displacement(x),
            ConjugatedRotation { alpha, h } => {
                // admissible h always inverts; fall back to the identity guess
                let y = h.inverse(x).unwrap_or(x);
                h.eval(y + alpha)
            }
            Discretized { inner, n } => {
                let nf = *n as f64;
                (nf * inner.lift(x)).floor() / nf
            }
            Composition { maps } => maps.iter().fold(x, |acc, m| m.lift(acc)),
        }
    }

    /// `F(x) - x`, computed without the cancellation of the generic form
    /// where the variant allows it.
    pub fn displacement(&self, x: f64) -> f64 {
        use CircleMapSpec::*;
        match self {
            Rotation { alpha } => *alpha,
            AttractorRepeller {
                p,
                q,
                delta,
                bump_strength,
                ..
            } => {
                let qf = *q as f64;
                // sin(2 pi q (x + p/q)) = sin(2 pi q x)
                let bump = -bump_strength * (TAU * frac(qf * x)).sin() / (TAU * qf);
                *p as f64 / qf + delta * bump
            }
            TunedFamily { u, epsilon, c } => c + epsilon * u.eval(x),
            _ => self.lift(x) - x,
        }
    }

    /// Derivative of the lift; `None` for discretized maps.
    pub fn derivative(&self, x: f64) -> Option<f64> {
        use CircleMapSpec::*;
        match self {
            Rotation { .. } => Some(1.0),
            AttractorRepeller {
                q,
                delta,
                bump_strength,
                ..
            } => {
                let qf = *q as f64;
                Some(1.0 - delta * bump_strength * (TAU * frac(qf * x)).cos())
            }
            TunedFamily { u, epsilon, .. } => Some(1.0 + epsilon * u.derivative().eval(x)),
            ConjugatedRotation { alpha, h } => {
                let y = h.inverse(x).ok()?;
                Some(h.derivative(y + alpha) / h.derivative(y))
            }
            Discretized { .. } => None,
            Composition { maps } => {
                let mut d = 1.0;
                let mut y = x;
                for m in maps {
                    d *= m.derivative(y)?;
                    y = m.lift(y);
                }
                Some(d)
            }
        }
    }

    /// The map on the circle.
    pub fn eval(&self, x: CirclePoint) -> CirclePoint {
        match self {
            CircleMapSpec::Discretized { inner, n } => {
                let nf = *n as f64;
                let i = (x.value() * nf).round();
                if i < nf && i / nf == x.value() {
                    let k = grid_successor(inner, *n, i as u64);
                    return CirclePoint::wrap(k as f64 / nf);
                }
                let k = (nf * frac(inner.lift(x.value()))).floor().min(nf - 1.0);
                CirclePoint::wrap(k / nf)
            }
            CircleMapSpec::Composition { maps } => maps.iter().fold(x, |acc, m| m.eval(acc)),
            _ => CirclePoint::wrap(self.lift(x.value())),
        }
    }

    /// Iterates `eval` `n` times.
    pub fn iterate(&self, mut x: CirclePoint, n: u64) -> CirclePoint {
        for _ in 0..n {
            x = self.eval(x);
        }
        x
    }

    /// Short content hash of the JSON encoding; identifies scan records.
    pub fn spec_hash(&self) -> String {
        let json = serde_json::to_string(self).expect("map specs always serialize");
        let digest = Sha256::digest(json.as_bytes());
        hex::encode(&digest[..8])
    }
}

/// Index of `T_N(i/N)` on the grid `{0, 1/N, ..., (N-1)/N}`.
///
/// For a pure rotation the step is the integer `floor(N alpha)`, so the grid
/// map is an exact permutation with no float drift between nodes.
pub fn grid_successor(inner: &CircleMapSpec, n: u64, i: u64) -> u64 {
    let nf = n as f64;
    match inner {
        CircleMapSpec::Rotation { alpha } => {
            let step = (nf * frac(*alpha)).floor() as u64 % n;
            (i % n + step) % n
        }
        _ => {
            let y = frac(inner.lift(i as f64 / nf));
            let k = (nf * y).floor() as u64;
            k.min(n - 1)
        }
    }
}

/// `P_N o T` with `P_N(x) = floor(N x)/N`.
pub fn discretize(map: &CircleMapSpec, n: u64) -> Result<CircleMapSpec> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "grid size must be at least 1".into(),
        ));
    }
    map.validate()?;
    Ok(CircleMapSpec::Discretized {
        inner: Box::new(map.clone()),
        n,
    })
}

/// Perturbation of `R_alpha` whose only invariant measures sit on the
/// periodic orbit `{i/q_j}` (attracting) and its shift by `1/(2 q_j)`
/// (repelling), for the `j`-th convergent `p_j/q_j` of the profile.
pub fn attractor_repeller_family(
    profile: &DiophantineProfile,
    j: usize,
    bump_strength: f64,
) -> Result<CircleMapSpec> {
    let conv = profile.convergent(j)?;
    let spec = CircleMapSpec::AttractorRepeller {
        alpha: profile.alpha,
        j,
        p: conv.p,
        q: conv.q,
        delta: conv.delta,
        bump_strength,
    };
    spec.validate()?;
    Ok(spec)
}
