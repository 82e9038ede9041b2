use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::arithmetic::{canonicalize, frac_mul_add, CirclePoint};
use crate::error::{Error, Result};
use crate::maps::CircleMapSpec;
use crate::numeric::{compensated_sum, Accum};

/// Atoms closer than this are merged.
pub const MERGE_TOL: f64 = 1e-15;
/// Allowed deviation of the total mass from 1.
pub const MASS_TOL: f64 = 1e-12;
/// Largest number of atoms a Cesaro average may produce.
pub const ATOM_CAP: u64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub position: CirclePoint,
    pub weight: f64,
}

/// Finitely supported probability measure on the circle, with strictly
/// increasing positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAtomic")]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
}

#[derive(Deserialize)]
struct RawAtomic {
    atoms: Vec<Atom>,
}

impl TryFrom<RawAtomic> for AtomicMeasure {
    type Error = Error;
    fn try_from(r: RawAtomic) -> Result<Self> {
        AtomicMeasure::new(r.atoms.into_iter().map(|a| (a.position.value(), a.weight)))
    }
}

impl AtomicMeasure {
    /// Builds a probability measure from `(position, weight)` pairs.
    ///
    /// Positions are reduced mod 1, sorted and merged; weights must be
    /// positive and sum to 1 within [`MASS_TOL`].
    pub fn new<I: IntoIterator<Item = (f64, f64)>>(atoms: I) -> Result<Self> {
        let mut out = Vec::new();
        for (x, w) in atoms {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidMeasure(format!(
                    "atom weight {w} is not positive"
                )));
            }
            out.push(Atom {
                position: canonicalize(x)?,
                weight: w,
            });
        }
        if out.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        let mass = compensated_sum(out.iter().map(|a| a.weight));
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidMeasure(format!(
                "total mass {mass} differs from 1"
            )));
        }
        Ok(Self::from_unsorted(out))
    }

    pub fn dirac(x: CirclePoint) -> Self {
        AtomicMeasure {
            atoms: vec![Atom {
                position: x,
                weight: 1.0,
            }],
        }
    }

    /// Equal weights on the given points; repeated points accumulate mass.
    pub fn uniform(points: &[CirclePoint]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        let w = 1.0 / points.len() as f64;
        Ok(Self::from_unsorted(
            points
                .iter()
                .map(|&p| Atom {
                    position: p,
                    weight: w,
                })
                .collect(),
        ))
    }

    /// Uniform measure on `{0, 1/q, ..., (q-1)/q}`.
    pub fn uniform_grid(q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument("q must be positive".into()));
        }
        let w = 1.0 / q as f64;
        Ok(AtomicMeasure {
            atoms: (0..q)
                .map(|i| Atom {
                    position: CirclePoint::wrap(i as f64 / q as f64),
                    weight: w,
                })
                .collect(),
        })
    }

    /// Convex combination of measures; coefficients must sum to 1.
    pub fn mixture(parts: &[(f64, &AtomicMeasure)]) -> Result<Self> {
        let total = compensated_sum(parts.iter().map(|p| p.0));
        if parts.iter().any(|p| p.0.is_nan() || p.0 < 0.0) || (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidMeasure(
                "mixture coefficients must be non-negative and sum to 1".into(),
            ));
        }
        let atoms = parts
            .iter()
            .filter(|p| p.0 > 0.0)
            .flat_map(|&(c, m)| {
                m.atoms.iter().map(move |a| Atom {
                    position: a.position,
                    weight: c * a.weight,
                })
            })
            .collect();
        Ok(Self::from_unsorted(atoms))
    }

    /// Sorts and merges atoms without checking the total mass.
    pub(crate) fn from_unsorted(mut atoms: Vec<Atom>) -> Self {
        atoms.sort_by(|a, b| a.position.value().total_cmp(&b.position.value()));
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for a in atoms {
            match merged.last_mut() {
                Some(last) if a.position.value() - last.position.value() < MERGE_TOL => {
                    last.weight += a.weight;
                }
                _ => merged.push(a),
            }
        }
        if merged.len() > 1 {
            let first = merged[0].position.value();
            let last = merged[merged.len() - 1];
            if first + 1.0 - last.position.value() < MERGE_TOL {
                merged[0].weight += last.weight;
                merged.pop();
            }
        }
        AtomicMeasure { atoms: merged }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        compensated_sum(self.atoms.iter().map(|a| a.weight))
    }

    /// `int f d mu`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let mut acc = Accum::default();
        for a in &self.atoms {
            acc.add(a.weight * f(a.position.value()));
        }
        acc.value()
    }

    /// Writes `position,weight` rows with a header.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["position", "weight"])?;
        for a in &self.atoms {
            wr.write_record([
                format!("{:.16e}", a.position.value()),
                format!("{:.16e}", a.weight),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let mut atoms = Vec::new();
        for row in rd.deserialize() {
            let (x, w): (f64, f64) = row?;
            atoms.push((x, w));
        }
        Self::new(atoms)
    }
}

/// Image measure `T_* mu`: atoms moved by the map, weights untouched.
pub fn pushforward(map: &CircleMapSpec, mu: &AtomicMeasure) -> AtomicMeasure {
    AtomicMeasure::from_unsorted(
        mu.atoms
            .iter()
            .map(|a| Atom {
                position: map.eval(a.position),
                weight: a.weight,
            })
            .collect(),
    )
}

/// `(1/n) sum_{i=1}^n (R_alpha)^i_* mu`.
pub fn cesaro_average(mu: &AtomicMeasure, alpha: f64, n: u64) -> Result<AtomicMeasure> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if !alpha.is_finite() {
        return Err(Error::NonFinite(alpha));
    }
    let total = n.saturating_mul(mu.len() as u64);
    if total > ATOM_CAP {
        return Err(Error::ResourceLimit {
            what: "cesaro atoms",
            requested: total,
            cap: ATOM_CAP,
        });
    }
    let nf = n as f64;
    let mut atoms = Vec::with_capacity(total as usize);
    for a in &mu.atoms {
        for i in 1..=n {
            atoms.push(Atom {
                position: CirclePoint::wrap(frac_mul_add(i, alpha, a.position.value())),
                weight: a.weight / nf,
            });
        }
    }
    Ok(AtomicMeasure::from_unsorted(atoms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::golden_mean;

    #[test]
    fn construction_sorts_and_merges() {
        let m = AtomicMeasure::new([(0.7, 0.25), (0.2, 0.5), (1.7, 0.25)]).unwrap();
        assert_eq!(m.len(), 2);
        assert!((m.atoms()[1].weight - 0.5).abs() < 1e-16);
        let wrap = AtomicMeasure::new([(0.0, 0.5), (1.0 - 1e-16, 0.5)]).unwrap();
        assert_eq!(wrap.len(), 1);
        assert!(AtomicMeasure::new([(0.1, 0.5)]).is_err());
        assert!(AtomicMeasure::new([(0.1, 1.5), (0.2, -0.5)]).is_err());
    }

    #[test]
    fn pushforward_examples() {
        let a = golden_mean();
        let d = pushforward(
            &CircleMapSpec::rotation(a),
            &AtomicMeasure::dirac(CirclePoint::ZERO),
        );
        assert_eq!(d.atoms()[0].position.value(), a);
        let mu = AtomicMeasure::new([(0.1, 0.3), (0.55, 0.7)]).unwrap();
        assert_eq!(pushforward(&CircleMapSpec::identity(), &mu), mu);
    }

    #[test]
    fn cesaro_small_case() {
        let a = golden_mean();
        let c = cesaro_average(&AtomicMeasure::dirac(CirclePoint::ZERO), a, 3).unwrap();
        let mut want: Vec<f64> = (1..=3).map(|i| (i as f64 * a).fract()).collect();
        want.sort_by(f64::total_cmp);
        for (atom, w) in c.atoms().iter().zip(&want) {
            assert!((atom.position.value() - w).abs() < 1e-15);
            assert!((atom.weight - 1.0 / 3.0).abs() < 1e-16);
        }
        let big = AtomicMeasure::uniform_grid(100).unwrap();
        assert!(matches!(
            cesaro_average(&big, a, 1_000_000),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn csv_and_json_round_trip() {
        let mu = AtomicMeasure::new([(0.125, 0.25), (0.5, 0.75)]).unwrap();
        let mut buf = Vec::new();
        mu.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("position,weight"));
        assert_eq!(AtomicMeasure::read_csv(&buf[..]).unwrap(), mu);
        let js = serde_json::to_string(&mu).unwrap();
        assert_eq!(serde_json::from_str::<AtomicMeasure>(&js).unwrap(), mu);
        assert!(serde_json::from_str::<AtomicMeasure>(
            r#"{"atoms":[{"position":0.1,"weight":0.2}]}"#
        )
        .is_err());
    }
}
