//! Invariant measures: cycle decomposition of grid maps, empirical orbit
//! measures, and the smooth invariant measure of a conjugated rotation.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arithmetic::{frac, CirclePoint};
use crate::error::{Error, Result};
use crate::maps::{grid_successor, CircleMapSpec, GRID_CAP};
use crate::measures::{Atom, AtomicMeasure, PushforwardLebesgue};

/// Cycle and basin structure of `T_N` on the grid `{i/N}`.
#[derive(Debug, Clone)]
pub struct FunctionalGraphAnalysis {
    pub n: u64,
    /// Node indices of each cycle in dynamical order, starting at the
    /// smallest node; cycles sorted by that node.
    pub cycles: Vec<Vec<u32>>,
    /// Number of grid nodes whose forward orbit ends in each cycle.
    pub basin_sizes: Vec<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphSummary {
    pub n: u64,
    pub cycle_count: usize,
    /// Cycle length -> number of cycles of that length.
    pub cycle_lengths: BTreeMap<usize, usize>,
    pub basin_fractions: Vec<f64>,
}

impl FunctionalGraphAnalysis {
    /// Uniform measure on cycle `k`.
    pub fn cycle_measure(&self, k: usize) -> AtomicMeasure {
        let nf = self.n as f64;
        let c = &self.cycles[k];
        let w = 1.0 / c.len() as f64;
        AtomicMeasure::from_unsorted(
            c.iter()
                .map(|&i| Atom {
                    position: CirclePoint::wrap(i as f64 / nf),
                    weight: w,
                })
                .collect(),
        )
    }

    /// Mixture of the cycle measures weighted by basin fraction.
    pub fn physical_measure(&self) -> AtomicMeasure {
        let nf = self.n as f64;
        let mut atoms = Vec::new();
        for (c, &b) in self.cycles.iter().zip(&self.basin_sizes) {
            let w = b as f64 / nf / c.len() as f64;
            atoms.extend(c.iter().map(|&i| Atom {
                position: CirclePoint::wrap(i as f64 / nf),
                weight: w,
            }));
        }
        AtomicMeasure::from_unsorted(atoms)
    }

    pub fn summary(&self) -> GraphSummary {
        let mut cycle_lengths = BTreeMap::new();
        for c in &self.cycles {
            *cycle_lengths.entry(c.len()).or_insert(0) += 1;
        }
        GraphSummary {
            n: self.n,
            cycle_count: self.cycles.len(),
            cycle_lengths,
            basin_fractions: self
                .basin_sizes
                .iter()
                .map(|&b| b as f64 / self.n as f64)
                .collect(),
        }
    }

    /// One row per cycle node: `cycle,length,basin_size,node,position`.
    pub fn write_cycles_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["cycle", "length", "basin_size", "node", "position"])?;
        let nf = self.n as f64;
        for (k, (c, b)) in self.cycles.iter().zip(&self.basin_sizes).enumerate() {
            for &i in c {
                wr.write_record([
                    k.to_string(),
                    c.len().to_string(),
                    b.to_string(),
                    i.to_string(),
                    format!("{:.16e}", i as f64 / nf),
                ])?;
            }
        }
        wr.flush()?;
        Ok(())
    }
}

const UNSEEN: u32 = u32::MAX;
const ON_PATH: u32 = u32::MAX - 1;

/// Decomposes the functional graph of a discretized map into cycles and
/// basins in `O(N)`.
///
/// Each unvisited node starts a walk that stops at a node already resolved
/// (joining its basin) or at a node on the current walk (closing a new
/// cycle).
pub fn analyze_functional_graph(map: &CircleMapSpec, n: u64) -> Result<FunctionalGraphAnalysis> {
    let CircleMapSpec::Discretized { inner, n: grid } = map else {
        return Err(Error::InvalidArgument(
            "functional-graph analysis needs a discretized map".into(),
        ));
    };
    if *grid != n {
        return Err(Error::InvalidArgument(format!(
            "map is discretized on N = {grid}, analysis requested for N = {n}"
        )));
    }
    if n > GRID_CAP {
        return Err(Error::ResourceLimit {
            what: "grid size",
            requested: n,
            cap: GRID_CAP,
        });
    }
    let nu = n as usize;
    let succ: Vec<u32> = (0..n)
        .into_par_iter()
        .map(|i| grid_successor(inner, n, i) as u32)
        .collect();

    // cycle id per node once resolved
    let mut label = vec![UNSEEN; nu];
    let mut raw_cycles: Vec<Vec<u32>> = Vec::new();
    let mut basin: Vec<u64> = Vec::new();
    let mut path: Vec<u32> = Vec::new();
    for start in 0..nu {
        if label[start] != UNSEEN {
            continue;
        }
        path.clear();
        let mut v = start as u32;
        while label[v as usize] == UNSEEN {
            label[v as usize] = ON_PATH;
            path.push(v);
            v = succ[v as usize];
        }
        let id = if label[v as usize] == ON_PATH {
            let pos = path
                .iter()
                .rposition(|&p| p == v)
                .expect("node is on the path");
            raw_cycles.push(path[pos..].to_vec());
            basin.push(0);
            (raw_cycles.len() - 1) as u32
        } else {
            label[v as usize]
        };
        for &p in &path {
            label[p as usize] = id;
        }
        basin[id as usize] += path.len() as u64;
    }

    // canonical order: rotate each cycle to its smallest node, sort cycles
    let mut order: Vec<usize> = (0..raw_cycles.len()).collect();
    for c in raw_cycles.iter_mut() {
        let k = (0..c.len())
            .min_by_key(|&k| c[k])
            .expect("cycles are non-empty");
        c.rotate_left(k);
    }
    order.sort_by_key(|&k| raw_cycles[k][0]);
    let cycles = order
        .iter()
        .map(|&k| std::mem::take(&mut raw_cycles[k]))
        .collect();
    let basin_sizes = order.iter().map(|&k| basin[k]).collect();
    Ok(FunctionalGraphAnalysis {
        n,
        cycles,
        basin_sizes,
    })
}

/// Empirical measure of `T^{burn_in+1}(x0), ..., T^{burn_in+n}(x0)`.
pub fn birkhoff_measure(
    map: &CircleMapSpec,
    x0: CirclePoint,
    n: u64,
    burn_in: u64,
) -> Result<AtomicMeasure> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let mut x = map.iterate(x0, burn_in);
    let w = 1.0 / n as f64;
    let mut atoms = Vec::with_capacity(n as usize);
    for _ in 0..n {
        x = map.eval(x);
        atoms.push(Atom {
            position: x,
            weight: w,
        });
    }
    Ok(AtomicMeasure::from_unsorted(atoms))
}

/// `h_* m` for a conjugated rotation `h o R_alpha o h^{-1}`; Lebesgue
/// measure for a plain rotation.
pub fn invariant_measure_of_diffeo(map: &CircleMapSpec) -> Result<PushforwardLebesgue> {
    match map {
        CircleMapSpec::ConjugatedRotation { h, .. } => PushforwardLebesgue::new(h.clone()),
        CircleMapSpec::Rotation { .. } => {
            PushforwardLebesgue::new(crate::maps::ConjugacyDiffeo::identity())
        }
        _ => Err(Error::InvalidArgument(
            "closed-form invariant density needs a (conjugated) rotation".into(),
        )),
    }
}

/// Average of `f` along `n` steps of the orbit of `x0` after `burn_in`.
pub fn birkhoff_average<F: Fn(f64) -> f64>(
    map: &CircleMapSpec,
    x0: f64,
    n: u64,
    burn_in: u64,
    f: F,
) -> f64 {
    let mut x = frac(x0);
    for _ in 0..burn_in {
        x = frac(x + map.displacement(x));
    }
    let mut acc = crate::numeric::Accum::default();
    for _ in 0..n {
        x = frac(x + map.displacement(x));
        acc.add(f(x));
    }
    acc.value() / n as f64
}
