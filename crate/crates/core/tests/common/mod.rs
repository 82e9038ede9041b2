//! Helpers shared by the integration tests.
#![allow(dead_code)]

use circstab::measures::AtomicMeasure;
use circstab::{circle_dist, CirclePoint};
use rand::Rng;

/// Random probability measure with `1..=max_atoms` atoms.
pub fn random_atomic<R: Rng>(rng: &mut R, max_atoms: usize) -> AtomicMeasure {
    let n = rng.random_range(1..=max_atoms);
    let raw: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.random::<f64>(), rng.random::<f64>() + 0.05))
        .collect();
    let total: f64 = raw.iter().map(|a| a.1).sum();
    AtomicMeasure::new(raw.into_iter().map(|(x, w)| (x, w / total))).unwrap()
}

/// Optimal transport cost between two atomic measures under the circle
/// metric, as a min-cost flow solved by successive shortest paths with
/// Bellman-Ford. Independent of the CDF formula used by the library.
pub fn transport_lp(mu: &AtomicMeasure, nu: &AtomicMeasure) -> f64 {
    let a: Vec<(f64, f64)> = mu
        .atoms()
        .iter()
        .map(|t| (t.position.value(), t.weight))
        .collect();
    let b: Vec<(f64, f64)> = nu
        .atoms()
        .iter()
        .map(|t| (t.position.value(), t.weight))
        .collect();
    let (n, m) = (a.len(), b.len());
    let (s, t) = (n + m, n + m + 1);
    let nodes = n + m + 2;
    // edge list with paired reverse edges at index ^ 1
    let mut to = Vec::new();
    let mut cap = Vec::new();
    let mut cost = Vec::new();
    let mut adj = vec![Vec::new(); nodes];
    let mut add = |u: usize, v: usize, c: f64, w: f64| {
        adj[u].push(to.len());
        to.push(v);
        cap.push(c);
        cost.push(w);
        adj[v].push(to.len());
        to.push(u);
        cap.push(0.0);
        cost.push(-w);
    };
    for (i, &(_, w)) in a.iter().enumerate() {
        add(s, i, w, 0.0);
    }
    for (j, &(_, w)) in b.iter().enumerate() {
        add(n + j, t, w, 0.0);
    }
    for (i, &(x, _)) in a.iter().enumerate() {
        for (j, &(y, _)) in b.iter().enumerate() {
            let d = circle_dist(CirclePoint::new(x).unwrap(), CirclePoint::new(y).unwrap());
            add(i, n + j, f64::INFINITY, d);
        }
    }
    let mut total = 0.0;
    let mut left = 1.0f64;
    while left > 1e-14 {
        let mut dist = vec![f64::INFINITY; nodes];
        let mut prev = vec![usize::MAX; nodes];
        dist[s] = 0.0;
        for _ in 0..nodes {
            let mut changed = false;
            for u in 0..nodes {
                if dist[u].is_infinite() {
                    continue;
                }
                for &e in &adj[u] {
                    if cap[e] > 1e-15 && dist[u] + cost[e] < dist[to[e]] - 1e-15 {
                        dist[to[e]] = dist[u] + cost[e];
                        prev[to[e]] = e;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if dist[t].is_infinite() {
            break;
        }
        let mut push = left;
        let mut v = t;
        while v != s {
            let e = prev[v];
            push = push.min(cap[e]);
            v = to[e ^ 1];
        }
        let mut v = t;
        while v != s {
            let e = prev[v];
            cap[e] -= push;
            cap[e ^ 1] += push;
            v = to[e ^ 1];
        }
        total += push * dist[t];
        left -= push;
    }
    total
}
