//! Numerical John constant of a domain.

use std::collections::BinaryHeap;

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use super::graph::{build_interior_graph, Connector, Metric, WeightedGraph};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::real::{OrdReal, Real};
use crate::rng::substream;

/// Candidates taken from the low end of the tree-path proxy.
pub const PROXY_CANDIDATES: usize = 24;
const BISECTIONS: usize = 30;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct JohnEstimate<T> {
    /// Smallest feasible constant found over the candidate start points.
    pub j: f64,
    pub center: Point<T>,
    pub worst_point: Point<T>,
    /// Witness curve from `worst_point` to `center`.
    pub curve: Vec<Point<T>>,
    pub h: f64,
    pub candidates: usize,
}

/// Estimates the largest `J` such that every near-boundary node `x` reaches the
/// innermost node `x₀` along a grid curve with `dist(γ(t), ∂Ω) ≥ J·t`, `t` the
/// arclength from `x`.
pub fn john_constant<T: Real>(domain: &Domain<T>, h: T, n_samples: usize, seed: u64) -> Result<JohnEstimate<T>> {
    if !(h > T::zero()) {
        return Err(Error::Parameter("h must be positive".into()));
    }
    let g = build_interior_graph(domain, h)?;
    john_on_graph(&g, n_samples, seed)
}

pub fn john_on_graph<T: Real>(g: &WeightedGraph<'_, T>, n_samples: usize, seed: u64) -> Result<JohnEstimate<T>> {
    let n = g.field.len();
    let dist: Vec<f64> = g.field.dist.iter().map(|d| d.to_f64_lossy()).collect();
    let center = (0..n)
        .filter(|&k| g.valid[k])
        .max_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(b.cmp(&a)))
        .ok_or_else(|| Error::Resolution(g.h))?;
    let tree = g.shortest_paths(&[Connector::direct(center, 0.0, 0.0)], &[], Metric::Length);
    let band = 1.5 * g.h;
    let near: Vec<usize> = (0..n)
        .filter(|&k| g.valid[k] && dist[k] <= band && tree.length[k].is_finite())
        .collect();
    if near.is_empty() {
        return Err(Error::Resolution(g.h));
    }
    let proxies: Vec<(f64, usize)> = near
        .iter()
        .map(|&x| {
            let mut worst = f64::INFINITY;
            let mut u = x;
            while tree.pred[u] != u32::MAX {
                u = tree.pred[u] as usize;
                let t = tree.length[x] - tree.length[u];
                worst = worst.min(dist[u] / t);
            }
            (worst, x)
        })
        .collect();
    let mut order = proxies.clone();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut picked: Vec<(f64, usize)> = order.iter().take(PROXY_CANDIDATES).copied().collect();
    let mut rng = substream(seed, "john_constant");
    let m = n_samples.min(proxies.len());
    let mut extra: Vec<usize> = sample(&mut rng, proxies.len(), m).into_iter().collect();
    extra.sort_unstable();
    for i in extra {
        if !picked.iter().any(|p| p.1 == proxies[i].1) {
            picked.push(proxies[i]);
        }
    }
    picked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let pc = g.point(center);
    let mut best = f64::INFINITY;
    let mut worst_x = picked[0].1;
    for &(proxy, x) in &picked {
        if best.is_finite() && feasible(g, &dist, x, center, best).is_some() {
            continue;
        }
        let mut lo = if proxy.is_finite() { proxy } else { 0.0 };
        let mut hi = (dist[center] / g.point(x).dist(pc).to_f64_lossy()).min(best);
        if hi <= lo {
            if lo < best {
                best = lo;
                worst_x = x;
            }
            continue;
        }
        for _ in 0..BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if feasible(g, &dist, x, center, mid).is_some() {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-6 * hi {
                break;
            }
        }
        if lo < best {
            best = lo;
            worst_x = x;
        }
    }
    let path = feasible(g, &dist, worst_x, center, best).unwrap_or_else(|| vec![worst_x, center]);
    Ok(JohnEstimate {
        j: best,
        center: pc,
        worst_point: g.point(worst_x),
        curve: path.into_iter().map(|k| g.point(k)).collect(),
        h: g.h,
        candidates: picked.len(),
    })
}

/// Earliest-arrival search from `x` to `c` where a node at arclength `t` is usable
/// only if `dist ≥ J·t`. Returns the node path when `c` is reached.
pub fn feasible<T: Real>(g: &WeightedGraph<'_, T>, dist: &[f64], x: usize, c: usize, j: f64) -> Option<Vec<usize>> {
    let n = g.field.len();
    let slack = 0.5 * g.h;
    let pc = g.point(c);
    let heur = |k: usize| g.point(k).dist(pc).to_f64_lossy();
    let mut t = vec![f64::INFINITY; n];
    let mut pred = vec![u32::MAX; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    t[x] = 0.0;
    heap.push((std::cmp::Reverse(OrdReal(heur(x))), std::cmp::Reverse(x)));
    while let Some((_, std::cmp::Reverse(u))) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        if u == c {
            let mut path = vec![c];
            let mut v = c;
            while pred[v] != u32::MAX {
                v = pred[v] as usize;
                path.push(v);
            }
            path.reverse();
            return Some(path);
        }
        for (_, v) in g.neighbors(u) {
            if done[v] {
                continue;
            }
            let nt = t[u] + g.point(u).dist(g.point(v)).to_f64_lossy();
            if nt < t[v] && dist[v] + slack >= j * nt {
                t[v] = nt;
                pred[v] = u as u32;
                heap.push((std::cmp::Reverse(OrdReal(nt + heur(v))), std::cmp::Reverse(v)));
            }
        }
    }
    None
}
