//! Sampled estimate of the curve-condition constant.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::functional::check_exponent;
use super::graph::{build_complement_graph, complement_bbox, geodesics_from, WeightedGraph};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::real::Real;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct PairRatio<T> {
    pub z1: Point<T>,
    pub z2: Point<T>,
    pub functional: f64,
    pub distance: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CurveConstantEstimate<T> {
    /// `max F(z₁, z₂) / |z₁ − z₂|^{2−p}` over the sampled pairs.
    pub c_hat: f64,
    pub p: f64,
    pub h: f64,
    pub worst: PairRatio<T>,
    pub pairs: Vec<PairRatio<T>>,
    pub nodes: usize,
}

/// Smallest `m` with `m(m−1)/2 ≥ n`.
pub fn points_for_pairs(n: usize) -> usize {
    let mut m = 2;
    while m * (m - 1) / 2 < n {
        m += 1;
    }
    m
}

/// Boundary samples for `n_pairs` pairs. Polygon vertices come first when they fit.
pub fn pair_points<T: Real>(domain: &Domain<T>, n_pairs: usize, seed: u64) -> Vec<Point<T>> {
    domain.sample_boundary(points_for_pairs(n_pairs.max(1)), seed)
}

/// The first `n` pairs `(i, j)`, `i < j`, in lexicographic order.
pub fn pair_indices(m: usize, n: usize) -> Vec<(usize, usize)> {
    (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).take(n).collect()
}

/// Builds the complement graph at spacing `h` and evaluates sampled boundary pairs.
pub fn curve_condition_constant<T: Real>(domain: &Domain<T>, p: T, n_pairs: usize, seed: u64, h: T) -> Result<CurveConstantEstimate<T>> {
    check_exponent(p)?;
    if n_pairs == 0 {
        return Err(Error::Parameter("need at least one pair".into()));
    }
    let graph = build_complement_graph(domain, &complement_bbox(domain), h, p)?;
    let pts = pair_points(domain, n_pairs, seed);
    curve_constant_on_graph(&graph, &pts, n_pairs)
}

/// Evaluates the first `n_pairs` pairs of `pts` on an existing graph.
pub fn curve_constant_on_graph<T: Real>(graph: &WeightedGraph<'_, T>, pts: &[Point<T>], n_pairs: usize) -> Result<CurveConstantEstimate<T>> {
    let idx = pair_indices(pts.len(), n_pairs);
    let sources: Vec<usize> = {
        let mut s: Vec<usize> = idx.iter().map(|x| x.0).collect();
        s.dedup();
        s
    };
    let two_minus_p = 2.0 - graph.p;
    let per_source: Vec<Result<Vec<PairRatio<T>>>> = sources
        .par_iter()
        .map(|&i| {
            let targets: Vec<Point<T>> = idx.iter().filter(|x| x.0 == i).map(|x| pts[x.1]).collect();
            let res = geodesics_from(graph, pts[i], &targets)?;
            res.into_iter()
                .zip(&targets)
                .map(|(r, &z2)| {
                    let r = r?;
                    let distance = pts[i].dist(z2).to_f64_lossy();
                    let ratio = if distance > 0.0 { r.functional / distance.powf(two_minus_p) } else { 0.0 };
                    Ok(PairRatio { z1: pts[i], z2, functional: r.functional, distance, ratio })
                })
                .collect()
        })
        .collect();
    let mut pairs = Vec::with_capacity(idx.len());
    for r in per_source {
        pairs.extend(r?);
    }
    let worst = pairs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.ratio.total_cmp(&b.1.ratio).then(b.0.cmp(&a.0)))
        .map(|x| x.1.clone())
        .ok_or_else(|| Error::Parameter("no pairs".into()))?;
    Ok(CurveConstantEstimate {
        c_hat: worst.ratio,
        p: graph.p,
        h: graph.h,
        worst,
        pairs,
        nodes: graph.node_count(),
    })
}
