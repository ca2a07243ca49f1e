//! Weighted grid graphs over a raster and shortest paths on them.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::functional::{check_exponent, polyline_integral, segment_integral};
use crate::domain::{Domain, Location};
use crate::dyadic::{DyadicCube, WhitneyDecomposition};
use crate::error::{Error, Result};
use crate::field::{rasterize, rasterize_unchecked, DistanceField};
use crate::geom::{clipped_length, Point, Rect};
use crate::index::SegmentBvh;
use crate::real::{lit, Real};

/// Eight neighbours and eight knight moves. Entries `d` and `d ^ 8` are opposite;
/// the first eight point forward (`dy > 0`, or `dy = 0` and `dx > 0`).
pub const STENCIL: [(i32, i32); 16] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (2, 1),
    (1, 2),
    (-1, 2),
    (-2, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
    (-2, -1),
    (-1, -2),
    (1, -2),
    (2, -1),
];

/// Worst-case ratio between a stencil path and the straight segment it follows.
pub fn stencil_stretch() -> f64 {
    // Between directions (2,1) and (1,1), the widest angular gap.
    let a = (0.5f64).atan();
    let b = std::f64::consts::FRAC_PI_4;
    1.0 / ((b - a) / 2.0).cos()
}

#[inline]
fn step_length(d: usize) -> f64 {
    let (dx, dy) = STENCIL[d];
    ((dx * dx + dy * dy) as f64).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphSide {
    /// Nodes and edges in `ℝ² \ Ω`, weighted by `dist^{1−p}`.
    Exterior,
    /// Nodes and edges in the open domain, weighted by length.
    Interior,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Weighted,
    Length,
}

/// Grid graph over a distance field.
pub struct WeightedGraph<'a, T> {
    pub domain: &'a Domain<T>,
    pub field: DistanceField<T>,
    pub side: GraphSide,
    pub p: f64,
    pub h: f64,
    pub valid: Vec<bool>,
    /// Bit `d` is set when the edge towards `STENCIL[d]` is admissible.
    pub mask: Vec<u16>,
    /// `max(dist, h/2)^{1−p}` at each node.
    pub weight: Vec<f64>,
    /// Valid nodes whose weight was clamped at `h/2`.
    pub floored: usize,
    /// Connected-component label per node (`u32::MAX` for invalid nodes).
    pub component: Vec<u32>,
    /// Label of the largest component.
    pub main_component: u32,
}

/// Graph of `ℝ² \ Ω` over `bbox`, which needs a margin of `diam / 4` around the domain.
pub fn build_complement_graph<'a, T: Real>(domain: &'a Domain<T>, bbox: &Rect<T>, h: T, p: T) -> Result<WeightedGraph<'a, T>> {
    check_exponent(p)?;
    let field = rasterize(domain, bbox, h)?;
    Ok(WeightedGraph::from_field(domain, field, GraphSide::Exterior, p.to_f64_lossy()))
}

/// Graph of the open domain with unit weights.
pub fn build_interior_graph<T: Real>(domain: &Domain<T>, h: T) -> Result<WeightedGraph<'_, T>> {
    let bbox = domain.bbox().expand(h * lit(2.0));
    let field = rasterize_unchecked(domain, &bbox, h)?;
    Ok(WeightedGraph::from_field(domain, field, GraphSide::Interior, 1.0))
}

/// Default bounding box for complement graphs.
pub fn complement_bbox<T: Real>(domain: &Domain<T>) -> Rect<T> {
    domain.bbox().expand(domain.diam() / lit(4.0))
}

impl<'a, T: Real> WeightedGraph<'a, T> {
    pub fn from_field(domain: &'a Domain<T>, field: DistanceField<T>, side: GraphSide, p: f64) -> Self {
        let h = field.step.to_f64_lossy();
        let n = field.len();
        let valid: Vec<bool> = (0..n)
            .map(|k| match side {
                GraphSide::Exterior => !field.inside[k] && field.dist[k] > T::zero(),
                GraphSide::Interior => field.inside[k] && field.dist[k] > T::zero(),
            })
            .collect();
        let floor = h / 2.0;
        let mut floored = 0usize;
        let weight: Vec<f64> = (0..n)
            .map(|k| {
                if side == GraphSide::Interior {
                    return 1.0;
                }
                let d = field.dist[k].to_f64_lossy();
                if valid[k] && d < floor {
                    floored += 1;
                }
                d.max(floor).powf(1.0 - p)
            })
            .collect();
        let (nx, ny) = (field.nx, field.ny);
        let mut mask = vec![0u16; n];
        mask.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
            for (i, m) in row.iter_mut().enumerate() {
                let k = j * nx + i;
                if !valid[k] {
                    continue;
                }
                for (d, &(dx, dy)) in STENCIL.iter().enumerate().take(8) {
                    let (ii, jj) = (i as i64 + dx as i64, j as i64 + dy as i64);
                    if ii < 0 || jj < 0 || ii as usize >= nx || jj as usize >= ny {
                        continue;
                    }
                    let kk = jj as usize * nx + ii as usize;
                    if valid[kk] && edge_ok(domain, &field, side, k, kk, step_length(d) * h) {
                        *m |= 1 << d;
                    }
                }
            }
        });
        for k in 0..n {
            for d in 0..8 {
                if mask[k] & (1 << d) != 0 {
                    let (i, j) = field.coords(k);
                    let (dx, dy) = STENCIL[d];
                    let kk = field.index((i as i64 + dx as i64) as usize, (j as i64 + dy as i64) as usize);
                    mask[kk] |= 1 << (d ^ 8);
                }
            }
        }
        let mut g = WeightedGraph {
            domain,
            field,
            side,
            p,
            h,
            valid,
            mask,
            weight,
            floored,
            component: Vec::new(),
            main_component: 0,
        };
        g.label_components();
        g
    }

    fn label_components(&mut self) {
        let n = self.field.len();
        let mut comp = vec![u32::MAX; n];
        let mut sizes: Vec<usize> = Vec::new();
        let mut stack = Vec::new();
        for s in 0..n {
            if !self.valid[s] || comp[s] != u32::MAX {
                continue;
            }
            let label = sizes.len() as u32;
            comp[s] = label;
            stack.push(s);
            let mut size = 0usize;
            while let Some(u) = stack.pop() {
                size += 1;
                for (_, v) in self.neighbors(u) {
                    if comp[v] == u32::MAX {
                        comp[v] = label;
                        stack.push(v);
                    }
                }
            }
            sizes.push(size);
        }
        self.main_component = sizes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map_or(0, |x| x.0 as u32);
        self.component = comp;
    }

    pub fn node_count(&self) -> usize {
        self.valid.iter().filter(|v| **v).count()
    }

    pub fn edge_count(&self) -> usize {
        self.mask.iter().map(|m| m.count_ones() as usize).sum::<usize>() / 2
    }

    #[inline]
    pub fn point(&self, k: usize) -> Point<T> {
        self.field.node_point(k)
    }

    /// Admissible neighbours of `k` with their stencil direction.
    pub fn neighbors(&self, k: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let m = self.mask[k];
        let (i, j) = self.field.coords(k);
        (0..16).filter(move |d| m & (1 << d) != 0).map(move |d| {
            let (dx, dy) = STENCIL[d];
            (d, self.field.index((i as i64 + dx as i64) as usize, (j as i64 + dy as i64) as usize))
        })
    }

    /// Trapezoidal edge weight `|ab|·(w(a) + w(b))/2`.
    #[inline]
    fn edge_cost(&self, a: usize, b: usize, len: f64, metric: Metric) -> f64 {
        match metric {
            Metric::Weighted => len * 0.5 * (self.weight[a] + self.weight[b]),
            Metric::Length => len,
        }
    }

    /// Connectors from `z` to nodes of the main component, costed exactly.
    ///
    /// Straight pieces are tried first, with the radius doubling from `2.5h`
    /// to `10h`. If none exists (`z` deep in a crevice narrower than `h`), exterior
    /// connectors escape through a short polyline over nearby convex vertices of
    /// the polygon, found on a local visibility graph.
    pub fn connectors(&self, z: Point<T>) -> Vec<Connector<T>> {
        let h = self.field.step;
        let mut r = h * lit(2.5);
        while r <= h * lit(10.0) {
            let out = self.connectors_within(z, r);
            if !out.is_empty() {
                return out;
            }
            r = r * lit(2.0);
        }
        match self.side {
            GraphSide::Exterior => {
                let mut radius = h * lit(4.0);
                while radius <= h * lit(64.0) {
                    let out = self.relay_connectors(z, radius);
                    if !out.is_empty() {
                        return out;
                    }
                    radius = radius * lit(2.0);
                }
                Vec::new()
            }
            GraphSide::Interior => {
                let cap = self.field.extent().diagonal();
                loop {
                    let out = self.connectors_within(z, r);
                    if !out.is_empty() || r > cap {
                        return out;
                    }
                    r = r * lit(2.0);
                }
            }
        }
    }

    /// Euclidean Dijkstra from `z` over the convex polygon vertices within
    /// `radius`; the first relay that sees a node supplies the connectors.
    fn relay_connectors(&self, z: Point<T>, radius: T) -> Vec<Connector<T>> {
        let d = self.domain;
        let n = d.edge_count();
        let window = Rect::new(z - Point::new(radius, radius), z + Point::new(radius, radius));
        let mut pts = vec![z];
        for e in d.bvh().segments_in_rect(&window) {
            let v = d.vertices()[e];
            let prev = d.vertices()[(e + n - 1) % n];
            let next = d.vertices()[(e + 1) % n];
            if (v - prev).cross(next - v) > T::zero() && v.dist(z) <= radius && v != z {
                pts.push(v);
            }
        }
        let m = pts.len();
        let mut dist = vec![f64::INFINITY; m];
        let mut pred = vec![usize::MAX; m];
        let mut done = vec![false; m];
        dist[0] = 0.0;
        loop {
            let Some(u) = (0..m).filter(|&i| !done[i] && dist[i].is_finite()).min_by(|&a, &b| dist[a].total_cmp(&dist[b]))
            else {
                return Vec::new();
            };
            done[u] = true;
            if u != 0 {
                let direct = self.connectors_within(pts[u], self.field.step * lit(2.5));
                if !direct.is_empty() {
                    let mut via = Vec::new();
                    let mut k = u;
                    while k != 0 {
                        via.push(pts[k]);
                        k = pred[k];
                    }
                    via.reverse();
                    let mut chain = vec![z];
                    chain.extend_from_slice(&via);
                    let head = polyline_integral(d, &chain, lit::<T>(self.p), |_| true);
                    if head.divergent || !head.value.is_finite() {
                        continue;
                    }
                    return direct
                        .into_iter()
                        .map(|c| Connector {
                            node: c.node,
                            cost: head.value + c.cost,
                            length: dist[u] + c.length,
                            via: via.clone(),
                        })
                        .collect();
                }
            }
            for w in 0..m {
                if done[w] {
                    continue;
                }
                let len = pts[u].dist(pts[w]).to_f64_lossy();
                if dist[u] + len >= dist[w] {
                    continue;
                }
                if d.segment_enters(pts[u], pts[w]) || runs_along_boundary(d, pts[u], pts[w]) {
                    continue;
                }
                dist[w] = dist[u] + len;
                pred[w] = u;
            }
        }
    }

    fn connectors_within(&self, z: Point<T>, r: T) -> Vec<Connector<T>> {
        let h = self.field.step;
        let f = &self.field;
        let lo_i = ((z.x - r - f.origin.x) / h).ceil().to_f64_lossy().max(0.0) as usize;
        let lo_j = ((z.y - r - f.origin.y) / h).ceil().to_f64_lossy().max(0.0) as usize;
        let hi_i = ((z.x + r - f.origin.x) / h).floor().to_f64_lossy();
        let hi_j = ((z.y + r - f.origin.y) / h).floor().to_f64_lossy();
        if hi_i < 0.0 || hi_j < 0.0 {
            return Vec::new();
        }
        let hi_i = (hi_i as usize).min(f.nx.saturating_sub(1));
        let hi_j = (hi_j as usize).min(f.ny.saturating_sub(1));
        let mut out = Vec::new();
        for j in lo_j..=hi_j {
            for i in lo_i..=hi_i {
                let k = f.index(i, j);
                if !self.valid[k] || self.component[k] != self.main_component {
                    continue;
                }
                let q = f.point(i, j);
                let len = q.dist(z).to_f64_lossy();
                if len > r.to_f64_lossy() {
                    continue;
                }
                if len == 0.0 {
                    out.push(Connector::direct(k, 0.0, 0.0));
                    continue;
                }
                match self.side {
                    GraphSide::Exterior => {
                        if self.domain.segment_enters(z, q) || runs_along_boundary(self.domain, z, q) {
                            continue;
                        }
                        let s = segment_integral(self.domain, z, q, lit::<T>(self.p));
                        if s.divergent || !s.value.is_finite() {
                            continue;
                        }
                        out.push(Connector::direct(k, s.value, len));
                    }
                    GraphSide::Interior => {
                        if self.domain.bvh().meets_segment(z, q) {
                            continue;
                        }
                        out.push(Connector::direct(k, len, len));
                    }
                }
            }
        }
        out
    }

    /// Dijkstra from several seeded nodes. Ties break on length, then node index.
    /// Stops once every node in `targets` is settled (or the queue empties).
    pub fn shortest_paths(&self, sources: &[Connector<T>], targets: &[usize], metric: Metric) -> ShortestPathTree {
        let n = self.field.len();
        let mut cost = vec![f64::INFINITY; n];
        let mut length = vec![f64::INFINITY; n];
        let mut pred = vec![u32::MAX; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        let mut seeds = HashMap::new();
        for (i, s) in sources.iter().enumerate() {
            if (s.cost, s.length) < (cost[s.node], length[s.node]) {
                cost[s.node] = s.cost;
                length[s.node] = s.length;
                seeds.insert(s.node, i);
                heap.push(Entry { cost: s.cost, length: s.length, node: s.node as u32 });
            }
        }
        let mut remaining: HashSet<usize> = targets.iter().copied().collect();
        let h = self.h;
        while let Some(e) = heap.pop() {
            let u = e.node as usize;
            if done[u] || e.cost > cost[u] || (e.cost == cost[u] && e.length > length[u]) {
                continue;
            }
            done[u] = true;
            remaining.remove(&u);
            if !targets.is_empty() && remaining.is_empty() {
                break;
            }
            for (d, v) in self.neighbors(u) {
                if done[v] {
                    continue;
                }
                let len = step_length(d) * h;
                let nc = cost[u] + self.edge_cost(u, v, len, metric);
                let nl = length[u] + len;
                if nc < cost[v] || (nc == cost[v] && nl < length[v]) {
                    cost[v] = nc;
                    length[v] = nl;
                    pred[v] = u as u32;
                    heap.push(Entry { cost: nc, length: nl, node: v as u32 });
                }
            }
        }
        ShortestPathTree { cost, length, pred, seeds }
    }
}

/// Whether the closed segment `[a, b]` stays out of the open domain (exterior graphs)
/// or inside it (interior graphs).
fn edge_ok<T: Real>(domain: &Domain<T>, field: &DistanceField<T>, side: GraphSide, a: usize, b: usize, len: f64) -> bool {
    let (da, db) = (field.dist[a].to_f64_lossy(), field.dist[b].to_f64_lossy());
    let (pa, pb) = (field.node_point(a), field.node_point(b));
    match side {
        GraphSide::Exterior => {
            if da + db >= len {
                return true;
            }
            !domain.segment_enters(pa, pb) && !runs_along_boundary(domain, pa, pb)
        }
        GraphSide::Interior => {
            if da + db > len {
                return true;
            }
            !domain.bvh().meets_segment(pa, pb)
        }
    }
}

/// `[a, b]` shares a piece of positive length with some boundary edge.
pub fn runs_along_boundary<T: Real>(domain: &Domain<T>, a: Point<T>, b: Point<T>) -> bool {
    let d = b - a;
    let l = d.norm();
    if l == T::zero() {
        return false;
    }
    let tol = domain.boundary_tolerance();
    domain.bvh().segments_meeting(a, b).into_iter().any(|e| {
        let (c, f) = domain.edge(e);
        let ef = f - c;
        if (d.cross(ef)).abs() > tol * (l + ef.norm()) {
            return false;
        }
        if (c - a).cross(d).abs() > tol * l {
            return false;
        }
        let t0 = (c - a).dot(d) / (l * l);
        let t1 = (f - a).dot(d) / (l * l);
        let lo = t0.min(t1).max(T::zero());
        let hi = t0.max(t1).min(T::one());
        (hi - lo) * l > tol
    })
}

/// Start or end of a path: a node plus the exact cost of the piece to it.
#[derive(Clone, Debug, PartialEq)]
pub struct Connector<T> {
    pub node: usize,
    pub cost: f64,
    pub length: f64,
    /// Relay points between the endpoint and the node; empty for a straight piece.
    pub via: Vec<Point<T>>,
}

impl<T> Connector<T> {
    pub fn direct(node: usize, cost: f64, length: f64) -> Self {
        Connector { node, cost, length, via: Vec::new() }
    }
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    cost: f64,
    length: f64,
    node: u32,
}

impl PartialEq for Entry {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Entry {
    // Reversed for a min-heap.
    fn cmp(&self, o: &Self) -> Ordering {
        o.cost
            .total_cmp(&self.cost)
            .then(o.length.total_cmp(&self.length))
            .then(o.node.cmp(&self.node))
    }
}

pub struct ShortestPathTree {
    pub cost: Vec<f64>,
    pub length: Vec<f64>,
    pub pred: Vec<u32>,
    /// Seed node to the index of the source connector that seeded it.
    pub seeds: HashMap<usize, usize>,
}

impl ShortestPathTree {
    /// Nodes from the seed to `k`.
    pub fn path_to(&self, k: usize) -> Vec<usize> {
        let mut out = vec![k];
        let mut u = k;
        while self.pred[u] != u32::MAX {
            u = self.pred[u] as usize;
            out.push(u);
        }
        out.reverse();
        out
    }

    /// Best exit through `conns`: `(index into conns, total cost, total length)`.
    pub fn best_exit<T>(&self, conns: &[Connector<T>]) -> Option<(usize, f64, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for (i, c) in conns.iter().enumerate() {
            let tc = self.cost[c.node] + c.cost;
            let tl = self.length[c.node] + c.length;
            if !tc.is_finite() {
                continue;
            }
            let better = match best {
                None => true,
                Some((bi, bc, bl)) => (tc, tl, c.node) < (bc, bl, conns[bi].node),
            };
            if better {
                best = Some((i, tc, tl));
            }
        }
        best
    }
}

/// Output of [`weighted_geodesic`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct GeodesicResult<T> {
    pub z1: Point<T>,
    pub z2: Point<T>,
    pub polyline: Vec<Point<T>>,
    pub length: f64,
    /// Exact functional of the returned polyline.
    pub functional: f64,
    /// Cost of the path in the graph, connectors included.
    pub graph_functional: f64,
    pub h: f64,
    /// `(cube, length of γ ∩ Q̄)`, filled by [`tally_cells`].
    pub per_cell_length: Vec<(DyadicCube, f64)>,
}

fn check_endpoint<T: Real>(domain: &Domain<T>, z: Point<T>) -> Result<()> {
    if domain.locate(z) == Location::Inside {
        return Err(Error::Admissibility(format!("{z:?} lies in the open domain")));
    }
    Ok(())
}

/// Minimal-weight curve in `ℝ² \ Ω` between two points, within the graph.
pub fn weighted_geodesic<T: Real>(graph: &WeightedGraph<'_, T>, z1: Point<T>, z2: Point<T>) -> Result<GeodesicResult<T>> {
    let mut v = geodesics_from(graph, z1, &[z2])?;
    v.pop().unwrap()
}

/// Geodesics from one source to many targets with a single search.
pub fn geodesics_from<T: Real>(
    graph: &WeightedGraph<'_, T>,
    z1: Point<T>,
    targets: &[Point<T>],
) -> Result<Vec<Result<GeodesicResult<T>>>> {
    if graph.side != GraphSide::Exterior {
        return Err(Error::Parameter("geodesics need an exterior graph".into()));
    }
    check_endpoint(graph.domain, z1)?;
    let src = graph.connectors(z1);
    if src.is_empty() {
        return Err(Error::Connectivity(format!("no graph node reachable from {z1:?}")));
    }
    let tconns: Vec<Vec<Connector<T>>> = targets.iter().map(|&z| graph.connectors(z)).collect();
    let stop: Vec<usize> = tconns.iter().flatten().map(|c| c.node).collect();
    let tree = graph.shortest_paths(&src, &stop, Metric::Weighted);
    let p: T = lit(graph.p);
    Ok(targets
        .iter()
        .zip(&tconns)
        .map(|(&z2, conns)| {
            check_endpoint(graph.domain, z2)?;
            if z1 == z2 {
                return Ok(GeodesicResult {
                    z1,
                    z2,
                    polyline: vec![z1],
                    length: 0.0,
                    functional: 0.0,
                    graph_functional: 0.0,
                    h: graph.h,
                    per_cell_length: Vec::new(),
                });
            }
            let (ci, cost, length) = tree
                .best_exit(conns)
                .ok_or_else(|| Error::Connectivity(format!("{z1:?} and {z2:?} are not connected in the graph")))?;
            let nodes = tree.path_to(conns[ci].node);
            let head = &src[tree.seeds[&nodes[0]]].via;
            let tail = conns[ci].via.iter().rev();
            let mut polyline = vec![z1];
            let pts = head.iter().copied().chain(nodes.iter().map(|&k| graph.point(k))).chain(tail.copied());
            for q in pts.chain(std::iter::once(z2)) {
                if *polyline.last().unwrap() != q {
                    polyline.push(q);
                }
            }
            let exact = polyline_integral(graph.domain, &polyline, p, |_| true);
            Ok(GeodesicResult {
                z1,
                z2,
                polyline,
                length,
                functional: exact.value,
                graph_functional: cost,
                h: graph.h,
                per_cell_length: Vec::new(),
            })
        })
        .collect())
}

/// Length of the curve inside each closed Whitney cube it meets.
pub fn tally_cells<T: Real>(result: &mut GeodesicResult<T>, whitney: &WhitneyDecomposition<T>) {
    result.per_cell_length = cell_lengths(&result.polyline, whitney);
}

pub fn cell_lengths<T: Real>(polyline: &[Point<T>], whitney: &WhitneyDecomposition<T>) -> Vec<(DyadicCube, f64)> {
    if polyline.len() < 2 {
        return Vec::new();
    }
    let bvh = SegmentBvh::new(polyline.windows(2).map(|w| (w[0], w[1])).collect());
    let bb = bvh.bbox().unwrap();
    let mut out = Vec::new();
    for c in &whitney.cells {
        let r = whitney.rect(c);
        if !r.touches(&bb) {
            continue;
        }
        let mut total = T::zero();
        bvh.any(
            |b| b.touches(&r),
            |_, a, b| {
                total = total + clipped_length(a, b, &r);
                false
            },
        );
        if total > T::zero() {
            out.push((*c, total.to_f64_lossy()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{build_regular_polygon, build_unit_square};

    #[test]
    fn stencil_is_symmetric() {
        for d in 0..16 {
            let (a, b) = STENCIL[d];
            let (c, e) = STENCIL[d ^ 8];
            assert_eq!((a, b), (-c, -e));
        }
        assert!((stencil_stretch() - 1.0).abs() < 0.03);
    }

    #[test]
    fn square_graph_basics() {
        let d = build_unit_square::<f64>();
        let g = build_complement_graph(&d, &complement_bbox(&d).expand(0.01), 1.0 / 32.0, 1.5).unwrap();
        assert!(g.node_count() > 0);
        for k in 0..g.field.len() {
            for (_, v) in g.neighbors(k) {
                assert!(g.valid[v]);
                assert!(!d.segment_enters(g.point(k), g.point(v)));
            }
        }
    }

    #[test]
    fn geodesic_around_a_square() {
        let d = build_unit_square::<f64>();
        let g = build_complement_graph(&d, &Rect::from_coords(-1.0, -1.0, 2.0, 2.0), 1.0 / 64.0, 1.5).unwrap();
        let r = weighted_geodesic(&g, Point::new(0.0, 0.5), Point::new(1.0, 0.5)).unwrap();
        assert!(r.functional.is_finite() && r.functional > 0.0);
        for w in r.polyline.windows(2) {
            assert!(!d.segment_enters(w[0], w[1]));
        }
        // The curve goes over or under the square.
        assert!(r.length > 1.9);
        let rel = (r.functional - r.graph_functional).abs() / r.functional;
        assert!(rel < 0.1, "{r:?}");
        assert!(weighted_geodesic(&g, Point::new(0.5, 0.5), Point::new(1.0, 0.5)).is_err());
    }

    #[test]
    fn slot_narrower_than_the_grid_is_escaped_through_its_mouth() {
        let g = 1.0 / 1280.0;
        let vs = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.5 + g, 1.0), (0.5 + g, 0.5), (0.5 - g, 0.5), (0.5 - g, 1.0), (0.0, 1.0)];
        let d: Domain<f64> = Domain::new("slot", Default::default(), vs.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap();
        let graph = build_complement_graph(&d, &complement_bbox(&d), 1.0 / 64.0, 1.5).unwrap();
        let z = Point::new(0.5, 0.5);
        assert!(graph.connectors_within(z, graph.field.step * 10.0).is_empty());
        let conns = graph.connectors(z);
        assert!(!conns.is_empty());
        assert!(conns.iter().all(|c| c.via.len() == 1 && (c.via[0].y - 1.0).abs() < 1e-12));
        let r = weighted_geodesic(&graph, z, Point::new(1.2, 0.5)).unwrap();
        assert!(r.functional.is_finite());
        assert!(r.polyline.windows(2).all(|w| !d.segment_enters(w[0], w[1])));
    }

    #[test]
    fn symmetric_pair_costs_agree() {
        let d = build_regular_polygon(32, Point::new(0.0, 0.0), 1.0).unwrap();
        let g = build_complement_graph(&d, &complement_bbox(&d), 1.0 / 32.0, 1.5).unwrap();
        let a = d.vertices()[0];
        let b = d.vertices()[16];
        let ab = weighted_geodesic(&g, a, b).unwrap();
        let ba = weighted_geodesic(&g, b, a).unwrap();
        assert!((ab.graph_functional - ba.graph_functional).abs() < 1e-9 * ab.graph_functional);
    }

    #[test]
    fn cell_lengths_sum_to_curve_length() {
        let w = crate::dyadic::whitney_of_square::<f64>(6);
        let line = [Point::new(0.1, 0.13), Point::new(0.9, 0.41)];
        let cells = cell_lengths(&line, &w);
        let total: f64 = cells.iter().map(|c| c.1).sum();
        let len = line[0].dist(line[1]);
        // Shared edges count twice, so the tally is at least the length.
        assert!(total >= len * (1.0 - 1e-9) && total < len * 1.2, "{total} vs {len}");
    }
}
