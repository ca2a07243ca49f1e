//! Raster cache of the boundary distance and inside labels.

use rayon::prelude::*;

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geom::{point_segment_distance, Point, Rect};
use crate::real::{from_int, lit, Real};

/// Node count above which distances are propagated instead of computed exactly.
pub const EXACT_NODE_LIMIT: usize = 4_000_000;
/// Hard cap on the number of nodes.
pub const NODE_BUDGET: usize = 64_000_000;

/// Grid of nodes `origin + (i·h, j·h)`, `0 ≤ i < nx`, `0 ≤ j < ny`, row-major in `j`.
#[derive(Clone, Debug)]
pub struct DistanceField<T> {
    pub origin: Point<T>,
    pub step: T,
    pub nx: usize,
    pub ny: usize,
    pub dist: Vec<T>,
    pub inside: Vec<bool>,
}

impl<T: Real> DistanceField<T> {
    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    #[inline]
    pub fn point(&self, i: usize, j: usize) -> Point<T> {
        Point::new(
            self.origin.x + from_int::<T>(i as i64) * self.step,
            self.origin.y + from_int::<T>(j as i64) * self.step,
        )
    }

    #[inline]
    pub fn node_point(&self, idx: usize) -> Point<T> {
        let (i, j) = self.coords(idx);
        self.point(i, j)
    }

    pub fn extent(&self) -> Rect<T> {
        Rect::new(self.origin, self.point(self.nx - 1, self.ny - 1))
    }

    /// Nearest node to `p`, if `p` lies within the grid extent.
    pub fn nearest_node(&self, p: Point<T>) -> Option<usize> {
        let fi = ((p.x - self.origin.x) / self.step).round();
        let fj = ((p.y - self.origin.y) / self.step).round();
        let i = fi.to_i64()?;
        let j = fj.to_i64()?;
        if i < 0 || j < 0 || i as usize >= self.nx || j as usize >= self.ny {
            return None;
        }
        Some(self.index(i as usize, j as usize))
    }

    /// Builds a field from an arbitrary per-node function `(point) -> (dist, inside)`.
    pub fn from_fn<F>(origin: Point<T>, step: T, nx: usize, ny: usize, f: F) -> Self
    where
        F: Fn(Point<T>) -> (T, bool) + Sync,
    {
        let mut dist = vec![T::zero(); nx * ny];
        let mut inside = vec![false; nx * ny];
        dist.par_chunks_mut(nx)
            .zip(inside.par_chunks_mut(nx))
            .enumerate()
            .for_each(|(j, (drow, irow))| {
                for i in 0..nx {
                    let p = Point::new(
                        origin.x + from_int::<T>(i as i64) * step,
                        origin.y + from_int::<T>(j as i64) * step,
                    );
                    let (d, ins) = f(p);
                    drow[i] = d;
                    irow[i] = ins;
                }
            });
        DistanceField { origin, step, nx, ny, dist, inside }
    }

    /// Interior node with the largest boundary distance (lowest index on ties).
    pub fn argmax_inside(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for k in 0..self.len() {
            if self.inside[k] && best.map_or(true, |b| self.dist[k] > self.dist[b]) {
                best = Some(k);
            }
        }
        best
    }
}

fn grid_dims<T: Real>(bbox: &Rect<T>, h: T) -> Result<(usize, usize)> {
    let nx = (bbox.width() / h).floor().to_f64_lossy() + 1.0;
    let ny = (bbox.height() / h).floor().to_f64_lossy() + 1.0;
    let nodes = nx * ny;
    if !nodes.is_finite() || nodes > NODE_BUDGET as f64 {
        let suggested = h.to_f64_lossy() * (nodes / NODE_BUDGET as f64).sqrt();
        return Err(Error::Size {
            nodes: nodes.min(u64::MAX as f64) as u64,
            suggested_h: suggested,
        });
    }
    Ok((nx as usize, ny as usize))
}

/// Rasterizes `domain` over `bbox` with spacing `h`. The box must contain the
/// domain with a margin of at least `diam / 4`.
pub fn rasterize<T: Real>(domain: &Domain<T>, bbox: &Rect<T>, h: T) -> Result<DistanceField<T>> {
    if !(h > T::zero()) {
        return Err(Error::Parameter("h must be positive".into()));
    }
    let margin = domain.diam() / lit(4.0) * lit(1.0 - 1e-9);
    if !domain.bbox().expand(margin).inside(bbox) {
        return Err(Error::Parameter("bbox must contain the domain with margin diam/4".into()));
    }
    rasterize_unchecked(domain, bbox, h)
}

/// [`rasterize`] without the margin precondition; used for zoomed windows.
pub fn rasterize_unchecked<T: Real>(domain: &Domain<T>, bbox: &Rect<T>, h: T) -> Result<DistanceField<T>> {
    let (nx, ny) = grid_dims(bbox, h)?;
    let origin = bbox.min;
    let inside = scanline_inside(domain, origin, h, nx, ny);
    let dist = if nx * ny <= EXACT_NODE_LIMIT {
        exact_distances(domain, origin, h, nx, ny)
    } else {
        propagated_distances(domain, origin, h, nx, ny)
    };
    Ok(DistanceField { origin, step: h, nx, ny, dist, inside })
}

fn exact_distances<T: Real>(domain: &Domain<T>, origin: Point<T>, h: T, nx: usize, ny: usize) -> Vec<T> {
    let mut dist = vec![T::zero(); nx * ny];
    dist.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
        let y = origin.y + from_int::<T>(j as i64) * h;
        for (i, d) in row.iter_mut().enumerate() {
            *d = domain.distance_to_boundary(Point::new(origin.x + from_int::<T>(i as i64) * h, y));
        }
    });
    dist
}

/// Exact values within `2h` of the boundary, then closest-segment propagation
/// in a forward and a backward raster sweep.
fn propagated_distances<T: Real>(domain: &Domain<T>, origin: Point<T>, h: T, nx: usize, ny: usize) -> Vec<T> {
    let n = nx * ny;
    let mut dist = vec![T::infinity(); n];
    let mut seg = vec![u32::MAX; n];
    let two_h = h * lit(2.0);
    let clamp = |v: T, hi: usize| -> usize {
        let f = v.floor().to_f64_lossy();
        if f < 0.0 {
            0
        } else {
            (f as usize).min(hi - 1)
        }
    };
    for e in 0..domain.edge_count() {
        let (a, b) = domain.edge(e);
        let r = Rect::bounding([a, b]).unwrap().expand(two_h);
        let i0 = clamp((r.min.x - origin.x) / h, nx);
        let i1 = clamp((r.max.x - origin.x) / h + T::one(), nx);
        let j0 = clamp((r.min.y - origin.y) / h, ny);
        let j1 = clamp((r.max.y - origin.y) / h + T::one(), ny);
        for j in j0..=j1 {
            for i in i0..=i1 {
                let p = Point::new(origin.x + from_int::<T>(i as i64) * h, origin.y + from_int::<T>(j as i64) * h);
                let d = point_segment_distance(p, a, b);
                let k = j * nx + i;
                if d < dist[k] {
                    dist[k] = d;
                    seg[k] = e as u32;
                }
            }
        }
    }
    let point = |k: usize| {
        Point::new(
            origin.x + from_int::<T>((k % nx) as i64) * h,
            origin.y + from_int::<T>((k / nx) as i64) * h,
        )
    };
    let relax = |dist: &mut [T], seg: &mut [u32], k: usize, q: usize| {
        let s = seg[q];
        if s == u32::MAX || seg[k] == s {
            return;
        }
        let (a, b) = domain.edge(s as usize);
        let d = point_segment_distance(point(k), a, b);
        if d < dist[k] {
            dist[k] = d;
            seg[k] = s;
        }
    };
    for j in 0..ny {
        for i in 0..nx {
            let k = j * nx + i;
            if i > 0 {
                relax(&mut dist, &mut seg, k, k - 1);
            }
            if j > 0 {
                relax(&mut dist, &mut seg, k, k - nx);
                if i > 0 {
                    relax(&mut dist, &mut seg, k, k - nx - 1);
                }
                if i + 1 < nx {
                    relax(&mut dist, &mut seg, k, k - nx + 1);
                }
            }
        }
        for i in (0..nx.saturating_sub(1)).rev() {
            let k = j * nx + i;
            relax(&mut dist, &mut seg, k, k + 1);
        }
    }
    for j in (0..ny).rev() {
        for i in (0..nx).rev() {
            let k = j * nx + i;
            if i + 1 < nx {
                relax(&mut dist, &mut seg, k, k + 1);
            }
            if j + 1 < ny {
                relax(&mut dist, &mut seg, k, k + nx);
                if i + 1 < nx {
                    relax(&mut dist, &mut seg, k, k + nx + 1);
                }
                if i > 0 {
                    relax(&mut dist, &mut seg, k, k + nx - 1);
                }
            }
        }
        for i in 1..nx {
            let k = j * nx + i;
            relax(&mut dist, &mut seg, k, k - 1);
        }
    }
    dist
}

/// Even-odd labels by scanning each grid row against the edges crossing it.
fn scanline_inside<T: Real>(domain: &Domain<T>, origin: Point<T>, h: T, nx: usize, ny: usize) -> Vec<bool> {
    let mut rows: Vec<Vec<T>> = vec![Vec::new(); ny];
    for e in 0..domain.edge_count() {
        let (a, b) = domain.edge(e);
        if a.y == b.y {
            continue;
        }
        let (lo, hi) = if a.y < b.y { (a.y, b.y) } else { (b.y, a.y) };
        // Half-open rule: rows with lo <= y < hi.
        let j0 = ((lo - origin.y) / h).ceil().to_f64_lossy().max(0.0) as usize;
        let j1f = ((hi - origin.y) / h).ceil().to_f64_lossy() - 1.0;
        if j1f < 0.0 {
            continue;
        }
        let j1 = (j1f as usize).min(ny.saturating_sub(1));
        for (j, row) in rows.iter_mut().enumerate().take(j1 + 1).skip(j0) {
            let y = origin.y + from_int::<T>(j as i64) * h;
            if y < lo || y >= hi {
                continue;
            }
            row.push(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
        }
    }
    let mut inside = vec![false; nx * ny];
    inside.par_chunks_mut(nx).zip(rows.par_iter_mut()).for_each(|(out, xs)| {
        xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
        for pair in xs.chunks(2) {
            if pair.len() < 2 {
                break;
            }
            let i0 = ((pair[0] - origin.x) / h).ceil().to_f64_lossy().max(0.0) as usize;
            let i1f = ((pair[1] - origin.x) / h).ceil().to_f64_lossy() - 1.0;
            if i1f < 0.0 {
                continue;
            }
            let i1 = (i1f as usize).min(nx - 1);
            for v in out.iter_mut().take(i1 + 1).skip(i0) {
                *v = true;
            }
        }
    });
    inside
}
