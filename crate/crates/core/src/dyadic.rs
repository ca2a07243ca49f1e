//! Dyadic cubes and Whitney decompositions.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geom::{Point, Rect};
use crate::real::{from_int, lit, pow2, Real};

/// Square `[ix, ix+1] × [iy, iy+1] · base_scale · 2^{−level}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicCube {
    pub level: i32,
    pub ix: i64,
    pub iy: i64,
}

#[inline]
fn floor_div(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

#[inline]
fn ceil_div(a: i64, b: i64) -> i64 {
    -(-a).div_euclid(b)
}

impl DyadicCube {
    pub const fn new(level: i32, ix: i64, iy: i64) -> Self {
        DyadicCube { level, ix, iy }
    }

    #[inline]
    pub fn side<T: Real>(&self, base: T) -> T {
        base * pow2(-self.level)
    }

    pub fn rect<T: Real>(&self, base: T) -> Rect<T> {
        let s = self.side(base);
        let x0 = from_int::<T>(self.ix) * s;
        let y0 = from_int::<T>(self.iy) * s;
        Rect::from_coords(x0, y0, x0 + s, y0 + s)
    }

    pub fn center<T: Real>(&self, base: T) -> Point<T> {
        self.rect(base).center()
    }

    /// Concentric open square of three times the side.
    pub fn block<T: Real>(&self, base: T) -> Rect<T> {
        let s = self.side(base);
        self.rect(base).expand(s)
    }

    pub fn parent(&self) -> Self {
        DyadicCube::new(self.level - 1, floor_div(self.ix, 2), floor_div(self.iy, 2))
    }

    pub fn children(&self) -> [Self; 4] {
        let (l, x, y) = (self.level + 1, 2 * self.ix, 2 * self.iy);
        [
            DyadicCube::new(l, x, y),
            DyadicCube::new(l, x + 1, y),
            DyadicCube::new(l, x, y + 1),
            DyadicCube::new(l, x + 1, y + 1),
        ]
    }

    /// Ancestor at a coarser (or equal) level.
    pub fn ancestor(&self, level: i32) -> Self {
        assert!(level <= self.level);
        let s = 1i64 << (self.level - level);
        DyadicCube::new(level, floor_div(self.ix, s), floor_div(self.iy, s))
    }

    /// `self ⊆ other` as closed squares of the same dyadic grid family.
    pub fn is_within(&self, other: &Self) -> bool {
        self.level >= other.level && self.ancestor(other.level) == *other
    }

    /// Open squares are disjoint (exact integer test).
    pub fn interiors_disjoint(&self, other: &Self) -> bool {
        !(self.is_within(other) || other.is_within(self))
    }

    /// Closed squares share at least one point (exact integer test).
    pub fn closures_touch(&self, other: &Self) -> bool {
        let l = self.level.max(other.level);
        let sa = 1i64 << (l - self.level);
        let sb = 1i64 << (l - other.level);
        let (ax0, ay0) = (self.ix * sa, self.iy * sa);
        let (bx0, by0) = (other.ix * sb, other.iy * sb);
        ax0 <= bx0 + sb && bx0 <= ax0 + sa && ay0 <= by0 + sb && by0 <= ay0 + sa
    }

    /// Cubes of level `m ≤ self.level` whose closures touch this cube's closure.
    pub fn coarser_touching(&self, m: i32) -> impl Iterator<Item = DyadicCube> {
        let s = 1i64 << (self.level - m);
        let (x0, x1) = (ceil_div(self.ix, s) - 1, floor_div(self.ix + 1, s));
        let (y0, y1) = (ceil_div(self.iy, s) - 1, floor_div(self.iy + 1, s));
        (y0..=y1).flat_map(move |y| (x0..=x1).map(move |x| DyadicCube::new(m, x, y)))
    }

    /// Cubes of level `m > self.level` outside this cube whose closures touch it.
    pub fn finer_ring(&self, m: i32) -> Vec<DyadicCube> {
        let s = 1i64 << (m - self.level);
        let (x0, y0) = (self.ix * s, self.iy * s);
        let mut out = Vec::with_capacity((4 * s + 4) as usize);
        for t in -1..=s {
            out.push(DyadicCube::new(m, x0 + t, y0 - 1));
            out.push(DyadicCube::new(m, x0 + t, y0 + s));
        }
        for t in 0..s {
            out.push(DyadicCube::new(m, x0 - 1, y0 + t));
            out.push(DyadicCube::new(m, x0 + s, y0 + t));
        }
        out
    }
}

/// How an open rectangle sits relative to an open set `U`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coverage {
    Inside,
    Outside,
    Mixed,
}

/// Open set `U` with exact boundary queries.
pub trait Region<T: Real>: Sync {
    fn classify_open_rect(&self, r: &Rect<T>) -> Coverage;
    /// `dist(p, ∂U)`.
    fn boundary_distance(&self, p: Point<T>) -> T;
    /// `dist(R, ∂U)` for a closed rectangle `R`.
    fn rect_boundary_distance(&self, r: &Rect<T>) -> T;
    fn contains(&self, p: Point<T>) -> bool;
}

/// Which open set a domain induces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `Ω`.
    Interior,
    /// `ℝ² \ Ω̄`.
    Exterior,
    /// `ℝ² \ ∂Ω`.
    Both,
}

pub struct DomainRegion<'a, T> {
    pub domain: &'a Domain<T>,
    pub side: Side,
}

impl<'a, T: Real> DomainRegion<'a, T> {
    pub fn new(domain: &'a Domain<T>, side: Side) -> Self {
        DomainRegion { domain, side }
    }
}

impl<'a, T: Real> Region<T> for DomainRegion<'a, T> {
    fn classify_open_rect(&self, r: &Rect<T>) -> Coverage {
        if self.domain.bvh().meets_open_rect(r) {
            return Coverage::Mixed;
        }
        let inside = self.domain.contains(r.center());
        match (self.side, inside) {
            (Side::Both, _) | (Side::Interior, true) | (Side::Exterior, false) => Coverage::Inside,
            _ => Coverage::Outside,
        }
    }

    fn boundary_distance(&self, p: Point<T>) -> T {
        self.domain.distance_to_boundary(p)
    }

    fn rect_boundary_distance(&self, r: &Rect<T>) -> T {
        self.domain.bvh().rect_distance(r)
    }

    fn contains(&self, p: Point<T>) -> bool {
        if self.domain.distance_to_boundary(p) == T::zero() {
            return false;
        }
        match self.side {
            Side::Interior => self.domain.contains(p),
            Side::Exterior => !self.domain.contains(p),
            Side::Both => true,
        }
    }
}

/// `ℝ² \ {p}`.
pub struct PunctureComplement<T> {
    pub point: Point<T>,
}

impl<T: Real> Region<T> for PunctureComplement<T> {
    fn classify_open_rect(&self, r: &Rect<T>) -> Coverage {
        if r.contains_open(self.point) {
            Coverage::Mixed
        } else {
            Coverage::Inside
        }
    }

    fn boundary_distance(&self, p: Point<T>) -> T {
        p.dist(self.point)
    }

    fn rect_boundary_distance(&self, r: &Rect<T>) -> T {
        r.distance_to_point(self.point)
    }

    fn contains(&self, p: Point<T>) -> bool {
        p != self.point
    }
}

/// The empty set.
pub struct EmptyRegion;

impl<T: Real> Region<T> for EmptyRegion {
    fn classify_open_rect(&self, _: &Rect<T>) -> Coverage {
        Coverage::Outside
    }

    fn boundary_distance(&self, _: Point<T>) -> T {
        T::infinity()
    }

    fn rect_boundary_distance(&self, _: &Rect<T>) -> T {
        T::infinity()
    }

    fn contains(&self, _: Point<T>) -> bool {
        false
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecompositionKind {
    OfOpenSet,
    OfSquare,
}

/// Disjoint dyadic cubes with sizes comparable to their boundary distance.
#[derive(Clone, Debug)]
pub struct WhitneyDecomposition<T> {
    pub base_scale: T,
    /// Sorted by `(level, ix, iy)`.
    pub cells: Vec<DyadicCube>,
    pub kind: DecompositionKind,
    pub min_level: i32,
    pub max_level: i32,
    /// Cubes at `max_level` that were neither accepted nor discarded.
    pub truncated_count: usize,
    /// Total area of those cubes (an upper bound on the uncovered area of `U`).
    pub truncated_area: T,
    /// Set when the region had no points in the working box.
    pub empty: bool,
    index: HashSet<DyadicCube>,
}

impl<T: Real> WhitneyDecomposition<T> {
    fn from_cells(base_scale: T, mut cells: Vec<DyadicCube>, kind: DecompositionKind, min_level: i32, max_level: i32) -> Self {
        cells.sort_unstable();
        cells.dedup();
        let index = cells.iter().copied().collect();
        WhitneyDecomposition {
            base_scale,
            empty: cells.is_empty(),
            cells,
            kind,
            min_level,
            max_level,
            truncated_count: 0,
            truncated_area: T::zero(),
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, c: &DyadicCube) -> bool {
        self.index.contains(c)
    }

    pub fn side(&self, c: &DyadicCube) -> T {
        c.side(self.base_scale)
    }

    pub fn rect(&self, c: &DyadicCube) -> Rect<T> {
        c.rect(self.base_scale)
    }

    pub fn levels(&self) -> BTreeMap<i32, usize> {
        let mut m = BTreeMap::new();
        for c in &self.cells {
            *m.entry(c.level).or_insert(0) += 1;
        }
        m
    }

    pub fn total_area(&self) -> T {
        self.cells.iter().map(|c| self.rect(c).area()).sum()
    }

    /// The cell whose closed square contains `p` (lowest level on shared edges).
    pub fn locate(&self, p: Point<T>) -> Option<DyadicCube> {
        let lo = self.cells.first()?.level;
        let hi = self.cells.last()?.level;
        for l in lo..=hi {
            let s = pow2::<T>(-l) * self.base_scale;
            let ix = (p.x / s).floor().to_i64()?;
            let iy = (p.y / s).floor().to_i64()?;
            for dy in [0, -1] {
                for dx in [0, -1] {
                    let c = DyadicCube::new(l, ix + dx, iy + dy);
                    if self.index.contains(&c) && self.rect(&c).contains_closed(p) {
                        return Some(c);
                    }
                }
            }
        }
        None
    }

    /// Every pair of cells with touching closures, listed once as `(finer, coarser-or-equal)`.
    pub fn touching_pairs(&self) -> Vec<(DyadicCube, DyadicCube)> {
        let lo = match self.cells.first() {
            Some(c) => c.level,
            None => return Vec::new(),
        };
        let mut out = Vec::new();
        for c in &self.cells {
            for m in lo..=c.level {
                for q in c.coarser_touching(m) {
                    if q == *c || (m == c.level && q < *c) {
                        continue;
                    }
                    if self.index.contains(&q) {
                        out.push((*c, q));
                    }
                }
            }
        }
        out
    }

    /// Serializes as `{"base_scale": s, "cells": [{"level", "ix", "iy"}, …]}`
    /// plus bookkeeping fields.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&DecompositionFile {
            base_scale: self.base_scale.to_f64_lossy(),
            cells: self.cells.clone(),
            kind: Some(self.kind),
            min_level: Some(self.min_level),
            max_level: Some(self.max_level),
            truncated_count: Some(self.truncated_count),
            truncated_area: Some(self.truncated_area.to_f64_lossy()),
        })
        .expect("decomposition serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: DecompositionFile = serde_json::from_str(s)?;
        let lo = f.cells.iter().map(|c| c.level).min().unwrap_or(0);
        let hi = f.cells.iter().map(|c| c.level).max().unwrap_or(0);
        let mut d = Self::from_cells(
            lit(f.base_scale),
            f.cells,
            f.kind.unwrap_or(DecompositionKind::OfOpenSet),
            f.min_level.unwrap_or(lo),
            f.max_level.unwrap_or(hi),
        );
        d.truncated_count = f.truncated_count.unwrap_or(0);
        d.truncated_area = lit(f.truncated_area.unwrap_or(0.0));
        Ok(d)
    }
}

#[derive(Serialize, Deserialize)]
struct DecompositionFile {
    base_scale: f64,
    cells: Vec<DyadicCube>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kind: Option<DecompositionKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    min_level: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_level: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    truncated_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    truncated_area: Option<f64>,
}

/// Coarsest level whose cubes are at least twice the larger side of `bbox`.
pub(crate) fn root_level<T: Real>(bbox: &Rect<T>, base: T) -> i32 {
    let ext = bbox.width().max(bbox.height()).max(base * pow2(-30));
    let mut l = 0i32;
    while base * pow2(-l) < ext * lit(2.0) {
        l -= 1;
    }
    while l < 60 && base * pow2(-(l + 1)) >= ext * lit(2.0) {
        l += 1;
    }
    l
}

/// Whitney decomposition of an open set inside a working box.
///
/// A cube is accepted when the concentric open block of three times its side
/// lies in `U` while its parent's block does not, which gives
/// `ℓ ≤ dist(Q, ∂U) ≤ 3√2·ℓ` and neighbor side ratios in `{½, 1, 2}`.
/// Cubes that reach `max_level` undecided are counted as truncated.
pub fn whitney_of_open_set<T: Real, R: Region<T> + ?Sized>(
    region: &R,
    bbox: &Rect<T>,
    max_level: i32,
    base_scale: T,
) -> Result<WhitneyDecomposition<T>> {
    if max_level < 0 {
        return Err(Error::Parameter("max_level must be >= 0".into()));
    }
    let l0 = root_level(bbox, base_scale).min(max_level);
    let s0 = base_scale * pow2(-l0);
    let ix0 = (bbox.min.x / s0).floor().to_i64().unwrap();
    let ix1 = (bbox.max.x / s0).floor().to_i64().unwrap();
    let iy0 = (bbox.min.y / s0).floor().to_i64().unwrap();
    let iy1 = (bbox.max.y / s0).floor().to_i64().unwrap();
    let mut stack: Vec<DyadicCube> = Vec::new();
    for iy in (iy0..=iy1).rev() {
        for ix in (ix0..=ix1).rev() {
            stack.push(DyadicCube::new(l0, ix, iy));
        }
    }
    let mut cells = Vec::new();
    let mut truncated_count = 0usize;
    let mut truncated_area = T::zero();
    while let Some(q) = stack.pop() {
        let r = q.rect(base_scale);
        if !r.overlaps_open(bbox) {
            continue;
        }
        let cov = region.classify_open_rect(&r);
        if cov == Coverage::Outside {
            continue;
        }
        if cov == Coverage::Inside && region.classify_open_rect(&q.block(base_scale)) == Coverage::Inside {
            cells.push(q);
            continue;
        }
        if q.level >= max_level {
            truncated_count += 1;
            truncated_area = truncated_area + r.area();
            continue;
        }
        for c in q.children().iter().rev() {
            stack.push(*c);
        }
    }
    let mut d = WhitneyDecomposition::from_cells(base_scale, cells, DecompositionKind::OfOpenSet, l0, max_level);
    d.truncated_count = truncated_count;
    d.truncated_area = truncated_area;
    Ok(d)
}

/// Dyadic subcubes `Q′` of the unit square with `ℓ(Q′) = dist(Q′, ∂Q)` and
/// `ℓ(Q′) ≥ 2^{−j_max}`, enumerated exactly.
pub fn whitney_of_square<T: Real>(j_max: i32) -> WhitneyDecomposition<T> {
    let cells = square_cells(&DyadicCube::new(0, 0, 0), j_max);
    WhitneyDecomposition::from_cells(T::one(), cells, DecompositionKind::OfSquare, 2, j_max.max(2))
}

/// Square-Whitney cells of an arbitrary dyadic cube, down to absolute level
/// `parent.level + j_max`.
pub fn square_cells(parent: &DyadicCube, j_max: i32) -> Vec<DyadicCube> {
    let mut cells = Vec::new();
    for j in 2..=j_max {
        cells.extend(square_layer(parent, j));
    }
    cells
}

/// Layer `j` of the square decomposition of `parent`: the ring of relative
/// level-`j` cubes at offset exactly one cube from the parent's boundary.
pub fn square_layer(parent: &DyadicCube, j: i32) -> impl Iterator<Item = DyadicCube> + '_ {
    let n = 1i64 << j;
    let level = parent.level + j;
    let (bx, by) = (parent.ix * n, parent.iy * n);
    (0..n).flat_map(move |b| {
        (0..n).filter_map(move |a| {
            let off = a.min(b).min(n - 1 - a).min(n - 1 - b);
            (off == 1).then_some(DyadicCube::new(level, bx + a, by + b))
        })
    })
}

/// Closed-form size of layer `j`: `4·(2^j − 3)`.
pub fn square_layer_size(j: i32) -> u64 {
    if j < 2 {
        0
    } else {
        4 * ((1u64 << j) - 3)
    }
}

/// Number of cells with side `2^{−j}` in a square decomposition.
pub fn layer_count<T: Real>(decomp: &WhitneyDecomposition<T>, j: i32) -> Result<usize> {
    if decomp.kind != DecompositionKind::OfSquare {
        return Err(Error::Parameter("layer_count needs a square decomposition".into()));
    }
    if j < 2 || j > decomp.max_level {
        return Err(Error::Range(j as i64));
    }
    let lo = decomp.cells.partition_point(|c| c.level < j);
    let hi = decomp.cells.partition_point(|c| c.level <= j);
    Ok(hi - lo)
}

/// All cells whose closures touch the closure of `cell`.
pub fn neighbors<T: Real>(decomp: &WhitneyDecomposition<T>, cell: &DyadicCube) -> Result<Vec<DyadicCube>> {
    if !decomp.contains(cell) {
        return Err(Error::Lookup(format!("cell {cell:?} is not in the decomposition")));
    }
    let (lo, hi) = match (decomp.cells.first(), decomp.cells.last()) {
        (Some(a), Some(b)) => (a.level, b.level),
        _ => return Ok(Vec::new()),
    };
    let mut out = Vec::new();
    for m in lo..=cell.level {
        out.extend(cell.coarser_touching(m).filter(|q| q != cell && decomp.contains(q)));
    }
    for m in cell.level + 1..=hi {
        out.extend(cell.finer_ring(m).into_iter().filter(|q| decomp.contains(q)));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// A cell breaking `ℓ ≤ dist(Q, ∂U) ≤ 4√2·ℓ`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundViolation {
    pub cell: DyadicCube,
    pub side: f64,
    pub distance: f64,
}

/// Checks the two-sided distance bound on every cell with exact
/// segment-to-square distances.
pub fn check_whitney_bounds<T: Real, R: Region<T> + ?Sized>(
    decomp: &WhitneyDecomposition<T>,
    region: &R,
) -> Vec<BoundViolation> {
    let upper = lit::<T>(4.0) * T::SQRT_2();
    let tol = lit::<T>(1e-12);
    decomp
        .cells
        .iter()
        .filter_map(|c| {
            let l = decomp.side(c);
            let d = region.rect_boundary_distance(&decomp.rect(c));
            let ok = d >= l * (T::one() - tol) && d <= upper * l * (T::one() + tol);
            (!ok).then(|| BoundViolation {
                cell: *c,
                side: l.to_f64_lossy(),
                distance: d.to_f64_lossy(),
            })
        })
        .collect()
}

/// Touching pairs whose side ratio lies outside `{½, 1, 2}`.
pub fn check_neighbor_ratios<T: Real>(decomp: &WhitneyDecomposition<T>) -> Vec<(DyadicCube, DyadicCube)> {
    decomp
        .touching_pairs()
        .into_iter()
        .filter(|(a, b)| (a.level - b.level).abs() > 1)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::build_unit_square;

    /// Independent enumeration: every dyadic subcube, distance measured directly.
    fn brute_square(j_max: i32) -> BTreeMap<i32, usize> {
        let mut m = BTreeMap::new();
        for j in 1..=j_max {
            let n = 1i64 << j;
            let l = 1.0 / n as f64;
            for a in 0..n {
                for b in 0..n {
                    let (x0, y0) = (a as f64 * l, b as f64 * l);
                    let d = x0.min(y0).min(1.0 - x0 - l).min(1.0 - y0 - l);
                    if d == l {
                        *m.entry(j).or_insert(0) += 1;
                    }
                }
            }
        }
        m
    }

    #[test]
    fn square_layers_match_enumeration() {
        let w = whitney_of_square::<f64>(8);
        let brute = brute_square(8);
        for j in 2..=8 {
            assert_eq!(layer_count(&w, j).unwrap(), brute[&j]);
            assert_eq!(layer_count(&w, j).unwrap() as u64, square_layer_size(j));
        }
        assert_eq!(layer_count(&w, 2).unwrap(), 4);
        assert_eq!(layer_count(&w, 3).unwrap(), 20);
        assert_eq!(layer_count(&w, 4).unwrap(), 52);
        assert!(brute.get(&1).is_none());
    }

    #[test]
    fn small_square_cases() {
        assert!(whitney_of_square::<f64>(1).is_empty());
        let w = whitney_of_square::<f64>(3);
        assert_eq!(w.levels(), BTreeMap::from([(2, 4), (3, 20)]));
        assert!(layer_count(&w, 1).is_err());
        assert!(layer_count(&w, 4).is_err());
    }

    #[test]
    fn open_set_rule_reproduces_square() {
        let sq = build_unit_square::<f64>();
        let region = DomainRegion::new(&sq, Side::Interior);
        let bbox = Rect::from_coords(0.0, 0.0, 1.0, 1.0);
        let w = whitney_of_open_set(&region, &bbox, 7, 1.0).unwrap();
        let s = whitney_of_square::<f64>(7);
        assert_eq!(w.cells, s.cells);
    }

    #[test]
    fn puncture_bounds() {
        let p = PunctureComplement { point: Point::new(0.3, 0.7) };
        let bbox = Rect::from_coords(-0.2, 0.2, 0.8, 1.2);
        let w = whitney_of_open_set(&p, &bbox, 9, 1.0).unwrap();
        assert!(!w.is_empty());
        assert!(check_whitney_bounds(&w, &p).is_empty());
        assert!(check_neighbor_ratios(&w).is_empty());
        assert!(w.truncated_count > 0);
    }

    #[test]
    fn empty_region() {
        let w = whitney_of_open_set::<f64, _>(&EmptyRegion, &Rect::from_coords(0.0, 0.0, 1.0, 1.0), 5, 1.0).unwrap();
        assert!(w.is_empty() && w.empty);
    }

    #[test]
    fn neighbor_queries() {
        let w = whitney_of_square::<f64>(3);
        // Lower-left cell of the central level-2 block.
        let c = DyadicCube::new(2, 1, 1);
        let ns = neighbors(&w, &c).unwrap();
        assert!(ns.iter().any(|q| q.level == 3));
        for q in &ns {
            assert!((q.level - c.level).abs() <= 1);
            assert!(q.closures_touch(&c));
        }
        // Brute force over all cells.
        let brute: Vec<_> = w.cells.iter().filter(|q| **q != c && q.closures_touch(&c)).copied().collect();
        assert_eq!(ns, brute);
        assert!(neighbors(&w, &DyadicCube::new(9, 0, 0)).is_err());
        let single = WhitneyDecomposition::<f64>::from_cells(1.0, vec![c], DecompositionKind::OfOpenSet, 2, 2);
        assert!(neighbors(&single, &c).unwrap().is_empty());
    }

    #[test]
    fn integer_predicates() {
        let a = DyadicCube::new(2, 1, 1);
        assert!(a.closures_touch(&DyadicCube::new(3, 1, 2)));
        assert!(!a.closures_touch(&DyadicCube::new(3, 0, 2)));
        assert!(DyadicCube::new(3, 3, 3).is_within(&a));
        assert!(!a.interiors_disjoint(&DyadicCube::new(3, 3, 3)));
        assert!(a.interiors_disjoint(&DyadicCube::new(2, 2, 1)));
        assert_eq!(DyadicCube::new(3, -1, -3).parent(), DyadicCube::new(2, -1, -2));
    }

    #[test]
    fn json_shape() {
        let w = whitney_of_square::<f64>(3);
        let v: serde_json::Value = serde_json::from_str(&w.to_json()).unwrap();
        assert_eq!(v["base_scale"], 1.0);
        assert_eq!(v["cells"].as_array().unwrap().len(), 24);
        assert_eq!(v["cells"][0]["level"], 2);
        let back = WhitneyDecomposition::<f64>::from_json(&w.to_json()).unwrap();
        assert_eq!(back.cells, w.cells);
    }
}
