//! Weak mean porosity: annulus counters, prefix sums and the verdict, plus
//! classical porosity and the dimension bounds derived from them.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::dyadic::{
    root_level, square_layer, square_layer_size, whitney_of_open_set, Coverage, DomainRegion, DyadicCube,
    Region, Side,
};
use crate::error::{Error, Result};
use crate::field::{rasterize_unchecked, DistanceField};
use crate::geom::{Point, Rect};
use crate::real::{lit, pow2, Real};

/// Largest ring enumerated cube by cube for a partially covered outer cell.
pub const RING_ENUMERATION_CAP: u64 = 4096;
/// Witness cubes retained per scale.
pub const WITNESS_CAP: usize = 32;

/// `α(t) = εt` and `λ(k) = ⌈c/ε⌉`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PorosityParams {
    pub eps: f64,
    pub c: f64,
    pub j0: i32,
}

impl PorosityParams {
    pub fn new(eps: f64, c: f64, j0: i32) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) || !(c > 0.0) {
            return Err(Error::Parameter("need 0 < eps < 1 and c > 0".into()));
        }
        Ok(PorosityParams { eps, c, j0 })
    }

    /// Minimal side length at scale `t`.
    pub fn alpha(&self, t: f64) -> f64 {
        self.eps * t
    }

    /// Required number of cubes, rounded up.
    pub fn lambda_count(&self, _k: i32) -> u64 {
        (self.c / self.eps - 1e-9).ceil().max(1.0) as u64
    }
}

/// Unique `ε = 2^{−m} ∈ (2^{−15}/C, 2^{−14}/C]`; `C < 1` is clamped to 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSchedule {
    pub eps: f64,
    pub m: i32,
    pub clamped: bool,
}

pub fn epsilon_schedule(c: f64) -> Result<EpsilonSchedule> {
    if !c.is_finite() || c.is_nan() {
        return Err(Error::Parameter("C must be finite".into()));
    }
    let clamped = c < 1.0;
    let c = c.max(1.0);
    let hi = 2f64.powi(-14) / c;
    let mut m = 14;
    while 2f64.powi(-m) > hi {
        m += 1;
    }
    Ok(EpsilonSchedule { eps: 2f64.powi(-m), m, clamped })
}

/// Disjoint dyadic cubes in the complement of `∂Ω`.
pub enum CubeFamily<'a, T> {
    /// Materialized cubes with a bucket index.
    Explicit(ExplicitFamily<T>),
    /// The double decomposition, evaluated on demand around each query.
    Implicit(ImplicitFamily<'a, T>),
}

pub struct ExplicitFamily<T> {
    pub base_scale: T,
    pub cubes: Vec<DyadicCube>,
    bucket: T,
    buckets: HashMap<(i64, i64), Vec<u32>>,
    max_side: T,
}

impl<T: Real> ExplicitFamily<T> {
    pub fn new(base_scale: T, mut cubes: Vec<DyadicCube>) -> Self {
        cubes.sort_unstable();
        let max_side = cubes.first().map_or(T::zero(), |c| c.side(base_scale));
        let min_side = cubes.last().map_or(T::one(), |c| c.side(base_scale));
        // Buckets a few times the finest side keep per-query scans short.
        let bucket = (min_side * lit(8.0)).max(max_side / lit(64.0));
        let mut buckets: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
        for (i, c) in cubes.iter().enumerate() {
            let p = c.center(base_scale);
            let key = ((p.x / bucket).floor().to_i64().unwrap(), (p.y / bucket).floor().to_i64().unwrap());
            buckets.entry(key).or_default().push(i as u32);
        }
        ExplicitFamily { base_scale, cubes, bucket, buckets, max_side }
    }

    /// Indices of cubes whose centers lie within the box, expanded by half the largest side.
    fn candidates(&self, r: &Rect<T>) -> Vec<u32> {
        let r = r.expand(self.max_side * lit(0.5));
        let i0 = (r.min.x / self.bucket).floor().to_i64().unwrap();
        let i1 = (r.max.x / self.bucket).floor().to_i64().unwrap();
        let j0 = (r.min.y / self.bucket).floor().to_i64().unwrap();
        let j1 = (r.max.y / self.bucket).floor().to_i64().unwrap();
        let cells = (i1 - i0 + 1) as u64 * (j1 - j0 + 1) as u64;
        let mut out = Vec::new();
        if cells as usize > self.buckets.len() {
            for v in self.buckets.values() {
                out.extend_from_slice(v);
            }
        } else {
            for j in j0..=j1 {
                for i in i0..=i1 {
                    if let Some(v) = self.buckets.get(&(i, j)) {
                        out.extend_from_slice(v);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

pub struct ImplicitFamily<'a, T> {
    pub domain: &'a Domain<T>,
    pub bbox: Rect<T>,
    pub base_scale: T,
    pub outer_max_level: i32,
    pub inner_max_level: i32,
}

/// The closed cube lies in `B(x, r) \ B(x, r/2)`: every corner within `r`, the
/// nearest point at least `r/2` away.
pub fn cube_in_annulus<T: Real>(rect: &Rect<T>, x: Point<T>, r: T) -> bool {
    rect.max_distance_to_point(x) <= r && rect.distance_to_point(x) >= r * lit(0.5)
}

/// Result of counting family cubes inside an annulus.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AnnulusCount {
    pub count: u64,
    pub witnesses: Vec<DyadicCube>,
}

impl<'a, T: Real> CubeFamily<'a, T> {
    pub fn base_scale(&self) -> T {
        match self {
            CubeFamily::Explicit(f) => f.base_scale,
            CubeFamily::Implicit(f) => f.base_scale,
        }
    }

    /// Cubes inside `A_k(x)` with side at least `alpha`. Counting stops once
    /// `need` is reached.
    pub fn count_in_annulus(&self, x: Point<T>, k: i32, alpha: T, need: u64) -> AnnulusCount {
        match self {
            CubeFamily::Explicit(f) => explicit_count(f, x, k, alpha, need),
            CubeFamily::Implicit(f) => implicit_count(f, x, k, alpha, need),
        }
    }

    /// Number of cubes (closed form for the implicit family).
    pub fn len(&self) -> u64 {
        match self {
            CubeFamily::Explicit(f) => f.cubes.len() as u64,
            CubeFamily::Implicit(f) => {
                let region = DomainRegion::new(f.domain, Side::Both);
                let outer = whitney_of_open_set(&region, &f.bbox, f.outer_max_level, f.base_scale)
                    .expect("valid levels");
                outer.cells.len() as u64 * (2..=f.inner_max_level).map(square_layer_size).sum::<u64>()
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn explicit_count<T: Real>(f: &ExplicitFamily<T>, x: Point<T>, k: i32, alpha: T, need: u64) -> AnnulusCount {
    let r = pow2::<T>(-k);
    let disc = Rect::new(x - Point::new(r, r), x + Point::new(r, r));
    let mut out = AnnulusCount::default();
    for i in f.candidates(&disc) {
        let c = f.cubes[i as usize];
        if c.side(f.base_scale) < alpha {
            continue;
        }
        if cube_in_annulus(&c.rect(f.base_scale), x, r) {
            out.count += 1;
            if out.witnesses.len() < WITNESS_CAP {
                out.witnesses.push(c);
            }
            if out.count >= need {
                break;
            }
        }
    }
    out
}

fn implicit_count<T: Real>(f: &ImplicitFamily<T>, x: Point<T>, k: i32, alpha: T, need: u64) -> AnnulusCount {
    let r = pow2::<T>(-k);
    let half = r * lit(0.5);
    let base = f.base_scale;
    let region = DomainRegion::new(f.domain, Side::Both);
    let mut out = AnnulusCount::default();
    let l0 = root_level(&f.bbox, base).min(f.outer_max_level);
    let s0 = base * pow2(-l0);
    let ix0 = (f.bbox.min.x / s0).floor().to_i64().unwrap();
    let ix1 = (f.bbox.max.x / s0).floor().to_i64().unwrap();
    let iy0 = (f.bbox.min.y / s0).floor().to_i64().unwrap();
    let iy1 = (f.bbox.max.y / s0).floor().to_i64().unwrap();
    let mut queue: VecDeque<DyadicCube> = VecDeque::new();
    for iy in iy0..=iy1 {
        for ix in ix0..=ix1 {
            queue.push_back(DyadicCube::new(l0, ix, iy));
        }
    }
    // Breadth-first, so large cells (which carry the most cubes) come first.
    while let Some(q) = queue.pop_front() {
        let rect = q.rect(base);
        if !rect.overlaps_open(&f.bbox) || rect.distance_to_point(x) >= r || rect.max_distance_to_point(x) <= half {
            continue;
        }
        let side = rect.width();
        // Finest inner layer with side >= alpha.
        let mut j_top = 1;
        while j_top < f.inner_max_level && side * pow2(-(j_top + 1)) >= alpha {
            j_top += 1;
        }
        if j_top < 2 {
            // Every descendant is too small for this scale.
            continue;
        }
        if region.classify_open_rect(&rect) == Coverage::Inside
            && region.classify_open_rect(&q.block(base)) == Coverage::Inside
        {
            if cube_in_annulus(&rect, x, r) {
                out.count += (2..=j_top).map(square_layer_size).sum::<u64>();
                for w in square_layer(&q, 2) {
                    if out.witnesses.len() < WITNESS_CAP {
                        out.witnesses.push(w);
                    }
                }
            } else {
                for j in 2..=j_top {
                    if square_layer_size(j) > RING_ENUMERATION_CAP {
                        break;
                    }
                    for c in square_layer(&q, j) {
                        if cube_in_annulus(&c.rect(base), x, r) {
                            out.count += 1;
                            if out.witnesses.len() < WITNESS_CAP {
                                out.witnesses.push(c);
                            }
                        }
                    }
                }
            }
            if out.count >= need {
                break;
            }
            continue;
        }
        if q.level >= f.outer_max_level {
            continue;
        }
        queue.extend(q.children());
    }
    out
}

/// Materialized double decomposition: each Whitney cell of `ℝ² \ ∂Ω` is split
/// into its square-Whitney cells down to relative level `inner_max_level`.
pub fn build_double_decomposition<'a, T: Real>(
    domain: &'a Domain<T>,
    bbox: &Rect<T>,
    outer_max_level: i32,
    inner_max_level: i32,
) -> Result<CubeFamily<'a, T>> {
    if outer_max_level < 2 || inner_max_level < 2 {
        return Err(Error::Parameter("levels must be >= 2".into()));
    }
    let region = DomainRegion::new(domain, Side::Both);
    let outer = whitney_of_open_set(&region, bbox, outer_max_level, T::one())?;
    let per: u64 = (2..=inner_max_level).map(square_layer_size).sum();
    let total = per.saturating_mul(outer.cells.len() as u64);
    const BUDGET: u64 = 40_000_000;
    if total > BUDGET {
        return Err(Error::Size {
            nodes: total,
            suggested_h: f64::NAN,
        });
    }
    let mut cubes = Vec::with_capacity(total as usize);
    for q in &outer.cells {
        for j in 2..=inner_max_level {
            cubes.extend(square_layer(q, j));
        }
    }
    Ok(CubeFamily::Explicit(ExplicitFamily::new(T::one(), cubes)))
}

/// The same family without materializing it.
pub fn implicit_double_decomposition<'a, T: Real>(
    domain: &'a Domain<T>,
    bbox: &Rect<T>,
    outer_max_level: i32,
    inner_max_level: i32,
) -> Result<CubeFamily<'a, T>> {
    if outer_max_level < 2 || inner_max_level < 2 {
        return Err(Error::Parameter("levels must be >= 2".into()));
    }
    Ok(CubeFamily::Implicit(ImplicitFamily {
        domain,
        bbox: *bbox,
        base_scale: T::one(),
        outer_max_level,
        inner_max_level,
    }))
}

/// `χ_k(x) ∈ {0, 1}`.
pub fn chi_k<T: Real>(family: &CubeFamily<T>, x: Point<T>, k: i32, params: &PorosityParams) -> u8 {
    let need = params.lambda_count(k);
    let alpha = lit::<T>(params.alpha(2f64.powi(-k)));
    (family.count_in_annulus(x, k, alpha, need).count >= need) as u8
}

/// Per-point record of the counters, prefix sums and verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PorosityProfile {
    pub x: [f64; 2],
    /// `chi[k − 1] = χ_k` for `k = 1..=j_max`.
    pub chi: Vec<u8>,
    #[serde(rename = "S")]
    pub s: Vec<u32>,
    pub verdict: bool,
    pub witness_counts: Vec<u64>,
    pub k0: i32,
    pub j0: i32,
    pub j_max: i32,
    /// Scales below `k0`, excluded from the verdict.
    pub skipped: Vec<i32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<Vec<DyadicCube>>,
}

impl PorosityProfile {
    /// Profile from precomputed counters.
    pub fn from_chi(x: [f64; 2], chi: Vec<u8>, j0: i32, k0: i32) -> Self {
        let j_max = chi.len() as i32;
        let mut s = Vec::with_capacity(chi.len());
        let mut acc = 0u32;
        for &c in &chi {
            acc += c as u32;
            s.push(acc);
        }
        let start = j0.max(k0).max(1);
        let verdict = (start..=j_max).all(|j| 2 * s[(j - 1) as usize] > j as u32);
        PorosityProfile {
            x,
            witness_counts: vec![0; chi.len()],
            chi,
            s,
            verdict,
            k0,
            j0,
            j_max,
            skipped: (1..k0.min(j_max + 1)).collect(),
            witnesses: Vec::new(),
        }
    }

    /// First `j` in the verdict window with `S_j/j ≤ ½`.
    pub fn first_failure(&self) -> Option<i32> {
        let start = self.j0.max(self.k0).max(1);
        (start..=self.j_max).find(|&j| 2 * self.s[(j - 1) as usize] <= j as u32)
    }
}

/// Smallest positive `k` with `2^{−k} < diam`.
pub fn k0_for_diameter(diam: f64) -> i32 {
    let mut k = 1;
    while 2f64.powi(-k) >= diam {
        k += 1;
    }
    k
}

pub fn porosity_profile<T: Real>(
    family: &CubeFamily<T>,
    x: Point<T>,
    j_max: i32,
    params: &PorosityParams,
    diam: T,
) -> Result<PorosityProfile> {
    if j_max < params.j0 || j_max < 1 {
        return Err(Error::Parameter("j_max must be >= j0 and >= 1".into()));
    }
    let k0 = k0_for_diameter(diam.to_f64_lossy());
    let mut chi = Vec::with_capacity(j_max as usize);
    let mut counts = Vec::with_capacity(j_max as usize);
    let mut witnesses = Vec::with_capacity(j_max as usize);
    for k in 1..=j_max {
        let need = params.lambda_count(k);
        let alpha = lit::<T>(params.alpha(2f64.powi(-k)));
        let c = family.count_in_annulus(x, k, alpha, need);
        chi.push((c.count >= need) as u8);
        counts.push(c.count);
        witnesses.push(c.witnesses);
    }
    let mut p = PorosityProfile::from_chi([x.x.to_f64_lossy(), x.y.to_f64_lossy()], chi, params.j0, k0);
    p.witness_counts = counts;
    p.witnesses = witnesses;
    Ok(p)
}

/// `por(A, x, r)` from a distance field of `A`: the best node `y ∈ B(x, r)` by
/// `min(dist(y, A), r − |y − x|) / r`.
pub fn classical_porosity<T: Real>(field: &DistanceField<T>, x: Point<T>, r: T) -> Result<T> {
    if !(r > T::zero()) {
        return Err(Error::Parameter("r must be positive".into()));
    }
    let ball = Rect::new(x - Point::new(r, r), x + Point::new(r, r));
    if !ball.inside(&field.extent().expand(field.step * lit(1e-9))) {
        return Err(Error::Coverage(r.to_f64_lossy()));
    }
    let h = field.step;
    let i0 = ((ball.min.x - field.origin.x) / h).ceil().to_f64_lossy().max(0.0) as usize;
    let i1 = (((ball.max.x - field.origin.x) / h).floor().to_f64_lossy() as usize).min(field.nx - 1);
    let j0 = ((ball.min.y - field.origin.y) / h).ceil().to_f64_lossy().max(0.0) as usize;
    let j1 = (((ball.max.y - field.origin.y) / h).floor().to_f64_lossy() as usize).min(field.ny - 1);
    let mut best = T::zero();
    for j in j0..=j1 {
        for i in i0..=i1 {
            let y = field.point(i, j);
            let room = r - y.dist(x);
            if room <= T::zero() {
                continue;
            }
            best = best.max(field.dist[field.index(i, j)].min(room));
        }
    }
    Ok(best / r)
}

/// Classical porosity of `∂Ω` at `x`, rasterizing the window `B(x, r)` at `h`.
pub fn classical_porosity_of_boundary<T: Real>(domain: &Domain<T>, x: Point<T>, r: T, h: T) -> Result<T> {
    let window = Rect::new(x - Point::new(r, r), x + Point::new(r, r)).expand(h);
    let field = rasterize_unchecked(domain, &window, h)?;
    classical_porosity(&field, x, r)
}

/// `d − C(d, c)·ε^{d−1}`.
pub fn dimension_bound_from_porosity(eps: f64, c_dc: f64, d: i32) -> Result<f64> {
    if !(eps > 0.0) || !(c_dc > 0.0) || d < 1 {
        return Err(Error::Parameter("eps, C(d,c) must be positive and d >= 1".into()));
    }
    Ok(d as f64 - c_dc * eps.powi(d - 1))
}

/// `2 − M/C` for a domain with curve-condition constant `C`.
pub fn dimension_bound_from_curve_constant(m: f64, c: f64) -> Result<f64> {
    if !(m > 0.0) || !(c > 0.0) {
        return Err(Error::Parameter("M and C must be positive".into()));
    }
    Ok(2.0 - m / c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{build_koch_snowflake, build_unit_square};

    #[test]
    fn schedule_values() {
        assert_eq!(epsilon_schedule(1.0).unwrap().eps, 2f64.powi(-14));
        assert_eq!(epsilon_schedule(2.0).unwrap().eps, 2f64.powi(-15));
        assert_eq!(epsilon_schedule(3.0).unwrap().eps, 2f64.powi(-16));
        let e = epsilon_schedule(0.5).unwrap();
        assert!(e.clamped && e.eps == 2f64.powi(-14));
        for c in [1.0, 1.5, 7.3, 100.0, 1e4] {
            let e = epsilon_schedule(c).unwrap().eps;
            assert!(e > 2f64.powi(-15) / c && e <= 2f64.powi(-14) / c);
        }
    }

    #[test]
    fn params_round_up() {
        let p = PorosityParams::new(0.3, 1.0, 1).unwrap();
        assert_eq!(p.lambda_count(3), 4);
        assert_eq!(p.alpha(2.0) / 2.0, 0.3);
        let p = PorosityParams::new(0.25, 1.0, 1).unwrap();
        assert_eq!(p.lambda_count(1), 4);
    }

    #[test]
    fn profile_arithmetic() {
        let all = PorosityProfile::from_chi([0.0, 0.0], vec![1; 8], 1, 1);
        assert!(all.verdict);
        assert_eq!(all.s, (1..=8).collect::<Vec<u32>>());
        let alt = PorosityProfile::from_chi([0.0, 0.0], vec![1, 0, 1, 0, 1, 0], 1, 1);
        assert!(!alt.verdict);
        assert_eq!(alt.first_failure(), Some(2));
    }

    #[test]
    fn empty_and_hand_placed_families() {
        let params = PorosityParams::new(0.25, 1.0, 1).unwrap();
        let x = Point::new(0.0, 0.0);
        let empty = CubeFamily::Explicit(ExplicitFamily::<f64>::new(1.0, Vec::new()));
        assert_eq!(chi_k(&empty, x, 2, &params), 0);
        // Four cubes of side 2^-4 = alpha(2^-2) at distance about 3/16 in A_2(0).
        let cubes = vec![
            DyadicCube::new(4, 2, 0),
            DyadicCube::new(4, -3, 0),
            DyadicCube::new(4, 0, 2),
            DyadicCube::new(4, 0, -3),
        ];
        let fam = CubeFamily::Explicit(ExplicitFamily::<f64>::new(1.0, cubes));
        assert_eq!(chi_k(&fam, x, 2, &params), 1);
    }

    #[test]
    fn annulus_exactness() {
        let x = Point::new(0.0, 0.0);
        let r = 0.25;
        assert!(cube_in_annulus(&Rect::from_coords(0.125, 0.0, 0.1875, 0.0625), x, r));
        assert!(!cube_in_annulus(&Rect::from_coords(0.0625, 0.0, 0.125, 0.0625), x, r));
        assert!(!cube_in_annulus(&Rect::from_coords(0.1875, 0.1875, 0.25, 0.25), x, r));
    }

    #[test]
    fn implicit_matches_explicit() {
        let d = build_koch_snowflake(1.0f64 / 3.0, 4).unwrap();
        let bbox = d.bbox().expand(d.diam() / 4.0);
        let ex = build_double_decomposition(&d, &bbox, 7, 3).unwrap();
        let im = implicit_double_decomposition(&d, &bbox, 7, 3).unwrap();
        assert_eq!(ex.len(), im.len());
        for (i, x) in d.sample_boundary(12, 4).into_iter().enumerate() {
            let k = 1 + (i as i32 % 5);
            let alpha = 2f64.powi(-k - 6);
            let a = ex.count_in_annulus(x, k, alpha, u64::MAX).count;
            let b = im.count_in_annulus(x, k, alpha, u64::MAX).count;
            assert_eq!(a, b, "x = {x:?}, k = {k}");
        }
    }

    #[test]
    fn square_domain_passes() {
        let d = build_unit_square::<f64>();
        let bbox = d.bbox().expand(1.0);
        let fam = implicit_double_decomposition(&d, &bbox, 16, 12).unwrap();
        let params = PorosityParams::new(2f64.powi(-6), 1.0, 1).unwrap();
        for x in d.sample_boundary(8, 3) {
            let p = porosity_profile(&fam, x, 10, &params, d.diam()).unwrap();
            assert!(p.verdict, "{p:?}");
        }
    }

    #[test]
    fn classical_porosity_of_point_and_line() {
        let r = 0.25;
        let h = r / 256.0;
        let x = Point::new(0.0, 0.0);
        let n = 2 * 256 + 3;
        let origin = Point::new(-r - h, -r - h);
        let point = DistanceField::from_fn(origin, h, n, n, |y: Point<f64>| (y.norm(), false));
        assert!(classical_porosity(&point, x, r).unwrap() >= 0.45);
        let line = DistanceField::from_fn(origin, h, n, n, |y: Point<f64>| (y.y.abs(), false));
        let v = classical_porosity(&line, x, r).unwrap();
        assert!((0.45..=0.5).contains(&v));
        assert!(matches!(classical_porosity(&line, x, 1.0), Err(Error::Coverage(_))));
    }

    #[test]
    fn dimension_bounds() {
        assert!((dimension_bound_from_porosity(0.1, 1.0, 2).unwrap() - 1.9).abs() < 1e-15);
        assert!((dimension_bound_from_curve_constant(1.0, 10.0).unwrap() - 1.9).abs() < 1e-15);
        assert!((dimension_bound_from_porosity(1e-12, 1.0, 2).unwrap() - 2.0).abs() < 1e-11);
        assert!(dimension_bound_from_porosity(0.1, -1.0, 2).is_err());
    }
}
