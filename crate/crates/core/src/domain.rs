//! Polygonal test domains: Koch snowflakes, cones, discs and user polygons.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{signed_area, Point, Rect};
use crate::index::SegmentBvh;
use crate::real::{from_int, lit, Real};
use crate::rng::substream;

/// Position of a point relative to a domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    Inside,
    Outside,
    /// Within `1e-12 * diam` of the boundary.
    Boundary,
}

/// Bounded domain enclosed by a simple, counterclockwise polygon.
#[derive(Clone, Debug)]
pub struct Domain<T> {
    pub label: String,
    pub params: BTreeMap<String, f64>,
    vertices: Vec<Point<T>>,
    bvh: SegmentBvh<T>,
    area: T,
    perimeter: T,
    bbox: Rect<T>,
    diam: T,
}

impl<T: Real> Domain<T> {
    /// Builds a domain from a closed polygon. Clockwise input is reversed;
    /// self-intersecting input is rejected.
    pub fn new(label: impl Into<String>, params: BTreeMap<String, f64>, mut vertices: Vec<Point<T>>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::Parameter("a polygon needs at least 3 vertices".into()));
        }
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(Error::Parameter("non-finite vertex".into()));
        }
        let mut area = signed_area(&vertices);
        if area == T::zero() {
            return Err(Error::Parameter("polygon has zero area".into()));
        }
        if area < T::zero() {
            vertices.reverse();
            area = -area;
        }
        let bvh = SegmentBvh::from_polygon(&vertices);
        check_simple(&vertices, &bvh)?;
        let n = vertices.len();
        let perimeter = (0..n).map(|i| vertices[i].dist(vertices[(i + 1) % n])).sum();
        let bbox = Rect::bounding(vertices.iter().copied()).unwrap();
        let diam = polygon_diameter(&vertices);
        Ok(Domain {
            label: label.into(),
            params,
            vertices,
            bvh,
            area,
            perimeter,
            bbox,
            diam,
        })
    }

    pub fn vertices(&self) -> &[Point<T>] {
        &self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.vertices.len()
    }

    /// Edge `i` runs from vertex `i` to vertex `i + 1`.
    pub fn edge(&self, i: usize) -> (Point<T>, Point<T>) {
        let n = self.vertices.len();
        (self.vertices[i % n], self.vertices[(i + 1) % n])
    }

    pub fn bvh(&self) -> &SegmentBvh<T> {
        &self.bvh
    }

    pub fn area(&self) -> T {
        self.area
    }

    pub fn perimeter(&self) -> T {
        self.perimeter
    }

    pub fn bbox(&self) -> Rect<T> {
        self.bbox
    }

    pub fn diam(&self) -> T {
        self.diam
    }

    pub fn max_edge_length(&self) -> T {
        (0..self.edge_count())
            .map(|i| {
                let (a, b) = self.edge(i);
                a.dist(b)
            })
            .fold(T::zero(), T::max)
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    /// Exact Euclidean distance to the boundary.
    pub fn distance_to_boundary(&self, x: Point<T>) -> T {
        self.bvh.distance(x)
    }

    /// Distance to the boundary together with the nearest edge.
    pub fn nearest_edge(&self, x: Point<T>) -> (T, usize) {
        self.bvh.nearest(x).expect("domain has edges")
    }

    pub fn boundary_tolerance(&self) -> T {
        self.diam * lit(1e-12)
    }

    pub fn locate(&self, x: Point<T>) -> Location {
        if self.distance_to_boundary(x) <= self.boundary_tolerance() {
            return Location::Boundary;
        }
        if self.contains(x) {
            Location::Inside
        } else {
            Location::Outside
        }
    }

    /// Even-odd membership. Points on the boundary give an unspecified answer;
    /// use [`Domain::locate`] to flag them.
    pub fn contains(&self, x: Point<T>) -> bool {
        if !self.bbox.contains_closed(x) {
            return false;
        }
        self.bvh.ray_crossings(x) % 2 == 1
    }

    /// The closed segment `[a, b]` meets the open domain.
    pub fn segment_enters(&self, a: Point<T>, b: Point<T>) -> bool {
        if self.contains(a) && self.distance_to_boundary(a) > self.boundary_tolerance() {
            return true;
        }
        if self.contains(b) && self.distance_to_boundary(b) > self.boundary_tolerance() {
            return true;
        }
        let hits = self.bvh.segments_meeting(a, b);
        if hits.is_empty() {
            return false;
        }
        // Split at every boundary contact and test each open piece's midpoint.
        let mut ts = vec![T::zero(), T::one()];
        let d = b - a;
        let len2 = d.norm2();
        for i in hits {
            let (c, e) = self.edge(i);
            for q in [c, e] {
                if len2 > T::zero() {
                    let t = (q - a).dot(d) / len2;
                    if t > T::zero() && t < T::one() && crate::geom::point_segment_distance(q, a, b) <= self.boundary_tolerance() {
                        ts.push(t);
                    }
                }
            }
            if let Some(t) = crate::geom::segment_intersection_param(a, b, c, e) {
                ts.push(t);
            }
        }
        ts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        ts.dedup();
        ts.windows(2).any(|w| {
            if w[1] - w[0] <= lit(1e-15) {
                return false;
            }
            let m = a + d * ((w[0] + w[1]) * lit(0.5));
            self.distance_to_boundary(m) > self.boundary_tolerance() && self.contains(m)
        })
    }

    /// Point at arclength fraction `s ∈ [0, 1)` along the boundary.
    pub fn boundary_point(&self, s: T) -> Point<T> {
        let target = s * self.perimeter;
        let mut acc = T::zero();
        for i in 0..self.edge_count() {
            let (a, b) = self.edge(i);
            let l = a.dist(b);
            if acc + l >= target {
                let t = if l > T::zero() { (target - acc) / l } else { T::zero() };
                return a.lerp(b, t.max(T::zero()).min(T::one()));
            }
            acc = acc + l;
        }
        self.vertices[0]
    }

    /// `n` boundary points: all vertices first when `n` is at least the vertex
    /// count, then arclength-uniform random positions from the seeded stream.
    pub fn sample_boundary(&self, n: usize, seed: u64) -> Vec<Point<T>> {
        let mut out = Vec::with_capacity(n);
        if n >= self.vertices.len() {
            out.extend_from_slice(&self.vertices);
        }
        let mut rng = substream(seed, "sample_boundary");
        let cum = self.cumulative_lengths();
        while out.len() < n {
            let u: f64 = rng.gen();
            let target = lit::<T>(u) * self.perimeter;
            let i = match cum.binary_search_by(|c| c.partial_cmp(&target).unwrap()) {
                Ok(i) => i.min(self.edge_count() - 1),
                Err(i) => i.saturating_sub(1).min(self.edge_count() - 1),
            };
            let (a, b) = self.edge(i);
            let l = a.dist(b);
            let t = if l > T::zero() { (target - cum[i]) / l } else { T::zero() };
            out.push(a.lerp(b, t.max(T::zero()).min(T::one())));
        }
        out
    }

    fn cumulative_lengths(&self) -> Vec<T> {
        let mut cum = Vec::with_capacity(self.edge_count() + 1);
        let mut acc = T::zero();
        cum.push(acc);
        for i in 0..self.edge_count() {
            let (a, b) = self.edge(i);
            acc = acc + a.dist(b);
            cum.push(acc);
        }
        cum
    }

    pub fn to_file(&self) -> DomainFile {
        DomainFile {
            schema: 1,
            label: self.label.clone(),
            params: self.params.clone(),
            vertices: self.vertices.iter().map(|p| [p.x.to_f64_lossy(), p.y.to_f64_lossy()]).collect(),
        }
    }

    pub fn from_file(f: &DomainFile) -> Result<Self> {
        if f.schema != 1 {
            return Err(Error::Format(format!("unsupported domain schema {}", f.schema)));
        }
        let vs = f.vertices.iter().map(|v| Point::new(lit(v[0]), lit(v[1]))).collect();
        Domain::new(f.label.clone(), f.params.clone(), vs)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("domain serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(s)?)
    }
}

/// On-disk form of a [`Domain`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainFile {
    pub schema: u32,
    pub label: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub vertices: Vec<[f64; 2]>,
}

fn check_simple<T: Real>(vs: &[Point<T>], bvh: &SegmentBvh<T>) -> Result<()> {
    let n = vs.len();
    for i in 0..n {
        let (a, b) = (vs[i], vs[(i + 1) % n]);
        if a == b {
            return Err(Error::NotSimple(i, i));
        }
        for j in bvh.segments_meeting(a, b) {
            if j == i {
                continue;
            }
            let adjacent = j == (i + 1) % n || i == (j + 1) % n;
            if !adjacent {
                return Err(Error::NotSimple(i.min(j), i.max(j)));
            }
            // Adjacent edges may share only their common vertex.
            let (c, d) = (vs[j], vs[(j + 1) % n]);
            let shared = if j == (i + 1) % n { b } else { a };
            let other = if c == shared { d } else { c };
            let mine = if shared == a { b } else { a };
            let u = mine - shared;
            let v = other - shared;
            if u.cross(v) == T::zero() && u.dot(v) > T::zero() && n > 3 {
                return Err(Error::NotSimple(i.min(j), i.max(j)));
            }
        }
    }
    Ok(())
}

fn polygon_diameter<T: Real>(vs: &[Point<T>]) -> T {
    let hull = convex_hull(vs);
    let mut best = T::zero();
    // Hulls of the test domains are small, so the quadratic scan is cheap.
    for i in 0..hull.len() {
        for j in i + 1..hull.len() {
            best = best.max(hull[i].dist(hull[j]));
        }
    }
    best
}

fn convex_hull<T: Real>(vs: &[Point<T>]) -> Vec<Point<T>> {
    let mut pts = vs.to_vec();
    pts.sort_by(|a, b| (a.x, a.y).partial_cmp(&(b.x, b.y)).unwrap());
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<Point<T>> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && crate::geom::orient(lower[lower.len() - 2], lower[lower.len() - 1], p) <= T::zero() {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point<T>> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && crate::geom::orient(upper[upper.len() - 2], upper[upper.len() - 1], p) <= T::zero() {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Orientation-preserving similarity `z ↦ a·z + b` in complex notation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Similarity<T> {
    pub a: Point<T>,
    pub b: Point<T>,
}

impl<T: Real> Similarity<T> {
    pub fn identity() -> Self {
        Similarity {
            a: Point::new(T::one(), T::zero()),
            b: Point::origin(),
        }
    }

    /// `T_shift ∘ R_angle ∘ S_scale`.
    pub fn new(scale: T, angle: T, shift: Point<T>) -> Self {
        Similarity {
            a: Point::new(scale, T::zero()).rotate(angle),
            b: shift,
        }
    }

    #[inline]
    pub fn apply(&self, z: Point<T>) -> Point<T> {
        self.a.cmul(z) + self.b
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Similarity {
            a: self.a.cmul(other.a),
            b: self.a.cmul(other.b) + self.b,
        }
    }

    pub fn ratio(&self) -> T {
        self.a.norm()
    }
}

/// Word `a₀ a₁ … a_k` with `a₀ ∈ {1,2,3}` and `a_i ∈ {1,2,3,4}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IfsAddress {
    pub a0: u8,
    pub tail: Vec<u8>,
}

impl IfsAddress {
    pub fn new(a0: u8, tail: Vec<u8>) -> Result<Self> {
        if !(1..=3).contains(&a0) || tail.iter().any(|&d| !(1..=4).contains(&d)) {
            return Err(Error::Parameter(format!("invalid address {a0}{tail:?}")));
        }
        Ok(IfsAddress { a0, tail })
    }

    /// Parses e.g. `"1244"`.
    pub fn parse(s: &str) -> Result<Self> {
        let digits: Vec<u8> = s
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(|| Error::Parameter(format!("bad address {s}"))))
            .collect::<Result<_>>()?;
        let (first, rest) = digits.split_first().ok_or_else(|| Error::Parameter("empty address".into()))?;
        IfsAddress::new(*first, rest.to_vec())
    }

    pub fn depth(&self) -> usize {
        self.tail.len()
    }

    pub fn child(&self, d: u8) -> Self {
        let mut tail = self.tail.clone();
        tail.push(d);
        IfsAddress { a0: self.a0, tail }
    }

    pub fn parent(&self) -> Option<Self> {
        let mut tail = self.tail.clone();
        tail.pop()?;
        Some(IfsAddress { a0: self.a0, tail })
    }

    pub fn starts_with(&self, prefix: &IfsAddress) -> bool {
        self.a0 == prefix.a0 && self.tail.starts_with(&prefix.tail)
    }
}

impl std::fmt::Display for IfsAddress {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.a0)?;
        for d in &self.tail {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// The snowflake's iterated function system for a contraction `λ ∈ [1/3, 1/2)`.
#[derive(Clone, Debug)]
pub struct KochSnowflake<T> {
    pub lambda: T,
    /// Rotation angle with `cos θ = (½ − λ)/λ`.
    pub theta: T,
    /// Height of the bump apex, `√(λ − ¼)`.
    pub h: T,
    f: [Similarity<T>; 4],
    g: [Similarity<T>; 3],
}

impl<T: Real> KochSnowflake<T> {
    pub fn new(lambda: T) -> Result<Self> {
        let lo: T = T::one() / lit(3.0);
        if !(lambda >= lo - lit(1e-15) && lambda < lit(0.5)) {
            return Err(Error::Parameter(format!(
                "lambda must lie in [1/3, 1/2), got {}",
                lambda.to_f64_lossy()
            )));
        }
        let half: T = lit(0.5);
        let theta = ((half - lambda) / lambda).min(T::one()).acos();
        let h = (lambda - lit(0.25)).sqrt();
        let zero = T::zero();
        let f = [
            Similarity::new(lambda, zero, Point::origin()),
            Similarity::new(lambda, theta, Point::new(lambda, zero)),
            Similarity::new(lambda, -theta, Point::new(half, h)),
            Similarity::new(lambda, zero, Point::new(T::one() - lambda, zero)),
        ];
        let third = T::FRAC_PI_3() * lit(2.0);
        let s3: T = lit::<T>(3.0).sqrt() * half;
        let g = [
            Similarity::identity(),
            Similarity::new(T::one(), -third, Point::new(T::one(), zero)),
            Similarity::new(T::one(), third, Point::new(half, -s3)),
        ];
        Ok(KochSnowflake { lambda, theta, h, f, g })
    }

    pub fn f(&self, i: u8) -> Similarity<T> {
        self.f[(i - 1) as usize]
    }

    pub fn g(&self, i: u8) -> Similarity<T> {
        self.g[(i - 1) as usize]
    }

    /// `F_{a₀…a_k} = G_{a₀} ∘ F_{a₁} ∘ ⋯ ∘ F_{a_k}`.
    pub fn map(&self, addr: &IfsAddress) -> Similarity<T> {
        addr.tail.iter().fold(self.g(addr.a0), |acc, &d| acc.compose(&self.f(d)))
    }

    /// Composition of the `F` maps only, `F_{a₁} ∘ ⋯ ∘ F_{a_k}`.
    pub fn f_word(&self, word: &[u8]) -> Similarity<T> {
        word.iter().fold(Similarity::identity(), |acc, &d| acc.compose(&self.f(d)))
    }

    /// Apex `T_w = F_w((½, h))`.
    pub fn top_vertex(&self, addr: &IfsAddress) -> Point<T> {
        self.map(addr).apply(Point::new(lit(0.5), self.h))
    }

    /// Vertices of `Δ_w = ch(L_{w2} ∪ L_{w3})`: base left, apex, base right.
    pub fn triangle(&self, addr: &IfsAddress) -> [Point<T>; 3] {
        let m = self.map(addr);
        [
            m.apply(Point::new(self.lambda, T::zero())),
            m.apply(Point::new(lit(0.5), self.h)),
            m.apply(Point::new(T::one() - self.lambda, T::zero())),
        ]
    }

    /// Endpoints of `L_w = F_w([0,1] × {0})`.
    pub fn segment(&self, addr: &IfsAddress) -> (Point<T>, Point<T>) {
        let m = self.map(addr);
        (m.apply(Point::origin()), m.apply(Point::new(T::one(), T::zero())))
    }

    /// Polyline of `K` at the given depth, from `(0,0)` to `(1,0)`, with
    /// `4^depth + 1` points.
    pub fn curve(&self, depth: usize) -> Vec<Point<T>> {
        let mut pts = vec![Point::origin(), Point::new(T::one(), T::zero())];
        for _ in 0..depth {
            pts = self.refine(&pts);
        }
        pts
    }

    fn refine(&self, pts: &[Point<T>]) -> Vec<Point<T>> {
        let lam = self.lambda;
        let half: T = lit(0.5);
        let mut out = Vec::with_capacity(4 * (pts.len() - 1) + 1);
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let d = b - a;
            out.push(a);
            out.push(a + d * lam);
            out.push(a + d.cmul(Point::new(half, self.h)));
            out.push(a + d * (T::one() - lam));
        }
        out.push(*pts.last().unwrap());
        out
    }

    /// Closed snowflake boundary at the given depth, traversed clockwise
    /// (as produced by `G₁, G₂, G₃`).
    pub fn boundary_cw(&self, depth: usize) -> Vec<Point<T>> {
        let k = self.curve(depth);
        let mut out = Vec::with_capacity(3 * (k.len() - 1));
        for a0 in 1..=3u8 {
            let g = self.g(a0);
            out.extend(k[..k.len() - 1].iter().map(|&p| g.apply(p)));
        }
        out
    }

    /// Address of clockwise edge `i` at the given depth.
    pub fn cw_edge_address(&self, depth: usize, i: usize) -> IfsAddress {
        let per = 4usize.pow(depth as u32);
        let a0 = (i / per) as u8 + 1;
        let mut r = i % per;
        let mut tail = vec![0u8; depth];
        for slot in tail.iter_mut().rev() {
            *slot = (r % 4) as u8 + 1;
            r /= 4;
        }
        IfsAddress { a0, tail }
    }

    /// Address of edge `j` of the counterclockwise domain built by
    /// [`build_koch_snowflake`].
    pub fn edge_address(&self, depth: usize, j: usize) -> IfsAddress {
        let n = 3 * 4usize.pow(depth as u32);
        self.cw_edge_address(depth, (2 * n - 2 - j) % n)
    }

    /// Counterclockwise edge index of the piece with a full-depth address.
    pub fn edge_index(&self, addr: &IfsAddress) -> usize {
        let depth = addr.depth();
        let n = 3 * 4usize.pow(depth as u32);
        let per = 4usize.pow(depth as u32);
        let mut i = (addr.a0 as usize - 1) * per;
        let mut place = per;
        for &d in &addr.tail {
            place /= 4;
            i += (d as usize - 1) * place;
        }
        (2 * n - 2 - i) % n
    }

    /// Similarity dimension `−log 4 / log λ`.
    pub fn dimension(&self) -> T {
        -lit::<T>(4.0).ln() / self.lambda.ln()
    }

    /// John constant `(½ − λ)/λ`.
    pub fn john_constant(&self) -> T {
        (lit::<T>(0.5) - self.lambda) / self.lambda
    }
}

/// Koch snowflake domain with `3·4^depth` edges.
pub fn build_koch_snowflake<T: Real>(lambda: T, depth: usize) -> Result<Domain<T>> {
    let ks = KochSnowflake::new(lambda)?;
    let mut vs = ks.boundary_cw(depth);
    vs.reverse();
    let mut params = BTreeMap::new();
    params.insert("lambda".to_string(), lambda.to_f64_lossy());
    params.insert("depth".to_string(), depth as f64);
    Domain::new(format!("koch(lambda={},depth={depth})", lambda.to_f64_lossy()), params, vs)
}

/// Square `(−1,1)×(−2,0)` with the cone `|x| < (1−y)ε, y ≥ 0` on top.
pub fn build_cone_domain<T: Real>(eps: T) -> Result<Domain<T>> {
    if !(eps > T::zero() && eps < lit(0.5)) {
        return Err(Error::Parameter(format!("eps must lie in (0, 1/2), got {}", eps.to_f64_lossy())));
    }
    let one = T::one();
    let two: T = lit(2.0);
    let z = T::zero();
    let vs = vec![
        Point::new(-one, -two),
        Point::new(one, -two),
        Point::new(one, z),
        Point::new(eps, z),
        Point::new(z, one),
        Point::new(-eps, z),
        Point::new(-one, z),
    ];
    let mut params = BTreeMap::new();
    params.insert("eps".to_string(), eps.to_f64_lossy());
    Domain::new(format!("cone(eps={})", eps.to_f64_lossy()), params, vs)
}

/// Regular `n`-gon inscribed in the circle of the given center and radius.
pub fn build_regular_polygon<T: Real>(n: usize, center: Point<T>, radius: T) -> Result<Domain<T>> {
    if n < 3 || !(radius > T::zero()) {
        return Err(Error::Parameter("regular polygon needs n >= 3 and radius > 0".into()));
    }
    let vs = (0..n)
        .map(|i| {
            let t = T::TAU() * from_int::<T>(i as i64) / from_int(n as i64);
            center + Point::new(t.cos(), t.sin()) * radius
        })
        .collect();
    let mut params = BTreeMap::new();
    params.insert("n".to_string(), n as f64);
    params.insert("radius".to_string(), radius.to_f64_lossy());
    Domain::new(format!("disc(n={n})"), params, vs)
}

/// The open unit square `(0,1)²`.
pub fn build_unit_square<T: Real>() -> Domain<T> {
    let (z, o) = (T::zero(), T::one());
    Domain::new(
        "square",
        BTreeMap::new(),
        vec![Point::new(z, z), Point::new(o, z), Point::new(o, o), Point::new(z, o)],
    )
    .expect("unit square is simple")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_zero_is_the_base_triangle() {
        let d = build_koch_snowflake(1.0 / 3.0, 0).unwrap();
        assert_eq!(d.edge_count(), 3);
        let vs = d.vertices();
        let want = [Point::new(0.0, 0.0), Point::new(0.5, -(3f64).sqrt() / 2.0), Point::new(1.0, 0.0)];
        for w in want {
            assert!(vs.iter().any(|v| v.dist(w) < 1e-15));
        }
    }

    #[test]
    fn classical_angle() {
        let k = KochSnowflake::new(1.0f64 / 3.0).unwrap();
        assert!((k.theta.cos() - 0.5).abs() < 1e-14);
        assert!((k.h - (1.0f64 / 12.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn edge_counts_and_lengths() {
        for depth in 0..5 {
            let lam = 0.4f64;
            let d = build_koch_snowflake(lam, depth).unwrap();
            assert_eq!(d.edge_count(), 3 * 4usize.pow(depth as u32));
            let want = lam.powi(depth as i32);
            for i in 0..d.edge_count() {
                let (a, b) = d.edge(i);
                assert!((a.dist(b) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bumps_point_outward() {
        let a0 = build_koch_snowflake(0.4, 0).unwrap().area();
        let a1 = build_koch_snowflake(0.4, 1).unwrap().area();
        assert!(a1 > a0);
    }

    #[test]
    fn rejects_bad_lambda() {
        assert!(build_koch_snowflake(0.3, 2).is_err());
        assert!(build_koch_snowflake(0.5, 2).is_err());
    }

    #[test]
    fn edge_addresses_round_trip() {
        let ks = KochSnowflake::new(0.4).unwrap();
        let depth = 3;
        let d = build_koch_snowflake(0.4, depth).unwrap();
        for j in 0..d.edge_count() {
            let addr = ks.edge_address(depth, j);
            assert_eq!(ks.edge_index(&addr), j);
            let (p, q) = ks.segment(&addr);
            let (a, b) = d.edge(j);
            // Counterclockwise edges run against the IFS direction.
            assert!(a.dist(q) < 1e-12 && b.dist(p) < 1e-12, "edge {j} address {addr}");
        }
    }

    #[test]
    fn cone_shape() {
        let d = build_cone_domain(0.25f64).unwrap();
        assert!(d.contains(Point::new(0.0, 0.99)));
        assert!(!d.contains(Point::new(0.2, 0.5)));
        assert!(d.contains(Point::new(0.1, 0.5)));
        assert!(d.contains(Point::new(-0.9, -1.9)));
        assert!((d.area() - (4.0 + 0.25)).abs() < 1e-12);
    }

    #[test]
    fn square_distance_and_location() {
        let d = build_unit_square::<f64>();
        assert_eq!(d.distance_to_boundary(Point::new(0.5, 0.5)), 0.5);
        assert_eq!(d.locate(Point::new(0.5, 0.5)), Location::Inside);
        assert_eq!(d.locate(Point::new(10.0, 10.0)), Location::Outside);
        assert_eq!(d.locate(Point::new(1.0, 0.5)), Location::Boundary);
    }

    #[test]
    fn rejects_self_intersection() {
        let bow = vec![
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(2.0, 2.0),
            Point::new(1.0, -1.0),
            Point::new(0.0, 2.0),
        ];
        assert!(matches!(Domain::new("bow", BTreeMap::new(), bow), Err(Error::NotSimple(..))));
    }

    #[test]
    fn segment_entry() {
        let d = build_unit_square::<f64>();
        assert!(d.segment_enters(Point::new(-1.0, 0.5), Point::new(2.0, 0.5)));
        assert!(!d.segment_enters(Point::new(-1.0, 0.0), Point::new(2.0, 0.0)));
        assert!(!d.segment_enters(Point::new(-1.0, 1.0), Point::new(1.0, -1.0)));
        assert!(!d.segment_enters(Point::new(1.0, 0.5), Point::new(2.0, 0.5)));
    }

    #[test]
    fn sampling_is_reproducible_and_on_boundary() {
        let d = build_koch_snowflake(0.4, 3).unwrap();
        let a = d.sample_boundary(500, 9);
        let b = d.sample_boundary(500, 9);
        assert_eq!(a, b);
        for p in &a {
            assert!(d.distance_to_boundary(*p) <= 1e-12 * d.diam());
        }
        let t = build_regular_polygon(3, Point::new(0.0, 0.0), 1.0).unwrap();
        assert_eq!(t.sample_boundary(3, 1), t.sample_boundary(3, 1));
    }

    #[test]
    fn json_round_trip() {
        let d = build_cone_domain(0.25f64).unwrap();
        let e = Domain::<f64>::from_json(&d.to_json()).unwrap();
        assert_eq!(d.vertices(), e.vertices());
        assert_eq!(d.params, e.params);
    }

    #[test]
    fn works_in_single_precision() {
        let d = build_koch_snowflake(0.4f32, 3).unwrap();
        assert!(d.contains(Point::new(0.5, -0.3)));
    }
}
