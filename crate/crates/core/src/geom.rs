//! Planar points, axis-aligned rectangles and exact segment predicates.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::real::{lit, Real};

/// A point (or vector) in the plane. Serializes as `[x, y]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[T; 2]", into = "[T; 2]")]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> From<[T; 2]> for Point<T> {
    fn from(v: [T; 2]) -> Self {
        Point { x: v[0], y: v[1] }
    }
}

impl<T: Real> From<Point<T>> for [T; 2] {
    fn from(p: Point<T>) -> Self {
        [p.x, p.y]
    }
}

impl<T: Real> Point<T> {
    #[inline]
    pub fn new(x: T, y: T) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn origin() -> Self {
        Point::new(T::zero(), T::zero())
    }

    #[inline]
    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, o: Self) -> T {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm2(self) -> T {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn dist(self, o: Self) -> T {
        (self - o).norm()
    }

    #[inline]
    pub fn lerp(self, o: Self, t: T) -> Self {
        self + (o - self) * t
    }

    /// Rotation about the origin by `angle` (counterclockwise).
    #[inline]
    pub fn rotate(self, angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Complex product, treating points as `x + iy`.
    #[inline]
    pub fn cmul(self, o: Self) -> Self {
        Point::new(self.x * o.x - self.y * o.y, self.x * o.y + self.y * o.x)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn cast<U: Real>(self) -> Point<U> {
        Point::new(lit(self.x.to_f64_lossy()), lit(self.y.to_f64_lossy()))
    }
}

impl<T: Real> Add for Point<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Real> Sub for Point<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Real> Mul<T> for Point<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        Point::new(self.x * s, self.y * s)
    }
}

impl<T: Real> Neg for Point<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Point::new(-self.x, -self.y)
    }
}

/// Closed or open axis-aligned rectangle, depending on the predicate used.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct Rect<T> {
    pub min: Point<T>,
    pub max: Point<T>,
}

impl<T: Real> Rect<T> {
    pub fn new(min: Point<T>, max: Point<T>) -> Self {
        Rect { min, max }
    }

    pub fn from_coords(x0: T, y0: T, x1: T, y1: T) -> Self {
        Rect::new(Point::new(x0, y0), Point::new(x1, y1))
    }

    /// Smallest rectangle containing all points; `None` for an empty iterator.
    pub fn bounding<I: IntoIterator<Item = Point<T>>>(pts: I) -> Option<Self> {
        let mut it = pts.into_iter();
        let first = it.next()?;
        let mut r = Rect::new(first, first);
        for p in it {
            r.min.x = r.min.x.min(p.x);
            r.min.y = r.min.y.min(p.y);
            r.max.x = r.max.x.max(p.x);
            r.max.y = r.max.y.max(p.y);
        }
        Some(r)
    }

    #[inline]
    pub fn width(&self) -> T {
        self.max.x - self.min.x
    }

    #[inline]
    pub fn height(&self) -> T {
        self.max.y - self.min.y
    }

    #[inline]
    pub fn area(&self) -> T {
        self.width() * self.height()
    }

    #[inline]
    pub fn center(&self) -> Point<T> {
        self.min.lerp(self.max, lit(0.5))
    }

    #[inline]
    pub fn diagonal(&self) -> T {
        self.min.dist(self.max)
    }

    pub fn corners(&self) -> [Point<T>; 4] {
        [
            self.min,
            Point::new(self.max.x, self.min.y),
            self.max,
            Point::new(self.min.x, self.max.y),
        ]
    }

    pub fn expand(&self, margin: T) -> Self {
        Rect::new(
            Point::new(self.min.x - margin, self.min.y - margin),
            Point::new(self.max.x + margin, self.max.y + margin),
        )
    }

    pub fn union(&self, o: &Self) -> Self {
        Rect::new(
            Point::new(self.min.x.min(o.min.x), self.min.y.min(o.min.y)),
            Point::new(self.max.x.max(o.max.x), self.max.y.max(o.max.y)),
        )
    }

    pub fn scale(&self, s: T) -> Self {
        Rect::new(self.min * s, self.max * s)
    }

    #[inline]
    pub fn contains_closed(&self, p: Point<T>) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    #[inline]
    pub fn contains_open(&self, p: Point<T>) -> bool {
        p.x > self.min.x && p.x < self.max.x && p.y > self.min.y && p.y < self.max.y
    }

    /// Closed rectangles share at least one point.
    #[inline]
    pub fn touches(&self, o: &Self) -> bool {
        self.min.x <= o.max.x && o.min.x <= self.max.x && self.min.y <= o.max.y && o.min.y <= self.max.y
    }

    /// Open rectangles overlap in a set of positive area.
    #[inline]
    pub fn overlaps_open(&self, o: &Self) -> bool {
        self.min.x < o.max.x && o.min.x < self.max.x && self.min.y < o.max.y && o.min.y < self.max.y
    }

    /// `self ⊆ o`.
    pub fn inside(&self, o: &Self) -> bool {
        self.min.x >= o.min.x && self.max.x <= o.max.x && self.min.y >= o.min.y && self.max.y <= o.max.y
    }

    /// Euclidean distance from a point to the closed rectangle.
    #[inline]
    pub fn distance_to_point(&self, p: Point<T>) -> T {
        let dx = (self.min.x - p.x).max(T::zero()).max(p.x - self.max.x);
        let dy = (self.min.y - p.y).max(T::zero()).max(p.y - self.max.y);
        dx.hypot(dy)
    }

    /// Largest distance from `p` to a point of the closed rectangle.
    pub fn max_distance_to_point(&self, p: Point<T>) -> T {
        let dx = (p.x - self.min.x).abs().max((p.x - self.max.x).abs());
        let dy = (p.y - self.min.y).abs().max((p.y - self.max.y).abs());
        dx.hypot(dy)
    }

    /// Euclidean distance between two closed rectangles.
    pub fn distance_to_rect(&self, o: &Self) -> T {
        let dx = (o.min.x - self.max.x).max(self.min.x - o.max.x).max(T::zero());
        let dy = (o.min.y - self.max.y).max(self.min.y - o.max.y).max(T::zero());
        dx.hypot(dy)
    }
}

/// Sign of the turn `a -> b -> c`: positive for counterclockwise.
#[inline]
pub fn orient<T: Real>(a: Point<T>, b: Point<T>, c: Point<T>) -> T {
    (b - a).cross(c - a)
}

/// Closest point of segment `[a, b]` to `p`, with its parameter in `[0, 1]`.
#[inline]
pub fn closest_on_segment<T: Real>(p: Point<T>, a: Point<T>, b: Point<T>) -> (Point<T>, T) {
    let ab = b - a;
    let len2 = ab.norm2();
    if len2 <= T::zero() {
        return (a, T::zero());
    }
    let t = ((p - a).dot(ab) / len2).max(T::zero()).min(T::one());
    (a + ab * t, t)
}

#[inline]
pub fn point_segment_distance<T: Real>(p: Point<T>, a: Point<T>, b: Point<T>) -> T {
    let (c, _) = closest_on_segment(p, a, b);
    p.dist(c)
}

/// Closed segments `[a, b]` and `[c, d]` share a point.
pub fn segments_intersect<T: Real>(a: Point<T>, b: Point<T>, c: Point<T>, d: Point<T>) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    let z = T::zero();
    if ((d1 > z && d2 < z) || (d1 < z && d2 > z)) && ((d3 > z && d4 < z) || (d3 < z && d4 > z)) {
        return true;
    }
    let on = |p: Point<T>, q: Point<T>, r: Point<T>| {
        r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
    };
    (d1 == z && on(c, d, a))
        || (d2 == z && on(c, d, b))
        || (d3 == z && on(a, b, c))
        || (d4 == z && on(a, b, d))
}

/// Parameter `t` on `[a, b]` where it meets `[c, d]`, for non-parallel proper
/// or touching intersections.
pub fn segment_intersection_param<T: Real>(
    a: Point<T>,
    b: Point<T>,
    c: Point<T>,
    d: Point<T>,
) -> Option<T> {
    let r = b - a;
    let s = d - c;
    let den = r.cross(s);
    if den == T::zero() {
        return None;
    }
    let t = (c - a).cross(s) / den;
    let u = (c - a).cross(r) / den;
    let z = T::zero();
    let o = T::one();
    if t >= z && t <= o && u >= z && u <= o {
        Some(t)
    } else {
        None
    }
}

#[inline]
pub fn segment_segment_distance<T: Real>(a: Point<T>, b: Point<T>, c: Point<T>, d: Point<T>) -> T {
    if segments_intersect(a, b, c, d) {
        return T::zero();
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

/// Liang–Barsky clip of `[a, b]` against the closed rectangle; returns the
/// parameter interval of the part inside.
pub fn clip_segment_closed<T: Real>(a: Point<T>, b: Point<T>, r: &Rect<T>) -> Option<(T, T)> {
    let mut t0 = T::zero();
    let mut t1 = T::one();
    let d = b - a;
    let checks = [
        (-d.x, a.x - r.min.x),
        (d.x, r.max.x - a.x),
        (-d.y, a.y - r.min.y),
        (d.y, r.max.y - a.y),
    ];
    for (p, q) in checks {
        if p == T::zero() {
            if q < T::zero() {
                return None;
            }
        } else {
            let t = q / p;
            if p < T::zero() {
                if t > t1 {
                    return None;
                }
                if t > t0 {
                    t0 = t;
                }
            } else {
                if t < t0 {
                    return None;
                }
                if t < t1 {
                    t1 = t;
                }
            }
        }
    }
    Some((t0, t1))
}

#[inline]
pub fn segment_meets_closed_rect<T: Real>(a: Point<T>, b: Point<T>, r: &Rect<T>) -> bool {
    clip_segment_closed(a, b, r).is_some()
}

/// The closed segment `[a, b]` meets the open rectangle.
pub fn segment_meets_open_rect<T: Real>(a: Point<T>, b: Point<T>, r: &Rect<T>) -> bool {
    if r.contains_open(a) || r.contains_open(b) {
        return true;
    }
    let d = b - a;
    let mut t0 = T::zero();
    let mut t1 = T::one();
    let checks = [
        (-d.x, a.x - r.min.x),
        (d.x, r.max.x - a.x),
        (-d.y, a.y - r.min.y),
        (d.y, r.max.y - a.y),
    ];
    for (p, q) in checks {
        if p == T::zero() {
            // Parallel to this side: must lie strictly inside the slab.
            if q <= T::zero() {
                return false;
            }
        } else {
            let t = q / p;
            if p < T::zero() {
                if t > t0 {
                    t0 = t;
                }
            } else if t < t1 {
                t1 = t;
            }
        }
    }
    if t0 >= t1 {
        return false;
    }
    let mid = a + d * ((t0 + t1) * lit(0.5));
    r.contains_open(mid)
}

/// Euclidean distance between a segment and a closed rectangle.
pub fn segment_rect_distance<T: Real>(a: Point<T>, b: Point<T>, r: &Rect<T>) -> T {
    if segment_meets_closed_rect(a, b, r) {
        return T::zero();
    }
    let mut best = r.distance_to_point(a).min(r.distance_to_point(b));
    for c in r.corners() {
        best = best.min(point_segment_distance(c, a, b));
    }
    best
}

/// Length of the part of `[a, b]` inside the closed rectangle.
pub fn clipped_length<T: Real>(a: Point<T>, b: Point<T>, r: &Rect<T>) -> T {
    match clip_segment_closed(a, b, r) {
        Some((t0, t1)) if t1 > t0 => (t1 - t0) * a.dist(b),
        _ => T::zero(),
    }
}

/// Signed area of a closed polygon (positive when counterclockwise).
pub fn signed_area<T: Real>(vs: &[Point<T>]) -> T {
    let n = vs.len();
    let mut s = T::zero();
    for i in 0..n {
        s = s + vs[i].cross(vs[(i + 1) % n]);
    }
    s * lit(0.5)
}

/// Total length of a polyline.
pub fn polyline_length<T: Real>(pts: &[Point<T>]) -> T {
    pts.windows(2).map(|w| w[0].dist(w[1])).sum()
}
