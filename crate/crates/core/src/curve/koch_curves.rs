//! Explicit curves for the Koch snowflake: interior John curves and exterior
//! connecting curves built from lifted apexes `Â_w = F_w(½, H)`,
//! `H = ½·cot(θ/2)`.

use crate::domain::{IfsAddress, KochSnowflake};
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::real::{lit, Real};

/// Centroid of the base triangle.
pub fn koch_barycenter<T: Real>() -> Point<T> {
    Point::new(lit(0.5), -lit::<T>(3.0).sqrt() / lit(6.0))
}

/// Point on the bisector of `Δ_w` at distance `λ^{k+1}/(2h)` below the apex.
pub fn john_anchor<T: Real>(ks: &KochSnowflake<T>, addr: &IfsAddress) -> Point<T> {
    let y = ks.h - ks.lambda / (ks.h * lit(2.0));
    ks.map(addr).apply(Point::new(lit(0.5), y))
}

fn in_triangle<T: Real>(x: Point<T>, t: &[Point<T>; 3], tol: T) -> bool {
    let s = crate::geom::signed_area(t);
    let sign = if s >= T::zero() { T::one() } else { -T::one() };
    (0..3).all(|i| {
        let (a, b) = (t[i], t[(i + 1) % 3]);
        let e = b - a;
        sign * e.cross(x - a) >= -tol * e.norm()
    })
}

/// Interior curve `x₁ → P_{a₀…a_k} → P_{a₀…a_{k−1}} → ⋯ → P_{a₀} → x₀` for `x₁ ∈ Δ_w`.
pub fn koch_john_curve<T: Real>(ks: &KochSnowflake<T>, addr: &IfsAddress, x1: Point<T>) -> Result<Vec<Point<T>>> {
    let tri = ks.triangle(addr);
    let scale = tri[0].dist(tri[2]);
    if !in_triangle(x1, &tri, scale * lit(1e-9)) {
        return Err(Error::Admissibility(format!("{x1:?} is not in the triangle of {addr}")));
    }
    let mut out = vec![x1];
    let mut w = Some(addr.clone());
    while let Some(a) = w {
        push_distinct(&mut out, john_anchor(ks, &a));
        w = a.parent();
    }
    push_distinct(&mut out, koch_barycenter());
    Ok(out)
}

fn push_distinct<T: Real>(v: &mut Vec<Point<T>>, p: Point<T>) {
    if v.last().map_or(true, |q| q.dist(p) > T::epsilon() * lit(16.0)) {
        v.push(p);
    }
}

/// Lifted apex `Â_w`.
pub fn lifted_apex<T: Real>(ks: &KochSnowflake<T>, addr: &IfsAddress) -> Point<T> {
    let big_h = (ks.theta * lit(0.5)).tan().recip() * lit(0.5);
    ks.map(addr).apply(Point::new(lit(0.5), big_h))
}

/// A point of `∂Ω` given as a full-depth piece and a position along its chord.
#[derive(Clone, Debug, PartialEq)]
pub struct KochBoundaryPoint<T> {
    pub addr: IfsAddress,
    pub s: T,
}

impl<T: Real> KochBoundaryPoint<T> {
    pub fn point(&self, ks: &KochSnowflake<T>) -> Point<T> {
        ks.map(&self.addr).apply(Point::new(self.s, T::zero()))
    }
}

/// Pieces `w d₁` and `w d₂` below the common prefix `w`, as `(w, d₁, d₂)`.
fn split<T: Real>(a: &KochBoundaryPoint<T>, b: &KochBoundaryPoint<T>) -> Result<(IfsAddress, u8, u8)> {
    if a.addr.a0 != b.addr.a0 {
        return Err(Error::CaseRouting(0));
    }
    let k = a.addr.tail.iter().zip(&b.addr.tail).take_while(|(x, y)| x == y).count();
    if k >= a.addr.tail.len() || k >= b.addr.tail.len() {
        return Err(Error::CaseRouting(0));
    }
    let w = IfsAddress {
        a0: a.addr.a0,
        tail: a.addr.tail[..k].to_vec(),
    };
    Ok((w, a.addr.tail[k], b.addr.tail[k]))
}

/// Case of a pair by the pieces below the common prefix:
/// 1 for adjacent pieces meeting at a base junction, 2 for the apex pair, 3 otherwise.
pub fn koch_case<T: Real>(a: &KochBoundaryPoint<T>, b: &KochBoundaryPoint<T>) -> Result<u8> {
    let (_, d1, d2) = split(a, b)?;
    Ok(match (d1.min(d2), d1.max(d2)) {
        (1, 2) | (3, 4) => 1,
        (2, 3) => 2,
        _ => 3,
    })
}

/// `z`, then `Â` of each ancestor of its piece down to (and including) `stop`.
fn chain<T: Real>(ks: &KochSnowflake<T>, z: &KochBoundaryPoint<T>, stop_len: usize) -> Vec<Point<T>> {
    let mut out = vec![z.point(ks)];
    let mut a = z.addr.clone();
    loop {
        push_distinct(&mut out, lifted_apex(ks, &a));
        if a.tail.len() <= stop_len {
            break;
        }
        a = a.parent().unwrap();
    }
    out
}

/// Length of the longest prefix `w d r r …` of `addr`, where the run digit `r`
/// keeps the piece attached to the shared vertex.
fn run_prefix(addr: &IfsAddress, base: usize, run: u8) -> usize {
    let mut k = base + 1;
    while k < addr.tail.len() && addr.tail[k] == run {
        k += 1;
    }
    k
}

/// Exterior curve between two boundary points in sibling pieces. `case` must
/// match [`koch_case`].
pub fn koch_case_curve<T: Real>(
    ks: &KochSnowflake<T>,
    z1: &KochBoundaryPoint<T>,
    z2: &KochBoundaryPoint<T>,
    case: u8,
) -> Result<Vec<Point<T>>> {
    let actual = koch_case(z1, z2)?;
    if actual != case {
        return Err(Error::CaseRouting(case));
    }
    let (w, d1, d2) = split(z1, z2)?;
    let base = w.tail.len();
    // Ordered so that `lo` precedes `hi` along the curve.
    let (lo, hi, dlo, dhi, flip) = if d1 < d2 { (z1, z2, d1, d2, false) } else { (z2, z1, d2, d1, true) };
    let mut first;
    let mut second;
    match case {
        1 => {
            first = chain(ks, lo, run_prefix(&lo.addr, base, 4));
            second = chain(ks, hi, run_prefix(&hi.addr, base, 1));
        }
        _ => {
            let apex = ks.top_vertex(&w);
            let stop = |z: &KochBoundaryPoint<T>, d: u8| match d {
                2 => run_prefix(&z.addr, base, 4),
                3 => run_prefix(&z.addr, base, 1),
                _ => base + 1,
            };
            first = chain(ks, lo, stop(lo, dlo));
            second = chain(ks, hi, stop(hi, dhi));
            push_distinct(&mut first, apex);
        }
    }
    second.reverse();
    for p in second {
        push_distinct(&mut first, p);
    }
    if flip {
        first.reverse();
    }
    Ok(first)
}
