//! Explicit exterior curve over the cone domain's apex.

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::real::{lit, Real};

/// `z₁ → w₁ → w₂ → z₂` with `w₁ = (z₁ˣ + z₁ʸ − 1, 1)` and `w₂ = (z₂ˣ − z₂ʸ + 1, 1)`.
///
/// Only the canonical configuration is supported: `z₁` left of the axis,
/// `z₂` right of it, both at heights in `[0, 1]` and outside the domain.
pub fn cone_explicit_curve<T: Real>(eps: T, z1: Point<T>, z2: Point<T>) -> Result<Vec<Point<T>>> {
    if !(eps > T::zero() && eps < lit(0.5)) {
        return Err(Error::Parameter(format!("eps must lie in (0, 1/2), got {}", eps.to_f64_lossy())));
    }
    let one = T::one();
    let zero = T::zero();
    let outside = |z: Point<T>| z.y >= zero && z.y <= one && z.x.abs() >= eps * (one - z.y);
    if z1 == z2 && outside(z1) {
        return Ok(vec![z1]);
    }
    let canonical = z1.x >= -one && z1.x <= zero && z2.x >= zero && z2.x <= one;
    if !(canonical && outside(z1) && outside(z2)) {
        return Err(Error::Admissibility(format!(
            "cone curve needs z1 left, z2 right, heights in [0, 1], outside the domain; got {z1:?}, {z2:?}"
        )));
    }
    let w1 = Point::new(z1.x + z1.y - one, one);
    let w2 = Point::new(z2.x - z2.y + one, one);
    let mut out = vec![z1];
    for p in [w1, w2, z2] {
        if *out.last().unwrap() != p {
            out.push(p);
        }
    }
    Ok(out)
}
