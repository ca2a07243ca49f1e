//! Box-counting dimension over dyadic scales.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{segment_meets_closed_rect, Point, Rect};
use crate::real::{from_int, lit, pow2, Real};

/// Closed segments of a polygon, including the closing edge.
pub fn polygon_segments<T: Real>(vs: &[Point<T>]) -> Vec<(Point<T>, Point<T>)> {
    let n = vs.len();
    (0..n).map(|i| (vs[i], vs[(i + 1) % n])).collect()
}

/// Closed segments of an open polyline.
pub fn polyline_segments<T: Real>(vs: &[Point<T>]) -> Vec<(Point<T>, Point<T>)> {
    vs.windows(2).map(|w| (w[0], w[1])).collect()
}

/// A point set as degenerate segments.
pub fn point_segments<T: Real>(ps: &[Point<T>]) -> Vec<(Point<T>, Point<T>)> {
    ps.iter().map(|&p| (p, p)).collect()
}

/// Number of closed dyadic squares of side `base · 2^{−k}` meeting the set.
pub fn box_count<T: Real>(segments: &[(Point<T>, Point<T>)], k: i32, base: T) -> usize {
    let s = base * pow2(-k);
    let mut keys: HashSet<(i64, i64)> = HashSet::new();
    for &(a, b) in segments {
        let len = a.dist(b);
        let pieces = (len / s).ceil().to_f64_lossy().max(1.0) as usize;
        let mut prev = a;
        for p in 1..=pieces {
            let next = if p == pieces {
                b
            } else {
                a.lerp(b, from_int::<T>(p as i64) / from_int(pieces as i64))
            };
            mark_piece(prev, next, s, &mut keys);
            prev = next;
        }
    }
    keys.len()
}

fn mark_piece<T: Real>(a: Point<T>, b: Point<T>, s: T, keys: &mut HashSet<(i64, i64)>) {
    let i0 = (a.x.min(b.x) / s).ceil().to_i64().unwrap() - 1;
    let i1 = (a.x.max(b.x) / s).floor().to_i64().unwrap();
    let j0 = (a.y.min(b.y) / s).ceil().to_i64().unwrap() - 1;
    let j1 = (a.y.max(b.y) / s).floor().to_i64().unwrap();
    for j in j0..=j1 {
        for i in i0..=i1 {
            if keys.contains(&(i, j)) {
                continue;
            }
            let x0 = from_int::<T>(i) * s;
            let y0 = from_int::<T>(j) * s;
            let r = Rect::from_coords(x0, y0, x0 + s, y0 + s);
            if segment_meets_closed_rect(a, b, &r) {
                keys.insert((i, j));
            }
        }
    }
}

/// Least-squares fit of `log₂ N_k` against `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionFit {
    pub counts: Vec<(i32, u64)>,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub k_range: (i32, i32),
    pub residuals: Vec<f64>,
    /// Requested `k_max` when it was lowered to respect the resolution fence.
    pub clamped_from: Option<i32>,
}

/// Finest admissible scale: `2^{−k} ≥ 4 · max_edge`.
pub fn resolution_fence<T: Real>(max_edge: T, base: T) -> i32 {
    if !(max_edge > T::zero()) {
        return i32::MAX;
    }
    let mut k = -60;
    while k < 60 && base * pow2(-(k + 1)) >= max_edge * lit(4.0) {
        k += 1;
    }
    k
}

/// Box-counting dimension over `k_min..=k_max`.
///
/// When the segments are a finite-depth stand-in for a fractal, pass its edge
/// length as `resolution`: `k_max` is then lowered to the resolution fence and
/// the original value is reported in the fit.
pub fn box_dimension<T: Real>(
    segments: &[(Point<T>, Point<T>)],
    k_min: i32,
    k_max: i32,
    base: T,
    resolution: Option<T>,
) -> Result<DimensionFit> {
    if segments.is_empty() {
        return Err(Error::Parameter("boundary is empty".into()));
    }
    let fence = resolution.map_or(i32::MAX, |r| resolution_fence(r, base));
    let (k_hi, clamped_from) = if k_max > fence { (fence, Some(k_max)) } else { (k_max, None) };
    if k_hi - k_min < 3 {
        return Err(Error::Parameter(format!(
            "need k_max - k_min >= 3 (range {k_min}..{k_hi} after the resolution fence)"
        )));
    }
    let counts: Vec<(i32, u64)> = (k_min..=k_hi)
        .into_par_iter()
        .map(|k| (k, box_count(segments, k, base) as u64))
        .collect();
    let mut fit = fit_counts(&counts)?;
    fit.clamped_from = clamped_from;
    Ok(fit)
}

/// Ordinary least squares on `(k, log₂ N_k)`.
pub fn fit_counts(counts: &[(i32, u64)]) -> Result<DimensionFit> {
    if counts.len() < 2 {
        return Err(Error::Fit("need at least two scales".into()));
    }
    if counts.iter().all(|c| c.1 == counts[0].1) {
        return Err(Error::Fit("all counts are equal".into()));
    }
    let xs: Vec<f64> = counts.iter().map(|c| c.0 as f64).collect();
    let ys: Vec<f64> = counts.iter().map(|c| (c.1 as f64).log2()).collect();
    let (slope, intercept, r2) = linear_fit(&xs, &ys);
    let residuals = xs.iter().zip(&ys).map(|(x, y)| y - (slope * x + intercept)).collect();
    Ok(DimensionFit {
        counts: counts.to_vec(),
        slope,
        intercept,
        r2,
        k_range: (counts[0].0, counts[counts.len() - 1].0),
        residuals,
        clamped_from: None,
    })
}

/// Slope, intercept and coefficient of determination of `y ~ x`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    (slope, intercept, r2)
}

/// `−log 4 / log λ` and the linear lower bound `2 − (4/log 2)(½ − λ)`.
pub fn koch_dimension_closed_form<T: Real>(lambda: T) -> Result<(T, T)> {
    let third = T::one() / lit(3.0);
    if !(lambda >= third - lit(1e-15) && lambda < lit(0.5)) {
        return Err(Error::Parameter(format!("lambda must lie in [1/3, 1/2), got {}", lambda.to_f64_lossy())));
    }
    let dim = -lit::<T>(4.0).ln() / lambda.ln();
    let bound = lit::<T>(2.0) - lit::<T>(4.0) / T::LN_2() * (lit::<T>(0.5) - lambda);
    assert!(dim >= bound, "closed form below its linear bound at lambda = {}", lambda.to_f64_lossy());
    Ok((dim, bound))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point<f64> {
        Point::new(x, y)
    }

    #[test]
    fn unit_segment_counts() {
        // Off the grid lines: one square per 2^-5 of length, plus one.
        let seg = [(p(0.01, 0.3), p(1.01, 0.3))];
        let n = box_count(&seg, 5, 1.0);
        assert!((32..=34).contains(&n), "{n}");
        // On a grid line every touching square on both sides counts.
        let on = [(p(0.0, 0.0), p(1.0, 0.0))];
        assert_eq!(box_count(&on, 5, 1.0), 68);
    }

    #[test]
    fn single_point() {
        assert_eq!(box_count(&point_segments(&[p(0.3, 0.3)]), 4, 1.0), 1);
        assert_eq!(box_count(&point_segments(&[p(0.25, 0.25)]), 4, 1.0), 4);
    }

    #[test]
    fn segment_and_square_slopes() {
        let seg = [(p(0.013, 0.071), p(0.913, 0.671))];
        let f = box_dimension(&seg, 3, 9, 1.0, None).unwrap();
        assert!((f.slope - 1.0).abs() < 0.02, "{f:?}");
        let sq = polygon_segments(&[p(0.013, 0.021), p(0.913, 0.021), p(0.913, 0.921), p(0.013, 0.921)]);
        let f = box_dimension(&sq, 3, 9, 1.0, None).unwrap();
        assert!((f.slope - 1.0).abs() < 0.02, "{f:?}");
    }

    #[test]
    fn degenerate_fit_is_an_error() {
        assert!(matches!(fit_counts(&[(1, 4), (2, 4), (3, 4)]), Err(Error::Fit(_))));
    }

    #[test]
    fn closed_form_values() {
        let (d, b) = koch_dimension_closed_form(1.0f64 / 3.0).unwrap();
        assert!((d - 1.26186).abs() < 1e-5);
        assert!(d >= b);
        let (d, _) = koch_dimension_closed_form(0.4f64).unwrap();
        assert!((d - 4f64.ln() / 2.5f64.ln()).abs() < 1e-12);
        assert!(koch_dimension_closed_form(0.5f64).is_err());
    }

    #[test]
    fn fence_clamps_k_max() {
        let seg = polyline_segments(&[p(0.01, 0.01), p(0.26, 0.01), p(0.51, 0.01), p(0.76, 0.01), p(1.01, 0.01)]);
        assert!(box_dimension(&seg, 3, 9, 1.0, Some(0.25)).is_err());
        let f = box_dimension(&seg, -3, 9, 1.0, Some(0.25)).unwrap();
        assert_eq!(f.k_range, (-3, 0));
        assert_eq!(f.clamped_from, Some(9));
    }
}
