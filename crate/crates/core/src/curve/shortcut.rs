//! Per-cube length check for curves in the complement.

use serde::{Deserialize, Serialize};

use rayon::prelude::*;

use super::graph::{build_complement_graph, cell_lengths, complement_bbox, weighted_geodesic, GeodesicResult};
use crate::domain::Domain;
use crate::dyadic::{whitney_of_open_set, DomainRegion, DyadicCube, Side, WhitneyDecomposition};
use crate::error::Result;
use crate::geom::{Point, Rect};
use crate::real::{lit, Real};

/// Allowed length per closed cube is `SHORTCUT_FACTOR · ℓ(Q) + 4h`.
pub const SHORTCUT_FACTOR: f64 = 10.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShortcutViolation {
    pub cube: DyadicCube,
    pub side: f64,
    pub length: f64,
    pub bound: f64,
}

/// Whitney decomposition of `ℝ² \ Ω̄` inside `bbox`, refined to cubes of side about `h/4`.
pub fn exterior_whitney<T: Real>(domain: &Domain<T>, bbox: &Rect<T>, h: T) -> Result<WhitneyDecomposition<T>> {
    let max_level = (lit::<T>(4.0) / h).log2().ceil().to_i32().unwrap_or(0).max(0);
    whitney_of_open_set(&DomainRegion::new(domain, Side::Exterior), bbox, max_level, T::one())
}

/// Cubes where the curve is longer than `10ℓ(Q) + 4h`.
pub fn shortcut_check<T: Real>(result: &GeodesicResult<T>, whitney: &WhitneyDecomposition<T>, h: f64) -> Vec<ShortcutViolation> {
    let cells = if result.per_cell_length.is_empty() {
        cell_lengths(&result.polyline, whitney)
    } else {
        result.per_cell_length.clone()
    };
    check_lengths(&cells, whitney, h)
}

pub fn shortcut_check_polyline<T: Real>(polyline: &[Point<T>], whitney: &WhitneyDecomposition<T>, h: f64) -> Vec<ShortcutViolation> {
    check_lengths(&cell_lengths(polyline, whitney), whitney, h)
}

fn check_lengths<T: Real>(cells: &[(DyadicCube, f64)], whitney: &WhitneyDecomposition<T>, h: f64) -> Vec<ShortcutViolation> {
    cells
        .iter()
        .filter_map(|&(cube, length)| {
            let side = whitney.side(&cube).to_f64_lossy();
            let bound = SHORTCUT_FACTOR * side + 4.0 * h;
            (length > bound).then_some(ShortcutViolation { cube, side, length, bound })
        })
        .collect()
}

/// Outcome of checking geodesics between random boundary pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShortcutSurvey {
    pub geodesics: usize,
    pub cells_checked: usize,
    pub violations: Vec<ShortcutViolation>,
    /// Largest `ℋ¹(γ ∩ Q̄) / ℓ(Q)` seen.
    pub max_ratio: f64,
}

/// Geodesics between `n` pairs of boundary samples `(zᵢ, z_{i+n})`, each checked
/// against the exterior Whitney cubes.
pub fn shortcut_survey<T: Real>(domain: &Domain<T>, h: T, p: T, n: usize, seed: u64) -> Result<ShortcutSurvey> {
    let bbox = complement_bbox(domain);
    let graph = build_complement_graph(domain, &bbox, h, p)?;
    let whitney = exterior_whitney(domain, &bbox, h)?;
    let pts = domain.sample_boundary(2 * n, seed);
    let hf = h.to_f64_lossy();
    let per: Vec<(usize, Vec<ShortcutViolation>, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let g = weighted_geodesic(&graph, pts[i], pts[i + n])?;
            let cells = cell_lengths(&g.polyline, &whitney);
            let ratio = cells
                .iter()
                .map(|(c, l)| l / whitney.side(c).to_f64_lossy())
                .fold(0.0, f64::max);
            Ok((cells.len(), check_lengths(&cells, &whitney, hf), ratio))
        })
        .collect::<Result<_>>()?;
    Ok(ShortcutSurvey {
        geodesics: n,
        cells_checked: per.iter().map(|x| x.0).sum(),
        violations: per.iter().flat_map(|x| x.1.iter().cloned()).collect(),
        max_ratio: per.iter().map(|x| x.2).fold(0.0, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::whitney_of_square;

    #[test]
    fn survey_on_a_square_is_clean() {
        let d = crate::domain::build_unit_square::<f64>();
        let s = shortcut_survey(&d, 1.0 / 32.0, 1.5, 4, 3).unwrap();
        assert_eq!(s.geodesics, 4);
        assert!(s.cells_checked > 0);
        assert!(s.violations.is_empty());
    }

    #[test]
    fn straight_line_passes_and_a_zigzag_fails() {
        let w = whitney_of_square::<f64>(6);
        let line = [Point::new(0.1, 0.13), Point::new(0.9, 0.41)];
        assert!(shortcut_check_polyline(&line, &w, 0.0).is_empty());
        let mut zig = Vec::new();
        for i in 0..200 {
            let y = if i % 2 == 0 { 0.3 } else { 0.45 };
            zig.push(Point::new(0.3 + 0.001 * i as f64, y));
        }
        let v = shortcut_check_polyline(&zig, &w, 0.0);
        assert!(!v.is_empty());
        assert!(v.iter().all(|x| x.length > x.bound));
    }
}
