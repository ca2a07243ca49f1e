//! The weighted length `∫_γ dist(z, ∂Ω)^{1−p} ds(z)` of a polyline.

use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geom::{point_segment_distance, segment_intersection_param, Point};
use crate::real::{lit, Real};

/// Relative accuracy of the adaptive quadrature.
pub const REL_TOL: f64 = 1e-4;
const MAX_DEPTH: u32 = 40;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_3,
    0.949_107_912_342_758_524_526_189_684_047_9,
    0.864_864_423_359_769_072_789_712_788_640_9,
    0.741_531_185_599_394_439_863_864_773_280_8,
    0.586_087_235_467_691_130_294_144_845_693_0,
    0.405_845_151_377_397_166_906_606_412_076_9,
    0.207_784_955_007_898_467_600_689_403_773_2,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_20,
    0.104_790_010_322_250_183_839_876_322_541_5,
    0.140_653_259_715_525_918_745_189_590_510_2,
    0.169_004_726_639_267_902_826_583_426_598_6,
    0.190_350_578_064_785_409_913_256_402_421_0,
    0.204_432_940_075_298_892_414_161_999_234_6,
    0.209_482_141_084_727_828_012_999_174_891_7,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_1,
    0.279_705_391_489_276_667_901_467_771_423_8,
    0.381_830_050_505_118_944_950_369_775_489_0,
    0.417_959_183_673_469_387_755_102_040_816_3,
];

/// Gauss–Kronrod 7/15 estimate and error on `[a, b]`.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive integration to relative tolerance `tol`; the flag reports convergence.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> (f64, bool) {
    let (whole, err) = gk15(f, a, b);
    let mut ok = true;
    let v = refine(f, a, b, whole, err, tol, whole.abs(), 0, &mut ok);
    (v, ok)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    est: f64,
    err: f64,
    tol: f64,
    scale: f64,
    depth: u32,
    ok: &mut bool,
) -> f64 {
    if err <= tol * scale.max(f64::MIN_POSITIVE) || !err.is_finite() && !est.is_finite() {
        return est;
    }
    if depth >= MAX_DEPTH || b - a <= 1e-14 * (a.abs() + b.abs()).max(1e-300) {
        *ok = false;
        return est;
    }
    let m = 0.5 * (a + b);
    let (l, el) = gk15(f, a, m);
    let (r, er) = gk15(f, m, b);
    let scale = scale.max((l + r).abs());
    // Halve the tolerance share so the total stays within `tol`.
    refine(f, a, m, l, el, tol, scale * 0.5, depth + 1, ok) + refine(f, m, b, r, er, tol, scale * 0.5, depth + 1, ok)
}

/// Value of the functional with diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    pub value: f64,
    pub length: f64,
    /// Some piece runs along `∂Ω`, where the integrand is infinite.
    pub divergent: bool,
    /// Every adaptive subdivision met the tolerance.
    pub converged: bool,
}

/// `∫_γ dist(z, ∂Ω)^{1−p} ds` over a polyline in `ℝ² \ Ω`.
pub fn curve_functional<T: Real>(domain: &Domain<T>, polyline: &[Point<T>], p: T) -> Result<T> {
    let r = curve_functional_report(domain, polyline, p)?;
    Ok(lit(r.value))
}

pub fn curve_functional_report<T: Real>(domain: &Domain<T>, polyline: &[Point<T>], p: T) -> Result<FunctionalReport> {
    check_exponent(p)?;
    for w in polyline.windows(2) {
        if domain.segment_enters(w[0], w[1]) {
            return Err(Error::Admissibility(format!(
                "segment [{:?}, {:?}] enters the domain",
                w[0], w[1]
            )));
        }
    }
    Ok(polyline_integral(domain, polyline, p, |_| true))
}

pub(crate) fn check_exponent<T: Real>(p: T) -> Result<()> {
    if !(p > T::one() && p < lit(2.0)) {
        return Err(Error::Parameter(format!("p must lie in (1, 2), got {}", p.to_f64_lossy())));
    }
    Ok(())
}

/// Sum of segment integrals without the admissibility check. `keep` can drop segments.
pub(crate) fn polyline_integral<T: Real, K: Fn(usize) -> bool>(
    domain: &Domain<T>,
    polyline: &[Point<T>],
    p: T,
    keep: K,
) -> FunctionalReport {
    let mut out = FunctionalReport {
        value: 0.0,
        length: 0.0,
        divergent: false,
        converged: true,
    };
    for (i, w) in polyline.windows(2).enumerate() {
        if !keep(i) {
            continue;
        }
        let s = segment_integral(domain, w[0], w[1], p);
        out.value += s.value;
        out.length += s.length;
        out.divergent |= s.divergent;
        out.converged &= s.converged;
    }
    out
}

/// Integral over one segment, split at boundary contacts. Near a contact the
/// substitution `s = τ^{1/(2−p)}` removes the `s^{1−p}` singularity.
pub fn segment_integral<T: Real>(domain: &Domain<T>, a: Point<T>, b: Point<T>, p: T) -> FunctionalReport {
    let af = [a.x.to_f64_lossy(), a.y.to_f64_lossy()];
    let d = [b.x.to_f64_lossy() - af[0], b.y.to_f64_lossy() - af[1]];
    let len = d[0].hypot(d[1]);
    let mut out = FunctionalReport {
        value: 0.0,
        length: len,
        divergent: false,
        converged: true,
    };
    if len == 0.0 {
        return out;
    }
    let pf = p.to_f64_lossy();
    let tol = domain.boundary_tolerance();
    let mut ts = vec![0.0f64, 1.0];
    for e in domain.bvh().segments_meeting(a, b) {
        let (c, f) = domain.edge(e);
        if let Some(t) = segment_intersection_param(a, b, c, f) {
            ts.push(t.to_f64_lossy());
        }
        for q in [c, f] {
            if point_segment_distance(q, a, b) <= tol {
                let t = ((q - a).dot(b - a) / (b - a).norm2()).to_f64_lossy();
                ts.push(t.clamp(0.0, 1.0));
            }
        }
    }
    ts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let merge = (tol.to_f64_lossy() / len).max(1e-15);
    ts.dedup_by(|x, y| (*x - *y).abs() <= merge);
    if let Some(last) = ts.last_mut() {
        *last = 1.0;
    }
    let at = |t: f64| Point::new(lit::<T>(af[0] + t * d[0]), lit::<T>(af[1] + t * d[1]));
    let dist = |t: f64| domain.distance_to_boundary(at(t)).to_f64_lossy();
    let tolf = tol.to_f64_lossy();
    for w in ts.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        if t1 - t0 <= 0.0 {
            continue;
        }
        if dist(0.5 * (t0 + t1)) <= tolf {
            out.divergent = true;
            out.value = f64::INFINITY;
            continue;
        }
        let half = 0.5 * (t1 - t0);
        for (start, dir) in [(t0, 1.0), (t1, -1.0)] {
            let singular = dist(start) <= tolf;
            let m = if singular { 1.0 / (2.0 - pf) } else { 1.0 };
            let g = |tau: f64| {
                if tau <= 0.0 && singular {
                    return 0.0;
                }
                let s = half * tau.powf(m);
                let r = dist(start + dir * s);
                if r <= 0.0 {
                    return 0.0;
                }
                r.powf(1.0 - pf) * half * m * tau.powf(m - 1.0) * len
            };
            let (v, ok) = integrate(&g, 0.0, 1.0, REL_TOL * 0.1);
            out.value += v;
            out.converged &= ok;
        }
    }
    out
}
