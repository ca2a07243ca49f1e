//! Experiment configuration, parameter sweeps and pass/fail reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{curve_condition_constant, john_constant, shortcut_survey};
use crate::dimension::{box_dimension, linear_fit, polygon_segments};
use crate::domain::{build_cone_domain, build_koch_snowflake, build_regular_polygon, build_unit_square, Domain};
use crate::dyadic::{check_neighbor_ratios, check_whitney_bounds, whitney_of_open_set, DomainRegion, Side};
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::porosity::{epsilon_schedule, implicit_double_decomposition, porosity_profile, PorosityParams};
use crate::rng::substream;

pub const REPORT_SCHEMA: u32 = 1;

/// Required count factor: `λ(k) = ⌈2^{−10}/ε⌉`.
pub const POROSITY_COUNT_FACTOR: f64 = 1.0 / 1024.0;
const POROSITY_OUTER_LEVEL: i32 = 16;
const POROSITY_INNER_LEVEL: i32 = 30;
/// Koch approximants used for John estimates are capped at this depth.
pub const JOHN_KOCH_DEPTH: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    Koch { lambda: f64, depth: usize },
    Cone { eps: f64 },
    Disc { sides: usize, radius: f64 },
    Square,
    File { path: PathBuf },
}

impl DomainSpec {
    pub fn build(&self) -> Result<Domain<f64>> {
        match self {
            DomainSpec::Koch { lambda, depth } => build_koch_snowflake(*lambda, *depth),
            DomainSpec::Cone { eps } => build_cone_domain(*eps),
            DomainSpec::Disc { sides, radius } => build_regular_polygon(*sides, Point::new(0.0, 0.0), *radius),
            DomainSpec::Square => Ok(build_unit_square()),
            DomainSpec::File { path } => Domain::from_json(&std::fs::read_to_string(path)?),
        }
    }

    pub fn label(&self) -> String {
        match self {
            DomainSpec::Koch { lambda, depth } => format!("koch(lambda={lambda:.4},depth={depth})"),
            DomainSpec::Cone { eps } => format!("cone(eps={eps})"),
            DomainSpec::Disc { sides, radius } => format!("disc(sides={sides},radius={radius})"),
            DomainSpec::Square => "square".into(),
            DomainSpec::File { path } => format!("file({})", path.display()),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            DomainSpec::Koch { lambda, depth } => (1.0 / 3.0 - 1e-12..0.5).contains(lambda) && *depth <= 10,
            DomainSpec::Cone { eps } => *eps > 0.0 && *eps < 0.5,
            DomainSpec::Disc { sides, radius } => *sides >= 3 && *radius > 0.0,
            DomainSpec::Square | DomainSpec::File { .. } => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter(format!("domain out of range: {}", self.label())))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Whitney,
    Boxdim,
    Curve,
    John,
    Porosity,
    Shortcut,
}

impl Analysis {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "whitney" => Analysis::Whitney,
            "boxdim" => Analysis::Boxdim,
            "curve" | "curve-constant" => Analysis::Curve,
            "john" => Analysis::John,
            "porosity" => Analysis::Porosity,
            "shortcut" => Analysis::Shortcut,
            other => return Err(Error::Parameter(format!("unknown analysis '{other}'"))),
        })
    }

    fn sampled(self) -> bool {
        !matches!(self, Analysis::Whitney | Analysis::Boxdim)
    }
}

/// Everything a sweep needs. Built from `key = value` lines; later settings win.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub domain: DomainSpec,
    /// Koch parameters to sweep at `domain`'s depth.
    pub lambdas: Vec<f64>,
    /// Cone apertures to sweep.
    pub epsilons: Vec<f64>,
    pub analyses: Vec<Analysis>,
    /// Complement grid spacing; defaults to 2⁻⁷ for cones and 2⁻⁹ otherwise.
    pub h: Option<f64>,
    /// Interior grid spacing is `2^{−john_resolution}·diam`.
    pub john_resolution: i32,
    pub whitney_level: i32,
    pub k_min: i32,
    pub k_max: i32,
    pub j_max: i32,
    pub p: f64,
    pub pairs: usize,
    pub points: usize,
    pub geodesics: usize,
    pub samples: usize,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            domain: DomainSpec::Koch { lambda: 1.0 / 3.0, depth: 6 },
            lambdas: Vec::new(),
            epsilons: Vec::new(),
            analyses: Vec::new(),
            h: None,
            john_resolution: 9,
            whitney_level: 10,
            k_min: 4,
            k_max: 8,
            j_max: 10,
            p: 1.5,
            pairs: 200,
            points: 200,
            geodesics: 50,
            samples: 16,
            seed: None,
            out: None,
        }
    }
}

fn num<V: std::str::FromStr>(key: &str, v: &str) -> Result<V> {
    v.trim()
        .parse()
        .map_err(|_| Error::Parameter(format!("bad value for {key}: '{v}'")))
}

fn list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse_ratio(key, s)).collect()
}

/// Accepts `0.25` or `1/3`.
fn parse_ratio(key: &str, v: &str) -> Result<f64> {
    match v.split_once('/') {
        Some((a, b)) => Ok(num::<f64>(key, a)? / num::<f64>(key, b)?),
        None => num(key, v),
    }
}

impl ExperimentConfig {
    /// Parses a flat config file: one `key = value` per line, `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = ExperimentConfig::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("line {}: expected key = value", n + 1)))?;
            c.set(k.trim(), v.trim())?;
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Applies one setting.
    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "domain" => {
                self.domain = match v {
                    "koch" => DomainSpec::Koch { lambda: 1.0 / 3.0, depth: 6 },
                    "cone" => DomainSpec::Cone { eps: 0.25 },
                    "disc" => DomainSpec::Disc { sides: 256, radius: 1.0 },
                    "square" => DomainSpec::Square,
                    other => return Err(Error::Parameter(format!("unknown domain '{other}'"))),
                }
            }
            "lambda" => match &mut self.domain {
                DomainSpec::Koch { lambda, .. } => *lambda = parse_ratio(key, v)?,
                _ => return Err(Error::Parameter("lambda needs domain = koch".into())),
            },
            "depth" => match &mut self.domain {
                DomainSpec::Koch { depth, .. } => *depth = num(key, v)?,
                _ => return Err(Error::Parameter("depth needs domain = koch".into())),
            },
            "eps" => match &mut self.domain {
                DomainSpec::Cone { eps } => *eps = parse_ratio(key, v)?,
                _ => return Err(Error::Parameter("eps needs domain = cone".into())),
            },
            "sides" => match &mut self.domain {
                DomainSpec::Disc { sides, .. } => *sides = num(key, v)?,
                _ => return Err(Error::Parameter("sides needs domain = disc".into())),
            },
            "radius" => match &mut self.domain {
                DomainSpec::Disc { radius, .. } => *radius = num(key, v)?,
                _ => return Err(Error::Parameter("radius needs domain = disc".into())),
            },
            "file" => self.domain = DomainSpec::File { path: PathBuf::from(v) },
            "lambdas" => self.lambdas = list(key, v)?,
            "epsilons" => self.epsilons = list(key, v)?,
            "analyses" => {
                self.analyses = v
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(Analysis::parse)
                    .collect::<Result<_>>()?;
                self.analyses.sort();
                self.analyses.dedup();
            }
            "h" => self.h = Some(parse_ratio(key, v)?),
            "john_resolution" => self.john_resolution = num(key, v)?,
            "whitney_level" => self.whitney_level = num(key, v)?,
            "k_min" => self.k_min = num(key, v)?,
            "k_max" => self.k_max = num(key, v)?,
            "j_max" => self.j_max = num(key, v)?,
            "p" => self.p = num(key, v)?,
            "pairs" => self.pairs = num(key, v)?,
            "points" => self.points = num(key, v)?,
            "geodesics" => self.geodesics = num(key, v)?,
            "samples" => self.samples = num(key, v)?,
            "seed" => self.seed = Some(num(key, v)?),
            "out" => self.out = Some(PathBuf::from(v)),
            other => return Err(Error::Parameter(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Parameter(m.into()));
        if !self.lambdas.is_empty() && !self.epsilons.is_empty() {
            return bad("sweep either lambdas or epsilons, not both");
        }
        for s in self.grid() {
            s.validate()?;
        }
        if !(self.p > 1.0 && self.p < 2.0) {
            return bad("p must lie in (1, 2)");
        }
        if let Some(h) = self.h {
            if !(h > 0.0 && h <= 1.0) {
                return bad("h must lie in (0, 1]");
            }
        }
        if !(4..=14).contains(&self.john_resolution) {
            return bad("john_resolution must lie in 4..=14");
        }
        if !(0..=20).contains(&self.whitney_level) {
            return bad("whitney_level must lie in 0..=20");
        }
        if self.k_max - self.k_min < 3 {
            return bad("need k_max - k_min >= 3");
        }
        if !(1..=30).contains(&self.j_max) {
            return bad("j_max must lie in 1..=30");
        }
        if self.pairs == 0 || self.points == 0 || self.geodesics == 0 || self.samples == 0 {
            return bad("sample counts must be positive");
        }
        if self.seed.is_none() && self.analyses.iter().any(|a| a.sampled()) {
            return bad("seed is required for sampled analyses");
        }
        Ok(())
    }

    /// Domains visited by the sweep, in grid order.
    pub fn grid(&self) -> Vec<DomainSpec> {
        if !self.lambdas.is_empty() {
            let depth = match self.domain {
                DomainSpec::Koch { depth, .. } => depth,
                _ => 6,
            };
            self.lambdas.iter().map(|&lambda| DomainSpec::Koch { lambda, depth }).collect()
        } else if !self.epsilons.is_empty() {
            self.epsilons.iter().map(|&eps| DomainSpec::Cone { eps }).collect()
        } else {
            vec![self.domain.clone()]
        }
    }

    fn complement_h(&self, spec: &DomainSpec) -> f64 {
        self.h.unwrap_or(match spec {
            DomainSpec::Cone { .. } => 1.0 / 128.0,
            _ => 1.0 / 512.0,
        })
    }

    /// Seed for one analysis, derived from the root seed by label.
    pub fn analysis_seed(&self, label: &str) -> u64 {
        substream(self.seed.unwrap_or(0), label).next_u64()
    }
}

/// How `measured` is compared with `target`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|measured − target| ≤ tolerance`.
    AbsWithin,
    /// `|measured/target − 1| ≤ tolerance`.
    RelWithin,
    /// `measured ≤ target·(1 + tolerance)`.
    AtMost,
    /// `measured ≥ target − tolerance`.
    AtLeast,
}

impl Comparison {
    pub fn holds(self, measured: f64, target: f64, tolerance: f64) -> bool {
        match self {
            Comparison::AbsWithin => (measured - target).abs() <= tolerance,
            Comparison::RelWithin => (measured / target - 1.0).abs() <= tolerance,
            Comparison::AtMost => measured <= target * (1.0 + tolerance),
            Comparison::AtLeast => measured >= target - tolerance,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Comparison::AbsWithin => "+-",
            Comparison::RelWithin => "+-%",
            Comparison::AtMost => "<=",
            Comparison::AtLeast => ">=",
        }
    }
}

mod lossy {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// One checked claim. Non-finite numbers are written as `null`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub claim: String,
    pub criterion: u8,
    pub grid: Option<usize>,
    pub label: String,
    #[serde(with = "lossy")]
    pub measured: f64,
    #[serde(with = "lossy")]
    pub target: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
    #[serde(default)]
    pub details: BTreeMap<String, f64>,
    #[serde(default)]
    pub runtime_s: f64,
}

impl ReportRecord {
    #[allow(clippy::too_many_arguments)]
    fn new(claim: &str, criterion: u8, grid: Option<usize>, label: &str, measured: f64, target: f64, tolerance: f64, comparison: Comparison) -> Self {
        ReportRecord {
            claim: claim.into(),
            criterion,
            grid,
            label: label.into(),
            measured,
            target,
            tolerance,
            comparison,
            pass: comparison.holds(measured, target, tolerance),
            details: BTreeMap::new(),
            runtime_s: 0.0,
        }
    }

    fn detail(mut self, key: &str, v: f64) -> Self {
        if v.is_finite() {
            self.details.insert(key.into(), v);
        }
        self
    }

    fn timed(mut self, t: Instant) -> Self {
        self.runtime_s = t.elapsed().as_secs_f64();
        self
    }
}

/// `6λ^{2p−3} / ((2−p)(½−λ))`.
pub fn koch_curve_constant_bound(lambda: f64, p: f64) -> f64 {
    6.0 * lambda.powf(2.0 * p - 3.0) / ((2.0 - p) * (0.5 - lambda))
}

/// `9λ^{3p−7} / ((2−p)(½−λ))`.
pub fn koch_curve_constant_proof_bound(lambda: f64, p: f64) -> f64 {
    9.0 * lambda.powf(3.0 * p - 7.0) / ((2.0 - p) * (0.5 - lambda))
}

/// `2 − 24 / (log 2 · (2−p) · C)`.
pub fn dimension_floor_from_curve_constant(c: f64, p: f64) -> f64 {
    2.0 - 24.0 / (std::f64::consts::LN_2 * (2.0 - p) * c)
}

#[derive(Default)]
struct PointOutcome {
    records: Vec<ReportRecord>,
    c_hat: Option<f64>,
    john: Option<f64>,
}

fn run_point(cfg: &ExperimentConfig, index: usize, spec: &DomainSpec) -> Result<PointOutcome> {
    let domain = spec.build()?;
    let label = spec.label();
    let g = Some(index);
    let mut out = PointOutcome::default();
    let has = |a: Analysis| cfg.analyses.contains(&a);
    let koch_lambda = match spec {
        DomainSpec::Koch { lambda, .. } => Some(*lambda),
        _ => None,
    };

    if has(Analysis::Whitney) {
        let t = Instant::now();
        let region = DomainRegion::new(&domain, Side::Interior);
        let w = whitney_of_open_set(&region, &domain.bbox().expand(domain.diam() / 8.0), cfg.whitney_level, 1.0)?;
        let bad = check_whitney_bounds(&w, &region).len();
        let ratios = check_neighbor_ratios(&w).len();
        let good = 1.0 - (bad + ratios) as f64 / w.len().max(1) as f64;
        out.records.push(
            ReportRecord::new("WHITNEY-BOUNDS", 1, g, &label, good, 1.0, 0.0, Comparison::AtLeast)
                .detail("cells", w.len() as f64)
                .detail("bound_violations", bad as f64)
                .detail("ratio_violations", ratios as f64)
                .timed(t),
        );
    }

    let mut dim = None;
    if has(Analysis::Boxdim) {
        let t = Instant::now();
        let fit = box_dimension(&polygon_segments(domain.vertices()), cfg.k_min, cfg.k_max, 1.0, None)?;
        dim = Some(fit.slope);
        if let Some(lambda) = koch_lambda {
            let target = -(4f64.ln()) / lambda.ln();
            let mut r = ReportRecord::new("KOCH-DIMENSION", 3, g, &label, fit.slope, target, 0.05, Comparison::AbsWithin)
                .detail("r2", fit.r2)
                .timed(t);
            r.pass &= fit.r2 >= 0.99;
            out.records.push(r);
        }
    }

    if has(Analysis::Curve) || has(Analysis::Porosity) {
        let t = Instant::now();
        let h = cfg.complement_h(spec);
        let est = curve_condition_constant(&domain, cfg.p, cfg.pairs, cfg.analysis_seed("curve"), h)?;
        out.c_hat = Some(est.c_hat);
        if has(Analysis::Curve) {
            if let Some(lambda) = koch_lambda {
                let formula = koch_curve_constant_bound(lambda, cfg.p);
                let proof = koch_curve_constant_proof_bound(lambda, cfg.p);
                let mut r = ReportRecord::new("KOCH-CURVE-BOUND", 7, g, &label, est.c_hat, formula, 0.0, Comparison::AtMost)
                    .detail("proof_bound", proof)
                    .detail("h", h)
                    .detail("nodes", est.nodes as f64)
                    .timed(t);
                r.pass &= est.c_hat <= proof;
                out.records.push(r);
                if let Some(d) = dim {
                    let floor = dimension_floor_from_curve_constant(formula, cfg.p);
                    out.records.push(
                        ReportRecord::new("DIMENSION-FLOOR", 10, g, &label, d, floor, 0.0, Comparison::AtLeast)
                            .detail("c_upper", formula)
                            .detail("c_hat", est.c_hat)
                            .detail("floor_at_c_hat", dimension_floor_from_curve_constant(est.c_hat, cfg.p)),
                    );
                }
            }
        }
    }

    if has(Analysis::John) {
        let t = Instant::now();
        let (jdomain, target) = match spec {
            DomainSpec::Koch { lambda, depth } => {
                (Some(build_koch_snowflake(*lambda, (*depth).min(JOHN_KOCH_DEPTH))?), Some((0.5 - lambda) / lambda))
            }
            _ => (None, None),
        };
        let jd = jdomain.as_ref().unwrap_or(&domain);
        let h = jd.diam() * 2f64.powi(-cfg.john_resolution);
        let est = john_constant(jd, h, cfg.samples, cfg.analysis_seed("john"))?;
        out.john = Some(est.j);
        let rec = match (spec, target) {
            (_, Some(target)) => Some(ReportRecord::new("KOCH-JOHN", 5, g, &label, est.j, target, 0.15, Comparison::RelWithin)),
            (DomainSpec::Cone { eps }, _) => Some(ReportRecord::new("CONE-JOHN", 5, g, &label, est.j, 1.1 * eps, 0.0, Comparison::AtMost)),
            (DomainSpec::Disc { .. }, _) => Some(ReportRecord::new("DISC-JOHN", 5, g, &label, est.j, 1.0, 0.05, Comparison::AbsWithin)),
            _ => None,
        };
        if let Some(r) = rec {
            out.records.push(r.detail("h", h).timed(t));
        }
    }

    if has(Analysis::Porosity) {
        let t = Instant::now();
        let c_hat = out.c_hat.unwrap_or(1.0);
        let schedule = epsilon_schedule(c_hat)?;
        let params = PorosityParams::new(schedule.eps, POROSITY_COUNT_FACTOR, 1)?;
        let bbox = domain.bbox().expand(domain.diam() / 4.0);
        let family = implicit_double_decomposition(&domain, &bbox, POROSITY_OUTER_LEVEL, POROSITY_INNER_LEVEL)?;
        let pts = domain.sample_boundary(cfg.points, cfg.analysis_seed("porosity"));
        let verdicts: Vec<bool> = pts
            .par_iter()
            .map(|&x| porosity_profile(&family, x, cfg.j_max, &params, domain.diam()).map(|p| p.verdict))
            .collect::<Result<_>>()?;
        let passed = verdicts.iter().filter(|&&v| v).count();
        out.records.push(
            ReportRecord::new("WEAK-MEAN-POROSITY", 9, g, &label, passed as f64 / pts.len() as f64, 1.0, 0.0, Comparison::AtLeast)
                .detail("points", pts.len() as f64)
                .detail("eps", schedule.eps)
                .detail("lambda_count", params.lambda_count(1) as f64)
                .detail("c_hat", c_hat)
                .timed(t),
        );
    }

    if has(Analysis::Shortcut) {
        let t = Instant::now();
        let h = cfg.complement_h(spec);
        let s = shortcut_survey(&domain, h, cfg.p, cfg.geodesics, cfg.analysis_seed("shortcut"))?;
        out.records.push(
            ReportRecord::new("SHORTCUT", 8, g, &label, s.violations.len() as f64, 0.0, 0.0, Comparison::AtMost)
                .detail("geodesics", s.geodesics as f64)
                .detail("cells", s.cells_checked as f64)
                .detail("max_length_over_side", s.max_ratio)
                .timed(t),
        );
    }
    Ok(out)
}

/// Runs the selected analyses over the grid. Grid points run in parallel;
/// records come back in grid order, followed by records fitted across the grid.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    cfg.validate()?;
    if cfg.analyses.is_empty() {
        return Ok(Vec::new());
    }
    let grid = cfg.grid();
    let outcomes: Vec<PointOutcome> = grid
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            run_point(cfg, i, s).map_err(|e| Error::Grid {
                index: i,
                label: s.label(),
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;
    let mut records: Vec<ReportRecord> = outcomes.iter().flat_map(|o| o.records.iter().cloned()).collect();

    let cones: Vec<(f64, &PointOutcome)> = grid
        .iter()
        .zip(&outcomes)
        .filter_map(|(s, o)| match s {
            DomainSpec::Cone { eps } => Some((*eps, o)),
            _ => None,
        })
        .collect();
    if cones.len() >= 2 && cfg.analyses.contains(&Analysis::Curve) {
        let xs: Vec<f64> = cones.iter().map(|c| c.0.ln()).collect();
        let ys: Vec<f64> = cones.iter().map(|c| c.1.c_hat.unwrap().ln()).collect();
        let (slope, _, r2) = linear_fit(&xs, &ys);
        let mut r = ReportRecord::new("CONE-CURVE-SLOPE", 6, None, "cone sweep", slope, cfg.p - 2.0, 0.15, Comparison::AbsWithin)
            .detail("r2", r2)
            .detail("points", xs.len() as f64);
        for (eps, o) in &cones {
            r = r.detail(&format!("c_hat[eps={eps}]"), o.c_hat.unwrap());
        }
        records.push(r);
        if cfg.analyses.contains(&Analysis::John) {
            let xs: Vec<f64> = cones.iter().map(|c| ((2.0 - cfg.p) * c.1.c_hat.unwrap()).ln()).collect();
            let ys: Vec<f64> = cones.iter().map(|c| c.1.john.unwrap().ln()).collect();
            let (slope, _, r2) = linear_fit(&xs, &ys);
            let mut r = ReportRecord::new("CONE-POWER-LAW", 11, None, "cone sweep", slope, 1.0 / (cfg.p - 2.0), 0.2, Comparison::AbsWithin)
                .detail("r2", r2);
            r.pass &= r2 >= 0.9;
            records.push(r);
        }
    }
    Ok(records)
}

/// Report document as written to `report.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub schema: u32,
    pub records: Vec<ReportRecord>,
}

/// Serialized report; runtimes are zeroed unless `with_runtime` is set.
pub fn report_json(records: &[ReportRecord], with_runtime: bool) -> String {
    let mut records = records.to_vec();
    if !with_runtime {
        for r in &mut records {
            r.runtime_s = 0.0;
        }
    }
    serde_json::to_string_pretty(&ReportFile { schema: REPORT_SCHEMA, records }).expect("report serializes")
}

/// Checks a report document against schema 1 and returns its records.
pub fn validate_report(json: &str) -> Result<Vec<ReportRecord>> {
    let v: serde_json::Value = serde_json::from_str(json)?;
    let obj = v.as_object().ok_or_else(|| Error::Format("report must be an object".into()))?;
    match obj.get("schema").and_then(|s| s.as_u64()) {
        Some(1) => {}
        other => return Err(Error::Format(format!("unsupported report schema {other:?}"))),
    }
    let required = ["claim", "criterion", "label", "measured", "target", "tolerance", "comparison", "pass"];
    let list = obj
        .get("records")
        .and_then(|r| r.as_array())
        .ok_or_else(|| Error::Format("records must be an array".into()))?;
    for (i, r) in list.iter().enumerate() {
        for k in required {
            if r.get(k).is_none() {
                return Err(Error::Format(format!("record {i} lacks '{k}'")));
            }
        }
    }
    let file: ReportFile = serde_json::from_value(v)?;
    for (i, r) in file.records.iter().enumerate() {
        if r.claim.is_empty() || !(1..=12).contains(&r.criterion) {
            return Err(Error::Format(format!("record {i} has no valid claim or criterion")));
        }
    }
    Ok(file.records)
}

pub fn report_csv(records: &[ReportRecord]) -> String {
    let mut s = String::from("claim,criterion,grid,label,measured,target,tolerance,comparison,pass,runtime_s\n");
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},\"{}\",{},{},{},{},{},{:.3}",
            r.claim,
            r.criterion,
            r.grid.map(|g| g.to_string()).unwrap_or_default(),
            r.label,
            r.measured,
            r.target,
            r.tolerance,
            r.comparison.symbol(),
            r.pass,
            r.runtime_s
        );
    }
    s
}

/// Long-form `claim,grid,label,key,value` rows of every record's details.
pub fn raw_csv(records: &[ReportRecord]) -> String {
    let mut s = String::from("claim,grid,label,key,value\n");
    for r in records {
        let g = r.grid.map(|g| g.to_string()).unwrap_or_default();
        let _ = writeln!(s, "{},{},\"{}\",measured,{}", r.claim, g, r.label, r.measured);
        for (k, v) in &r.details {
            let _ = writeln!(s, "{},{},\"{}\",{},{}", r.claim, g, r.label, k, v);
        }
    }
    s
}

pub fn report_table(records: &[ReportRecord]) -> String {
    let mut s = format!(
        "{:<20} {:>4} {:<28} {:>12} {:>4} {:>12} {:>8}  {}\n",
        "claim", "crit", "label", "measured", "", "target", "tol", "result"
    );
    for r in records {
        let _ = writeln!(
            s,
            "{:<20} {:>4} {:<28} {:>12.6} {:>4} {:>12.6} {:>8.4}  {}",
            r.claim,
            r.criterion,
            r.label,
            r.measured,
            r.comparison.symbol(),
            r.target,
            r.tolerance,
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    s
}

/// What [`emit_report`] wrote and how the run should exit.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportOutcome {
    pub exit_code: i32,
    pub failing: Vec<String>,
    pub files: Vec<PathBuf>,
}

/// Writes `report.json`, `report.csv`, `raw.csv` and `report.txt` into `dir`.
/// The exit code is 1 when any record fails and 0 otherwise.
pub fn emit_report(records: &[ReportRecord], dir: &Path) -> Result<ReportOutcome> {
    if records.is_empty() {
        return Err(Error::Parameter("no records to report".into()));
    }
    std::fs::create_dir_all(dir)?;
    let files = vec![
        (dir.join("report.json"), report_json(records, true)),
        (dir.join("report.csv"), report_csv(records)),
        (dir.join("raw.csv"), raw_csv(records)),
        (dir.join("report.txt"), report_table(records)),
    ];
    for (p, body) in &files {
        std::fs::write(p, body)?;
    }
    let failing: Vec<String> = records.iter().filter(|r| !r.pass).map(|r| r.claim.clone()).collect();
    Ok(ReportOutcome {
        exit_code: if failing.is_empty() { 0 } else { 1 },
        failing,
        files: files.into_iter().map(|f| f.0).collect(),
    })
}
