use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use extgeom::curve::{
    build_complement_graph, complement_bbox, curve_condition_constant, john_constant, weighted_geodesic,
};
use extgeom::dimension::{box_dimension, polygon_segments};
use extgeom::dyadic::{check_whitney_bounds, whitney_of_open_set, whitney_of_square, DomainRegion, Side};
use extgeom::porosity::{epsilon_schedule, implicit_double_decomposition, porosity_profile, PorosityParams};
use extgeom::report::{emit_report, run_sweep, DomainSpec, ExperimentConfig, POROSITY_COUNT_FACTOR};
use extgeom::svg::{render_svg, Artifact};
use extgeom::{Domain64, Point64};

#[derive(Parser)]
#[command(name = "extgeom", version, about = "Whitney, porosity, dimension and curve-condition experiments on planar domains")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a domain as JSON.
    Generate {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Whitney decomposition of a domain side, or of the unit square with --square.
    Whitney {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, value_enum, default_value = "interior")]
        side: SideArg,
        #[arg(long, default_value_t = 10)]
        level: i32,
        /// Exact square decomposition down to this relative level.
        #[arg(long)]
        square: Option<i32>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Weak mean porosity profiles at sampled boundary points.
    Porosity {
        #[command(flatten)]
        domain: DomainArgs,
        /// Curve constant used for the epsilon schedule.
        #[arg(long)]
        c_hat: f64,
        #[arg(long, default_value_t = 50)]
        points: usize,
        #[arg(long, default_value_t = 10)]
        j_max: i32,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Box-counting dimension of the boundary.
    Boxdim {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, default_value_t = 4)]
        k_min: i32,
        #[arg(long, default_value_t = 8)]
        k_max: i32,
    },
    /// Sampled curve-condition constant.
    CurveConstant {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, default_value_t = 1.5)]
        p: f64,
        #[arg(long, default_value_t = 200)]
        pairs: usize,
        #[arg(long, default_value_t = 1.0 / 128.0)]
        h: f64,
        #[arg(long)]
        seed: u64,
    },
    /// John constant estimate.
    John {
        #[command(flatten)]
        domain: DomainArgs,
        /// Grid spacing is 2^-resolution times the diameter.
        #[arg(long, default_value_t = 9)]
        resolution: i32,
        #[arg(long, default_value_t = 16)]
        samples: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Weighted geodesic between two points outside the domain.
    Geodesic {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        from: Point64,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        to: Point64,
        #[arg(long, default_value_t = 1.5)]
        p: f64,
        #[arg(long, default_value_t = 1.0 / 128.0)]
        h: f64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run a configured sweep and write the report. Exits 1 if any claim fails.
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        /// `key=value` overrides applied after the config file.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a domain, decomposition or geodesic as SVG.
    Render {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, value_enum, default_value = "domain")]
        artifact: ArtifactArg,
        #[arg(long, default_value_t = 6)]
        level: i32,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        from: Option<Point64>,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        to: Option<Point64>,
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct DomainArgs {
    #[arg(long, value_enum, default_value = "koch")]
    domain: DomainKind,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    lambda: f64,
    #[arg(long, default_value_t = 4)]
    depth: usize,
    #[arg(long, default_value_t = 0.25)]
    eps: f64,
    #[arg(long, default_value_t = 256)]
    sides: usize,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Domain JSON file; overrides --domain.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainKind {
    Koch,
    Cone,
    Disc,
    Square,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Interior,
    Exterior,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum ArtifactArg {
    Domain,
    Whitney,
    Geodesic,
}

impl DomainArgs {
    fn spec(&self) -> DomainSpec {
        if let Some(path) = &self.file {
            return DomainSpec::File { path: path.clone() };
        }
        match self.domain {
            DomainKind::Koch => DomainSpec::Koch { lambda: self.lambda, depth: self.depth },
            DomainKind::Cone => DomainSpec::Cone { eps: self.eps },
            DomainKind::Disc => DomainSpec::Disc { sides: self.sides, radius: self.radius },
            DomainKind::Square => DomainSpec::Square,
        }
    }

    fn build(&self) -> Result<Domain64> {
        let spec = self.spec();
        spec.build().with_context(|| format!("building {}", spec.label()))
    }
}

fn parse_point(s: &str) -> std::result::Result<Point64, String> {
    let (x, y) = s.split_once(',').ok_or("expected x,y")?;
    let x = x.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let y = y.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok(Point64::new(x, y))
}

fn write_out(out: &Option<PathBuf>, body: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{body}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Generate { domain, out } => {
            write_out(&out, &domain.build()?.to_json())?;
        }
        Cmd::Whitney { domain, side, level, square, out } => {
            if let Some(j) = square {
                let w = whitney_of_square::<f64>(j);
                eprintln!("square decomposition: {} cells", w.len());
                return write_out(&out, &w.to_json()).map(|_| 0);
            }
            let d = domain.build()?;
            let side = match side {
                SideArg::Interior => Side::Interior,
                SideArg::Exterior => Side::Exterior,
                SideArg::Both => Side::Both,
            };
            let region = DomainRegion::new(&d, side);
            let w = whitney_of_open_set(&region, &d.bbox().expand(d.diam() / 8.0), level, 1.0)?;
            let bad = check_whitney_bounds(&w, &region).len();
            eprintln!("{} cells, {} truncated, {} bound violations", w.len(), w.truncated_count, bad);
            write_out(&out, &w.to_json())?;
        }
        Cmd::Porosity { domain, c_hat, points, j_max, seed, out } => {
            let d = domain.build()?;
            let schedule = epsilon_schedule(c_hat)?;
            let params = PorosityParams::new(schedule.eps, POROSITY_COUNT_FACTOR, 1)?;
            let family = implicit_double_decomposition(&d, &d.bbox().expand(d.diam() / 4.0), 16, 30)?;
            let profiles = d
                .sample_boundary(points, seed)
                .into_iter()
                .map(|x| porosity_profile(&family, x, j_max, &params, d.diam()))
                .collect::<extgeom::Result<Vec<_>>>()?;
            let passed = profiles.iter().filter(|p| p.verdict).count();
            eprintln!("eps = 2^-{}: {passed}/{} points pass", schedule.m, profiles.len());
            write_out(&out, &serde_json::to_string_pretty(&profiles)?)?;
        }
        Cmd::Boxdim { domain, k_min, k_max } => {
            let d = domain.build()?;
            let fit = box_dimension(&polygon_segments(d.vertices()), k_min, k_max, 1.0, None)?;
            println!("{}", serde_json::to_string_pretty(&fit)?);
        }
        Cmd::CurveConstant { domain, p, pairs, h, seed } => {
            let d = domain.build()?;
            let mut est = curve_condition_constant(&d, p, pairs, seed, h)?;
            est.pairs.clear();
            println!("{}", serde_json::to_string_pretty(&est)?);
        }
        Cmd::John { domain, resolution, samples, seed } => {
            let d = domain.build()?;
            let est = john_constant(&d, d.diam() * 2f64.powi(-resolution), samples, seed)?;
            println!("{}", serde_json::to_string_pretty(&est)?);
        }
        Cmd::Geodesic { domain, from, to, p, h, out } => {
            let d = domain.build()?;
            let g = build_complement_graph(&d, &complement_bbox(&d), h, p)?;
            let r = weighted_geodesic(&g, from, to)?;
            write_out(&out, &serde_json::to_string_pretty(&r)?)?;
        }
        Cmd::Sweep { config, set, out } => {
            let mut cfg = match &config {
                Some(p) => ExperimentConfig::load(p).with_context(|| format!("reading {}", p.display()))?,
                None => ExperimentConfig::default(),
            };
            for kv in &set {
                let Some((k, v)) = kv.split_once('=') else {
                    bail!("--set expects key=value, got '{kv}'");
                };
                cfg.set(k.trim(), v.trim())?;
            }
            if out.is_some() {
                cfg.out = out;
            }
            let records = run_sweep(&cfg)?;
            if records.is_empty() {
                eprintln!("no analyses selected");
                return Ok(0);
            }
            let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("report"));
            let outcome = emit_report(&records, &dir)?;
            print!("{}", extgeom::report::report_table(&records));
            for claim in &outcome.failing {
                eprintln!("FAILED: {claim}");
            }
            return Ok(outcome.exit_code as u8);
        }
        Cmd::Render { domain, artifact, level, from, to, out } => {
            let d = domain.build()?;
            let svg = match artifact {
                ArtifactArg::Domain => render_svg(&Artifact::Domain(&d)),
                ArtifactArg::Whitney => {
                    let region = DomainRegion::new(&d, Side::Interior);
                    let w = whitney_of_open_set(&region, &d.bbox().expand(d.diam() / 8.0), level, 1.0)?;
                    render_svg(&Artifact::Decomposition { decomposition: &w, domain: Some(&d) })
                }
                ArtifactArg::Geodesic => {
                    let (Some(a), Some(b)) = (from, to) else {
                        bail!("geodesic rendering needs --from and --to");
                    };
                    let g = build_complement_graph(&d, &complement_bbox(&d), 1.0 / 128.0, 1.5)?;
                    let r = weighted_geodesic(&g, a, b)?;
                    render_svg(&Artifact::Geodesic { domain: &d, result: &r })
                }
            };
            std::fs::write(&out, svg).with_context(|| format!("writing {}", out.display()))?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
