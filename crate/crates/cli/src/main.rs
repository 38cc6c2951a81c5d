use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use obc_core::basins::{self, BBox, Palette};
use obc_core::certification::{self, CertificationStatus, DEFAULT_SAFETY};
use obc_core::formats;
use obc_core::symbolic::{self, SubdivisionConfig};
use obc_core::transversality::{self, MeasureMode};
use obc_core::{ConvexPolygon, MapParams, Point};

#[derive(Parser)]
#[command(name = "obc", version, about = "Outer billiards with contraction about convex polygons")]
struct Cli {
    /// Worker threads (defaults to all cores)
    #[arg(long, global = true, env = "OBC_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct MapArgs {
    /// Polygon file: one `x y` vertex per line
    #[arg(long)]
    polygon: PathBuf,
    /// Contraction in (0, 1)
    #[arg(long, allow_hyphen_values = true)]
    lambda: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate one orbit and emit it as CSV
    Simulate {
        #[command(flatten)]
        map: MapArgs,
        /// Start point `X,Y`
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Enumerate periodic attractors from the depth-N cell graph
    Attractors {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Certify asymptotic periodicity
    Certify {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = 60)]
        max_depth: usize,
        #[arg(long, default_value_t = DEFAULT_SAFETY)]
        safety: f64,
        #[arg(long)]
        json: Option<PathBuf>,
        /// Exit with status 2 when the result is inconclusive
        #[arg(long)]
        strict: bool,
    },
    /// Render basins of attraction as a binary PPM
    Basins {
        #[command(flatten)]
        map: MapArgs,
        /// Resolution `WxH`
        #[arg(long)]
        res: String,
        /// `x0,y0,x1,y1`; defaults to the square around the trap disc
        #[arg(long, allow_hyphen_values = true)]
        bbox: Option<String>,
        #[arg(long)]
        out: PathBuf,
        /// Lines `label r g b`
        #[arg(long)]
        palette: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        max_depth: usize,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Summary of the raster (label histogram)
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Count admissible itineraries per depth
    Itineraries {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        depth: usize,
        /// Also search for the three-symbol depth up to this cap
        #[arg(long, default_value_t = 50)]
        three_symbol_cap: usize,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Draw the singular set of order N
    Singular {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        svg: PathBuf,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Polynomial root-free radii and sublevel-measure bounds
    Transversality {
        #[command(subcommand)]
        command: TransversalityCommand,
    },
}

#[derive(Subcommand)]
enum TransversalityCommand {
    /// Table of lower and upper bounds for r_alpha(k)
    Bounds {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        kmax: usize,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Compare the measured sublevel set with the bound
    Check {
        /// One coefficient per line, constant term first
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        eps: f64,
        /// `a,b`
        #[arg(long, allow_hyphen_values = true)]
        interval: String,
        /// Transversality order d
        #[arg(long, default_value_t = 1)]
        order: usize,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

enum Failure {
    Domain(String),
    Inconclusive(String),
    Io(String),
}

impl From<obc_core::Error> for Failure {
    fn from(e: obc_core::Error) -> Self {
        match e {
            obc_core::Error::Io(io) => Failure::Io(io.to_string()),
            other => Failure::Domain(format!("{}: {other}", other.kind())),
        }
    }
}

type Outcome = Result<(), Failure>;

const HYPOTHESIS_NOTE: &str = "the transversality hypothesis is only checked on a grid; delta is user supplied";

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Inconclusive(m)) => {
            eprintln!("inconclusive: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Io(m)) => {
            eprintln!("io error: {m}");
            ExitCode::from(3)
        }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Outcome {
    fs::write(path, bytes).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load_params(map: &MapArgs) -> Result<MapParams, Failure> {
    let poly: ConvexPolygon = read_text(&map.polygon)?.parse()?;
    Ok(MapParams::new(poly, map.lambda)?)
}

/// Writes JSON to `path`, or to stdout when absent.
fn emit_json<T: Serialize>(value: &T, path: Option<&Path>) -> Outcome {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Domain(e.to_string()))?;
    text.push('\n');
    match path {
        Some(p) => write_bytes(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_floats(text: &str, n: usize, what: &str) -> Result<Vec<f64>, Failure> {
    let vals: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Domain(format!("cannot parse {what} {text:?}")))?;
    if vals.len() != n {
        return Err(Failure::Domain(format!("{what} needs {n} comma-separated numbers, got {text:?}")));
    }
    Ok(vals)
}

fn parse_resolution(text: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::Domain(format!("resolution must look like 512x512, got {text:?}"));
    let (w, h) = text.split_once(['x', 'X']).ok_or_else(bad)?;
    let w: usize = w.trim().parse().map_err(|_| bad())?;
    let h: usize = h.trim().parse().map_err(|_| bad())?;
    if w == 0 || h == 0 {
        return Err(bad());
    }
    Ok((w, h))
}

#[derive(Serialize)]
struct AttractorsReport<'a> {
    depth: usize,
    tol: f64,
    attractors: &'a [certification::PeriodicAttractor],
}

#[derive(Serialize)]
struct ItinerariesReport {
    counts: Vec<symbolic::LevelCount>,
    three_symbol_depth: Option<usize>,
    three_symbol_cap: usize,
}

#[derive(Serialize)]
struct BasinsReport {
    width: usize,
    height: usize,
    bbox: BBox,
    certified_depth: usize,
    attractors: Vec<certification::PeriodicAttractor>,
    histogram: Vec<(i32, usize)>,
}

#[derive(Serialize)]
struct BoundsRow {
    k: usize,
    lower: f64,
    upper: f64,
}

#[derive(Serialize)]
struct CheckReport {
    bound: transversality::MeasureBound,
    measure_grid: f64,
    measure_roots: f64,
    hypothesis_grid_points: usize,
    hypothesis_failures: usize,
    within_bound: bool,
    note: &'static str,
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Simulate {
            map,
            point,
            steps,
            csv,
        } => {
            let params = load_params(&map)?;
            let xy = parse_floats(&point, 2, "point")?;
            let orbit = params.orbit(Point::new(xy[0], xy[1]), steps);
            let text = formats::orbit_csv(&orbit);
            match csv {
                Some(p) => write_bytes(&p, text.as_bytes()),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
        Command::Attractors {
            map,
            depth,
            tol,
            json,
        } => {
            let params = load_params(&map)?;
            let tol = tol.unwrap_or(params.polygon().tolerance());
            let attractors = certification::enumerate_attractors(&params, depth, tol)?;
            emit_json(
                &AttractorsReport {
                    depth,
                    tol,
                    attractors: &attractors,
                },
                json.as_deref(),
            )
        }
        Command::Certify {
            map,
            max_depth,
            safety,
            json,
            strict,
        } => {
            let params = load_params(&map)?;
            let result = certification::certify(&params, max_depth, safety)?;
            emit_json(&result, json.as_deref())?;
            if strict && result.status == CertificationStatus::Inconclusive {
                return Err(Failure::Inconclusive(result.diagnostics));
            }
            Ok(())
        }
        Command::Basins {
            map,
            res,
            bbox,
            out,
            palette,
            max_depth,
            max_iter,
            tol,
            json,
        } => {
            let params = load_params(&map)?;
            let (width, height) = parse_resolution(&res)?;
            let bbox = match bbox {
                Some(text) => {
                    let v = parse_floats(&text, 4, "bbox")?;
                    BBox::new(v[0], v[1], v[2], v[3])?
                }
                None => BBox::around_trap(&params),
            };
            let palette_override = palette.map(|p| read_text(&p)).transpose()?;
            let cert = certification::certify(&params, max_depth, DEFAULT_SAFETY)?;
            if cert.status != CertificationStatus::Certified || cert.attractors.is_empty() {
                return Err(Failure::Inconclusive(format!(
                    "no certified attractors to color: {}",
                    cert.diagnostics
                )));
            }
            let raster = basins::render_basins(
                &params,
                &cert.attractors,
                bbox,
                width,
                height,
                max_iter,
                tol,
            )?;
            let palette = match palette_override {
                Some(text) => Palette::parse(&text)?,
                None => Palette::default_for(cert.attractors.len()),
            };
            write_bytes(&out, &basins::encode_ppm(&raster, &palette)?)?;
            if let Some(path) = json {
                emit_json(
                    &BasinsReport {
                        width,
                        height,
                        bbox,
                        certified_depth: cert.depth,
                        histogram: raster.histogram().into_iter().collect(),
                        attractors: cert.attractors,
                    },
                    Some(&path),
                )?;
            }
            Ok(())
        }
        Command::Itineraries {
            map,
            depth,
            three_symbol_cap,
            json,
        } => {
            let params = load_params(&map)?;
            let config = SubdivisionConfig::default();
            let counts = symbolic::itinerary_counts(&params, depth, params.trap(), config.clone())?;
            let three = symbolic::three_symbol_depth(&params, params.trap(), config, three_symbol_cap);
            emit_json(
                &ItinerariesReport {
                    counts,
                    three_symbol_depth: three,
                    three_symbol_cap,
                },
                json.as_deref(),
            )
        }
        Command::Singular {
            map,
            order,
            svg,
            json,
        } => {
            let params = load_params(&map)?;
            let trap = params.trap();
            let segments =
                symbolic::singular_set_order_n(&params, order, trap, SubdivisionConfig::default())?;
            write_bytes(
                &svg,
                formats::singular_svg(params.polygon(), &segments, trap.r).as_bytes(),
            )?;
            if let Some(path) = json {
                emit_json(&segments, Some(&path))?;
            }
            Ok(())
        }
        Command::Transversality { command } => run_transversality(command),
    }
}

fn run_transversality(command: TransversalityCommand) -> Outcome {
    match command {
        TransversalityCommand::Bounds { alpha, kmax, json } => {
            if !(alpha > 0.0) {
                return Err(Failure::Domain(format!("alpha must be positive, got {alpha}")));
            }
            let rows: Vec<BoundsRow> = (0..=kmax)
                .map(|k| {
                    let (lower, upper) = transversality::r_alpha_bounds(alpha, k);
                    BoundsRow { k, lower, upper }
                })
                .collect();
            emit_json(&rows, json.as_deref())
        }
        TransversalityCommand::Check {
            poly,
            delta,
            eps,
            interval,
            order,
            json,
        } => {
            let p = formats::parse_polynomial(&read_text(&poly)?)?;
            let iv = parse_floats(&interval, 2, "interval")?;
            let (a, b) = (iv[0], iv[1]);
            let bound = transversality::lojasiewicz_bound(&p, order, delta, eps, (a, b))?;
            let measure_grid = transversality::sublevel_measure(
                &p,
                eps,
                (a, b),
                MeasureMode::Grid(transversality::DEFAULT_GRID_SAMPLES),
            );
            let measure_roots = transversality::sublevel_measure(&p, eps, (a, b), MeasureMode::Roots);
            const GRID: usize = 10_000;
            let failures = (0..=GRID)
                .filter(|&i| {
                    let x = a + (b - a) * i as f64 / GRID as f64;
                    !transversality::check_hypothesis(&p, x, eps, delta, order)
                })
                .count();
            let within = measure_grid.max(measure_roots) <= bound.bound;
            emit_json(
                &CheckReport {
                    bound,
                    measure_grid,
                    measure_roots,
                    hypothesis_grid_points: GRID + 1,
                    hypothesis_failures: failures,
                    within_bound: within,
                    note: HYPOTHESIS_NOTE,
                },
                json.as_deref(),
            )?;
            if within {
                Ok(())
            } else {
                Err(Failure::Domain("measured sublevel set exceeds the bound".into()))
            }
        }
    }
}
