//! `bendscale` command-line interface.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 parse error, 3 insufficient data,
//! 4 invalid arguments (including usage errors).

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bendscale::analysis::{self, AnalysisOptions};
use bendscale::bends::{self, BendDecomposition, BendMetric};
use bendscale::boxcount;
use bendscale::geometry::{self, Polyline};
use bendscale::headtail;
use bendscale::io::{self as gio, GeometryFormat};
use bendscale::json::to_json_string;
use bendscale::par::Execution;
use bendscale::plot::{self, PlotKind};
use bendscale::powerlaw;
use bendscale::{Error, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

#[derive(Debug, Parser)]
#[command(name = "bendscale", version, about = "Fractality of polylines through bends and head/tail breaks")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Seed of the bootstrap and of seeded generators.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Geometry format for input and output: geojson, wkt or csv.
    /// Defaults to the file extension, then GeoJSON.
    #[arg(long, global = true)]
    format: Option<GeometryFormat>,
    /// Print JSON instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true, default_value_t = headtail::DEFAULT_HEAD_LIMIT)]
    head_limit: f64,
    /// Bootstrap replicates of the power-law goodness of fit.
    #[arg(long, global = true, default_value_t = powerlaw::DEFAULT_REPLICATES)]
    replicates: usize,
    /// Reports with fewer positive bends are flagged as an insufficient sample.
    #[arg(long, global = true, default_value_t = analysis::DEFAULT_MIN_BENDS)]
    min_bends: usize,
    /// Bend size measure: offset or triangle-area.
    #[arg(long, global = true, default_value = "offset")]
    metric: BendMetric,
    /// Number of dyadic box sizes.
    #[arg(long, global = true, default_value_t = boxcount::DEFAULT_LEVELS)]
    box_levels: usize,
    /// Run on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,
}

impl Global {
    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    fn options(&self) -> AnalysisOptions {
        AnalysisOptions {
            head_limit: self.head_limit,
            replicates: self.replicates,
            box_levels: self.box_levels,
            metric: self.metric,
            min_bends: self.min_bends,
            execution: self.execution(),
        }
    }

    fn input_format(&self, path: &Path) -> GeometryFormat {
        self.format
            .or_else(|| GeometryFormat::from_path(path))
            .unwrap_or(GeometryFormat::GeoJson)
    }

    fn output_format(&self, output: Option<&Path>, fallback: GeometryFormat) -> GeometryFormat {
        self.format
            .or_else(|| output.and_then(GeometryFormat::from_path))
            .unwrap_or(fallback)
    }

    fn read_curve(&self, path: &Path) -> Result<Polyline> {
        gio::parse_geometry(path, self.input_format(path))
    }

    /// Bends with classes; every bend is class 1 when none has positive size.
    fn classified_bends(&self, curve: &Polyline) -> Result<BendDecomposition> {
        let mut d = bends::decompose_with(curve, self.metric, self.execution())?;
        let sizes = bends::bend_sizes(&d, true);
        if sizes.is_empty() {
            d.bends.iter_mut().for_each(|b| b.class = Some(1));
            d.ht_index = Some(1);
            return Ok(d);
        }
        bends::assign_classes(&d, &headtail::head_tail_breaks(&sizes, self.head_limit)?)
    }

    /// A plain number list, or the positive bend sizes of a curve.
    fn read_values(&self, path: &Path, curve: bool) -> Result<Vec<f64>> {
        if curve {
            let c = self.read_curve(path)?;
            let d = bends::decompose_with(&c, self.metric, self.execution())?;
            Ok(bends::bend_sizes(&d, true))
        } else {
            gio::read_numbers(path)
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a test curve or series.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
        /// Output file; stdout when omitted.
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Densify a curve with a cubic Bezier spline through its vertices.
    Smooth {
        input: PathBuf,
        /// Output vertices per input segment.
        #[arg(long, default_value_t = 6)]
        factor: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// List the bends of a curve.
    Bends {
        input: PathBuf,
        /// Include zero-size bends.
        #[arg(long)]
        all: bool,
    },
    /// Head/tail breaks of a number list.
    Ht {
        input: PathBuf,
        /// Treat the input as a curve and use its bend sizes.
        #[arg(long)]
        curve: bool,
    },
    /// Power-law fit with bootstrap goodness of fit.
    FitPowerlaw {
        input: PathBuf,
        /// Treat the input as a curve and use its bend sizes.
        #[arg(long)]
        curve: bool,
    },
    /// Box-counting dimension of a curve.
    Boxdim { input: PathBuf },
    /// Keep the bends of class `level` and above.
    Generalize {
        input: PathBuf,
        #[arg(long)]
        level: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Full report: bends, head/tail breaks, power law and box counting.
    Analyze {
        input: PathBuf,
        /// Identifier stored in the report; defaults to the file stem.
        #[arg(long)]
        id: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// CSV data for external plotting.
    PlotData {
        input: PathBuf,
        /// rank-size, ccdf-loglog, boxcount-loglog or classed-bends.
        #[arg(long)]
        kind: PlotKind,
        /// For rank-size and ccdf-loglog: the input is a number list, not a curve.
        #[arg(long)]
        values: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum GenKind {
    HalfCircle {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
    },
    HalfEllipse {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        /// The half below the major axis.
        #[arg(long)]
        lower: bool,
    },
    Spiral {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = geometry::GOLDEN_SPIRAL_GROWTH)]
        b: f64,
        /// Final polar angle in radians.
        #[arg(long, default_value_t = 6.0 * std::f64::consts::PI)]
        theta_max: f64,
    },
    Koch {
        #[arg(long)]
        iterations: u32,
    },
    /// The series 1, 1/2, ..., 1/n as a number list.
    Zipf {
        #[arg(long)]
        n: usize,
    },
    /// Seeded midpoint-displacement ring, a coastline-like test shape.
    MidpointRing {
        #[arg(long, default_value_t = 10)]
        levels: u32,
        #[arg(long, default_value_t = 0.25)]
        roughness: f64,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 4 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e.root() {
        Error::Parse { .. } => 2,
        Error::InsufficientData(_) => 3,
        Error::InvalidArgument(_) | Error::SizeLimit(_) => 4,
        Error::Io { .. } => 1,
        Error::Stage { .. } => unreachable!("root skips stage tags"),
    }
}

/// Writes to `path`, or to stdout when there is none.
fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| io_error(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(io_error(Path::new("<stdout>"), e)),
                _ => Ok(()),
            }
        }
    }
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn run(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Gen { kind, output } => gen(g, kind, output.as_deref()),
        Command::Smooth { input, factor, output } => {
            let curve = g.read_curve(input)?;
            let smooth = geometry::smooth_bezier(&curve, *factor)?;
            let fmt = g.output_format(output.as_deref(), g.input_format(input));
            emit(output.as_deref(), &gio::format_geometry(&smooth, fmt))
        }
        Command::Bends { input, all } => {
            let curve = g.read_curve(input)?;
            let d = g.classified_bends(&curve)?;
            let rows: Vec<_> = d.bends.iter().filter(|b| *all || b.size > 0.0).collect();
            if g.json {
                return emit(None, &to_json_string(&rows)?);
            }
            let mut s = String::from("id,start,apex,end,size,depth,parent,class\n");
            for b in rows {
                let parent = b.parent.map(|p| p.to_string()).unwrap_or_default();
                let class = b.class.map(|c| c.to_string()).unwrap_or_default();
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{}",
                    b.id,
                    d.vertex(b.start),
                    d.vertex(b.apex),
                    d.vertex(b.end),
                    b.size,
                    b.depth,
                    parent,
                    class
                );
            }
            emit(None, &s)
        }
        Command::Ht { input, curve } => {
            let values = g.read_values(input, *curve)?;
            let ht = headtail::head_tail_breaks(&values, g.head_limit)?;
            if g.json {
                return emit(None, &to_json_string(&ht)?);
            }
            let mut s = String::new();
            let _ = writeln!(s, "ht_index: {}", ht.ht_index);
            let _ = writeln!(s, "fractal: {}", ht.is_fractal());
            let _ = writeln!(s, "breaks: {}", join(&ht.breaks));
            let _ = writeln!(s, "class_counts: {}", join(&ht.class_counts));
            emit(None, &s)
        }
        Command::FitPowerlaw { input, curve } => {
            let values = g.read_values(input, *curve)?;
            let fit = powerlaw::fit_with(&values, g.replicates, g.seed, g.execution())?;
            if g.json {
                return emit(None, &to_json_string(&fit)?);
            }
            let mut s = String::new();
            let _ = writeln!(s, "alpha: {:.4}", fit.alpha);
            let _ = writeln!(s, "p: {:.3}", fit.p);
            let _ = writeln!(s, "xmin: {}", fit.xmin);
            let _ = writeln!(s, "ks: {:.4}", fit.ks);
            let _ = writeln!(s, "n_tail: {} of {}", fit.n_tail, fit.n);
            if fit.p_unstable {
                let _ = writeln!(s, "warning: only {} replicates; p is unstable", fit.replicates);
            }
            emit(None, &s)
        }
        Command::Boxdim { input } => {
            let curve = g.read_curve(input)?;
            let est = boxcount::box_dimension_with(&curve, g.box_levels, g.execution())?;
            if g.json {
                return emit(None, &to_json_string(&est)?);
            }
            let mut s = String::new();
            let _ = writeln!(s, "dimension: {:.4}", est.dimension);
            let _ = writeln!(s, "r2: {:.4}", est.r2);
            for l in &est.levels {
                let _ = writeln!(s, "box {} count {}", l.box_size, l.count);
            }
            emit(None, &s)
        }
        Command::Generalize { input, level, output } => {
            let curve = g.read_curve(input)?;
            let d = g.classified_bends(&curve)?;
            let out = bends::generalize(&curve, &d, *level)?;
            let fmt = g.output_format(output.as_deref(), g.input_format(input));
            emit(output.as_deref(), &gio::format_geometry(&out, fmt))
        }
        Command::Analyze { input, id, output } => {
            let curve = g.read_curve(input)?;
            let id = id.clone().unwrap_or_else(|| {
                input
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default()
            });
            let report = analysis::analyze(&curve, &id, g.seed, &g.options())?;
            if g.json || output.is_some() {
                return emit(output.as_deref(), &to_json_string(&report)?);
            }
            let opt = |v: Option<f64>, digits: usize| v.map_or("n/a".to_string(), |v| format!("{v:.digits$}"));
            let mut s = String::new();
            let _ = writeln!(s, "curve: {} ({} vertices, {})", report.curve_id, report.n_vertices,
                if report.closed { "closed" } else { "open" });
            let _ = writeln!(s, "bends: {} ({} zero-size excluded)", report.n_bends, report.n_zero_bends);
            let _ = writeln!(s, "ht_index: {}", report.ht_index);
            let _ = writeln!(s, "class_counts: {}", join(&report.class_counts));
            let _ = writeln!(s, "alpha: {}", opt(report.alpha, 4));
            let _ = writeln!(s, "p: {}", opt(report.p, 3));
            let _ = writeln!(s, "box_dimension: {:.4} (r2 {:.4})", report.box_dimension, report.r2);
            let _ = writeln!(s, "fractal (ht >= 3): {}", report.is_fractal_def3);
            for w in &report.warnings {
                let _ = writeln!(s, "warning: {w}");
            }
            emit(None, &s)
        }
        Command::PlotData { input, kind, values, output } => {
            let table = match kind {
                PlotKind::RankSize => plot::rank_size(&g.read_values(input, !values)?),
                PlotKind::CcdfLogLog => plot::ccdf(&g.read_values(input, !values)?),
                PlotKind::BoxcountLogLog => {
                    let curve = g.read_curve(input)?;
                    plot::boxcount(&boxcount::box_dimension_with(&curve, g.box_levels, g.execution())?)
                }
                PlotKind::ClassedBends => {
                    let curve = g.read_curve(input)?;
                    let d = g.classified_bends(&curve)?;
                    plot::classed_bends(&curve, &d)?
                }
            };
            emit(output.as_deref(), &table.to_csv())
        }
    }
}

fn gen(g: &Global, kind: &GenKind, output: Option<&Path>) -> Result<()> {
    let curve = match *kind {
        GenKind::HalfCircle { n, radius } => geometry::gen_half_circle(n, radius)?,
        GenKind::HalfEllipse { n, a, b, lower } => geometry::gen_half_ellipse(n, a, b, !lower)?,
        GenKind::Spiral { n, a, b, theta_max } => geometry::gen_log_spiral(n, a, b, theta_max)?,
        GenKind::Koch { iterations } => geometry::gen_koch(iterations)?,
        GenKind::MidpointRing { levels, roughness } => geometry::gen_midpoint_ring(levels, roughness, g.seed)?,
        GenKind::Zipf { n } => {
            if n == 0 {
                return Err(Error::InvalidArgument("zipf series needs n >= 1".into()));
            }
            let series = geometry::gen_zipf_series(n);
            let text = if g.json {
                to_json_string(&json!(series))?
            } else {
                series.iter().map(|v| format!("{v}\n")).collect()
            };
            return emit(output, &text);
        }
    };
    let fmt = g.output_format(output, GeometryFormat::GeoJson);
    emit(output, &gio::format_geometry(&curve, fmt))
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
}
