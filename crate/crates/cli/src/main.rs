//! `radgap`: closed-form gap functions, finite-N approximants, background
//! statistics and the orchard picture from the command line.

mod output;
mod svg;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use radgap::closed_form::{self, OracleBounds};
use radgap::engine::{self, BackgroundOptions, BackgroundReport, ScanMode};
use radgap::orchard::{self, PointStatus};
use radgap::ratmod::farey_sequence;
use radgap::{ClosedFormQuery, Coefficient, Dd, Error, Intercept, OrchardScene, Rational, SequenceSpec, Window};
use serde::Serialize;

use output::{gap_table, Cell, Digits, Format, GapRow, Table};
use svg::{linear_ticks, Plot};

#[derive(Debug, Parser)]
#[command(name = "radgap", version, about = "Gaps in the fractional parts of radical sequences")]
struct Cli {
    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..=4096))]
    threads: Option<u64>,

    /// Significant digits for decimal output.
    #[arg(long, global = true, default_value_t = 17, value_parser = clap::value_parser!(u64).range(1..=32))]
    precision: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write to a file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Family {
    /// Root order α.
    #[arg(long, default_value_t = 2)]
    alpha: u32,
    /// Dilution modulus: radicands run over a·t + b.
    #[arg(long, default_value_t = 1)]
    a: u64,
    #[arg(long, default_value_t = 0)]
    b: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact limiting gap at a rational point.
    ClosedForm {
        #[arg(long)]
        x: Rational,
        #[command(flatten)]
        family: Family,
    },
    /// Scaled gaps at every Farey point up to a denominator bound.
    Profile {
        #[command(flatten)]
        family: Family,
        #[arg(long, value_parser = parse_count)]
        n: u64,
        #[arg(long, default_value_t = 8)]
        max_q: u64,
    },
    /// Scaled gaps at one point along a list of N.
    Converge {
        /// Rational point p/q.
        #[arg(long, required_unless_present = "real", conflicts_with = "real")]
        x: Option<Rational>,
        /// Real point, rounded to a dyadic rational.
        #[arg(long)]
        real: Option<f64>,
        #[command(flatten)]
        family: Family,
        /// Ascending comma-separated N values, e.g. 1e3,1e4,1e5.
        #[arg(long, value_delimiter = ',', required = true, value_parser = parse_count)]
        n: Vec<u64>,
    },
    /// Illuminated segments of a screen behind the integer lattice.
    Orchard(OrchardArgs),
    /// Histogram of scaled background gaps.
    Histogram {
        #[command(flatten)]
        family: Family,
        #[arg(long, value_parser = parse_count)]
        n: u64,
        #[arg(long, value_enum, default_value_t = Mode::Auto)]
        mode: Mode,
        /// Sample points for the sampled scan.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Largest N sorted in full; overrides the memory environment variable.
        #[arg(long, value_parser = parse_count)]
        max_sort_n: Option<u64>,
    },
    /// Smallest N at which a peak of relative height ε clears the background.
    EstimateN {
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 3)]
        alpha: u32,
    },
    /// Brute-force residue-set gap, next to the closed form.
    Oracle {
        /// One point; all Farey points up to --max-q when absent.
        #[arg(long)]
        x: Option<Rational>,
        #[command(flatten)]
        family: Family,
        #[arg(long, default_value_t = 8)]
        max_q: u64,
    },
}

#[derive(Debug, Args)]
struct OrchardArgs {
    /// Screen position, the analogue of √N.
    #[arg(long)]
    k_max: Option<u64>,
    #[arg(long, value_enum, default_value_t = InterceptKind::Parabolic)]
    intercept: InterceptKind,
    /// Linear intercept constant: p/q, integer, sqrt(n) or decimal.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    c1: Coefficient,
    /// Linear intercept slope correction.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    c2: Coefficient,
    #[arg(long, default_value_t = 1)]
    a: u64,
    #[arg(long, default_value_t = 0)]
    b: u64,
    #[arg(long, default_value_t = 0.0)]
    lo: f64,
    #[arg(long, default_value_t = 1.0)]
    hi: f64,
    /// Full scene as JSON, e.g. for a tabulated intercept.
    #[arg(long, conflicts_with_all = ["k_max", "intercept", "c1", "c2", "a", "b", "lo", "hi"])]
    scene: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    max_q: u64,
    /// List segments instead of comparing with the closed form.
    #[arg(long)]
    segments: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InterceptKind {
    Parabolic,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Auto,
    Full,
    Sampled,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Io(_) => 1,
            Failure::Lib(Error::Guard(_)) => 3,
            Failure::Lib(_) => 2,
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Accepts integers and integral scientific notation such as `1e6`.
fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(n) = s.trim().parse::<u64>() {
        return Ok(n);
    }
    let v: f64 = s.trim().parse().map_err(|_| format!("not a count: {s:?}"))?;
    if !(v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v < 1.8e19) {
        return Err(format!("not a non-negative integer: {s:?}"));
    }
    Ok(v as u64)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads as usize)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli).and_then(|text| emit(&cli, &text)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            report(&failure);
            ExitCode::from(failure.exit_code())
        }
    }
}

fn report(failure: &Failure) {
    match failure {
        Failure::Usage(msg) => eprintln!("usage error: {msg}"),
        Failure::Io(msg) => eprintln!("error: {msg}"),
        Failure::Lib(e) => {
            eprintln!("error: {e}");
            if let Error::SingularIntercept { rational_shadows } = e {
                let shown: Vec<String> = rational_shadows.iter().take(24).map(|r| r.to_string()).collect();
                let more = if rational_shadows.len() > shown.len() { ", ..." } else { "" };
                eprintln!("rational shadows: {}{more}", shown.join(", "));
            }
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Outcome<()> {
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Io(e.to_string()))
        }
    }
}

fn run(cli: &Cli) -> Outcome<String> {
    let digits = Digits(cli.precision as usize);
    let format = cli.format;
    let no_svg = |name: &str| {
        if format == Format::Svg {
            Err(Failure::Usage(format!("svg output is not available for {name}")))
        } else {
            Ok(())
        }
    };
    match &cli.command {
        Command::ClosedForm { x, family } => {
            no_svg("closed-form")?;
            closed_form_cmd(*x, family, digits, format)
        }
        Command::Profile { family, n, max_q } => profile_cmd(family, *n, *max_q, digits, format),
        Command::Converge { x, real, family, n } => converge_cmd(*x, *real, family, n, digits, format),
        Command::Orchard(args) => orchard_cmd(args, digits, format),
        Command::Histogram {
            family,
            n,
            mode,
            samples,
            max_sort_n,
        } => {
            let options = BackgroundOptions {
                mode: match mode {
                    Mode::Auto => None,
                    Mode::Full => Some(ScanMode::FullSort),
                    Mode::Sampled => Some(ScanMode::Sampled),
                },
                sample_budget: *samples,
                max_sort_n: *max_sort_n,
                ..BackgroundOptions::default()
            };
            histogram_cmd(family, *n, &options, digits, format)
        }
        Command::EstimateN { eps, alpha } => {
            no_svg("estimate-n")?;
            estimate_cmd(*eps, *alpha, digits, format)
        }
        Command::Oracle { x, family, max_q } => {
            no_svg("oracle")?;
            oracle_cmd(*x, family, *max_q, format)
        }
    }
}

fn render(table: &Table, format: Format) -> String {
    match format {
        Format::Json => table.to_json(),
        _ => table.to_csv(),
    }
}

fn limit(x: Rational, family: &Family) -> Option<Rational> {
    let query = ClosedFormQuery {
        x,
        alpha: family.alpha,
        a: family.a,
        b: family.b,
    };
    closed_form::evaluate(&query)
        .map(|v| v.value)
        .or_else(|_| closed_form::oracle_unreduced_gap(x, family.alpha, family.a, family.b, &OracleBounds::default()))
        .ok()
}

fn rational_cells(r: Rational) -> [Cell; 2] {
    [Cell::Int(r.numer() as i128), Cell::Int(r.denom() as i128)]
}

fn family_cells(family: &Family) -> [Cell; 3] {
    [
        Cell::Int(family.alpha as i128),
        Cell::Int(family.a as i128),
        Cell::Int(family.b as i128),
    ]
}

fn closed_form_cmd(x: Rational, family: &Family, digits: Digits, format: Format) -> Outcome<String> {
    let value = closed_form::evaluate(&ClosedFormQuery {
        x,
        alpha: family.alpha,
        a: family.a,
        b: family.b,
    })?;
    let mut table = Table::new(&[
        "x_num", "x_den", "alpha", "a", "b", "value_num", "value_den", "value", "d", "gap_factor", "path",
    ]);
    let mut row: Vec<Cell> = rational_cells(x).into();
    row.extend(family_cells(family));
    row.extend(rational_cells(value.value));
    row.push(digits.dd(to_dd(value.value)));
    row.push(Cell::Int(value.d as i128));
    row.push(Cell::Int(value.gap_factor as i128));
    row.push(Cell::Text(value.path.tag().to_string()));
    table.push(row);
    Ok(render(&table, format))
}

fn to_dd(r: Rational) -> Dd {
    Dd::from_u128(r.numer() as u128) / Dd::from_u128(r.denom() as u128)
}

fn profile_cmd(family: &Family, n: u64, max_q: u64, digits: Digits, format: Format) -> Outcome<String> {
    let spec = SequenceSpec::new(family.alpha, family.a, family.b, n)?;
    let points = engine::gap_profile(&spec, max_q)?;
    let rows: Vec<GapRow> = points
        .iter()
        .map(|p| GapRow {
            x: p.x,
            n,
            raw: Some(p.approximant.measurement.width),
            scaled: Some(p.approximant.scaled_width),
            closed_form: limit(p.x, family),
        })
        .collect();
    if format != Format::Svg {
        return Ok(render(&gap_table(&rows, digits), format));
    }
    let top = rows
        .iter()
        .flat_map(|r| [r.scaled.map(|s| s.to_f64()), r.closed_form.map(|c| c.to_f64())])
        .flatten()
        .fold(1.0f64, f64::max)
        * 1.1;
    let title = format!("scaled gap profile, alpha = {}, a = {}, b = {}, N = {n}", family.alpha, family.a, family.b);
    let mut plot = Plot::new(&title, "x", "scaled gap", (0.0, 1.0), (0.0, top));
    for q in 1..=max_q {
        plot.level(1.0 / q as f64, "guide");
        plot.level(2.0 / q as f64, "guide");
    }
    let mut slopes = vec![1.0, 2.0];
    if family.a > 1 {
        slopes.push(4.0);
    }
    for s in slopes {
        plot.line((0.0, 0.0), (1.0, s), "slope");
        plot.line((1.0, 0.0), (0.0, s), "slope");
    }
    for row in &rows {
        let x = row.x.to_f64();
        if let Some(s) = row.scaled {
            plot.stem(x, s.to_f64());
        }
        if let Some(c) = row.closed_form {
            plot.marker(x, c.to_f64(), "limit");
        }
    }
    Ok(plot.render(&linear_ticks((0.0, 1.0), 4), &linear_ticks((0.0, top), 5)))
}

fn converge_cmd(
    x: Option<Rational>,
    real: Option<f64>,
    family: &Family,
    schedule: &[u64],
    digits: Digits,
    format: Format,
) -> Outcome<String> {
    let first = *schedule.first().ok_or_else(|| Failure::Usage("--n needs at least one value".into()))?;
    let template = SequenceSpec::new(family.alpha, family.a, family.b, first)?;
    let series = match (x, real) {
        (Some(x), _) => engine::convergence_series(&template, x, schedule)?,
        (None, Some(r)) => engine::convergence_series_real(&template, r, schedule)?,
        (None, None) => return Err(Failure::Usage("give --x or --real".into())),
    };
    let rows: Vec<GapRow> = series
        .iter()
        .map(|s| {
            let center = s.measurement.center;
            GapRow {
                x: center,
                n: s.measurement.n_max,
                raw: Some(s.measurement.width),
                scaled: Some(s.scaled_width),
                closed_form: x.and_then(|x| limit(x, family)),
            }
        })
        .collect();
    if format != Format::Svg {
        return Ok(render(&gap_table(&rows, digits), format));
    }
    let log_n = |n: u64| (n as f64).log10();
    let x_range = (log_n(first), log_n(*schedule.last().unwrap_or(&first)).max(log_n(first) + 1.0));
    let cf = rows.first().and_then(|r| r.closed_form).map(|c| c.to_f64());
    let top = rows
        .iter()
        .filter_map(|r| r.scaled.map(|s| s.to_f64()))
        .chain(cf)
        .fold(0.0f64, f64::max)
        * 1.2;
    let top = if top > 0.0 { top } else { 1.0 };
    let label = match x {
        Some(x) => format!("x = {x}"),
        None => format!("x ≈ {}", real.unwrap_or_default()),
    };
    let mut plot = Plot::new(
        &format!("convergence at {label}, alpha = {}", family.alpha),
        "log10 N",
        "scaled gap",
        x_range,
        (0.0, top),
    );
    if let Some(c) = cf {
        plot.line((x_range.0, c), (x_range.1, c), "limit");
    }
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.scaled.map(|s| (log_n(r.n), s.to_f64())))
        .collect();
    plot.polyline(&points, "series");
    for &(px, py) in &points {
        plot.marker(px, py, "value");
    }
    Ok(plot.render(&linear_ticks(x_range, 4), &linear_ticks((0.0, top), 5)))
}

fn build_scene(args: &OrchardArgs) -> Outcome<OrchardScene> {
    if let Some(path) = &args.scene {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        return serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())));
    }
    let k_max = args
        .k_max
        .ok_or_else(|| Failure::Usage("--k-max is required unless --scene is given".into()))?;
    let scene = match args.intercept {
        InterceptKind::Parabolic => OrchardScene::parabolic(k_max),
        InterceptKind::Linear => OrchardScene::linear(k_max, args.c1, args.c2),
    };
    Ok(OrchardScene {
        window: Window { lo: args.lo, hi: args.hi },
        ..scene.with_dilution(args.a, args.b)
    })
}

fn orchard_cmd(args: &OrchardArgs, digits: Digits, format: Format) -> Outcome<String> {
    let scene = build_scene(args)?;
    let n = scene.k_max.saturating_mul(scene.k_max);
    if format == Format::Svg {
        return orchard_svg(&scene, args.max_q);
    }
    if args.segments {
        let segments = orchard::illumination_pattern(&scene)?;
        let mut table = Table::new(&[
            "x_lo", "x_hi", "raw_length", "scaled_length", "lower_k", "lower_m", "upper_k", "upper_m",
        ]);
        let ends = |s: Option<orchard::Shadow>| match s {
            Some(s) => [Cell::Int(s.k as i128), Cell::Int(s.m as i128)],
            None => [Cell::Empty, Cell::Empty],
        };
        for s in &segments {
            let mut row = vec![digits.dd(s.x_lo), digits.dd(s.x_hi), digits.dd(s.raw_length), digits.dd(s.scaled_length)];
            row.extend(ends(s.lower));
            row.extend(ends(s.upper));
            table.push(row);
        }
        return Ok(render(&table, format));
    }
    let comparison = orchard::compare_to_closed_form(&scene, args.max_q)?;
    let mut columns = output::GAP_COLUMNS.to_vec();
    columns.push("status");
    let mut table = Table::new(&columns);
    for c in &comparison {
        let row = GapRow {
            x: c.x,
            n,
            raw: c.raw_length,
            scaled: c.scaled_length,
            closed_form: Some(c.closed_form),
        };
        let mut cells = row.cells(digits);
        cells.push(Cell::Text(
            match c.status {
                PointStatus::Lit => "lit",
                PointStatus::Singular => "singular",
                PointStatus::Boundary => "boundary",
            }
            .to_string(),
        ));
        table.push(cells);
    }
    Ok(render(&table, format))
}

/// Segments drawn in an orchard plot; the longest are kept.
const SVG_SEGMENTS: usize = 5000;

fn orchard_svg(scene: &OrchardScene, max_q: u64) -> Outcome<String> {
    let mut segments = orchard::illumination_pattern(scene)?;
    if segments.len() > SVG_SEGMENTS {
        let mut order: Vec<usize> = (0..segments.len()).collect();
        order.sort_by(|&i, &j| {
            segments[j]
                .scaled_length
                .total_cmp(&segments[i].scaled_length)
                .then(i.cmp(&j))
        });
        order.truncate(SVG_SEGMENTS);
        order.sort_unstable();
        segments = order.into_iter().map(|i| segments[i]).collect();
    }
    let comparison = match scene.intercept {
        Intercept::Tabulated(_) => Vec::new(),
        _ => orchard::compare_to_closed_form(scene, max_q).unwrap_or_default(),
    };
    let top = segments
        .iter()
        .map(|s| s.scaled_length.to_f64())
        .chain(comparison.iter().map(|c| c.closed_form.to_f64()))
        .fold(1.0f64, f64::max)
        * 1.1;
    let x_range = (scene.window.lo, scene.window.hi);
    let mut plot = Plot::new(
        &format!("illumination at k_max = {}", scene.k_max),
        "screen x",
        "scaled segment length",
        x_range,
        (0.0, top),
    );
    for q in 1..=max_q {
        plot.level(1.0 / q as f64, "guide");
        plot.level(2.0 / q as f64, "guide");
    }
    for s in &segments {
        let y = s.scaled_length.to_f64();
        plot.line((s.x_lo.to_f64(), y), (s.x_hi.to_f64(), y), "segment");
    }
    for c in &comparison {
        plot.marker(c.x.to_f64(), c.closed_form.to_f64(), "limit");
    }
    Ok(plot.render(&linear_ticks(x_range, 4), &linear_ticks((0.0, top), 5)))
}

#[derive(Serialize)]
struct Summary<'a> {
    mode: &'a str,
    n_max: u64,
    scale: f64,
    count: u64,
    zero_widths: u64,
    mean_raw: f64,
    mean_scaled: f64,
    median_scaled: f64,
    p95_scaled: f64,
    power_law_slope: Option<f64>,
    exponential_rate: Option<f64>,
}

impl<'a> From<&'a BackgroundReport> for Summary<'a> {
    fn from(r: &'a BackgroundReport) -> Self {
        Summary {
            mode: match r.mode {
                ScanMode::FullSort => "full-sort",
                ScanMode::Sampled => "sampled",
            },
            n_max: r.n_max,
            scale: r.scale,
            count: r.count,
            zero_widths: r.zero_widths,
            mean_raw: r.mean_raw,
            mean_scaled: r.mean_scaled,
            median_scaled: r.median_scaled,
            p95_scaled: r.p95_scaled,
            power_law_slope: r.power_law_slope,
            exponential_rate: r.exponential_rate,
        }
    }
}

fn histogram_cmd(
    family: &Family,
    n: u64,
    options: &BackgroundOptions,
    digits: Digits,
    format: Format,
) -> Outcome<String> {
    let spec = SequenceSpec::new(family.alpha, family.a, family.b, n)?;
    let report = engine::background_scan(&spec, options)?;
    let summary = serde_json::to_string(&Summary::from(&report)).expect("summary serializes");
    let mut table = Table::new(&["bin_lo", "bin_hi", "count", "density"]);
    for bin in &report.bins {
        table.push(vec![
            digits.float(bin.lo),
            digits.float(bin.hi),
            Cell::Int(bin.count as i128),
            digits.float(bin.density),
        ]);
    }
    match format {
        Format::Csv => {
            eprintln!("{summary}");
            Ok(table.to_csv())
        }
        Format::Json => Ok(format!("{{\"summary\": {summary},\n\"bins\": {}}}\n", table.to_json().trim_end())),
        Format::Svg => {
            eprintln!("{summary}");
            Ok(histogram_svg(&report))
        }
    }
}

fn histogram_svg(report: &BackgroundReport) -> String {
    let bins: Vec<_> = report.bins.iter().filter(|b| b.count > 0 && b.density > 0.0).collect();
    let (Some(first), Some(last)) = (bins.first(), bins.last()) else {
        let plot = Plot::new("no gaps measured", "log10 scaled gap", "log10 density", (0.0, 1.0), (0.0, 1.0));
        return plot.render(&[], &[]);
    };
    let x_range = (first.lo.log10(), last.hi.log10());
    let (lo, hi) = bins.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), b| {
        let d = b.density.log10();
        (lo.min(d), hi.max(d))
    });
    let y_range = (lo.floor() - 0.5, hi.ceil() + 0.5);
    let mut plot = Plot::new(
        &format!("background gaps, N = {}", report.n_max),
        "log10 scaled gap",
        "log10 density",
        x_range,
        y_range,
    );
    for b in &bins {
        plot.bar(b.lo.log10(), b.hi.log10(), b.density.log10());
    }
    plot.render(&linear_ticks(x_range, 4), &linear_ticks(y_range, 5))
}

/// Thresholds quoted for ε = 1/3 and ε = 1/12 at cube roots, for comparison.
const REFERENCE_THRESHOLDS: [(f64, f64); 2] = [(1.0 / 3.0, 2e6), (1.0 / 12.0, 4e8)];

fn estimate_cmd(eps: f64, alpha: u32, digits: Digits, format: Format) -> Outcome<String> {
    let n = engine::min_n_estimate(eps, alpha)?;
    let residual = engine::min_n_residual(n, eps, alpha);
    let notes: Vec<String> = REFERENCE_THRESHOLDS
        .iter()
        .map(|(e, t)| format!("eps = {e:.4} -> {t:e}"))
        .collect();
    eprintln!("reference thresholds (alpha = 3): {}", notes.join(", "));
    let mut table = Table::new(&["eps", "alpha", "n_min", "residual"]);
    table.push(vec![
        digits.float(eps),
        Cell::Int(alpha as i128),
        digits.float(n),
        digits.float(residual),
    ]);
    Ok(render(&table, format))
}

fn oracle_cmd(x: Option<Rational>, family: &Family, max_q: u64, format: Format) -> Outcome<String> {
    let points = match x {
        Some(x) => vec![x],
        None => farey_sequence(max_q)?,
    };
    let mut table = Table::new(&[
        "x_num",
        "x_den",
        "alpha",
        "a",
        "b",
        "oracle_num",
        "oracle_den",
        "closed_form_num",
        "closed_form_den",
        "agree",
    ]);
    for x in points {
        let oracle = closed_form::oracle_unreduced_gap(x, family.alpha, family.a, family.b, &OracleBounds::default())?;
        let closed = closed_form::evaluate(&ClosedFormQuery {
            x,
            alpha: family.alpha,
            a: family.a,
            b: family.b,
        })
        .ok()
        .map(|v| v.value);
        let mut row: Vec<Cell> = rational_cells(x).into();
        row.extend(family_cells(family));
        row.extend(rational_cells(oracle));
        match closed {
            Some(c) => row.extend(rational_cells(c)),
            None => row.extend([Cell::Empty, Cell::Empty]),
        }
        row.push(match closed {
            Some(c) => Cell::Text((c == oracle).to_string()),
            None => Cell::Empty,
        });
        table.push(row);
    }
    Ok(render(&table, format))
}
