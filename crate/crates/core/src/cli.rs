//! Command-line front end: `poly`, `roots`, `scan`, `closure` and `verify`.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;

use crate::analysis::{
    approximate_target_root, regions_for, scan_order, verify_local_vs_deleted, verify_root_free_intervals, AnalysisError,
    ClosureTarget, ScanOptions, MAX_LOCAL_CHECK_ORDER, MAX_SCAN_ORDER,
};
use crate::poly_core::Precision;
use crate::root_solver::{find_roots_with, RegionKind, SolverConfig, SolverError};
use crate::subtree_engine::{profile, EngineError};
use crate::tree_model::{parse_edge_list, FamilySpec, Tree, TreeError};

/// Default ceiling on scanned orders.
pub const DEFAULT_MAX_N: usize = 15;
/// Environment variable that raises the ceiling, up to the scan limit.
pub const MAX_N_ENV: &str = "SUBTREE_SPECTRA_MAX_N";

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;
pub const EXIT_NO_CONVERGENCE: i32 = 4;
pub const EXIT_VIOLATION: i32 = 5;
pub const EXIT_BUDGET: i32 = 6;
pub const EXIT_IO: i32 = 1;

#[derive(Debug, Parser)]
#[command(name = "subtree-spectra", version, about = "Subtree polynomials of trees and where their roots lie")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the subtree polynomial and the invariants it encodes.
    Poly(TreeSource),
    /// Print every root of the subtree polynomial as CSV.
    Roots(RootsArgs),
    /// Solve every free tree in a range of orders and test the root regions.
    Scan(ScanArgs),
    /// Find a spider with a real subtree root close to a target in (-2, -1).
    Closure(ClosureArgs),
    /// Check the real root-free intervals and the local-versus-deleted inequality.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct TreeSource {
    /// Named family: path:N, star:N or spider:A,B.
    #[arg(long, value_parser = parse_family)]
    pub family: Option<FamilySpec>,
    /// File with one edge `u v` per line (0-based); `#` starts a comment.
    #[arg(long, value_name = "FILE")]
    pub edges: Option<PathBuf>,
}

fn parse_family(s: &str) -> Result<FamilySpec, String> {
    let spec: FamilySpec = s.parse().map_err(|e: TreeError| e.to_string())?;
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PrecisionArg {
    Std,
    Ext,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::Std => Precision::Standard,
            PrecisionArg::Ext => Precision::Extended,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RegionArg {
    GlobalDisk,
    OrderDisk,
    Annulus,
    All,
}

#[derive(Debug, Args)]
pub struct RootsArgs {
    #[command(flatten)]
    pub source: TreeSource,
    #[arg(long, value_enum, default_value_t = PrecisionArg::Std)]
    pub precision: PrecisionArg,
    /// Write the CSV here instead of standard output.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, default_value_t = 2)]
    pub min_n: usize,
    #[arg(long, default_value_t = 10)]
    pub max_n: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "global-disk")]
    pub regions: Vec<RegionArg>,
    /// Output directory for `roots_nNN.csv`, `hits.csv` and `report.csv`.
    #[arg(long, value_name = "DIR", default_value = "scan_out")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = PrecisionArg::Std)]
    pub precision: PrecisionArg,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Write 0 in the seconds column so repeated runs are byte-identical.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Args)]
pub struct ClosureArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub target: f64,
    #[arg(long, default_value_t = 1e-2)]
    pub eps: f64,
    /// Largest spider order the search may try.
    #[arg(long, default_value_t = 1_000_000)]
    pub budget: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 2)]
    pub min_n: usize,
    #[arg(long, default_value_t = 10)]
    pub max_n: usize,
    /// Exact sample points on [-1, 0) and random points per vertex.
    #[arg(long, default_value_t = 16)]
    pub samples: usize,
    #[arg(long)]
    pub workers: Option<usize>,
}

/// A failure with its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new(EXIT_IO, e.to_string())
    }
}

impl From<TreeError> for CliError {
    fn from(e: TreeError) -> Self {
        CliError::new(EXIT_USAGE, e.to_string())
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Tree(t) => t.into(),
            other => CliError::new(EXIT_INVARIANT, other.to_string()),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        CliError::new(EXIT_NO_CONVERGENCE, e.to_string())
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        let code = match &e {
            AnalysisError::Solver { .. } | AnalysisError::SpiderSolver { .. } => EXIT_NO_CONVERGENCE,
            AnalysisError::CounterexampleFound { .. } => EXIT_VIOLATION,
            AnalysisError::BudgetExhausted { .. } => EXIT_BUDGET,
            AnalysisError::Engine(EngineError::Tree(_)) => EXIT_USAGE,
            AnalysisError::Engine(_) => EXIT_INVARIANT,
            AnalysisError::OrderOutOfRange { .. }
            | AnalysisError::InvalidParameters(_)
            | AnalysisError::Enum(_)
            | AnalysisError::Tree(_) => EXIT_USAGE,
        };
        CliError::new(code, e.to_string())
    }
}

/// Float format shared by every output: 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// The largest order a scan may request: 15, or the environment override
/// capped at 18.
pub fn scan_ceiling() -> Result<usize, CliError> {
    match std::env::var(MAX_N_ENV) {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .map_err(|_| CliError::new(EXIT_USAGE, format!("{MAX_N_ENV}={v:?} is not an order")))?;
            Ok(n.clamp(2, MAX_SCAN_ORDER))
        }
        Err(_) => Ok(DEFAULT_MAX_N),
    }
}

fn check_range(min_n: usize, max_n: usize) -> Result<(), CliError> {
    let ceiling = scan_ceiling()?;
    if min_n < 2 || min_n > max_n {
        return Err(CliError::new(EXIT_USAGE, format!("need 2 <= --min-n <= --max-n, got {min_n}..{max_n}")));
    }
    if max_n > ceiling {
        return Err(CliError::new(
            EXIT_USAGE,
            format!("--max-n {max_n} exceeds the ceiling {ceiling}; set {MAX_N_ENV} (at most {MAX_SCAN_ORDER}) to raise it"),
        ));
    }
    Ok(())
}

fn load_tree(source: &TreeSource) -> Result<Tree, CliError> {
    match (&source.family, &source.edges) {
        (Some(spec), None) => Ok(spec.build()?),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::new(EXIT_USAGE, format!("cannot read {}: {e}", path.display())))?;
            Ok(parse_edge_list(&text)?)
        }
        _ => Err(CliError::new(EXIT_USAGE, "give exactly one of --family or --edges")),
    }
}

const ROOT_HEADER: &str = "n,tree_id,re,im,modulus,residual\n";
const REPORT_HEADER: &str = "n,tree_count,max_modulus,argmax_tree_id,violations,boundary_hits,seconds\n";
const HITS_HEADER: &str = "n,tree_id,region,placement,re,im,distance_outside\n";

fn root_row(out: &mut String, n: usize, tree_id: usize, re: f64, im: f64, residual: f64) {
    let modulus = re.hypot(im);
    writeln!(
        out,
        "{n},{tree_id},{},{},{},{}",
        fmt_float(re),
        fmt_float(im),
        fmt_float(modulus),
        fmt_float(residual)
    )
    .expect("write to string");
}

fn cmd_poly(source: &TreeSource, out: &mut dyn Write) -> Result<(), CliError> {
    let tree = load_tree(source)?;
    let p = profile(&tree)?;
    let mean = p.mean_subtree_order.to_f64().unwrap_or(f64::NAN);
    writeln!(out, "{}", p.polynomial)?;
    writeln!(out, "order: {}", tree.order())?;
    writeln!(out, "subtree_count: {}", p.subtree_count)?;
    writeln!(out, "mean_subtree_order: {} ({mean})", p.mean_subtree_order)?;
    writeln!(out, "independence_number: {}", p.independence_number)?;
    Ok(())
}

fn cmd_roots(args: &RootsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let tree = load_tree(&args.source)?;
    let n = tree.order();
    let phi = crate::subtree_engine::subtree_polynomial(&tree);
    let config = SolverConfig {
        precision: args.precision.into(),
        ..SolverConfig::default()
    };
    let rs = find_roots_with(&phi, &config)?;
    let mut csv = String::from(ROOT_HEADER);
    // Zero roots are exact; list them with the others in (re, im) order.
    let mut rows: Vec<(f64, f64, f64)> = rs.roots.iter().zip(&rs.residuals).map(|(z, &r)| (z.re, z.im, r)).collect();
    rows.extend(std::iter::repeat_n((0.0, 0.0, 0.0), rs.zero_multiplicity));
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    for (re, im, residual) in rows {
        root_row(&mut csv, n, 0, re, im, residual);
    }
    match &args.out {
        Some(path) => write_atomic(path, csv.as_bytes())?,
        None => out.write_all(csv.as_bytes())?,
    }
    Ok(())
}

fn region_kinds(args: &[RegionArg]) -> Vec<RegionKind> {
    let mut kinds = Vec::new();
    for a in args {
        let add: &[RegionKind] = match a {
            RegionArg::GlobalDisk => &[RegionKind::DiskGlobal],
            RegionArg::OrderDisk => &[RegionKind::DiskOrderN],
            RegionArg::Annulus => &[RegionKind::AnnulusOrderN],
            RegionArg::All => &[RegionKind::DiskGlobal, RegionKind::DiskOrderN, RegionKind::AnnulusOrderN],
        };
        for k in add {
            if !kinds.contains(k) {
                kinds.push(*k);
            }
        }
    }
    kinds.sort();
    kinds
}

fn cmd_scan(args: &ScanArgs, out: &mut dyn Write) -> Result<(), CliError> {
    check_range(args.min_n, args.max_n)?;
    if args.workers == Some(0) {
        return Err(CliError::new(EXIT_USAGE, "--workers must be at least 1"));
    }
    let kinds = region_kinds(&args.regions);
    std::fs::create_dir_all(&args.out)?;
    let options = ScanOptions {
        precision: args.precision.into(),
        workers: args.workers,
        collect_roots: true,
    };
    let mut report_csv = String::from(REPORT_HEADER);
    let mut hits_csv = String::from(HITS_HEADER);
    let mut total_violations = 0;
    for n in args.min_n..=args.max_n {
        let started = Instant::now();
        let report = scan_order(n, &regions_for(n, &kinds), &options)?;
        let mut cloud = String::from(ROOT_HEADER);
        for row in &report.root_cloud {
            root_row(&mut cloud, n, row.tree.index, row.root.re, row.root.im, row.residual);
        }
        write_atomic(&args.out.join(format!("roots_n{n:02}.csv")), cloud.as_bytes())?;

        for (placement, hits) in [("boundary", &report.boundary_hits), ("violation", &report.violations)] {
            for h in hits {
                writeln!(
                    hits_csv,
                    "{n},{},{},{placement},{},{},{}",
                    h.tree.index,
                    h.region,
                    fmt_float(h.root.re),
                    fmt_float(h.root.im),
                    fmt_float(h.distance_outside)
                )
                .expect("write to string");
            }
        }
        let seconds = if args.no_timing { 0.0 } else { started.elapsed().as_secs_f64() };
        writeln!(
            report_csv,
            "{n},{},{},{},{},{},{}",
            report.tree_count,
            fmt_float(report.max_root_modulus),
            report.argmax_tree.map_or(String::new(), |t| t.index.to_string()),
            report.violations.len(),
            report.boundary_hits.len(),
            fmt_float(seconds)
        )
        .expect("write to string");
        writeln!(
            out,
            "n={n} trees={} max_modulus={} violations={} boundary_hits={}",
            report.tree_count,
            fmt_float(report.max_root_modulus),
            report.violations.len(),
            report.boundary_hits.len()
        )?;
        total_violations += report.violations.len();
    }
    write_atomic(&args.out.join("hits.csv"), hits_csv.as_bytes())?;
    write_atomic(&args.out.join("report.csv"), report_csv.as_bytes())?;
    if total_violations > 0 {
        return Err(CliError::new(
            EXIT_VIOLATION,
            format!("{total_violations} root(s) outside a region; see hits.csv"),
        ));
    }
    Ok(())
}

fn cmd_closure(args: &ClosureArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if !(args.target > -2.0 && args.target < -1.0) {
        return Err(CliError::new(EXIT_USAGE, format!("--target {} must lie in (-2, -1)", args.target)));
    }
    if !(args.eps > 0.0) {
        return Err(CliError::new(EXIT_USAGE, "--eps must be positive"));
    }
    let mut target = ClosureTarget::new(args.target, args.eps);
    target.order_budget = args.budget;
    let result = match approximate_target_root(target) {
        Ok(t) => t,
        Err(AnalysisError::BudgetExhausted { best: Some(w), best_distance, .. }) => {
            let (a, b) = w.legs();
            return Err(CliError::new(
                EXIT_BUDGET,
                format!(
                    "no witness within {} of {}; best: spider ({a}, {b}) of order {} with root {} (distance {})",
                    args.eps,
                    args.target,
                    w.order,
                    fmt_float(w.root),
                    fmt_float(best_distance)
                ),
            ));
        }
        Err(e) => return Err(e.into()),
    };
    let w = result.result.expect("success carries a witness");
    let (a, b) = w.legs();
    writeln!(out, "target: {}", args.target)?;
    writeln!(out, "epsilon: {}", args.eps)?;
    writeln!(out, "a: {a}")?;
    writeln!(out, "b: {b}")?;
    writeln!(out, "base_ratio: {}/{}", w.a, w.a + w.b)?;
    writeln!(out, "multiplier: {}", w.multiplier)?;
    writeln!(out, "order: {}", w.order)?;
    writeln!(out, "root: {}", fmt_float(w.root))?;
    writeln!(out, "distance: {}", fmt_float((w.root - args.target).abs()))?;
    match w.solver_distance {
        Some(d) => writeln!(out, "solver_check: {}", fmt_float(d))?,
        None => writeln!(out, "solver_check: skipped (order above 60)")?,
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    check_range(args.min_n, args.max_n)?;
    for n in args.min_n..=args.max_n {
        let intervals = verify_root_free_intervals(n, args.samples, args.workers)?;
        write!(
            out,
            "n={n} trees={} interval_checks=ok exact_checks={} real_roots_in_[-1-3^(1/3),-1)={}",
            intervals.tree_count, intervals.exact_checks, intervals.allowed_real_roots
        )?;
        if n <= MAX_LOCAL_CHECK_ORDER {
            let local = verify_local_vs_deleted(n, args.samples, 0)?;
            write!(
                out,
                " local_checks={} min_margin={}",
                local.comparisons,
                fmt_float(local.min_margin)
            )?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Poly(source) => cmd_poly(source, out),
        Command::Roots(args) => cmd_roots(args, out),
        Command::Scan(args) => cmd_scan(args, out),
        Command::Closure(args) => cmd_closure(args, out),
        Command::Verify(args) => cmd_verify(args, out),
    }
}

/// Parses `args`, runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    match run(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}
