use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mps_parent::budget;
use mps_parent::error::Result;
use mps_parent::intersect::Strategy;
use mps_parent::scan::{self, ScanConfig, TaskKind};

/// Parent Hamiltonians of matrix product states and the intersection property.
///
/// Exit codes: 0 pass, 1 failure, 2 borderline numerics, 3 memory budget exceeded.
#[derive(Parser)]
#[command(name = "mps-parent", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// dim I^ell_L for random tensors, one record per (D, d, seed).
    Table(Common),
    /// Int(ell, L-max) for random tensors or model specs.
    IntCheck(Common),
    /// Determinant witness f(A) at L-max compared with Int(ell, L-max).
    Fdet(Common),
    /// Injectivity length and intersection dimensions of models.
    Aklt(Common),
    /// Spin weights of the two-site parent term of models.
    Weights(Common),
    /// Models with a vanishing spin weight, for j up to --j-max.
    ExceptionalScan(Common),
    /// Tensors with a nontrivial solution of XA = AY.
    Degenerate(Common),
    /// Ground-space dimension of the periodic parent Hamiltonian on --N sites.
    PbcCheck(Common),
    /// Sector-blocked intersection of U(1)-symmetric models.
    U1Check(Common),
    /// Named check suite (--suite, default all).
    Checks(Common),
    /// Converts a JSONL record file to CSV on stdout.
    ExportCsv {
        /// JSONL file written by a previous run.
        input: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Load the configuration from a JSON file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Relative singular-value cutoff for ranks [default: 1e-10].
    #[arg(long)]
    rank_tol: Option<f64>,
    /// Principal-angle tolerance for intersections [default: 1e-8].
    #[arg(long)]
    angle_tol: Option<f64>,
    /// Master seed; each task derives its own stream from it [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Random instances per (D, d) row [default: 3].
    #[arg(long)]
    seeds: Option<usize>,
    /// Memory budget, e.g. 512M or 8GiB [default: 4GiB].
    #[arg(long, value_parser = parse_budget)]
    mem_budget: Option<u64>,
    /// Write records to this JSONL file (wall times go to FILE.timing.jsonl).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Keep the records already in --out and run only the missing tasks.
    #[arg(long)]
    resume: bool,
    /// Output printed on stdout.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Physical dimensions, paired with --D (a single value broadcasts).
    #[arg(long = "d", value_delimiter = ',')]
    phys: Vec<usize>,
    /// Bond dimensions, paired with --d (a single value broadcasts).
    #[arg(long = "D", value_delimiter = ',')]
    bond: Vec<usize>,
    /// Interaction length of the parent term [default: 2].
    #[arg(long)]
    ell: Option<usize>,
    /// Largest chain length [default: 7].
    #[arg(long = "L-max")]
    l_max: Option<usize>,
    /// Ring size for periodic checks [default: 6].
    #[arg(long = "N")]
    sites: Option<usize>,
    /// Model spec "j=.. J=.. Q=..", repeatable.
    #[arg(long)]
    spec: Vec<String>,
    /// Check suite name.
    #[arg(long)]
    suite: Option<String>,
    /// Largest j for the exceptional scan [default: 5].
    #[arg(long)]
    j_max: Option<String>,
    /// Rank of X for degenerate tensors [default: 1].
    #[arg(long)]
    rank_x: Option<usize>,
    /// Rank of Y for degenerate tensors [default: 1].
    #[arg(long)]
    rank_y: Option<usize>,
    /// Intersection algorithm [default: auto].
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,
    /// Tasks run concurrently; output does not depend on it [default: 1].
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Auto,
    Dense,
    Streamed,
}

fn parse_budget(s: &str) -> std::result::Result<u64, String> {
    budget::parse_size(s).map_err(|e| e.to_string())
}

fn pair_rows(bond: &[usize], phys: &[usize]) -> std::result::Result<Vec<[usize; 2]>, String> {
    match (bond.len(), phys.len()) {
        (0, 0) => Ok(Vec::new()),
        (1, n) if n > 0 => Ok(phys.iter().map(|&d| [bond[0], d]).collect()),
        (n, 1) if n > 0 => Ok(bond.iter().map(|&b| [b, phys[0]]).collect()),
        (a, b) if a == b => Ok(bond.iter().zip(phys).map(|(&b, &d)| [b, d]).collect()),
        _ => Err("--D and --d must have equal length, or one of them a single value".into()),
    }
}

fn build_config(task: TaskKind, c: &Common) -> std::result::Result<ScanConfig, String> {
    let mut cfg = match &c.config {
        Some(path) => ScanConfig::from_json_file(path).map_err(|e| e.to_string())?,
        None => ScanConfig::new(task),
    };
    cfg.task = task;
    let rows = pair_rows(&c.bond, &c.phys)?;
    if !rows.is_empty() {
        cfg.rows = rows;
    }
    if !c.spec.is_empty() {
        cfg.specs = c.spec.clone();
    }
    macro_rules! set {
        ($($field:ident <- $opt:expr),*) => { $(if let Some(v) = $opt.clone() { cfg.$field = v; })* };
    }
    set!(rank_tol <- c.rank_tol, angle_tol <- c.angle_tol, master_seed <- c.seed, seeds <- c.seeds,
         memory_budget <- c.mem_budget, ell <- c.ell, l_max <- c.l_max, sites <- c.sites, j_max <- c.j_max,
         rank_x <- c.rank_x, rank_y <- c.rank_y, jobs <- c.jobs);
    if c.suite.is_some() {
        cfg.suite = c.suite.clone();
    }
    if let Some(s) = c.strategy {
        cfg.strategy = match s {
            StrategyArg::Auto => Strategy::Auto,
            StrategyArg::Dense => Strategy::Dense,
            StrategyArg::Streamed => Strategy::Streamed,
        };
    }
    if c.out.is_some() {
        cfg.out = c.out.clone();
    }
    cfg.resume |= c.resume;
    Ok(cfg)
}

fn run_scan(cfg: &ScanConfig, format: Format) -> Result<i32> {
    let summary = scan::run(cfg)?;
    match format {
        Format::Json => {
            for r in &summary.records {
                println!("{}", serde_json::to_string(r)?);
            }
        }
        Format::Csv => print!("{}", scan::export_csv(&summary.records)?),
    }
    eprintln!("{} records ({} computed), worst status {:?}", summary.records.len(), summary.computed.len(), summary.worst_status());
    Ok(summary.exit_code())
}

fn main() -> ExitCode {
    faer::set_global_parallelism(faer::Par::Seq);
    let cli = Cli::parse();
    let (task, common) = match cli.command {
        Command::ExportCsv { input } => {
            return match scan::read_records(&input).and_then(|r| scan::export_csv(&r)) {
                Ok(csv) => {
                    print!("{csv}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            };
        }
        Command::Table(c) => (TaskKind::Table, c),
        Command::IntCheck(c) => (TaskKind::IntCheck, c),
        Command::Fdet(c) => (TaskKind::Fdet, c),
        Command::Aklt(c) => (TaskKind::Aklt, c),
        Command::Weights(c) => (TaskKind::Weights, c),
        Command::ExceptionalScan(c) => (TaskKind::ExceptionalScan, c),
        Command::Degenerate(c) => (TaskKind::Degenerate, c),
        Command::PbcCheck(c) => (TaskKind::PbcCheck, c),
        Command::U1Check(c) => (TaskKind::U1Check, c),
        Command::Checks(c) => (TaskKind::Checks, c),
    };
    let cfg = match build_config(task, &common) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match run_scan(&cfg, common.format) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(scan::Status::from_error(&e).exit_code() as u8)
        }
    }
}
