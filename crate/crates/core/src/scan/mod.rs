//! Reproducible parameter scans persisted as JSON Lines.
//!
//! A [`ScanConfig`] fully determines a run. It expands into keyed tasks; each
//! finished task becomes one [`Record`] line carrying the config hash. With
//! `resume` set, tasks whose key is already present in the output file are
//! skipped. Wall times go to a sidecar `<out>.timing.jsonl` so the record
//! file itself is byte-identical across reruns.

pub mod checks;
mod export;
mod tasks;

use std::collections::HashSet;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::budget;
use crate::error::{Error, Result};
use crate::intersect::{IntersectOptions, Strategy, DEFAULT_ANGLE_TOL, DEFAULT_BLOCK_BYTES};
use crate::mps::DEFAULT_RANK_TOL;

pub use export::export_csv;

/// Artifact version stamped into every record.
pub const VERSION: &str = concat!(env!("CARGO_PKG_NAME"), "/", env!("CARGO_PKG_VERSION"));

/// `(D, d)` rows of the generic-MPS degeneracy table.
pub const TABLE_ROWS: [[usize; 2]; 9] = [[3, 4], [4, 5], [4, 6], [5, 6], [5, 7], [5, 8], [6, 7], [6, 8], [6, 9]];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskKind {
    Table,
    IntCheck,
    Fdet,
    Aklt,
    Weights,
    ExceptionalScan,
    Degenerate,
    PbcCheck,
    U1Check,
    Checks,
}

fn default_seeds() -> usize {
    3
}
fn default_ell() -> usize {
    2
}
fn default_l_max() -> usize {
    7
}
fn default_sites() -> usize {
    6
}
fn default_j_max() -> String {
    "5".into()
}
fn default_rank() -> usize {
    1
}
fn default_rank_tol() -> f64 {
    DEFAULT_RANK_TOL
}
fn default_angle_tol() -> f64 {
    DEFAULT_ANGLE_TOL
}
fn default_budget() -> u64 {
    budget::DEFAULT_LIMIT
}
fn default_block() -> u64 {
    DEFAULT_BLOCK_BYTES
}
fn default_jobs() -> usize {
    1
}

/// Everything that determines a scan. `out`, `resume` and `jobs` do not
/// affect the records and are excluded from the hash.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub task: TaskKind,
    /// `(D, d)` pairs; empty means the task's default set.
    #[serde(default)]
    pub rows: Vec<[usize; 2]>,
    /// Model specs such as `"j=3/2 J=2 Q=0"`.
    #[serde(default)]
    pub specs: Vec<String>,
    #[serde(default = "default_seeds")]
    pub seeds: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_ell")]
    pub ell: usize,
    #[serde(default = "default_l_max")]
    pub l_max: usize,
    #[serde(default = "default_sites")]
    pub sites: usize,
    #[serde(default = "default_j_max")]
    pub j_max: String,
    #[serde(default = "default_rank")]
    pub rank_x: usize,
    #[serde(default = "default_rank")]
    pub rank_y: usize,
    #[serde(default)]
    pub suite: Option<String>,
    #[serde(default = "default_rank_tol")]
    pub rank_tol: f64,
    #[serde(default = "default_angle_tol")]
    pub angle_tol: f64,
    #[serde(default = "default_budget")]
    pub memory_budget: u64,
    #[serde(default)]
    pub strategy: Strategy,
    #[serde(default = "default_block")]
    pub block_bytes: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub resume: bool,
    #[serde(default = "default_jobs", skip_serializing)]
    pub jobs: usize,
}

impl ScanConfig {
    pub fn new(task: TaskKind) -> Self {
        ScanConfig {
            task,
            rows: Vec::new(),
            specs: Vec::new(),
            seeds: default_seeds(),
            master_seed: 0,
            ell: default_ell(),
            l_max: default_l_max(),
            sites: default_sites(),
            j_max: default_j_max(),
            rank_x: 1,
            rank_y: 1,
            suite: None,
            rank_tol: DEFAULT_RANK_TOL,
            angle_tol: DEFAULT_ANGLE_TOL,
            memory_budget: budget::DEFAULT_LIMIT,
            strategy: Strategy::Auto,
            block_bytes: DEFAULT_BLOCK_BYTES,
            out: None,
            resume: false,
            jobs: 1,
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// SHA-256 of the canonical JSON form without `out`, `resume` and `jobs`.
    pub fn hash(&self) -> String {
        let mut canon = self.clone();
        canon.out = None;
        canon.resume = false;
        let bytes = serde_json::to_vec(&canon).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn options(&self) -> IntersectOptions {
        IntersectOptions { rank_tol: self.rank_tol, angle_tol: self.angle_tol, strategy: self.strategy, block_bytes: self.block_bytes }
    }
}

/// Task-local seed from the master seed and the task key.
pub fn derive_seed(master: u64, key: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(key.as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    /// Data record without a verdict.
    Ok,
    Pass,
    Borderline,
    Resource,
    Fail,
    Error,
}

impl Status {
    /// Process exit code for a run whose worst status is `self`.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok | Status::Pass => 0,
            Status::Fail | Status::Error => 1,
            Status::Borderline => 2,
            Status::Resource => 3,
        }
    }

    /// Failures outrank resource limits, which outrank borderline numerics.
    fn severity(self) -> u8 {
        match self {
            Status::Ok | Status::Pass => 0,
            Status::Borderline => 1,
            Status::Resource => 2,
            Status::Fail | Status::Error => 3,
        }
    }

    pub fn from_error(e: &Error) -> Self {
        if matches!(e, Error::Resource { .. }) {
            Status::Resource
        } else {
            Status::Error
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub key: String,
    pub task: TaskKind,
    pub config_hash: String,
    pub version: String,
    pub rank_tol: f64,
    pub angle_tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peak_memory: Option<u64>,
    pub data: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

/// Result of one task before it is stamped with the run metadata.
#[derive(Clone, Debug)]
pub(crate) struct TaskOutput {
    pub status: Status,
    pub peak_memory: Option<u64>,
    pub data: Value,
    pub message: Option<String>,
}

impl TaskOutput {
    pub fn new(status: Status, data: Value) -> Self {
        TaskOutput { status, peak_memory: None, data, message: None }
    }

    pub fn failed(e: &Error) -> Self {
        TaskOutput { status: Status::from_error(e), peak_memory: None, data: Value::Null, message: Some(e.to_string()) }
    }
}

/// One unit of work in a scan.
#[derive(Clone, Debug)]
pub(crate) struct Task {
    pub key: String,
    pub seed: Option<u64>,
    pub job: tasks::Job,
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub config_hash: String,
    /// All records of the run in file order, including resumed ones.
    pub records: Vec<Record>,
    /// Keys computed in this invocation.
    pub computed: Vec<String>,
}

impl RunSummary {
    pub fn worst_status(&self) -> Status {
        self.records.iter().map(|r| r.status).max_by_key(|s| s.severity()).unwrap_or(Status::Ok)
    }

    pub fn exit_code(&self) -> i32 {
        self.worst_status().exit_code()
    }
}

fn timing_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".timing.jsonl");
    PathBuf::from(s)
}

/// Reads the complete records of a previous run and rewrites the file
/// without any trailing partial line.
fn load_existing(path: &Path, hash: &str) -> Result<Vec<Record>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = fs::read_to_string(path)?;
    let mut records = Vec::new();
    let mut clean = String::new();
    for line in text.split_inclusive('\n') {
        if !line.ends_with('\n') {
            break;
        }
        let rec: Record = match serde_json::from_str(line.trim_end()) {
            Ok(r) => r,
            Err(_) => break,
        };
        if rec.config_hash != hash {
            return Err(Error::Config(format!(
                "{} holds records of a different configuration (hash {}); remove it or run without --resume",
                path.display(),
                rec.config_hash
            )));
        }
        clean.push_str(line);
        records.push(rec);
    }
    if clean.len() != text.len() {
        fs::write(path, &clean)?;
    }
    Ok(records)
}

/// Reads all records from a JSONL file.
pub fn read_records(path: &Path) -> Result<Vec<Record>> {
    let file = File::open(path)?;
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}

/// Expands the config, runs every task not yet recorded and appends the
/// records (and their wall times) to the output file if one is set.
pub fn run(config: &ScanConfig) -> Result<RunSummary> {
    let hash = config.hash();
    let plan = tasks::plan(config)?;
    let mut keys = HashSet::new();
    for t in &plan {
        if !keys.insert(t.key.as_str()) {
            return Err(Error::Config(format!("duplicate task key {}", t.key)));
        }
    }
    let mut records = Vec::new();
    let mut writers = None;
    if let Some(out) = &config.out {
        if config.resume {
            records = load_existing(out, &hash)?;
        } else {
            File::create(out)?;
            File::create(timing_path(out))?;
        }
        let main = OpenOptions::new().create(true).append(true).open(out)?;
        let timing = OpenOptions::new().create(true).append(true).open(timing_path(out))?;
        writers = Some((main, timing));
    }
    let done: HashSet<String> = records.iter().map(|r| r.key.clone()).collect();
    let todo: Vec<&Task> = plan.iter().filter(|t| !done.contains(&t.key)).collect();
    let mut computed = Vec::new();
    let prev_limit = budget::limit();
    budget::set_limit(config.memory_budget);
    let result = (|| -> Result<()> {
        for chunk in todo.chunks(config.jobs.max(1)) {
            let outputs: Vec<(TaskOutput, f64)> = if chunk.len() == 1 {
                vec![timed(config, chunk[0])]
            } else {
                std::thread::scope(|s| {
                    let handles: Vec<_> = chunk.iter().map(|t| s.spawn(move || timed(config, t))).collect();
                    handles.into_iter().map(|h| h.join().expect("task thread panicked")).collect()
                })
            };
            for (task, (out, secs)) in chunk.iter().zip(outputs) {
                let rec = Record {
                    key: task.key.clone(),
                    task: config.task,
                    config_hash: hash.clone(),
                    version: VERSION.into(),
                    rank_tol: config.rank_tol,
                    angle_tol: config.angle_tol,
                    seed: task.seed,
                    status: out.status,
                    peak_memory: out.peak_memory,
                    data: out.data,
                    message: out.message,
                };
                if let Some((main, timing)) = writers.as_mut() {
                    writeln!(main, "{}", serde_json::to_string(&rec)?)?;
                    main.flush()?;
                    writeln!(timing, "{}", serde_json::json!({ "key": rec.key, "wall_time": secs }))?;
                }
                computed.push(rec.key.clone());
                records.push(rec);
            }
        }
        Ok(())
    })();
    budget::set_limit(prev_limit);
    result?;
    Ok(RunSummary { config_hash: hash, records, computed })
}

fn timed(config: &ScanConfig, task: &Task) -> (TaskOutput, f64) {
    let started = Instant::now();
    let out = tasks::execute(config, task);
    (out, started.elapsed().as_secs_f64())
}
