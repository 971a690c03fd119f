//! Expansion of a scan config into keyed tasks, and their execution.

use serde_json::{json, Value};

use super::{checks, derive_seed, ScanConfig, Status, Task, TaskKind, TaskOutput, TABLE_ROWS};
use crate::error::{Error, Result};
use crate::intersect::{self, dim_lower_bound, IntersectionReport};
use crate::models::{self, AkltSpec};
use crate::mps::{self, Boundary, MpsTensor};
use crate::parent;
use crate::spinalg::HalfInt;

#[derive(Clone, Debug)]
pub(crate) enum Source {
    Random { d: usize, bond: usize, seed: u64 },
    Model(AkltSpec),
}

impl Source {
    fn tensor(&self) -> Result<MpsTensor> {
        match self {
            Source::Random { d, bond, seed } => mps::random_mps(*d, *bond, *seed),
            Source::Model(spec) => models::generalized_aklt(spec),
        }
    }

    fn describe(&self) -> String {
        match self {
            Source::Random { d, bond, seed } => format!("random d={d} D={bond} seed={seed}"),
            Source::Model(spec) => spec.to_string(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Job {
    Table { bond: usize, d: usize, seed_index: usize, seed: u64 },
    IntCheck(Source),
    Fdet(Source),
    Aklt(AkltSpec),
    Weights(AkltSpec),
    ExceptionalScan(HalfInt),
    Degenerate { bond: usize, d: usize, seed: u64 },
    PbcCheck(Source),
    U1Check(AkltSpec),
    Check { suite: String, name: String },
}

fn parse_specs(config: &ScanConfig, default: &[&str]) -> Result<Vec<AkltSpec>> {
    let list: Vec<String> = if config.specs.is_empty() { default.iter().map(|s| s.to_string()).collect() } else { config.specs.clone() };
    list.iter().map(|s| s.parse()).collect()
}

fn random_tasks(
    config: &ScanConfig,
    prefix: &str,
    default_rows: &[[usize; 2]],
    make: impl Fn(usize, usize, usize, u64) -> Job,
) -> Vec<Task> {
    let rows = if config.rows.is_empty() { default_rows.to_vec() } else { config.rows.clone() };
    let mut out = Vec::new();
    for [bond, d] in rows {
        for k in 0..config.seeds {
            let key = format!("{prefix}/D={bond}/d={d}/seed={k}");
            let seed = derive_seed(config.master_seed, &key);
            out.push(Task { job: make(bond, d, k, seed), key, seed: Some(seed) });
        }
    }
    out
}

fn source_tasks(config: &ScanConfig, prefix: &str, wrap: fn(Source) -> Job) -> Result<Vec<Task>> {
    if !config.specs.is_empty() {
        return Ok(parse_specs(config, &[])?
            .into_iter()
            .map(|s| Task { key: format!("{prefix}/{s}"), seed: None, job: wrap(Source::Model(s)) })
            .collect());
    }
    if config.rows.is_empty() {
        return Err(Error::Config(format!("{prefix} needs model specs or (D, d) rows")));
    }
    Ok(random_tasks(config, prefix, &[], |bond, d, _, seed| wrap(Source::Random { d, bond, seed })))
}

pub(crate) fn plan(config: &ScanConfig) -> Result<Vec<Task>> {
    let model_tasks = |prefix: &str, default: &[&str], wrap: fn(AkltSpec) -> Job| -> Result<Vec<Task>> {
        Ok(parse_specs(config, default)?.into_iter().map(|s| Task { key: format!("{prefix}/{s}"), seed: None, job: wrap(s) }).collect())
    };
    match config.task {
        TaskKind::Table => {
            Ok(random_tasks(config, "table", &TABLE_ROWS, |bond, d, seed_index, seed| Job::Table { bond, d, seed_index, seed }))
        }
        TaskKind::IntCheck => source_tasks(config, "int-check", Job::IntCheck),
        TaskKind::Fdet => source_tasks(config, "fdet", Job::Fdet),
        TaskKind::PbcCheck => source_tasks(config, "pbc-check", Job::PbcCheck),
        TaskKind::Aklt => model_tasks("aklt", &["j=1/2 J=1 Q=0"], Job::Aklt),
        TaskKind::Weights => model_tasks("weights", &["j=3/2 J=2 Q=0"], Job::Weights),
        TaskKind::U1Check => model_tasks("u1-check", &["j=7/2 J=5 Q=4", "j=4 J=6 Q=4"], Job::U1Check),
        TaskKind::ExceptionalScan => {
            let j_max: HalfInt = config.j_max.parse()?;
            Ok(vec![Task { key: format!("exceptional-scan/j_max={j_max}"), seed: None, job: Job::ExceptionalScan(j_max) }])
        }
        TaskKind::Degenerate => Ok(random_tasks(config, "degenerate", &[[3, 4]], |bond, d, _, seed| Job::Degenerate { bond, d, seed })),
        TaskKind::Checks => {
            let suite = config.suite.clone().unwrap_or_else(|| "all".into());
            Ok(checks::suite_checks(&suite)?
                .into_iter()
                .map(|(suite, name)| Task { key: format!("checks/{suite}/{name}"), seed: None, job: Job::Check { suite, name } })
                .collect())
        }
    }
}

/// Report as JSON without the wall time, which lives in the sidecar file.
pub(crate) fn report_value(r: &IntersectionReport) -> Value {
    let mut v = serde_json::to_value(r).expect("report serializes");
    if let Some(obj) = v.as_object_mut() {
        obj.remove("wall_time");
    }
    v
}

pub(crate) fn execute(config: &ScanConfig, task: &Task) -> TaskOutput {
    let result = match &task.job {
        Job::Check { suite, name } => return checks::run_check(config, suite, name),
        Job::Table { bond, d, seed_index, seed } => table(config, *bond, *d, *seed_index, *seed),
        Job::IntCheck(src) => int_check(config, src),
        Job::Fdet(src) => fdet(config, src),
        Job::Aklt(spec) => aklt(config, spec),
        Job::Weights(spec) => {
            models::weight_vector(spec).map(|w| TaskOutput::new(Status::Ok, json!({ "spec": spec.to_string(), "weights": w })))
        }
        Job::ExceptionalScan(j_max) => {
            models::find_exceptional(*j_max).map(|v| TaskOutput::new(Status::Ok, json!({ "j_max": j_max, "exceptional": v })))
        }
        Job::Degenerate { bond, d, seed } => degenerate(config, *bond, *d, *seed),
        Job::PbcCheck(src) => pbc_check(config, src),
        Job::U1Check(spec) => u1_check(config, spec),
    };
    result.unwrap_or_else(|e| TaskOutput::failed(&e))
}

fn table(config: &ScanConfig, bond: usize, d: usize, seed_index: usize, seed: u64) -> Result<TaskOutput> {
    let a = mps::random_mps(d, bond, seed)?;
    let (mut report, err) = intersect::intersection_scan(&a, config.ell, config.l_max, true, &config.options())?;
    report.descriptor = Source::Random { d, bond, seed }.describe();
    let bounds: Vec<(usize, i128)> =
        report.dims.iter().map(|&(l, _)| Ok((l, dim_lower_bound(d, bond, config.ell, l)?))).collect::<Result<_>>()?;
    let violated = report.dims.iter().zip(&bounds).any(|(&(_, k), &(_, b))| (k as i128) < b);
    let mut data = report_value(&report);
    data["seed_index"] = json!(seed_index);
    data["lower_bounds"] = json!(bounds);
    let status = match &err {
        Some(e) => Status::from_error(e),
        None if violated || !report.sanity_violations().is_empty() => Status::Fail,
        None if report.borderline => Status::Borderline,
        None => Status::Ok,
    };
    Ok(TaskOutput { status, peak_memory: Some(report.peak_memory), data, message: err.map(|e| e.to_string()) })
}

fn int_check(config: &ScanConfig, src: &Source) -> Result<TaskOutput> {
    let a = src.tensor()?;
    let (mut report, err) = intersect::intersection_scan(&a, config.ell, config.l_max, false, &config.options())?;
    report.descriptor = src.describe();
    let holds = err.is_none().then(|| report.holds_at(config.l_max)).flatten();
    let mut data = report_value(&report);
    data["int_holds"] = json!(holds);
    let status = match &err {
        Some(e) => Status::from_error(e),
        None if report.borderline => Status::Borderline,
        None => Status::Ok,
    };
    Ok(TaskOutput { status, peak_memory: Some(report.peak_memory), data, message: err.map(|e| e.to_string()) })
}

fn fdet(config: &ScanConfig, src: &Source) -> Result<TaskOutput> {
    let a = src.tensor()?;
    let w = parent::f_det(&a, config.ell, config.l_max, config.rank_tol)?;
    let (space, report) = intersect::intersection_space(&a, config.ell, config.l_max, &config.options())?;
    let holds = space.dim() == a.bond_dim() * a.bond_dim();
    let agree = holds == !w.zero;
    let status = if !agree {
        Status::Fail
    } else if report.borderline {
        Status::Borderline
    } else {
        Status::Pass
    };
    Ok(TaskOutput::new(
        status,
        json!({ "source": src.describe(), "ell": config.ell, "L": config.l_max, "f_det": w, "int_holds": holds, "agree": agree }),
    ))
}

fn aklt(config: &ScanConfig, spec: &AkltSpec) -> Result<TaskOutput> {
    let a = models::generalized_aklt(spec)?;
    let l0 = mps::injectivity_length(&a, config.l_max, config.rank_tol)?;
    let (mut report, err) = intersect::intersection_scan(&a, config.ell, config.l_max, true, &config.options())?;
    report.descriptor = spec.to_string();
    let weights = if spec.q == HalfInt::ZERO { Some(models::weight_vector(spec)?) } else { None };
    let data = json!({
        "spec": spec.to_string(),
        "d": spec.phys_dim(),
        "D": spec.bond_dim(),
        "injectivity_length": l0,
        "intersection": report_value(&report),
        "weights": weights,
    });
    let status = match &err {
        Some(e) => Status::from_error(e),
        None if report.borderline => Status::Borderline,
        None => Status::Ok,
    };
    Ok(TaskOutput { status, peak_memory: Some(report.peak_memory), data, message: err.map(|e| e.to_string()) })
}

fn degenerate(config: &ScanConfig, bond: usize, d: usize, seed: u64) -> Result<TaskOutput> {
    let fam = models::degenerate_family(d, bond, config.rank_x, config.rank_y, seed)?;
    let l0 = mps::injectivity_length(&fam.tensor, 4, config.rank_tol)?;
    let holds = intersect::int_holds(&fam.tensor, 2, 3, &config.options())?;
    let witnesses: Vec<Value> = fam
        .witnesses
        .iter()
        .map(|w| json!({ "N": w.sites, "count": w.states.len(), "rank": w.rank, "max_residual": w.max_residual }))
        .collect();
    let ranks: Vec<usize> = fam.witnesses.iter().map(|w| w.rank).collect();
    let growth = ranks.windows(3).all(|w| w[2] > w[0]);
    let annihilated = fam.witnesses.iter().all(|w| w.max_residual < 1e-9);
    let pass = l0 == Some(2) && growth && annihilated && !holds;
    Ok(TaskOutput::new(
        if pass { Status::Pass } else { Status::Fail },
        json!({
            "d": d, "D": bond, "rank_x": config.rank_x, "rank_y": config.rank_y,
            "solution_dim": fam.solution_dim, "attempts": fam.attempts,
            "injectivity_length": l0, "int_2_3": holds, "witnesses": witnesses,
        }),
    ))
}

fn pbc_check(config: &ScanConfig, src: &Source) -> Result<TaskOutput> {
    let a = src.tensor()?;
    let term = parent::parent_term(&a, config.ell, config.rank_tol)?;
    let k = parent::pbc_kernel(&term, config.sites, &config.options())?;
    let psi = mps::state_vector(&a, config.sites, &Boundary::Periodic)?;
    let residual = k.residual(&psi);
    let status = if k.is_borderline() { Status::Borderline } else { Status::Ok };
    Ok(TaskOutput::new(
        status,
        json!({ "source": src.describe(), "ell": config.ell, "N": config.sites, "kernel_dim": k.dim(), "ti_state_residual": residual }),
    ))
}

fn u1_check(config: &ScanConfig, spec: &AkltSpec) -> Result<TaskOutput> {
    let a = models::generalized_aklt(spec)?;
    let (q, b) = spec.u1_charges();
    let target = a.bond_dim() * a.bond_dim();
    let mut last = None;
    for l in config.ell + 1..=config.l_max {
        let (_, mut report) = intersect::sector_blocked_intersection(&a, &q, &b, config.ell, l, &config.options())?;
        report.descriptor = spec.to_string();
        let reached = report.dims.last().is_some_and(|&(_, k)| k == target);
        last = Some(report);
        if reached {
            break;
        }
    }
    let report = last.ok_or_else(|| Error::Config("u1-check needs L-max > ℓ".into()))?;
    let status = if report.borderline { Status::Borderline } else { Status::Ok };
    Ok(TaskOutput { status, peak_memory: Some(report.peak_memory), data: report_value(&report), message: None })
}
