//! End-to-end acceptance run. Prints one line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::time::Instant;

use mps_parent::scan::{self, Record, ScanConfig, Status, TaskKind};
use serde_json::Value;

type Verdict = Result<String, String>;

fn check(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn run(config: &ScanConfig) -> Result<Vec<Record>, String> {
    scan::run(config).map(|s| s.records).map_err(|e| e.to_string())
}

fn suite(name: &str) -> Result<BTreeMap<String, Record>, String> {
    let mut c = ScanConfig::new(TaskKind::Checks);
    c.suite = Some(name.into());
    let prefix = format!("checks/{name}/");
    Ok(run(&c)?.into_iter().map(|r| (r.key.strip_prefix(&prefix).unwrap_or(&r.key).to_string(), r)).collect())
}

fn passed(records: &BTreeMap<String, Record>) -> Result<(), String> {
    for (name, r) in records {
        check(r.status == Status::Pass, format!("{name}: {:?} {}", r.status, r.message.clone().unwrap_or_default()))?;
    }
    Ok(())
}

fn measured<'a>(records: &'a BTreeMap<String, Record>, name: &str) -> &'a Value {
    &records[name].data["measured"]
}

/// `(D, d)`, required `dim I²_L` for `L = 2, ...`, stretch values.
type TableRow = ((usize, usize), &'static [usize], &'static [usize]);

const TABLE: [TableRow; 9] = [
    ((3, 4), &[9, 9], &[]),
    ((4, 5), &[16, 35, 31, 16], &[]),
    ((4, 6), &[16, 16], &[]),
    ((5, 6), &[25, 84, 229, 450, 181], &[25]),
    ((5, 7), &[25, 25], &[]),
    ((5, 8), &[25, 25], &[]),
    ((6, 7), &[36, 161, 659], &[2520, 9073, 30751]),
    ((6, 8), &[36, 64, 36], &[]),
    ((6, 9), &[36, 36], &[]),
];

fn dims(r: &Record) -> Vec<usize> {
    r.data["dims"].as_array().unwrap().iter().map(|p| p[1].as_u64().unwrap() as usize).collect()
}

fn table() -> Verdict {
    let mut config = ScanConfig::new(TaskKind::Table);
    config.seeds = 3;
    config.l_max = 7;
    check(config.rank_tol == 1e-10 && config.angle_tol == 1e-8, "default tolerances changed")?;
    let records = run(&config)?;
    let mut stretch_notes = Vec::new();
    for ((bond, d), required, stretch) in TABLE {
        let rows: Vec<&Record> = records.iter().filter(|r| r.key.starts_with(&format!("table/D={bond}/d={d}/"))).collect();
        check(rows.len() == 3, format!("({bond},{d}): {} seeds", rows.len()))?;
        let mut reached = usize::MAX;
        for r in &rows {
            let got = dims(r);
            check(
                got.len() >= required.len(),
                format!("({bond},{d}) {}: only {:?} ({})", r.key, got, r.message.clone().unwrap_or_default()),
            )?;
            check(got[..required.len()] == *required, format!("({bond},{d}) {}: {:?} != {:?}", r.key, got, required))?;
            let extra = &got[required.len()..];
            check(extra.iter().zip(stretch).all(|(a, b)| a == b), format!("({bond},{d}) stretch mismatch {extra:?} vs {stretch:?}"))?;
            check(matches!(r.status, Status::Ok | Status::Resource), format!("({bond},{d}) {}: {:?}", r.key, r.status))?;
            reached = reached.min(extra.len());
        }
        if !stretch.is_empty() {
            let last = 1 + required.len() + reached;
            let missing = stretch.len() - reached;
            let why = rows.iter().find_map(|r| r.message.clone()).unwrap_or_default();
            stretch_notes.push(if missing == 0 {
                format!("({bond},{d}) stretch reached to L={last}")
            } else {
                format!("({bond},{d}) stretch reached to L={last}, L>{last} not attained: {why}")
            });
        }
    }
    Ok(format!("9 rows x 3 seeds agree; {}", stretch_notes.join("; ")))
}

fn aklt() -> Verdict {
    let s = suite("aklt")?;
    passed(&s)?;
    let dev = measured(&s, "h2-spin2-projector")["max_abs_deviation"].as_f64().unwrap();
    check(dev <= 1e-10, format!("projector deviation {dev}"))?;
    let pbc = measured(&s, "pbc-kernel-n6");
    check(pbc["kernel_dim"] == 1 && pbc["ti_state_residual"].as_f64().unwrap() < 1e-9, format!("pbc {pbc}"))?;
    check(measured(&s, "int-2-3")["dims"].as_array().unwrap().last().unwrap()[1] == 4, "Int(2,3)")?;
    Ok(format!(
        "h2 vs spin-2 projector {dev:.1e}; Int(2,3) true; N=6 ring kernel dim 1, residual {:.1e}",
        pbc["ti_state_residual"].as_f64().unwrap()
    ))
}

fn exceptional() -> Verdict {
    let s = suite("exceptional")?;
    let s2 = suite("exceptional-spin2")?;
    passed(&s)?;
    passed(&s2)?;
    check(measured(&s, "injectivity-length") == 4, "L0")?;
    let dims = measured(&s, "mps-space-dims");
    check(dims["S2"] == 11 && dims["S3"] == 15, format!("{dims}"))?;
    check(measured(&s, "pbc-kernel-n5")["kernel_dim"] == 1, "N=5 kernel")?;
    let lam = measured(&s2, "psd-threshold")["lambda_star"].as_f64().unwrap();
    check((lam - 60.0 / 53.0).abs() < 1e-6, format!("lambda* {lam}"))?;
    let found = measured(&s, "scan-j-le-5");
    Ok(format!("w2 zero, L0=4, S2=11, S3=15, I_N=S_N for N=4..6, ring N=5 dim 1, lambda*={lam:.9}, scan {found}, Int(2,4) for (3,5),(5,9)"))
}

fn eq5() -> Verdict {
    let s = suite("eq5")?;
    passed(&s)?;
    let rows = measured(&s, "generic-equality-L3").as_array().unwrap();
    let above = rows.iter().filter(|r| r["bound_above_D2"] == true).count();
    let bounds = measured(&s, "bound-never-violated").as_array().unwrap().len();
    Ok(format!(
        "bounds 35, 84; L=3 equality on {} instances ({above} with bound > D²); bound held at {bounds} (L, instance) points",
        rows.len()
    ))
}

fn fdet() -> Verdict {
    let s = suite("fdet")?;
    let mut n = 0;
    let mut borderline = Vec::new();
    for (name, r) in &s {
        check(matches!(r.status, Status::Pass | Status::Borderline), format!("{name}: {:?}", r.status))?;
        for inst in r.data["measured"].as_array().unwrap() {
            check(inst["f_zero"] != inst["int_holds"], format!("disagreement at {}", inst["instance"]))?;
            n += 1;
        }
        if r.status == Status::Borderline {
            borderline.push(name.clone());
        }
    }
    check(n >= 25, format!("only {n} instances"))?;
    let note =
        if borderline.is_empty() { String::new() } else { format!(" (threshold audit flagged borderline in {})", borderline.join(", ")) };
    Ok(format!("sign(f) agrees with Int on {n} instances{note}"))
}

fn oracle() -> Verdict {
    let s = suite("oracle")?;
    passed(&s)?;
    let worst = measured(&s, "engine-vs-brute-force")["max_angle"].as_f64().unwrap();
    Ok(format!("60 engine/brute-force comparisons, max angle {worst:.1e}; sector-blocked equals dense for AKLT at L=3,4"))
}

fn u1() -> Verdict {
    let start = Instant::now();
    let s = suite("u1")?;
    passed(&s)?;
    check(s.len() == 2, "expected two models")?;
    // the total bounds each model's runtime
    let secs = start.elapsed().as_secs_f64();
    check(secs < 1800.0, format!("suite took {secs:.0}s"))?;
    let dims: Vec<String> = s.iter().map(|(k, r)| format!("{k} {}", r.data["measured"]["dims"])).collect();
    Ok(format!("sector-blocked Int holds in {secs:.1}s total: {}", dims.join("; ")))
}

fn degenerate() -> Verdict {
    let s = suite("degenerate")?;
    passed(&s)?;
    let counts: Vec<String> = measured(&s, "witness-growth").as_array().unwrap().iter().map(|r| r["value"].to_string()).collect();
    Ok(format!("L0=2 on 5 families; witness ranks N=3..6 {}; H annihilates witnesses", counts.join(" ")))
}

fn reproducibility() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut bytes = Vec::new();
    for (k, jobs) in [1, 1, 2].into_iter().enumerate() {
        let mut c = ScanConfig::new(TaskKind::Checks);
        c.suite = Some("exceptional".into());
        c.jobs = jobs;
        c.out = Some(dir.path().join(format!("run{k}.jsonl")));
        scan::run(&c).map_err(|e| e.to_string())?;
        bytes.push(std::fs::read(c.out.as_ref().unwrap()).map_err(|e| e.to_string())?);
    }
    check(!bytes[0].is_empty() && bytes[0] == bytes[1], "rerun differs")?;
    check(bytes[0] == bytes[2], "output depends on worker count")?;
    Ok(format!("{} bytes identical across reruns and worker counts", bytes[0].len()))
}

fn main() {
    type Criterion = (&'static str, fn() -> Verdict);
    let criteria: [Criterion; 9] = [
        ("1 table reproduction", table),
        ("2 AKLT suite", aklt),
        ("3 exceptional suite", exceptional),
        ("4 parameter-count bound", eq5),
        ("5 determinant witness", fdet),
        ("6 oracle equivalence", oracle),
        ("7 U(1) suite", u1),
        ("8 degenerate families", degenerate),
        ("9 reproducibility", reproducibility),
    ];
    let mut failures = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let verdict = f();
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(msg) => println!("PASS criterion {name} [{secs:.1}s]: {msg}"),
            Err(msg) => {
                failures += 1;
                println!("FAIL criterion {name} [{secs:.1}s]: {msg}");
            }
        }
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
