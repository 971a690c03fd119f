//! CSV views of a record set. The output depends only on the set of
//! records, not on their order.

use std::collections::{BTreeMap, BTreeSet};

use super::{Record, TaskKind};
use crate::error::{Error, Result};

/// Distinct dimensions per length and the seeds seen, for one `(D, d)` row.
type Row = (BTreeMap<usize, BTreeSet<usize>>, BTreeSet<u64>);

/// Table records are pivoted to one row per `(D, d)` and one column per
/// length `L`; a cell lists every distinct dimension seen across seeds.
/// Other records are listed as `key,status,data`.
pub fn export_csv(records: &[Record]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let table: Vec<&Record> = records.iter().filter(|r| r.task == TaskKind::Table).collect();
    if table.is_empty() {
        let mut rows: Vec<&Record> = records.iter().collect();
        rows.sort_by(|a, b| a.key.cmp(&b.key));
        w.write_record(["key", "status", "data"]).map_err(csv_err)?;
        for r in rows {
            let status = serde_json::to_value(r.status)?;
            w.write_record([r.key.as_str(), status.as_str().unwrap_or(""), &r.data.to_string()]).map_err(csv_err)?;
        }
    } else {
        let mut cells: BTreeMap<(usize, usize), Row> = BTreeMap::new();
        let mut lengths = BTreeSet::new();
        for r in table {
            let get = |k: &str| r.data.get(k).and_then(|v| v.as_u64()).map(|v| v as usize);
            let (Some(bond), Some(d)) = (get("D"), get("d")) else { continue };
            let entry = cells.entry((bond, d)).or_default();
            if let Some(seed) = r.seed {
                entry.1.insert(seed);
            }
            let dims = r.data.get("dims").and_then(|v| v.as_array()).cloned().unwrap_or_default();
            for pair in dims {
                let (Some(l), Some(k)) = (pair.get(0).and_then(|v| v.as_u64()), pair.get(1).and_then(|v| v.as_u64())) else { continue };
                lengths.insert(l as usize);
                entry.0.entry(l as usize).or_default().insert(k as usize);
            }
        }
        let mut header = vec!["D".to_string(), "d".to_string()];
        header.extend(lengths.iter().map(|l| format!("L={l}")));
        header.push("seeds".into());
        w.write_record(&header).map_err(csv_err)?;
        for ((bond, d), (by_len, seeds)) in &cells {
            let mut row = vec![bond.to_string(), d.to_string()];
            for l in &lengths {
                let cell = by_len.get(l).map(|s| s.iter().map(|k| k.to_string()).collect::<Vec<_>>().join("/")).unwrap_or_default();
                row.push(cell);
            }
            row.push(seeds.len().to_string());
            w.write_record(&row).map_err(csv_err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Config(e.to_string()))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Config(format!("csv: {e}"))
}
