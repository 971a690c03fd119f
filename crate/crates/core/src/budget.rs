//! Process-wide memory budget for dense allocations.
//!
//! Every routine that allocates a matrix whose size grows like `d^L` asks the
//! budget first. Exceeding the limit is reported as [`Error::Resource`] with
//! the requested byte count instead of aborting the process.

use std::cell::Cell;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

/// Default limit: 4 GiB.
pub const DEFAULT_LIMIT: u64 = 4 << 30;

static LIMIT: AtomicU64 = AtomicU64::new(DEFAULT_LIMIT);

/// Bytes per complex double.
pub const C64_BYTES: u64 = 16;

thread_local! {
    static OVERRIDE: Cell<Option<u64>> = const { Cell::new(None) };
}

pub fn set_limit(bytes: u64) {
    LIMIT.store(bytes, Ordering::Relaxed);
}

/// The limit in force on the calling thread.
pub fn limit() -> u64 {
    OVERRIDE.with(Cell::get).unwrap_or_else(|| LIMIT.load(Ordering::Relaxed))
}

/// Runs `f` with a limit that applies to the current thread only.
pub fn with_limit<T>(bytes: u64, f: impl FnOnce() -> T) -> T {
    let prev = OVERRIDE.with(|o| o.replace(Some(bytes)));
    struct Restore(Option<u64>);
    impl Drop for Restore {
        fn drop(&mut self) {
            OVERRIDE.with(|o| o.set(self.0));
        }
    }
    let _restore = Restore(prev);
    f()
}

/// Parses sizes such as `4096`, `512M`, `8GiB` or `1.5G` (binary units).
pub fn parse_size(text: &str) -> Result<u64> {
    let t = text.trim();
    let split = t.find(|c: char| c.is_ascii_alphabetic()).unwrap_or(t.len());
    let (num, unit) = t.split_at(split);
    let shift = match unit.trim().to_ascii_lowercase().as_str() {
        "" | "b" => 0,
        "k" | "kb" | "kib" => 10,
        "m" | "mb" | "mib" => 20,
        "g" | "gb" | "gib" => 30,
        "t" | "tb" | "tib" => 40,
        _ => return Err(Error::Config(format!("unknown size unit in {text:?}"))),
    };
    let value: f64 = num.trim().parse().map_err(|_| Error::Config(format!("invalid size {text:?}")))?;
    if !value.is_finite() || value < 0.0 {
        return Err(Error::Config(format!("invalid size {text:?}")));
    }
    Ok((value * (1u64 << shift) as f64).round() as u64)
}

/// Checks that a working set of `bytes` fits into the budget.
pub fn check(bytes: u64) -> Result<()> {
    let limit = limit();
    if bytes > limit {
        return Err(Error::Resource { requested: bytes, limit });
    }
    Ok(())
}

/// Bytes needed for a dense complex `rows x cols` matrix, saturating.
pub fn complex_matrix_bytes(rows: usize, cols: usize) -> u64 {
    (rows as u64).saturating_mul(cols as u64).saturating_mul(C64_BYTES)
}

/// Checks a set of simultaneously live complex matrices.
pub fn check_matrices(shapes: &[(usize, usize)]) -> Result<u64> {
    let total = shapes.iter().fold(0u64, |acc, &(r, c)| acc.saturating_add(complex_matrix_bytes(r, c)));
    check(total)?;
    Ok(total)
}

/// `base^exp` as usize, or a resource error if it overflows.
pub fn checked_pow(base: usize, exp: usize) -> Result<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base).ok_or(Error::Resource { requested: u64::MAX, limit: limit() })?;
    }
    Ok(acc)
}
