//! Configurable size caps. Values come from the environment so the CLI and tests share them.

use crate::error::{Error, Result};

pub const DEFAULT_MAX_N: u64 = 4096;
pub const DEFAULT_MAX_DENSE: u64 = 1_000_000;
pub const DEFAULT_MAX_SPARSE: u64 = 10_000_000;

fn env_or(name: &str, default: u64) -> u64 {
    std::env::var(name).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(default)
}

/// Largest admissible group order (QSYM_MAX_N).
pub fn max_n() -> u64 {
    env_or("QSYM_MAX_N", DEFAULT_MAX_N)
}

/// Largest admissible dense entry count (QSYM_MAX_DENSE).
pub fn max_dense() -> u64 {
    env_or("QSYM_MAX_DENSE", DEFAULT_MAX_DENSE)
}

/// Largest admissible nonzero count of a sparse tensor (QSYM_MAX_SPARSE).
pub fn max_sparse() -> u64 {
    env_or("QSYM_MAX_SPARSE", DEFAULT_MAX_SPARSE)
}

pub fn check_group_order(n: u64) -> Result<()> {
    let cap = max_n();
    if n > cap {
        return Err(Error::Guard(format!("group order {n} exceeds QSYM_MAX_N={cap}")));
    }
    Ok(())
}

pub fn check_dense(what: &str, entries: u64) -> Result<()> {
    let cap = max_dense();
    if entries > cap {
        return Err(Error::Guard(format!("{what} needs {entries} dense entries, QSYM_MAX_DENSE={cap}")));
    }
    Ok(())
}

pub fn check_sparse(what: &str, nonzeros: u64) -> Result<()> {
    let cap = max_sparse();
    if nonzeros > cap {
        return Err(Error::Guard(format!("{what} needs {nonzeros} nonzeros, QSYM_MAX_SPARSE={cap}")));
    }
    Ok(())
}

/// base^exp, failing with a guard error instead of overflowing.
pub fn checked_pow(what: &str, base: u64, exp: usize) -> Result<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc
            .checked_mul(base)
            .ok_or_else(|| Error::Guard(format!("{what}: {base}^{exp} overflows the index space")))?;
    }
    Ok(acc)
}
