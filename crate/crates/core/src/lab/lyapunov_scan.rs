//! Lyapunov exponent scans over an energy grid.

use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use crate::cocycle::lyapunov_with;
use crate::rng::derive_seed;
use crate::{Error, Result};

/// One scanned grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovRow {
    pub energy: f64,
    pub k: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub n: usize,
    pub samples: usize,
}

/// Scan results, sorted by energy.
#[derive(Debug, Clone, Serialize)]
pub struct LyapunovTable {
    rows: Vec<LyapunovRow>,
}

impl LyapunovTable {
    pub fn new(mut rows: Vec<LyapunovRow>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.estimate < -1e-9) {
            return Err(Error::InvalidInput(format!(
                "negative growth estimate {} at energy {}",
                bad.estimate, bad.energy
            )));
        }
        rows.sort_by(|a, b| a.energy.total_cmp(&b.energy));
        Ok(LyapunovTable { rows })
    }

    pub fn rows(&self) -> &[LyapunovRow] {
        &self.rows
    }

    /// CSV data section: comma separators, header row, LF endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("energy,k,estimate,stderr,n,samples\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.energy, r.k, r.estimate, r.stderr, r.n, r.samples
            ));
        }
        out
    }
}

/// One Lyapunov estimate per grid energy; grid point `i` runs on the seed
/// stream derived from `(seed, i)`, so the table is reproducible and
/// insensitive to thread count.
pub fn scan_lyapunov(cfg: &ExperimentConfig) -> Result<LyapunovTable> {
    let rows: Result<Vec<LyapunovRow>> = cfg
        .energy_grid()
        .par_iter()
        .enumerate()
        .map(|(i, en)| {
            let est = lyapunov_with(
                cfg.source(),
                en,
                cfg.n(),
                cfg.samples(),
                derive_seed(cfg.seed(), i as u64),
            )?;
            Ok(LyapunovRow {
                energy: en.energy(),
                k: en.k(),
                estimate: est.estimate,
                stderr: est.stderr,
                n: cfg.n(),
                samples: cfg.samples(),
            })
        })
        .collect();
    LyapunovTable::new(rows?)
}

/// Grid energies whose estimate is indistinguishable from zero:
/// `estimate < max(threshold, 3·stderr)`. Candidates only — never
/// interpolated, never certified.
pub fn find_zero_candidates(table: &LyapunovTable, threshold: f64) -> Result<Vec<f64>> {
    if threshold <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "threshold must be positive, got {threshold}"
        )));
    }
    Ok(table
        .rows()
        .iter()
        .filter(|r| r.estimate < threshold.max(3.0 * r.stderr))
        .map(|r| r.energy)
        .collect())
}
