//! Hölder-exponent fit over a scanned exponent table.
//!
//! Pairs of scan rows with a statistically significant exponent difference
//! feed a log-log regression of `|ΔL|` against `|ΔE|`. The slope estimates
//! the Hölder exponent; the envelope constant is the fitted intercept
//! inflated by two residual standard deviations, so the reported bound
//! `|ΔL| ≤ C·|ΔE|^β` is expected to hold for the large majority of pairs
//! without being true by construction.

use serde::Serialize;

use super::lyapunov_scan::LyapunovTable;
use super::stats::linear_fit;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderFit {
    /// Fitted exponent.
    pub beta: f64,
    /// Envelope constant (intercept + 2 residual standard deviations).
    pub c: f64,
    pub r_squared: f64,
    pub pairs_used: usize,
    /// Fraction of the significant pairs satisfying `|ΔL| ≤ C·|ΔE|^β`.
    pub bound_fraction: f64,
}

impl HolderFit {
    pub fn to_csv(&self) -> String {
        format!(
            "beta,c,r_squared,pairs_used,bound_fraction\n{},{},{},{},{}\n",
            self.beta, self.c, self.r_squared, self.pairs_used, self.bound_fraction
        )
    }
}

/// Fits the exponent over all row pairs whose `|ΔL|` exceeds three combined
/// standard errors. Needs at least 10 rows and at least 10 significant
/// pairs.
pub fn holder_fit(table: &LyapunovTable) -> Result<HolderFit> {
    let rows = table.rows();
    if rows.len() < 10 {
        return Err(Error::InsufficientData(format!(
            "need at least 10 scan rows, got {}",
            rows.len()
        )));
    }
    let mut log_de = Vec::new();
    let mut log_dl = Vec::new();
    for i in 0..rows.len() {
        for j in 0..i {
            let dl = (rows[i].estimate - rows[j].estimate).abs();
            let de = (rows[i].energy - rows[j].energy).abs();
            let combined = (rows[i].stderr.powi(2) + rows[j].stderr.powi(2)).sqrt();
            if de > 0.0 && dl > 3.0 * combined && dl > 0.0 {
                log_de.push(de.ln());
                log_dl.push(dl.ln());
            }
        }
    }
    if log_de.len() < 10 {
        return Err(Error::InsufficientData(format!(
            "only {} significant pairs",
            log_de.len()
        )));
    }
    let fit = linear_fit(&log_de, &log_dl)?;
    let envelope_log = fit.intercept + 2.0 * fit.residual_sd;
    let within = log_de
        .iter()
        .zip(&log_dl)
        .filter(|(x, y)| **y <= envelope_log + fit.slope * **x)
        .count();
    Ok(HolderFit {
        beta: fit.slope,
        c: envelope_log.exp(),
        r_squared: fit.r_squared,
        pairs_used: log_de.len(),
        bound_fraction: within as f64 / log_de.len() as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::lyapunov_scan::{LyapunovRow, LyapunovTable};

    fn table_from_function(f: impl Fn(f64) -> f64, stderr: f64) -> LyapunovTable {
        let rows: Vec<LyapunovRow> = (0..20)
            .map(|i| {
                let energy = 1.0 + 3.0 * i as f64 / 19.0;
                LyapunovRow {
                    energy,
                    k: energy.sqrt(),
                    estimate: f(energy),
                    stderr,
                    n: 1000,
                    samples: 100,
                }
            })
            .collect();
        LyapunovTable::new(rows).unwrap()
    }

    #[test]
    fn smooth_function_fits_unit_exponent() {
        // L(E) = sqrt(E) on [1, 4] has bounded nonzero slope, so pair
        // differences scale linearly in |ΔE|.
        let t = table_from_function(|e| e.sqrt(), 0.0);
        let fit = holder_fit(&t).unwrap();
        assert!((fit.beta - 1.0).abs() < 0.1, "beta {}", fit.beta);
        assert!(fit.r_squared > 0.9);
        assert!(fit.bound_fraction >= 0.95);
    }

    #[test]
    fn constant_table_has_no_significant_pairs() {
        let t = table_from_function(|_| 0.25, 1e-3);
        assert!(matches!(
            holder_fit(&t),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn short_table_rejected() {
        let rows: Vec<LyapunovRow> = (0..5)
            .map(|i| LyapunovRow {
                energy: i as f64 + 1.0,
                k: 1.0,
                estimate: 0.1 * i as f64,
                stderr: 0.0,
                n: 10,
                samples: 10,
            })
            .collect();
        let t = LyapunovTable::new(rows).unwrap();
        assert!(holder_fit(&t).is_err());
    }

    #[test]
    fn envelope_holds_for_most_pairs_with_noise() {
        // A mildly noisy smooth profile still satisfies its own envelope.
        let t = table_from_function(|e| 0.15 + 0.05 * (3.0 * e).sin() + 0.1 * e.sqrt(), 1e-4);
        let fit = holder_fit(&t).unwrap();
        assert!(fit.bound_fraction >= 0.9, "fraction {}", fit.bound_fraction);
        assert!(fit.beta > 0.0);
    }
}
