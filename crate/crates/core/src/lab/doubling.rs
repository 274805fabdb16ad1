//! Finite-size convergence of the growth exponent under window doubling.
//!
//! With `L̂_n` the Monte-Carlo mean of `(1/n)·ln‖A_n‖` and `L̂` a reference
//! at a much longer window, the combination `|L̂ + L̂_n − 2·L̂_{2n}|` decays
//! rapidly in `n`. Each sample draws one window covering `[-1, 2n]` and
//! reads both prefix growth rates from a single product pass, so the two
//! estimates share their disorder and the combination's noise stays small.

use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::stats::mean_and_stderr;
use crate::cocycle::{lyapunov_with, one_step, WordSampler};
use crate::energy::EnergyTriple;
use crate::rng::derive_seed;
use crate::sl2::LogNormProduct;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DoublingRow {
    pub n: usize,
    pub l_n: f64,
    pub l_2n: f64,
    pub combination: f64,
    pub combination_se: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DoublingResult {
    pub energy: f64,
    pub k: f64,
    pub reference_l: f64,
    pub reference_se: f64,
    pub reference_n: usize,
    pub rows: Vec<DoublingRow>,
}

impl DoublingResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,l_n,l_2n,combination,combination_se\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.n, r.l_n, r.l_2n, r.combination, r.combination_se
            ));
        }
        out
    }
}

/// Doubling table at one energy. The reference runs at the configured `n`,
/// which must dominate `2·max(n_list)`; larger requests are rejected.
pub fn lyapunov_doubling(
    cfg: &ExperimentConfig,
    en: &EnergyTriple,
    n_list: &[usize],
) -> Result<DoublingResult> {
    if n_list.is_empty() || n_list.iter().any(|&n| n == 0) {
        return Err(Error::InvalidInput("window lengths must be positive".into()));
    }
    let max_n = *n_list.iter().max().expect("non-empty");
    if 2 * max_n > cfg.n() {
        return Err(Error::InvalidInput(format!(
            "doubled window {} exceeds the reference length {}",
            2 * max_n,
            cfg.n()
        )));
    }
    en.check_k_margin(cfg.k_margin())?;
    let reference =
        lyapunov_with(cfg.source(), en, cfg.n(), cfg.samples(), derive_seed(cfg.seed(), 0))?;

    let rows: Result<Vec<DoublingRow>> = n_list
        .iter()
        .enumerate()
        .map(|(idx, &n)| {
            let stream = derive_seed(cfg.seed(), 1 + idx as u64);
            // Per sample: (g_n, g_2n) from one shared window.
            let pairs: Result<Vec<(f64, f64)>> = (0..cfg.samples())
                .into_par_iter()
                .map(|s| {
                    let word =
                        cfg.source()
                            .sample_window(derive_seed(stream, s as u64), 1, 2 * n);
                    let mut p = LogNormProduct::identity();
                    let mut g_n = 0.0;
                    for j in 0..(2 * n) as i64 {
                        p.push_left(&one_step(word.letter(j)?, word.letter(j - 1)?, en)?);
                        if j + 1 == n as i64 {
                            g_n = p.log_norm() / n as f64;
                        }
                    }
                    Ok((g_n, p.log_norm() / (2 * n) as f64))
                })
                .collect();
            let pairs = pairs?;
            let (l_n, _) = mean_and_stderr(&pairs.iter().map(|p| p.0).collect::<Vec<_>>());
            let (l_2n, _) = mean_and_stderr(&pairs.iter().map(|p| p.1).collect::<Vec<_>>());
            // The combination's noise, measured on the per-sample statistic
            // g_n - 2·g_2n (correlated within a shared window).
            let diffs: Vec<f64> = pairs.iter().map(|p| p.0 - 2.0 * p.1).collect();
            let (diff_mean, diff_se) = mean_and_stderr(&diffs);
            Ok(DoublingRow {
                n,
                l_n,
                l_2n,
                combination: (reference.estimate + diff_mean).abs(),
                combination_se: (reference.stderr.powi(2) + diff_se.powi(2)).sqrt(),
            })
        })
        .collect();

    Ok(DoublingResult {
        energy: en.energy(),
        k: en.k(),
        reference_l: reference.estimate,
        reference_se: reference.stderr,
        reference_n: cfg.n(),
        rows: rows?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::config::{uniform_k_grid, WordSource};
    use crate::markov::MarkovMeasure;
    use crate::sft::SftSpec;
    use std::collections::BTreeMap;

    fn cfg(n: usize, samples: usize) -> ExperimentConfig {
        let source = WordSource::Markov(
            MarkovMeasure::from_spec_uniform(SftSpec::full_shift(2).unwrap()).unwrap(),
        );
        ExperimentConfig::new(
            source,
            uniform_k_grid(1.4, 1.8, 1).unwrap(),
            n,
            samples,
            5,
            BTreeMap::new(),
        )
        .unwrap()
    }

    #[test]
    fn oversized_window_rejected() {
        let c = cfg(100, 10);
        let en = c.energy_grid()[0];
        assert!(lyapunov_doubling(&c, &en, &[60]).is_err());
        assert!(lyapunov_doubling(&c, &en, &[50]).is_ok());
    }

    #[test]
    fn constant_control_combination_vanishes() {
        // Elliptic constant chain: all finite-size exponents decay to 0, so
        // the combination does too.
        let source = WordSource::constant(SftSpec::full_shift(2).unwrap(), 1).unwrap();
        let c = ExperimentConfig::new(
            source,
            uniform_k_grid(1.0, 1.5, 1).unwrap(),
            4000,
            3,
            1,
            BTreeMap::new(),
        )
        .unwrap();
        let en = c.energy_grid()[0];
        let res = lyapunov_doubling(&c, &en, &[50, 400]).unwrap();
        assert!(res.rows[1].combination < res.rows[0].combination + 1e-12);
        assert!(res.rows[1].combination < 2e-3);
    }

    #[test]
    fn combination_decreases_for_disordered_chain() {
        let c = cfg(2000, 800);
        let en = c.energy_grid()[0];
        let res = lyapunov_doubling(&c, &en, &[10, 160]).unwrap();
        assert!(
            res.rows[1].combination < res.rows[0].combination,
            "rows {:?}",
            res.rows
        );
    }

    #[test]
    fn deterministic_given_seed() {
        let c = cfg(400, 50);
        let en = c.energy_grid()[0];
        let a = lyapunov_doubling(&c, &en, &[20, 40]).unwrap();
        let b = lyapunov_doubling(&c, &en, &[20, 40]).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
    }
}
