//! Empirical tails of the finite-size growth-rate deviations.
//!
//! For each window length `n`, measures the fraction of realizations whose
//! `(1/n)·ln‖A_n‖` lands more than `ε` away from a high-`n` reference
//! exponent. The uniform large-deviation picture predicts these tails to
//! decay exponentially in `n`; the driver reports the fitted log-tail slope
//! with its standard error.

use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::stats::linear_fit;
use crate::cocycle::{lyapunov_with, product, WordSampler};
use crate::energy::EnergyTriple;
use crate::rng::derive_seed;
use crate::{Error, Result};

/// Tail estimate at one window length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LdtRow {
    pub n: usize,
    pub tail: f64,
    /// Binomial standard error `sqrt(p(1-p)/samples)`.
    pub binom_sigma: f64,
    pub exceed_count: usize,
    pub samples: usize,
}

/// Fitted decay of `ln(tail)` against `n` over the strictly positive tails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub stderr: f64,
    pub points_used: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct LdtResult {
    pub energy: f64,
    pub k: f64,
    pub epsilon: f64,
    pub reference_l: f64,
    pub reference_n: usize,
    pub rows: Vec<LdtRow>,
    /// Absent when fewer than three window lengths have positive tails.
    pub slope: Option<SlopeFit>,
}

impl LdtResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,tail,binom_sigma,exceed_count,samples\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.n, r.tail, r.binom_sigma, r.exceed_count, r.samples
            ));
        }
        out
    }
}

/// Tail table at one energy. The reference exponent is estimated first at
/// the configured `n` (which must dominate every entry of `n_list`); each
/// window length then runs on its own derived seed stream.
pub fn ldt_tail(
    cfg: &ExperimentConfig,
    en: &EnergyTriple,
    epsilon: f64,
    n_list: &[usize],
) -> Result<LdtResult> {
    if epsilon <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if n_list.is_empty() || n_list.iter().any(|&n| n == 0) {
        return Err(Error::InvalidInput("window lengths must be positive".into()));
    }
    let max_n = *n_list.iter().max().expect("non-empty");
    if cfg.n() < max_n {
        return Err(Error::InvalidInput(format!(
            "reference length {} must dominate the largest window {max_n}",
            cfg.n()
        )));
    }
    en.check_k_margin(cfg.k_margin())?;
    let reference =
        lyapunov_with(cfg.source(), en, cfg.n(), cfg.samples(), derive_seed(cfg.seed(), 0))?;

    let rows: Result<Vec<LdtRow>> = n_list
        .iter()
        .enumerate()
        .map(|(idx, &n)| {
            let stream = derive_seed(cfg.seed(), 1 + idx as u64);
            let exceed: Result<Vec<bool>> = (0..cfg.samples())
                .into_par_iter()
                .map(|s| {
                    let word = cfg.source().sample_window(derive_seed(stream, s as u64), 1, n);
                    let g = product(&word, en, n as i64)?.log_norm() / n as f64;
                    Ok((g - reference.estimate).abs() > epsilon)
                })
                .collect();
            let exceed = exceed?;
            let count = exceed.iter().filter(|&&e| e).count();
            let p = count as f64 / cfg.samples() as f64;
            Ok(LdtRow {
                n,
                tail: p,
                binom_sigma: (p * (1.0 - p) / cfg.samples() as f64).sqrt(),
                exceed_count: count,
                samples: cfg.samples(),
            })
        })
        .collect();
    let rows = rows?;

    let positive: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.tail > 0.0)
        .map(|r| (r.n as f64, r.tail.ln()))
        .collect();
    let slope = if positive.len() >= 3 {
        let xs: Vec<f64> = positive.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = positive.iter().map(|p| p.1).collect();
        let fit = linear_fit(&xs, &ys)?;
        Some(SlopeFit {
            slope: fit.slope,
            stderr: fit.slope_stderr,
            points_used: fit.points,
        })
    } else {
        None
    };

    Ok(LdtResult {
        energy: en.energy(),
        k: en.k(),
        epsilon,
        reference_l: reference.estimate,
        reference_n: cfg.n(),
        rows,
        slope,
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
            uniform_k_grid(1.0, 2.0, 1).unwrap(),
            n,
            samples,
            99,
            BTreeMap::new(),
        )
        .unwrap()
    }

    #[test]
    fn oversized_epsilon_gives_empty_tails() {
        // The one-step norms are bounded, so deviations can never exceed
        // the crude bound ln(max norm) + reference.
        let c = cfg(400, 200);
        let en = c.energy_grid()[0];
        let res = ldt_tail(&c, &en, 10.0, &[20, 40, 80]).unwrap();
        assert!(res.rows.iter().all(|r| r.tail == 0.0));
        assert!(res.slope.is_none());
    }

    #[test]
    fn tails_exist_and_shrink_for_small_epsilon() {
        let c = cfg(600, 400);
        let en = c.energy_grid()[0];
        let res = ldt_tail(&c, &en, 0.02, &[10, 40, 160]).unwrap();
        assert!(res.rows[0].tail >= res.rows[2].tail);
        assert!(res.rows.iter().all(|r| (0.0..=1.0).contains(&r.tail)));
    }

    #[test]
    fn monotone_in_epsilon_on_shared_samples() {
        let c = cfg(400, 300);
        let en = c.energy_grid()[0];
        let wide = ldt_tail(&c, &en, 0.01, &[30, 60]).unwrap();
        let narrow = ldt_tail(&c, &en, 0.05, &[30, 60]).unwrap();
        for (w, n) in wide.rows.iter().zip(&narrow.rows) {
            assert!(w.tail >= n.tail);
        }
    }

    #[test]
    fn reference_must_dominate_windows() {
        let c = cfg(100, 10);
        let en = c.energy_grid()[0];
        assert!(ldt_tail(&c, &en, 0.1, &[200]).is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let c = cfg(300, 100);
        let en = c.energy_grid()[0];
        let a = ldt_tail(&c, &en, 0.05, &[25, 50]).unwrap();
        let b = ldt_tail(&c, &en, 0.05, &[25, 50]).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
    }
}
