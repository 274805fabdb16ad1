//! Near-additivity of log-norms for chains of strongly expanding matrices.
//!
//! For unimodular matrices `A⁽¹⁾, …, A⁽ⁿ⁾` that all expand by at least `λ`
//! and never cancel across neighbors, the log-norm of the full product is
//! reproduced by neighbor products alone:
//!
//! ```text
//! Δ = | ln‖A⁽ⁿ⁾⋯A⁽¹⁾‖ + Σ_{j=2}^{n-1} ln‖A⁽ʲ⁾‖ − Σ_{j=1}^{n-1} ln‖A⁽ʲ⁺¹⁾A⁽ʲ⁾‖ |
//! ```
//!
//! stays below `C·n/λ`. The driver evaluates Δ, checks the two
//! preconditions, and reports violations as data rather than errors.

use serde::Serialize;

use crate::sl2::{LogNormProduct, Sl2};
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct AvalancheReport {
    pub n: usize,
    pub lambda: f64,
    pub c: f64,
    pub delta: f64,
    pub bound: f64,
    /// Indices (1-based) whose norm falls below `lambda`, plus a flag slot
    /// `0` when `lambda ≤ n` itself fails.
    pub norm_violations: Vec<usize>,
    /// 1-based indices `j` where the neighbor cancellation exceeds `½·ln λ`.
    pub gap_violations: Vec<usize>,
    pub preconditions_ok: bool,
    pub pass: bool,
}

impl AvalancheReport {
    pub fn to_csv(&self) -> String {
        format!(
            "n,lambda,c,delta,bound,preconditions_ok,pass\n{},{},{},{},{},{},{}\n",
            self.n, self.lambda, self.c, self.delta, self.bound, self.preconditions_ok, self.pass
        )
    }
}

/// Evaluates the additivity defect `Δ` for the chain and checks
/// `Δ ≤ c·n/λ`. The chain is given in application order
/// (`mats[0] = A⁽¹⁾` acts first); the long product is accumulated in
/// renormalized form. Needs `n ≥ 2`; non-finite norms are an input error.
pub fn avalanche_verify(mats: &[Sl2], lambda: f64, c: f64) -> Result<AvalancheReport> {
    let n = mats.len();
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 factors, got {n}"
        )));
    }
    if !(lambda > 1.0) || !(c > 0.0) {
        return Err(Error::InvalidInput(format!(
            "need lambda > 1 and c > 0, got lambda = {lambda}, c = {c}"
        )));
    }
    let norms: Vec<f64> = mats.iter().map(Sl2::op_norm).collect();
    if norms.iter().any(|x| !x.is_finite()) || norms.iter().any(|&x| x <= 0.0) {
        return Err(Error::InvalidInput("non-finite or zero factor norm".into()));
    }

    let mut norm_violations: Vec<usize> = Vec::new();
    if lambda <= n as f64 {
        norm_violations.push(0);
    }
    for (j, &norm) in norms.iter().enumerate() {
        if norm < lambda {
            norm_violations.push(j + 1);
        }
    }

    let half_log_lambda = 0.5 * lambda.ln();
    let mut pair_log_norms = Vec::with_capacity(n - 1);
    let mut gap_violations = Vec::new();
    for j in 0..n - 1 {
        let pair = mats[j + 1].mul(&mats[j]);
        let pair_log = pair.op_norm().ln();
        if !pair_log.is_finite() {
            return Err(Error::InvalidInput(format!(
                "non-finite neighbor product norm at j = {}",
                j + 1
            )));
        }
        if (norms[j + 1].ln() + norms[j].ln() - pair_log).abs() >= half_log_lambda {
            gap_violations.push(j + 1);
        }
        pair_log_norms.push(pair_log);
    }

    let mut chain = LogNormProduct::identity();
    for m in mats {
        chain.push_left(m);
    }
    let interior: f64 = norms[1..n - 1].iter().map(|x| x.ln()).sum();
    let pairs: f64 = pair_log_norms.iter().sum();
    let delta = (chain.log_norm() + interior - pairs).abs();
    let bound = c * n as f64 / lambda;
    let preconditions_ok = norm_violations.is_empty() && gap_violations.is_empty();

    Ok(AvalancheReport {
        n,
        lambda,
        c,
        delta,
        bound,
        norm_violations,
        gap_violations,
        preconditions_ok,
        pass: preconditions_ok && delta <= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hyperbolic(lambda: f64) -> Sl2 {
        Sl2::new(lambda, 0.0, 0.0, 1.0 / lambda)
    }

    fn rotation(theta: f64) -> Sl2 {
        let (s, c) = theta.sin_cos();
        Sl2::new(c, -s, s, c)
    }

    #[test]
    fn aligned_diagonal_chain_telescopes() {
        let lam = (5.0f64).exp();
        let mats = vec![hyperbolic(lam); 10];
        let report = avalanche_verify(&mats, lam, 10.0).unwrap();
        assert!(report.preconditions_ok);
        assert!(report.delta < 1e-12, "delta {}", report.delta);
        assert!(report.pass);
    }

    #[test]
    fn two_factor_defect_cancels_identically() {
        let lam = (3.0f64).exp();
        let mats = vec![
            rotation(0.2).mul(&hyperbolic(lam)),
            hyperbolic(lam).mul(&rotation(-0.1)),
        ];
        let report = avalanche_verify(&mats, lam * 0.9, 10.0).unwrap();
        assert!(report.delta < 1e-12, "delta {}", report.delta);
    }

    #[test]
    fn jittered_chain_obeys_bound() {
        let lam = (5.0f64).exp();
        let mut state = 0x9E3779B97F4A7C15u64;
        let mut next_angle = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            ((state >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * 0.2
        };
        let mats: Vec<Sl2> = (0..20)
            .map(|_| rotation(next_angle()).mul(&hyperbolic(lam)).mul(&rotation(next_angle())))
            .collect();
        let report = avalanche_verify(&mats, lam * 0.8, 10.0).unwrap();
        assert!(report.preconditions_ok, "violations {:?}", report.gap_violations);
        assert!(report.pass, "delta {} bound {}", report.delta, report.bound);
    }

    #[test]
    fn weak_factors_flagged_not_erred() {
        let lam = (5.0f64).exp();
        let mut mats = vec![hyperbolic(lam); 5];
        mats[2] = hyperbolic(2.0); // far weaker than lambda
        let report = avalanche_verify(&mats, lam, 10.0).unwrap();
        assert!(!report.preconditions_ok);
        assert!(report.norm_violations.contains(&3));
        assert!(!report.pass);
    }

    #[test]
    fn cancelling_neighbors_flagged() {
        let lam = (4.0f64).exp();
        // A then A⁻¹: the pair norm collapses, violating the gap condition.
        let mats = vec![hyperbolic(lam), hyperbolic(1.0 / lam)];
        let report = avalanche_verify(&mats, lam, 10.0).unwrap();
        assert!(report.gap_violations.contains(&1));
        assert!(!report.pass);
    }

    #[test]
    fn single_factor_rejected() {
        assert!(avalanche_verify(&[hyperbolic(10.0)], 5.0, 10.0).is_err());
    }
}
