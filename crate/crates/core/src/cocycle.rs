//! The transfer-matrix cocycle over the shift space.
//!
//! One step of the cocycle at the origin of a sequence `ω` is
//!
//! ```text
//! A(ω) = sqrt(ω₀/ω₋₁) · [ (ω₀+ω₋₁)/ω₀ · cos k,  -ω₋₁/ω₀ ]
//!                       [          1,                 0  ]
//! ```
//!
//! a determinant-1 matrix whose `n`-fold products propagate solutions of
//! the discrete trace equation
//!
//! ```text
//! ω_n u(n+1) + ω_{n-1} u(n-1) - (ω_n + ω_{n-1}) cos(k) u(n) = 0.
//! ```
//!
//! This module provides the step matrix, overflow-safe `n`-step products
//! (both branches, the identity at `n = 0`), solution propagation, seeded
//! Monte-Carlo Lyapunov estimation, the stable/unstable holonomies, and
//! Cesàro statistics of the projective orbit.

use rayon::prelude::*;

use crate::energy::EnergyTriple;
use crate::markov::MarkovMeasure;
use crate::rng::derive_seed;
use crate::sft::{Letter, Word};
use crate::sl2::{LogNormProduct, Sl2};
use crate::{Error, Result};

/// Tolerance for the exactness checks inside the holonomy operations.
pub const HOLONOMY_TOL: f64 = 1e-12;

/// One cocycle factor, reading the letters at indices 0 and -1.
///
/// Unimodular by construction; the determinant is exact up to a few ulps.
pub fn one_step(omega0: Letter, omega_m1: Letter, en: &EnergyTriple) -> Result<Sl2> {
    if omega0 == 0 || omega_m1 == 0 {
        return Err(Error::InvalidInput("letters start at 1".into()));
    }
    en.check_default_margin()?;
    let w0 = omega0 as f64;
    let wm = omega_m1 as f64;
    let scale = (w0 / wm).sqrt();
    Ok(Sl2::new(
        scale * ((w0 + wm) / w0) * en.cos_k(),
        scale * (-wm / w0),
        scale,
        0.0,
    ))
}

/// The `n`-step cocycle product along a window.
///
/// - `n ≥ 1`: `A(T^{n-1}ω) ⋯ A(ω)`, renormalized after every factor;
/// - `n = 0`: the identity with zero log-norm;
/// - `n ≤ -1`: the inverse of the `|n|`-step product on the shifted word.
///
/// The word must cover `[min(n,0)-1, max(n,0)]`; factor `j` reads the
/// letters at indices `j-1` and `j`.
pub fn product(word: &Word, en: &EnergyTriple, n: i64) -> Result<LogNormProduct> {
    word.require_window(n.min(0) - 1, n.max(0))?;
    if n == 0 {
        return Ok(LogNormProduct::identity());
    }
    if n >= 1 {
        let mut p = LogNormProduct::identity();
        for j in 0..n {
            p.push_left(&one_step(word.letter(j)?, word.letter(j - 1)?, en)?);
        }
        Ok(p)
    } else {
        let mut q = LogNormProduct::identity();
        for j in 0..(-n) {
            q.push_left(&one_step(word.letter(n + j)?, word.letter(n + j - 1)?, en)?);
        }
        Ok(q.inverse_unimodular())
    }
}

/// A real-valued sequence on a window of integer indices.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSeq {
    offset: i64,
    values: Vec<f64>,
}

impl RealSeq {
    pub fn new(offset: i64, values: Vec<f64>) -> Self {
        RealSeq { offset, values }
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn first_index(&self) -> i64 {
        self.offset
    }

    pub fn last_index(&self) -> i64 {
        self.offset + self.values.len() as i64 - 1
    }

    pub fn value(&self, n: i64) -> Option<f64> {
        if n < self.first_index() || n > self.last_index() {
            None
        } else {
            Some(self.values[(n - self.offset) as usize])
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Residual of the trace equation at one site:
/// `ω_n u(n+1) + ω_{n-1} u(n-1) - (ω_n + ω_{n-1}) cos(k) u(n)`.
pub fn sequation_residual(
    u_prev: f64,
    u_n: f64,
    u_next: f64,
    om_prev: Letter,
    om_n: Letter,
    cos_k: f64,
) -> f64 {
    let wp = om_prev as f64;
    let wn = om_n as f64;
    wn * u_next + wp * u_prev - (wn + wp) * cos_k * u_n
}

/// Propagates the solution with data `(u(0), u(-1)) = (u0, u_m1)` to the
/// window `[-1, n_max]` through the cocycle: the pair at step `n` is
/// `sqrt(ω₋₁/ω_{n-1})` times the `n`-step product applied to the data.
/// The word must cover `[-2, n_max]`.
pub fn solve_sequence(
    word: &Word,
    en: &EnergyTriple,
    u0: f64,
    u_m1: f64,
    n_max: i64,
) -> Result<RealSeq> {
    if n_max < 0 {
        return Err(Error::InvalidInput(format!(
            "n_max must be non-negative, got {n_max}"
        )));
    }
    word.require_window(-2, n_max)?;
    en.check_default_margin()?;
    let w_m1 = word.letter(-1)? as f64;
    let mut values = Vec::with_capacity((n_max + 2) as usize);
    values.push(u_m1);
    values.push(u0);
    let mut v = [u0, u_m1];
    for n in 1..=n_max {
        let step = one_step(word.letter(n - 1)?, word.letter(n - 2)?, en)?;
        v = step.apply(v);
        let prefactor = (w_m1 / word.letter(n - 1)? as f64).sqrt();
        values.push(prefactor * v[0]);
    }
    Ok(RealSeq::new(-1, values))
}

/// Monte-Carlo Lyapunov estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovEstimate {
    pub estimate: f64,
    pub stderr: f64,
}

/// Anything that can produce admissible windows for disorder averages.
///
/// Implementations must be pure functions of `(seed, n_left, n_right)`;
/// parallel drivers derive one seed per sample through
/// [`derive_seed`](crate::rng::derive_seed).
pub trait WordSampler: Sync {
    fn sample_window(&self, seed: u64, n_left: usize, n_right: usize) -> Word;
}

impl WordSampler for MarkovMeasure {
    fn sample_window(&self, seed: u64, n_left: usize, n_right: usize) -> Word {
        self.sample(seed, n_left, n_right)
    }
}

/// Estimates the Lyapunov exponent at one energy: the mean over fresh
/// sampled windows of `(1/n)·ln‖A_n‖`, plus the sample standard error.
/// Deterministic given the seed, independent of thread count.
pub fn lyapunov(
    measure: &MarkovMeasure,
    en: &EnergyTriple,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<LyapunovEstimate> {
    lyapunov_with(measure, en, n, samples, seed)
}

/// [`lyapunov`] over an arbitrary word source (deterministic controls,
/// degenerate point masses, …).
pub fn lyapunov_with<S: WordSampler + ?Sized>(
    sampler: &S,
    en: &EnergyTriple,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<LyapunovEstimate> {
    if n < 1 || samples < 1 {
        return Err(Error::InvalidInput(format!(
            "need n >= 1 and samples >= 1, got n = {n}, samples = {samples}"
        )));
    }
    en.check_default_margin()?;
    let growth_rates: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let word = sampler.sample_window(derive_seed(seed, s as u64), 1, n);
            product(&word, en, n as i64).map(|p| p.log_norm() / n as f64)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(&growth_rates))
}

fn summarize(values: &[f64]) -> LyapunovEstimate {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let stderr = if values.len() > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
        (var / m).sqrt()
    } else {
        0.0
    };
    debug_assert!(
        mean >= -1e-9,
        "per-sample growth rates of unimodular products are non-negative"
    );
    LyapunovEstimate {
        estimate: mean,
        stderr,
    }
}

fn check_agreement<F>(w: &Word, w_prime: &Word, indices: F) -> Option<i64>
where
    F: IntoIterator<Item = i64>,
{
    indices
        .into_iter()
        .find(|&i| w.get(i) != w_prime.get(i) && w.get(i).is_some() && w_prime.get(i).is_some())
}

/// Stable holonomy between two sequences sharing their future (all indices
/// `≥ 0` equal): the single-step conjugation `[A(ω')]⁻¹ A(ω)`.
///
/// The `n`-step comparisons stabilize immediately because every factor
/// beyond the first coincides; this is verified for `1 ≤ n ≤ n*` (the
/// common window length) in multiplicative-residual form
/// `‖A_n(ω) − A_n(ω')·H‖ ≤ 1e-12·‖A_n(ω)‖`, which is the `n`-independence
/// statement phrased without an explicit inverse of an exponentially
/// ill-conditioned product.
pub fn stable_holonomy(w: &Word, w_prime: &Word, en: &EnergyTriple) -> Result<Sl2> {
    let n_star = w.last_index().min(w_prime.last_index());
    w.require_window(-1, 1)?;
    w_prime.require_window(-1, 1)?;
    if let Some(index) = check_agreement(w, w_prime, 0..=n_star) {
        return Err(Error::NotInStableSet { index });
    }
    let step = one_step(w.letter(0)?, w.letter(-1)?, en)?;
    let step_prime = one_step(w_prime.letter(0)?, w_prime.letter(-1)?, en)?;
    let holonomy = step_prime.inverse_unimodular().mul(&step);

    let h = LogNormProduct::from_matrix(&holonomy);
    for n in 1..=n_star {
        let lhs = product(w, en, n)?;
        let rhs = product(w_prime, en, n)?.compose(&h);
        let rel = lhs.relative_difference(&rhs);
        if rel > HOLONOMY_TOL {
            return Err(Error::InvalidInput(format!(
                "stable holonomy failed to stabilize at n = {n}: residual {rel:.3e}"
            )));
        }
    }
    Ok(holonomy)
}

/// Unstable holonomy between two sequences sharing their past (all indices
/// `≤ 0` equal): the identity, because the cocycle never reads the future
/// on its negative branch. Computed as `[A_{-n*}(ω')]⁻¹ A_{-n*}(ω)` with an
/// explicit determinant division (exact cancellation for coinciding
/// factors) and checked against the identity to 1e-12.
pub fn unstable_holonomy(w: &Word, w_prime: &Word, en: &EnergyTriple) -> Result<Sl2> {
    let depth = (-w.first_index()).min(-w_prime.first_index()) - 1;
    if depth < 1 {
        return Err(Error::InvalidInput(
            "windows must cover [-n*-1, 0] with n* >= 1".into(),
        ));
    }
    w.require_window(-depth - 1, 0)?;
    w_prime.require_window(-depth - 1, 0)?;
    let low = w.first_index().max(w_prime.first_index());
    if let Some(index) = check_agreement(w, w_prime, low..=0) {
        return Err(Error::NotInUnstableSet { index });
    }
    let back = product(w, en, -depth)?;
    let back_prime = product(w_prime, en, -depth)?;
    // H = (A')⁻¹ A = exp(s - s') · adj(M') M / det(M'). The determinant of
    // the normalized part is ~exp(-2s'), far from 1; dividing by it exactly
    // as computed is what makes coinciding factors cancel to the bit.
    let m = back.normalized();
    let m_prime = back_prime.normalized();
    let det_prime = m_prime.det();
    if det_prime == 0.0 {
        return Err(Error::InvalidInput(
            "degenerate product in unstable holonomy".into(),
        ));
    }
    let scale = (back.log_norm() - back_prime.log_norm()).exp() / det_prime;
    let holonomy = m_prime.adjugate().mul(m).scale(scale);
    let deviation = holonomy.sub(&Sl2::IDENTITY).op_norm();
    if deviation > HOLONOMY_TOL {
        return Err(Error::InvalidInput(format!(
            "unstable holonomy deviates from the identity by {deviation:.3e}"
        )));
    }
    Ok(holonomy)
}

/// Normalized direction histogram over the projective line, angles in
/// `[0, π)` with uniform bin edges.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveHistogram {
    masses: Vec<f64>,
}

impl ProjectiveHistogram {
    fn from_counts(counts: Vec<u64>, total: u64) -> Self {
        ProjectiveHistogram {
            masses: counts
                .into_iter()
                .map(|c| c as f64 / total as f64)
                .collect(),
        }
    }

    pub fn bins(&self) -> usize {
        self.masses.len()
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Total-variation distance to another histogram on the same bins.
    pub fn tv_distance(&self, other: &ProjectiveHistogram) -> f64 {
        assert_eq!(self.bins(), other.bins(), "histograms must share bins");
        0.5 * self
            .masses
            .iter()
            .zip(&other.masses)
            .map(|(p, q)| (p - q).abs())
            .sum::<f64>()
    }

    /// Mass-weighted merge of several histograms (for pooling realizations).
    pub fn merge(histograms: &[ProjectiveHistogram]) -> ProjectiveHistogram {
        assert!(!histograms.is_empty());
        let bins = histograms[0].bins();
        let mut masses = vec![0.0; bins];
        for h in histograms {
            assert_eq!(h.bins(), bins);
            for (acc, m) in masses.iter_mut().zip(&h.masses) {
                *acc += m;
            }
        }
        for m in &mut masses {
            *m /= histograms.len() as f64;
        }
        ProjectiveHistogram { masses }
    }
}

fn bin_of(direction: [f64; 2], bins: usize) -> usize {
    let angle = direction[1].atan2(direction[0]).rem_euclid(std::f64::consts::PI);
    let idx = (angle / std::f64::consts::PI * bins as f64) as usize;
    idx.min(bins - 1)
}

/// Cesàro statistics of the projective orbit: the directions
/// `A_j(ω)·v₀` for `j < n` along one sampled realization, binned by angle
/// mod π and normalized to unit mass. Pool several calls with
/// [`ProjectiveHistogram::merge`] under derived seeds.
pub fn cesaro_projective(
    measure: &MarkovMeasure,
    en: &EnergyTriple,
    v0_angle: f64,
    n: usize,
    bins: usize,
    seed: u64,
) -> Result<ProjectiveHistogram> {
    if bins < 8 {
        return Err(Error::InvalidInput(format!(
            "need at least 8 bins, got {bins}"
        )));
    }
    if n < 1 {
        return Err(Error::InvalidInput("need n >= 1".into()));
    }
    en.check_default_margin()?;
    let word = measure.sample(seed, 1, n.saturating_sub(1));
    let mut counts = vec![0u64; bins];
    let mut v = [v0_angle.cos(), v0_angle.sin()];
    counts[bin_of(v, bins)] += 1;
    for j in 0..(n as i64 - 1) {
        let step = one_step(word.letter(j)?, word.letter(j - 1)?, en)?;
        v = step.apply(v);
        let norm = (v[0] * v[0] + v[1] * v[1]).sqrt();
        v = [v[0] / norm, v[1] / norm];
        counts[bin_of(v, bins)] += 1;
    }
    Ok(ProjectiveHistogram::from_counts(counts, n as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sft::SftSpec;
    use rand::Rng;
    use std::f64::consts::PI;

    fn en(k: f64) -> EnergyTriple {
        EnergyTriple::from_k(k).unwrap()
    }

    fn full_shift_measure() -> MarkovMeasure {
        MarkovMeasure::from_spec_uniform(SftSpec::full_shift(2).unwrap()).unwrap()
    }

    #[test]
    fn one_step_at_quarter_turn() {
        // ω₀ = ω₋₁ = 1, k = π/2: cos k = 0, all ratios 1.
        let m = one_step(1, 1, &en(PI / 2.0)).unwrap();
        assert!(m.a.abs() < 1e-15);
        assert!((m.b + 1.0).abs() < 1e-15);
        assert!((m.c - 1.0).abs() < 1e-15);
        assert_eq!(m.d, 0.0);
    }

    #[test]
    fn one_step_mixed_letters() {
        // ω₀ = 2, ω₋₁ = 1, k = π/3: sqrt(2)·[[0.75, -0.5], [1, 0]].
        let m = one_step(2, 1, &en(PI / 3.0)).unwrap();
        let s = 2.0f64.sqrt();
        assert!((m.a - s * 0.75).abs() < 1e-14);
        assert!((m.b + s * 0.5).abs() < 1e-14);
        assert!((m.c - s).abs() < 1e-15);
    }

    #[test]
    fn one_step_determinant_is_one() {
        let mut rng = crate::rng::seeded_rng(11);
        for _ in 0..10_000 {
            let w0 = rng.random_range(1..=6u8);
            let wm = rng.random_range(1..=6u8);
            let k = rng.random_range(0.05..PI - 0.05);
            let m = one_step(w0, wm, &en(k)).unwrap();
            assert!((m.det() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn one_step_rejects_singular_momentum() {
        let t = EnergyTriple::from_k(PI - 1e-9).unwrap();
        assert!(matches!(
            one_step(1, 1, &t),
            Err(Error::SingularEnergy { .. })
        ));
    }

    #[test]
    fn product_zero_steps_is_identity() {
        let w = Word::new(-1, vec![1, 2]).unwrap();
        let p = product(&w, &en(1.0), 0).unwrap();
        assert_eq!(p.log_norm(), 0.0);
        assert_eq!(*p.normalized(), Sl2::IDENTITY);
    }

    #[test]
    fn product_matches_naive_multiplication() {
        // Oracle: plain 2×2 chain multiplication, safe for short products.
        let mut rng = crate::rng::seeded_rng(5);
        for _ in 0..50 {
            let len = rng.random_range(1..=30i64);
            let symbols: Vec<Letter> = (0..len + 2).map(|_| rng.random_range(1..=3)).collect();
            let w = Word::new(-1, symbols).unwrap();
            let k = rng.random_range(0.3..PI - 0.3);
            let t = en(k);
            let mut naive = Sl2::IDENTITY;
            for j in 0..len {
                naive = one_step(w.letter(j).unwrap(), w.letter(j - 1).unwrap(), &t)
                    .unwrap()
                    .mul(&naive);
            }
            let p = product(&w, &t, len).unwrap();
            let rel = p.relative_difference(&LogNormProduct::from_matrix(&naive));
            assert!(rel < 1e-12, "len {len}: relative difference {rel:.3e}");
        }
    }

    #[test]
    fn product_window_errors() {
        let w = Word::new(0, vec![1, 1, 1]).unwrap();
        // Missing index -1.
        assert!(product(&w, &en(1.0), 1).is_err());
    }

    #[test]
    fn inverse_branch_cancels_forward_branch() {
        let w = Word::new(-4, vec![1, 2, 2, 1, 2, 1, 1, 2]).unwrap();
        let t = en(1.2);
        let back = product(&w, &t, -3).unwrap();
        let forward = product(&crate::sft::shift(&w, -3), &t, 3).unwrap();
        let composed = back.compose(&forward);
        let dev = composed.relative_difference(&LogNormProduct::identity());
        assert!(dev < 1e-10, "deviation {dev:.3e}");
        assert!(composed.log_norm().abs() < 1e-10);
    }

    #[test]
    fn cocycle_law_splits_products() {
        let mut rng = crate::rng::seeded_rng(17);
        for _ in 0..20 {
            let n = rng.random_range(1..=100i64);
            let m = rng.random_range(1..=100i64);
            let symbols: Vec<Letter> = (0..(n + m + 2)).map(|_| rng.random_range(1..=2)).collect();
            let w = Word::new(-1, symbols).unwrap();
            let k = rng.random_range(0.3..PI - 0.3);
            let t = en(k);
            let whole = product(&w, &t, n + m).unwrap();
            let first = product(&w, &t, n).unwrap();
            let second = product(&crate::sft::shift(&w, n), &t, m).unwrap();
            let rel = whole.relative_difference(&second.compose(&first));
            assert!(rel < 1e-10, "n {n}, m {m}: relative difference {rel:.3e}");
        }
    }

    #[test]
    fn products_never_contract_below_unit_norm() {
        let w = full_shift_measure().sample(3, 1, 200);
        let t = en(0.9);
        for n in [1, 10, 50, 200] {
            let p = product(&w, &t, n).unwrap();
            assert!(p.log_norm() >= -1e-12);
        }
    }

    #[test]
    fn solve_sequence_constant_word_quarter_turn() {
        // Constant letters, k = π/2: u(n+1) = -u(n-1), so from (u0, u_m1) =
        // (1, 0) the values cycle through 1, 0, -1, 0, … (cos(nπ/2)).
        let w = Word::constant(-2, 13, 1).unwrap();
        let u = solve_sequence(&w, &en(PI / 2.0), 1.0, 0.0, 10).unwrap();
        for n in 0..=10i64 {
            let expected = match n.rem_euclid(4) {
                0 => 1.0,
                2 => -1.0,
                _ => 0.0,
            };
            assert!(
                (u.value(n).unwrap() - expected).abs() < 1e-12,
                "u({n}) = {}",
                u.value(n).unwrap()
            );
        }
    }

    #[test]
    fn solve_sequence_zero_data_stays_zero() {
        let w = Word::new(-2, vec![2, 1, 2, 2, 1, 1, 2]).unwrap();
        let u = solve_sequence(&w, &en(0.7), 0.0, 0.0, 4).unwrap();
        assert!(u.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn solve_sequence_satisfies_trace_equation() {
        let mut rng = crate::rng::seeded_rng(23);
        for _ in 0..20 {
            let n_max = 60i64;
            let symbols: Vec<Letter> =
                (0..n_max + 3).map(|_| rng.random_range(1..=3)).collect();
            let w = Word::new(-2, symbols).unwrap();
            let k = rng.random_range(0.3..PI - 0.3);
            let t = en(k);
            let u0 = rng.random_range(-1.0..1.0);
            let um1 = rng.random_range(-1.0..1.0);
            let u = solve_sequence(&w, &t, u0, um1, n_max).unwrap();
            let scale = u.max_abs();
            for n in 0..n_max {
                let r = sequation_residual(
                    u.value(n - 1).unwrap(),
                    u.value(n).unwrap(),
                    u.value(n + 1).unwrap(),
                    w.letter(n - 1).unwrap(),
                    w.letter(n).unwrap(),
                    t.cos_k(),
                );
                assert!(r.abs() < 1e-9 * scale, "site {n}: residual {r:.3e}");
            }
        }
    }

    #[test]
    fn lyapunov_is_deterministic() {
        let m = full_shift_measure();
        let t = en(1.1);
        let a = lyapunov(&m, &t, 200, 20, 7).unwrap();
        let b = lyapunov(&m, &t, 200, 20, 7).unwrap();
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    }

    #[test]
    fn lyapunov_positive_for_full_shift() {
        let m = full_shift_measure();
        let t = en(PI / 2.0);
        let est = lyapunov(&m, &t, 2000, 50, 42).unwrap();
        assert!(
            est.estimate > 5.0 * est.stderr,
            "estimate {} stderr {}",
            est.estimate,
            est.stderr
        );
    }

    #[test]
    fn lyapunov_constant_word_elliptic_decay() {
        // Deterministic constant realization: an elliptic constant matrix
        // has bounded powers, so the estimate falls off like 1/n.
        struct Constant;
        impl WordSampler for Constant {
            fn sample_window(&self, _seed: u64, n_left: usize, n_right: usize) -> Word {
                Word::constant(-(n_left as i64), n_left + n_right + 1, 1).unwrap()
            }
        }
        let t = en(PI / 3.0); // 2cos k = 1, inside (-2, 2)
        let short = lyapunov_with(&Constant, &t, 100, 3, 1).unwrap();
        let long = lyapunov_with(&Constant, &t, 10_000, 3, 1).unwrap();
        assert!(long.estimate < short.estimate);
        assert!(long.estimate < 1e-3, "estimate {}", long.estimate);
        assert_eq!(long.stderr, 0.0);
    }

    #[test]
    fn stable_holonomy_same_word_is_identity() {
        let w = Word::new(-1, vec![1, 2, 1, 1, 2]).unwrap();
        let h = stable_holonomy(&w, &w, &en(1.3)).unwrap();
        assert!(h.sub(&Sl2::IDENTITY).op_norm() < 1e-15);
    }

    #[test]
    fn stable_holonomy_explicit_two_by_two() {
        // Words differing only at index -1 (1 vs 2): the holonomy is the
        // product of the two step matrices, hand-checkable.
        let w = Word::new(-1, vec![1, 2, 1, 2, 2]).unwrap();
        let wp = Word::new(-1, vec![2, 2, 1, 2, 2]).unwrap();
        let t = en(1.0);
        let h = stable_holonomy(&w, &wp, &t).unwrap();
        let expected = one_step(2, 2, &t)
            .unwrap()
            .inverse_unimodular()
            .mul(&one_step(2, 1, &t).unwrap());
        assert!(h.sub(&expected).op_norm() < 1e-14);
    }

    #[test]
    fn stable_holonomy_rejects_future_disagreement() {
        let w = Word::new(-1, vec![1, 2, 1]).unwrap();
        let wp = Word::new(-1, vec![1, 2, 2]).unwrap();
        assert!(matches!(
            stable_holonomy(&w, &wp, &en(1.0)),
            Err(Error::NotInStableSet { index: 1 })
        ));
    }

    #[test]
    fn unstable_holonomy_is_identity() {
        let w = Word::new(-6, vec![1, 2, 2, 1, 2, 1, 1]).unwrap();
        let mut symbols = w.symbols().to_vec();
        symbols[0] = 2; // index -6 is beyond the checked depth... keep equal
        let h = unstable_holonomy(&w, &w, &en(0.9)).unwrap();
        assert!(h.sub(&Sl2::IDENTITY).op_norm() < 1e-15);
    }

    #[test]
    fn unstable_holonomy_ignores_future_disagreement() {
        let mut left = vec![1, 2, 2, 1, 2, 1];
        left.extend_from_slice(&[1, 2, 1]); // indices 1..=3
        let w = Word::new(-5, left.clone()).unwrap();
        left[7] = 2; // index +2 differs
        let wp = Word::new(-5, left).unwrap();
        let h = unstable_holonomy(&w, &wp, &en(1.7)).unwrap();
        assert!(h.sub(&Sl2::IDENTITY).op_norm() < 1e-12);
    }

    #[test]
    fn unstable_holonomy_rejects_past_disagreement() {
        let w = Word::new(-4, vec![1, 2, 2, 1, 2]).unwrap();
        let mut symbols = w.symbols().to_vec();
        symbols[1] = 1; // index -3
        let wp = Word::new(-4, symbols).unwrap();
        assert!(matches!(
            unstable_holonomy(&w, &wp, &en(1.7)),
            Err(Error::NotInUnstableSet { index: -3 })
        ));
    }

    #[test]
    fn cesaro_single_step_is_point_mass() {
        let m = full_shift_measure();
        let h = cesaro_projective(&m, &en(1.0), 0.4, 1, 16, 9).unwrap();
        assert!((h.total_mass() - 1.0).abs() < 1e-12);
        assert_eq!(h.masses().iter().filter(|&&p| p > 0.0).count(), 1);
    }

    #[test]
    fn cesaro_mass_normalized() {
        let m = full_shift_measure();
        let h = cesaro_projective(&m, &en(1.2), 0.0, 500, 32, 4).unwrap();
        assert!((h.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cesaro_limit_forgets_initial_direction() {
        let m = full_shift_measure();
        let t = en(1.2);
        let n = 40_000;
        // Same realizations, far-apart starting directions.
        let pool = |angle: f64| {
            let hists: Vec<_> = (0..8)
                .map(|i| cesaro_projective(&m, &t, angle, n, 16, derive_seed(77, i)).unwrap())
                .collect();
            ProjectiveHistogram::merge(&hists)
        };
        let h1 = pool(0.1);
        let h2 = pool(1.4);
        let tv = h1.tv_distance(&h2);
        assert!(tv < 0.05, "total variation {tv}");
    }

    #[test]
    fn cesaro_rejects_tiny_bin_counts() {
        let m = full_shift_measure();
        assert!(cesaro_projective(&m, &en(1.0), 0.0, 10, 4, 1).is_err());
    }
}
