//! Stationary Markov measures on a shift space.
//!
//! A row-stochastic matrix supported exactly on the allowed transitions,
//! together with its stationary vector, induces a shift-ergodic measure on
//! the sequence space with full support. Cylinder weights are exact finite
//! products, separated cylinders have explicitly computable correlation
//! ratios, and two-sided windows can be sampled exactly (the past through
//! the time-reversed chain).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng::seeded_rng;
use crate::sft::{Letter, SftSpec, Word};
use crate::{Error, Result};

const ROW_SUM_TOL: f64 = 1e-12;
const STATIONARY_TOL: f64 = 1e-14;
const POWER_ITERATION_CAP: usize = 1_000_000;

/// A stationary Markov chain compatible with an [`SftSpec`].
///
/// Invariants checked at construction:
/// - `transition[i][j] > 0` exactly when `(i, j)` is allowed;
/// - rows sum to 1 within 1e-12;
/// - the chain is irreducible and aperiodic;
/// - the stationary vector is strictly positive and fixed by the chain.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "MarkovMeasureData", into = "MarkovMeasureData")]
pub struct MarkovMeasure {
    spec: SftSpec,
    transition: Vec<Vec<f64>>,
    stationary: Vec<f64>,
}

/// Raw serialization shape (matrix row-major, vector alongside).
#[derive(Debug, Clone, Serialize, Deserialize)]
struct MarkovMeasureData {
    spec: SftSpec,
    transition: Vec<Vec<f64>>,
    stationary: Vec<f64>,
}

impl TryFrom<MarkovMeasureData> for MarkovMeasure {
    type Error = Error;

    fn try_from(data: MarkovMeasureData) -> Result<Self> {
        let m = MarkovMeasure::new(data.spec, data.transition)?;
        // The stored stationary vector is recomputed, not trusted; reject
        // files whose vector disagrees with the matrix.
        for (stored, computed) in data.stationary.iter().zip(&m.stationary) {
            if (stored - computed).abs() > 1e-9 {
                return Err(Error::InvalidInput(format!(
                    "stored stationary entry {stored} disagrees with recomputed {computed}"
                )));
            }
        }
        Ok(m)
    }
}

impl From<MarkovMeasure> for MarkovMeasureData {
    fn from(m: MarkovMeasure) -> Self {
        MarkovMeasureData {
            spec: m.spec,
            transition: m.transition,
            stationary: m.stationary,
        }
    }
}

impl MarkovMeasure {
    /// Builds a measure from a transition matrix; the stationary vector is
    /// computed by power iteration to 1e-14 (failure to converge within
    /// 10^6 sweeps is a construction error).
    pub fn new(spec: SftSpec, transition: Vec<Vec<f64>>) -> Result<Self> {
        let l = spec.alphabet_size() as usize;
        if transition.len() != l || transition.iter().any(|row| row.len() != l) {
            return Err(Error::InvalidInput(format!(
                "transition matrix must be {l}x{l}"
            )));
        }
        for i in spec.letters() {
            let row = &transition[(i - 1) as usize];
            let mut sum = 0.0;
            for j in spec.letters() {
                let p = row[(j - 1) as usize];
                let allowed = spec.is_allowed(i, j)?;
                if allowed && p <= 0.0 {
                    return Err(Error::UnsupportedMeasure(format!(
                        "allowed pair ({i},{j}) has zero probability; support must be all of the shift space"
                    )));
                }
                if !allowed && p != 0.0 {
                    return Err(Error::UnsupportedMeasure(format!(
                        "forbidden pair ({i},{j}) has positive probability {p}"
                    )));
                }
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidInput(format!(
                        "transition[{i}][{j}] = {p} outside [0, 1]"
                    )));
                }
                sum += p;
            }
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidInput(format!(
                    "row {i} sums to {sum}, not 1 within {ROW_SUM_TOL}"
                )));
            }
        }
        check_irreducible_aperiodic(&spec)?;
        let stationary = stationary_by_power_iteration(&transition)?;
        if stationary.iter().any(|&p| p <= 0.0) {
            return Err(Error::UnsupportedMeasure(
                "stationary vector has a non-positive entry".into(),
            ));
        }
        Ok(MarkovMeasure {
            spec,
            transition,
            stationary,
        })
    }

    /// Default measure: uniform over the allowed successors of each letter.
    pub fn from_spec_uniform(spec: SftSpec) -> Result<Self> {
        let l = spec.alphabet_size() as usize;
        let mut transition = vec![vec![0.0; l]; l];
        for i in spec.letters() {
            let succ = spec.successors(i);
            if succ.is_empty() {
                return Err(Error::UnsupportedMeasure(format!(
                    "letter {i} has no allowed successors"
                )));
            }
            let p = 1.0 / succ.len() as f64;
            for j in succ {
                transition[(i - 1) as usize][(j - 1) as usize] = p;
            }
        }
        MarkovMeasure::new(spec, transition)
    }

    pub fn spec(&self) -> &SftSpec {
        &self.spec
    }

    pub fn transition(&self, i: Letter, j: Letter) -> f64 {
        self.transition[(i - 1) as usize][(j - 1) as usize]
    }

    pub fn stationary(&self, i: Letter) -> f64 {
        self.stationary[(i - 1) as usize]
    }

    pub fn stationary_vector(&self) -> &[f64] {
        &self.stationary
    }

    /// `g`-step transition probability, by repeated matrix-vector products.
    pub fn transition_power(&self, i: Letter, j: Letter, g: u32) -> f64 {
        let l = self.spec.alphabet_size() as usize;
        let mut row = vec![0.0; l];
        row[(i - 1) as usize] = 1.0;
        for _ in 0..g {
            let mut next = vec![0.0; l];
            for (a, &pa) in row.iter().enumerate() {
                if pa == 0.0 {
                    continue;
                }
                for (b, next_b) in next.iter_mut().enumerate() {
                    *next_b += pa * self.transition[a][b];
                }
            }
            row = next;
        }
        row[(j - 1) as usize]
    }

    /// Measure of the cylinder fixing `word` on its window. Shift-invariant
    /// (independent of the offset); inadmissible words name the empty set
    /// and get measure 0.
    pub fn cylinder_measure(&self, word: &Word) -> Result<f64> {
        for &s in word.symbols() {
            self.spec.check_letter(s)?;
        }
        let mut mass = self.stationary(word.symbols()[0]);
        for pair in word.symbols().windows(2) {
            mass *= self.transition(pair[0], pair[1]);
        }
        Ok(mass)
    }

    /// Correlation ratio `mu(C1 ∩ C2) / (mu(C1)·mu(C2))` for two disjoint
    /// cylinders with `w2` strictly to the right of `w1`. Evaluates exactly
    /// as `P^g[last(w1)][first(w2)] / pi(first(w2))` where `g` is the index
    /// gap. Empty cylinders have no defined ratio.
    pub fn distortion_ratio(&self, w1: &Word, w2: &Word) -> Result<f64> {
        let gap = w2.first_index() - w1.last_index();
        if gap < 1 {
            return Err(Error::InvalidInput(format!(
                "cylinder windows overlap or touch out of order (gap {gap})"
            )));
        }
        for (name, w) in [("first", w1), ("second", w2)] {
            if self.cylinder_measure(w)? == 0.0 {
                return Err(Error::UndefinedRatio(format!(
                    "{name} cylinder is empty"
                )));
            }
        }
        let from = *w1.symbols().last().expect("words are non-empty");
        let to = w2.symbols()[0];
        Ok(self.transition_power(from, to, gap as u32) / self.stationary(to))
    }

    /// Exact two-sided sample covering `[-n_left, n_right]`: the origin
    /// letter is drawn from the stationary vector, the future from the
    /// chain, the past from the time-reversed chain. Deterministic in
    /// `seed`; parallel callers must use distinct seeds.
    pub fn sample(&self, seed: u64, n_left: usize, n_right: usize) -> Word {
        let mut rng = seeded_rng(seed);
        let origin = draw(&mut rng, &self.stationary);
        let mut future = Vec::with_capacity(n_right);
        let mut current = origin;
        for _ in 0..n_right {
            current = draw(&mut rng, &self.transition[current]);
            future.push(current);
        }
        let reversed = self.reversed_transition();
        let mut past = Vec::with_capacity(n_left);
        current = origin;
        for _ in 0..n_left {
            current = draw(&mut rng, &reversed[current]);
            past.push(current);
        }
        past.reverse();
        let symbols: Vec<Letter> = past
            .into_iter()
            .chain(std::iter::once(origin))
            .chain(future)
            .map(|idx| idx as Letter + 1)
            .collect();
        Word::new(-(n_left as i64), symbols).expect("sampled word is non-empty")
    }

    /// Time-reversed chain `P_rev[j][i] = pi(i) P[i][j] / pi(j)`,
    /// row-stochastic with the same stationary vector.
    pub fn reversed_transition(&self) -> Vec<Vec<f64>> {
        let l = self.spec.alphabet_size() as usize;
        let mut rev = vec![vec![0.0; l]; l];
        for i in 0..l {
            for j in 0..l {
                rev[j][i] = self.stationary[i] * self.transition[i][j] / self.stationary[j];
            }
        }
        rev
    }
}

/// Inverse-CDF draw over a probability row; returns a 0-based index.
fn draw<R: Rng>(rng: &mut R, row: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (idx, &p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return idx;
        }
    }
    // Rounding pushed the cumulative sum below u; return the last positive entry.
    row.iter().rposition(|&p| p > 0.0).unwrap_or(row.len() - 1)
}

fn stationary_by_power_iteration(transition: &[Vec<f64>]) -> Result<Vec<f64>> {
    let l = transition.len();
    let mut pi = vec![1.0 / l as f64; l];
    for _ in 0..POWER_ITERATION_CAP {
        let mut next = vec![0.0; l];
        for (i, row) in transition.iter().enumerate() {
            for (j, &p) in row.iter().enumerate() {
                next[j] += pi[i] * p;
            }
        }
        let norm: f64 = next.iter().sum();
        for x in &mut next {
            *x /= norm;
        }
        let delta = pi
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        pi = next;
        if delta < STATIONARY_TOL {
            return Ok(pi);
        }
    }
    Err(Error::UnsupportedMeasure(format!(
        "power iteration did not reach {STATIONARY_TOL} within {POWER_ITERATION_CAP} sweeps"
    )))
}

/// Irreducibility (strong connectivity of the allowed graph over the whole
/// alphabet) and aperiodicity (gcd of cycle lengths is 1).
fn check_irreducible_aperiodic(spec: &SftSpec) -> Result<()> {
    let l = spec.alphabet_size() as usize;
    let reachable = |start: usize, forward: bool| -> Vec<bool> {
        let mut seen = vec![false; l];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for w in 0..l {
                let edge = if forward {
                    !spec.forbidden().contains(&((v + 1) as Letter, (w + 1) as Letter))
                } else {
                    !spec.forbidden().contains(&((w + 1) as Letter, (v + 1) as Letter))
                };
                if edge && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    };
    if reachable(0, true).iter().any(|&r| !r) || reachable(0, false).iter().any(|&r| !r) {
        return Err(Error::UnsupportedMeasure(
            "allowed-transition graph is reducible".into(),
        ));
    }
    // Period = gcd over edges u -> v of (depth(u) + 1 - depth(v)), depths
    // from a BFS rooted anywhere in the (strongly connected) graph.
    let mut depth = vec![None::<i64>; l];
    let mut queue = std::collections::VecDeque::from([0usize]);
    depth[0] = Some(0);
    while let Some(v) = queue.pop_front() {
        for w in 0..l {
            if spec.forbidden().contains(&((v + 1) as Letter, (w + 1) as Letter)) {
                continue;
            }
            if depth[w].is_none() {
                depth[w] = Some(depth[v].unwrap() + 1);
                queue.push_back(w);
            }
        }
    }
    let mut period = 0i64;
    for v in 0..l {
        for w in 0..l {
            if spec.forbidden().contains(&((v + 1) as Letter, (w + 1) as Letter)) {
                continue;
            }
            let diff = depth[v].unwrap() + 1 - depth[w].unwrap();
            period = gcd(period, diff.abs());
        }
    }
    if period != 1 {
        return Err(Error::UnsupportedMeasure(format!(
            "allowed-transition graph is periodic with period {period}"
        )));
    }
    Ok(())
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
