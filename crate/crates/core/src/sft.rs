//! Shift spaces of finite type.
//!
//! The configuration space is the set of bi-infinite sequences over the
//! alphabet `{1, …, ℓ}` in which no adjacent pair belongs to a finite
//! forbidden set. Infinite sequences are represented by finite windows
//! ([`Word`]); every operation states the window it reads and treats an
//! insufficient window as a hard error rather than truncating silently.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A symbol of the alphabet, valued in `1..=alphabet_size`.
pub type Letter = u8;

/// Alphabet size plus the set of forbidden adjacent pairs.
///
/// Valid specs have at least two letters and an allowed-transition graph
/// that still carries a bi-infinite path after dead ends are pruned.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SftSpecData", into = "SftSpecData")]
pub struct SftSpec {
    alphabet_size: Letter,
    forbidden: BTreeSet<(Letter, Letter)>,
}

/// Raw serialization shape: `{"alphabet_size": 2, "forbidden": [[1,2], …]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct SftSpecData {
    alphabet_size: Letter,
    forbidden: Vec<(Letter, Letter)>,
}

impl TryFrom<SftSpecData> for SftSpec {
    type Error = Error;

    fn try_from(data: SftSpecData) -> Result<Self> {
        SftSpec::new(data.alphabet_size, data.forbidden)
    }
}

impl From<SftSpec> for SftSpecData {
    fn from(spec: SftSpec) -> Self {
        SftSpecData {
            alphabet_size: spec.alphabet_size,
            forbidden: spec.forbidden.into_iter().collect(),
        }
    }
}

impl SftSpec {
    /// Builds a spec, validating the alphabet size, the letter ranges in
    /// `forbidden`, and the existence of a bi-infinite admissible sequence.
    pub fn new(
        alphabet_size: Letter,
        forbidden: impl IntoIterator<Item = (Letter, Letter)>,
    ) -> Result<Self> {
        if alphabet_size < 2 {
            return Err(Error::InvalidInput(format!(
                "alphabet size must be at least 2, got {alphabet_size}"
            )));
        }
        let forbidden: BTreeSet<(Letter, Letter)> = forbidden.into_iter().collect();
        for &(i, j) in &forbidden {
            if !(1..=alphabet_size).contains(&i) || !(1..=alphabet_size).contains(&j) {
                return Err(Error::InvalidInput(format!(
                    "forbidden pair ({i},{j}) outside alphabet 1..={alphabet_size}"
                )));
            }
        }
        let spec = SftSpec {
            alphabet_size,
            forbidden,
        };
        if spec.bi_infinite_core().is_empty() {
            return Err(Error::InvalidInput(
                "allowed-transition graph admits no bi-infinite sequence".into(),
            ));
        }
        Ok(spec)
    }

    /// Full shift on `alphabet_size` letters: nothing forbidden.
    pub fn full_shift(alphabet_size: Letter) -> Result<Self> {
        SftSpec::new(alphabet_size, [])
    }

    pub fn alphabet_size(&self) -> Letter {
        self.alphabet_size
    }

    pub fn forbidden(&self) -> &BTreeSet<(Letter, Letter)> {
        &self.forbidden
    }

    /// Iterator over the alphabet `1..=ℓ`.
    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        1..=self.alphabet_size
    }

    pub fn check_letter(&self, letter: Letter) -> Result<()> {
        if (1..=self.alphabet_size).contains(&letter) {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "letter {letter} outside alphabet 1..={}",
                self.alphabet_size
            )))
        }
    }

    /// Whether the transition `i → j` is allowed. Letters must be in range.
    pub fn is_allowed(&self, i: Letter, j: Letter) -> Result<bool> {
        self.check_letter(i)?;
        self.check_letter(j)?;
        Ok(!self.forbidden.contains(&(i, j)))
    }

    /// Allowed successors of `letter`.
    pub fn successors(&self, letter: Letter) -> Vec<Letter> {
        self.letters()
            .filter(|&j| !self.forbidden.contains(&(letter, j)))
            .collect()
    }

    /// Allowed predecessors of `letter`.
    pub fn predecessors(&self, letter: Letter) -> Vec<Letter> {
        self.letters()
            .filter(|&i| !self.forbidden.contains(&(i, letter)))
            .collect()
    }

    /// Letters that survive iterated pruning of vertices with no allowed
    /// successor or no allowed predecessor. Every surviving letter lies on
    /// some bi-infinite admissible sequence.
    pub fn bi_infinite_core(&self) -> Vec<Letter> {
        let mut alive: BTreeSet<Letter> = self.letters().collect();
        loop {
            let dead: Vec<Letter> = alive
                .iter()
                .copied()
                .filter(|&v| {
                    let has_out = alive.iter().any(|&w| !self.forbidden.contains(&(v, w)));
                    let has_in = alive.iter().any(|&w| !self.forbidden.contains(&(w, v)));
                    !(has_out && has_in)
                })
                .collect();
            if dead.is_empty() {
                break;
            }
            for v in dead {
                alive.remove(&v);
            }
        }
        alive.into_iter().collect()
    }
}

/// A finite window of a two-sided sequence: symbols occupying the integer
/// indices `offset, offset+1, …, offset+len-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word {
    offset: i64,
    symbols: Vec<Letter>,
}

impl Word {
    /// Non-empty window with all symbols at least 1. Upper range and
    /// admissibility are properties relative to a spec and are checked by
    /// the operations that need them.
    pub fn new(offset: i64, symbols: Vec<Letter>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidInput("word must have length >= 1".into()));
        }
        if let Some(&bad) = symbols.iter().find(|&&s| s == 0) {
            return Err(Error::InvalidInput(format!(
                "letter {bad} invalid; letters start at 1"
            )));
        }
        Ok(Word { offset, symbols })
    }

    /// Constant window `letter^len` covering `[offset, offset+len-1]`.
    pub fn constant(offset: i64, len: usize, letter: Letter) -> Result<Self> {
        Word::new(offset, vec![letter; len])
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false // length >= 1 by construction
    }

    pub fn symbols(&self) -> &[Letter] {
        &self.symbols
    }

    /// First covered index.
    pub fn first_index(&self) -> i64 {
        self.offset
    }

    /// Last covered index.
    pub fn last_index(&self) -> i64 {
        self.offset + self.symbols.len() as i64 - 1
    }

    pub fn covers(&self, lo: i64, hi: i64) -> bool {
        self.first_index() <= lo && hi <= self.last_index()
    }

    /// Symbol at sequence index `i`, or `None` outside the window.
    pub fn get(&self, i: i64) -> Option<Letter> {
        if i < self.first_index() || i > self.last_index() {
            None
        } else {
            Some(self.symbols[(i - self.offset) as usize])
        }
    }

    /// Symbol at sequence index `i`; insufficient window is a hard error.
    pub fn letter(&self, i: i64) -> Result<Letter> {
        self.get(i).ok_or_else(|| {
            Error::InvalidInput(format!(
                "window [{}, {}] does not cover index {i}",
                self.first_index(),
                self.last_index()
            ))
        })
    }

    /// Demands that the window covers `[lo, hi]`.
    pub fn require_window(&self, lo: i64, hi: i64) -> Result<()> {
        if self.covers(lo, hi) {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "operation reads indices [{lo}, {hi}] but window is [{}, {}]",
                self.first_index(),
                self.last_index()
            )))
        }
    }
}

/// True iff no adjacent pair of `word` is forbidden by `spec`.
/// Letters outside `1..=ℓ` are an error, not `false`.
pub fn is_admissible(word: &Word, spec: &SftSpec) -> Result<bool> {
    for &s in word.symbols() {
        spec.check_letter(s)?;
    }
    Ok(word
        .symbols()
        .windows(2)
        .all(|pair| !spec.forbidden().contains(&(pair[0], pair[1]))))
}

/// Shift by `m`: the symbol formerly at index `m` sits at index 0 of the
/// result. Composing shifts adds the amounts.
pub fn shift(word: &Word, m: i64) -> Word {
    Word {
        offset: word.offset - m,
        symbols: word.symbols.clone(),
    }
}

/// Metric on sequences known through finite windows: `e^{-N}` where `N` is
/// the largest non-negative integer with agreement at all `|n| < N`.
///
/// Both windows must contain index 0. If the words agree on the whole
/// common symmetric window, the true `N` is unobservable and the distance
/// is reported as 0 ("as if equal").
pub fn distance(a: &Word, b: &Word) -> Result<f64> {
    for w in [a, b] {
        if w.get(0).is_none() {
            return Err(Error::InvalidInput(format!(
                "distance window [{}, {}] does not contain index 0",
                w.first_index(),
                w.last_index()
            )));
        }
    }
    // Largest symmetric window [-radius, radius] covered by both words.
    let radius = (-a.first_index())
        .min(a.last_index())
        .min(-b.first_index())
        .min(b.last_index());
    for n in 0..=radius {
        for i in [n, -n] {
            if a.get(i) != b.get(i) {
                return Ok((-(n as f64)).exp());
            }
        }
    }
    Ok(0.0)
}

/// Outcome of the dynamical hypothesis check: the shift must have at least
/// one fixed point (a letter with an allowed self-loop) and at least one
/// non-constant bi-infinite sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HypothesesReport {
    /// Letters `j` with `(j, j)` allowed; each is a fixed point of the shift.
    pub fixed_letters: Vec<Letter>,
    /// Whether a non-constant bi-infinite admissible sequence exists.
    pub non_constant_exists: bool,
    /// Letters on the bi-infinite core of the allowed graph.
    pub core_letters: Vec<Letter>,
    pub pass: bool,
}

/// Checks the two dynamical hypotheses by graph analysis (no sampling):
/// fixed points are letters with allowed self-loops; a non-constant
/// sequence exists iff the bi-infinite core contains an edge between two
/// distinct letters.
pub fn check_theorem_hypotheses(spec: &SftSpec) -> HypothesesReport {
    let fixed_letters: Vec<Letter> = spec
        .letters()
        .filter(|&j| !spec.forbidden().contains(&(j, j)))
        .collect();
    let core = spec.bi_infinite_core();
    // Every core vertex extends to a bi-infinite path, so any non-loop core
    // edge lies on a non-constant admissible sequence.
    let non_constant_exists = core.iter().any(|&i| {
        core.iter()
            .any(|&j| i != j && !spec.forbidden().contains(&(i, j)))
    });
    let pass = !fixed_letters.is_empty() && non_constant_exists;
    HypothesesReport {
        fixed_letters,
        non_constant_exists,
        core_letters: core,
        pass,
    }
}
