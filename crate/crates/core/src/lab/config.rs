//! Experiment configuration.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cocycle::WordSampler;
use crate::energy::{EnergyTriple, DEFAULT_K_MARGIN};
use crate::markov::MarkovMeasure;
use crate::sft::{Letter, SftSpec, Word};
use crate::{Error, Result};

/// Where disorder windows come from.
///
/// The Markov variant is the generic ergodic setting; the constant variant
/// is the degenerate point mass on a fixed point of the shift, used as the
/// zero-exponent control (it cannot be expressed as a [`MarkovMeasure`],
/// whose support must be the whole space).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WordSource {
    Markov(MarkovMeasure),
    Constant { spec: SftSpec, letter: Letter },
}

impl WordSource {
    pub fn constant(spec: SftSpec, letter: Letter) -> Result<Self> {
        spec.check_letter(letter)?;
        if !spec.is_allowed(letter, letter)? {
            return Err(Error::InvalidInput(format!(
                "letter {letter} has no allowed self-loop; the constant sequence is inadmissible"
            )));
        }
        Ok(WordSource::Constant { spec, letter })
    }

    pub fn spec(&self) -> &SftSpec {
        match self {
            WordSource::Markov(m) => m.spec(),
            WordSource::Constant { spec, .. } => spec,
        }
    }
}

impl WordSampler for WordSource {
    fn sample_window(&self, seed: u64, n_left: usize, n_right: usize) -> Word {
        match self {
            WordSource::Markov(m) => m.sample(seed, n_left, n_right),
            WordSource::Constant { letter, .. } => {
                Word::constant(-(n_left as i64), n_left + n_right + 1, *letter)
                    .expect("constant window is non-empty")
            }
        }
    }
}

/// One experiment's full parameter set.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "ExperimentConfigData", into = "ExperimentConfigData")]
pub struct ExperimentConfig {
    source: WordSource,
    energy_grid: Vec<EnergyTriple>,
    n: usize,
    samples: usize,
    seed: u64,
    tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ExperimentConfigData {
    source: WordSource,
    energy_grid: Vec<EnergyTriple>,
    n: usize,
    samples: usize,
    seed: u64,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
}

impl TryFrom<ExperimentConfigData> for ExperimentConfig {
    type Error = Error;

    fn try_from(d: ExperimentConfigData) -> Result<Self> {
        ExperimentConfig::new(d.source, d.energy_grid, d.n, d.samples, d.seed, d.tolerances)
    }
}

impl From<ExperimentConfig> for ExperimentConfigData {
    fn from(c: ExperimentConfig) -> Self {
        ExperimentConfigData {
            source: c.source,
            energy_grid: c.energy_grid,
            n: c.n,
            samples: c.samples,
            seed: c.seed,
            tolerances: c.tolerances,
        }
    }
}

impl ExperimentConfig {
    pub fn new(
        source: WordSource,
        energy_grid: Vec<EnergyTriple>,
        n: usize,
        samples: usize,
        seed: u64,
        tolerances: BTreeMap<String, f64>,
    ) -> Result<Self> {
        if n < 1 || samples < 1 {
            return Err(Error::InvalidInput(format!(
                "need n >= 1 and samples >= 1, got n = {n}, samples = {samples}"
            )));
        }
        if energy_grid.is_empty() {
            return Err(Error::InvalidInput("energy grid is empty".into()));
        }
        let cfg = ExperimentConfig {
            source,
            energy_grid,
            n,
            samples,
            seed,
            tolerances,
        };
        let margin = cfg.k_margin();
        for en in &cfg.energy_grid {
            en.check_k_margin(margin)?;
        }
        Ok(cfg)
    }

    pub fn source(&self) -> &WordSource {
        &self.source
    }

    pub fn spec(&self) -> &SftSpec {
        self.source.spec()
    }

    pub fn energy_grid(&self) -> &[EnergyTriple] {
        &self.energy_grid
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Named tolerance with a fallback.
    pub fn tolerance(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }

    pub fn tolerances(&self) -> &BTreeMap<String, f64> {
        &self.tolerances
    }

    pub fn k_margin(&self) -> f64 {
        self.tolerance("k_margin", DEFAULT_K_MARGIN)
    }
}

/// Uniform momentum grid: `points` values of `k` equally spaced over
/// `[k_min, k_max]`.
pub fn uniform_k_grid(k_min: f64, k_max: f64, points: usize) -> Result<Vec<EnergyTriple>> {
    if points == 0 || !(k_min < k_max) {
        return Err(Error::InvalidInput(format!(
            "bad grid: k_min = {k_min}, k_max = {k_max}, points = {points}"
        )));
    }
    if points == 1 {
        return Ok(vec![EnergyTriple::from_k(0.5 * (k_min + k_max))?]);
    }
    (0..points)
        .map(|i| {
            let k = k_min + (k_max - k_min) * i as f64 / (points - 1) as f64;
            EnergyTriple::from_k(k)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn markov_source() -> WordSource {
        WordSource::Markov(
            MarkovMeasure::from_spec_uniform(SftSpec::full_shift(2).unwrap()).unwrap(),
        )
    }

    #[test]
    fn grid_endpoints_and_count() {
        let grid = uniform_k_grid(0.3, 2.8, 6).unwrap();
        assert_eq!(grid.len(), 6);
        assert!((grid[0].k() - 0.3).abs() < 1e-15);
        assert!((grid[5].k() - 2.8).abs() < 1e-15);
    }

    #[test]
    fn config_rejects_singular_grid_point() {
        let grid = vec![EnergyTriple::from_k(std::f64::consts::PI - 1e-9).unwrap()];
        let err = ExperimentConfig::new(markov_source(), grid, 10, 10, 0, BTreeMap::new());
        assert!(matches!(err, Err(Error::SingularEnergy { .. })));
    }

    #[test]
    fn config_margin_is_tunable() {
        let grid = vec![EnergyTriple::from_k(std::f64::consts::PI - 1e-5).unwrap()];
        let mut tol = BTreeMap::new();
        tol.insert("k_margin".to_string(), 1e-6);
        assert!(ExperimentConfig::new(markov_source(), grid, 10, 10, 0, tol).is_ok());
    }

    #[test]
    fn constant_source_needs_self_loop() {
        let spec = SftSpec::new(2, [(1, 1)]).unwrap();
        assert!(WordSource::constant(spec.clone(), 1).is_err());
        assert!(WordSource::constant(spec, 2).is_ok());
    }

    #[test]
    fn constant_source_samples_constant_windows() {
        use crate::cocycle::WordSampler;
        let src = WordSource::constant(SftSpec::full_shift(2).unwrap(), 1).unwrap();
        let w = src.sample_window(7, 3, 5);
        assert_eq!(w.first_index(), -3);
        assert_eq!(w.last_index(), 5);
        assert!(w.symbols().iter().all(|&s| s == 1));
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = ExperimentConfig::new(
            markov_source(),
            uniform_k_grid(0.5, 2.5, 3).unwrap(),
            100,
            10,
            42,
            BTreeMap::new(),
        )
        .unwrap();
        let json = serde_json::to_string(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back.n(), 100);
        assert_eq!(back.seed(), 42);
        assert_eq!(back.energy_grid().len(), 3);
    }
}
