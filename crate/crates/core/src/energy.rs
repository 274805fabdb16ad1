//! Energy bookkeeping.
//!
//! Three coordinates describe the same spectral point: the continuum energy
//! `E = k²`, the momentum `k`, and the discrete parameter `2·cos(k)`. The
//! bundle is kept consistent in one place so no caller ever recomputes a
//! branch by hand.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default exclusion margin around multiples of π for the momentum.
pub const DEFAULT_K_MARGIN: f64 = 1e-6;

const CONSISTENCY_TOL: f64 = 1e-12;

/// Consistent bundle `(E, k, 2 cos k)` with `E = k² ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EnergyTripleData", into = "EnergyTripleData")]
pub struct EnergyTriple {
    energy: f64,
    k: f64,
    e_tilde: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct EnergyTripleData {
    energy: f64,
    k: f64,
    e_tilde: f64,
}

impl TryFrom<EnergyTripleData> for EnergyTriple {
    type Error = Error;

    fn try_from(d: EnergyTripleData) -> Result<Self> {
        let t = EnergyTriple::from_k(d.k)?;
        if (t.energy - d.energy).abs() > CONSISTENCY_TOL * d.energy.abs().max(1.0)
            || (t.e_tilde - d.e_tilde).abs() > CONSISTENCY_TOL
        {
            return Err(Error::InvalidInput(format!(
                "inconsistent energy triple: E = {}, k = {}, 2cos k = {}",
                d.energy, d.k, d.e_tilde
            )));
        }
        Ok(t)
    }
}

impl From<EnergyTriple> for EnergyTripleData {
    fn from(t: EnergyTriple) -> Self {
        EnergyTripleData {
            energy: t.energy,
            k: t.k,
            e_tilde: t.e_tilde,
        }
    }
}

impl EnergyTriple {
    /// From a momentum `k > 0`: `E = k²`, discrete parameter `2 cos k`.
    pub fn from_k(k: f64) -> Result<Self> {
        if !k.is_finite() || k <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "momentum must be finite and positive, got {k}"
            )));
        }
        Ok(EnergyTriple {
            energy: k * k,
            k,
            e_tilde: 2.0 * k.cos(),
        })
    }

    /// From an energy `E > 0`, taking the principal momentum `k = √E`.
    pub fn from_energy(energy: f64) -> Result<Self> {
        if !energy.is_finite() || energy <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "energy must be finite and positive, got {energy}"
            )));
        }
        EnergyTriple::from_k(energy.sqrt())
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// The discrete spectral parameter `2 cos k`.
    pub fn e_tilde(&self) -> f64 {
        self.e_tilde
    }

    pub fn cos_k(&self) -> f64 {
        self.e_tilde / 2.0
    }

    /// Distance from `k` to the nearest multiple of π.
    pub fn k_distance_to_pi_grid(&self) -> f64 {
        let r = self.k.rem_euclid(std::f64::consts::PI);
        r.min(std::f64::consts::PI - r)
    }

    /// Transfer-matrix guard: `k` must stay `margin` away from πℤ or the
    /// 1/sin(k) factors downstream blow up.
    pub fn check_k_margin(&self, margin: f64) -> Result<()> {
        if self.k_distance_to_pi_grid() < margin {
            Err(Error::SingularEnergy { k: self.k, margin })
        } else {
            Ok(())
        }
    }

    /// Guard with the crate default margin.
    pub fn check_default_margin(&self) -> Result<()> {
        self.check_k_margin(DEFAULT_K_MARGIN)
    }
}

/// Principal-branch energy for a discrete parameter `x = 2 cos k`:
/// `k = arccos(x/2) ∈ (0, π)`, `E = k²`.
pub fn energy_from_e_tilde(e_tilde: f64) -> Result<EnergyTriple> {
    if !(-2.0..=2.0).contains(&e_tilde) {
        return Err(Error::InvalidInput(format!(
            "discrete parameter {e_tilde} outside [-2, 2]"
        )));
    }
    EnergyTriple::from_k((e_tilde / 2.0).acos())
}
