//! Runtime self-check of the determinant/resolvent/transfer identities.
//!
//! Draws random blocks and verifies, per instance: (a) every resolvent
//! column solves its defining linear system, (b) the determinant route to
//! the transfer matrix agrees with the multiplicative route, (c) the
//! bridge coupling products respect their universal bound 2. Supports
//! deliberate fault injection (scaling one coupling of the verification
//! operator) so pipelines can prove the check has teeth.

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::cocycle::{product, WordSampler};
use crate::jacobi::{build, green, transfer_from_dets};
use crate::rng::{derive_seed, seeded_rng};
use crate::sl2::LogNormProduct;
use crate::{Error, Result};
use rand::Rng;

/// Fault injection: scale one coupling of the operator used to verify the
/// resolvent columns.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CorruptAlpha {
    pub index: usize,
    pub scale: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GreenCheckReport {
    pub instances: usize,
    pub max_resolvent_residual: f64,
    pub max_transfer_mismatch: f64,
    pub max_bridge_product: f64,
    pub failures: Vec<String>,
    pub pass: bool,
}

impl GreenCheckReport {
    pub fn to_csv(&self) -> String {
        format!(
            "instances,max_resolvent_residual,max_transfer_mismatch,max_bridge_product,failures,pass\n{},{},{},{},{},{}\n",
            self.instances,
            self.max_resolvent_residual,
            self.max_transfer_mismatch,
            self.max_bridge_product,
            self.failures.len(),
            self.pass
        )
    }
}

const RESOLVENT_TOL: f64 = 1e-8;
const TRANSFER_TOL: f64 = 1e-8;

/// Runs `instances` random cross-checks with block sizes up to `n_max`.
/// Each instance draws its own window and momentum from the config's seed
/// stream and grid range.
pub fn green_check(
    cfg: &ExperimentConfig,
    instances: usize,
    n_max: usize,
    corrupt: Option<CorruptAlpha>,
) -> Result<GreenCheckReport> {
    if instances == 0 || n_max < 2 {
        return Err(Error::InvalidInput(format!(
            "need instances >= 1 and n_max >= 2, got {instances}, {n_max}"
        )));
    }
    let mut failures = Vec::new();
    let mut max_res = 0.0f64;
    let mut max_transfer = 0.0f64;
    let mut max_bridge = 0.0f64;

    for inst in 0..instances {
        let mut rng = seeded_rng(derive_seed(cfg.seed(), inst as u64));
        let n = rng.random_range(2..=n_max);
        let grid = cfg.energy_grid();
        let en = grid[rng.random_range(0..grid.len())];
        let word = cfg
            .source()
            .sample_window(derive_seed(cfg.seed(), (instances + inst) as u64), 2, n + 1);

        // (a) Resolvent columns solve (H - x)·g_col = e_col.
        let block = build(&word, n)?;
        let verify_block = match corrupt {
            Some(c) => block.with_scaled_coupling(c.index.min(n.saturating_sub(2)), c.scale)?,
            None => block.clone(),
        };
        let mut columns = Vec::with_capacity(n);
        let mut resonant = false;
        for col in 0..n {
            let entries: Result<Vec<f64>> = (0..n).map(|row| green(&word, n, &en, row, col)).collect();
            match entries {
                Ok(v) => columns.push(v),
                Err(Error::ResonantEnergy { .. }) => {
                    resonant = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if resonant {
            continue; // grid point collided with the spectrum; skip instance
        }
        for (col, g_col) in columns.iter().enumerate() {
            let image = verify_block.apply(g_col);
            let scale: f64 = g_col.iter().fold(1.0f64, |m, x| m.max(x.abs()))
                * (verify_block.gershgorin_bound() + en.e_tilde().abs());
            for row in 0..n {
                let want = if row == col { 1.0 } else { 0.0 };
                let resid = (image[row] - en.e_tilde() * g_col[row] - want).abs() / scale;
                max_res = max_res.max(resid);
                if resid > RESOLVENT_TOL {
                    failures.push(format!(
                        "instance {inst}: resolvent residual {resid:.3e} at ({row}, {col})"
                    ));
                }
            }
        }

        // (b) Determinant route vs multiplicative route.
        let from_dets = transfer_from_dets(&word, n, &en)?;
        let direct = product(&word, &en, n as i64)?;
        let mismatch = LogNormProduct::from_matrix(&from_dets).relative_difference(&direct);
        max_transfer = max_transfer.max(mismatch);
        if mismatch > TRANSFER_TOL {
            failures.push(format!(
                "instance {inst}: transfer mismatch {mismatch:.3e} at n = {n}"
            ));
        }

        // (c) Bridge products bounded by 2.
        for j in 0..block.couplings().len() {
            let mut prod = 1.0;
            for &a in &block.couplings()[j..] {
                prod *= a;
                max_bridge = max_bridge.max(prod);
                if prod > 2.0 + 1e-12 {
                    failures.push(format!("instance {inst}: bridge product {prod} > 2"));
                }
            }
        }
    }

    Ok(GreenCheckReport {
        instances,
        max_resolvent_residual: max_res,
        max_transfer_mismatch: max_transfer,
        max_bridge_product: max_bridge,
        pass: failures.is_empty(),
        failures,
    })
}
