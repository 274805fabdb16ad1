//! Reproducible experiment drivers.
//!
//! Every experiment is a pure function of its configuration (seed
//! included): reruns produce bit-identical tables regardless of thread
//! count, because per-task seeds are derived deterministically and results
//! are reduced in index order. Each driver returns a typed result that
//! knows how to render its CSV data section; callers persist the files.

mod avalanche;
mod config;
mod doubling;
mod green_check;
mod holder;
mod ldt;
mod localize;
mod lyapunov_scan;
pub mod stats;

pub use avalanche::{avalanche_verify, AvalancheReport};
pub use config::{uniform_k_grid, ExperimentConfig, WordSource};
pub use doubling::{lyapunov_doubling, DoublingResult, DoublingRow};
pub use green_check::{green_check, CorruptAlpha, GreenCheckReport};
pub use holder::{holder_fit, HolderFit};
pub use ldt::{ldt_tail, LdtResult, LdtRow, SlopeFit};
pub use localize::{localization_experiment, EigenstateRecord, LocalizationResult};
pub use lyapunov_scan::{find_zero_candidates, scan_lyapunov, LyapunovRow, LyapunovTable};
