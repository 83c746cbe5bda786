//! Quasiprobability error mitigation: probabilistic error cancellation
//! against per-gate Pauli noise and space-time noise inversion over whole
//! circuit segments.

pub mod pec;
pub mod sni;

use serde::{Deserialize, Serialize};

pub use pec::{invert_pauli_channel, pec_estimate, pec_exhaustive, pec_expectation, QuasiProbDecomposition};
pub use sni::{sni_estimate, sni_overhead, sni_plan, SniOverhead, SniPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MitigationMode {
    #[default]
    None,
    Pec,
    Sni,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MitigatedEstimate {
    pub mean: f64,
    /// Variance of `mean`.
    pub variance: f64,
    /// Variance of one reweighted shot.
    pub shot_variance: f64,
    pub stderr: f64,
    pub gamma: f64,
    pub shots: usize,
    pub mode: MitigationMode,
}

impl MitigatedEstimate {
    pub(crate) fn from_stats(stats: crate::stats::ShotStats, gamma: f64, mode: MitigationMode) -> Self {
        let variance = stats.variance() / stats.count as f64;
        MitigatedEstimate {
            mean: stats.mean,
            variance,
            shot_variance: stats.variance(),
            stderr: variance.sqrt(),
            gamma,
            shots: stats.count,
            mode,
        }
    }
}
