//! Probabilistic error cancellation with Pauli corrections.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rayon::prelude::*;

use crate::channels::{self, conjugate_by_pauli, real_trace_product, DensityMatrix, PauliMap, StochasticPauliChannel};
use crate::circuit::NoisyCircuit;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, DenseOperator};
use crate::mitigation::{MitigatedEstimate, MitigationMode};
use crate::pauli::{symplectic_commutes, PauliString};
use crate::stats::run_shots;

/// Largest number of correction paths `pec_exhaustive` will enumerate.
pub const MAX_PEC_PATHS: f64 = 1e6;

const SINGULAR_TOL: f64 = 1e-12;

/// Signed weights over Pauli corrections: `N^{-1} = sum_i q_i P_i . P_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiProbDecomposition {
    map: PauliMap,
    gamma: f64,
}

impl QuasiProbDecomposition {
    pub fn new(map: PauliMap) -> Result<Self> {
        if map.terms().is_empty() {
            return Err(Error::DegenerateInput("empty quasiprobability decomposition".into()));
        }
        let gamma = map.one_norm();
        Ok(QuasiProbDecomposition { map, gamma })
    }

    pub fn identity(n_qubits: usize) -> Self {
        QuasiProbDecomposition { map: PauliMap::identity(n_qubits), gamma: 1.0 }
    }

    /// `(q_i, P_i)` pairs, identity first.
    pub fn entries(&self) -> impl Iterator<Item = (f64, &PauliString)> {
        self.map.terms().iter().map(|(p, w)| (*w, p))
    }

    pub fn len(&self) -> usize {
        self.map.terms().len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.terms().is_empty()
    }

    /// `Gamma = sum_i |q_i|`.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `p_i = |q_i| / Gamma`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.map.terms().iter().map(|(_, w)| w.abs() / self.gamma).collect()
    }

    pub fn as_map(&self) -> &PauliMap {
        &self.map
    }
}

/// Inverts a stochastic Pauli channel through its Pauli-transfer
/// eigenvalues on the channel support.
pub fn invert_pauli_channel(n: &StochasticPauliChannel) -> Result<QuasiProbDecomposition> {
    let width = n.n_qubits();
    let support = PauliString::all_on_support(width, n.support_mask());
    let eta: Vec<f64> = support.iter().map(|q| n.map().transfer_eigenvalue(q)).collect();
    if let Some(e) = eta.iter().find(|e| e.abs() < SINGULAR_TOL) {
        return Err(Error::NonInvertible(*e));
    }
    let scale = 1.0 / support.len() as f64;
    let weights = support.iter().map(|p| {
        let w: f64 = support
            .iter()
            .zip(&eta)
            .map(|(q, e)| if symplectic_commutes(p, q) { 1.0 / e } else { -1.0 / e })
            .sum();
        (*p, w * scale)
    });
    // exact cancellations leave tiny residues; drop them
    let weights: Vec<_> = weights.filter(|(_, w)| w.abs() > 1e-15).collect();
    QuasiProbDecomposition::new(PauliMap::new(width, weights)?)
}

/// The true-inverse model for every gate of `circuit`.
pub fn model_for_circuit(circuit: &NoisyCircuit) -> Result<Vec<QuasiProbDecomposition>> {
    circuit.gates().iter().map(|g| invert_pauli_channel(&g.noise)).collect()
}

/// `D(Q o N, I)` for a correction model `Q` against the actual noise `N`,
/// exact for Pauli-diagonal maps.
pub fn residual_distance(noise: &StochasticPauliChannel, model: &QuasiProbDecomposition) -> Result<f64> {
    let residual = model.as_map().compose(noise.map())?;
    residual.l1_distance(&PauliMap::identity(noise.n_qubits()))
}

/// `((1 + 2 dg)^{N_G} - 1) / 2`.
pub fn mismatch_bias_bound(delta_gamma: f64, gate_count: usize) -> f64 {
    ((1.0 + 2.0 * delta_gamma).powi(gate_count as i32) - 1.0) / 2.0
}

fn check_model(circuit: &NoisyCircuit, model: &[QuasiProbDecomposition], o: &DenseOperator, rho0: &DensityMatrix) -> Result<()> {
    if model.len() != circuit.len() {
        return Err(Error::Dimension(format!(
            "{} model entries for {} gates",
            model.len(),
            circuit.len()
        )));
    }
    if model.iter().any(|m| m.as_map().n_qubits() != circuit.n_qubits()) {
        return Err(Error::Dimension("model width differs from circuit".into()));
    }
    if o.n_qubits() != circuit.n_qubits() || rho0.n_qubits() != circuit.n_qubits() {
        return Err(Error::Dimension("observable or state width differs from circuit".into()));
    }
    channels::validate_observable(o)
}

/// Total `Gamma = prod_k Gamma_k`.
pub fn pec_gamma(model: &[QuasiProbDecomposition]) -> f64 {
    model.iter().map(QuasiProbDecomposition::gamma).product()
}

/// Sampled PEC: one correction per gate drawn with `p_i`, the sign product
/// carried, and the exact expectation of each corrected circuit averaged.
pub fn pec_estimate(
    circuit: &NoisyCircuit,
    model: &[QuasiProbDecomposition],
    o: &DenseOperator,
    rho0: &DensityMatrix,
    shots: usize,
    seed: u64,
) -> Result<MitigatedEstimate> {
    check_model(circuit, model, o, rho0)?;
    let gamma = pec_gamma(model);
    let samplers: Vec<(WeightedIndex<f64>, Vec<(f64, PauliString)>)> = model
        .iter()
        .map(|m| {
            let w = WeightedIndex::new(m.probabilities()).map_err(|e| Error::DegenerateInput(e.to_string()))?;
            Ok((w, m.entries().map(|(q, p)| (q.signum(), *p)).collect()))
        })
        .collect::<Result<_>>()?;
    let stats = run_shots(shots, seed, |rng, _| {
        let mut sign = 1.0;
        let mut insertions = Vec::with_capacity(samplers.len());
        for (dist, entries) in &samplers {
            let (s, p) = entries[dist.sample(rng)];
            sign *= s;
            insertions.push(p);
        }
        let rho = circuit.evolve_noisy(rho0.matrix(), Some(&insertions))?;
        Ok(gamma * sign * real_trace_product(o.matrix(), &rho))
    })?;
    Ok(MitigatedEstimate::from_stats(stats, gamma, MitigationMode::Pec))
}

/// Exact signed sum over every correction path, enumerated path by path.
/// Capped at `MAX_PEC_PATHS` paths.
pub fn pec_exhaustive(circuit: &NoisyCircuit, model: &[QuasiProbDecomposition], o: &DenseOperator, rho0: &DensityMatrix) -> Result<f64> {
    check_model(circuit, model, o, rho0)?;
    let paths: f64 = model.iter().map(|m| m.len() as f64).product();
    if paths > MAX_PEC_PATHS {
        return Err(Error::Capacity(format!(
            "{paths:.3e} correction paths exceed {MAX_PEC_PATHS:.0e}"
        )));
    }
    if circuit.is_empty() {
        return channels::expectation(o, rho0);
    }
    let step = |state: &CMatrix, k: usize| circuit.gates()[k].noise.apply_matrix(&circuit.action(k).conjugate(state));
    let first = step(rho0.matrix(), 0);
    // parallel over the first gate's corrections, summed in fixed order
    let branches: Vec<f64> = model[0]
        .entries()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|(q, p)| *q * descend(circuit, model, o.matrix(), &conjugate_by_pauli(&first, p), 1, &step))
        .collect();
    Ok(branches.iter().sum())
}

fn descend<F>(circuit: &NoisyCircuit, model: &[QuasiProbDecomposition], o: &CMatrix, state: &CMatrix, k: usize, step: &F) -> f64
where
    F: Fn(&CMatrix, usize) -> CMatrix,
{
    if k == circuit.len() {
        return real_trace_product(o, state);
    }
    let next = step(state, k);
    model[k]
        .entries()
        .map(|(q, p)| q * descend(circuit, model, o, &conjugate_by_pauli(&next, p), k + 1, step))
        .sum()
}

/// The same signed path sum contracted gate by gate: each gate's correction
/// sum is applied as one signed map. No path cap.
pub fn pec_expectation(circuit: &NoisyCircuit, model: &[QuasiProbDecomposition], o: &DenseOperator, rho0: &DensityMatrix) -> Result<f64> {
    check_model(circuit, model, o, rho0)?;
    let maps: Vec<PauliMap> = model.iter().map(|m| m.as_map().clone()).collect();
    let rho = circuit.evolve_with_maps(rho0.matrix(), &maps)?;
    Ok(real_trace_product(o.matrix(), &rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_channel_inverts_to_identity() {
        let q = invert_pauli_channel(&StochasticPauliChannel::identity(1)).unwrap();
        assert_eq!(q.len(), 1);
        assert_eq!(q.gamma(), 1.0);
    }

    #[test]
    fn depolarizing_inverse_weights() {
        let n = StochasticPauliChannel::depolarizing(1, 1, 0.05).unwrap();
        let q = invert_pauli_channel(&n).unwrap();
        let e: Vec<(f64, String)> = q.entries().map(|(w, p)| (w, p.label())).collect();
        assert_eq!(e[0].1, "I");
        assert_abs_diff_eq!(e[0].0, 1.053571, epsilon = 1e-6);
        for (w, _) in &e[1..] {
            assert_abs_diff_eq!(*w, -0.017857, epsilon = 1e-6);
        }
        assert_abs_diff_eq!(q.gamma(), 1.107143, epsilon = 1e-6);
        assert!(residual_distance(&n, &q).unwrap() < 1e-14);
    }

    #[test]
    fn singular_channel_is_rejected() {
        let x = PauliString::parse("X").unwrap();
        let n = StochasticPauliChannel::single_pauli(x, 0.5).unwrap();
        assert!(matches!(invert_pauli_channel(&n), Err(Error::NonInvertible(_))));
    }

    #[test]
    fn mismatch_bound_value() {
        assert_abs_diff_eq!(mismatch_bias_bound(1e-3, 10), (1.002f64.powi(10) - 1.0) / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mismatch_bias_bound(1e-3, 10), 0.0100905, epsilon = 1e-6);
    }
}
