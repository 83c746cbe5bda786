//! Suzuki product formulas: stage lists, dense microsteps, ideal and noisy
//! execution, and bias measurement against exact evolution.

use crate::channels::{self, DensityMatrix, NoiseModel};
use crate::circuit::{Gate, NoisyCircuit};
use crate::error::{Error, Result};
use crate::hamiltonian::{alpha_comm, c1_prefactor, Hamiltonian, NormMode};
use crate::linalg::{self, DenseOperator, MAX_DENSE_QUBITS};

/// One exponential `exp(-i H_term fraction delta)` of a microstep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stage {
    pub term: usize,
    pub fraction: f64,
}

/// An order-`k` product formula as a time-ordered stage list: the first
/// stage acts first on the state.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductFormula {
    order: u32,
    n_terms: usize,
    stages: Vec<Stage>,
}

/// `u_p = 1 / (4 - 4^{1/(2p-1)})`.
pub fn suzuki_coefficient(p: u32) -> f64 {
    1.0 / (4.0 - 4f64.powf(1.0 / (2.0 * p as f64 - 1.0)))
}

/// `Upsilon_1 = 1`, `Upsilon_k = 2 * 5^{k/2 - 1}`.
pub fn upsilon(k: u32) -> Result<u64> {
    match k {
        1 => Ok(1),
        k if k >= 2 && k % 2 == 0 => Ok(2 * 5u64.pow(k / 2 - 1)),
        k => Err(Error::InvalidOrder(k)),
    }
}

fn check_order(k: u32) -> Result<()> {
    upsilon(k).map(|_| ())
}

impl ProductFormula {
    pub fn new(order: u32, n_terms: usize) -> Result<Self> {
        check_order(order)?;
        if n_terms == 0 {
            return Err(Error::DegenerateInput("product formula over zero terms".into()));
        }
        Ok(ProductFormula { order, n_terms, stages: stages_for(order, n_terms) })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    pub fn stage_count(&self) -> u64 {
        (self.stages.len() / self.n_terms) as u64
    }

    pub fn is_palindrome(&self) -> bool {
        self.stages.iter().eq(self.stages.iter().rev())
    }

    /// Total fraction of `delta` each term receives per microstep.
    pub fn fraction_totals(&self) -> Vec<f64> {
        let mut totals = vec![0.0; self.n_terms];
        for s in &self.stages {
            totals[s.term] += s.fraction;
        }
        totals
    }
}

fn stages_for(order: u32, l: usize) -> Vec<Stage> {
    match order {
        1 => (0..l).map(|term| Stage { term, fraction: 1.0 }).collect(),
        2 => (0..l)
            .chain((0..l).rev())
            .map(|term| Stage { term, fraction: 0.5 })
            .collect(),
        k => {
            let u = suzuki_coefficient(k / 2);
            let inner = stages_for(k - 2, l);
            let scaled = |c: f64| inner.iter().map(move |s| Stage { term: s.term, fraction: s.fraction * c });
            let mut out = Vec::with_capacity(inner.len() * 5);
            for c in [u, u, 1.0 - 4.0 * u, u, u] {
                out.extend(scaled(c));
            }
            out
        }
    }
}

pub fn build_formula(h: &Hamiltonian, k: u32) -> Result<ProductFormula> {
    ProductFormula::new(k, h.num_terms())
}

fn check_formula(f: &ProductFormula, h: &Hamiltonian) -> Result<()> {
    if f.n_terms != h.num_terms() {
        return Err(Error::Dimension(format!(
            "formula over {} terms for a {}-term Hamiltonian",
            f.n_terms,
            h.num_terms()
        )));
    }
    if h.n_qubits() > MAX_DENSE_QUBITS {
        return Err(Error::Capacity(format!(
            "dense simulation limited to {MAX_DENSE_QUBITS} qubits"
        )));
    }
    Ok(())
}

/// `S_k(delta)` as a dense unitary.
pub fn microstep_unitary(f: &ProductFormula, h: &Hamiltonian, delta: f64) -> Result<DenseOperator> {
    check_formula(f, h)?;
    let dim = 1usize << h.n_qubits();
    let mut u = linalg::identity(dim);
    for s in &f.stages {
        let term = &h.terms()[s.term];
        let g = Gate::rotation(*term.pauli(), term.coefficient() * s.fraction * delta);
        u = g.matrix() * u;
    }
    DenseOperator::new(u)
}

/// `|| S_k(delta) - exp(-i H delta) ||`.
pub fn microstep_error(f: &ProductFormula, h: &Hamiltonian, delta: f64) -> Result<f64> {
    let s = microstep_unitary(f, h, delta)?;
    let exact = channels::exact_evolution(h, delta)?;
    Ok(linalg::spectral_norm(&(s.matrix() - exact.matrix())))
}

/// Shape of one Trotter execution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrotterRun {
    pub steps: usize,
    pub delta: f64,
    /// Layers `d = Upsilon_k N`.
    pub depth: u64,
    /// Elementary gates `N_G = d L`.
    pub gate_count: u64,
}

impl TrotterRun {
    pub fn new(h: &Hamiltonian, t: f64, steps: usize, k: u32) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidArgument("Trotter step count must be at least 1".into()));
        }
        let depth = upsilon(k)? * steps as u64;
        Ok(TrotterRun {
            steps,
            delta: t / steps as f64,
            depth,
            gate_count: depth * h.num_terms() as u64,
        })
    }
}

/// The `N`-microstep gate sequence, with noise after every rotation when
/// `noise` is given.
pub fn trotter_circuit(h: &Hamiltonian, t: f64, steps: usize, k: u32, noise: Option<&NoiseModel>) -> Result<NoisyCircuit> {
    let f = build_formula(h, k)?;
    check_formula(&f, h)?;
    let run = TrotterRun::new(h, t, steps, k)?;
    let mut gates = Vec::with_capacity(run.gate_count as usize);
    for _ in 0..steps {
        for s in f.stages() {
            let term = &h.terms()[s.term];
            gates.push(Gate::rotation(*term.pauli(), term.coefficient() * s.fraction * run.delta));
        }
    }
    NoisyCircuit::from_gates(h.n_qubits(), gates, noise)
}

/// Applies `(S_k(t/N))^N` to `rho0`, composing the noise channel exactly
/// after each elementary rotation when `noise` is given.
pub fn run_trotter(
    h: &Hamiltonian,
    t: f64,
    steps: usize,
    k: u32,
    noise: Option<&NoiseModel>,
    rho0: &DensityMatrix,
) -> Result<DensityMatrix> {
    if rho0.n_qubits() != h.n_qubits() {
        return Err(Error::Dimension("initial state width differs from Hamiltonian".into()));
    }
    let c = trotter_circuit(h, t, steps, k, noise)?;
    let out = match noise {
        None => c.evolve_ideal(rho0.matrix())?,
        Some(_) => c.evolve_noisy(rho0.matrix(), None)?,
    };
    Ok(DensityMatrix::from_trusted(linalg::hermitian_part(&out)))
}

/// `U_t(rho0)`.
pub fn exact_state(h: &Hamiltonian, t: f64, rho0: &DensityMatrix) -> Result<DensityMatrix> {
    let u = channels::exact_evolution(h, t)?;
    let m = u.matrix() * rho0.matrix() * u.matrix().adjoint();
    Ok(DensityMatrix::from_trusted(linalg::hermitian_part(&m)))
}

/// `|Tr[O U_t(rho)] - Tr[O V(rho)]|`.
pub fn trotter_bias(
    h: &Hamiltonian,
    t: f64,
    steps: usize,
    k: u32,
    o: &DenseOperator,
    rho0: &DensityMatrix,
    noise: Option<&NoiseModel>,
) -> Result<f64> {
    let ideal = channels::expectation(o, &exact_state(h, t, rho0)?)?;
    let approx = channels::expectation(o, &run_trotter(h, t, steps, k, noise, rho0)?)?;
    Ok((ideal - approx).abs())
}

/// Trace distance between the exact and product-formula states.
pub fn trotter_state_distance(
    h: &Hamiltonian,
    t: f64,
    steps: usize,
    k: u32,
    rho0: &DensityMatrix,
    noise: Option<&NoiseModel>,
) -> Result<f64> {
    channels::trace_distance(&exact_state(h, t, rho0)?, &run_trotter(h, t, steps, k, noise, rho0)?)
}

/// Trotter prefactor `alpha_k`: `c_1 t^2` at first order, otherwise
/// `c_cal * Upsilon_k^k * alpha_comm * t^{k+1}`.
pub fn alpha_k(h: &Hamiltonian, k: u32, t: f64, c_cal: f64) -> Result<f64> {
    check_order(k)?;
    if k == 1 {
        let mode = if h.n_qubits() <= MAX_DENSE_QUBITS { NormMode::Exact } else { NormMode::Triangle };
        return Ok(c_cal * c1_prefactor(h, mode)? * t * t);
    }
    let ups = upsilon(k)? as f64;
    Ok(c_cal * ups.powi(k as i32) * alpha_comm(h, k)? * t.powi(k as i32 + 1))
}

/// Smallest constant making `alpha_k / d^k` dominate the measured
/// trace-distance bias on the given `(t, N)` grid.
pub fn calibrate_alpha_constant(h: &Hamiltonian, k: u32, times: &[f64], steps: &[usize], rho0: &DensityMatrix) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &t in times {
        let base = alpha_k(h, k, t, 1.0)?;
        if base == 0.0 {
            continue;
        }
        for &n in steps {
            let d = (upsilon(k)? * n as u64) as f64;
            let bias = trotter_state_distance(h, t, n, k, rho0, None)?;
            worst = worst.max(bias * d.powi(k as i32) / base);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pauli2() -> Hamiltonian {
        Hamiltonian::from_labels(&[(1.0, "XI"), (1.0, "ZZ")]).unwrap()
    }

    #[test]
    fn stage_counts_and_coefficients() {
        let f1 = ProductFormula::new(1, 2).unwrap();
        assert_eq!(f1.stages(), &[Stage { term: 0, fraction: 1.0 }, Stage { term: 1, fraction: 1.0 }]);
        assert_eq!(f1.stage_count(), 1);
        assert_eq!(ProductFormula::new(2, 2).unwrap().stage_count(), 2);
        assert_eq!(ProductFormula::new(4, 3).unwrap().stage_count(), 10);
        assert_eq!(ProductFormula::new(6, 2).unwrap().stages().len(), 100);
        assert!(matches!(ProductFormula::new(3, 2), Err(Error::InvalidOrder(3))));
        assert_abs_diff_eq!(suzuki_coefficient(2), 0.414491, epsilon = 1e-6);
        for k in [1, 2, 4, 6] {
            for total in ProductFormula::new(k, 3).unwrap().fraction_totals() {
                assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
            }
        }
        assert!(ProductFormula::new(2, 4).unwrap().is_palindrome());
    }

    #[test]
    fn single_term_has_no_splitting_error() {
        let h = Hamiltonian::from_labels(&[(0.7, "XY")]).unwrap();
        for k in [1, 2, 4] {
            let f = build_formula(&h, k).unwrap();
            assert!(microstep_error(&f, &h, 0.9).unwrap() < 1e-12);
        }
        let rho = DensityMatrix::zero_state(2);
        let o = DenseOperator::from_label("ZI", 1.0).unwrap();
        assert!(trotter_bias(&h, 1.3, 3, 2, &o, &rho, None).unwrap() < 1e-12);
    }

    #[test]
    fn zero_step_is_identity() {
        let h = pauli2();
        let u = microstep_unitary(&build_formula(&h, 4).unwrap(), &h, 0.0).unwrap();
        assert!(linalg::max_abs(&(u.matrix() - linalg::identity(4))) < 1e-15);
    }

    #[test]
    fn noisy_run_counts_gates() {
        let h = pauli2();
        let run = TrotterRun::new(&h, 1.0, 3, 4).unwrap();
        assert_eq!(run.depth, 30);
        assert_eq!(run.gate_count, 60);
        let nm = NoiseModel::depolarizing(0.01).unwrap();
        assert_eq!(trotter_circuit(&h, 1.0, 3, 4, Some(&nm)).unwrap().len(), 60);
    }
}
