//! Gate-level circuits of Pauli rotations and Pauli gates, optionally
//! controlled on one qubit, with a stochastic Pauli channel after each gate.

use num_complex::Complex64;

use crate::channels::{conjugate_by_pauli, NoiseModel, PauliMap, StochasticPauliChannel};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, ONE, ZERO};
use crate::pauli::PauliString;

/// Control on a single qubit (label index, 0 = leftmost).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Control {
    pub qubit: usize,
    /// Fire when the control reads `|1>` (otherwise on `|0>`).
    pub on_one: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    /// `exp(-i angle P)`.
    Rotation { pauli: PauliString, angle: f64 },
    Pauli(PauliString),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    kind: GateKind,
    control: Option<Control>,
}

impl Gate {
    pub fn rotation(pauli: PauliString, angle: f64) -> Self {
        Gate { kind: GateKind::Rotation { pauli, angle }, control: None }
    }

    pub fn pauli(pauli: PauliString) -> Self {
        Gate { kind: GateKind::Pauli(pauli), control: None }
    }

    pub fn controlled(self, control: Control) -> Result<Self> {
        let n = self.pauli_string().n_qubits();
        if control.qubit >= n {
            return Err(Error::Dimension(format!("control qubit {} outside {n} qubits", control.qubit)));
        }
        if self.pauli_string().support_mask() & control_bit(n, control.qubit) != 0 {
            return Err(Error::InvalidArgument("control qubit overlaps the target".into()));
        }
        Ok(Gate { control: Some(control), ..self })
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    pub fn control(&self) -> Option<Control> {
        self.control
    }

    pub fn pauli_string(&self) -> &PauliString {
        match &self.kind {
            GateKind::Rotation { pauli, .. } | GateKind::Pauli(pauli) => pauli,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.pauli_string().n_qubits()
    }

    pub fn is_clifford(&self) -> bool {
        matches!(self.kind, GateKind::Pauli(_))
    }

    /// Target support plus the control bit, in basis-index layout.
    pub fn support_mask(&self) -> u64 {
        let n = self.n_qubits();
        self.pauli_string().support_mask() | self.control.map_or(0, |c| control_bit(n, c.qubit))
    }

    pub(crate) fn action(&self) -> GateAction {
        let p = *self.pauli_string();
        let dim = 1usize << p.n_qubits();
        let x = p.x_mask() as usize;
        let mut diag = vec![ZERO; dim];
        let mut off = vec![ZERO; dim];
        for c in 0..dim {
            let amp = p.amplitude(c);
            let (d, o) = match &self.kind {
                GateKind::Pauli(_) if x == 0 => (amp, ZERO),
                GateKind::Pauli(_) => (ZERO, amp),
                GateKind::Rotation { angle, .. } => {
                    let (s, co) = angle.sin_cos();
                    let minus_is = Complex64::new(0.0, -s);
                    if x == 0 {
                        (co + minus_is * amp, ZERO)
                    } else {
                        (Complex64::new(co, 0.0), minus_is * amp)
                    }
                }
            };
            let fires = self.control.is_none_or(|ctl| {
                let bit = control_bit(p.n_qubits(), ctl.qubit) as usize;
                (c & bit != 0) == ctl.on_one
            });
            if fires {
                diag[c] = d;
                off[c] = o;
            } else {
                diag[c] = ONE;
            }
        }
        GateAction { x, diag, off }
    }

    pub fn matrix(&self) -> CMatrix {
        self.action().matrix()
    }
}

fn control_bit(n: usize, qubit: usize) -> u64 {
    1u64 << (n - 1 - qubit)
}

/// Sparse form of a gate: `G|c> = diag[c] |c> + off[c] |c ^ x>`.
#[derive(Debug, Clone)]
pub(crate) struct GateAction {
    x: usize,
    diag: Vec<Complex64>,
    off: Vec<Complex64>,
}

impl GateAction {
    fn matrix(&self) -> CMatrix {
        let dim = self.diag.len();
        let mut m = CMatrix::zeros(dim, dim);
        for c in 0..dim {
            m[(c, c)] += self.diag[c];
            if self.x != 0 {
                m[(c ^ self.x, c)] += self.off[c];
            }
        }
        m
    }

    /// `G m`.
    pub(crate) fn left(&self, m: &CMatrix) -> CMatrix {
        let dim = m.nrows();
        CMatrix::from_fn(dim, m.ncols(), |a, b| {
            let mut v = self.diag[a] * m[(a, b)];
            if self.x != 0 {
                v += self.off[a ^ self.x] * m[(a ^ self.x, b)];
            }
            v
        })
    }

    /// `m G^dagger`.
    pub(crate) fn right_adjoint(&self, m: &CMatrix) -> CMatrix {
        CMatrix::from_fn(m.nrows(), m.ncols(), |a, b| {
            let mut v = m[(a, b)] * self.diag[b].conj();
            if self.x != 0 {
                v += m[(a, b ^ self.x)] * self.off[b ^ self.x].conj();
            }
            v
        })
    }

    /// `G m G^dagger`.
    pub(crate) fn conjugate(&self, m: &CMatrix) -> CMatrix {
        self.right_adjoint(&self.left(m))
    }
}

/// One gate followed by its noise channel.
#[derive(Debug, Clone)]
pub struct NoisyGate {
    pub gate: Gate,
    pub noise: StochasticPauliChannel,
}

#[derive(Debug, Clone)]
pub struct NoisyCircuit {
    n_qubits: usize,
    gates: Vec<NoisyGate>,
    actions: Vec<GateAction>,
}

impl NoisyCircuit {
    pub fn new(n_qubits: usize) -> Self {
        NoisyCircuit { n_qubits, gates: Vec::new(), actions: Vec::new() }
    }

    /// Gates with noise drawn from `model` (none when `model` is `None`).
    pub fn from_gates(n_qubits: usize, gates: Vec<Gate>, model: Option<&NoiseModel>) -> Result<Self> {
        let mut c = NoisyCircuit::new(n_qubits);
        for g in gates {
            let noise = match model {
                None => None,
                Some(m) => {
                    let support = if m.noisy_ancilla {
                        g.support_mask()
                    } else {
                        g.pauli_string().support_mask()
                    };
                    if g.is_clifford() {
                        Some(m.clifford_channel(n_qubits, support)?)
                    } else {
                        Some(m.rotation_channel(n_qubits, support)?)
                    }
                }
            };
            c.push(g, noise)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate, noise: Option<StochasticPauliChannel>) -> Result<()> {
        if gate.n_qubits() != self.n_qubits {
            return Err(Error::Dimension(format!(
                "{}-qubit gate in a {}-qubit circuit",
                gate.n_qubits(),
                self.n_qubits
            )));
        }
        let noise = noise.unwrap_or_else(|| StochasticPauliChannel::identity(self.n_qubits));
        if noise.n_qubits() != self.n_qubits {
            return Err(Error::Dimension("noise channel width differs from circuit".into()));
        }
        self.actions.push(gate.action());
        self.gates.push(NoisyGate { gate, noise });
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn gates(&self) -> &[NoisyGate] {
        &self.gates
    }

    /// Product of all gate matrices.
    pub fn ideal_unitary(&self) -> CMatrix {
        let dim = 1usize << self.n_qubits;
        self.actions.iter().fold(CMatrix::identity(dim, dim), |acc, a| a.left(&acc))
    }

    fn check_state(&self, rho: &CMatrix) -> Result<()> {
        let dim = 1usize << self.n_qubits;
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::Dimension(format!(
                "state of dimension {} for a {}-qubit circuit",
                rho.nrows(),
                self.n_qubits
            )));
        }
        Ok(())
    }

    /// Noiseless evolution.
    pub fn evolve_ideal(&self, rho: &CMatrix) -> Result<CMatrix> {
        self.check_state(rho)?;
        Ok(self.actions.iter().fold(rho.clone(), |acc, a| a.conjugate(&acc)))
    }

    /// Noisy evolution; `insertions[i]` (when given) is conjugated in right
    /// after gate `i`'s noise channel.
    pub fn evolve_noisy(&self, rho: &CMatrix, insertions: Option<&[PauliString]>) -> Result<CMatrix> {
        self.check_state(rho)?;
        if let Some(ins) = insertions {
            if ins.len() != self.len() {
                return Err(Error::Dimension(format!(
                    "{} insertions for {} gates",
                    ins.len(),
                    self.len()
                )));
            }
        }
        let mut state = rho.clone();
        for (i, (g, a)) in self.gates.iter().zip(&self.actions).enumerate() {
            state = g.noise.apply_matrix(&a.conjugate(&state));
            if let Some(p) = insertions.map(|ins| &ins[i]) {
                if !p.is_identity() {
                    state = conjugate_by_pauli(&state, p);
                }
            }
        }
        Ok(state)
    }

    /// Noisy evolution with a signed Pauli map after each gate's noise.
    pub fn evolve_with_maps(&self, rho: &CMatrix, maps: &[PauliMap]) -> Result<CMatrix> {
        self.check_state(rho)?;
        if maps.len() != self.len() {
            return Err(Error::Dimension(format!("{} maps for {} gates", maps.len(), self.len())));
        }
        let mut state = rho.clone();
        for ((g, a), m) in self.gates.iter().zip(&self.actions).zip(maps) {
            state = m.apply_matrix(&g.noise.apply_matrix(&a.conjugate(&state)));
        }
        Ok(state)
    }

    pub(crate) fn action(&self, i: usize) -> &GateAction {
        &self.actions[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{self, DenseOperator};

    fn p(s: &str) -> PauliString {
        PauliString::parse(s).unwrap()
    }

    #[test]
    fn rotation_matches_dense_exponential() {
        for label in ["XZ", "ZI", "YY"] {
            let g = Gate::rotation(p(label), 0.37);
            let dense = DenseOperator::from_label(label, 1.0).unwrap();
            let expected = linalg::unitary_exponential(dense.matrix(), 0.37);
            assert!(linalg::max_abs(&(g.matrix() - expected)) < 1e-14);
        }
    }

    #[test]
    fn controlled_gates_act_only_on_matching_branch() {
        let g = Gate::pauli(p("IX")).controlled(Control { qubit: 0, on_one: true }).unwrap();
        let m = g.matrix();
        // |00> and |01> untouched, |10> <-> |11>
        assert_eq!(m[(0, 0)], ONE);
        assert_eq!(m[(1, 1)], ONE);
        assert_eq!(m[(3, 2)], ONE);
        assert_eq!(m[(2, 3)], ONE);
        assert!(Gate::pauli(p("XI")).controlled(Control { qubit: 0, on_one: true }).is_err());
    }

    #[test]
    fn sparse_conjugation_matches_dense() {
        let g = Gate::rotation(p("YZ"), -0.8).controlled(Control { qubit: 0, on_one: false });
        assert!(g.is_err());
        let g = Gate::rotation(p("IYZ"), -0.8).controlled(Control { qubit: 0, on_one: false }).unwrap();
        let rho = crate::channels::DensityMatrix::from_label("+0+").unwrap();
        let u = g.matrix();
        let dense = &u * rho.matrix() * u.adjoint();
        assert!(linalg::max_abs(&(g.action().conjugate(rho.matrix()) - dense)) < 1e-14);
    }
}
