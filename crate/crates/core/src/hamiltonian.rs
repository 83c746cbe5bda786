//! Pauli-sum Hamiltonians, their text format, and the commutator prefactors
//! that control product-formula error.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, MAX_DENSE_QUBITS};
use crate::pauli::{pauli_mul, symplectic_commutes, PauliString};

/// Enumeration budget for the `(k+1)`-tuple sum in [`alpha_comm`].
pub const ALPHA_COMM_TUPLE_LIMIT: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianTerm {
    coefficient: f64,
    pauli: PauliString,
}

impl HamiltonianTerm {
    pub fn new(coefficient: f64, pauli: PauliString) -> Result<Self> {
        if !coefficient.is_finite() || coefficient == 0.0 {
            return Err(Error::DegenerateInput(format!(
                "term coefficient {coefficient} must be finite and nonzero"
            )));
        }
        Ok(HamiltonianTerm { coefficient, pauli })
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn pauli(&self) -> &PauliString {
        &self.pauli
    }
}

/// `H = sum_l lambda_l P_l`. Term order is the product-formula order and is
/// never rearranged.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    terms: Vec<HamiltonianTerm>,
    n_qubits: usize,
}

impl Hamiltonian {
    pub fn new(terms: Vec<HamiltonianTerm>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::DegenerateInput("Hamiltonian has no terms".into()))?;
        let n_qubits = first.pauli.n_qubits();
        if let Some(bad) = terms.iter().find(|t| t.pauli.n_qubits() != n_qubits) {
            return Err(Error::Dimension(format!(
                "term {} acts on {} qubits, expected {n_qubits}",
                bad.pauli,
                bad.pauli.n_qubits()
            )));
        }
        Ok(Hamiltonian { terms, n_qubits })
    }

    /// Builds from `(coefficient, label)` pairs.
    pub fn from_labels(spec: &[(f64, &str)]) -> Result<Self> {
        let terms = spec
            .iter()
            .map(|(c, l)| HamiltonianTerm::new(*c, PauliString::parse(l)?))
            .collect::<Result<Vec<_>>>()?;
        Hamiltonian::new(terms)
    }

    /// Parses the one-term-per-line text format: `<coefficient> <label>`,
    /// with `#` comment lines and blank lines ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse { line: idx + 1, message };
            let mut fields = line.split_whitespace();
            let (Some(c), Some(label), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(parse_err(format!(
                    "expected `<coefficient> <pauli-label>`, got `{line}`"
                )));
            };
            let coefficient: f64 = c
                .parse()
                .map_err(|_| parse_err(format!("bad coefficient `{c}`")))?;
            let pauli = PauliString::parse(label).map_err(|e| parse_err(e.to_string()))?;
            terms.push(HamiltonianTerm::new(coefficient, pauli).map_err(|e| parse_err(e.to_string()))?);
        }
        Hamiltonian::new(terms).map_err(|e| match e {
            Error::DegenerateInput(m) => Error::Parse { line: 0, message: m },
            other => other,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Hamiltonian::parse(&std::fs::read_to_string(path)?)
    }

    pub fn terms(&self) -> &[HamiltonianTerm] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn dense(&self) -> Result<CMatrix> {
        let terms: Vec<_> = self
            .terms
            .iter()
            .map(|t| (Complex64::new(t.coefficient, 0.0), t.pauli))
            .collect();
        linalg::pauli_sum_matrix(self.n_qubits, &terms)
    }

    /// `beta = sum |lambda|`.
    pub fn beta(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.abs()).sum()
    }

    fn term(&self, index: usize) -> Result<&HamiltonianTerm> {
        self.terms.get(index).ok_or(Error::IndexOutOfRange {
            index,
            len: self.terms.len(),
        })
    }
}

impl fmt::Display for Hamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.terms {
            writeln!(f, "{} {}", t.coefficient, t.pauli)?;
        }
        Ok(())
    }
}

/// `(beta, p)` with `p_s = |lambda_s| / beta`.
pub fn normalize(h: &Hamiltonian) -> Result<(f64, Vec<f64>)> {
    let beta = h.beta();
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::DegenerateInput(format!("beta = {beta}")));
    }
    let probs = h.terms.iter().map(|t| t.coefficient.abs() / beta).collect();
    Ok((beta, probs))
}

/// Operator norm of `[H_{l_{k+1}}, ..., [H_{l_2}, H_{l_1}]...]` for the chain
/// `indices = [l_1, ..., l_{k+1}]`.
///
/// Each non-vanishing Pauli commutator is `2 P_j P`, so the chain norm is
/// `2^{depth} prod |lambda|` unless some step commutes.
pub fn nested_commutator_norm(indices: &[usize], h: &Hamiltonian) -> Result<f64> {
    let (&first, rest) = indices
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("empty commutator chain".into()))?;
    let t0 = h.term(first)?;
    let mut current = t0.pauli;
    let mut norm = t0.coefficient.abs();
    for &j in rest {
        let tj = h.term(j)?;
        if symplectic_commutes(&tj.pauli, &current) {
            // keep validating the remaining indices
            for &k in indices {
                h.term(k)?;
            }
            return Ok(0.0);
        }
        current = pauli_mul(&tj.pauli, &current)?.1;
        norm *= 2.0 * tj.coefficient.abs();
    }
    Ok(norm)
}

/// `alpha_comm = sum over (k+1)-tuples` of nested commutator norms.
///
/// Chains are grown one term at a time keyed by the running product mask, so
/// commuting steps prune whole subtrees.
pub fn alpha_comm(h: &Hamiltonian, k: u32) -> Result<f64> {
    if k == 0 || (k > 1 && k % 2 == 1) {
        return Err(Error::InvalidOrder(k));
    }
    let l = h.num_terms() as f64;
    let tuples = l.powi(k as i32 + 1);
    if tuples > ALPHA_COMM_TUPLE_LIMIT {
        return Err(Error::Capacity(format!(
            "L^(k+1) = {tuples:.3e} exceeds the enumeration limit {ALPHA_COMM_TUPLE_LIMIT:.0e}"
        )));
    }
    let mut layer: HashMap<PauliString, f64> = HashMap::new();
    for t in &h.terms {
        *layer.entry(t.pauli).or_insert(0.0) += t.coefficient.abs();
    }
    for _ in 0..k {
        let mut next: HashMap<PauliString, f64> = HashMap::new();
        for (p, w) in &layer {
            for t in &h.terms {
                if !symplectic_commutes(&t.pauli, p) {
                    let (_, prod) = pauli_mul(&t.pauli, p)?;
                    *next.entry(prod).or_insert(0.0) += 2.0 * t.coefficient.abs() * w;
                }
            }
        }
        layer = next;
    }
    let mut weights: Vec<f64> = layer.into_values().collect();
    weights.sort_by(|a, b| a.total_cmp(b));
    Ok(weights.iter().sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormMode {
    /// Dense spectral norm of each inner commutator.
    Exact,
    /// Sum of the Pauli-pair commutator norms (triangle inequality).
    Triangle,
}

/// `c_1 = 1/2 sum_l || [sum_{m>l} H_m, H_l] ||`.
pub fn c1_prefactor(h: &Hamiltonian, mode: NormMode) -> Result<f64> {
    if mode == NormMode::Exact && h.n_qubits > MAX_DENSE_QUBITS {
        return Err(Error::Capacity(format!(
            "exact c1 needs <= {MAX_DENSE_QUBITS} qubits, Hamiltonian has {}",
            h.n_qubits
        )));
    }
    let mut total = 0.0;
    for (l, tl) in h.terms.iter().enumerate() {
        let mut pieces: Vec<(Complex64, PauliString)> = Vec::new();
        for tm in &h.terms[l + 1..] {
            if symplectic_commutes(&tm.pauli, &tl.pauli) {
                continue;
            }
            let (phase, prod) = pauli_mul(&tm.pauli, &tl.pauli)?;
            let c = phase.to_complex() * (2.0 * tm.coefficient * tl.coefficient);
            pieces.push((c, prod));
        }
        if pieces.is_empty() {
            continue;
        }
        total += match mode {
            NormMode::Triangle => pieces.iter().map(|(c, _)| c.norm()).sum::<f64>(),
            NormMode::Exact => {
                let m = linalg::pauli_sum_matrix(h.n_qubits, &pieces)?;
                linalg::normal_operator_norm(&m)
            }
        };
    }
    Ok(0.5 * total)
}
