//! Built-in reference Hamiltonians and observable parsing.

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::linalg::DenseOperator;

pub const REFERENCE_SCENARIOS: [&str; 2] = ["pauli2", "heis3"];

/// `X⊗I + Z⊗Z`.
pub fn pauli2() -> Hamiltonian {
    Hamiltonian::from_labels(&[(1.0, "XI"), (1.0, "ZZ")]).expect("valid labels")
}

/// Open three-site Heisenberg chain with unit couplings, six terms.
pub fn heis3() -> Hamiltonian {
    Hamiltonian::from_labels(&[
        (1.0, "XXI"),
        (1.0, "YYI"),
        (1.0, "ZZI"),
        (1.0, "IXX"),
        (1.0, "IYY"),
        (1.0, "IZZ"),
    ])
    .expect("valid labels")
}

pub fn reference_hamiltonian(name: &str) -> Option<Hamiltonian> {
    match name {
        "pauli2" => Some(pauli2()),
        "heis3" => Some(heis3()),
        _ => None,
    }
}

/// Parses `LABEL`, `c LABEL` or `c*LABEL`.
pub fn parse_observable(text: &str, n_qubits: usize) -> Result<DenseOperator> {
    let text = text.trim();
    let (coeff, label) = match text.split_once('*').or_else(|| text.split_once(char::is_whitespace)) {
        Some((c, l)) => {
            let c: f64 = c
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad observable coefficient in `{text}`")))?;
            (c, l.trim())
        }
        None => (1.0, text),
    };
    let op = DenseOperator::from_label(label, coeff).map_err(|e| Error::Config(format!("observable `{text}`: {e}")))?;
    if op.n_qubits() != n_qubits {
        return Err(Error::Config(format!(
            "observable `{text}` acts on {} qubits, Hamiltonian on {n_qubits}",
            op.n_qubits()
        )));
    }
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn observable_forms() {
        for s in ["ZI", "0.5 ZI", "0.5*ZI"] {
            parse_observable(s, 2).unwrap();
        }
        assert!(parse_observable("ZII", 2).is_err());
        assert_eq!(heis3().num_terms(), 6);
    }
}
