//! Small dense complex linear algebra: Pauli densification, Hermitian spectra,
//! operator and trace norms, and the `DenseOperator` carrier type.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::PauliString;

pub type CMatrix = DMatrix<Complex64>;

/// Densification limit for exact norm evaluation and dense evolution.
pub const MAX_DENSE_QUBITS: usize = 10;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn pauli_matrix(p: &PauliString) -> CMatrix {
    let dim = 1usize << p.n_qubits();
    let mut m = CMatrix::zeros(dim, dim);
    let x = p.x_mask() as usize;
    for j in 0..dim {
        m[(j ^ x, j)] = p.amplitude(j);
    }
    m
}

/// Dense matrix of `sum_i c_i P_i`.
pub fn pauli_sum_matrix(n_qubits: usize, terms: &[(Complex64, PauliString)]) -> Result<CMatrix> {
    if n_qubits > MAX_DENSE_QUBITS {
        return Err(Error::Capacity(format!(
            "dense evaluation limited to {MAX_DENSE_QUBITS} qubits, got {n_qubits}"
        )));
    }
    let dim = 1usize << n_qubits;
    let mut m = CMatrix::zeros(dim, dim);
    for (c, p) in terms {
        if p.n_qubits() != n_qubits {
            return Err(Error::Dimension("Pauli sum with mixed widths".into()));
        }
        let x = p.x_mask() as usize;
        for j in 0..dim {
            m[(j ^ x, j)] += c * p.amplitude(j);
        }
    }
    Ok(m)
}

/// Largest |entry| of `m - m^dagger`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = hermitian_part(m);
    let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

pub(crate) fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Operator norm of a Hermitian or anti-Hermitian (normal) matrix.
pub fn normal_operator_norm(m: &CMatrix) -> f64 {
    let h = if hermiticity_defect(m) <= 1e-12 * (1.0 + max_abs(m)) {
        m.clone()
    } else {
        // anti-Hermitian: i*m is Hermitian
        m * Complex64::new(0.0, 1.0)
    };
    hermitian_eigenvalues(&h)
        .into_iter()
        .fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Largest singular value of an arbitrary square matrix.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    m.clone()
        .singular_values()
        .iter()
        .fold(0.0f64, |acc, v| acc.max(*v))
}

/// Schatten 1-norm; Hermitian inputs use the spectrum, others the SVD.
pub fn trace_norm(m: &CMatrix) -> f64 {
    if hermiticity_defect(m) <= 1e-12 * (1.0 + max_abs(m)) {
        hermitian_eigenvalues(m).iter().map(|v| v.abs()).sum()
    } else {
        m.clone().singular_values().iter().sum()
    }
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, v| acc.max(v.norm()))
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// `exp(-i h t)` for Hermitian `h` via its spectral decomposition.
pub fn unitary_exponential(h: &CMatrix, t: f64) -> CMatrix {
    let eig = SymmetricEigen::new(hermitian_part(h));
    let v = eig.eigenvectors;
    let phases = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        v.nrows(),
        eig.eigenvalues
            .iter()
            .map(|e| Complex64::from_polar(1.0, -e * t)),
    ));
    &v * phases * v.adjoint()
}

/// A square complex matrix on `n` qubits with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    matrix: CMatrix,
    n_qubits: usize,
}

impl DenseOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let dim = matrix.nrows();
        if dim != matrix.ncols() || dim == 0 || !dim.is_power_of_two() {
            return Err(Error::Dimension(format!(
                "operator of shape {}x{} is not a square power-of-two matrix",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidArgument("operator has non-finite entries".into()));
        }
        Ok(DenseOperator {
            n_qubits: dim.trailing_zeros() as usize,
            matrix,
        })
    }

    pub fn identity(n_qubits: usize) -> Self {
        DenseOperator {
            matrix: identity(1 << n_qubits),
            n_qubits,
        }
    }

    pub fn from_pauli(p: &PauliString) -> Self {
        DenseOperator {
            matrix: pauli_matrix(p),
            n_qubits: p.n_qubits(),
        }
    }

    /// `coefficient * P` for a label in the Hamiltonian grammar.
    pub fn from_label(label: &str, coefficient: f64) -> Result<Self> {
        let p = PauliString::parse(label)?;
        let mut op = DenseOperator::from_pauli(&p);
        op.matrix *= Complex64::new(coefficient, 0.0);
        Ok(op)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn adjoint(&self) -> DenseOperator {
        DenseOperator {
            matrix: self.matrix.adjoint(),
            n_qubits: self.n_qubits,
        }
    }

    pub fn compose(&self, other: &DenseOperator) -> Result<DenseOperator> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension("operator product of unequal dimensions".into()));
        }
        Ok(DenseOperator {
            matrix: &self.matrix * &other.matrix,
            n_qubits: self.n_qubits,
        })
    }

    /// `max |(U^dagger U - I)_{ij}|`.
    pub fn unitarity_defect(&self) -> f64 {
        let g = self.matrix.adjoint() * &self.matrix - identity(self.dim());
        max_abs(&g)
    }

    pub fn operator_norm(&self) -> f64 {
        spectral_norm(&self.matrix)
    }
}
