//! Density matrices, stochastic Pauli channels, general CPTP maps and the
//! distance measures used for every bias bound.
//!
//! Channel distances are Choi-state trace distances. For Pauli-diagonal maps
//! the Choi matrix is diagonal in the Bell basis, so this equals the diamond
//! distance; for other channels it is a lower bound.

use std::collections::BTreeMap;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::linalg::{self, CMatrix, DenseOperator, MAX_DENSE_QUBITS, ZERO};
use crate::pauli::{pauli_mul, PauliString};

/// Qubit limit for Choi-matrix constructions (Choi dimension `4^n`).
pub const MAX_CHOI_QUBITS: usize = 5;
/// Widest noise support a single channel may act on.
pub const MAX_NOISE_SUPPORT: u32 = 4;

const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
const NEGATIVITY_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    n_qubits: usize,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity. Eigenvalues in
    /// `[-1e-9, 0)` are clipped and the state renormalized.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let dim = matrix.nrows();
        if dim != matrix.ncols() || dim == 0 || !dim.is_power_of_two() {
            return Err(Error::Dimension(format!(
                "density matrix of shape {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let defect = linalg::hermiticity_defect(&matrix);
        if defect > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (defect {defect:.3e})")));
        }
        let tr = linalg::trace(&matrix).re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let eig = SymmetricEigen::new(linalg::hermitian_part(&matrix));
        let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -NEGATIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        if min < 0.0 {
            let clipped: Vec<f64> = eig.eigenvalues.iter().map(|v| v.max(0.0)).collect();
            let total: f64 = clipped.iter().sum();
            let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                dim,
                clipped.iter().map(|v| Complex64::new(v / total, 0.0)),
            ));
            let v = eig.eigenvectors;
            return Ok(DensityMatrix { matrix: &v * d * v.adjoint(), n_qubits });
        }
        Ok(DensityMatrix { matrix: linalg::hermitian_part(&matrix), n_qubits })
    }

    pub(crate) fn from_trusted(matrix: CMatrix) -> Self {
        let n_qubits = matrix.nrows().trailing_zeros() as usize;
        DensityMatrix { matrix, n_qubits }
    }

    pub fn from_pure(amplitudes: &[Complex64]) -> Result<Self> {
        let dim = amplitudes.len();
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let v = nalgebra::DVector::from_iterator(dim, amplitudes.iter().map(|a| a / norm));
        DensityMatrix::new(&v * v.adjoint())
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::Dimension(format!("basis index {index} >= {dim}")));
        }
        let mut m = CMatrix::zeros(dim, dim);
        m[(index, index)] = linalg::ONE;
        Ok(DensityMatrix { matrix: m, n_qubits })
    }

    pub fn zero_state(n_qubits: usize) -> Self {
        DensityMatrix::basis(n_qubits, 0).expect("index 0 always valid")
    }

    /// `|+...+><+...+|`.
    pub fn plus_state(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let m = CMatrix::from_element(dim, dim, Complex64::new(1.0 / dim as f64, 0.0));
        DensityMatrix { matrix: m, n_qubits }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let m = CMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0);
        DensityMatrix { matrix: m, n_qubits }
    }

    /// Product state from a label over `{0, 1, +, -}`.
    pub fn from_label(label: &str) -> Result<Self> {
        let label = label.trim();
        if label.is_empty() || label.len() > MAX_DENSE_QUBITS {
            return Err(Error::InvalidArgument(format!("state label `{label}`")));
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![linalg::ONE];
        for c in label.chars() {
            let local = match c {
                '0' => [1.0, 0.0],
                '1' => [0.0, 1.0],
                '+' => [s, s],
                '-' => [s, -s],
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "`{other}` is not one of 0, 1, +, -"
                    )))
                }
            };
            amps = amps
                .iter()
                .flat_map(|a| local.iter().map(move |l| a * *l))
                .collect();
        }
        DensityMatrix::from_pure(&amps)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }
}

// ---------------------------------------------------------------------------
// Pauli-diagonal maps
// ---------------------------------------------------------------------------

/// `X -> (P X P^dagger)` accumulated with weight `w` into `out`.
pub(crate) fn accumulate_pauli_conjugation(out: &mut CMatrix, x: &CMatrix, p: &PauliString, w: f64) {
    let dim = x.nrows();
    let xm = p.x_mask() as usize;
    if p.is_identity() {
        *out += x * Complex64::new(w, 0.0);
        return;
    }
    for b in 0..dim {
        let bb = b ^ xm;
        let sb = p.z_sign(bb) * w;
        for a in 0..dim {
            let aa = a ^ xm;
            out[(a, b)] += x[(aa, bb)] * (p.z_sign(aa) * sb);
        }
    }
}

/// `P X P^dagger`.
pub(crate) fn conjugate_by_pauli(x: &CMatrix, p: &PauliString) -> CMatrix {
    let mut out = CMatrix::zeros(x.nrows(), x.ncols());
    accumulate_pauli_conjugation(&mut out, x, p, 1.0);
    out
}

/// A signed Pauli-diagonal linear map `X -> sum_i w_i P_i X P_i`.
///
/// Stochastic Pauli channels, their quasiprobability inverses and residual
/// maps such as `N'^{-1} N` all live here.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliMap {
    n_qubits: usize,
    terms: Vec<(PauliString, f64)>,
}

impl PauliMap {
    pub fn new(n_qubits: usize, terms: impl IntoIterator<Item = (PauliString, f64)>) -> Result<Self> {
        let mut merged: BTreeMap<PauliString, f64> = BTreeMap::new();
        for (p, w) in terms {
            if p.n_qubits() != n_qubits {
                return Err(Error::Dimension(format!(
                    "Pauli {p} in a {n_qubits}-qubit map"
                )));
            }
            if !w.is_finite() {
                return Err(Error::InvalidArgument(format!("non-finite weight on {p}")));
            }
            *merged.entry(p).or_insert(0.0) += w;
        }
        let mut terms: Vec<(PauliString, f64)> = merged.into_iter().filter(|(_, w)| *w != 0.0).collect();
        // identity first, then lexicographic
        terms.sort_by(|a, b| b.0.is_identity().cmp(&a.0.is_identity()).then(a.0.cmp(&b.0)));
        Ok(PauliMap { n_qubits, terms })
    }

    pub fn identity(n_qubits: usize) -> Self {
        PauliMap {
            n_qubits,
            terms: vec![(PauliString::identity(n_qubits), 1.0)],
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(PauliString, f64)] {
        &self.terms
    }

    pub fn weight_of(&self, p: &PauliString) -> f64 {
        self.terms.iter().find(|(q, _)| q == p).map_or(0.0, |(_, w)| *w)
    }

    pub fn support_mask(&self) -> u64 {
        self.terms.iter().fold(0, |acc, (p, _)| acc | p.support_mask())
    }

    /// `sum |w_i|`.
    pub fn one_norm(&self) -> f64 {
        self.terms.iter().map(|(_, w)| w.abs()).sum()
    }

    /// `(self o first)`: apply `first`, then `self`. Pauli maps commute, so
    /// the order only matters for floating-point summation.
    pub fn compose(&self, first: &PauliMap) -> Result<PauliMap> {
        if self.n_qubits != first.n_qubits {
            return Err(Error::Dimension("composing Pauli maps of unequal width".into()));
        }
        let mut terms = Vec::with_capacity(self.terms.len() * first.terms.len());
        for (a, wa) in &self.terms {
            for (b, wb) in &first.terms {
                terms.push((pauli_mul(a, b)?.1, wa * wb));
            }
        }
        PauliMap::new(self.n_qubits, terms)
    }

    /// Pauli-transfer eigenvalue on `q`: `sum_i w_i (-1)^{<P_i, q>}`.
    pub fn transfer_eigenvalue(&self, q: &PauliString) -> f64 {
        self.terms
            .iter()
            .map(|(p, w)| if crate::pauli::symplectic_commutes(p, q) { *w } else { -*w })
            .sum()
    }

    pub fn apply_matrix(&self, x: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(x.nrows(), x.ncols());
        for (p, w) in &self.terms {
            accumulate_pauli_conjugation(&mut out, x, p, *w);
        }
        out
    }

    /// `1/2 sum_P |w_P - v_P|`: the exact Choi (and diamond) distance
    /// between Pauli-diagonal maps.
    pub fn l1_distance(&self, other: &PauliMap) -> Result<f64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Dimension("Pauli maps of unequal width".into()));
        }
        let mut diff: BTreeMap<PauliString, f64> = BTreeMap::new();
        for (p, w) in &self.terms {
            *diff.entry(*p).or_insert(0.0) += w;
        }
        for (p, w) in &other.terms {
            *diff.entry(*p).or_insert(0.0) -= w;
        }
        Ok(0.5 * diff.values().map(|v| v.abs()).sum::<f64>())
    }
}

/// A stochastic Pauli channel: nonnegative Pauli weights summing to one on a
/// bounded support.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticPauliChannel {
    map: PauliMap,
}

impl StochasticPauliChannel {
    pub fn new(n_qubits: usize, probs: impl IntoIterator<Item = (PauliString, f64)>) -> Result<Self> {
        let map = PauliMap::new(n_qubits, probs)?;
        if let Some((p, w)) = map.terms.iter().find(|(_, w)| *w < 0.0) {
            return Err(Error::ChannelIntegrity(format!("negative probability {w} on {p}")));
        }
        let total: f64 = map.terms.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::ChannelIntegrity(format!("probabilities sum to {total}")));
        }
        let width = map.support_mask().count_ones();
        if width > MAX_NOISE_SUPPORT {
            return Err(Error::Capacity(format!(
                "noise support of {width} qubits exceeds {MAX_NOISE_SUPPORT}"
            )));
        }
        Ok(StochasticPauliChannel { map })
    }

    pub fn identity(n_qubits: usize) -> Self {
        StochasticPauliChannel { map: PauliMap::identity(n_qubits) }
    }

    /// Uniform depolarizing noise on the bits of `support`: total error `p`
    /// split evenly over the `4^w - 1` non-identity strings.
    pub fn depolarizing(n_qubits: usize, support: u64, p: f64) -> Result<Self> {
        let all = PauliString::all_on_support(n_qubits, support);
        let share = p / (all.len() - 1).max(1) as f64;
        StochasticPauliChannel::new(
            n_qubits,
            all.into_iter()
                .map(|q| if q.is_identity() { (q, 1.0 - p) } else { (q, share) }),
        )
    }

    /// Uniform `Z`-type errors on the bits of `support`.
    pub fn dephasing(n_qubits: usize, support: u64, p: f64) -> Result<Self> {
        let all: Vec<_> = PauliString::all_on_support(n_qubits, support)
            .into_iter()
            .filter(|q| q.x_mask() == 0)
            .collect();
        let share = p / (all.len() - 1).max(1) as f64;
        StochasticPauliChannel::new(
            n_qubits,
            all.into_iter()
                .map(|q| if q.is_identity() { (q, 1.0 - p) } else { (q, share) }),
        )
    }

    /// Uniform `X`-type errors on the bits of `support`.
    pub fn bit_flip(n_qubits: usize, support: u64, p: f64) -> Result<Self> {
        let all: Vec<_> = PauliString::all_on_support(n_qubits, support)
            .into_iter()
            .filter(|q| q.z_mask() == 0)
            .collect();
        let share = p / (all.len() - 1).max(1) as f64;
        StochasticPauliChannel::new(
            n_qubits,
            all.into_iter()
                .map(|q| if q.is_identity() { (q, 1.0 - p) } else { (q, share) }),
        )
    }

    /// A single Pauli error `p` with probability `prob`.
    pub fn single_pauli(pauli: PauliString, prob: f64) -> Result<Self> {
        let n = pauli.n_qubits();
        StochasticPauliChannel::new(n, [(PauliString::identity(n), 1.0 - prob), (pauli, prob)])
    }

    pub fn map(&self) -> &PauliMap {
        &self.map
    }

    pub fn n_qubits(&self) -> usize {
        self.map.n_qubits
    }

    pub fn probabilities(&self) -> &[(PauliString, f64)] {
        &self.map.terms
    }

    pub fn identity_probability(&self) -> f64 {
        self.map.weight_of(&PauliString::identity(self.map.n_qubits))
    }

    /// `gamma = 1 - p_0`.
    pub fn error_rate(&self) -> f64 {
        1.0 - self.identity_probability()
    }

    pub fn support_mask(&self) -> u64 {
        self.map.support_mask()
    }

    pub fn apply_matrix(&self, x: &CMatrix) -> CMatrix {
        self.map.apply_matrix(x)
    }
}

// ---------------------------------------------------------------------------
// General channels
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub enum Channel {
    Identity(usize),
    Unitary(DenseOperator),
    Pauli(StochasticPauliChannel),
    /// Signed Pauli-diagonal map; not CPTP in general.
    PauliMap(PauliMap),
    Kraus { n_qubits: usize, ops: Vec<CMatrix> },
    /// Applied left to right.
    Sequence(Vec<Channel>),
}

impl Channel {
    pub fn n_qubits(&self) -> usize {
        match self {
            Channel::Identity(n) => *n,
            Channel::Unitary(u) => u.n_qubits(),
            Channel::Pauli(c) => c.n_qubits(),
            Channel::PauliMap(m) => m.n_qubits(),
            Channel::Kraus { n_qubits, .. } => *n_qubits,
            Channel::Sequence(v) => v.first().map_or(0, Channel::n_qubits),
        }
    }

    pub fn kraus(ops: Vec<CMatrix>) -> Result<Self> {
        let dim = ops
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty Kraus set".into()))?
            .nrows();
        if !dim.is_power_of_two() || ops.iter().any(|k| k.nrows() != dim || k.ncols() != dim) {
            return Err(Error::Dimension("Kraus operators of inconsistent shape".into()));
        }
        let mut sum = CMatrix::zeros(dim, dim);
        for k in &ops {
            sum += k.adjoint() * k;
        }
        let defect = linalg::max_abs(&(sum - linalg::identity(dim)));
        if defect > 1e-10 {
            return Err(Error::ChannelIntegrity(format!(
                "Kraus completeness violated by {defect:.3e}"
            )));
        }
        Ok(Channel::Kraus { n_qubits: dim.trailing_zeros() as usize, ops })
    }

    /// `self` followed by `next`.
    pub fn then(self, next: Channel) -> Channel {
        match self {
            Channel::Sequence(mut v) => {
                v.push(next);
                Channel::Sequence(v)
            }
            first => Channel::Sequence(vec![first, next]),
        }
    }

    /// Linear extension of the map to an arbitrary matrix.
    pub fn apply_matrix(&self, x: &CMatrix) -> CMatrix {
        match self {
            Channel::Identity(_) => x.clone(),
            Channel::Unitary(u) => u.matrix() * x * u.matrix().adjoint(),
            Channel::Pauli(c) => c.apply_matrix(x),
            Channel::PauliMap(m) => m.apply_matrix(x),
            Channel::Kraus { ops, .. } => {
                let mut out = CMatrix::zeros(x.nrows(), x.ncols());
                for k in ops {
                    out += k * x * k.adjoint();
                }
                out
            }
            Channel::Sequence(v) => v.iter().fold(x.clone(), |acc, c| c.apply_matrix(&acc)),
        }
    }

    /// True when every component is Pauli-diagonal, so Choi distance is exact.
    pub fn is_pauli_diagonal(&self) -> bool {
        match self {
            Channel::Identity(_) | Channel::Pauli(_) | Channel::PauliMap(_) => true,
            Channel::Sequence(v) => v.iter().all(Channel::is_pauli_diagonal),
            _ => false,
        }
    }
}

/// Applies `c` and re-validates the output state.
pub fn apply_channel(c: &Channel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if c.n_qubits() != rho.n_qubits() {
        return Err(Error::Dimension(format!(
            "{}-qubit channel on a {}-qubit state",
            c.n_qubits(),
            rho.n_qubits()
        )));
    }
    DensityMatrix::new(c.apply_matrix(rho.matrix()))
        .map_err(|e| Error::ChannelIntegrity(format!("output is not a state: {e}")))
}

/// Normalized Choi state `J(c) = (1/d) sum_{ab} |a><b| (x) c(|a><b|)`.
pub fn choi_matrix(c: &Channel) -> Result<CMatrix> {
    let n = c.n_qubits();
    if n > MAX_CHOI_QUBITS {
        return Err(Error::Capacity(format!(
            "Choi matrix limited to {MAX_CHOI_QUBITS} qubits, channel has {n}"
        )));
    }
    let d = 1usize << n;
    let mut j = CMatrix::zeros(d * d, d * d);
    let scale = Complex64::new(1.0 / d as f64, 0.0);
    for a in 0..d {
        for b in 0..d {
            let mut e = CMatrix::zeros(d, d);
            e[(a, b)] = linalg::ONE;
            let out = c.apply_matrix(&e);
            for i in 0..d {
                for k in 0..d {
                    let v = out[(i, k)];
                    if v != ZERO {
                        j[(a * d + i, b * d + k)] = v * scale;
                    }
                }
            }
        }
    }
    Ok(j)
}

/// `1/2 || J(a) - J(b) ||_1`.
pub fn choi_trace_distance(a: &Channel, b: &Channel) -> Result<f64> {
    if a.n_qubits() != b.n_qubits() {
        return Err(Error::Dimension("channels of unequal width".into()));
    }
    let diff = choi_matrix(a)? - choi_matrix(b)?;
    Ok(0.5 * linalg::trace_norm(&diff))
}

/// `1/2 || rho - sigma ||_1`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Dimension("states of unequal dimension".into()));
    }
    Ok(0.5 * linalg::trace_norm(&(rho.matrix() - sigma.matrix())))
}

/// Per-gate error `gamma = D(N, I) = 1 - p_0`.
pub fn pauli_channel_distance(n: &StochasticPauliChannel) -> f64 {
    n.error_rate()
}

/// Checks `O = O^dagger` and `||O|| <= 1`.
pub fn validate_observable(o: &DenseOperator) -> Result<()> {
    let defect = linalg::hermiticity_defect(o.matrix());
    if defect > HERMITIAN_TOL {
        return Err(Error::NonHermitian(defect));
    }
    let norm = linalg::normal_operator_norm(o.matrix());
    if norm > 1.0 + 1e-12 {
        return Err(Error::ObservableNorm(norm));
    }
    Ok(())
}

/// `Tr[O rho]`.
pub fn expectation(o: &DenseOperator, rho: &DensityMatrix) -> Result<f64> {
    if o.dim() != rho.dim() {
        return Err(Error::Dimension("observable and state of unequal dimension".into()));
    }
    validate_observable(o)?;
    Ok(real_trace_product(o.matrix(), rho.matrix()))
}

/// `Re Tr[a b]` without forming the product.
pub fn real_trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..n {
            acc += (a[(i, k)] * b[(k, i)]).re;
        }
    }
    acc
}

/// Ideal evolution `exp(-i H t)`.
pub fn exact_evolution(h: &Hamiltonian, t: f64) -> Result<DenseOperator> {
    if h.n_qubits() > MAX_DENSE_QUBITS {
        return Err(Error::Capacity(format!(
            "dense evolution limited to {MAX_DENSE_QUBITS} qubits"
        )));
    }
    DenseOperator::new(linalg::unitary_exponential(&h.dense()?, t))
}

// ---------------------------------------------------------------------------
// Noise models
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelFamily {
    #[default]
    Depolarizing,
    Dephasing,
    BitFlip,
}

impl ChannelFamily {
    pub fn build(self, n_qubits: usize, support: u64, rate: f64) -> Result<StochasticPauliChannel> {
        if !(0.0..0.5).contains(&rate) {
            return Err(Error::InvalidArgument(format!("error rate {rate} outside [0, 0.5)")));
        }
        match self {
            ChannelFamily::Depolarizing => StochasticPauliChannel::depolarizing(n_qubits, support, rate),
            ChannelFamily::Dephasing => StochasticPauliChannel::dephasing(n_qubits, support, rate),
            ChannelFamily::BitFlip => StochasticPauliChannel::bit_flip(n_qubits, support, rate),
        }
    }
}

/// Per-gate noise: one channel of the configured family on the gate's
/// support, after every elementary gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub family: ChannelFamily,
    /// Rate for rotations (non-Clifford gates).
    pub gamma: f64,
    /// Rate for Clifford (Pauli) gates.
    pub gamma_c: f64,
    /// `gamma' = c_pec * gamma`; derived from the family when `None`.
    pub c_pec: Option<f64>,
    /// Whether noise on controlled gates also touches the ancilla.
    pub noisy_ancilla: bool,
    /// Optional state-preparation and measurement error rate.
    pub spam: Option<f64>,
}

impl NoiseModel {
    pub fn new(family: ChannelFamily, gamma: f64, gamma_c: f64) -> Result<Self> {
        for (name, r) in [("gamma", gamma), ("gamma_c", gamma_c)] {
            if !(0.0..0.5).contains(&r) {
                return Err(Error::InvalidArgument(format!("{name} = {r} outside [0, 0.5)")));
            }
        }
        Ok(NoiseModel { family, gamma, gamma_c, c_pec: None, noisy_ancilla: true, spam: None })
    }

    pub fn depolarizing(gamma: f64) -> Result<Self> {
        NoiseModel::new(ChannelFamily::Depolarizing, gamma, gamma)
    }

    pub fn rotation_channel(&self, n_qubits: usize, support: u64) -> Result<StochasticPauliChannel> {
        self.family.build(n_qubits, support, self.gamma)
    }

    pub fn clifford_channel(&self, n_qubits: usize, support: u64) -> Result<StochasticPauliChannel> {
        self.family.build(n_qubits, support, self.gamma_c)
    }

    /// `c_pec`, defaulting to `(Gamma - 1) / gamma` of the single-qubit
    /// channel of this family at rate `gamma`.
    pub fn c_pec(&self) -> Result<f64> {
        if let Some(c) = self.c_pec {
            return Ok(c);
        }
        if self.gamma == 0.0 {
            return Ok(0.0);
        }
        let ch = self.family.build(1, 1, self.gamma)?;
        let inv = crate::mitigation::pec::invert_pauli_channel(&ch)?;
        Ok((inv.gamma() - 1.0) / self.gamma)
    }

    pub fn gamma_prime(&self) -> Result<f64> {
        Ok(self.c_pec()? * self.gamma)
    }
}
