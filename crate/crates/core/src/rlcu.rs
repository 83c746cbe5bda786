//! Randomized linear combination of unitaries.
//!
//! One segment implements `exp(-i H t / r)` as `sum_mu alpha_mu U_mu` with
//! `U_(k, l, m) = P_l1 ... P_lk exp(-i theta_k P_m)` for even Taylor orders
//! `k`. Each round samples two independent segments and applies them under
//! opposite ancilla controls; `X (x) O` on the final state, reweighted by
//! `Gamma = ||alpha||_1^{2r}`, is an unbiased estimate of `Tr[O U_t(rho)]`.
//!
//! The phase `(-1)^{k/2}` and the signs of negative Hamiltonian
//! coefficients on Pauli gates are scalars on a branch. They are carried as
//! a classical sign on the shot value instead of being applied as gates. The
//! sign of the rotation term's coefficient is folded into its angle.

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::Poisson;
use serde::Serialize;

use crate::channels::{self, conjugate_by_pauli, real_trace_product, DensityMatrix, NoiseModel, StochasticPauliChannel};
use crate::circuit::{Control, Gate, GateKind};
use crate::error::{Error, Result};
use crate::hamiltonian::{normalize, Hamiltonian};
use crate::linalg::{self, CMatrix, DenseOperator, MAX_DENSE_QUBITS};
use crate::mitigation::invert_pauli_channel;
use crate::pauli::PauliString;
use crate::stats::run_shots;

/// `a_k = sqrt(1 + (lambda / (k+1))^2)`.
pub fn taylor_weight(k: u32, lambda: f64) -> f64 {
    let x = lambda / (k as f64 + 1.0);
    (1.0 + x * x).sqrt()
}

/// `theta_k = arctan(lambda / (k+1))`.
pub fn rotation_angle(k: u32, lambda: f64) -> f64 {
    (lambda / (k as f64 + 1.0)).atan()
}

/// Unnormalized Taylor weights `lambda^k / k! * a_k` for even `k` up to the
/// point where a term drops below `tol` times the running sum.
fn series_terms(lambda: f64, tol: f64) -> Vec<(u32, f64)> {
    let mut out = vec![(0, taylor_weight(0, lambda))];
    let mut power = 1.0; // lambda^k / k!
    let mut sum = out[0].1;
    let mut k = 0u32;
    loop {
        power *= lambda * lambda / ((k + 1) as f64 * (k + 2) as f64);
        k += 2;
        let term = power * taylor_weight(k, lambda);
        if term <= tol * sum || k > 400 {
            break;
        }
        sum += term;
        out.push((k, term));
    }
    out
}

/// `||alpha||_1 = sum_{k even} lambda^k / k! * a_k`.
pub fn lcu_one_norm(lambda: f64, tol: f64) -> f64 {
    // smallest terms last
    series_terms(lambda, tol).iter().rev().map(|(_, w)| w).sum()
}

/// Exact law `p(k, lambda)` over even `k`, truncated below `1e-18`.
pub fn taylor_order_pmf(lambda: f64) -> Vec<(u32, f64)> {
    let terms = series_terms(lambda, 1e-18);
    let total: f64 = terms.iter().rev().map(|(_, w)| w).sum();
    terms.into_iter().map(|(k, w)| (k, w / total)).collect()
}

/// Draws `k ~ p(k, lambda)`: Poisson draw, odd draws rejected, then thinned
/// with acceptance `a_k / a_0`.
pub fn sample_taylor_order<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u32 {
    if lambda <= 0.0 {
        return 0;
    }
    let poisson = Poisson::new(lambda).expect("positive rate");
    let a0 = taylor_weight(0, lambda);
    loop {
        let k = poisson.sample(rng) as u32;
        if k % 2 == 1 {
            continue;
        }
        if rng.random::<f64>() * a0 < taylor_weight(k, lambda) {
            return k;
        }
    }
}

/// `(lambda tanh lambda, lambda^2 + lambda tanh lambda)`: the bounds on the
/// mean and variance of the sampled Taylor order.
pub fn k_moment_bounds(lambda: f64) -> (f64, f64) {
    let m = lambda * lambda.tanh();
    (m, lambda * lambda + m)
}

/// Moment generating function of the even-Poisson law,
/// `cosh(lambda e^s) / cosh(lambda)`.
pub fn even_poisson_mgf(lambda: f64, s: f64) -> f64 {
    (lambda * s.exp()).cosh() / lambda.cosh()
}

/// Exact mean and variance of the even-Poisson law.
pub fn even_poisson_moments(lambda: f64) -> (f64, f64) {
    let mean = lambda * lambda.tanh();
    let second = lambda * lambda + mean;
    (mean, second - mean * mean)
}

/// Exact mean and variance of `p(k, lambda)` by direct series summation.
pub fn taylor_order_moments(lambda: f64) -> (f64, f64) {
    let pmf = taylor_order_pmf(lambda);
    let mean: f64 = pmf.iter().map(|(k, p)| *k as f64 * p).sum();
    let second: f64 = pmf.iter().map(|(k, p)| (*k as f64).powi(2) * p).sum();
    (mean, second - mean * mean)
}

/// One sampled multi-index `mu = (k, l_1..l_k, m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentSample {
    pub taylor_order: u32,
    pub pauli_indices: Vec<usize>,
    pub rotation_index: usize,
    pub rotation_angle: f64,
    /// `(-1)^{k/2}`.
    pub sign: f64,
}

impl SegmentSample {
    pub fn new(taylor_order: u32, pauli_indices: Vec<usize>, rotation_index: usize, lambda: f64) -> Result<Self> {
        if taylor_order % 2 == 1 {
            return Err(Error::InvalidArgument(format!("Taylor order {taylor_order} is odd")));
        }
        if pauli_indices.len() != taylor_order as usize {
            return Err(Error::InvalidArgument(format!(
                "{} Pauli indices for Taylor order {taylor_order}",
                pauli_indices.len()
            )));
        }
        Ok(SegmentSample {
            taylor_order,
            pauli_indices,
            rotation_index,
            rotation_angle: rotation_angle(taylor_order, lambda),
            sign: if taylor_order % 4 == 0 { 1.0 } else { -1.0 },
        })
    }
}

/// Draws segments for one Hamiltonian at fixed `lambda`.
#[derive(Debug, Clone)]
pub struct SegmentSampler {
    lambda: f64,
    terms: WeightedIndex<f64>,
}

impl SegmentSampler {
    pub fn new(h: &Hamiltonian, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!("lambda = {lambda}")));
        }
        let (_, probs) = normalize(h)?;
        let terms = WeightedIndex::new(&probs).map_err(|e| Error::DegenerateInput(e.to_string()))?;
        Ok(SegmentSampler { lambda, terms })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SegmentSample {
        let k = sample_taylor_order(self.lambda, rng);
        let pauli_indices = (0..k).map(|_| self.terms.sample(rng)).collect();
        let m = self.terms.sample(rng);
        SegmentSample::new(k, pauli_indices, m, self.lambda).expect("even order by construction")
    }
}

/// Gates of `U_mu` in application order plus the classical sign that
/// multiplies the branch.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentCircuit {
    pub gates: Vec<Gate>,
    pub sign: f64,
}

/// `U_mu = P_l1 ... P_lk exp(-i theta_k P_m)`: the rotation first, then
/// `P_lk` down to `P_l1`. The sign is `(-1)^{k/2}` times the coefficient
/// signs of the Pauli-gate terms.
pub fn build_segment_unitary(sample: &SegmentSample, h: &Hamiltonian) -> Result<SegmentCircuit> {
    let len = h.num_terms();
    let term = |i: usize| {
        h.terms()
            .get(i)
            .ok_or(Error::IndexOutOfRange { index: i, len })
    };
    let rot = term(sample.rotation_index)?;
    let mut gates = Vec::with_capacity(sample.pauli_indices.len() + 1);
    gates.push(Gate::rotation(
        *rot.pauli(),
        rot.coefficient().signum() * sample.rotation_angle,
    ));
    let mut sign = sample.sign;
    for &i in sample.pauli_indices.iter().rev() {
        let t = term(i)?;
        sign *= t.coefficient().signum();
        gates.push(Gate::pauli(*t.pauli()));
    }
    Ok(SegmentCircuit { gates, sign })
}

impl SegmentCircuit {
    /// `sign * U_mu` as a dense matrix.
    pub fn signed_matrix(&self, n_qubits: usize) -> CMatrix {
        let dim = 1usize << n_qubits;
        let u = self.gates.iter().fold(linalg::identity(dim), |acc, g| g.matrix() * acc);
        u * Complex64::new(self.sign, 0.0)
    }
}

/// `sum_mu alpha_mu sign_mu U_mu` with the Taylor series cut after order
/// `k_max`; converges to `exp(-i lambda H / beta)`.
pub fn averaged_segment_operator(h: &Hamiltonian, lambda: f64, k_max: u32) -> Result<CMatrix> {
    let n = h.n_qubits();
    if n > MAX_DENSE_QUBITS {
        return Err(Error::Capacity(format!("dense segment limited to {MAX_DENSE_QUBITS} qubits")));
    }
    let (beta, probs) = normalize(h)?;
    let dim = 1usize << n;
    // hbar = H / beta
    let hbar = h.dense()? * Complex64::new(1.0 / beta, 0.0);
    let mut out = CMatrix::zeros(dim, dim);
    let mut power = linalg::identity(dim); // hbar^k
    let mut coef = 1.0; // lambda^k / k!
    let mut k = 0u32;
    while k <= k_max {
        let mut rot_avg = CMatrix::zeros(dim, dim);
        for (term, p) in h.terms().iter().zip(&probs) {
            let g = Gate::rotation(*term.pauli(), term.coefficient().signum() * rotation_angle(k, lambda));
            rot_avg += g.matrix() * Complex64::new(*p, 0.0);
        }
        let sign = if k % 4 == 0 { 1.0 } else { -1.0 };
        out += &power * rot_avg * Complex64::new(sign * coef * taylor_weight(k, lambda), 0.0);
        power = &power * &hbar * &hbar;
        coef *= lambda * lambda / ((k + 1) as f64 * (k + 2) as f64);
        k += 2;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShotMode {
    /// Shot value is the exact `<X (x) O>` of the sampled circuit.
    #[default]
    Expectation,
    /// Shot value is a sampled `+-1` measurement outcome.
    MeasurementBit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RlcuConfig {
    pub r: usize,
    pub shots: usize,
    pub seed: u64,
    pub shot_mode: ShotMode,
    /// Cancel the gate noise with sampled Pauli corrections.
    pub pec: bool,
}

impl RlcuConfig {
    pub fn new(r: usize, shots: usize, seed: u64) -> Self {
        RlcuConfig { r, shots, seed, shot_mode: ShotMode::Expectation, pec: false }
    }

    /// `lambda = beta t / r`.
    pub fn lambda(&self, h: &Hamiltonian, t: f64) -> f64 {
        h.beta() * t / self.r as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RlcuEstimate {
    pub mean: f64,
    /// Variance of `mean`.
    pub variance: f64,
    /// Variance of one reweighted shot.
    pub shot_variance: f64,
    pub stderr: f64,
    pub gamma_rlcu: f64,
    pub shots: usize,
    /// Four standard errors.
    pub halfwidth: f64,
}

const SERIES_TOL: f64 = 1e-17;

/// `Gamma_RLCU = ||alpha||_1^{2r}`.
pub fn gamma_rlcu(lambda: f64, r: usize) -> f64 {
    lcu_one_norm(lambda, SERIES_TOL).powi(2 * r as i32)
}

/// `Gamma_RLCU * 2 (gamma r + gamma_c (beta t)^2 / r)`.
pub fn rlcu_bias_bound(h: &Hamiltonian, t: f64, r: usize, noise: &NoiseModel) -> f64 {
    let tt = h.beta() * t;
    let rf = r as f64;
    gamma_rlcu(tt / rf, r) * 2.0 * (noise.gamma * rf + noise.gamma_c * tt * tt / rf)
}

fn validate_inputs(h: &Hamiltonian, t: f64, r: usize, o: &DenseOperator, rho0: &DensityMatrix) -> Result<()> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be at least 1".into()));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time {t}")));
    }
    if o.n_qubits() != h.n_qubits() || rho0.n_qubits() != h.n_qubits() {
        return Err(Error::Dimension("observable, state and Hamiltonian widths differ".into()));
    }
    if h.n_qubits() + 1 > MAX_DENSE_QUBITS {
        return Err(Error::Capacity("ancilla plus system exceeds the dense limit".into()));
    }
    channels::validate_observable(o)
}

/// `|+><+| (x) rho`.
fn joint_initial_state(rho: &CMatrix) -> CMatrix {
    let d = rho.nrows();
    CMatrix::from_fn(2 * d, 2 * d, |a, b| rho[(a % d, b % d)] * 0.5)
}

/// `X (x) O` with the ancilla as the leftmost qubit.
fn ancilla_x_observable(o: &CMatrix) -> CMatrix {
    let d = o.nrows();
    CMatrix::from_fn(2 * d, 2 * d, |a, b| {
        if (a < d) != (b < d) {
            o[(a % d, b % d)]
        } else {
            linalg::ZERO
        }
    })
}

fn controlled(g: &Gate, on_one: bool) -> Result<Gate> {
    let widened = match g.kind() {
        GateKind::Rotation { pauli, angle } => Gate::rotation(pauli.widen_left(1)?, *angle),
        GateKind::Pauli(p) => Gate::pauli(p.widen_left(1)?),
    };
    widened.controlled(Control { qubit: 0, on_one })
}

/// Sampler over one channel's inverse: corrections, their signs and the
/// channel's `Gamma`.
struct Correction {
    dist: WeightedIndex<f64>,
    entries: Vec<(f64, PauliString)>,
    gamma: f64,
}

impl Correction {
    fn new(ch: &StochasticPauliChannel) -> Result<Self> {
        let q = invert_pauli_channel(ch)?;
        let dist = WeightedIndex::new(q.probabilities()).map_err(|e| Error::DegenerateInput(e.to_string()))?;
        Ok(Correction { dist, entries: q.entries().map(|(w, p)| (w.signum(), *p)).collect(), gamma: q.gamma() })
    }

    /// Applies one sampled correction and returns its weight `Gamma sgn(q)`.
    fn apply(&self, state: &mut CMatrix, rng: &mut impl Rng) -> f64 {
        let (s, p) = self.entries[self.dist.sample(rng)];
        if !p.is_identity() {
            *state = conjugate_by_pauli(state, &p);
        }
        s * self.gamma
    }
}

/// Per-term noise channels on the joint register, keyed by gate kind.
struct JointNoise {
    rotation: Vec<StochasticPauliChannel>,
    clifford: Vec<StochasticPauliChannel>,
    /// Inverses of `rotation` and `clifford`, built when PEC is on.
    corrections: Option<(Vec<Correction>, Vec<Correction>)>,
}

impl JointNoise {
    fn with_pec(h: &Hamiltonian, noise: &NoiseModel, pec: bool) -> Result<Self> {
        let mut jn = JointNoise::new(h, noise)?;
        if pec {
            let rot = jn.rotation.iter().map(Correction::new).collect::<Result<_>>()?;
            let cl = jn.clifford.iter().map(Correction::new).collect::<Result<_>>()?;
            jn.corrections = Some((rot, cl));
        }
        Ok(jn)
    }

    fn new(h: &Hamiltonian, noise: &NoiseModel) -> Result<Self> {
        let n = h.n_qubits() + 1;
        let ancilla = 1u64 << h.n_qubits();
        let mut rotation = Vec::new();
        let mut clifford = Vec::new();
        for term in h.terms() {
            let mut support = term.pauli().support_mask();
            if noise.noisy_ancilla {
                support |= ancilla;
            }
            rotation.push(noise.rotation_channel(n, support)?);
            clifford.push(noise.clifford_channel(n, support)?);
        }
        Ok(JointNoise { rotation, clifford, corrections: None })
    }
}

/// Noiseless shot: the branch signs and `Re Tr[O W1 rho W0^dagger]`.
fn noiseless_shot(h: &Hamiltonian, sampler: &SegmentSampler, r: usize, rho: &CMatrix, o: &CMatrix, rng: &mut impl Rng) -> Result<(f64, f64)> {
    let mut m = rho.clone();
    let mut sign = 1.0;
    for _ in 0..r {
        let s1 = build_segment_unitary(&sampler.sample(rng), h)?;
        let s0 = build_segment_unitary(&sampler.sample(rng), h)?;
        for g in &s1.gates {
            m = g.action().left(&m);
        }
        for g in &s0.gates {
            m = g.action().right_adjoint(&m);
        }
        sign *= s1.sign * s0.sign;
    }
    Ok((sign, real_trace_product(o, &m)))
}

/// Noisy shot on the joint ancilla-system density matrix: the classical
/// weight (branch signs and any correction weights) and `<X (x) O>`.
fn noisy_shot(
    h: &Hamiltonian,
    sampler: &SegmentSampler,
    r: usize,
    joint_rho: &CMatrix,
    joint_o: &CMatrix,
    noise: &JointNoise,
    rng: &mut impl Rng,
) -> Result<(f64, f64)> {
    let mut state = joint_rho.clone();
    let mut weight = 1.0;
    for _ in 0..r {
        for on_one in [true, false] {
            let sample = sampler.sample(rng);
            let seg = build_segment_unitary(&sample, h)?;
            weight *= seg.sign;
            let slots = std::iter::once((true, sample.rotation_index))
                .chain(sample.pauli_indices.iter().rev().map(|&i| (false, i)));
            for (g, (is_rotation, i)) in seg.gates.iter().zip(slots) {
                let ch = if is_rotation { &noise.rotation[i] } else { &noise.clifford[i] };
                state = ch.apply_matrix(&controlled(g, on_one)?.action().conjugate(&state));
                if let Some((rot, cl)) = &noise.corrections {
                    let c = if is_rotation { &rot[i] } else { &cl[i] };
                    weight *= c.apply(&mut state, rng);
                }
            }
        }
    }
    Ok((weight, real_trace_product(joint_o, &state)))
}

/// Samples `M` RLCU circuits and averages the reweighted, sign-corrected
/// shot values.
pub fn run_rlcu_estimate(
    h: &Hamiltonian,
    t: f64,
    cfg: &RlcuConfig,
    o: &DenseOperator,
    rho0: &DensityMatrix,
    noise: Option<&NoiseModel>,
) -> Result<RlcuEstimate> {
    validate_inputs(h, t, cfg.r, o, rho0)?;
    let lambda = cfg.lambda(h, t);
    let sampler = SegmentSampler::new(h, lambda)?;
    let gamma = gamma_rlcu(lambda, cfg.r);
    let joint = match noise {
        Some(nm) => Some((
            JointNoise::with_pec(h, nm, cfg.pec)?,
            joint_initial_state(rho0.matrix()),
            ancilla_x_observable(o.matrix()),
        )),
        None => None,
    };
    let stats = run_shots(cfg.shots, cfg.seed, |rng, _| {
        let (weight, expectation) = match &joint {
            None => noiseless_shot(h, &sampler, cfg.r, rho0.matrix(), o.matrix(), rng)?,
            Some((jn, jrho, jo)) => noisy_shot(h, &sampler, cfg.r, jrho, jo, jn, rng)?,
        };
        let value = match cfg.shot_mode {
            ShotMode::Expectation => expectation,
            ShotMode::MeasurementBit => {
                // a single +-1 outcome with mean <X (x) O>
                let e = expectation.clamp(-1.0, 1.0);
                if rng.random::<f64>() < 0.5 * (1.0 + e) {
                    1.0
                } else {
                    -1.0
                }
            }
        };
        Ok(gamma * weight * value)
    })?;
    let variance = stats.variance() / stats.count as f64;
    Ok(RlcuEstimate {
        mean: stats.mean,
        variance,
        shot_variance: stats.variance(),
        stderr: variance.sqrt(),
        gamma_rlcu: gamma,
        shots: stats.count,
        halfwidth: 4.0 * variance.sqrt(),
    })
}

/// Exact mean of the (noisy) RLCU estimator, from the sign-weighted average
/// superoperator of each controlled branch with the Taylor series cut where
/// `p(k) < 1e-18`.
pub fn rlcu_expectation_exact(
    h: &Hamiltonian,
    t: f64,
    r: usize,
    o: &DenseOperator,
    rho0: &DensityMatrix,
    noise: Option<&NoiseModel>,
) -> Result<f64> {
    validate_inputs(h, t, r, o, rho0)?;
    let lambda = h.beta() * t / r as f64;
    let (_, probs) = normalize(h)?;
    let pmf = taylor_order_pmf(lambda);
    let jn = noise.map(|nm| JointNoise::new(h, nm)).transpose()?;

    let apply = |state: &CMatrix, g: &Gate, ch: Option<&StochasticPauliChannel>| -> CMatrix {
        let out = g.action().conjugate(state);
        match ch {
            Some(c) => c.apply_matrix(&out),
            None => out,
        }
    };

    let mut branches: Vec<Box<dyn Fn(&CMatrix) -> Result<CMatrix> + '_>> = Vec::new();
    for on_one in [true, false] {
        let paulis: Vec<(Gate, f64)> = h
            .terms()
            .iter()
            .map(|term| Ok((controlled(&Gate::pauli(*term.pauli()), on_one)?, term.coefficient().signum())))
            .collect::<Result<_>>()?;
        let jn = &jn;
        let probs = &probs;
        let pmf = &pmf;
        let apply = &apply;
        branches.push(Box::new(move |sigma: &CMatrix| -> Result<CMatrix> {
            // C(x) = sum_l p_l s_l N_c(cP_l x cP_l)
            let c_map = |x: &CMatrix| -> CMatrix {
                let mut acc = CMatrix::zeros(x.nrows(), x.ncols());
                for (l, (g, s)) in paulis.iter().enumerate() {
                    let ch = jn.as_ref().map(|j| &j.clifford[l]);
                    acc += apply(x, g, ch) * Complex64::new(probs[l] * s, 0.0);
                }
                acc
            };
            // R_k(x) = sum_m p_m N(cR_m(theta_k) x cR_m(theta_k)^dagger)
            let r_map = |k: u32, x: &CMatrix| -> Result<CMatrix> {
                let mut acc = CMatrix::zeros(x.nrows(), x.ncols());
                for (m, term) in h.terms().iter().enumerate() {
                    let g = controlled(
                        &Gate::rotation(*term.pauli(), term.coefficient().signum() * rotation_angle(k, lambda)),
                        on_one,
                    )?;
                    let ch = jn.as_ref().map(|j| &j.rotation[m]);
                    acc += apply(x, &g, ch) * Complex64::new(probs[m], 0.0);
                }
                Ok(acc)
            };
            // Horner in C^2 from the highest order down
            let mut z = CMatrix::zeros(sigma.nrows(), sigma.ncols());
            for (k, p) in pmf.iter().rev() {
                z = c_map(&c_map(&z));
                let sign = if k % 4 == 0 { 1.0 } else { -1.0 };
                z += r_map(*k, sigma)? * Complex64::new(sign * p, 0.0);
            }
            Ok(z)
        }));
    }

    let mut state = joint_initial_state(rho0.matrix());
    for _ in 0..r {
        for b in &branches {
            state = b(&state)?;
        }
    }
    let gamma = lcu_one_norm(lambda, SERIES_TOL).powi(2 * r as i32);
    Ok(gamma * real_trace_product(&ancilla_x_observable(o.matrix()), &state))
}

/// Diagonal of the reduced ancilla state after `rounds` noiseless rounds
/// of one sampled circuit.
pub fn ancilla_populations<R: Rng + ?Sized>(
    h: &Hamiltonian,
    lambda: f64,
    rounds: usize,
    rho0: &DensityMatrix,
    rng: &mut R,
) -> Result<Vec<(f64, f64)>> {
    let sampler = SegmentSampler::new(h, lambda)?;
    let mut state = joint_initial_state(rho0.matrix());
    let d = rho0.dim();
    let mut out = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        for on_one in [true, false] {
            let seg = build_segment_unitary(&sampler.sample(rng), h)?;
            for g in &seg.gates {
                state = controlled(g, on_one)?.action().conjugate(&state);
            }
        }
        let p0: f64 = (0..d).map(|i| state[(i, i)].re).sum();
        let p1: f64 = (d..2 * d).map(|i| state[(i, i)].re).sum();
        out.push((p0, p1));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn one_norm_values() {
        assert_eq!(lcu_one_norm(0.0, 1e-16), 1.0);
        assert_abs_diff_eq!(lcu_one_norm(1.0, 1e-16), 1.985180, epsilon = 1e-6);
        let mut prev = 0.0;
        for i in 0..40 {
            let l = i as f64 * 0.1;
            let v = lcu_one_norm(l, 1e-16);
            assert!(v >= prev);
            assert!(v <= l.cosh() * (1.0 + l * l).sqrt() + 1e-12);
            prev = v;
        }
    }

    #[test]
    fn sample_basics() {
        let s = SegmentSample::new(0, vec![], 0, 1.0).unwrap();
        assert_abs_diff_eq!(s.rotation_angle, std::f64::consts::FRAC_PI_4, epsilon = 1e-15);
        assert_eq!(s.sign, 1.0);
        let s = SegmentSample::new(2, vec![0, 1], 1, 1.0).unwrap();
        assert_eq!(s.sign, -1.0);
        let h = Hamiltonian::from_labels(&[(1.0, "XI"), (1.0, "ZZ")]).unwrap();
        let c = build_segment_unitary(&s, &h).unwrap();
        assert_eq!(c.gates.len(), 3);
        assert!(!c.gates[0].is_clifford() && c.gates[1].is_clifford());
        assert!(build_segment_unitary(&SegmentSample::new(0, vec![], 5, 1.0).unwrap(), &h).is_err());
        let mut rng = crate::stats::shot_rng(0, 0);
        assert_eq!(sample_taylor_order(0.0, &mut rng), 0);
    }

    #[test]
    fn moment_bounds() {
        assert_eq!(k_moment_bounds(0.0), (0.0, 0.0));
        let (m, v) = k_moment_bounds(1.0);
        assert_abs_diff_eq!(m, 0.76159, epsilon = 1e-5);
        assert_abs_diff_eq!(v, 1.76159, epsilon = 1e-5);
    }
}
