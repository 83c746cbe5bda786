//! Space-time noise inversion.
//!
//! The noise of a segment is written as `(1 - p) id + p E`, with `E` the
//! process that applies a Pauli error pattern conditioned on at least one
//! error. Its inverse is the alternating series `sum_l q_l E^l`, sampled by
//! drawing `l`, carrying `(-1)^l`, and inserting `l` fresh patterns into an
//! otherwise normally noisy run.

use std::ops::Range;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channels::{self, real_trace_product, DensityMatrix, StochasticPauliChannel};
use crate::circuit::NoisyCircuit;
use crate::error::{Error, Result};
use crate::linalg::DenseOperator;
use crate::mitigation::{MitigatedEstimate, MitigationMode};
use crate::pauli::PauliString;
use crate::stats::run_shots;

/// Below this acceptance rate rejection sampling of a pattern is replaced
/// by exact sequential sampling.
pub const MIN_REJECTION_ACCEPTANCE: f64 = 1e-3;

/// `q_l = (-1)^l p^l / (1 - p)^{l + 1}`.
pub fn series_weight(p: f64, l: u32) -> f64 {
    let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
    sign * p.powi(l as i32) / (1.0 - p).powi(l as i32 + 1)
}

/// Segment overhead `1 / (1 - 2p)`.
pub fn segment_gamma(p: f64) -> f64 {
    1.0 / (1.0 - 2.0 * p)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SniPlan {
    segments: Vec<Range<usize>>,
    segment_q: Vec<f64>,
    q_st: f64,
    gamma: f64,
}

impl SniPlan {
    pub fn segments(&self) -> usize {
        self.segments.len()
    }

    /// Gate index ranges, one per segment.
    pub fn ranges(&self) -> &[Range<usize>] {
        &self.segments
    }

    /// Error probability of each segment, `1 - prod p_0` over its gates.
    pub fn segment_error(&self) -> &[f64] {
        &self.segment_q
    }

    /// Representative per-segment probability `1 - (prod_all p_0)^{1/s}`.
    pub fn q_st(&self) -> f64 {
        self.q_st
    }

    /// `1 / (1 - 2 q_ST)`.
    pub fn gamma_seg(&self) -> f64 {
        segment_gamma(self.q_st)
    }

    /// `prod_i 1 / (1 - 2 q_i)` over the actual segments.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn series_weight(&self, segment: usize, l: u32) -> f64 {
        series_weight(self.segment_q[segment], l)
    }
}

fn split(len: usize, s: usize) -> Vec<Range<usize>> {
    (0..s).map(|i| i * len / s..(i + 1) * len / s).collect()
}

fn segment_errors(circuit: &NoisyCircuit, ranges: &[Range<usize>]) -> Vec<f64> {
    ranges
        .iter()
        .map(|r| {
            let p0: f64 = circuit.gates()[r.clone()].iter().map(|g| g.noise.identity_probability()).product();
            1.0 - p0
        })
        .collect()
}

/// Splits `circuit` into `s` contiguous segments of near-equal gate count.
pub fn sni_plan(circuit: &NoisyCircuit, s: usize) -> Result<SniPlan> {
    if s == 0 {
        return Err(Error::InvalidArgument("at least one segment is required".into()));
    }
    if s > circuit.len().max(1) {
        return Err(Error::InvalidArgument(format!(
            "{s} segments for a {}-gate circuit",
            circuit.len()
        )));
    }
    let ranges = split(circuit.len(), s);
    let segment_q = segment_errors(circuit, &ranges);
    let total_p0: f64 = circuit.gates().iter().map(|g| g.noise.identity_probability()).product();
    let q_st = 1.0 - total_p0.powf(1.0 / s as f64);
    let worst = segment_q.iter().cloned().fold(0.0, f64::max);
    if worst >= 0.5 {
        let suggested = (s + 1..=circuit.len())
            .find(|&k| segment_errors(circuit, &split(circuit.len(), k)).iter().all(|q| *q < 0.5))
            .unwrap_or(0);
        return Err(Error::InfeasibleSegmentation { q_st: worst, suggested });
    }
    let gamma = segment_q.iter().map(|q| segment_gamma(*q)).product();
    Ok(SniPlan { segments: ranges, segment_q, q_st, gamma })
}

/// Sampling overhead `(1 - 2 q_ST)^{-2s}` of `s` segments over `d` layers
/// with per-layer error `q`, with its analytic bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SniOverhead {
    pub exact: f64,
    pub lower: f64,
    pub upper: f64,
}

pub fn sni_overhead(q: f64, d: f64, s: f64) -> Result<SniOverhead> {
    if !(0.0..1.0).contains(&q) || d < 0.0 || s < 1.0 {
        return Err(Error::InvalidArgument(format!("need 0 <= q < 1, d >= 0, s >= 1 (q={q}, d={d}, s={s})")));
    }
    let x = q * d;
    if s <= 2.0 * x {
        return Err(Error::InfeasibleSegmentation {
            q_st: 1.0 - (1.0 - q).powf(d / s),
            suggested: (2.0 * x).floor() as usize + 1,
        });
    }
    let q_st = 1.0 - (1.0 - q).powf(d / s);
    if q_st >= 0.5 {
        let suggested = (d * (1.0 - q).ln() / 0.5f64.ln()).floor() as usize + 1;
        return Err(Error::InfeasibleSegmentation { q_st, suggested });
    }
    Ok(SniOverhead {
        exact: (1.0 - 2.0 * q_st).powf(-2.0 * s),
        lower: (4.0 * x).exp(),
        upper: (4.0 * x / (1.0 - 2.0 * x / s)).exp(),
    })
}

/// Per-gate error tables for one segment, used to draw conditioned patterns.
struct SegmentSampler {
    range: Range<usize>,
    p: f64,
    /// Per gate: probability of no error, sampler over all outcomes and over
    /// the non-identity outcomes only.
    gates: Vec<GateErrors>,
    /// `P(first error at gate j)`, for the sequential sampler.
    first: Option<WeightedIndex<f64>>,
}

struct GateErrors {
    outcomes: Vec<PauliString>,
    all: Option<WeightedIndex<f64>>,
    errors: Option<(WeightedIndex<f64>, Vec<PauliString>)>,
}

impl GateErrors {
    fn new(ch: &StochasticPauliChannel) -> Result<Self> {
        let probs = ch.probabilities();
        let outcomes: Vec<PauliString> = probs.iter().map(|(p, _)| *p).collect();
        let weight_err = |e: rand::distr::weighted::Error| Error::DegenerateInput(e.to_string());
        let all = if probs.len() > 1 {
            Some(WeightedIndex::new(probs.iter().map(|(_, w)| *w)).map_err(weight_err)?)
        } else {
            None
        };
        let err: Vec<(PauliString, f64)> = probs.iter().filter(|(p, w)| !p.is_identity() && *w > 0.0).cloned().collect();
        let errors = if err.is_empty() {
            None
        } else {
            let w = WeightedIndex::new(err.iter().map(|(_, w)| *w)).map_err(weight_err)?;
            Some((w, err.into_iter().map(|(p, _)| p).collect()))
        };
        Ok(GateErrors { outcomes, all, errors })
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> PauliString {
        match &self.all {
            Some(w) => self.outcomes[w.sample(rng)],
            None => self.outcomes[0],
        }
    }

    fn draw_error(&self, rng: &mut ChaCha8Rng) -> Option<PauliString> {
        self.errors.as_ref().map(|(w, ps)| ps[w.sample(rng)])
    }
}

fn multiply_into(slot: &mut PauliString, p: &PauliString) {
    if p.is_identity() {
        return;
    }
    // global phases cancel under conjugation
    *slot = PauliString::from_masks(slot.n_qubits(), slot.x_mask() ^ p.x_mask(), slot.z_mask() ^ p.z_mask())
        .expect("same width");
}

impl SegmentSampler {
    fn new(circuit: &NoisyCircuit, range: Range<usize>, p: f64) -> Result<Self> {
        let gates: Vec<GateErrors> = circuit.gates()[range.clone()]
            .iter()
            .map(|g| GateErrors::new(&g.noise))
            .collect::<Result<_>>()?;
        let first = if p > 0.0 && p < MIN_REJECTION_ACCEPTANCE {
            let mut clean = 1.0;
            let weights: Vec<f64> = circuit.gates()[range.clone()]
                .iter()
                .map(|g| {
                    let p0 = g.noise.identity_probability();
                    let w = clean * (1.0 - p0);
                    clean *= p0;
                    w
                })
                .collect();
            Some(WeightedIndex::new(weights).map_err(|e| Error::DegenerateInput(e.to_string()))?)
        } else {
            None
        };
        Ok(SegmentSampler { range, p, gates, first })
    }

    /// `l` with probability `(1 - 2p)/(1 - p) (p/(1 - p))^l`.
    fn draw_order(&self, rng: &mut ChaCha8Rng) -> u32 {
        let ratio = self.p / (1.0 - self.p);
        let mut l = 0;
        while rng.random::<f64>() < ratio {
            l += 1;
        }
        l
    }

    /// One error pattern conditioned on at least one non-identity, multiplied
    /// into `out`.
    fn draw_pattern(&self, rng: &mut ChaCha8Rng, out: &mut [PauliString]) {
        let offset = self.range.start;
        match &self.first {
            None => loop {
                let pattern: Vec<PauliString> = self.gates.iter().map(|g| g.draw(rng)).collect();
                if pattern.iter().any(|p| !p.is_identity()) {
                    for (i, p) in pattern.iter().enumerate() {
                        multiply_into(&mut out[offset + i], p);
                    }
                    return;
                }
            },
            Some(first) => {
                let j = first.sample(rng);
                let e = self.gates[j].draw_error(rng).expect("positive weight implies an error outcome");
                multiply_into(&mut out[offset + j], &e);
                for (i, g) in self.gates.iter().enumerate().skip(j + 1) {
                    multiply_into(&mut out[offset + i], &g.draw(rng));
                }
            }
        }
    }
}

/// Sampled SNI estimate of `Tr[O U rho0 U^dag]` for the ideal circuit.
pub fn sni_estimate(
    plan: &SniPlan,
    circuit: &NoisyCircuit,
    o: &DenseOperator,
    rho0: &DensityMatrix,
    shots: usize,
    seed: u64,
) -> Result<MitigatedEstimate> {
    let covered: usize = plan.segments.iter().map(|r| r.len()).sum();
    if covered != circuit.len() || plan.segments.last().is_some_and(|r| r.end != circuit.len()) {
        return Err(Error::Dimension("plan does not match the circuit".into()));
    }
    if o.n_qubits() != circuit.n_qubits() || rho0.n_qubits() != circuit.n_qubits() {
        return Err(Error::Dimension("observable or state width differs from circuit".into()));
    }
    channels::validate_observable(o)?;
    let samplers: Vec<SegmentSampler> = plan
        .segments
        .iter()
        .zip(&plan.segment_q)
        .map(|(r, q)| SegmentSampler::new(circuit, r.clone(), *q))
        .collect::<Result<_>>()?;
    let gamma = plan.gamma;
    let n = circuit.n_qubits();
    let stats = run_shots(shots, seed, |rng, _| {
        let mut insertions = vec![PauliString::identity(n); circuit.len()];
        let mut sign = 1.0;
        for s in &samplers {
            let l = s.draw_order(rng);
            if l % 2 == 1 {
                sign = -sign;
            }
            for _ in 0..l {
                s.draw_pattern(rng, &mut insertions);
            }
        }
        let rho = circuit.evolve_noisy(rho0.matrix(), Some(&insertions))?;
        Ok(gamma * sign * real_trace_product(o.matrix(), &rho))
    })?;
    Ok(MitigatedEstimate::from_stats(stats, gamma, MitigationMode::Sni))
}
