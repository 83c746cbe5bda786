//! Validation suites. Each suite runs one family of checks against the
//! analytic bounds and returns auditable records: every decision is a
//! [`Check`] holding both sides of its comparison.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channels::{self, pauli_channel_distance, ChannelFamily, DensityMatrix, NoiseModel};
use crate::circuit::{Gate, NoisyCircuit};
use crate::cost::{self, RlcuCostInputs, TrotterCostInputs};
use crate::error::{Error, Result};
use crate::hamiltonian::{c1_prefactor, Hamiltonian, NormMode};
use crate::lab::report::{Check, Provenance, Record, Report};
use crate::lab::scenario::{heis3, pauli2};
use crate::linalg::DenseOperator;
use crate::mitigation::pec::{self, mismatch_bias_bound, model_for_circuit, residual_distance};
use crate::mitigation::sni::{sni_estimate, sni_overhead, sni_plan};
use crate::pauli::PauliString;
use crate::rlcu::{self, RlcuConfig};
use crate::stats::{golden_section_min, loglog_slope, run_shots};
use crate::trotter;

/// Suite ids with one-line descriptions, in run order.
pub const SUITES: [(&str, &str); 11] = [
    ("trotter-order", "log-log slope of the microstep error equals k+1"),
    ("first-order-bound", "first-order trace-distance bias below c1 t^2 / N"),
    ("trotter-bias", "noisy Trotter bias below alpha_k/d^k + L d gamma"),
    ("pec-exact", "exhaustive PEC is exact; sampled PEC within 4 Gamma/sqrt(M)"),
    ("pec-mismatch", "mismatched-model PEC bias below ((1+2 dg)^N_G - 1)/2"),
    ("rlcu-unbiased", "noiseless RLCU estimate unbiased; overhead majorants"),
    ("taylor-moments", "sampled Taylor-order moments within their bounds"),
    ("optimizer", "closed-form and bisection optima against numeric argmins"),
    ("rlcu-rstar", "optimized repetition count never loses to r = t^2"),
    ("sni", "space-time noise inversion is unbiased; overhead sandwich"),
    ("table1", "scaling exponents of eps_b and eps_c in gamma"),
];

/// Seed and optional shot override shared by every suite in a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Replaces each suite's default Monte Carlo shot count.
    pub shots: Option<usize>,
}

impl SuiteOptions {
    fn shots(&self, default: usize) -> usize {
        self.shots.unwrap_or(default)
    }

    /// Independent seed per `(tag, index)`.
    fn seed_for(&self, tag: &str, index: u64) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in tag.bytes() {
            h = (h ^ b as u64).wrapping_mul(0x0100_0000_01b3);
        }
        splitmix(self.seed ^ splitmix(h ^ index))
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|(n, _)| *n).collect()
}

fn unknown(name: &str) -> Error {
    Error::UnknownSuite { name: name.to_string(), available: suite_names().join(", ") }
}

/// Runs one suite into a fresh report.
pub fn run_suite(name: &str, opts: &SuiteOptions) -> Result<Report> {
    run_suites(&[name], opts)
}

/// Runs suites in the given order; `["all"]` runs every suite.
pub fn run_suites(names: &[&str], opts: &SuiteOptions) -> Result<Report> {
    let names: Vec<&str> = if names == ["all"] { suite_names() } else { names.to_vec() };
    if names.is_empty() {
        return Err(unknown(""));
    }
    for n in &names {
        if !SUITES.iter().any(|(s, _)| s == n) {
            return Err(unknown(n));
        }
    }
    let command = format!("validate --suite {}", names.join(","));
    let mut report = Report::new("validation", Provenance::new(&command, opts.seed, None));
    if let Some(m) = opts.shots {
        report.notes.push(format!("shot counts overridden to {m}"));
    }
    for n in names {
        let records = match n {
            "trotter-order" => trotter_order()?,
            "first-order-bound" => first_order_bound()?,
            "trotter-bias" => trotter_bias()?,
            "pec-exact" => pec_exact(opts)?,
            "pec-mismatch" => pec_mismatch()?,
            "rlcu-unbiased" => rlcu_unbiased(opts)?,
            "taylor-moments" => taylor_moments(opts)?,
            "optimizer" => optimizer(opts)?,
            "rlcu-rstar" => rlcu_rstar()?,
            "sni" => sni(opts)?,
            "table1" => table1()?,
            other => return Err(unknown(other)),
        };
        report.records.extend(records);
    }
    Ok(report)
}

fn zero_observable(n: usize) -> DenseOperator {
    DenseOperator::from_label(&format!("Z{}", "I".repeat(n - 1)), 1.0).expect("valid label")
}

fn scenarios() -> [(&'static str, Hamiltonian); 2] {
    [("pauli2", pauli2()), ("heis3", heis3())]
}

// ---------------------------------------------------------------------------
// Trotter
// ---------------------------------------------------------------------------

const ORDER_SLOPE_TOL: f64 = 0.15;

fn trotter_order() -> Result<Vec<Record>> {
    let deltas: Vec<f64> = (0..5).map(|j| 0.1 * 0.5f64.powi(j)).collect();
    let mut out = Vec::new();
    for (name, h) in scenarios() {
        for k in [1u32, 2, 4] {
            let f = trotter::build_formula(&h, k)?;
            let errs = deltas
                .iter()
                .map(|&d| trotter::microstep_error(&f, &h, d))
                .collect::<Result<Vec<f64>>>()?;
            let slope = loglog_slope(&deltas, &errs)?;
            let mut r = Record::new("trotter-order", format!("{name} k={k}"))
                .with("k", k as f64)
                .with("slope", slope)
                .with("delta_min", deltas[deltas.len() - 1])
                .with("error_min", errs[errs.len() - 1]);
            r.check(Check::le("slope deviation", (slope - (k + 1) as f64).abs(), ORDER_SLOPE_TOL));
            out.push(r);
        }
    }
    Ok(out)
}

fn first_order_bound() -> Result<Vec<Record>> {
    let mut out = Vec::new();
    for (name, h) in scenarios() {
        let c1 = c1_prefactor(&h, NormMode::Exact)?;
        let rho = DensityMatrix::zero_state(h.n_qubits());
        let o = zero_observable(h.n_qubits());
        for t in [0.5, 1.0, 2.0] {
            let rows: Vec<Record> = (1..=64usize)
                .into_par_iter()
                .map(|n| {
                    let dist = trotter::trotter_state_distance(&h, t, n, 1, &rho, None)?;
                    let bias = trotter::trotter_bias(&h, t, n, 1, &o, &rho, None)?;
                    let bound = c1 * t * t / n as f64;
                    let mut r = Record::new("first-order-bound", format!("{name} t={t} N={n}"))
                        .with("t", t)
                        .with("N", n as f64)
                        .with("trace_distance", dist)
                        .with("bias", bias)
                        .with("bound", bound);
                    r.check(Check::le("trace distance", dist, bound));
                    r.check(Check::le("observable bias", bias, 2.0 * bound).reported());
                    Ok(r)
                })
                .collect::<Result<_>>()?;
            out.extend(rows);
        }
    }
    Ok(out)
}

fn trotter_bias() -> Result<Vec<Record>> {
    let mut out = Vec::new();
    for (name, h) in scenarios() {
        let n_q = h.n_qubits();
        let rho = DensityMatrix::zero_state(n_q);
        let o = zero_observable(n_q);
        let l = h.num_terms() as f64;
        for k in [1u32, 2] {
            let alpha = trotter::alpha_k(&h, k, 1.0, 1.0)?;
            let ups = trotter::upsilon(k)? as f64;
            for gamma in [0.005, 0.01, 0.02] {
                let nm = NoiseModel::depolarizing(gamma)?;
                let rows: Vec<Record> = (1..=64usize)
                    .into_par_iter()
                    .map(|steps| {
                        let circuit = trotter::trotter_circuit(&h, 1.0, steps, k, Some(&nm))?;
                        let per_gate = circuit
                            .gates()
                            .iter()
                            .map(|g| pauli_channel_distance(&g.noise))
                            .fold(0.0, f64::max);
                        let d = ups * steps as f64;
                        let bias = trotter::trotter_bias(&h, 1.0, steps, k, &o, &rho, Some(&nm))?;
                        let bound_alg = alpha / d.powi(k as i32);
                        let bound = bound_alg + l * d * per_gate;
                        let mut r = Record::new("trotter-bias", format!("{name} k={k} gamma={gamma} N={steps}"))
                            .with("k", k as f64)
                            .with("N", steps as f64)
                            .with("d", d)
                            .with("gamma_nominal", gamma)
                            .with("gamma", per_gate)
                            .with("bias", bias)
                            .with("bound_alg", bound_alg)
                            .with("bound_total", bound);
                        r.check(Check::le("noisy bias", bias, bound));
                        Ok(r)
                    })
                    .collect::<Result<_>>()?;
                out.extend(rows);
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// PEC
// ---------------------------------------------------------------------------

const PEC_RUNS: u64 = 40;
const PEC_SHOTS: usize = 100_000;
const PEC_COVERAGE: f64 = 0.95;
const EXACT_TOL: f64 = 1e-10;

fn rot(label: &str, angle: f64) -> Gate {
    Gate::rotation(PauliString::parse(label).expect("valid label"), angle)
}

/// The four-gate reference circuits: one and two qubits, depolarizing
/// noise of rate `p` after every gate.
pub fn four_gate_circuit(two_qubit: bool, p: f64) -> Result<NoisyCircuit> {
    let nm = NoiseModel::depolarizing(p)?;
    if two_qubit {
        let gates = vec![rot("XI", 0.4), rot("ZZ", 0.7), rot("IY", -0.3), rot("XX", 0.5)];
        NoisyCircuit::from_gates(2, gates, Some(&nm))
    } else {
        let gates = vec![rot("X", 0.4), rot("Z", 0.7), rot("Y", -0.3), rot("X", 0.5)];
        NoisyCircuit::from_gates(1, gates, Some(&nm))
    }
}

fn pec_exact(opts: &SuiteOptions) -> Result<Vec<Record>> {
    let shots = opts.shots(PEC_SHOTS);
    let mut out = Vec::new();
    for two in [false, true] {
        let name = if two { "2q" } else { "1q" };
        let c = four_gate_circuit(two, 0.05)?;
        let n = c.n_qubits();
        let o = zero_observable(n);
        let rho = DensityMatrix::zero_state(n);
        let model = model_for_circuit(&c)?;
        let ideal = channels::real_trace_product(o.matrix(), &c.evolve_ideal(rho.matrix())?);
        let exhaustive = pec::pec_exhaustive(&c, &model, &o, &rho)?;
        let gamma = pec::pec_gamma(&model);
        let mut r = Record::new("pec-exact", format!("{name} exhaustive"))
            .with("ideal", ideal)
            .with("exhaustive", exhaustive)
            .with("gamma", gamma);
        r.check(Check::le("exhaustive deviation", (exhaustive - ideal).abs(), EXACT_TOL));
        out.push(r);

        let halfwidth = 4.0 * gamma / (shots as f64).sqrt();
        let var_cap = gamma * gamma * shots as f64 / (shots as f64 - 1.0).max(1.0);
        let mut covered = 0usize;
        for run in 0..PEC_RUNS {
            let est = pec::pec_estimate(&c, &model, &o, &rho, shots, opts.seed_for(name, run))?;
            let dev = (est.mean - ideal).abs();
            covered += usize::from(dev <= halfwidth);
            let mut r = Record::new("pec-exact", format!("{name} run={run}"))
                .with("mean", est.mean)
                .with("ideal", ideal)
                .with("deviation", dev)
                .with("halfwidth", halfwidth)
                .with("shot_variance", est.shot_variance)
                .with("gamma", gamma);
            r.check(Check::le("variance x M", est.variance * shots as f64, var_cap));
            out.push(r);
        }
        let fraction = covered as f64 / PEC_RUNS as f64;
        let mut r = Record::new("pec-exact", format!("{name} coverage"))
            .with("runs", PEC_RUNS as f64)
            .with("shots", shots as f64)
            .with("within", covered as f64);
        r.check(Check::ge("fraction within 4 Gamma/sqrt(M)", fraction, PEC_COVERAGE));
        out.push(r);
    }
    Ok(out)
}

const MISMATCH_DG: f64 = 1e-3;

fn pec_mismatch() -> Result<Vec<Record>> {
    let h = pauli2();
    let o = zero_observable(2);
    let mut out = Vec::new();
    for family in [ChannelFamily::Dephasing, ChannelFamily::Depolarizing, ChannelFamily::BitFlip] {
        let rate = 0.05;
        let actual = NoiseModel::new(family, rate, rate)?;
        let assumed = NoiseModel::new(family, rate + MISMATCH_DG, rate + MISMATCH_DG)?;
        let c = trotter::trotter_circuit(&h, 1.0, 5, 1, Some(&actual))?;
        let model = model_for_circuit(&trotter::trotter_circuit(&h, 1.0, 5, 1, Some(&assumed))?)?;
        let n_g = c.len();
        let dg = c
            .gates()
            .iter()
            .zip(&model)
            .map(|(g, m)| residual_distance(&g.noise, m))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let paths: f64 = model.iter().map(|m| m.len() as f64).product();
        for (state, rho) in [("zero", DensityMatrix::zero_state(2)), ("plus", DensityMatrix::plus_state(2))] {
            let ideal = channels::real_trace_product(o.matrix(), &c.evolve_ideal(rho.matrix())?);
            let contracted = pec::pec_expectation(&c, &model, &o, &rho)?;
            let mut r = Record::new("pec-mismatch", format!("{family:?} {state}").to_lowercase())
                .with("N_G", n_g as f64)
                .with("paths", paths)
                .with("delta_gamma", dg)
                .with("ideal", ideal)
                .with("contracted", contracted);
            let value = if paths <= pec::MAX_PEC_PATHS {
                let exhaustive = pec::pec_exhaustive(&c, &model, &o, &rho)?;
                r.push("exhaustive", exhaustive);
                r.check(Check::le("exhaustive vs contracted", (exhaustive - contracted).abs(), EXACT_TOL));
                exhaustive
            } else {
                contracted
            };
            let bias = (value - ideal).abs();
            r.push("bias", bias);
            r.push("bound_nominal", mismatch_bias_bound(MISMATCH_DG, n_g));
            r.push("bound_measured", mismatch_bias_bound(dg, n_g));
            r.check(Check::le("bias vs nominal bound", bias, mismatch_bias_bound(MISMATCH_DG, n_g)));
            r.check(Check::le("bias vs measured bound", bias, mismatch_bias_bound(dg, n_g)));
            out.push(r);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// RLCU
// ---------------------------------------------------------------------------

const RLCU_SHOTS: usize = 1_000_000;
const ONE_NORM_TOL: f64 = 1e-10;

/// `sum_mu |alpha_mu|` by explicit enumeration of multi-indices up to
/// Taylor order `k_max`.
fn enumerated_one_norm(h: &Hamiltonian, lambda: f64, k_max: u32) -> Result<f64> {
    let (_, probs) = crate::hamiltonian::normalize(h)?;
    let mut total = 0.0;
    let mut k = k_max - k_max % 2;
    loop {
        let base = lambda.powi(k as i32) / (1..=k).map(f64::from).product::<f64>() * rlcu::taylor_weight(k, lambda);
        // each level multiplies in one more term index; partial sums keep memory flat
        let mut level = vec![1.0f64];
        for _ in 0..=k {
            level = level.iter().flat_map(|w| probs.iter().map(move |p| w * p)).collect();
            if level.len() > 1 << 18 {
                let s: f64 = level.iter().sum();
                level = vec![s];
            }
        }
        total += base * level.iter().sum::<f64>();
        if k == 0 {
            break;
        }
        k -= 2;
    }
    Ok(total)
}

fn rlcu_unbiased(opts: &SuiteOptions) -> Result<Vec<Record>> {
    let h = pauli2();
    let o = zero_observable(2);
    let rho = DensityMatrix::zero_state(2);
    let shots = opts.shots(RLCU_SHOTS);
    let cases = [(1.0, 1usize), (1.0, 2), (2.0, 4)];
    let mut out = Vec::new();
    for (i, (tt, r)) in cases.into_iter().enumerate() {
        let t = tt / h.beta();
        let lambda = tt / r as f64;
        let exact = channels::expectation(&o, &trotter::exact_state(&h, t, &rho)?)?;
        let est = rlcu::run_rlcu_estimate(&h, t, &RlcuConfig::new(r, shots, opts.seed_for("rlcu", i as u64)), &o, &rho, None)?;
        let halfwidth = 4.0 * est.gamma_rlcu / (shots as f64).sqrt();
        let series = rlcu::lcu_one_norm(lambda, 1e-17);
        let measured = enumerated_one_norm(&h, lambda, 24)?;
        let gamma_s = series * series;
        let nm = NoiseModel::depolarizing(0.01)?;
        let noisy = rlcu::rlcu_expectation_exact(&h, t, r, &o, &rho, Some(&nm))?;
        let bias_bound = rlcu::rlcu_bias_bound(&h, t, r, &nm);
        let mut rec = Record::new("rlcu-unbiased", format!("t~={tt} r={r}"))
            .with("t_tilde", tt)
            .with("r", r as f64)
            .with("lambda", lambda)
            .with("mean", est.mean)
            .with("exact", exact)
            .with("stderr", est.stderr)
            .with("gamma_rlcu", est.gamma_rlcu)
            .with("one_norm_series", series)
            .with("one_norm_enumerated", measured)
            .with("gamma_s", gamma_s)
            .with("noisy_bias", (noisy - exact).abs())
            .with("noisy_bias_bound", bias_bound);
        rec.check(Check::le("deviation", (est.mean - exact).abs(), halfwidth));
        rec.check(Check::le("one-norm mismatch", (measured - series).abs(), ONE_NORM_TOL));
        rec.check(Check::le("Gamma_S vs exp(2 lambda^2)", gamma_s, (2.0 * lambda * lambda).exp()));
        rec.check(Check::le("Gamma_S vs exp(lambda^2)", gamma_s, (lambda * lambda).exp()).reported());
        rec.check(Check::le("noisy bias", (noisy - exact).abs(), bias_bound));
        out.push(rec);
    }
    // the exp(lambda^2) segment bound at lambda = 1, where it fails
    let g1 = rlcu::lcu_one_norm(1.0, 1e-17).powi(2);
    let mut rec = Record::new("rlcu-unbiased", "lambda=1 segment bound").with("lambda", 1.0).with("gamma_s", g1);
    rec.check(Check::le("Gamma_S vs exp(2 lambda^2)", g1, 2f64.exp()));
    rec.check(Check::le("Gamma_S vs exp(lambda^2)", g1, 1f64.exp()).reported());
    out.push(rec);
    Ok(out)
}

const TAYLOR_DRAWS: usize = 1_000_000;

fn taylor_moments(opts: &SuiteOptions) -> Result<Vec<Record>> {
    let draws = opts.shots(TAYLOR_DRAWS);
    let mut out = Vec::new();
    for (i, lambda) in [0.25, 0.5, 1.0].into_iter().enumerate() {
        let seed = opts.seed_for("taylor", i as u64);
        let stats = run_shots(draws, seed, |rng, _| Ok(rlcu::sample_taylor_order(lambda, rng) as f64))?;
        let (mean_bound, var_bound) = rlcu::k_moment_bounds(lambda);
        let (exact_mean, exact_var) = rlcu::taylor_order_moments(lambda);
        let pmf = rlcu::taylor_order_pmf(lambda);
        let mu4: f64 = pmf.iter().map(|(k, p)| (*k as f64 - exact_mean).powi(4) * p).sum();
        let m = draws as f64;
        let se_mean = (exact_var / m).sqrt();
        let se_var = ((mu4 - exact_var * exact_var) / m).sqrt();
        let var = stats.variance();
        let mut r = Record::new("taylor-moments", format!("lambda={lambda}"))
            .with("lambda", lambda)
            .with("mean", stats.mean)
            .with("variance", var)
            .with("exact_mean", exact_mean)
            .with("exact_variance", exact_var)
            .with("mean_bound", mean_bound)
            .with("variance_bound", var_bound);
        r.check(Check::le("mean vs lambda tanh lambda", stats.mean, mean_bound + 4.0 * se_mean));
        r.check(Check::le("variance vs lambda^2 + lambda tanh lambda", var, var_bound + 4.0 * se_var));
        r.check(Check::le("mean vs exact", (stats.mean - exact_mean).abs(), 4.0 * se_mean));
        r.check(Check::le("variance vs exact", (var - exact_var).abs(), 4.0 * se_var));
        r.check(Check::le("exact mean vs bound", exact_mean, mean_bound));
        r.check(Check::le("exact variance vs bound", exact_var, var_bound));
        out.push(r);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Cost model
// ---------------------------------------------------------------------------

const OPTIMIZER_TUPLES: u64 = 100;
const OPTIMIZER_TOL: f64 = 1e-6;

fn random_inputs(rng: &mut ChaCha8Rng) -> Result<TrotterCostInputs> {
    let k = if rng.random::<bool>() { 1 } else { 2 };
    let alpha = 10f64.powf(rng.random_range(-1.0..1.0));
    let l = rng.random_range(1..=10) as f64;
    let gamma = 10f64.powf(rng.random_range(-4.0..-2.0));
    let c_pec = rng.random_range(1.0..3.0);
    TrotterCostInputs::with_c_pec(alpha, k, l, gamma, c_pec)
}

/// Numeric argmin of `f(ln d)` over a bracket wide enough for any input.
fn argmin_log(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    golden_section_min(f, lo, hi, 1e-13).exp()
}

fn optimizer(opts: &SuiteOptions) -> Result<Vec<Record>> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed_for("optimizer", 0));
    for i in 0..OPTIMIZER_TUPLES {
        let p = random_inputs(&mut rng)?;
        let kf = p.k as f64;
        let closed = cost::trotter_optimal_depth_noqem(&p)?;
        let numeric = argmin_log(|x| cost::trotter_noqem_error(&p, x.exp()), -10.0, 20.0);
        // accuracy targets around the critical error
        let eps = cost::critical_error(&p) * 10f64.powf(rng.random_range(-1.0..1.0));
        let bisected = cost::trotter_optimal_depth_pec(&p, eps)?;
        let d_min = (p.alpha_k / eps).powf(1.0 / kf);
        // minimize ln M(d) = 2 L gamma' d - ln(eps^2 - alpha^2 / d^{2k}) over d > d_min
        let ln_m = |u: f64| {
            let d = d_min + u.exp();
            2.0 * p.l * p.gamma_prime * d - (eps * eps - (p.alpha_k / d.powi(p.k as i32)).powi(2)).ln()
        };
        let u = golden_section_min(ln_m, (d_min * 1e-12).ln(), (d_min * 1e6 + 1e6).ln(), 1e-14);
        let numeric_pec = d_min + u.exp();
        let mut r = Record::new("optimizer", format!("tuple={i}"))
            .with("k", kf)
            .with("alpha_k", p.alpha_k)
            .with("L", p.l)
            .with("gamma", p.gamma)
            .with("gamma_prime", p.gamma_prime)
            .with("epsilon", eps)
            .with("d_noqem", closed)
            .with("d_noqem_numeric", numeric)
            .with("d_pec", bisected)
            .with("d_pec_numeric", numeric_pec);
        r.check(Check::le("no-QEM depth rel. error", (closed - numeric).abs() / numeric, OPTIMIZER_TOL));
        r.check(Check::le("PEC depth rel. error", (bisected - numeric_pec).abs() / numeric_pec, OPTIMIZER_TOL));
        out.push(r);
    }
    // asymptotic branches of M(eps) far from the critical error
    for k in [1u32, 2] {
        let p = TrotterCostInputs::new(1.0, k, 2.0, 0.01, 0.02)?;
        let ec = cost::critical_error(&p);
        for (tag, factor) in [("below", 1e-2), ("above", 1e2)] {
            let s = cost::trotter_samples(&p, ec * factor)?;
            let branch = if factor < 1.0 { s.branches.below } else { s.branches.above };
            let ratio = branch / s.samples;
            let mut r = Record::new("optimizer", format!("k={k} branch={tag}"))
                .with("k", k as f64)
                .with("epsilon", s.epsilon)
                .with("epsilon_c", ec)
                .with("depth", s.depth)
                .with("samples", s.samples)
                .with("branch", branch)
                .with("ratio", ratio);
            r.check(Check::le("branch / exact", ratio, 2.0));
            r.check(Check::ge("branch / exact", ratio, 0.5));
            out.push(r);
        }
        let dc = k as f64 / (p.gamma_prime * p.l);
        let second = k as f64 / (p.gamma_prime * p.l * dc);
        let mut r = Record::new("optimizer", format!("k={k} crossover"))
            .with("d_cross", dc)
            .with("algorithmic_term", 1.0)
            .with("sampling_term", second);
        r.check(Check::le("term mismatch", (second - 1.0).abs(), 4.0 * f64::EPSILON));
        out.push(r);
    }
    Ok(out)
}

const EXPONENT_TOL: f64 = 1e-12;

fn rlcu_rstar() -> Result<Vec<Record>> {
    let mut out = Vec::new();
    for tt in [1.0, 2.0, 5.0, 10.0, 20.0, 50.0] {
        for gp in [1e-4, 1e-3, 5e-3, 1e-2, 5e-2, 0.1] {
            if (2.0 * gp as f64).sqrt() * tt < 1.0 {
                continue;
            }
            let p = RlcuCostInputs::new(1.0, tt, gp, 0.0)?;
            let (r_star, regime) = cost::rlcu_optimal_r(&p);
            let opt = cost::rlcu_exponent(&p, r_star);
            let plain = cost::rlcu_exponent(&p, tt * tt);
            let mut r = Record::new("rlcu-rstar", format!("t~={tt} gamma'={gp}"))
                .with("t_tilde", tt)
                .with("gamma_prime", gp)
                .with("r_star", r_star)
                .with("exponent_opt", opt)
                .with("exponent_plain", plain);
            r.push("optimized", f64::from(u8::from(regime == cost::Regime::Optimized)));
            r.check(Check::le("exponent at r*", opt, plain + EXPONENT_TOL));
            out.push(r);
        }
    }
    let p = RlcuCostInputs::new(1.0, 20.0, 0.005, 0.0)?;
    let (r_star, _) = cost::rlcu_optimal_r(&p);
    let opt = cost::rlcu_exponent(&p, r_star);
    let plain = cost::rlcu_exponent(&p, 400.0);
    let mut r = Record::new("rlcu-rstar", "t~=20 gamma'=0.005 reference")
        .with("r_star", r_star)
        .with("exponent_opt", opt)
        .with("exponent_plain", plain);
    r.check(Check::le("optimized exponent - 4", (opt - 4.0).abs(), EXPONENT_TOL));
    r.check(Check::le("plain exponent - 5", (plain - 5.0).abs(), EXPONENT_TOL));
    out.push(r);
    Ok(out)
}

const SNI_SHOTS: usize = 200_000;

fn sni(opts: &SuiteOptions) -> Result<Vec<Record>> {
    let shots = opts.shots(SNI_SHOTS);
    let c = four_gate_circuit(false, 0.05)?;
    let o = zero_observable(1);
    let rho = DensityMatrix::zero_state(1);
    let ideal = channels::real_trace_product(o.matrix(), &c.evolve_ideal(rho.matrix())?);
    let mut out = Vec::new();
    let mut estimates = Vec::new();
    for s in [1usize, 2] {
        let plan = sni_plan(&c, s)?;
        let est = sni_estimate(&plan, &c, &o, &rho, shots, opts.seed_for("sni", s as u64))?;
        let halfwidth = 4.0 * est.gamma / (shots as f64).sqrt();
        let mut r = Record::new("sni", format!("4-gate s={s}"))
            .with("s", s as f64)
            .with("q_st", plan.q_st())
            .with("gamma", est.gamma)
            .with("mean", est.mean)
            .with("stderr", est.stderr)
            .with("ideal", ideal);
        r.check(Check::le("deviation", (est.mean - ideal).abs(), halfwidth));
        out.push(r);
        estimates.push(est);
    }
    let (a, b) = (&estimates[0], &estimates[1]);
    let mut r = Record::new("sni", "s=1 vs s=2")
        .with("difference", a.mean - b.mean)
        .with("combined_stderr", (a.variance + b.variance).sqrt());
    r.check(Check::le("difference", (a.mean - b.mean).abs(), 4.0 * (a.variance + b.variance).sqrt()));
    out.push(r);

    for q in [0.001, 0.005, 0.01] {
        for d in [20.0, 100.0, 400.0] {
            let x: f64 = q * d;
            let first = (2.0 * x).ceil() as usize + 1;
            let last = (4.0 * x + 8.0).floor() as usize;
            for s in first..=last {
                let ov = sni_overhead(q, d, s as f64)?;
                let mut r = Record::new("sni", format!("q={q} d={d} s={s}"))
                    .with("q", q)
                    .with("d", d)
                    .with("s", s as f64)
                    .with("exact", ov.exact)
                    .with("lower", ov.lower)
                    .with("upper", ov.upper);
                r.check(Check::lt("lower < exact", ov.lower, ov.exact));
                r.check(Check::lt("exact < upper", ov.exact, ov.upper));
                out.push(r);
            }
        }
    }
    let ov = sni_overhead(0.01, 100.0, 8.0)?;
    let mut r = Record::new("sni", "reference q=0.01 d=100 s=8")
        .with("exact", ov.exact)
        .with("lower", ov.lower)
        .with("upper", ov.upper);
    r.check(Check::le("lower - e^4", (ov.lower - 4f64.exp()).abs(), 1e-9));
    r.check(Check::le("upper - e^(16/3)", (ov.upper - (16.0f64 / 3.0).exp()).abs(), 1e-9));
    r.check(Check::lt("lower < exact", ov.lower, ov.exact));
    r.check(Check::lt("exact < upper", ov.exact, ov.upper));
    out.push(r);
    Ok(out)
}

const SLOPE_TOL: f64 = 0.05;

fn table1() -> Result<Vec<Record>> {
    let gammas: Vec<f64> = (0..=20).map(|i| 10f64.powf(-4.0 + 0.1 * i as f64)).collect();
    let h = pauli2();
    let mut out = Vec::new();
    for k in [1u32, 2] {
        let alpha = trotter::alpha_k(&h, k, 1.0, 1.0)?;
        let mut eb = Vec::new();
        let mut ec = Vec::new();
        for &g in &gammas {
            let nm = NoiseModel::depolarizing(g)?;
            let p = TrotterCostInputs::new(alpha, k, h.num_terms() as f64, g, nm.gamma_prime()?)?;
            eb.push(cost::trotter_error_bound(&p));
            ec.push(cost::critical_error(&p));
        }
        let sb = loglog_slope(&gammas, &eb)?;
        let sc = loglog_slope(&gammas, &ec)?;
        let kf = k as f64;
        let mut r = Record::new("table1", format!("k={k}"))
            .with("k", kf)
            .with("slope_eps_b", sb)
            .with("expected_eps_b", kf / (kf + 1.0))
            .with("slope_eps_c", sc)
            .with("expected_eps_c", kf);
        r.check(Check::le("eps_b slope error", (sb - kf / (kf + 1.0)).abs(), SLOPE_TOL));
        r.check(Check::le("eps_c slope error", (sc - kf).abs(), SLOPE_TOL));
        out.push(r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_and_unknown_ids_list_suites() {
        for bad in ["", "nope"] {
            match run_suite(bad, &SuiteOptions::default()) {
                Err(Error::UnknownSuite { available, .. }) => assert!(available.contains("pec-exact")),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn seeds_differ_by_tag_and_index() {
        let o = SuiteOptions { seed: 3, shots: None };
        assert_ne!(o.seed_for("a", 0), o.seed_for("a", 1));
        assert_ne!(o.seed_for("a", 0), o.seed_for("b", 0));
    }
}
