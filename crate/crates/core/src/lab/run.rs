//! Spec-driven runs: one simulation, a cost evaluation, or a sweep.

use rand::Rng;
use rayon::prelude::*;

use crate::channels::{self, pauli_channel_distance, real_trace_product, NoiseModel};
use crate::circuit::NoisyCircuit;
use crate::cost::{self, CostReport, RlcuCostInputs, TrotterCostInputs};
use crate::error::{Error, Result};
use crate::lab::report::{Check, Provenance, Record, Report};
use crate::lab::spec::{AlgorithmKind, Experiment, SweepAxis};
use crate::mitigation::pec::{self, mismatch_bias_bound, model_for_circuit, residual_distance};
use crate::mitigation::sni::{sni_estimate, sni_overhead, sni_plan};
use crate::mitigation::MitigationMode;
use crate::rlcu::{self, RlcuConfig};
use crate::stats::run_shots;
use crate::trotter;

/// Command-line overrides of the spec's seed and shot count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub shots: Option<usize>,
}

impl RunOptions {
    fn seed(&self, e: &Experiment) -> u64 {
        self.seed.unwrap_or(e.spec.seed)
    }

    fn shots(&self, e: &Experiment) -> usize {
        self.shots.unwrap_or(e.spec.shots)
    }
}

fn provenance(command: &str, e: &Experiment, opts: &RunOptions) -> Provenance {
    Provenance::new(&format!("{command} {}", e.spec.name), opts.seed(e), Some(e.spec_sha256.clone()))
}

fn max_gate_error(c: &NoisyCircuit) -> f64 {
    c.gates().iter().map(|g| pauli_channel_distance(&g.noise)).fold(0.0, f64::max)
}

fn ideal_value(e: &Experiment, t: f64) -> Result<f64> {
    channels::expectation(&e.observable, &trotter::exact_state(&e.hamiltonian, t, &e.initial_state)?)
}

/// Product-formula prefactor for the experiment at time `t`.
fn alpha_for(e: &Experiment, t: f64) -> Result<f64> {
    let c_cal = e.spec.cost.as_ref().and_then(|c| c.c_cal).unwrap_or(1.0);
    match e.spec.cost.as_ref().and_then(|c| c.alpha_k) {
        Some(a) => Ok(a),
        None => trotter::alpha_k(&e.hamiltonian, e.order(), t, c_cal),
    }
}

/// Runs the experiment once and records the estimate against the exact
/// ideal value.
pub fn simulate(e: &Experiment, opts: &RunOptions) -> Result<Report> {
    let mut report = Report::new(format!("simulate {}", e.spec.name), provenance("simulate", e, opts));
    let record = match e.kind() {
        AlgorithmKind::Trotter => simulate_trotter(e, e.spec.t, e.steps(), e.noise.as_ref(), opts)?,
        AlgorithmKind::Rlcu => simulate_rlcu(e, e.spec.t, e.repetitions(), e.noise.as_ref(), opts)?,
    };
    report.records.push(record);
    Ok(report)
}

fn simulate_trotter(e: &Experiment, t: f64, steps: usize, noise: Option<&NoiseModel>, opts: &RunOptions) -> Result<Record> {
    let (h, k, o, rho) = (&e.hamiltonian, e.order(), &e.observable, &e.initial_state);
    let shots = opts.shots(e);
    let seed = opts.seed(e);
    let c = trotter::trotter_circuit(h, t, steps, k, noise)?;
    let run = trotter::TrotterRun::new(h, t, steps, k)?;
    let d = run.depth as f64;
    let ideal = ideal_value(e, t)?;
    let noisy = real_trace_product(o.matrix(), &c.evolve_noisy(rho.matrix(), None)?);
    let scale = o.operator_norm();
    let bound_alg = alpha_for(e, t)? / d.powi(k as i32);
    let mut r = Record::new("simulate", format!("trotter k={k} N={steps} {:?}", e.spec.mitigation.mode).to_lowercase())
        .with("t", t)
        .with("k", k as f64)
        .with("N", steps as f64)
        .with("d", d)
        .with("gates", c.len() as f64)
        .with("gamma", max_gate_error(&c))
        .with("ideal", ideal)
        .with("noisy_exact", noisy);
    let (mean, stderr, gamma, bias_bound) = match e.spec.mitigation.mode {
        MitigationMode::None => {
            let p_plus = if scale > 0.0 { (0.5 * (1.0 + noisy / scale)).clamp(0.0, 1.0) } else { 0.5 };
            let stats = run_shots(shots, seed, |rng, _| Ok(if rng.random::<f64>() < p_plus { scale } else { -scale }))?;
            let bound = (bound_alg + h.num_terms() as f64 * d * max_gate_error(&c)) * scale;
            (stats.mean, stats.stderr(), 1.0, bound)
        }
        MitigationMode::Pec => {
            let model_noise = e.model_noise()?;
            let model = model_for_circuit(&trotter::trotter_circuit(h, t, steps, k, model_noise.as_ref())?)?;
            let dg = c
                .gates()
                .iter()
                .zip(&model)
                .map(|(g, m)| residual_distance(&g.noise, m))
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            let est = pec::pec_estimate(&c, &model, o, rho, shots, seed)?;
            r.push("pec_contracted", pec::pec_expectation(&c, &model, o, rho)?);
            r.push("delta_gamma", dg);
            (est.mean, est.stderr, est.gamma, (bound_alg + mismatch_bias_bound(dg, c.len())) * scale)
        }
        MitigationMode::Sni => {
            let plan = sni_plan(&c, e.spec.mitigation.segments.unwrap_or(1))?;
            r.push("segments", plan.segments() as f64);
            r.push("q_st", plan.q_st());
            let est = sni_estimate(&plan, &c, o, rho, shots, seed)?;
            (est.mean, est.stderr, est.gamma, bound_alg * scale)
        }
    };
    finish(r, ideal, mean, stderr, gamma, shots, bias_bound)
}

fn finish(mut r: Record, ideal: f64, mean: f64, stderr: f64, gamma: f64, shots: usize, bias_bound: f64) -> Result<Record> {
    let deviation = (mean - ideal).abs();
    r.push("shots", shots as f64);
    r.push("mean", mean);
    r.push("stderr", stderr);
    r.push("gamma_total", gamma);
    r.push("deviation", deviation);
    r.push("bias_bound", bias_bound);
    r.check(Check::le("deviation vs bias bound + 4 stderr", deviation, bias_bound + 4.0 * stderr));
    Ok(r)
}

fn simulate_rlcu(e: &Experiment, t: f64, reps: usize, noise: Option<&NoiseModel>, opts: &RunOptions) -> Result<Record> {
    let (h, o, rho) = (&e.hamiltonian, &e.observable, &e.initial_state);
    let shots = opts.shots(e);
    let mut cfg = RlcuConfig::new(reps, shots, opts.seed(e));
    cfg.pec = e.spec.mitigation.mode == MitigationMode::Pec;
    let ideal = ideal_value(e, t)?;
    let est = rlcu::run_rlcu_estimate(h, t, &cfg, o, rho, noise)?;
    let bias_bound = match noise {
        Some(nm) if !cfg.pec => rlcu::rlcu_bias_bound(h, t, reps, nm) * o.operator_norm(),
        _ => 0.0,
    };
    let lambda = cfg.lambda(h, t);
    let r = Record::new("simulate", format!("rlcu r={reps} {:?}", e.spec.mitigation.mode).to_lowercase())
        .with("t", t)
        .with("r", reps as f64)
        .with("lambda", lambda)
        .with("gamma", noise.map_or(0.0, |n| n.gamma))
        .with("ideal", ideal)
        .with("gamma_rlcu", est.gamma_rlcu);
    finish(r, ideal, est.mean, est.stderr, est.gamma_rlcu, shots, bias_bound)
}

// ---------------------------------------------------------------------------
// Cost
// ---------------------------------------------------------------------------

fn cost_noise(e: &Experiment) -> Result<&NoiseModel> {
    e.noise
        .as_ref()
        .ok_or_else(|| Error::Config("cost evaluation needs a [noise] section".into()))
}

fn cost_epsilon(e: &Experiment) -> Result<f64> {
    e.spec
        .cost
        .as_ref()
        .map(|c| c.epsilon)
        .ok_or_else(|| Error::Config("cost evaluation needs a [cost] section with `epsilon`".into()))
}

fn evaluate_cost(e: &Experiment, t: f64, epsilon: f64) -> Result<CostReport> {
    let nm = cost_noise(e)?;
    match e.kind() {
        AlgorithmKind::Trotter => {
            let p = TrotterCostInputs::new(
                alpha_for(e, t)?,
                e.order(),
                e.hamiltonian.num_terms() as f64,
                nm.gamma,
                nm.gamma_prime()?,
            )?;
            let sni = match e.spec.mitigation.mode {
                MitigationMode::Sni => Some(e.spec.mitigation.segments.unwrap_or(1) as f64),
                _ => None,
            };
            cost::trotter_report(&p, epsilon, sni)
        }
        AlgorithmKind::Rlcu => {
            let p = RlcuCostInputs::new(e.hamiltonian.beta(), t, nm.gamma_prime()?, nm.gamma_c)?;
            cost::rlcu_report(&p, nm.gamma, epsilon)
        }
    }
}

fn cost_record(suite: &str, c: &CostReport) -> Result<Record> {
    let regime = serde_json::to_value(c.regime).map_err(|e| Error::Config(e.to_string()))?;
    let mut r = Record::new(suite, format!("{} {}", c.algorithm, regime.as_str().unwrap_or("")));
    r.push("epsilon", c.epsilon);
    r.push("epsilon_b", c.epsilon_b);
    let optional = [
        ("epsilon_c", c.epsilon_c),
        ("d_star", c.d_star),
        ("d_star_noqem", c.d_star_noqem),
        ("r_star", c.r_star),
    ];
    for (k, v) in optional {
        if let Some(v) = v {
            r.push(k, v);
        }
    }
    r.push("M", c.m);
    r.push("M_g", c.m_g);
    for (k, v) in [("M_g_alt", c.m_g_alt), ("M_qst", c.m_qst)] {
        if let Some(v) = v {
            r.push(k, v);
        }
    }
    r.push("ratio_Mg_R", c.ratio_mg_r);
    r.push("ratio_asymptotic", c.ratio_asymptotic);
    Ok(r)
}

/// Cost-model evaluation at the spec's target accuracy.
pub fn cost_report(e: &Experiment, opts: &RunOptions) -> Result<Report> {
    let c = evaluate_cost(e, e.spec.t, cost_epsilon(e)?)?;
    let mut report = Report::new(format!("cost {}", e.spec.name), provenance("cost", e, opts));
    report.notes.push(c.units.to_string());
    report.records.push(cost_record("cost", &c)?);
    Ok(report)
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

fn as_count(axis: SweepAxis, v: f64) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
        Ok(v as usize)
    } else {
        Err(Error::Config(format!("sweep axis `{}` needs positive integers, got {v}", axis.name())))
    }
}

/// Exact (unsampled) Trotter bias row: `k, N, d, gamma, bias, bound_alg,
/// bound_total`.
fn trotter_row(e: &Experiment, t: f64, steps: usize, noise: Option<&NoiseModel>) -> Result<Record> {
    let (h, k) = (&e.hamiltonian, e.order());
    let c = trotter::trotter_circuit(h, t, steps, k, noise)?;
    let d = trotter::TrotterRun::new(h, t, steps, k)?.depth as f64;
    let gamma = max_gate_error(&c);
    let bias = trotter::trotter_bias(h, t, steps, k, &e.observable, &e.initial_state, noise)?;
    let scale = e.observable.operator_norm();
    let bound_alg = alpha_for(e, t)? / d.powi(k as i32) * scale;
    let bound = bound_alg + h.num_terms() as f64 * d * gamma * scale;
    let mut r = Record::new("sweep", format!("t={t} N={steps}"))
        .with("k", k as f64)
        .with("N", steps as f64)
        .with("d", d)
        .with("gamma", gamma)
        .with("bias", bias)
        .with("bound_alg", bound_alg)
        .with("bound_total", bound);
    r.check(Check::le("bias", bias, bound));
    Ok(r)
}

/// Sampled RLCU row: `r, lambda, gamma, mean, stderr, gamma_rlcu,
/// bias_bound`.
fn rlcu_row(e: &Experiment, t: f64, reps: usize, noise: Option<&NoiseModel>, opts: &RunOptions) -> Result<Record> {
    let rec = simulate_rlcu(e, t, reps, noise, opts)?;
    let get = |k: &str| rec.get(k).unwrap_or(f64::NAN);
    let mut r = Record::new("sweep", format!("t={t} r={reps}"))
        .with("r", reps as f64)
        .with("lambda", get("lambda"))
        .with("gamma", get("gamma"))
        .with("mean", get("mean"))
        .with("stderr", get("stderr"))
        .with("gamma_rlcu", get("gamma_rlcu"))
        .with("bias_bound", get("bias_bound"))
        .with("ideal", get("ideal"));
    r.checks = rec.checks;
    Ok(r)
}

fn noise_at(e: &Experiment, gamma: f64) -> Result<NoiseModel> {
    let base = e.noise.as_ref().ok_or_else(|| Error::Config("gamma sweep needs a [noise] section".into()))?;
    let mut m = NoiseModel::new(base.family, gamma, gamma)?;
    m.c_pec = base.c_pec;
    m.noisy_ancilla = base.noisy_ancilla;
    Ok(m)
}

fn sweep_point(e: &Experiment, axis: SweepAxis, v: f64, opts: &RunOptions) -> Result<Record> {
    let t = e.spec.t;
    let noise = e.noise.as_ref();
    let trotter = e.kind() == AlgorithmKind::Trotter;
    match axis {
        SweepAxis::Steps => trotter_row(e, t, as_count(axis, v)?, noise),
        SweepAxis::Depth => {
            let ups = trotter::upsilon(e.order())? as usize;
            let d = as_count(axis, v)?;
            if d % ups != 0 {
                return Err(Error::Config(format!("depth {d} is not a multiple of {ups} stages at order {}", e.order())));
            }
            trotter_row(e, t, d / ups, noise)
        }
        SweepAxis::Repetitions => rlcu_row(e, t, as_count(axis, v)?, noise, opts),
        SweepAxis::Time if trotter => trotter_row(e, v, e.steps(), noise),
        SweepAxis::Time => rlcu_row(e, v, e.repetitions(), noise, opts),
        SweepAxis::Gamma if trotter => trotter_row(e, t, e.steps(), Some(&noise_at(e, v)?)),
        SweepAxis::Gamma => rlcu_row(e, t, e.repetitions(), Some(&noise_at(e, v)?), opts),
        SweepAxis::Epsilon => epsilon_row(e, v),
        SweepAxis::Segments => segments_row(e, as_count(axis, v)?),
    }
}

fn epsilon_row(e: &Experiment, eps: f64) -> Result<Record> {
    let c = evaluate_cost(e, e.spec.t, eps)?;
    let mut r = cost_record("sweep", &c)?;
    if e.kind() == AlgorithmKind::Trotter {
        let nm = cost_noise(e)?;
        let p = TrotterCostInputs::new(alpha_for(e, e.spec.t)?, e.order(), e.hamiltonian.num_terms() as f64, nm.gamma, nm.gamma_prime()?)?;
        let b = cost::trotter_sample_branches(&p, eps);
        r.push("M_below", b.below);
        r.push("M_critical", b.critical);
        r.push("M_above", b.above);
    }
    Ok(r)
}

/// SNI overhead against its analytic sandwich for `s` segments of the
/// experiment's circuit.
fn segments_row(e: &Experiment, s: usize) -> Result<Record> {
    let (h, k) = (&e.hamiltonian, e.order());
    let c = trotter::trotter_circuit(h, e.spec.t, e.steps(), k, e.noise.as_ref())?;
    let d = trotter::TrotterRun::new(h, e.spec.t, e.steps(), k)?.depth as f64;
    // per-layer error probability: one layer holds L gates
    let no_error: f64 = c.gates().iter().map(|g| 1.0 - pauli_channel_distance(&g.noise)).product();
    let q = 1.0 - no_error.powf(1.0 / d);
    let mut r = Record::new("sweep", format!("s={s}")).with("s", s as f64).with("q", q).with("d", d);
    match sni_overhead(q, d, s as f64) {
        Ok(ov) => {
            r.push("q_st", 1.0 - (1.0 - q).powf(d / s as f64));
            r.push("exact", ov.exact);
            r.push("lower", ov.lower);
            r.push("upper", ov.upper);
            r.check(Check::lt("lower < exact", ov.lower, ov.exact));
            r.check(Check::lt("exact < upper", ov.exact, ov.upper));
        }
        Err(Error::InfeasibleSegmentation { q_st, .. }) => {
            r.push("q_st", q_st);
            r.label = format!("s={s} infeasible");
        }
        Err(other) => return Err(other),
    }
    Ok(r)
}

/// One record per value along `axis`; the spec's own `[sweep]` section is
/// used when `axis` is `None`.
pub fn sweep(e: &Experiment, axis: Option<(SweepAxis, Vec<f64>)>, opts: &RunOptions) -> Result<Report> {
    let (axis, values) = match axis {
        Some(a) => a,
        None => {
            let s = e.spec.sweep.as_ref().ok_or_else(|| Error::Config("no [sweep] section and no axis given".into()))?;
            (s.axis, s.values.clone())
        }
    };
    if values.is_empty() {
        return Err(Error::Config("sweep values must not be empty".into()));
    }
    let mut spec = e.spec.clone();
    spec.sweep = Some(crate::lab::spec::SweepSpec { axis, values: values.clone() });
    crate::lab::spec::check_axis(axis, &spec)?;
    let records: Vec<Record> = values
        .par_iter()
        .map(|&v| sweep_point(e, axis, v, opts))
        .collect::<Result<_>>()?;
    let mut report = Report::new(format!("sweep {} over {}", e.spec.name, axis.name()), provenance("sweep", e, opts));
    report.records = records;
    Ok(report)
}
