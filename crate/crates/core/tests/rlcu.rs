mod common;

use common::*;
use hamsim_core::channels::{DensityMatrix, NoiseModel};
use hamsim_core::hamiltonian::Hamiltonian;
use hamsim_core::linalg::DenseOperator;
use hamsim_core::rlcu::{
    ancilla_populations, averaged_segment_operator, even_poisson_mgf, even_poisson_moments, gamma_rlcu, k_moment_bounds,
    lcu_one_norm, rlcu_bias_bound, rlcu_expectation_exact, run_rlcu_estimate, sample_taylor_order, taylor_order_moments,
    taylor_order_pmf, RlcuConfig, ShotMode,
};
use hamsim_core::Error;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// `sum_{k even} lambda^k / k! sqrt(1 + (lambda/(k+1))^2)`, summed to 60 terms.
fn one_norm_oracle(lambda: f64) -> f64 {
    let mut fact = 1.0;
    let mut sum = 0.0;
    for k in 0..120u32 {
        if k > 0 {
            fact *= k as f64;
        }
        if k % 2 == 0 {
            let a = (1.0 + (lambda / (k as f64 + 1.0)).powi(2)).sqrt();
            sum += lambda.powi(k as i32) / fact * a;
        }
    }
    sum
}

fn pmf_oracle(lambda: f64, kmax: u32) -> Vec<f64> {
    let z = one_norm_oracle(lambda);
    let mut fact = 1.0;
    (0..=kmax)
        .map(|k| {
            if k > 0 {
                fact *= k as f64;
            }
            if k % 2 == 1 {
                0.0
            } else {
                lambda.powi(k as i32) / fact * (1.0 + (lambda / (k as f64 + 1.0)).powi(2)).sqrt() / z
            }
        })
        .collect()
}

fn model() -> Hamiltonian {
    Hamiltonian::from_labels(&[(0.6, "XI"), (-0.4, "ZZ"), (0.3, "IY")]).unwrap()
}

fn ideal(h: &Hamiltonian, t: f64, o: &str, rho: &M) -> f64 {
    let u = evolution(&hamiltonian_matrix(h), t);
    expect(&pauli(o), &(&u * rho * u.adjoint()))
}

#[test]
fn one_norm_matches_series_and_its_majorant() {
    assert!((lcu_one_norm(1.0, 1e-17) - 1.98518).abs() < 1e-5);
    for lambda in [0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 3.5] {
        let got = lcu_one_norm(lambda, 1e-17);
        assert!((got - one_norm_oracle(lambda)).abs() < 1e-13 * got.max(1.0), "lambda {lambda}");
        assert!(got >= lambda.cosh() - 1e-14);
        assert!(got <= lambda.cosh() * (1.0 + lambda * lambda).sqrt() + 1e-14);
        assert!((gamma_rlcu(lambda, 3) - got.powi(6)).abs() < 1e-12 * got.powi(6));
    }
}

#[test]
fn taylor_order_law_matches_oracle_and_passes_chi_squared() {
    for lambda in [0.25, 0.5, 1.0] {
        let pmf = taylor_order_pmf(lambda);
        let oracle = pmf_oracle(lambda, 60);
        for (k, p) in &pmf {
            assert!((p - oracle[*k as usize]).abs() < 1e-14);
        }
        assert!((pmf.iter().map(|(_, p)| p).sum::<f64>() - 1.0).abs() < 1e-14);

        let draws = 1_000_000u64;
        let mut r = rng(40 + (lambda * 100.0) as u64);
        let mut counts = vec![0u64; 61];
        for _ in 0..draws {
            counts[sample_taylor_order(lambda, &mut r).min(60) as usize] += 1;
        }
        assert!(counts.iter().skip(1).step_by(2).all(|&c| c == 0), "odd order drawn");
        // pool even bins from the top until each carries >= 5 expected counts
        let mut bins: Vec<(f64, f64)> = Vec::new();
        let (mut exp_acc, mut obs_acc) = (0.0, 0.0);
        for k in (0..61).step_by(2).rev() {
            exp_acc += oracle[k] * draws as f64;
            obs_acc += counts[k] as f64;
            if exp_acc >= 5.0 {
                bins.push((obs_acc, exp_acc));
                exp_acc = 0.0;
                obs_acc = 0.0;
            }
        }
        if let Some(last) = bins.last_mut() {
            last.0 += obs_acc;
            last.1 += exp_acc;
        }
        let stat: f64 = bins.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
        let dof = (bins.len() - 1) as f64;
        let p_value = 1.0 - ChiSquared::new(dof).unwrap().cdf(stat);
        assert!(p_value > 1e-3, "lambda {lambda}: chi2 {stat} on {dof} dof, p {p_value}");
    }
}

#[test]
fn even_poisson_moments_agree_with_mgf_derivatives() {
    for lambda in [0.25, 0.5, 1.0, 2.0] {
        let h = 1e-4;
        let m = |s: f64| even_poisson_mgf(lambda, s);
        let d1 = (m(h) - m(-h)) / (2.0 * h);
        let d2 = (m(h) - 2.0 * m(0.0) + m(-h)) / (h * h);
        let (mean, var) = even_poisson_moments(lambda);
        assert!((d1 - mean).abs() < 1e-6, "{d1} vs {mean}");
        assert!((d2 - mean * mean - var).abs() < 1e-5);
        assert!((m(0.0) - 1.0).abs() < 1e-15);

        let (tm, tv) = taylor_order_moments(lambda);
        let (mean_bound, second_bound) = k_moment_bounds(lambda);
        // thinning by decreasing a_k shifts mass to lower orders
        assert!(tm <= mean + 1e-15);
        assert!(tm <= mean_bound + 1e-15);
        assert!(tv + tm * tm <= second_bound + 1e-12);
    }
}

#[test]
fn averaged_segment_reproduces_the_scaled_evolution() {
    let mut r = rng(41);
    for h in [model(), random_hamiltonian(&mut r, 2, 4), random_hamiltonian(&mut r, 3, 5)] {
        let beta = h.beta();
        for lambda in [0.1, 0.5, 1.0] {
            let got = averaged_segment_operator(&h, lambda, 40).unwrap();
            let want = evolution(&hamiltonian_matrix(&h), lambda / beta);
            assert!(max_diff(&got, &want) < 1e-8, "lambda {lambda}");
            // truncation after order k_max leaves at most the series tail
            for k_max in [0u32, 2, 4] {
                let tail = one_norm_oracle(lambda)
                    - pmf_oracle(lambda, k_max).iter().sum::<f64>() * one_norm_oracle(lambda);
                let cut = averaged_segment_operator(&h, lambda, k_max).unwrap();
                assert!(op_norm(&(cut - &want)) <= tail + 1e-12, "k_max {k_max}");
            }
        }
    }
}

#[test]
fn zero_time_is_exact_per_shot() {
    let h = model();
    let rho = DensityMatrix::plus_state(2);
    let o = DenseOperator::from_label("XX", 1.0).unwrap();
    let want = expect(&pauli("XX"), rho.matrix());
    let est = run_rlcu_estimate(&h, 0.0, &RlcuConfig::new(2, 20, 1), &o, &rho, None).unwrap();
    assert!((est.mean - want).abs() < 1e-12);
    assert!(est.shot_variance < 1e-20);
    assert!((rlcu_expectation_exact(&h, 0.0, 2, &o, &rho, None).unwrap() - want).abs() < 1e-12);
}

#[test]
fn estimator_is_unbiased_across_seeds() {
    let h = model();
    let mut r = rng(42);
    let rho_m = random_state(&mut r, 4);
    let rho = DensityMatrix::new(rho_m.clone()).unwrap();
    let o = DenseOperator::from_label("ZX", 1.0).unwrap();
    let t = 1.5;
    let want = ideal(&h, t, "ZX", &rho_m);
    for r in [1, 2, 4] {
        assert!((rlcu_expectation_exact(&h, t, r, &o, &rho, None).unwrap() - want).abs() < 1e-10, "r={r}");
    }
    let cfg_r = 2;
    let mut within = 0;
    let (mut total, mut var) = (0.0, 0.0);
    for seed in 0..20 {
        let est = run_rlcu_estimate(&h, t, &RlcuConfig::new(cfg_r, 2000, seed), &o, &rho, None).unwrap();
        let gamma = est.gamma_rlcu;
        assert!(est.shot_variance <= gamma * gamma + 1e-9);
        within += usize::from((est.mean - want).abs() <= est.halfwidth);
        total += est.mean;
        var += est.variance;
    }
    assert!(within >= 19, "{within}/20 seeds within four standard errors");
    let pooled = total / 20.0;
    assert!((pooled - want).abs() <= 4.0 * (var / 400.0).sqrt(), "{pooled} vs {want}");
}

#[test]
fn measurement_bits_are_unbiased_too() {
    let h = model();
    let rho = DensityMatrix::zero_state(2);
    let o = DenseOperator::from_label("ZI", 1.0).unwrap();
    let want = ideal(&h, 1.0, "ZI", rho.matrix());
    let mut cfg = RlcuConfig::new(2, 40_000, 3);
    cfg.shot_mode = ShotMode::MeasurementBit;
    let est = run_rlcu_estimate(&h, 1.0, &cfg, &o, &rho, None).unwrap();
    assert!((est.mean - want).abs() <= est.halfwidth);
    assert!(est.shot_variance <= est.gamma_rlcu.powi(2) + 1e-9);
}

#[test]
fn noisy_bias_is_within_the_bound_and_pec_removes_it() {
    let h = model();
    let rho = DensityMatrix::zero_state(2);
    let o = DenseOperator::from_label("ZI", 1.0).unwrap();
    let t = 1.0;
    let want = ideal(&h, t, "ZI", rho.matrix());
    for (g, gc) in [(0.01, 0.005), (0.02, 0.01), (0.005, 0.005)] {
        let nm = NoiseModel::new(hamsim_core::channels::ChannelFamily::Depolarizing, g, gc).unwrap();
        for r in [1, 2, 4] {
            let noisy = rlcu_expectation_exact(&h, t, r, &o, &rho, Some(&nm)).unwrap();
            let bound = rlcu_bias_bound(&h, t, r, &nm);
            assert!((noisy - want).abs() <= bound, "g={g} r={r}: {} > {bound}", (noisy - want).abs());
        }
    }
    let nm = NoiseModel::depolarizing(0.03).unwrap();
    let biased = (rlcu_expectation_exact(&h, t, 2, &o, &rho, Some(&nm)).unwrap() - want).abs();
    let mut cfg = RlcuConfig::new(2, 20_000, 5);
    cfg.pec = true;
    let est = run_rlcu_estimate(&h, t, &cfg, &o, &rho, Some(&nm)).unwrap();
    assert!((est.mean - want).abs() <= est.halfwidth, "{} vs {want}", est.mean);
    assert!(biased > est.stderr, "noise should be visible at this rate");
}

#[test]
fn ancilla_stays_balanced() {
    let h = model();
    let mut r = rng(43);
    let rho = DensityMatrix::new(random_state(&mut r, 4)).unwrap();
    for (p0, p1) in ancilla_populations(&h, 0.7, 6, &rho, &mut r).unwrap() {
        assert!((p0 - 0.5).abs() < 1e-12 && (p1 - 0.5).abs() < 1e-12);
    }
}

#[test]
fn invalid_inputs_are_rejected() {
    let h = model();
    let rho = DensityMatrix::zero_state(2);
    let o = DenseOperator::from_label("ZI", 1.0).unwrap();
    assert!(matches!(run_rlcu_estimate(&h, 1.0, &RlcuConfig::new(0, 10, 0), &o, &rho, None), Err(Error::InvalidArgument(_))));
    assert!(matches!(rlcu_expectation_exact(&h, -1.0, 1, &o, &rho, None), Err(Error::InvalidArgument(_))));
    let wide = DensityMatrix::zero_state(3);
    assert!(matches!(rlcu_expectation_exact(&h, 1.0, 1, &o, &wide, None), Err(Error::Dimension(_))));
}
