mod common;

use common::*;
use hamsim_core::channels::{DensityMatrix, NoiseModel};
use hamsim_core::hamiltonian::{c1_prefactor, Hamiltonian, NormMode};
use hamsim_core::linalg::DenseOperator;
use hamsim_core::trotter::{
    alpha_k, build_formula, microstep_error, microstep_unitary, run_trotter, suzuki_coefficient, trotter_bias,
    trotter_circuit, trotter_state_distance, upsilon, TrotterRun,
};
use hamsim_core::Error;
use proptest::prelude::*;
use rand::Rng;

fn terms(h: &Hamiltonian) -> Vec<(f64, String)> {
    h.terms().iter().map(|t| (t.coefficient(), t.pauli().label())).collect()
}

fn rotation(label: &str, theta: f64) -> M {
    let dim = 1 << label.len();
    M::identity(dim, dim) * c(theta.cos(), 0.0) - pauli(label) * c(0.0, theta.sin())
}

/// Textbook recursion, written as matrix products with the first factor acting first.
fn suzuki(h: &[(f64, String)], k: u32, delta: f64) -> M {
    let dim = 1 << h[0].1.len();
    match k {
        1 => h.iter().fold(M::identity(dim, dim), |u, (a, p)| rotation(p, a * delta) * u),
        2 => {
            let half = |u: M, (a, p): &(f64, String)| rotation(p, a * delta / 2.0) * u;
            let fwd = h.iter().fold(M::identity(dim, dim), half);
            h.iter().rev().fold(fwd, half)
        }
        _ => {
            let u = 1.0 / (4.0 - 4f64.powf(1.0 / (k as f64 - 1.0)));
            let outer = suzuki(h, k - 2, u * delta);
            let mid = suzuki(h, k - 2, (1.0 - 4.0 * u) * delta);
            &outer * &outer * mid * &outer * &outer
        }
    }
}

fn labels_on(support: &[usize], n: usize) -> Vec<String> {
    let mut out = vec![String::from_utf8(vec![b'I'; n]).unwrap()];
    for &q in support {
        out = out
            .into_iter()
            .flat_map(|l| {
                "IXYZ".chars().map(move |ch| {
                    let mut b = l.clone().into_bytes();
                    b[q] = ch as u8;
                    String::from_utf8(b).unwrap()
                })
            })
            .collect();
    }
    out
}

#[test]
fn first_order_microstep_is_the_rotation_product() {
    let h = Hamiltonian::from_labels(&[(1.0, "XI"), (1.0, "ZZ")]).unwrap();
    let f = build_formula(&h, 1).unwrap();
    let s = microstep_unitary(&f, &h, 0.1).unwrap();
    let want = rotation("ZZ", 0.1) * rotation("XI", 0.1);
    assert!(max_diff(s.matrix(), &want) < 1e-14);
}

#[test]
fn microsteps_match_the_recursive_construction() {
    let mut r = rng(20);
    for _ in 0..6 {
        let h = random_hamiltonian(&mut r, 3, 4);
        let delta = r.random_range(0.05..0.5);
        for k in [1, 2, 4, 6] {
            let f = build_formula(&h, k).unwrap();
            let got = microstep_unitary(&f, &h, delta).unwrap();
            assert!(max_diff(got.matrix(), &suzuki(&terms(&h), k, delta)) < 1e-12, "k={k}");
            assert_eq!(f.stage_count(), upsilon(k).unwrap());
        }
    }
}

#[test]
fn formula_structure() {
    assert!((suzuki_coefficient(2) - 0.414491).abs() < 1e-6);
    assert_eq!([1, 2, 4, 6].map(|k| upsilon(k).unwrap()), [1, 2, 10, 50]);
    for k in [0, 3, 5] {
        assert!(matches!(upsilon(k), Err(Error::InvalidOrder(_))));
    }
    let h = Hamiltonian::from_labels(&[(1.0, "XI"), (0.5, "ZZ"), (0.3, "IY")]).unwrap();
    for k in [1, 2, 4, 6] {
        let f = build_formula(&h, k).unwrap();
        assert_eq!(f.is_palindrome(), k != 1);
        for total in f.fraction_totals() {
            assert!((total - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn microstep_error_scales_with_order() {
    let h = Hamiltonian::from_labels(&[(1.0, "XI"), (1.0, "ZZ"), (0.7, "YX")]).unwrap();
    for k in [1u32, 2, 4] {
        let (a, b) = (0.04, 0.02);
        let ratio = microstep_error(&build_formula(&h, k).unwrap(), &h, a).unwrap()
            / microstep_error(&build_formula(&h, k).unwrap(), &h, b).unwrap();
        let slope = ratio.log2();
        assert!((slope - (k + 1) as f64).abs() < 0.1, "k={k} slope {slope}");
    }
}

#[test]
fn single_term_and_commuting_formulas_are_exact() {
    let single = Hamiltonian::from_labels(&[(0.8, "XYZ")]).unwrap();
    let commuting = Hamiltonian::from_labels(&[(0.8, "ZZI"), (0.3, "IZZ"), (-0.4, "ZIZ")]).unwrap();
    for h in [single, commuting] {
        for k in [1, 2, 4] {
            let s = microstep_unitary(&build_formula(&h, k).unwrap(), &h, 0.9).unwrap();
            assert!(max_diff(s.matrix(), &evolution(&hamiltonian_matrix(&h), 0.9)) < 1e-12);
        }
    }
}

#[test]
fn first_order_distance_obeys_global_bound_at_fine_steps() {
    let h = Hamiltonian::from_labels(&[(1.0, "XI"), (1.0, "ZZ")]).unwrap();
    let t = 1.0;
    let n = 1024;
    let rho = DensityMatrix::zero_state(2);
    let d = trotter_state_distance(&h, t, n, 1, &rho, None).unwrap();
    let c1 = c1_prefactor(&h, NormMode::Exact).unwrap();
    assert!(d < c1 * t * t / n as f64, "{d}");

    // independent: the same distance from dense products
    let step = suzuki(&terms(&h), 1, t / n as f64);
    let mut v = M::identity(4, 4);
    for _ in 0..n {
        v = &step * v;
    }
    let u = evolution(&hamiltonian_matrix(&h), t);
    let psi0 = rho.matrix();
    let a = &u * psi0 * u.adjoint();
    let b = &v * psi0 * v.adjoint();
    assert!((trace_norm(&(a - b)) / 2.0 - d).abs() < 1e-10);
}

#[test]
fn noisy_single_step_matches_hand_composed_channels() {
    let h = Hamiltonian::from_labels(&[(0.7, "XI"), (0.4, "ZZ"), (0.2, "IY")]).unwrap();
    let p = 0.05;
    let nm = NoiseModel::depolarizing(p).unwrap();
    let mut r = rng(21);
    let rho0 = random_state(&mut r, 4);
    let out = run_trotter(&h, 0.6, 1, 1, Some(&nm), &DensityMatrix::new(rho0.clone()).unwrap()).unwrap();

    let mut rho = rho0;
    for (a, label) in terms(&h) {
        let g = rotation(&label, a * 0.6);
        rho = &g * rho * g.adjoint();
        let support: Vec<usize> = label.char_indices().filter(|(_, ch)| *ch != 'I').map(|(i, _)| i).collect();
        let errs: Vec<String> = labels_on(&support, 2).into_iter().skip(1).collect();
        let q = p / errs.len() as f64;
        let mut next = &rho * c(1.0 - p, 0.0);
        for e in &errs {
            let pm = pauli(e);
            next += &pm * &rho * &pm * c(q, 0.0);
        }
        rho = next;
    }
    assert!(max_diff(out.matrix(), &rho) < 1e-13);
}

#[test]
fn circuit_shape_follows_depth_and_term_count() {
    let h = Hamiltonian::from_labels(&[(1.0, "XI"), (1.0, "ZZ"), (0.5, "YY")]).unwrap();
    for (k, n) in [(1, 3), (2, 5), (4, 2)] {
        let run = TrotterRun::new(&h, 1.0, n, k).unwrap();
        assert_eq!(run.depth, upsilon(k).unwrap() * n as u64);
        assert_eq!(run.gate_count, run.depth * 3);
        assert_eq!(trotter_circuit(&h, 1.0, n, k, None).unwrap().len() as u64, run.gate_count);
    }
    assert!(matches!(TrotterRun::new(&h, 1.0, 0, 1), Err(Error::InvalidArgument(_))));
    assert!(matches!(TrotterRun::new(&h, 1.0, 1, 3), Err(Error::InvalidOrder(3))));
}

#[test]
fn noisy_bias_stays_within_algorithmic_plus_hardware_budget() {
    let h = Hamiltonian::from_labels(&[(1.0, "XI"), (1.0, "ZZ")]).unwrap();
    let rho = DensityMatrix::zero_state(2);
    let o = DenseOperator::from_label("ZI", 1.0).unwrap();
    for k in [1u32, 2] {
        let alpha = alpha_k(&h, k, 1.0, 1.0).unwrap();
        for gamma in [0.0, 0.01, 0.03] {
            let nm = NoiseModel::depolarizing(gamma).unwrap();
            for n in [1usize, 2, 4, 8, 16] {
                let d = (upsilon(k).unwrap() * n as u64) as f64;
                let bias = trotter_bias(&h, 1.0, n, k, &o, &rho, Some(&nm)).unwrap();
                let bound = alpha / d.powi(k as i32) + h.num_terms() as f64 * d * gamma;
                assert!(bias <= bound, "k={k} gamma={gamma} N={n}: {bias} > {bound}");
            }
        }
    }
}

#[test]
fn noise_free_model_reproduces_ideal_run() {
    let h = Hamiltonian::from_labels(&[(1.0, "XI"), (1.0, "ZZ")]).unwrap();
    let rho = DensityMatrix::plus_state(2);
    let ideal = run_trotter(&h, 1.0, 3, 2, None, &rho).unwrap();
    let zero = run_trotter(&h, 1.0, 3, 2, Some(&NoiseModel::depolarizing(0.0).unwrap()), &rho).unwrap();
    assert!(max_diff(ideal.matrix(), zero.matrix()) < 1e-14);
    assert!(matches!(run_trotter(&h, 1.0, 3, 2, None, &DensityMatrix::zero_state(3)), Err(Error::Dimension(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn microsteps_are_unitary(seed in any::<u64>(), k in prop_oneof![Just(1u32), Just(2), Just(4)], delta in -2.0f64..2.0) {
        let mut r = rng(seed);
        let n = r.random_range(1..=3);
        let l = r.random_range(1..=5);
        let h = random_hamiltonian(&mut r, n, l);
        let s = microstep_unitary(&build_formula(&h, k).unwrap(), &h, delta).unwrap();
        prop_assert!(s.unitarity_defect() < 1e-12);
    }

    #[test]
    fn trotter_states_stay_physical(seed in any::<u64>(), gamma in 0.0f64..0.1, n in 1usize..4) {
        let mut r = rng(seed);
        let h = random_hamiltonian(&mut r, 2, 3);
        let nm = NoiseModel::depolarizing(gamma).unwrap();
        let rho = run_trotter(&h, 0.8, n, 2, Some(&nm), &DensityMatrix::new(random_state(&mut r, 4)).unwrap()).unwrap();
        prop_assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
        prop_assert!(rho.eigenvalues().iter().all(|&e| e > -1e-12));
    }
}
