//! Independent dense oracles shared by the integration tests. Nothing here
//! calls into the library's own linear algebra.
#![allow(dead_code)]

use hamsim_core::hamiltonian::Hamiltonian;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type M = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn single(ch: char) -> M {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match ch.to_ascii_uppercase() {
        'I' => M::from_row_slice(2, 2, &[o, z, z, o]),
        'X' => M::from_row_slice(2, 2, &[z, o, o, z]),
        'Y' => M::from_row_slice(2, 2, &[z, -i, i, z]),
        'Z' => M::from_row_slice(2, 2, &[o, z, z, -o]),
        other => panic!("bad Pauli {other}"),
    }
}

/// Kronecker product of the label's factors, leftmost character first.
pub fn pauli(label: &str) -> M {
    label.chars().fold(M::identity(1, 1), |acc, ch| acc.kronecker(&single(ch)))
}

pub fn hamiltonian_matrix(h: &Hamiltonian) -> M {
    let dim = 1 << h.n_qubits();
    h.terms().iter().fold(M::zeros(dim, dim), |acc, t| acc + pauli(&t.pauli().label()) * c(t.coefficient(), 0.0))
}

/// `exp(a)` by scaling and squaring around a 30-term Taylor series.
pub fn expm(a: &M) -> M {
    let norm = a.iter().map(|z| z.norm()).sum::<f64>();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = a * c(0.5f64.powi(squarings as i32), 0.0);
    let n = a.nrows();
    let mut term = M::identity(n, n);
    let mut sum = M::identity(n, n);
    for k in 1..30 {
        term = &term * &scaled * c(1.0 / k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `exp(-i H t)`.
pub fn evolution(h: &M, t: f64) -> M {
    expm(&(h * c(0.0, -t)))
}

pub fn op_norm(m: &M) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

pub fn trace_norm(m: &M) -> f64 {
    m.clone().svd(false, false).singular_values.sum()
}

pub fn commutator(a: &M, b: &M) -> M {
    a * b - b * a
}

pub fn expect(o: &M, rho: &M) -> f64 {
    (o * rho).trace().re
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_label<R: Rng>(rng: &mut R, n: usize) -> String {
    (0..n).map(|_| ['I', 'X', 'Y', 'Z'][rng.random_range(0..4)]).collect()
}

/// Random Hamiltonian with `l` non-identity terms and coefficients in
/// `[-1, -0.1] U [0.1, 1]`.
pub fn random_hamiltonian<R: Rng>(rng: &mut R, n: usize, l: usize) -> Hamiltonian {
    let mut labels = Vec::new();
    while labels.len() < l {
        let s = random_label(rng, n);
        if s.chars().any(|ch| ch != 'I') {
            let mag = rng.random_range(0.1..1.0);
            labels.push((if rng.random::<bool>() { mag } else { -mag }, s));
        }
    }
    let refs: Vec<(f64, &str)> = labels.iter().map(|(c, s)| (*c, s.as_str())).collect();
    Hamiltonian::from_labels(&refs).unwrap()
}

pub fn random_unitary<R: Rng>(rng: &mut R, dim: usize) -> M {
    let g = M::from_fn(dim, dim, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let herm = (&g + g.adjoint()) * c(0.5, 0.0);
    evolution(&herm, 1.0)
}

/// Random mixed state: `G G^dag / Tr`.
pub fn random_state<R: Rng>(rng: &mut R, dim: usize) -> M {
    let g = M::from_fn(dim, dim, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}

/// Random probability vector of length `n` with first entry at least `p0`.
pub fn random_probs<R: Rng>(rng: &mut R, n: usize, p0: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..n - 1).map(|_| rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let scale = (1.0 - p0) * rng.random::<f64>() / total;
    let mut out = vec![0.0; n];
    for (i, r) in raw.iter().enumerate() {
        out[i + 1] = r * scale;
    }
    out[0] = 1.0 - out[1..].iter().sum::<f64>();
    out
}

/// Independent golden-section minimizer.
pub fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..400 {
        if (b - a) <= 1e-14 * (a.abs() + b.abs()) {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

/// Root of a monotone function on a geometric bracket.
pub fn log_bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..300 {
        let mid = (lo * hi).sqrt();
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo * hi).sqrt()
}

/// Largest entry modulus of `a - b`.
pub fn max_diff(a: &M, b: &M) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
