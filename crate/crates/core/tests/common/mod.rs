//! Independent dense oracles: explicit index arithmetic, a Taylor matrix
//! exponential, and Haar sampling. Nothing here calls the kernels under test.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use wva_core::statevec::{OperatorMatrix, StateVector};

pub type C = Complex64;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vec(rng: &mut ChaCha8Rng, dim: usize) -> Vec<C> {
    (0..dim)
        .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

pub fn haar_state(rng: &mut ChaCha8Rng, n_qubits: usize) -> StateVector {
    StateVector::normalized(gaussian_vec(rng, 1 << n_qubits)).unwrap()
}

pub fn unit_vector(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> DMatrix<C> {
    let g = DMatrix::from_vec(dim, dim, gaussian_vec(rng, dim * dim));
    (&g + g.adjoint()) * c(0.5, 0.0)
}

/// `exp(m)` by scaling and squaring with a 30-term Taylor series.
pub fn expm(m: &DMatrix<C>) -> DMatrix<C> {
    let norm = m.iter().map(|z| z.norm()).sum::<f64>();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let a = m * c(0.5f64.powi(squarings as i32), 0.0);
    let dim = m.nrows();
    let mut term = DMatrix::<C>::identity(dim, dim);
    let mut sum = term.clone();
    for k in 1..30 {
        term = &term * &a * c(1.0 / k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `exp(-i t h)`.
pub fn evolution(h: &DMatrix<C>, t: f64) -> DMatrix<C> {
    expm(&(h * c(0.0, -t)))
}

pub fn random_unitary(rng: &mut ChaCha8Rng, k_qubits: usize) -> DMatrix<C> {
    let h = random_hermitian(rng, 1 << k_qubits);
    evolution(&h, 1.0)
}

fn bit(x: usize, n: usize, q: usize) -> usize {
    (x >> (n - 1 - q)) & 1
}

fn sub_index(x: usize, n: usize, qubits: &[usize]) -> usize {
    qubits.iter().fold(0, |acc, &q| (acc << 1) | bit(x, n, q))
}

/// Full `2^n × 2^n` matrix of `op` acting on `targets`; qubit 0 is the most
/// significant factor.
pub fn embed(op: &DMatrix<C>, n: usize, targets: &[usize]) -> DMatrix<C> {
    let dim = 1 << n;
    let rest: Vec<usize> = (0..n).filter(|q| !targets.contains(q)).collect();
    DMatrix::from_fn(dim, dim, |x, y| {
        if sub_index(x, n, &rest) == sub_index(y, n, &rest) {
            op[(sub_index(x, n, targets), sub_index(y, n, targets))]
        } else {
            c(0.0, 0.0)
        }
    })
}

pub fn apply_dense(m: &DMatrix<C>, amps: &[C]) -> Vec<C> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|k| m[(r, k)] * amps[k]).sum())
        .collect()
}

/// `(<bra| ⊗ 1) |amps>` with the bra on `targets`; survivors keep their order.
pub fn contract_dense(amps: &[C], n: usize, bra: &[C], targets: &[usize]) -> Vec<C> {
    let rest: Vec<usize> = (0..n).filter(|q| !targets.contains(q)).collect();
    let mut out = vec![c(0.0, 0.0); 1 << rest.len()];
    for (x, a) in amps.iter().enumerate() {
        out[sub_index(x, n, &rest)] += bra[sub_index(x, n, targets)].conj() * a;
    }
    out
}

pub fn kron_vec(a: &[C], b: &[C]) -> Vec<C> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

pub fn norm_sqr(v: &[C]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn overlap_sqr(a: &[C], b: &[C]) -> f64 {
    let ip: C = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    ip.norm_sqr() / (norm_sqr(a) * norm_sqr(b))
}

pub fn max_abs_diff(a: &DMatrix<C>, b: &DMatrix<C>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn sigma_x() -> DMatrix<C> {
    DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn sigma_z() -> DMatrix<C> {
    DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

pub fn outer(a: &[C], b: &[C]) -> DMatrix<C> {
    DMatrix::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
}

pub fn kron(a: &DMatrix<C>, b: &DMatrix<C>) -> DMatrix<C> {
    a.kronecker(b)
}

/// `(|00> + |11>)/√2`, `(|00> - |11>)/√2`, `(|01> + |10>)/√2`, `(|01> - |10>)/√2`.
pub fn bell(index: usize) -> Vec<C> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = c(0.0, 0.0);
    match index {
        0 => vec![c(h, 0.0), z, z, c(h, 0.0)],
        1 => vec![c(h, 0.0), z, z, c(-h, 0.0)],
        2 => vec![z, c(h, 0.0), c(h, 0.0), z],
        _ => vec![z, c(h, 0.0), c(-h, 0.0), z],
    }
}

/// Dense generator `Π ⊗ B / 2`.
pub fn generator(pi: &DMatrix<C>, b: &DMatrix<C>) -> DMatrix<C> {
    kron(pi, b) * c(0.5, 0.0)
}

/// Standard protocol by brute force: `(<f| ⊗ 1) exp(-iθG) |i>|ψ>`.
pub fn standard_dense(g: &DMatrix<C>, theta: f64, i: &[C], psi: &[C], f: &[C]) -> Vec<C> {
    let evolved = apply_dense(&evolution(g, theta), &kron_vec(i, psi));
    contract_dense(&evolved, 2, f, &[0])
}

/// Teleportation protocol in the full 16-dimensional space, qubits (A, B, C, D):
/// `(<f|_A <β|_{C,D}) U_{A,B}(θ) |Φ+>_{A,C} |ψ>_B |i>_D`.
pub fn pctc_dense(g: &DMatrix<C>, theta: f64, psi: &[C], i: &[C], f: &[C], beta: &[C]) -> Vec<C> {
    let phi = bell(0);
    let mut amps = vec![c(0.0, 0.0); 16];
    for (x, slot) in amps.iter_mut().enumerate() {
        let (a, b, cc, d) = (bit(x, 4, 0), bit(x, 4, 1), bit(x, 4, 2), bit(x, 4, 3));
        *slot = phi[2 * a + cc] * psi[b] * i[d];
    }
    let u = embed(&evolution(g, theta), 4, &[0, 1]);
    let evolved = apply_dense(&u, &amps);
    let after_a = contract_dense(&evolved, 4, f, &[0]);
    contract_dense(&after_a, 3, beta, &[1, 2])
}

pub fn op(m: &OperatorMatrix) -> DMatrix<C> {
    m.matrix().clone()
}
