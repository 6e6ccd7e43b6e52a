//! Raw amplitude kernels shared by the normalized `StateVector` API and the
//! unnormalized pipelines used for Fisher-information derivatives.
//!
//! Qubit `q` of an `n`-qubit register lives at bit `n - 1 - q` of the basis
//! index, i.e. qubit 0 is the most significant tensor factor.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) fn validate_targets(n: usize, targets: &[usize]) -> Result<()> {
    if targets.is_empty() {
        return Err(Error::InvalidTargets("no target qubits given".into()));
    }
    for (i, &t) in targets.iter().enumerate() {
        if t >= n {
            return Err(Error::InvalidTargets(format!(
                "qubit {t} out of range for a {n}-qubit register"
            )));
        }
        if targets[..i].contains(&t) {
            return Err(Error::InvalidTargets(format!("qubit {t} listed twice")));
        }
    }
    Ok(())
}

/// Offsets into the full index for every sub-index over `targets`
/// (sub-index bit order follows the order of `targets`).
fn target_offsets(n: usize, targets: &[usize]) -> Vec<usize> {
    let k = targets.len();
    (0..1usize << k)
        .map(|s| {
            targets.iter().enumerate().fold(0, |acc, (j, &q)| {
                if (s >> (k - 1 - j)) & 1 == 1 {
                    acc | 1 << (n - 1 - q)
                } else {
                    acc
                }
            })
        })
        .collect()
}

fn target_mask(n: usize, targets: &[usize]) -> usize {
    targets.iter().fold(0, |acc, &q| acc | 1 << (n - 1 - q))
}

/// Applies a `2^k x 2^k` matrix to `targets`, identity elsewhere.
pub(crate) fn apply(
    amps: &[Complex64],
    n: usize,
    matrix: &DMatrix<Complex64>,
    targets: &[usize],
) -> Vec<Complex64> {
    let offsets = target_offsets(n, targets);
    let mask = target_mask(n, targets);
    let sub = offsets.len();
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    let mut gathered = vec![Complex64::new(0.0, 0.0); sub];
    for base in (0..amps.len()).filter(|i| i & mask == 0) {
        for (g, &off) in gathered.iter_mut().zip(&offsets) {
            *g = amps[base + off];
        }
        for (r, &off) in offsets.iter().enumerate() {
            out[base + off] = (0..sub).map(|s| matrix[(r, s)] * gathered[s]).sum();
        }
    }
    out
}

/// `(<bra| ⊗ 1_rest) |amps>`; the remaining qubits keep their relative order.
pub(crate) fn contract(
    amps: &[Complex64],
    n: usize,
    bra: &[Complex64],
    targets: &[usize],
) -> Vec<Complex64> {
    let offsets = target_offsets(n, targets);
    let mask = target_mask(n, targets);
    let bases: Vec<usize> = (0..amps.len()).filter(|i| i & mask == 0).collect();
    bases
        .into_iter()
        .map(|base| {
            offsets
                .iter()
                .zip(bra)
                .map(|(&off, b)| b.conj() * amps[base + off])
                .sum()
        })
        .collect()
}

pub(crate) fn kron(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

/// Reorders qubits so that new qubit `j` is old qubit `order[j]`.
pub(crate) fn permute(amps: &[Complex64], n: usize, order: &[usize]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    for (old, &amp) in amps.iter().enumerate() {
        let new = order.iter().enumerate().fold(0, |acc, (j, &q)| {
            acc | ((old >> (n - 1 - q)) & 1) << (n - 1 - j)
        });
        out[new] = amp;
    }
    out
}

/// Real dot product accurate to about twice working precision
/// (error-free products via FMA, compensated summation).
pub(crate) fn dot2(terms: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    let mut sum = 0.0;
    let mut err = 0.0;
    for (x, y) in terms {
        let p = x * y;
        let p_err = x.mul_add(y, -p);
        let t = sum + p;
        let z = t - sum;
        err += (sum - (t - z)) + (p - z) + p_err;
        sum = t;
    }
    sum + err
}

/// `<a|b>`, compensated so near-orthogonal overlaps keep their relative accuracy.
pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let re = dot2(a.iter().zip(b).flat_map(|(x, y)| [(x.re, y.re), (x.im, y.im)]));
    let im = dot2(a.iter().zip(b).flat_map(|(x, y)| [(x.re, y.im), (-x.im, y.re)]));
    Complex64::new(re, im)
}

pub(crate) fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot2_survives_cancellation() {
        let terms = [(1e16, 1.0), (1.0, 1.0), (-1e16, 1.0)];
        assert_eq!(terms.iter().map(|(x, y)| x * y).sum::<f64>(), 0.0);
        assert_eq!(dot2(terms), 1.0);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(dot2([(r, 0.1), (r, -0.1)]), 0.0);
    }

    #[test]
    fn inner_is_conjugate_linear_in_the_bra() {
        let a = [Complex64::new(0.0, 1.0)];
        let b = [Complex64::new(1.0, 0.0)];
        assert_eq!(inner(&a, &b), Complex64::new(0.0, -1.0));
    }
}
