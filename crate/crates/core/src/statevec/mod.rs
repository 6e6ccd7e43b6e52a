//! Dense statevector engine for registers of at most five qubits.
//!
//! Qubit 0 is the leftmost (most significant) tensor factor: the basis index
//! of `|q0 q1 ... q(n-1)>` is the binary number `q0 q1 ... q(n-1)`.

mod bell;
pub(crate) mod kernel;
mod operator;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use bell::{bell_measure, bell_state, bell_states, measure, BellLabel, MeasurementBranch};
pub use operator::{OperatorKind, OperatorMatrix, Propagator, Spectrum, OPERATOR_TOLERANCE};

pub const MAX_QUBITS: usize = 5;

/// Tolerance on Σ|amplitude|² for states exposed as normalized.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Branches with probability below this are degenerate.
pub const POSTSELECTION_THRESHOLD: f64 = 1e-12;

/// A normalized pure state of `n_qubits` qubits.
///
/// Zero-qubit states (a single amplitude) arise as residuals of projecting
/// every qubit of a register.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    let n = len.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(Error::DimensionOverflow(n));
    }
    Ok(n)
}

impl StateVector {
    /// Wraps amplitudes that must already be normalized.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n_qubits = qubits_for_len(amplitudes.len())?;
        let norm = kernel::norm_sqr(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Rescales arbitrary amplitudes to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n_qubits = qubits_for_len(amplitudes.len())?;
        let norm = kernel::norm_sqr(&amplitudes);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        let scale = norm.sqrt().recip();
        Ok(Self {
            n_qubits,
            amplitudes: amplitudes.into_iter().map(|a| a * scale).collect(),
        })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Amplitudes produced internally from normalized data.
    pub(crate) fn from_trusted(amplitudes: Vec<Complex64>) -> Self {
        let n_qubits = amplitudes.len().trailing_zeros() as usize;
        Self {
            n_qubits,
            amplitudes,
        }
    }

    /// Computational basis state `|index>` on `n_qubits` qubits.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::DimensionOverflow(n_qubits));
        }
        let dim = 1 << n_qubits;
        if index >= dim {
            return Err(Error::InvalidTargets(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    pub fn zero() -> Self {
        Self::from_trusted(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])
    }

    pub fn one() -> Self {
        Self::from_trusted(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)])
    }

    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_trusted(vec![Complex64::new(h, 0.0), Complex64::new(h, 0.0)])
    }

    pub fn minus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_trusted(vec![Complex64::new(h, 0.0), Complex64::new(-h, 0.0)])
    }

    /// `cos(angle)|0> + sin(angle)|1>`.
    pub fn real_qubit(angle: f64) -> Self {
        Self::from_trusted(vec![
            Complex64::new(angle.cos(), 0.0),
            Complex64::new(angle.sin(), 0.0),
        ])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        kernel::norm_sqr(&self.amplitudes)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(kernel::inner(&self.amplitudes, &other.amplitudes))
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `e^{i phase} |self>`.
    pub fn with_global_phase(&self, phase: f64) -> Self {
        let p = Complex64::from_polar(1.0, phase);
        Self::from_trusted(self.amplitudes.iter().map(|a| a * p).collect())
    }

    /// Reorders qubits: new qubit `j` is old qubit `order[j]`.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.n_qubits {
            return Err(Error::InvalidTargets(format!(
                "permutation of length {} for a {}-qubit state",
                order.len(),
                self.n_qubits
            )));
        }
        kernel::validate_targets(self.n_qubits, order)?;
        Ok(Self::from_trusted(kernel::permute(
            &self.amplitudes,
            self.n_qubits,
            order,
        )))
    }
}

/// Result of projecting part of a register onto a bra.
#[derive(Clone, Debug, PartialEq)]
pub struct PostselectionResult {
    /// Squared norm of the unnormalized residual.
    pub probability: f64,
    /// Norm of the unnormalized residual, `sqrt(probability)`.
    pub raw_norm: f64,
    /// Renormalized residual on the untouched qubits.
    pub state: StateVector,
}

impl PostselectionResult {
    pub(crate) fn from_residual(residual: Vec<Complex64>) -> Result<Self> {
        let probability = kernel::norm_sqr(&residual);
        if !(probability >= POSTSELECTION_THRESHOLD) {
            return Err(Error::DegeneratePostselection(probability));
        }
        let raw_norm = probability.sqrt();
        let state =
            StateVector::from_trusted(residual.into_iter().map(|a| a / raw_norm).collect());
        Ok(Self {
            probability,
            raw_norm,
            state,
        })
    }
}

/// Kronecker product `|a> ⊗ |b>`; `a` supplies the leading qubits.
pub fn tensor(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    let n = a.n_qubits + b.n_qubits;
    if n > MAX_QUBITS {
        return Err(Error::DimensionOverflow(n));
    }
    Ok(StateVector::from_trusted(kernel::kron(
        &a.amplitudes,
        &b.amplitudes,
    )))
}

fn check_operator_targets(state: &StateVector, op: &OperatorMatrix, targets: &[usize]) -> Result<()> {
    kernel::validate_targets(state.n_qubits, targets)?;
    if op.k_qubits() != targets.len() {
        return Err(Error::InvalidTargets(format!(
            "{}-qubit operator applied to {} targets",
            op.k_qubits(),
            targets.len()
        )));
    }
    Ok(())
}

/// Applies a unitary to `targets` (in operator qubit order), identity elsewhere.
pub fn apply_unitary(
    state: &StateVector,
    op: &OperatorMatrix,
    targets: &[usize],
) -> Result<StateVector> {
    if op.kind() != OperatorKind::Unitary {
        return Err(Error::NotUnitary(f64::NAN));
    }
    check_operator_targets(state, op, targets)?;
    Ok(StateVector::from_trusted(kernel::apply(
        &state.amplitudes,
        state.n_qubits,
        op.matrix(),
        targets,
    )))
}

/// Postselects `targets` on `bra`, returning the renormalized residual.
pub fn project(state: &StateVector, bra: &StateVector, targets: &[usize]) -> Result<PostselectionResult> {
    kernel::validate_targets(state.n_qubits, targets)?;
    if bra.n_qubits != targets.len() {
        return Err(Error::InvalidTargets(format!(
            "{}-qubit bra projected on {} targets",
            bra.n_qubits,
            targets.len()
        )));
    }
    PostselectionResult::from_residual(kernel::contract(
        &state.amplitudes,
        state.n_qubits,
        &bra.amplitudes,
        targets,
    ))
}

/// `|<a|b>|²`, equal to 1 exactly when the states agree up to global phase.
pub fn fidelity_up_to_phase(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}
