//! Metrology primitives: the controlled interaction `exp(-iθ Π_a ⊗ B / 2)`,
//! pure-state quantum Fisher information, weak values, postselected probe
//! states and the Cramér–Rao bound.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevec::{
    kernel, tensor, OperatorKind, OperatorMatrix, PostselectionResult, Propagator, StateVector,
    POSTSELECTION_THRESHOLD,
};

/// Tolerance on the spectra of `B` and `Π_a`.
pub const SPECTRUM_TOLERANCE: f64 = 1e-9;

/// Default central-difference step for finite-difference QFI.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Which eigenvalue convention `Π_a` follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorConvention {
    /// Rank-1 projector, eigenvalues {0, 1}.
    Projector,
    /// Projector shifted by -1/2 (e.g. `σ_z / 2`), eigenvalues {-1/2, +1/2}.
    ShiftedPauli,
}

impl GeneratorConvention {
    fn eigenvalues(self) -> [f64; 2] {
        match self {
            GeneratorConvention::Projector => [0.0, 1.0],
            GeneratorConvention::ShiftedPauli => [-0.5, 0.5],
        }
    }
}

fn check_spectrum(op: &OperatorMatrix, expected: [f64; 2], what: &str) -> Result<()> {
    if op.k_qubits() != 1 {
        return Err(Error::InvalidGenerator(format!(
            "{what} must act on a single qubit"
        )));
    }
    let spectrum = op.eigen()?;
    let ok = spectrum
        .values
        .iter()
        .zip(expected)
        .all(|(v, e)| (v - e).abs() <= SPECTRUM_TOLERANCE);
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidGenerator(format!(
            "{what} has eigenvalues {:?}, expected {:?}",
            spectrum.values, expected
        )))
    }
}

/// Coupling strength and operators of `U(θ) = exp(-iθ Π_a ⊗ B / 2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct InteractionSpec {
    pub theta: f64,
    pi_a: OperatorMatrix,
    b_op: OperatorMatrix,
    convention: GeneratorConvention,
}

impl InteractionSpec {
    pub fn new(
        theta: f64,
        pi_a: OperatorMatrix,
        b_op: OperatorMatrix,
        convention: GeneratorConvention,
    ) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::InvalidConfig(format!("theta must be finite, got {theta}")));
        }
        let pi_a = pi_a.as_kind(OperatorKind::Hermitian)?;
        let b_op = b_op.as_kind(OperatorKind::Hermitian)?;
        check_spectrum(&pi_a, convention.eigenvalues(), "Π_a")?;
        check_spectrum(&b_op, [-1.0, 1.0], "B")?;
        Ok(Self {
            theta,
            pi_a,
            b_op,
            convention,
        })
    }

    /// `Π_a = |a><a|`.
    pub fn rank_one(theta: f64, a: &StateVector, b_op: OperatorMatrix) -> Result<Self> {
        Self::new(
            theta,
            OperatorMatrix::projector_onto(a),
            b_op,
            GeneratorConvention::Projector,
        )
    }

    /// `Π_a = σ_z / 2`.
    pub fn shifted_sigma_z(theta: f64, b_op: OperatorMatrix) -> Result<Self> {
        let pi_a = OperatorMatrix::pauli_z(OperatorKind::Hermitian).scaled(0.5)?;
        Self::new(theta, pi_a, b_op, GeneratorConvention::ShiftedPauli)
    }

    pub fn with_theta(&self, theta: f64) -> Self {
        Self {
            theta,
            ..self.clone()
        }
    }

    pub fn pi_a(&self) -> &OperatorMatrix {
        &self.pi_a
    }

    pub fn b_op(&self) -> &OperatorMatrix {
        &self.b_op
    }

    pub fn convention(&self) -> GeneratorConvention {
        self.convention
    }

    /// Hermitian generator `Π_a ⊗ B / 2` on (A, B).
    pub fn generator(&self) -> OperatorMatrix {
        let m = self.pi_a.matrix().kronecker(self.b_op.matrix()) * Complex64::new(0.5, 0.0);
        OperatorMatrix::hermitian(m).expect("tensor of Hermitian operators is Hermitian")
    }

    pub fn propagator(&self) -> Result<Propagator> {
        Propagator::new(&self.generator())
    }
}

/// The two-qubit unitary `exp(-iθ Π_a ⊗ B / 2)`, system qubit first.
pub fn interaction_unitary(spec: &InteractionSpec) -> Result<OperatorMatrix> {
    spec.propagator()?.unitary(spec.theta)
}

/// `(|b+> + |b->)/√2` from the eigenvectors of `B` (phase convention of
/// [`OperatorMatrix::eigen`]).
pub fn optimal_probe(b_op: &OperatorMatrix) -> Result<StateVector> {
    let [b_minus, b_plus] = probe_eigenbasis(b_op)?;
    superpose(&b_plus, &b_minus, 1.0)
}

/// `{(|b+> + |b->)/√2, (|b+> - |b->)/√2}`, the probe readout basis.
pub fn probe_readout_basis(b_op: &OperatorMatrix) -> Result<[StateVector; 2]> {
    let [b_minus, b_plus] = probe_eigenbasis(b_op)?;
    Ok([
        superpose(&b_plus, &b_minus, 1.0)?,
        superpose(&b_plus, &b_minus, -1.0)?,
    ])
}

/// Eigenvectors `[|b->, |b+>]` of a ±1-valued observable.
pub fn probe_eigenbasis(b_op: &OperatorMatrix) -> Result<[StateVector; 2]> {
    let b = b_op.as_kind(OperatorKind::Hermitian)?;
    check_spectrum(&b, [-1.0, 1.0], "B")?;
    let spectrum = b.eigen()?;
    Ok([spectrum.vector(0), spectrum.vector(1)])
}

fn superpose(a: &StateVector, b: &StateVector, sign: f64) -> Result<StateVector> {
    StateVector::normalized(
        a.amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| x + y * sign)
            .collect(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QfiMethod {
    Analytic,
    FiniteDifference,
}

/// Per-probe quantum Fisher information of a pure-state family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FisherReport {
    pub qfi: f64,
    pub method: QfiMethod,
    /// `|w|²` for postselected families.
    pub weak_value_sq: Option<f64>,
}

/// QFI `4<ψ'|ψ'>/N - 4|<ψ|ψ'>|²/N²` of the normalized version of an
/// unnormalized curve `ψ(θ)` with norm² `N`.
pub fn qfi_from_tangent(psi: &[Complex64], dpsi: &[Complex64]) -> Result<f64> {
    if psi.len() != dpsi.len() {
        return Err(Error::DimensionMismatch {
            expected: psi.len(),
            found: dpsi.len(),
        });
    }
    let norm = kernel::norm_sqr(psi);
    if !(norm >= POSTSELECTION_THRESHOLD) {
        return Err(Error::DegeneratePostselection(norm));
    }
    let overlap = kernel::inner(psi, dpsi);
    let qfi = 4.0 * (kernel::norm_sqr(dpsi) / norm - overlap.norm_sqr() / (norm * norm));
    Ok(qfi.max(0.0))
}

/// Finite-difference QFI of a normalized family via central differences.
pub fn qfi_pure<F>(family: F, theta: f64, step: f64) -> Result<FisherReport>
where
    F: Fn(f64) -> Result<StateVector>,
{
    if !(step > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "finite-difference step must be positive, got {step}"
        )));
    }
    let center = family(theta)?;
    let ahead = family(theta + step)?;
    let behind = family(theta - step)?;
    let dim = center.dim();
    for s in [&ahead, &behind] {
        if s.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: s.dim(),
            });
        }
    }
    let derivative: Vec<Complex64> = ahead
        .amplitudes()
        .iter()
        .zip(behind.amplitudes())
        .map(|(a, b)| (a - b) / (2.0 * step))
        .collect();
    let qfi = 4.0
        * (kernel::norm_sqr(&derivative)
            - kernel::inner(center.amplitudes(), &derivative).norm_sqr());
    Ok(FisherReport {
        qfi: qfi.max(0.0),
        method: QfiMethod::FiniteDifference,
        weak_value_sq: None,
    })
}

/// A θ-independent linear step applied after the interaction.
#[derive(Clone, Debug, PartialEq)]
pub enum PostStep {
    /// Contract `targets` with `<bra|`.
    Project { bra: StateVector, targets: Vec<usize> },
    /// Append fresh qubits in the given state after the existing ones.
    Append(StateVector),
}

/// `θ ↦ L · exp(-iθ G) |ψ0>` where `L` is a fixed chain of projections and
/// appended ancillas. Covers the nonpostselected, postselected and
/// teleportation families; the normalized output is the probe state.
#[derive(Clone, Debug)]
pub struct ProbeFamily {
    initial: StateVector,
    propagator: Propagator,
    targets: Vec<usize>,
    post: Vec<PostStep>,
    out_qubits: usize,
}

impl ProbeFamily {
    pub fn new(initial: StateVector, generator: &OperatorMatrix, targets: &[usize]) -> Result<Self> {
        kernel::validate_targets(initial.n_qubits(), targets)?;
        if generator.k_qubits() != targets.len() {
            return Err(Error::InvalidTargets(format!(
                "{}-qubit generator on {} targets",
                generator.k_qubits(),
                targets.len()
            )));
        }
        let out_qubits = initial.n_qubits();
        Ok(Self {
            initial,
            propagator: Propagator::new(generator)?,
            targets: targets.to_vec(),
            post: Vec::new(),
            out_qubits,
        })
    }

    /// The plain interaction family `U(θ)|i>|ψ>` on (A, B).
    pub fn interaction(spec: &InteractionSpec, system: &StateVector, probe: &StateVector) -> Result<Self> {
        Self::new(tensor(system, probe)?, &spec.generator(), &[0, 1])
    }

    pub fn then_project(mut self, bra: StateVector, targets: &[usize]) -> Result<Self> {
        kernel::validate_targets(self.out_qubits, targets)?;
        if bra.n_qubits() != targets.len() {
            return Err(Error::InvalidTargets(format!(
                "{}-qubit bra on {} targets",
                bra.n_qubits(),
                targets.len()
            )));
        }
        self.out_qubits -= targets.len();
        self.post.push(PostStep::Project {
            bra,
            targets: targets.to_vec(),
        });
        Ok(self)
    }

    pub fn then_append(mut self, state: StateVector) -> Result<Self> {
        self.out_qubits += state.n_qubits();
        if self.out_qubits > crate::statevec::MAX_QUBITS {
            return Err(Error::DimensionOverflow(self.out_qubits));
        }
        self.post.push(PostStep::Append(state));
        Ok(self)
    }

    pub fn output_qubits(&self) -> usize {
        self.out_qubits
    }

    fn apply_post(&self, amps: Vec<Complex64>) -> Vec<Complex64> {
        let mut n = self.initial.n_qubits();
        let mut amps = amps;
        for step in &self.post {
            match step {
                PostStep::Project { bra, targets } => {
                    amps = kernel::contract(&amps, n, bra.amplitudes(), targets);
                    n -= targets.len();
                }
                PostStep::Append(state) => {
                    amps = kernel::kron(&amps, state.amplitudes());
                    n += state.n_qubits();
                }
            }
        }
        amps
    }

    /// Unnormalized output amplitudes at `theta`.
    pub fn residual(&self, theta: f64) -> Vec<Complex64> {
        let n = self.initial.n_qubits();
        let evolved = kernel::apply(
            self.initial.amplitudes(),
            n,
            &self.propagator.matrix(theta),
            &self.targets,
        );
        self.apply_post(evolved)
    }

    /// Unnormalized output and its exact θ-derivative `L(-iG)U(θ)|ψ0>`.
    pub fn tangent(&self, theta: f64) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = self.initial.n_qubits();
        let u = self.propagator.matrix(theta);
        let g: DMatrix<Complex64> = self.propagator.generator().matrix() * Complex64::new(0.0, -1.0);
        let evolved = kernel::apply(self.initial.amplitudes(), n, &u, &self.targets);
        let derivative = kernel::apply(&evolved, n, &g, &self.targets);
        (self.apply_post(evolved), self.apply_post(derivative))
    }

    /// Branch probability `‖L U(θ)|ψ0>‖²`.
    pub fn probability(&self, theta: f64) -> f64 {
        kernel::norm_sqr(&self.residual(theta))
    }

    pub fn evaluate(&self, theta: f64) -> Result<PostselectionResult> {
        PostselectionResult::from_residual(self.residual(theta))
    }

    pub fn state(&self, theta: f64) -> Result<StateVector> {
        Ok(self.evaluate(theta)?.state)
    }

    /// Exact QFI of the normalized output.
    pub fn qfi(&self, theta: f64) -> Result<FisherReport> {
        let (psi, dpsi) = self.tangent(theta);
        Ok(FisherReport {
            qfi: qfi_from_tangent(&psi, &dpsi)?,
            method: QfiMethod::Analytic,
            weak_value_sq: None,
        })
    }

    pub fn qfi_finite_difference(&self, theta: f64, step: f64) -> Result<FisherReport> {
        qfi_pure(|t| self.state(t), theta, step)
    }
}

/// Pre- and postselection defining a weak value of `pi_a`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeakValueConfig {
    pub pre: StateVector,
    pub post: StateVector,
    pub pi_a: OperatorMatrix,
}

/// `<f|Π_a|i> / <f|i>`.
pub fn weak_value(cfg: &WeakValueConfig) -> Result<Complex64> {
    let overlap = cfg.post.inner(&cfg.pre)?;
    if overlap.norm() < POSTSELECTION_THRESHOLD {
        return Err(Error::OrthogonalPrePost(overlap.norm()));
    }
    Ok(cfg.pi_a.matrix_element(&cfg.post, &cfg.pre)? / overlap)
}

/// `|w| > 1`, the fixed threshold used for both `Π_a` conventions.
pub fn is_anomalous(w: Complex64) -> bool {
    w.norm() > 1.0
}

/// `|w|` beyond the largest eigenvalue of `pi_a` (1 for projectors, 1/2 when shifted).
pub fn exceeds_max_eigenvalue(w: Complex64, pi_a: &OperatorMatrix) -> Result<bool> {
    Ok(w.norm() > pi_a.eigen()?.max_value() + SPECTRUM_TOLERANCE)
}

/// Standard weak-value-amplification family: `(<f| ⊗ 1) U(θ) |i>|ψ>`.
pub fn postselected_family(
    cfg: &WeakValueConfig,
    spec: &InteractionSpec,
    psi_b: &StateVector,
) -> Result<ProbeFamily> {
    if cfg.pre.n_qubits() != 1 || cfg.post.n_qubits() != 1 || psi_b.n_qubits() != 1 {
        return Err(Error::InvalidConfig(
            "system and probe states must be single-qubit".into(),
        ));
    }
    ProbeFamily::interaction(spec, &cfg.pre, psi_b)?.then_project(cfg.post.clone(), &[0])
}

/// Renormalized postselected probe and the success probability `p_θ^PS`.
pub fn postselected_probe(
    cfg: &WeakValueConfig,
    spec: &InteractionSpec,
    psi_b: &StateVector,
) -> Result<PostselectionResult> {
    postselected_family(cfg, spec, psi_b)?.evaluate(spec.theta)
}

/// `1 / (N · I)`.
pub fn cramer_rao_bound(n_probes: u64, qfi: f64) -> Result<f64> {
    if n_probes == 0 {
        return Err(Error::InvalidConfig("number of probes must be at least 1".into()));
    }
    if !(qfi > 0.0) {
        return Err(Error::NonPositiveFisher(qfi));
    }
    Ok(1.0 / (n_probes as f64 * qfi))
}

/// Inputs `cos γ|0> ± sin γ|1>` of the σ_z/2 family.
pub fn gamma_inputs(gamma: f64) -> [StateVector; 2] {
    [StateVector::real_qubit(gamma), StateVector::real_qubit(-gamma)]
}

/// Closed form `(1/2)(cos γ - sin γ)/(cos γ + sin γ)` of the γ-family weak value.
pub fn gamma_weak_value(gamma: f64) -> f64 {
    0.5 * (gamma.cos() - gamma.sin()) / (gamma.cos() + gamma.sin())
}

/// Open interval of γ in which `|w(γ)| > 1`: `3π/4 ∓ arccot 2`.
pub fn anomalous_window() -> (f64, f64) {
    let half_width = 0.5f64.atan();
    let center = 0.75 * std::f64::consts::PI;
    (center - half_width, center + half_width)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn sz() -> OperatorMatrix {
        OperatorMatrix::pauli_z(OperatorKind::Hermitian)
    }

    fn sx() -> OperatorMatrix {
        OperatorMatrix::pauli_x(OperatorKind::Hermitian)
    }

    #[test]
    fn unitary_at_zero_is_identity() {
        let spec = InteractionSpec::rank_one(0.0, &StateVector::one(), sz()).unwrap();
        let u = interaction_unitary(&spec).unwrap();
        let dev = (u.matrix() - DMatrix::<Complex64>::identity(4, 4)).camax();
        assert!(dev < 1e-15);
    }

    #[test]
    fn unitary_diagonal_for_sigma_z() {
        let theta = 0.77;
        let spec = InteractionSpec::rank_one(theta, &StateVector::one(), sz()).unwrap();
        let u = interaction_unitary(&spec).unwrap();
        let diag = [
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::from_polar(1.0, -theta / 2.0),
            Complex64::from_polar(1.0, theta / 2.0),
        ];
        for (r, d) in diag.iter().enumerate() {
            for c in 0..4 {
                let expect = if r == c { *d } else { Complex64::new(0.0, 0.0) };
                assert_abs_diff_eq!((u.matrix()[(r, c)] - expect).norm(), 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn spec_rejects_bad_generators() {
        let two_z = sz().scaled(2.0).unwrap();
        assert!(matches!(
            InteractionSpec::rank_one(0.1, &StateVector::one(), two_z),
            Err(Error::InvalidGenerator(_))
        ));
        let half_z = sz().scaled(0.5).unwrap();
        assert!(InteractionSpec::new(0.1, half_z.clone(), sx(), GeneratorConvention::Projector).is_err());
        assert!(InteractionSpec::new(0.1, half_z, sx(), GeneratorConvention::ShiftedPauli).is_ok());
        assert!(InteractionSpec::shifted_sigma_z(f64::NAN, sx()).is_err());
    }

    #[test]
    fn optimal_probes() {
        let p = optimal_probe(&sz()).unwrap();
        assert_abs_diff_eq!(crate::statevec::fidelity_up_to_phase(&p, &StateVector::plus()).unwrap(), 1.0, epsilon = 1e-14);
        let p = optimal_probe(&sx()).unwrap();
        assert_abs_diff_eq!(crate::statevec::fidelity_up_to_phase(&p, &StateVector::zero()).unwrap(), 1.0, epsilon = 1e-14);
        assert!(matches!(
            optimal_probe(&OperatorMatrix::identity(1).as_kind(OperatorKind::Hermitian).unwrap()),
            Err(Error::InvalidGenerator(_))
        ));
    }

    #[test]
    fn weak_value_cases() {
        let pi = OperatorMatrix::projector_onto(&StateVector::one());
        let i = StateVector::real_qubit(0.4);
        let w = weak_value(&WeakValueConfig { pre: i.clone(), post: i.clone(), pi_a: pi.clone() }).unwrap();
        assert_abs_diff_eq!(w.re, 0.4f64.sin().powi(2), epsilon = 1e-15);
        assert!(matches!(
            weak_value(&WeakValueConfig { pre: StateVector::zero(), post: StateVector::one(), pi_a: pi }),
            Err(Error::OrthogonalPrePost(_))
        ));
    }

    #[test]
    fn gamma_weak_value_boundary_is_minus_one() {
        let (lo, hi) = anomalous_window();
        assert_abs_diff_eq!(gamma_weak_value(lo), -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(gamma_weak_value(hi), 1.0, epsilon = 1e-12);
        let half_z = sz().scaled(0.5).unwrap();
        let [i_plus, _] = gamma_inputs(lo);
        let w = weak_value(&WeakValueConfig { pre: i_plus, post: StateVector::plus(), pi_a: half_z.clone() }).unwrap();
        assert_abs_diff_eq!(w.re, -1.0, epsilon = 1e-12);
        assert!(!exceeds_max_eigenvalue(Complex64::new(0.4, 0.0), &half_z).unwrap());
        assert!(exceeds_max_eigenvalue(Complex64::new(0.6, 0.0), &half_z).unwrap());
        assert!(!is_anomalous(Complex64::new(0.6, 0.0)));
    }

    #[test]
    fn constant_family_has_zero_qfi() {
        let r = qfi_pure(|_| Ok(StateVector::plus()), 0.3, DEFAULT_FD_STEP).unwrap();
        assert_eq!(r.qfi, 0.0);
        assert!(qfi_pure(|_| Ok(StateVector::plus()), 0.3, 0.0).is_err());
    }

    #[test]
    fn optimal_probe_has_unit_qfi() {
        let spec = InteractionSpec::rank_one(0.3, &StateVector::one(), sx()).unwrap();
        let fam = ProbeFamily::interaction(&spec, &StateVector::one(), &optimal_probe(&sx()).unwrap()).unwrap();
        assert_abs_diff_eq!(fam.qfi(0.3).unwrap().qfi, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fam.qfi_finite_difference(0.3, DEFAULT_FD_STEP).unwrap().qfi, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn postselection_at_zero_coupling() {
        let spec = InteractionSpec::rank_one(0.0, &StateVector::one(), sz()).unwrap();
        let i = StateVector::real_qubit(1.1);
        let f = StateVector::plus();
        let psi = optimal_probe(&sz()).unwrap();
        let cfg = WeakValueConfig { pre: i.clone(), post: f.clone(), pi_a: spec.pi_a().clone() };
        let r = postselected_probe(&cfg, &spec, &psi).unwrap();
        assert_abs_diff_eq!(r.probability, f.inner(&i).unwrap().norm_sqr(), epsilon = 1e-15);
        assert_abs_diff_eq!(crate::statevec::fidelity_up_to_phase(&r.state, &psi).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn cramer_rao_arithmetic() {
        assert_eq!(cramer_rao_bound(1, 1.0).unwrap(), 1.0);
        assert_abs_diff_eq!(cramer_rao_bound(100, 4.0).unwrap(), 2.5e-3, epsilon = 1e-18);
        assert!(matches!(cramer_rao_bound(10, 0.0), Err(Error::NonPositiveFisher(_))));
        assert!(cramer_rao_bound(0, 1.0).is_err());
    }

    #[test]
    fn family_tracks_qubit_count() {
        let fam = ProbeFamily::new(
            StateVector::basis(3, 0).unwrap(),
            &OperatorMatrix::identity(2).as_kind(OperatorKind::Hermitian).unwrap(),
            &[0, 1],
        )
        .unwrap()
        .then_project(StateVector::zero(), &[0])
        .unwrap()
        .then_append(StateVector::plus())
        .unwrap();
        assert_eq!(fam.output_qubits(), 3);
        assert!(fam.clone().then_project(StateVector::zero(), &[3]).is_err());
        assert_abs_diff_eq!(fam.probability(PI), 1.0, epsilon = 1e-14);
    }
}
