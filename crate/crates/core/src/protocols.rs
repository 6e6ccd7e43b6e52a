//! Executable weak-value-amplification experiments with exact branch
//! enumeration.
//!
//! Register layout for the teleportation protocol: the interaction acts on
//! (A, B); A is entangled with C at the start; D is created after A is
//! measured, in the input state keyed to A's outcome; (C, D) is then
//! Bell-measured. Every outcome combination is kept as a branch, including
//! rejected ones.

use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrology::{
    gamma_inputs, optimal_probe, probe_readout_basis, weak_value, FisherReport,
    GeneratorConvention, InteractionSpec, ProbeFamily, WeakValueConfig,
};
use crate::statevec::{
    bell_state, tensor, BellLabel, OperatorKind, OperatorMatrix, Propagator, StateVector,
    NORM_TOLERANCE, POSTSELECTION_THRESHOLD,
};

/// Relative tolerance when asserting `|w(i+, f+)| = |w(i-, f-)|`.
pub const WEAK_VALUE_MATCH_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    Standard,
    Pctc,
    Boosted,
    Retro,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 4] = [
        ProtocolKind::Standard,
        ProtocolKind::Pctc,
        ProtocolKind::Boosted,
        ProtocolKind::Retro,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProtocolKind::Standard => "standard",
            ProtocolKind::Pctc => "pctc",
            ProtocolKind::Boosted => "boosted",
            ProtocolKind::Retro => "retro",
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProtocolKind::ALL
            .into_iter()
            .find(|p| p.as_str() == s.trim().to_lowercase())
            .ok_or_else(|| Error::parse("protocol", format!("unknown protocol `{s}`")))
    }
}

/// Inputs shared by the weak-value protocols.
#[derive(Clone, Debug)]
pub struct ProtocolConfig {
    pub interaction: InteractionSpec,
    pub i_plus: StateVector,
    pub i_minus: StateVector,
    /// `[|f+>, |f->]`; `|f+>` is the postselected outcome of the standard protocol.
    pub f_basis: [StateVector; 2],
    pub gamma: Option<f64>,
    pub accepted_bell_outcomes: BTreeSet<BellLabel>,
}

impl ProtocolConfig {
    pub fn new(
        interaction: InteractionSpec,
        i_plus: StateVector,
        i_minus: StateVector,
        f_basis: [StateVector; 2],
    ) -> Result<Self> {
        for s in [&i_plus, &i_minus, &f_basis[0], &f_basis[1]] {
            if s.n_qubits() != 1 {
                return Err(Error::InvalidConfig(
                    "system inputs and postselection basis must be single-qubit".into(),
                ));
            }
        }
        let overlap = f_basis[0].inner(&f_basis[1])?.norm();
        if overlap > NORM_TOLERANCE {
            return Err(Error::InvalidConfig(format!(
                "postselection basis is not orthonormal (|<f+|f->| = {overlap:e})"
            )));
        }
        Ok(Self {
            interaction,
            i_plus,
            i_minus,
            f_basis,
            gamma: None,
            accepted_bell_outcomes: BTreeSet::from([BellLabel::PhiPlus]),
        })
    }

    /// `Π_a = σ_z/2`, `{|f±>} = {|±>}`, `|i±> = cos γ|0> ± sin γ|1>`.
    pub fn gamma_family(gamma: f64, theta: f64, b_op: OperatorMatrix) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::InvalidConfig(format!("gamma must be finite, got {gamma}")));
        }
        let interaction = InteractionSpec::shifted_sigma_z(theta, b_op)?;
        let [i_plus, i_minus] = gamma_inputs(gamma);
        let mut cfg = Self::new(
            interaction,
            i_plus,
            i_minus,
            [StateVector::plus(), StateVector::minus()],
        )?;
        cfg.gamma = Some(gamma);
        Ok(cfg)
    }

    /// Completes `(|i+>, |f+>)` with `|i-> = V|i+>`, `|f-> = V|f+>` where `V`
    /// is the reflection `Π_1 - Π_0` about the eigenbasis of `Π_a`.
    ///
    /// `V` commutes with the interaction, so both keyed branches share the
    /// same weak value and postselection probability at every θ. Requires
    /// `|f+>` unbiased with respect to that eigenbasis.
    pub fn mirrored(interaction: InteractionSpec, i_plus: StateVector, f_plus: StateVector) -> Result<Self> {
        let v = pi_reflection(interaction.pi_a())?;
        let f_minus = apply_single(&v, &f_plus)?;
        let bias = f_plus.inner(&f_minus)?.norm();
        if bias > NORM_TOLERANCE {
            return Err(Error::InvalidConfig(format!(
                "|f+> is not unbiased with respect to the eigenbasis of Π_a (|<f+|V|f+>| = {bias:e})"
            )));
        }
        let i_minus = apply_single(&v, &i_plus)?;
        Self::new(interaction, i_plus, i_minus, [f_plus, f_minus])
    }

    pub fn with_accepted(mut self, accepted: impl IntoIterator<Item = BellLabel>) -> Self {
        self.accepted_bell_outcomes = accepted.into_iter().collect();
        self
    }

    pub fn theta(&self) -> f64 {
        self.interaction.theta
    }

    /// Optimal probe `(|b+> + |b->)/√2` for the configured `B`.
    pub fn probe(&self) -> Result<StateVector> {
        optimal_probe(self.interaction.b_op())
    }

    fn inputs(&self) -> [&StateVector; 2] {
        [&self.i_plus, &self.i_minus]
    }
}

/// `(|a> + e^{iφ}|a⊥>)/√2` for the eigenbasis `{|a⊥>, |a>}` of `Π_a`: a
/// postselection state unbiased with respect to `Π_a`.
pub fn unbiased_postselection(pi_a: &OperatorMatrix, phase: f64) -> Result<StateVector> {
    let spectrum = pi_a.eigen()?;
    let low = spectrum.vector(0);
    let high = spectrum.vector(1);
    let p = Complex64::from_polar(1.0, phase);
    StateVector::normalized(
        high.amplitudes()
            .iter()
            .zip(low.amplitudes())
            .map(|(h, l)| h + p * l)
            .collect(),
    )
}

fn pi_reflection(pi_a: &OperatorMatrix) -> Result<OperatorMatrix> {
    let spectrum = pi_a.eigen()?;
    let high = OperatorMatrix::projector_onto(&spectrum.vector(1));
    let low = OperatorMatrix::projector_onto(&spectrum.vector(0));
    OperatorMatrix::unitary(high.matrix() - low.matrix())
}

fn apply_single(op: &OperatorMatrix, s: &StateVector) -> Result<StateVector> {
    crate::statevec::apply_unitary(s, op, &[0])
}

/// Pauli correction left on A when (C, D) is projected onto `label`:
/// `{1, Z, X, XZ}` for `{Φ+, Φ-, Ψ+, Ψ-}` (up to global phase).
pub fn teleportation_correction(label: BellLabel) -> OperatorMatrix {
    let x = OperatorMatrix::pauli_x(OperatorKind::Unitary);
    let z = OperatorMatrix::pauli_z(OperatorKind::Unitary);
    match label {
        BellLabel::PhiPlus => OperatorMatrix::identity(1),
        BellLabel::PhiMinus => z,
        BellLabel::PsiPlus => x,
        BellLabel::PsiMinus => OperatorMatrix::unitary(x.matrix() * z.matrix())
            .expect("product of Paulis is unitary"),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchLabel {
    /// Outcome of the measured system qubit (`f+`, `f-`) or, for the
    /// retro-probe protocol, of the ancilla (`n+`, `n-`).
    pub system: String,
    pub bell: Option<BellLabel>,
}

impl fmt::Display for BranchLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.bell {
            Some(b) => write!(f, "{}/{}", self.system, b),
            None => f.write_str(&self.system),
        }
    }
}

/// One measurement-outcome combination.
#[derive(Clone, Debug)]
pub struct Branch {
    pub label: BranchLabel,
    pub probability: f64,
    pub accepted: bool,
    /// Renormalized probe state; `None` for degenerate branches.
    pub probe_state: Option<StateVector>,
    pub weak_value: Option<Complex64>,
    pub fisher: Option<FisherReport>,
    family: ProbeFamily,
}

impl Branch {
    fn build(
        label: BranchLabel,
        family: ProbeFamily,
        theta: f64,
        accepted: bool,
        weak_value: Option<Complex64>,
    ) -> Result<Self> {
        let probability = family.probability(theta);
        let (probe_state, fisher) = if probability >= POSTSELECTION_THRESHOLD {
            let mut report = family.qfi(theta)?;
            report.weak_value_sq = weak_value.map(|w| w.norm_sqr());
            (Some(family.state(theta)?), Some(report))
        } else {
            (None, None)
        };
        Ok(Self {
            label,
            probability,
            accepted,
            probe_state,
            weak_value,
            fisher,
            family,
        })
    }

    /// θ ↦ this branch's (unnormalized) probe amplitudes.
    pub fn family(&self) -> &ProbeFamily {
        &self.family
    }

    pub fn is_degenerate(&self) -> bool {
        self.probe_state.is_none()
    }
}

#[derive(Clone, Debug)]
pub struct ProtocolOutcome {
    pub protocol: ProtocolKind,
    pub theta: f64,
    pub branches: Vec<Branch>,
    pub success_probability: f64,
    /// Basis the retained probe is read out in.
    pub readout_basis: [StateVector; 2],
}

impl ProtocolOutcome {
    fn assemble(
        protocol: ProtocolKind,
        theta: f64,
        branches: Vec<Branch>,
        readout_basis: [StateVector; 2],
    ) -> Result<Self> {
        let success_probability = if branches.iter().all(|b| b.accepted) {
            1.0
        } else {
            branches
                .iter()
                .filter(|b| b.accepted)
                .map(|b| b.probability)
                .sum()
        };
        if !(success_probability >= POSTSELECTION_THRESHOLD) {
            let labels: Vec<String> = branches
                .iter()
                .filter(|b| b.accepted)
                .map(|b| b.label.to_string())
                .collect();
            return Err(Error::DegenerateBranches {
                branches: labels.join(", "),
                probability: success_probability,
            });
        }
        Ok(Self {
            protocol,
            theta,
            branches,
            success_probability,
            readout_basis,
        })
    }

    pub fn accepted(&self) -> impl Iterator<Item = &Branch> {
        self.branches.iter().filter(|b| b.accepted)
    }

    /// First accepted branch with nonzero probability.
    pub fn primary_branch(&self) -> Option<&Branch> {
        self.accepted().find(|b| !b.is_degenerate())
    }

    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }
}

fn system_label(k: usize) -> String {
    if k == 0 { "f+" } else { "f-" }.to_string()
}

fn weak_value_or_none(pre: &StateVector, post: &StateVector, pi_a: &OperatorMatrix) -> Result<Option<Complex64>> {
    match weak_value(&WeakValueConfig {
        pre: pre.clone(),
        post: post.clone(),
        pi_a: pi_a.clone(),
    }) {
        Ok(w) => Ok(Some(w)),
        Err(Error::OrthogonalPrePost(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Conventional weak-value amplification: prepare `|i+>`, interact, measure
/// A in `{|f+>, |f->}` and keep the probe only on `f+`.
pub fn run_standard_wva(cfg: &ProtocolConfig) -> Result<ProtocolOutcome> {
    let spec = &cfg.interaction;
    let probe = cfg.probe()?;
    let base = ProbeFamily::interaction(spec, &cfg.i_plus, &probe)?;
    let branches = cfg
        .f_basis
        .iter()
        .enumerate()
        .map(|(k, f)| {
            let family = base.clone().then_project(f.clone(), &[0])?;
            let w = weak_value_or_none(&cfg.i_plus, f, spec.pi_a())?;
            Branch::build(
                BranchLabel { system: system_label(k), bell: None },
                family,
                spec.theta,
                k == 0,
                w,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    ProtocolOutcome::assemble(
        ProtocolKind::Standard,
        spec.theta,
        branches,
        probe_readout_basis(spec.b_op())?,
    )
}

fn check_weak_value_symmetry(cfg: &ProtocolConfig) -> Result<()> {
    let pi = cfg.interaction.pi_a();
    let wp = weak_value_or_none(&cfg.i_plus, &cfg.f_basis[0], pi)?;
    let wm = weak_value_or_none(&cfg.i_minus, &cfg.f_basis[1], pi)?;
    if let (Some(wp), Some(wm)) = (wp, wm) {
        let scale = wp.norm().max(wm.norm()).max(1.0);
        if (wp.norm() - wm.norm()).abs() > WEAK_VALUE_MATCH_TOLERANCE * scale {
            return Err(Error::InvalidConfig(format!(
                "keyed inputs give unequal weak-value magnitudes: |w+| = {}, |w-| = {}",
                wp.norm(),
                wm.norm()
            )));
        }
    }
    Ok(())
}

fn pctc_outcome(cfg: &ProtocolConfig, protocol: ProtocolKind) -> Result<ProtocolOutcome> {
    check_weak_value_symmetry(cfg)?;
    let spec = &cfg.interaction;
    let probe = cfg.probe()?;
    // t0: |Φ+>_{A,C} |ψ>_B, reordered to (A, B, C).
    let t0 = tensor(&bell_state(BellLabel::PhiPlus), &probe)?.permute(&[0, 2, 1])?;
    // t1: interaction on (A, B).
    let evolved = ProbeFamily::new(t0, &spec.generator(), &[0, 1])?;

    let mut branches = Vec::with_capacity(8);
    for (k, (f, input)) in cfg.f_basis.iter().zip(cfg.inputs()).enumerate() {
        // t2: A measured in {|f±>}; t3: D created in |i±> keyed to the outcome.
        let keyed = evolved
            .clone()
            .then_project(f.clone(), &[0])?
            .then_append(input.clone())?;
        for label in BellLabel::ALL {
            // t4: Bell measurement of (C, D); t5: accept on the chosen outcomes.
            let family = keyed.clone().then_project(bell_state(label), &[1, 2])?;
            let effective = apply_single(&teleportation_correction(label), input)?;
            let w = weak_value_or_none(&effective, f, spec.pi_a())?;
            branches.push(Branch::build(
                BranchLabel { system: system_label(k), bell: Some(label) },
                family,
                spec.theta,
                cfg.accepted_bell_outcomes.contains(&label),
                w,
            )?);
        }
    }
    ProtocolOutcome::assemble(protocol, spec.theta, branches, probe_readout_basis(spec.b_op())?)
}

/// Teleportation-based protocol: the system input is created after the
/// interaction and effectively sent back to it through a Bell
/// postselection. Branches enumerate (A outcome × Bell outcome).
pub fn run_pctc_wva(cfg: &ProtocolConfig) -> Result<ProtocolOutcome> {
    if cfg.accepted_bell_outcomes.is_empty() {
        return Err(Error::InvalidConfig("no accepted Bell outcomes".into()));
    }
    pctc_outcome(cfg, ProtocolKind::Pctc)
}

fn is_half_sigma_z(op: &OperatorMatrix) -> bool {
    let expect = OperatorMatrix::pauli_z(OperatorKind::Hermitian).matrix() * Complex64::new(0.5, 0.0);
    op.k_qubits() == 1
        && op
            .matrix()
            .iter()
            .zip(expect.iter())
            .all(|(a, b)| (a - b).norm() < NORM_TOLERANCE)
}

/// The teleportation protocol on the γ family, accepting both `Φ+` and `Ψ+`.
pub fn run_boosted_pctc(gamma: f64, spec: &InteractionSpec) -> Result<ProtocolOutcome> {
    if spec.convention() != GeneratorConvention::ShiftedPauli || !is_half_sigma_z(spec.pi_a()) {
        return Err(Error::InvalidConfig(
            "boosted protocol requires Π_a = σ_z/2".into(),
        ));
    }
    let cfg = ProtocolConfig::gamma_family(gamma, spec.theta, spec.b_op().clone())?
        .with_accepted([BellLabel::PhiPlus, BellLabel::PsiPlus]);
    pctc_outcome(&cfg, ProtocolKind::Boosted)
}

/// Eigenbasis `[|n^0>, |n^1>]` of `σ⃗·n̂` (eigenvalues -1, +1).
pub fn axis_eigenbasis(n_hat: [f64; 3]) -> Result<[StateVector; 2]> {
    let norm = n_hat.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::InvalidConfig(format!(
            "n_hat must be a unit vector, |n| = {norm}"
        )));
    }
    let spectrum = OperatorMatrix::pauli_dot(n_hat).eigen()?;
    Ok([spectrum.vector(0), spectrum.vector(1)])
}

/// `[|n+>, |n->]` with `|n±> = (|n^0> ± |n^1>)/√2`.
pub fn axis_probe_basis(n_hat: [f64; 3]) -> Result<[StateVector; 2]> {
    let [n0, n1] = axis_eigenbasis(n_hat)?;
    let combine = |sign: f64| {
        StateVector::normalized(
            n0.amplitudes()
                .iter()
                .zip(n1.amplitudes())
                .map(|(a, b)| a + b * sign)
                .collect(),
        )
    };
    Ok([combine(1.0)?, combine(-1.0)?])
}

/// `exp(-iθ σ⃗·n̂ / 2)`.
pub fn axis_rotation(n_hat: [f64; 3], theta: f64) -> Result<OperatorMatrix> {
    axis_eigenbasis(n_hat)?;
    Propagator::new(&OperatorMatrix::pauli_dot(n_hat).scaled(0.5)?)?.unitary(theta)
}

/// Singlet-assisted probe preparation: A of `|Ψ->_{A,B}` passes the unknown
/// rotation, then B is measured in `{|n±>}`. Both outcomes are kept.
pub fn run_retro_probe(n_hat: [f64; 3], theta: f64) -> Result<ProtocolOutcome> {
    if !theta.is_finite() {
        return Err(Error::InvalidConfig(format!("theta must be finite, got {theta}")));
    }
    let basis = axis_probe_basis(n_hat)?;
    let generator = OperatorMatrix::pauli_dot(n_hat).scaled(0.5)?;
    let singlet = bell_state(BellLabel::PsiMinus);
    let evolved = ProbeFamily::new(singlet, &generator, &[0])?;
    let branches = basis
        .iter()
        .zip(["n+", "n-"])
        .map(|(b, name)| {
            Branch::build(
                BranchLabel { system: name.to_string(), bell: None },
                evolved.clone().then_project(b.clone(), &[1])?,
                theta,
                true,
                None,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    ProtocolOutcome::assemble(ProtocolKind::Retro, theta, branches, basis)
}

/// `‖(<f| ⊗ 1) U(θ) |i>|ψ>‖²` for the optimal probe, by 2×2 algebra:
/// `(1/2) Σ_{λ=±1} |<f| exp(-iθλΠ_a/2) |i>|²`.
pub fn postselection_probability_closed_form(
    spec: &InteractionSpec,
    pre: &StateVector,
    post: &StateVector,
) -> Result<f64> {
    let prop = Propagator::new(&spec.pi_a().scaled(0.5)?)?;
    let mut total = 0.0;
    for lambda in [1.0, -1.0] {
        let u = prop.unitary(spec.theta * lambda)?;
        total += u.matrix_element(post, pre)?.norm_sqr();
    }
    Ok(0.5 * total)
}

/// Success probability of the teleportation protocol in closed form:
/// each accepted Bell outcome β contributes
/// `(1/4) Σ_± p^PS(θ; P_β|i±>, |f±>)`, reducing to `(1/2)|<i+|f+>|²` at θ → 0.
pub fn success_probability_analytic(cfg: &ProtocolConfig) -> Result<f64> {
    let mut total = 0.0;
    for &label in &cfg.accepted_bell_outcomes {
        let correction = teleportation_correction(label);
        for (f, input) in cfg.f_basis.iter().zip(cfg.inputs()) {
            let effective = apply_single(&correction, input)?;
            total += 0.25 * postselection_probability_closed_form(&cfg.interaction, &effective, f)?;
        }
    }
    Ok(total)
}

/// Weak-coupling limit `(1/2)|<i+|f+>|²` per accepted Bell outcome.
pub fn success_probability_weak_limit(cfg: &ProtocolConfig) -> Result<f64> {
    let overlap = cfg.i_plus.inner(&cfg.f_basis[0])?.norm_sqr();
    Ok(0.5 * overlap * cfg.accepted_bell_outcomes.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevec::fidelity_up_to_phase;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn sz() -> OperatorMatrix {
        OperatorMatrix::pauli_z(OperatorKind::Hermitian)
    }

    #[test]
    fn standard_trivial_postselection() {
        let spec = InteractionSpec::rank_one(0.0, &StateVector::one(), sz()).unwrap();
        let i = StateVector::plus();
        let cfg = ProtocolConfig::new(spec, i.clone(), i.clone(), [StateVector::plus(), StateVector::minus()]).unwrap();
        let out = run_standard_wva(&cfg).unwrap();
        assert_abs_diff_eq!(out.success_probability, 1.0, epsilon = 1e-15);
        let probe = out.primary_branch().unwrap().probe_state.as_ref().unwrap();
        assert_abs_diff_eq!(fidelity_up_to_phase(probe, &StateVector::plus()).unwrap(), 1.0, epsilon = 1e-15);
        assert!(out.branches[1].is_degenerate());
        assert_eq!(out.branches.len(), 2);
    }

    #[test]
    fn standard_orthogonal_postselection_is_degenerate() {
        let spec = InteractionSpec::rank_one(0.0, &StateVector::one(), sz()).unwrap();
        let cfg = ProtocolConfig::new(spec, StateVector::plus(), StateVector::plus(), [StateVector::minus(), StateVector::plus()]).unwrap();
        assert!(matches!(run_standard_wva(&cfg), Err(Error::DegenerateBranches { .. })));
    }

    #[test]
    fn config_rejects_non_orthonormal_basis() {
        let spec = InteractionSpec::rank_one(0.1, &StateVector::one(), sz()).unwrap();
        let r = ProtocolConfig::new(spec, StateVector::plus(), StateVector::plus(), [StateVector::plus(), StateVector::zero()]);
        assert!(matches!(r, Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn pctc_rejects_unequal_weak_values() {
        let spec = InteractionSpec::shifted_sigma_z(0.01, sz()).unwrap();
        let cfg = ProtocolConfig::new(
            spec,
            StateVector::real_qubit(2.0),
            StateVector::real_qubit(0.3),
            [StateVector::plus(), StateVector::minus()],
        )
        .unwrap();
        assert!(matches!(run_pctc_wva(&cfg), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn pctc_branch_count_and_completeness() {
        let cfg = ProtocolConfig::gamma_family(2.0, 0.05, sz()).unwrap();
        let out = run_pctc_wva(&cfg).unwrap();
        assert_eq!(out.branches.len(), 8);
        assert_abs_diff_eq!(out.total_probability(), 1.0, epsilon = 1e-12);
        assert_eq!(out.accepted().count(), 2);
    }

    #[test]
    fn boosted_requires_half_sigma_z() {
        let spec = InteractionSpec::rank_one(0.01, &StateVector::one(), sz()).unwrap();
        assert!(matches!(run_boosted_pctc(2.0, &spec), Err(Error::InvalidConfig(_))));
        let spec = InteractionSpec::shifted_sigma_z(0.01, sz()).unwrap();
        assert!(run_boosted_pctc(2.0, &spec).is_ok());
    }

    #[test]
    fn analytic_success_at_gamma_half_pi() {
        let cfg = ProtocolConfig::gamma_family(PI / 2.0, 0.2, sz()).unwrap();
        assert_abs_diff_eq!(success_probability_analytic(&cfg).unwrap(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(success_probability_weak_limit(&cfg).unwrap(), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn retro_rejects_non_unit_axis() {
        assert!(matches!(run_retro_probe([0.0, 0.0, 2.0], 0.1), Err(Error::InvalidConfig(_))));
        assert!(run_retro_probe([0.0, 0.0, f64::NAN], 0.1).is_err());
    }

    #[test]
    fn retro_success_is_exactly_one() {
        let out = run_retro_probe([0.0, 0.0, 1.0], 0.1).unwrap();
        assert_eq!(out.success_probability, 1.0);
        for b in &out.branches {
            assert_abs_diff_eq!(b.probability, 0.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn mirrored_requires_unbiased_postselection() {
        let spec = InteractionSpec::rank_one(0.1, &StateVector::one(), sz()).unwrap();
        assert!(ProtocolConfig::mirrored(spec.clone(), StateVector::plus(), StateVector::zero()).is_err());
        let f = unbiased_postselection(spec.pi_a(), 0.7).unwrap();
        let cfg = ProtocolConfig::mirrored(spec, StateVector::real_qubit(0.2), f).unwrap();
        assert!(cfg.f_basis[0].inner(&cfg.f_basis[1]).unwrap().norm() < 1e-12);
    }

    #[test]
    fn protocol_kind_parses() {
        assert_eq!("PCTC".parse::<ProtocolKind>().unwrap(), ProtocolKind::Pctc);
        assert!("teleport".parse::<ProtocolKind>().is_err());
    }
}
