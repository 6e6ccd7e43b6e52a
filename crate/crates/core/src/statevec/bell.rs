use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{kernel, StateVector, POSTSELECTION_THRESHOLD};
use crate::error::{Error, Result};

/// Bell-basis labels: `Φ± = (|00> ± |11>)/√2`, `Ψ± = (|01> ± |10>)/√2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BellLabel {
    #[serde(rename = "Φ+")]
    PhiPlus,
    #[serde(rename = "Φ-")]
    PhiMinus,
    #[serde(rename = "Ψ+")]
    PsiPlus,
    #[serde(rename = "Ψ-")]
    PsiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PhiPlus,
        BellLabel::PhiMinus,
        BellLabel::PsiPlus,
        BellLabel::PsiMinus,
    ];
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BellLabel::PhiPlus => "Φ+",
            BellLabel::PhiMinus => "Φ-",
            BellLabel::PsiPlus => "Ψ+",
            BellLabel::PsiMinus => "Ψ-",
        })
    }
}

impl FromStr for BellLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_lowercase().replace('⁺', "+").replace('⁻', "-");
        let (stem, sign) = t.split_at(t.len().saturating_sub(1));
        let plus = match sign {
            "+" => true,
            "-" => false,
            _ => return Err(Error::parse("accept", format!("unknown Bell outcome `{s}`"))),
        };
        match (stem, plus) {
            ("φ" | "phi", true) => Ok(BellLabel::PhiPlus),
            ("φ" | "phi", false) => Ok(BellLabel::PhiMinus),
            ("ψ" | "psi", true) => Ok(BellLabel::PsiPlus),
            ("ψ" | "psi", false) => Ok(BellLabel::PsiMinus),
            _ => Err(Error::parse("accept", format!("unknown Bell outcome `{s}`"))),
        }
    }
}

pub fn bell_state(label: BellLabel) -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (a, b, c, d) = match label {
        BellLabel::PhiPlus => (h, 0.0, 0.0, h),
        BellLabel::PhiMinus => (h, 0.0, 0.0, -h),
        BellLabel::PsiPlus => (0.0, h, h, 0.0),
        BellLabel::PsiMinus => (0.0, h, -h, 0.0),
    };
    StateVector::from_trusted(
        [a, b, c, d]
            .into_iter()
            .map(|x| Complex64::new(x, 0.0))
            .collect(),
    )
}

pub fn bell_states() -> [(BellLabel, StateVector); 4] {
    BellLabel::ALL.map(|l| (l, bell_state(l)))
}

/// One outcome of a projective measurement; `state` is `None` for
/// degenerate (sub-threshold) branches.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementBranch {
    pub probability: f64,
    pub state: Option<StateVector>,
}

/// Enumerates every outcome of measuring `targets` in an orthonormal basis.
pub fn measure(
    state: &StateVector,
    basis: &[StateVector],
    targets: &[usize],
) -> Result<Vec<MeasurementBranch>> {
    kernel::validate_targets(state.n_qubits(), targets)?;
    basis
        .iter()
        .map(|bra| {
            if bra.n_qubits() != targets.len() {
                return Err(Error::InvalidTargets(format!(
                    "{}-qubit basis vector on {} targets",
                    bra.n_qubits(),
                    targets.len()
                )));
            }
            let residual = kernel::contract(
                state.amplitudes(),
                state.n_qubits(),
                bra.amplitudes(),
                targets,
            );
            let probability = kernel::norm_sqr(&residual);
            let state = (probability >= POSTSELECTION_THRESHOLD).then(|| {
                let n = probability.sqrt();
                StateVector::from_trusted(residual.into_iter().map(|a| a / n).collect())
            });
            Ok(MeasurementBranch { probability, state })
        })
        .collect()
}

/// Bell measurement of two target qubits, outcomes in `BellLabel::ALL` order.
pub fn bell_measure(
    state: &StateVector,
    targets: &[usize],
) -> Result<Vec<(BellLabel, MeasurementBranch)>> {
    if targets.len() != 2 {
        return Err(Error::InvalidTargets(format!(
            "Bell measurement needs 2 targets, got {}",
            targets.len()
        )));
    }
    let basis: Vec<StateVector> = BellLabel::ALL.iter().map(|&l| bell_state(l)).collect();
    let branches = measure(state, &basis, targets)?;
    Ok(BellLabel::ALL.into_iter().zip(branches).collect())
}
