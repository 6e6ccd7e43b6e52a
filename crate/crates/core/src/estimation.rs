//! Seeded shot sampling, maximum-likelihood estimation of θ and empirical
//! Cramér–Rao studies.
//!
//! Trial `t` of a study draws from its own ChaCha8 stream seeded with
//! `seed + t`, so trials run in parallel and reproduce exactly.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrology::{cramer_rao_bound, ProbeFamily};
use crate::protocols::{run_standard_wva, ProtocolConfig, ProtocolOutcome};
use crate::statevec::{StateVector, NORM_TOLERANCE};

/// Grid points used to bracket the likelihood maximum.
pub const MLE_GRID_POINTS: usize = 2001;

/// Width of the final golden-section bracket.
pub const MLE_RESOLUTION: f64 = 1e-10;

/// A named two-outcome projective measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementBasis {
    pub name: String,
    pub states: [StateVector; 2],
    pub labels: [String; 2],
}

impl MeasurementBasis {
    pub fn new(name: impl Into<String>, states: [StateVector; 2]) -> Result<Self> {
        if states[0].dim() != states[1].dim() {
            return Err(Error::DimensionMismatch {
                expected: states[0].dim(),
                found: states[1].dim(),
            });
        }
        let overlap = states[0].inner(&states[1])?.norm();
        if overlap > NORM_TOLERANCE {
            return Err(Error::InvalidConfig(format!(
                "measurement basis is not orthonormal (|<0|1>| = {overlap:e})"
            )));
        }
        Ok(Self {
            name: name.into(),
            states,
            labels: ["+".to_string(), "-".to_string()],
        })
    }

    /// Born probabilities of both outcomes.
    pub fn probabilities(&self, probe: &StateVector) -> Result<[f64; 2]> {
        let p0 = self.states[0].inner(probe)?.norm_sqr();
        let p1 = self.states[1].inner(probe)?.norm_sqr();
        Ok([p0, p1])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub n_shots: u64,
    pub counts: BTreeMap<String, u64>,
    pub seed: u64,
    pub basis: String,
    /// Outcome labels in basis order.
    pub labels: Vec<String>,
}

impl ShotRecord {
    /// Counts in basis order.
    pub fn ordered_counts(&self) -> Vec<u64> {
        self.labels
            .iter()
            .map(|l| self.counts.get(l).copied().unwrap_or(0))
            .collect()
    }
}

/// Draws `n_shots` outcomes of measuring `probe` in `basis`.
pub fn sample_shots(
    probe: &StateVector,
    basis: &MeasurementBasis,
    n_shots: u64,
    seed: u64,
) -> Result<ShotRecord> {
    if n_shots == 0 {
        return Err(Error::InvalidConfig("n_shots must be at least 1".into()));
    }
    let [p0, _] = basis.probabilities(probe)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Binomial::new(n_shots, p0.clamp(0.0, 1.0))
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let first = dist.sample(&mut rng);
    let counts = BTreeMap::from([
        (basis.labels[0].clone(), first),
        (basis.labels[1].clone(), n_shots - first),
    ]);
    Ok(ShotRecord {
        n_shots,
        counts,
        seed,
        basis: basis.name.clone(),
        labels: basis.labels.to_vec(),
    })
}

fn log_likelihood(counts: &[u64], probs: &[f64]) -> f64 {
    counts
        .iter()
        .zip(probs)
        .filter(|(&n, _)| n > 0)
        .map(|(&n, &p)| n as f64 * p.max(1e-300).ln())
        .sum()
}

/// Maximum-likelihood θ on `interval`: grid search followed by
/// golden-section refinement.
pub fn mle_theta<M>(record: &ShotRecord, model: M, interval: (f64, f64)) -> Result<f64>
where
    M: Fn(f64) -> Result<Vec<f64>>,
{
    let (lo, hi) = interval;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "search interval ({lo}, {hi}) is empty or unbounded"
        )));
    }
    let counts = record.ordered_counts();
    let ll = |theta: f64| -> Result<f64> { Ok(log_likelihood(&counts, &model(theta)?)) };

    let step = (hi - lo) / MLE_GRID_POINTS as f64;
    let grid: Vec<f64> = (0..MLE_GRID_POINTS)
        .map(|j| lo + step * (j as f64 + 0.5))
        .collect();
    let values = grid.iter().map(|&t| ll(t)).collect::<Result<Vec<f64>>>()?;
    let (best, &max) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is non-empty");
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if (max - min).abs() <= 1e-12 * max.abs().max(1.0) {
        return Err(Error::NonIdentifiable);
    }

    // Golden-section search for the maximum inside the neighbouring cells.
    let mut a = (grid[best] - step).max(lo);
    let mut b = (grid[best] + step).min(hi);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = ll(c)?;
    let mut fd = ll(d)?;
    while b - a > MLE_RESOLUTION {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = ll(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = ll(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceReport {
    pub theta_true: f64,
    pub estimates: Vec<f64>,
    pub mean_estimate: f64,
    pub empirical_variance: f64,
    /// `1 / (N_retained · QFI)`.
    pub cr_bound: f64,
    /// `empirical_variance / cr_bound`.
    pub ratio: f64,
    /// Exact QFI of the retained probe at `theta_true`.
    pub qfi: f64,
    /// Retained (measured) probes per trial.
    pub shots_per_trial: u64,
    pub n_trials: u64,
    pub seed: u64,
    /// Fraction of prepared probes that are retained.
    pub success_probability: f64,
    /// `1 / (empirical_variance · N_retained)`.
    pub information_per_probe: f64,
}

/// Default MLE interval: the half-period on the side of `theta_true`,
/// `(0, π/|w|)` or `(-π/|w|, 0)`, capped at width 2π.
pub fn default_interval(theta_true: f64, weak_value_magnitude: Option<f64>) -> (f64, f64) {
    let scale = weak_value_magnitude.unwrap_or(1.0);
    let width = (std::f64::consts::PI / scale).min(2.0 * std::f64::consts::PI);
    if theta_true >= 0.0 {
        (0.0, width)
    } else {
        (-width, 0.0)
    }
}

/// Repeated sampling + MLE on the first accepted branch of `outcome`.
pub fn variance_study(
    outcome: &ProtocolOutcome,
    theta_true: f64,
    n_trials: u64,
    shots_per_trial: u64,
    seed: u64,
) -> Result<VarianceReport> {
    let branch = outcome.primary_branch().ok_or(Error::NoAcceptedBranch)?;
    let interval = default_interval(theta_true, branch.weak_value.map(|w| w.norm()));
    variance_study_in(outcome, theta_true, n_trials, shots_per_trial, seed, interval)
}

/// [`variance_study`] with an explicit MLE search interval.
pub fn variance_study_in(
    outcome: &ProtocolOutcome,
    theta_true: f64,
    n_trials: u64,
    shots_per_trial: u64,
    seed: u64,
    interval: (f64, f64),
) -> Result<VarianceReport> {
    let branch = outcome.primary_branch().ok_or(Error::NoAcceptedBranch)?;
    let basis = MeasurementBasis::new("probe readout", outcome.readout_basis.clone())?;
    study_family(
        branch.family(),
        &basis,
        theta_true,
        n_trials,
        shots_per_trial,
        seed,
        interval,
        outcome.success_probability,
    )
}

/// Variance study on an arbitrary probe family read out in `basis`, with
/// every prepared probe retained.
pub fn variance_study_family(
    family: &ProbeFamily,
    basis: &MeasurementBasis,
    theta_true: f64,
    n_trials: u64,
    shots_per_trial: u64,
    seed: u64,
    interval: (f64, f64),
) -> Result<VarianceReport> {
    study_family(family, basis, theta_true, n_trials, shots_per_trial, seed, interval, 1.0)
}

#[allow(clippy::too_many_arguments)]
fn study_family(
    family: &ProbeFamily,
    basis: &MeasurementBasis,
    theta_true: f64,
    n_trials: u64,
    shots_per_trial: u64,
    seed: u64,
    interval: (f64, f64),
    success_probability: f64,
) -> Result<VarianceReport> {
    if n_trials < 2 {
        return Err(Error::InvalidConfig("a variance study needs at least 2 trials".into()));
    }
    let probe = family.state(theta_true)?;
    let qfi = family.qfi(theta_true)?.qfi;
    let cr_bound = cramer_rao_bound(shots_per_trial, qfi)?;
    let model = |theta: f64| -> Result<Vec<f64>> {
        Ok(basis.probabilities(&family.state(theta)?)?.to_vec())
    };

    let estimates = (0..n_trials)
        .into_par_iter()
        .map(|t| {
            let record = sample_shots(&probe, basis, shots_per_trial, seed.wrapping_add(t))?;
            mle_theta(&record, model, interval)
        })
        .collect::<Result<Vec<f64>>>()?;

    let n = estimates.len() as f64;
    let mean_estimate = estimates.iter().sum::<f64>() / n;
    let empirical_variance =
        estimates.iter().map(|x| (x - mean_estimate).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(VarianceReport {
        theta_true,
        mean_estimate,
        empirical_variance,
        cr_bound,
        ratio: empirical_variance / cr_bound,
        qfi,
        shots_per_trial,
        n_trials,
        seed,
        success_probability,
        information_per_probe: 1.0 / (empirical_variance * shots_per_trial as f64),
        estimates,
    })
}

/// Fisher-information bookkeeping for standard weak-value amplification.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InformationBudget {
    /// `p^PS · QFI` of the retained probe.
    pub postselected: f64,
    /// `Σ_k p_k · QFI_k` over every A outcome.
    pub all_branches: f64,
    /// QFI of the joint (A, B) state without postselection.
    pub nonpostselected: f64,
}

/// Exact branch QFIs weighted by their probabilities, against the joint QFI.
pub fn information_budget(cfg: &ProtocolConfig) -> Result<InformationBudget> {
    let outcome = run_standard_wva(cfg)?;
    let weighted = |b: &crate::protocols::Branch| {
        b.fisher.as_ref().map_or(0.0, |f| b.probability * f.qfi)
    };
    let postselected = outcome.accepted().map(weighted).sum();
    let all_branches = outcome.branches.iter().map(weighted).sum();
    let joint = ProbeFamily::interaction(&cfg.interaction, &cfg.i_plus, &cfg.probe()?)?;
    Ok(InformationBudget {
        postselected,
        all_branches,
        nonpostselected: joint.qfi(cfg.theta())?.qfi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pm_basis() -> MeasurementBasis {
        MeasurementBasis::new("x", [StateVector::plus(), StateVector::minus()]).unwrap()
    }

    #[test]
    fn basis_state_gives_all_counts_on_one_outcome() {
        let r = sample_shots(&StateVector::plus(), &pm_basis(), 1000, 7).unwrap();
        assert_eq!(r.counts["+"], 1000);
        assert_eq!(r.counts["-"], 0);
        assert_eq!(r.ordered_counts().iter().sum::<u64>(), 1000);
    }

    #[test]
    fn sampling_is_deterministic() {
        let probe = StateVector::real_qubit(0.3);
        let a = sample_shots(&probe, &pm_basis(), 5000, 11).unwrap();
        let b = sample_shots(&probe, &pm_basis(), 5000, 11).unwrap();
        assert_eq!(a, b);
        let c = sample_shots(&probe, &pm_basis(), 5000, 12).unwrap();
        assert_ne!(a.counts, c.counts);
    }

    #[test]
    fn sampling_validates_input() {
        assert!(sample_shots(&StateVector::plus(), &pm_basis(), 0, 1).is_err());
        assert!(MeasurementBasis::new("bad", [StateVector::plus(), StateVector::zero()]).is_err());
    }

    #[test]
    fn equal_superposition_concentrates() {
        let b = MeasurementBasis::new("z", [StateVector::zero(), StateVector::one()]).unwrap();
        let r = sample_shots(&StateVector::plus(), &b, 1_000_000, 3).unwrap();
        let frac = r.counts["+"] as f64 / 1e6;
        assert!((frac - 0.5).abs() < 0.002, "fraction {frac}");
    }

    fn cos2_model(theta: f64) -> Result<Vec<f64>> {
        let p = (theta / 2.0).cos().powi(2);
        Ok(vec![p, 1.0 - p])
    }

    fn record(n0: u64, n1: u64) -> ShotRecord {
        ShotRecord {
            n_shots: n0 + n1,
            counts: BTreeMap::from([("+".into(), n0), ("-".into(), n1)]),
            seed: 0,
            basis: "x".into(),
            labels: vec!["+".into(), "-".into()],
        }
    }

    #[test]
    fn mle_closed_form_inversion() {
        let est = mle_theta(&record(75, 25), cos2_model, (0.0, std::f64::consts::PI)).unwrap();
        assert_abs_diff_eq!(est, 2.0 * 0.75f64.sqrt().acos(), epsilon = 1e-8);
    }

    #[test]
    fn mle_consistency_at_exact_counts() {
        // theta0 with cos²(theta0/2) = 0.9 exactly representable by counts 9000/1000
        let theta0 = 2.0 * 0.9f64.sqrt().acos();
        let est = mle_theta(&record(9000, 1000), cos2_model, (0.0, std::f64::consts::PI)).unwrap();
        assert_abs_diff_eq!(est, theta0, epsilon = 1e-6);
    }

    #[test]
    fn mle_flat_likelihood() {
        let flat = |_: f64| Ok(vec![0.5, 0.5]);
        assert_eq!(mle_theta(&record(10, 20), flat, (0.0, 1.0)), Err(Error::NonIdentifiable));
        assert!(mle_theta(&record(10, 20), cos2_model, (1.0, 1.0)).is_err());
    }

    #[test]
    fn interval_follows_sign() {
        assert_eq!(default_interval(0.1, None), (0.0, std::f64::consts::PI));
        let (lo, hi) = default_interval(-0.1, Some(2.0));
        assert_abs_diff_eq!(lo, -std::f64::consts::FRAC_PI_2);
        assert_eq!(hi, 0.0);
        assert_abs_diff_eq!(default_interval(0.1, Some(0.1)).1, 2.0 * std::f64::consts::PI);
    }
}
