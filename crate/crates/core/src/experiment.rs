//! Run configuration, versioned experiment records and parameter sweeps.
//!
//! Records serialize to JSON (top-level `schema: 1`) or to CSV: a `# key=value`
//! preamble followed by the branch table. CSV floats carry 17 significant
//! digits so both formats round-trip exactly.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{variance_study, VarianceReport};
use crate::metrology::{is_anomalous, InteractionSpec};
use crate::protocols::{
    run_boosted_pctc, run_pctc_wva, run_retro_probe, run_standard_wva, ProtocolConfig,
    ProtocolKind, ProtocolOutcome,
};
use crate::statevec::{BellLabel, OperatorKind, OperatorMatrix, NORM_TOLERANCE};

pub const SCHEMA_VERSION: u32 = 1;

pub const DEFAULT_SHOTS: u64 = 100_000;
pub const DEFAULT_TRIALS: u64 = 200;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::parse("format", format!("expected json or csv, got `{other}`"))),
        }
    }
}

/// Fully resolved settings for one protocol run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub protocol: ProtocolKind,
    pub theta: f64,
    pub gamma: Option<f64>,
    pub n_hat: Option<[f64; 3]>,
    /// Retained probes per trial; 0 disables the variance study.
    pub shots: u64,
    pub trials: u64,
    pub seed: u64,
    pub accepted_outcomes: Vec<BellLabel>,
    pub output_path: Option<PathBuf>,
    pub format: OutputFormat,
}

fn parse_f64(field: &str, value: &str) -> Result<f64> {
    let x: f64 = value
        .trim()
        .parse()
        .map_err(|_| Error::parse(field, format!("`{value}` is not a number")))?;
    if !x.is_finite() {
        return Err(Error::parse(field, format!("`{value}` is not finite")));
    }
    Ok(x)
}

fn parse_u64(field: &str, value: &str) -> Result<u64> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::parse(field, format!("`{value}` is not a non-negative integer")))
}

fn parse_n_hat(value: &str) -> Result<[f64; 3]> {
    let parts: Vec<&str> = value.split(',').collect();
    if parts.len() != 3 {
        return Err(Error::parse("n-hat", format!("expected x,y,z, got `{value}`")));
    }
    let mut n = [0.0; 3];
    for (slot, part) in n.iter_mut().zip(parts) {
        *slot = parse_f64("n-hat", part)?;
    }
    let norm = n.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::parse("n-hat", format!("must be a unit vector, |n| = {norm}")));
    }
    Ok(n)
}

fn canonical_key(key: &str) -> String {
    key.trim().to_lowercase().replace('_', "-")
}

/// Parses a flat `key = value` file (one key per line, `#` comments).
pub fn parse_kv(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .or_else(|| line.split_once(':'))
            .ok_or_else(|| Error::parse("config", format!("line {}: expected key = value", lineno + 1)))?;
        pairs.push((canonical_key(key), value.trim().to_string()));
    }
    Ok(pairs)
}

impl RunConfig {
    /// Builds a config from ordered key/value pairs; later pairs override
    /// earlier ones, so file values followed by flag values give flag
    /// precedence.
    pub fn from_pairs(pairs: &[(String, String)]) -> Result<Self> {
        let mut protocol = None;
        let mut theta = None;
        let mut gamma = None;
        let mut n_hat = None;
        let mut shots = DEFAULT_SHOTS;
        let mut trials = DEFAULT_TRIALS;
        let mut seed = 0;
        let mut accept = None;
        let mut output_path = None;
        let mut format = OutputFormat::Json;

        for (key, value) in pairs {
            match canonical_key(key).as_str() {
                "protocol" => protocol = Some(value.parse::<ProtocolKind>()?),
                "theta" => theta = Some(parse_f64("theta", value)?),
                "gamma" => gamma = Some(parse_f64("gamma", value)?),
                "n-hat" => n_hat = Some(parse_n_hat(value)?),
                "shots" => shots = parse_u64("shots", value)?,
                "trials" => trials = parse_u64("trials", value)?,
                "seed" => seed = parse_u64("seed", value)?,
                "accept" => {
                    let labels = value
                        .split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(BellLabel::from_str)
                        .collect::<Result<Vec<_>>>()?;
                    accept = Some(labels);
                }
                "out" | "output" | "output-path" => output_path = Some(PathBuf::from(value)),
                "format" => format = value.parse()?,
                other => return Err(Error::parse(other, "unknown setting")),
            }
        }

        let protocol = protocol.ok_or_else(|| Error::parse("protocol", "missing"))?;
        let theta = theta.ok_or_else(|| Error::parse("theta", "missing"))?;
        match protocol {
            ProtocolKind::Retro => {
                if n_hat.is_none() {
                    return Err(Error::parse("n-hat", "required for the retro protocol"));
                }
                if gamma.is_some() {
                    return Err(Error::parse("gamma", "not used by the retro protocol"));
                }
            }
            _ => {
                if gamma.is_none() {
                    return Err(Error::parse("gamma", format!("required for the {protocol} protocol")));
                }
                if n_hat.is_some() {
                    return Err(Error::parse("n-hat", format!("not used by the {protocol} protocol")));
                }
            }
        }
        let accepted_outcomes = match (protocol, accept) {
            (ProtocolKind::Pctc, Some(labels)) => {
                if labels.is_empty() {
                    return Err(Error::parse("accept", "at least one Bell outcome required"));
                }
                let mut labels = labels;
                labels.sort();
                labels.dedup();
                labels
            }
            (ProtocolKind::Pctc, None) => vec![BellLabel::PhiPlus],
            (ProtocolKind::Boosted, None) => vec![BellLabel::PhiPlus, BellLabel::PsiPlus],
            (_, None) => Vec::new(),
            (p, Some(_)) => {
                return Err(Error::parse("accept", format!("only the pctc protocol takes accepted outcomes, not {p}")))
            }
        };
        if shots > 0 && trials < 2 {
            return Err(Error::parse("trials", "a variance study needs at least 2 trials"));
        }
        Ok(Self {
            protocol,
            theta,
            gamma,
            n_hat,
            shots,
            trials,
            seed,
            accepted_outcomes,
            output_path,
            format,
        })
    }

    fn protocol_config(&self) -> Result<ProtocolConfig> {
        let gamma = self.gamma.ok_or_else(|| Error::parse("gamma", "missing"))?;
        Ok(
            ProtocolConfig::gamma_family(gamma, self.theta, probe_observable())?
                .with_accepted(self.accepted_outcomes.iter().copied()),
        )
    }
}

/// Probe observable `B = σ_z` used by every CLI-driven run.
pub fn probe_observable() -> OperatorMatrix {
    OperatorMatrix::pauli_z(OperatorKind::Hermitian)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchRow {
    pub system: String,
    pub bell: Option<BellLabel>,
    pub probability: f64,
    pub accepted: bool,
    pub weak_value: Option<Complex64>,
    /// `|w| > 1`.
    pub anomalous: Option<bool>,
    pub qfi: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub schema: u32,
    pub config: RunConfig,
    pub branches: Vec<BranchRow>,
    pub success_probability: f64,
    /// Success probability of standard weak-value amplification with the same inputs.
    pub reference_success_probability: Option<f64>,
    /// `success_probability / reference_success_probability`.
    pub success_ratio: Option<f64>,
    pub variance: Option<VarianceReport>,
}

fn branch_rows(outcome: &ProtocolOutcome) -> Vec<BranchRow> {
    outcome
        .branches
        .iter()
        .map(|b| BranchRow {
            system: b.label.system.clone(),
            bell: b.label.bell,
            probability: b.probability,
            accepted: b.accepted,
            weak_value: b.weak_value,
            anomalous: b.weak_value.map(is_anomalous),
            qfi: b.fisher.as_ref().map(|f| f.qfi),
        })
        .collect()
}

/// Executes the configured protocol, plus the variance study when `shots > 0`.
pub fn run_experiment(cfg: &RunConfig) -> Result<ExperimentRecord> {
    let (outcome, reference) = match cfg.protocol {
        ProtocolKind::Standard => (run_standard_wva(&cfg.protocol_config()?)?, None),
        ProtocolKind::Pctc => {
            let pcfg = cfg.protocol_config()?;
            let reference = run_standard_wva(&pcfg)?.success_probability;
            (run_pctc_wva(&pcfg)?, Some(reference))
        }
        ProtocolKind::Boosted => {
            let pcfg = cfg.protocol_config()?;
            let reference = run_standard_wva(&pcfg)?.success_probability;
            let spec = InteractionSpec::shifted_sigma_z(cfg.theta, probe_observable())?;
            let gamma = cfg.gamma.ok_or_else(|| Error::parse("gamma", "missing"))?;
            (run_boosted_pctc(gamma, &spec)?, Some(reference))
        }
        ProtocolKind::Retro => {
            let n_hat = cfg.n_hat.ok_or_else(|| Error::parse("n-hat", "missing"))?;
            (run_retro_probe(n_hat, cfg.theta)?, None)
        }
    };
    let variance = if cfg.shots > 0 {
        Some(variance_study(&outcome, cfg.theta, cfg.trials, cfg.shots, cfg.seed)?)
    } else {
        None
    };
    Ok(ExperimentRecord {
        schema: SCHEMA_VERSION,
        config: cfg.clone(),
        branches: branch_rows(&outcome),
        success_probability: outcome.success_probability,
        reference_success_probability: reference,
        success_ratio: reference.map(|r| outcome.success_probability / r),
        variance,
    })
}

/// Float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn parse_opt_f64(field: &str, s: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse()
        .map(Some)
        .map_err(|_| Error::parse(field, format!("`{s}` is not a number")))
}

fn parse_bool(field: &str, s: &str) -> Result<bool> {
    s.parse()
        .map_err(|_| Error::parse(field, format!("`{s}` is not a boolean")))
}

fn ser_err(e: impl std::fmt::Display) -> Error {
    Error::Serialization(e.to_string())
}

const BRANCH_COLUMNS: [&str; 8] = [
    "system",
    "bell",
    "probability",
    "accepted",
    "weak_value_re",
    "weak_value_im",
    "anomalous",
    "qfi",
];

impl ExperimentRecord {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(ser_err)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let record: Self = serde_json::from_str(text).map_err(ser_err)?;
        if record.schema != SCHEMA_VERSION {
            return Err(Error::Serialization(format!(
                "unsupported schema {}",
                record.schema
            )));
        }
        Ok(record)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        let config = serde_json::to_string(&self.config).map_err(ser_err)?;
        let variance = match &self.variance {
            Some(v) => serde_json::to_string(v).map_err(ser_err)?,
            None => String::new(),
        };
        writeln!(out, "# schema={}", self.schema).unwrap();
        writeln!(out, "# config={config}").unwrap();
        writeln!(out, "# success_probability={}", fmt_f64(self.success_probability)).unwrap();
        writeln!(
            out,
            "# reference_success_probability={}",
            fmt_opt(self.reference_success_probability)
        )
        .unwrap();
        writeln!(out, "# success_ratio={}", fmt_opt(self.success_ratio)).unwrap();
        writeln!(out, "# variance={variance}").unwrap();

        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(BRANCH_COLUMNS).map_err(ser_err)?;
        for row in &self.branches {
            writer
                .write_record([
                    row.system.clone(),
                    row.bell.map(|b| b.to_string()).unwrap_or_default(),
                    fmt_f64(row.probability),
                    row.accepted.to_string(),
                    fmt_opt(row.weak_value.map(|w| w.re)),
                    fmt_opt(row.weak_value.map(|w| w.im)),
                    row.anomalous.map(|a| a.to_string()).unwrap_or_default(),
                    fmt_opt(row.qfi),
                ])
                .map_err(ser_err)?;
        }
        let table = writer.into_inner().map_err(ser_err)?;
        out.push_str(&String::from_utf8(table).map_err(ser_err)?);
        Ok(out)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut meta = std::collections::BTreeMap::new();
        for line in text.lines().take_while(|l| l.starts_with('#')) {
            let (k, v) = line[1..]
                .trim_start()
                .split_once('=')
                .ok_or_else(|| Error::Serialization(format!("bad preamble line `{line}`")))?;
            meta.insert(k.to_string(), v.to_string());
        }
        let get = |k: &str| {
            meta.get(k)
                .cloned()
                .ok_or_else(|| Error::Serialization(format!("missing `{k}` in preamble")))
        };
        let schema: u32 = get("schema")?.parse().map_err(ser_err)?;
        if schema != SCHEMA_VERSION {
            return Err(Error::Serialization(format!("unsupported schema {schema}")));
        }
        let config: RunConfig = serde_json::from_str(&get("config")?).map_err(ser_err)?;
        let variance_text = get("variance")?;
        let variance = if variance_text.is_empty() {
            None
        } else {
            Some(serde_json::from_str(&variance_text).map_err(ser_err)?)
        };

        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let mut branches = Vec::new();
        for row in reader.records() {
            let row = row.map_err(ser_err)?;
            let field = |i: usize| row.get(i).unwrap_or("");
            let re = parse_opt_f64("weak_value_re", field(4))?;
            let im = parse_opt_f64("weak_value_im", field(5))?;
            branches.push(BranchRow {
                system: field(0).to_string(),
                bell: if field(1).is_empty() {
                    None
                } else {
                    Some(field(1).parse()?)
                },
                probability: field(2).parse().map_err(ser_err)?,
                accepted: parse_bool("accepted", field(3))?,
                weak_value: re.zip(im).map(|(re, im)| Complex64::new(re, im)),
                anomalous: if field(6).is_empty() {
                    None
                } else {
                    Some(parse_bool("anomalous", field(6))?)
                },
                qfi: parse_opt_f64("qfi", field(7))?,
            });
        }
        Ok(Self {
            schema,
            config,
            branches,
            success_probability: get("success_probability")?.parse().map_err(ser_err)?,
            reference_success_probability: parse_opt_f64(
                "reference_success_probability",
                &get("reference_success_probability")?,
            )?,
            success_ratio: parse_opt_f64("success_ratio", &get("success_ratio")?)?,
            variance,
        })
    }

    pub fn serialize(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => self.to_csv(),
        }
    }

    /// Human-readable branch table.
    pub fn summary_table(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{:<8} {:<5} {:>12} {:>8} {:>24} {:>12}",
            "outcome", "bell", "probability", "accepted", "weak value", "QFI"
        )
        .unwrap();
        for row in &self.branches {
            let w = row
                .weak_value
                .map(|w| format!("{:+.6}{:+.6}i", w.re, w.im))
                .unwrap_or_else(|| "-".into());
            let qfi = row.qfi.map(|q| format!("{q:.6}")).unwrap_or_else(|| "-".into());
            writeln!(
                out,
                "{:<8} {:<5} {:>12.6e} {:>8} {:>24} {:>12}",
                row.system,
                row.bell.map(|b| b.to_string()).unwrap_or_else(|| "-".into()),
                row.probability,
                if row.accepted { "yes" } else { "no" },
                w,
                qfi
            )
            .unwrap();
        }
        writeln!(out, "success probability: {:.12}", self.success_probability).unwrap();
        if let (Some(r), Some(ratio)) = (self.reference_success_probability, self.success_ratio) {
            writeln!(out, "standard WVA success: {r:.12} (ratio {ratio:.12})").unwrap();
        }
        if let Some(v) = &self.variance {
            writeln!(
                out,
                "variance study: {} trials x {} probes, var = {:.6e}, CR bound = {:.6e}, ratio = {:.4}, info/probe = {:.4}",
                v.n_trials, v.shots_per_trial, v.empirical_variance, v.cr_bound, v.ratio, v.information_per_probe
            )
            .unwrap();
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParameter {
    Theta,
    Gamma,
}

impl SweepParameter {
    pub fn key(self) -> &'static str {
        match self {
            SweepParameter::Theta => "theta",
            SweepParameter::Gamma => "gamma",
        }
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "theta" => Ok(SweepParameter::Theta),
            "gamma" => Ok(SweepParameter::Gamma),
            other => Err(Error::parse("param", format!("expected theta or gamma, got `{other}`"))),
        }
    }
}

/// Inclusive linear grid `lo:hi:steps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, steps: usize) -> Result<Self> {
        if steps < 2 {
            return Err(Error::parse("grid", "at least 2 steps required"));
        }
        if !lo.is_finite() || !hi.is_finite() || !(lo < hi) {
            return Err(Error::parse("grid", format!("need finite lo < hi, got {lo}:{hi}")));
        }
        Ok(Self { lo, hi, steps })
    }

    pub fn points(&self) -> Vec<f64> {
        let span = self.hi - self.lo;
        (0..self.steps)
            .map(|j| self.lo + span * j as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::parse("grid", format!("expected lo:hi:steps, got `{s}`")));
        }
        let steps = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::parse("grid", format!("`{}` is not a step count", parts[2])))?;
        Grid::new(parse_f64("grid", parts[0])?, parse_f64("grid", parts[1])?, steps)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameter: f64,
    pub weak_value: Option<Complex64>,
    pub qfi: Option<f64>,
    pub success_probability: Option<f64>,
    /// Orthogonal pre/postselection (the γ = 3π/4 pole) or a vanishing
    /// success probability.
    pub degenerate: bool,
    pub variance_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub schema: u32,
    pub config: RunConfig,
    pub parameter: SweepParameter,
    pub grid: Grid,
    pub rows: Vec<SweepRow>,
}

const SWEEP_COLUMNS: [&str; 7] = [
    "parameter",
    "weak_value_re",
    "weak_value_im",
    "qfi",
    "success_probability",
    "degenerate",
    "variance_ratio",
];

/// Runs `cfg` at every grid point of `parameter`. Point `j` uses seed
/// `cfg.seed + j`; rows stay in grid order. Degenerate points are flagged.
pub fn sweep(cfg: &RunConfig, parameter: SweepParameter, grid: Grid) -> Result<SweepTable> {
    if parameter == SweepParameter::Gamma && cfg.protocol == ProtocolKind::Retro {
        return Err(Error::parse("param", "the retro protocol has no gamma parameter"));
    }
    let rows = grid
        .points()
        .into_par_iter()
        .enumerate()
        .map(|(j, x)| {
            let mut point = cfg.clone();
            point.seed = cfg.seed.wrapping_add(j as u64);
            match parameter {
                SweepParameter::Theta => point.theta = x,
                SweepParameter::Gamma => point.gamma = Some(x),
            }
            match run_experiment(&point) {
                Ok(record) => {
                    let primary = record
                        .branches
                        .iter()
                        .find(|b| b.accepted && b.qfi.is_some());
                    let weak_value = primary.and_then(|b| b.weak_value);
                    Ok(SweepRow {
                        parameter: x,
                        weak_value,
                        qfi: primary.and_then(|b| b.qfi),
                        success_probability: Some(record.success_probability),
                        degenerate: cfg.protocol != ProtocolKind::Retro && weak_value.is_none(),
                        variance_ratio: record.variance.map(|v| v.ratio),
                    })
                }
                Err(e) if e.is_degenerate() => Ok(SweepRow {
                    parameter: x,
                    weak_value: None,
                    qfi: None,
                    success_probability: None,
                    degenerate: true,
                    variance_ratio: None,
                }),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        schema: SCHEMA_VERSION,
        config: cfg.clone(),
        parameter,
        grid,
        rows,
    })
}

impl SweepTable {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(ser_err)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(ser_err)
    }

    /// Plot-ready table (no preamble).
    pub fn to_csv(&self) -> Result<String> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(SWEEP_COLUMNS).map_err(ser_err)?;
        for row in &self.rows {
            writer
                .write_record([
                    fmt_f64(row.parameter),
                    fmt_opt(row.weak_value.map(|w| w.re)),
                    fmt_opt(row.weak_value.map(|w| w.im)),
                    fmt_opt(row.qfi),
                    fmt_opt(row.success_probability),
                    row.degenerate.to_string(),
                    fmt_opt(row.variance_ratio),
                ])
                .map_err(ser_err)?;
        }
        String::from_utf8(writer.into_inner().map_err(ser_err)?).map_err(ser_err)
    }

    pub fn serialize(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => self.to_csv(),
        }
    }
}

/// Parses the rows of [`SweepTable::to_csv`].
pub fn sweep_rows_from_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for row in reader.records() {
        let row = row.map_err(ser_err)?;
        let field = |i: usize| row.get(i).unwrap_or("");
        let re = parse_opt_f64("weak_value_re", field(1))?;
        let im = parse_opt_f64("weak_value_im", field(2))?;
        rows.push(SweepRow {
            parameter: field(0).parse().map_err(ser_err)?,
            weak_value: re.zip(im).map(|(re, im)| Complex64::new(re, im)),
            qfi: parse_opt_f64("qfi", field(3))?,
            success_probability: parse_opt_f64("success_probability", field(4))?,
            degenerate: parse_bool("degenerate", field(5))?,
            variance_ratio: parse_opt_f64("variance_ratio", field(6))?,
        });
    }
    Ok(rows)
}
