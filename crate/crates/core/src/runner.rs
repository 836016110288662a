//! Seeded campaigns of single-copy trials, their summaries and record files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::Certificate;
use crate::dense::make_singlet;
use crate::error::{invalid, Error, Result};
use crate::hamiltonian::GapReport;
use crate::noise::{sample_noisy_trial, NoiseKind, NoiseModel};
use crate::protocols::{post_hoc_delta, run_scheme_trial, success_operator, Scheme, SchemeConfig, TrialRecord};
use crate::rng::{setup_stream, trial_stream};
use crate::sep_oracle::{max_product_expectation, singlet_success_observable, OracleMethod};
use crate::source::{ProductState, StateHandle};
use crate::stabilizer::StabilizerTableau;

/// Two-sided 95% standard normal quantile.
const Z95: f64 = 1.959963984540054;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaPolicy {
    Fixed(f64),
    /// Verdicts and certificate use the margin observed in the data.
    PostHoc,
}

impl FromStr for DeltaPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("posthoc") {
            return Ok(DeltaPolicy::PostHoc);
        }
        s.parse::<f64>()
            .ok()
            .filter(|d| d.is_finite())
            .map(DeltaPolicy::Fixed)
            .ok_or_else(|| Error::Config(format!("delta must be a number or 'posthoc', got {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Target,
    /// Product of labelled qubits (`0 1 + - r l`), tiled over the register.
    Product(String),
    /// Product state maximizing the success probability of one block.
    ProductOracle,
    Noisy {
        lambda: f64,
        kind: NoiseKind,
    },
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "target" => Ok(StateSpec::Target),
            Some(("product", "oracle")) => Ok(StateSpec::ProductOracle),
            Some(("product", labels)) if !labels.is_empty() => Ok(StateSpec::Product(labels.to_string())),
            Some(("noisy", l)) => {
                let lambda = l.parse::<f64>().map_err(|_| Error::Config(format!("bad noise weight {l:?}")))?;
                NoiseModel::white(lambda)?;
                Ok(StateSpec::Noisy { lambda, kind: NoiseKind::White })
            }
            _ => Err(Error::Config(format!(
                "unknown state {s:?}; use target, product:<labels|oracle> or noisy:<lambda>"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    JsonLines,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsonl" | "json-lines" | "json" => Ok(OutputFormat::JsonLines),
            "csv" => Ok(OutputFormat::Csv),
            _ => Err(Error::Config(format!("unknown format {s:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub scheme: SchemeConfig,
    pub trials: usize,
    pub master_seed: u64,
    pub state: StateSpec,
    pub delta: DeltaPolicy,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl CampaignConfig {
    pub fn new(scheme: SchemeConfig, trials: usize, master_seed: u64) -> Self {
        CampaignConfig {
            scheme,
            trials,
            master_seed,
            state: StateSpec::Target,
            delta: DeltaPolicy::PostHoc,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("at least one trial is required".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("thread count must be positive".into()));
        }
        self.scheme.validate()?;
        if let DeltaPolicy::Fixed(d) = self.delta {
            match &self.scheme {
                SchemeConfig::Hamiltonian(h) => h.check_delta(d).map_err(|e| Error::Config(e.to_string()))?,
                _ if d > 1.0 / 3.0 + 1e-12 => {
                    return Err(Error::Config(format!("delta = {d} exceeds 1/3, no record can succeed")));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Source a campaign measures, plus the noise model when the state is noisy.
#[derive(Debug, Clone)]
pub struct ResolvedSource {
    pub handle: StateHandle,
    pub noise: Option<NoiseModel>,
}

pub fn target_source(scheme: &SchemeConfig) -> Result<StateHandle> {
    match scheme {
        SchemeConfig::Singlet(c) => StateHandle::repeated(make_singlet().into(), c.num_pairs),
        SchemeConfig::Lcs(c) => Ok(StabilizerTableau::init_lcs(c.num_qubits)?.into()),
        SchemeConfig::Hamiltonian(h) => Ok(StateHandle::Dense(h.ground_state())),
    }
}

/// Largest ring for which the cluster-scheme product oracle is run.
pub const LCS_ORACLE_LIMIT: usize = 12;

pub fn resolve_source(scheme: &SchemeConfig, state: &StateSpec, seed: u64) -> Result<ResolvedSource> {
    let n = scheme.num_qubits();
    let handle = match state {
        StateSpec::Target => target_source(scheme)?,
        StateSpec::Product(labels) => ProductState::from_labels(labels, n)?.into(),
        StateSpec::ProductOracle => oracle_product(scheme, seed)?.into(),
        StateSpec::Noisy { lambda, kind } => {
            return Ok(ResolvedSource {
                handle: target_source(scheme)?,
                noise: Some(NoiseModel::new(*lambda, kind.clone())?),
            });
        }
    };
    Ok(ResolvedSource { handle, noise: None })
}

fn oracle_product(scheme: &SchemeConfig, seed: u64) -> Result<ProductState> {
    let mut rng = setup_stream(seed);
    match scheme {
        SchemeConfig::Singlet(c) => {
            let best = max_product_expectation(&singlet_success_observable(), OracleMethod::grid(), &mut rng)?;
            ProductState::tiled(&best.ansatz.bloch(), 2 * c.num_pairs)
        }
        SchemeConfig::Lcs(c) => {
            if c.num_qubits > LCS_ORACLE_LIMIT {
                return Err(Error::Config(format!(
                    "product oracle for the cluster scheme supports at most {LCS_ORACLE_LIMIT} qubits"
                )));
            }
            let pi = success_operator(c.num_qubits, c.num_clusters, &c.setting_probs)?;
            let best = max_product_expectation(&pi, OracleMethod::seesaw(), &mut rng)?;
            best.ansatz.to_product_state()
        }
        SchemeConfig::Hamiltonian(h) => h.separable_minimizer().to_product_state(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub scheme: Scheme,
    pub trials: usize,
    pub successes: usize,
    pub frequency: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub pooled_delta_hat: f64,
    pub certificate: Certificate,
    pub wall_clock_seconds: f64,
    pub mean_trial_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct Campaign {
    pub records: Vec<TrialRecord>,
    pub summary: CampaignSummary,
}

/// Wilson score interval at 95%.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0).min(p), (centre + half).min(1.0).max(p))
}

/// Pooled `δ̂`: local-cost average for the binary schemes, mean of the
/// per-record margins for the Hamiltonian scheme.
pub fn pooled_delta(records: &[TrialRecord]) -> Result<f64> {
    let first = records.first().ok_or(Error::Empty("trial records"))?;
    if first.scheme.is_binary() {
        post_hoc_delta(records)
    } else {
        if records.iter().any(|r| r.scheme != first.scheme) {
            return Err(invalid("records mix schemes"));
        }
        Ok(records.iter().map(|r| r.delta_hat).sum::<f64>() / records.len() as f64)
    }
}

/// Certificate for a record set at `delta` (the pooled margin when `None`).
/// The Hamiltonian scheme needs its gap report for `κ²`, `β²` and `g_E`.
pub fn certificate_from_records(
    records: &[TrialRecord],
    delta: Option<f64>,
    gap: Option<&GapReport>,
) -> Result<Certificate> {
    let first = records.first().ok_or(Error::Empty("trial records"))?;
    let delta = match delta {
        Some(d) => d,
        None => pooled_delta(records)?,
    };
    match first.scheme {
        Scheme::Hamiltonian => {
            let g = gap.ok_or_else(|| Error::Config("Hamiltonian certificates need the Hamiltonian".into()))?;
            Certificate::hamiltonian(delta, g.n, g.kappa2, g.beta2, g.g_e)
        }
        s => {
            let k = first.k();
            if records.iter().any(|r| r.k() != k) {
                return Err(invalid("records disagree on the number of local costs"));
            }
            Certificate::binary(s, delta, k)
        }
    }
}

pub fn run_campaign(cfg: &CampaignConfig) -> Result<Campaign> {
    cfg.validate()?;
    let source = resolve_source(&cfg.scheme, &cfg.state, cfg.master_seed)?;
    let started = Instant::now();
    let records = match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(|| run_trials(cfg, &source)),
        None => run_trials(cfg, &source),
    }?;
    let elapsed = started.elapsed().as_secs_f64();

    let threshold = match cfg.delta {
        DeltaPolicy::Fixed(d) => Some(d),
        DeltaPolicy::PostHoc => None,
    };
    let gap = match &cfg.scheme {
        SchemeConfig::Hamiltonian(h) => Some(h.gap().clone()),
        _ => None,
    };
    let summary = summarize(&records, threshold, gap.as_ref(), elapsed)?;
    Ok(Campaign { records, summary })
}

fn run_trials(cfg: &CampaignConfig, source: &ResolvedSource) -> Result<Vec<TrialRecord>> {
    let threshold = match cfg.delta {
        DeltaPolicy::Fixed(d) => Some(d),
        DeltaPolicy::PostHoc => None,
    };
    (0..cfg.trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_stream(cfg.master_seed, i);
            match &source.noise {
                Some(model) => sample_noisy_trial(model, &source.handle, &cfg.scheme, threshold, &mut rng),
                None => run_scheme_trial(&cfg.scheme, &source.handle, threshold, &mut rng),
            }
        })
        .collect()
}

pub fn summarize(
    records: &[TrialRecord],
    threshold: Option<f64>,
    gap: Option<&GapReport>,
    elapsed: f64,
) -> Result<CampaignSummary> {
    let first = records.first().ok_or(Error::Empty("trial records"))?;
    let successes = records.iter().filter(|r| r.success).count();
    let trials = records.len();
    let (wilson_low, wilson_high) = wilson_interval(successes, trials);
    Ok(CampaignSummary {
        scheme: first.scheme,
        trials,
        successes,
        frequency: successes as f64 / trials as f64,
        wilson_low,
        wilson_high,
        pooled_delta_hat: pooled_delta(records)?,
        certificate: certificate_from_records(records, threshold, gap)?,
        wall_clock_seconds: elapsed,
        mean_trial_seconds: elapsed / trials as f64,
    })
}

/// Flat CSV row; the partition is dropped.
#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    scheme: Scheme,
    settings: String,
    bases: &'a str,
    outcomes: &'a str,
    local_costs: String,
    #[serde(rename = "R")]
    r: usize,
    delta_hat: f64,
    estimator: Option<f64>,
    threshold: Option<f64>,
    success: bool,
    noise_branch: Option<crate::protocols::NoiseBranch>,
}

const CSV_HEADER: [&str; 11] = [
    "scheme",
    "settings",
    "bases",
    "outcomes",
    "local_costs",
    "R",
    "delta_hat",
    "estimator",
    "threshold",
    "success",
    "noise_branch",
];

pub fn write_records<W: Write>(records: &[TrialRecord], out: W, format: OutputFormat) -> Result<()> {
    match format {
        OutputFormat::JsonLines => {
            let mut w = BufWriter::new(out);
            for r in records {
                serde_json::to_writer(&mut w, r)?;
                w.write_all(b"\n")?;
            }
            w.flush()?;
        }
        OutputFormat::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
            w.write_record(CSV_HEADER)?;
            for r in records {
                w.serialize(CsvRow {
                    scheme: r.scheme,
                    settings: r.settings.join(" "),
                    bases: &r.bases,
                    outcomes: &r.outcomes,
                    local_costs: r.local_costs.iter().map(|c| char::from(b'0' + c)).collect(),
                    r: r.r,
                    delta_hat: r.delta_hat,
                    estimator: r.estimator,
                    threshold: r.threshold,
                    success: r.success,
                    noise_branch: r.noise_branch,
                })?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

pub fn export_records(records: &[TrialRecord], path: &Path, format: OutputFormat) -> Result<()> {
    write_records(records, File::create(path)?, format)
}

/// Read a JSON-lines record file; blank lines are skipped.
pub fn import_records(path: &Path) -> Result<Vec<TrialRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}

/// Round every float in a JSON value to `digits` significant digits.
pub fn round_significant(value: &mut serde_json::Value, digits: usize) {
    match value {
        serde_json::Value::Number(num) if !num.is_i64() && !num.is_u64() => {
            if let Some(x) = num.as_f64() {
                if let Ok(r) = format!("{x:.*e}", digits.saturating_sub(1)).parse::<f64>() {
                    if let Some(n) = serde_json::Number::from_f64(r) {
                        *num = n;
                    }
                }
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(|v| round_significant(v, digits)),
        serde_json::Value::Object(map) => map.values_mut().for_each(|v| round_significant(v, digits)),
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{LcsTrialConfig, SingletTrialConfig};
    use approx::assert_abs_diff_eq;

    fn singlet(trials: usize, seed: u64) -> CampaignConfig {
        CampaignConfig::new(SchemeConfig::Singlet(SingletTrialConfig::uniform(8)), trials, seed)
    }

    #[test]
    fn single_singlet_trial_certifies() {
        let c = run_campaign(&singlet(1, 42)).unwrap();
        assert_eq!(c.summary.successes, 1);
        assert_abs_diff_eq!(c.summary.certificate.bound, (2.0f64 / 3.0).powi(8), epsilon = 1e-12);
        assert!(c.summary.wilson_low <= 1.0 && c.summary.wilson_high == 1.0);
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let mut cfg = singlet(300, 7);
        cfg.state = "product:+0".parse().unwrap();
        cfg.threads = Some(1);
        let a = run_campaign(&cfg).unwrap();
        cfg.threads = Some(4);
        let b = run_campaign(&cfg).unwrap();
        assert_eq!(a.records, b.records);
        let mut buf_a = Vec::new();
        let mut buf_b = Vec::new();
        write_records(&a.records, &mut buf_a, OutputFormat::JsonLines).unwrap();
        write_records(&b.records, &mut buf_b, OutputFormat::JsonLines).unwrap();
        assert_eq!(buf_a, buf_b);
    }

    #[test]
    fn lcs_target_campaign() {
        let cfg = CampaignConfig::new(SchemeConfig::Lcs(LcsTrialConfig::uniform(26, 8)), 10_000, 3);
        let c = run_campaign(&cfg).unwrap();
        assert_eq!(c.summary.frequency, 1.0);
        assert_abs_diff_eq!(c.summary.pooled_delta_hat, 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn summary_matches_records() {
        let mut cfg = singlet(2000, 9);
        cfg.state = StateSpec::ProductOracle;
        cfg.delta = DeltaPolicy::Fixed(0.2);
        let c = run_campaign(&cfg).unwrap();
        let mean = c.records.iter().filter(|r| r.success).count() as f64 / c.records.len() as f64;
        assert_eq!(c.summary.frequency, mean);
        assert!(c.summary.wilson_low <= mean && mean <= c.summary.wilson_high);
        assert_eq!(c.summary.certificate, certificate_from_records(&c.records, Some(0.2), None).unwrap());
    }

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(0, 10);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.2 && hi < 0.35);
        let (lo, hi) = wilson_interval(50, 100);
        assert_abs_diff_eq!(lo + hi, 1.0, epsilon = 1e-12);
        assert!(lo > 0.39 && hi < 0.61);
    }

    #[test]
    fn parse_policies_and_states() {
        assert_eq!("posthoc".parse::<DeltaPolicy>().unwrap(), DeltaPolicy::PostHoc);
        assert_eq!("0.25".parse::<DeltaPolicy>().unwrap(), DeltaPolicy::Fixed(0.25));
        assert!("abc".parse::<DeltaPolicy>().is_err());
        assert_eq!("target".parse::<StateSpec>().unwrap(), StateSpec::Target);
        assert_eq!("product:01".parse::<StateSpec>().unwrap(), StateSpec::Product("01".into()));
        assert!(matches!("noisy:0.3".parse::<StateSpec>().unwrap(), StateSpec::Noisy { .. }));
        assert!("noisy:2".parse::<StateSpec>().is_err());
        assert!("mixed".parse::<StateSpec>().is_err());
        assert!(matches!(singlet(0, 1).validate(), Err(Error::Config(_))));
    }

    #[test]
    fn rounding_to_twelve_digits() {
        let mut v = serde_json::json!({"a": 0.039018442310623356, "b": [2.0, 3], "c": "x"});
        round_significant(&mut v, 12);
        assert_eq!(v["a"].as_f64().unwrap(), 0.0390184423106);
        assert_eq!(v["b"][1], 3);
    }
}
