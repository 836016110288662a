//! The singlet-pair and cluster-state detection schemes.
//!
//! A trial draws settings, measures one copy of the source and records the
//! local costs. The threshold `δ` is not part of the trial: records are
//! produced with a post-hoc verdict and [`TrialRecord::with_threshold`]
//! re-evaluates them against a fixed `δ` afterwards.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use nalgebra::SymmetricEigen;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dense::{make_lcs_dense, to_dense_matrix, DEFAULT_DENSE_LIMIT};
use crate::error::{invalid, Error, Result};
use crate::hamiltonian::HamiltonianScheme;
use crate::partitions::{enumerate_regular, has_regular, sample_regular, RegularPartition};
use crate::pauli::{Basis, PauliObservable};
use crate::source::StateHandle;

/// Highest single-block success probability reachable by product states.
pub const SEPARABLE_CEILING: f64 = 2.0 / 3.0;

/// Slack used when comparing integer counts against real thresholds.
const THRESHOLD_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Singlet,
    Lcs,
    Hamiltonian,
}

impl Scheme {
    pub fn is_binary(self) -> bool {
        !matches!(self, Scheme::Hamiltonian)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Singlet => "singlet",
            Scheme::Lcs => "lcs",
            Scheme::Hamiltonian => "hamiltonian",
        })
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "singlet" => Ok(Scheme::Singlet),
            "lcs" => Ok(Scheme::Lcs),
            "hamiltonian" => Ok(Scheme::Hamiltonian),
            _ => Err(Error::Config(format!("unknown scheme {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseBranch {
    Target,
    Noise,
}

/// Outcome of one single-copy run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub scheme: Scheme,
    /// 1-based cluster starts (cluster-state scheme only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<usize>>,
    /// One setting per block: `"XX"` per pair, `"ZXZZ"` per cluster, `"X"` per site.
    pub settings: Vec<String>,
    /// Basis used on each qubit, one character per qubit.
    pub bases: String,
    /// Outcome bit of each qubit.
    pub outcomes: String,
    pub local_costs: Vec<u8>,
    #[serde(rename = "R")]
    pub r: usize,
    pub delta_hat: f64,
    /// Estimator value `H_[N]` (Hamiltonian scheme only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimator: Option<f64>,
    /// Threshold `δ` the verdict was evaluated against; absent for post-hoc verdicts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    pub success: bool,
    /// Diagnostic only; certificates never read it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_branch: Option<NoiseBranch>,
}

impl TrialRecord {
    /// Number of local cost functions `K`.
    pub fn k(&self) -> usize {
        self.local_costs.len()
    }

    /// Re-evaluate the verdict against a fixed threshold.
    pub fn with_threshold(mut self, delta: f64) -> Result<Self> {
        self.success = evaluate_cost(&self, delta)?;
        self.threshold = Some(delta);
        Ok(self)
    }

    pub fn outcome_bits(&self) -> Vec<u8> {
        self.outcomes.bytes().map(|b| b - b'0').collect()
    }
}

fn bits_to_string(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect()
}

fn draw_index<R: Rng + ?Sized>(probs: &[f64; 3], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(2)
}

fn check_distribution(probs: &[f64; 3]) -> Result<()> {
    let total: f64 = probs.iter().sum();
    if probs.iter().any(|p| !(0.0..=1.0).contains(p)) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!("setting probabilities {probs:?} must be a distribution")));
    }
    Ok(())
}

/// `R >= (2/3 + δ) K` for binary-scheme records.
pub fn evaluate_cost(record: &TrialRecord, threshold_delta: f64) -> Result<bool> {
    if !record.scheme.is_binary() {
        return Err(invalid("cost threshold applies to binary-scheme records only"));
    }
    let k = record.k() as f64;
    Ok(record.r as f64 + THRESHOLD_EPS >= (SEPARABLE_CEILING + threshold_delta) * k)
}

/// Pooled `ΣR / ΣK - 2/3` over records of one binary scheme.
pub fn post_hoc_delta(records: &[TrialRecord]) -> Result<f64> {
    let first = records.first().ok_or(Error::Empty("trial records"))?;
    if !first.scheme.is_binary() {
        return Err(invalid("pooled delta from local costs needs a binary scheme"));
    }
    if records.iter().any(|r| r.scheme != first.scheme) {
        return Err(invalid("records mix schemes"));
    }
    let (hits, total) = records.iter().fold((0usize, 0usize), |(h, t), r| (h + r.r, t + r.k()));
    if total == 0 {
        return Err(Error::Empty("local costs"));
    }
    Ok(hits as f64 / total as f64 - SEPARABLE_CEILING)
}

// ---------------------------------------------------------------------------
// Singlet pairs

pub const SINGLET_SETTINGS: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

#[derive(Debug, Clone, PartialEq)]
pub struct SingletTrialConfig {
    pub num_pairs: usize,
    /// Probabilities of the settings XX, YY, ZZ.
    pub setting_probs: [f64; 3],
}

impl SingletTrialConfig {
    pub fn uniform(num_pairs: usize) -> Self {
        SingletTrialConfig { num_pairs, setting_probs: [1.0 / 3.0; 3] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_pairs == 0 {
            return Err(Error::Config("at least one pair is required".into()));
        }
        check_distribution(&self.setting_probs)
    }
}

/// Pairs `(2k, 2k+1)` are measured in a shared random basis;
/// `F_k = 1` iff the two outcomes differ.
pub fn run_singlet_trial<R: Rng + ?Sized>(
    cfg: &SingletTrialConfig,
    source: &StateHandle,
    rng: &mut R,
) -> Result<TrialRecord> {
    cfg.validate()?;
    let n = 2 * cfg.num_pairs;
    if source.num_qubits() != n {
        return Err(Error::Dimension { expected: n, actual: source.num_qubits() });
    }
    let settings: Vec<Basis> =
        (0..cfg.num_pairs).map(|_| SINGLET_SETTINGS[draw_index(&cfg.setting_probs, rng)]).collect();
    let bases: Vec<Basis> = settings.iter().flat_map(|&b| [b, b]).collect();
    let outcomes = source.measure_all(&bases, rng)?;
    let local_costs: Vec<u8> = outcomes.chunks(2).map(|p| p[0] ^ p[1]).collect();
    Ok(binary_record(
        Scheme::Singlet,
        None,
        settings.iter().map(|b| format!("{0}{0}", b.as_char())).collect(),
        &bases,
        &outcomes,
        local_costs,
    ))
}

fn binary_record(
    scheme: Scheme,
    partition: Option<Vec<usize>>,
    settings: Vec<String>,
    bases: &[Basis],
    outcomes: &[u8],
    local_costs: Vec<u8>,
) -> TrialRecord {
    let r: usize = local_costs.iter().map(|&c| c as usize).sum();
    let delta_hat = r as f64 / local_costs.len() as f64 - SEPARABLE_CEILING;
    TrialRecord {
        scheme,
        partition,
        settings,
        bases: bases.iter().map(|b| b.as_char()).collect(),
        outcomes: bits_to_string(outcomes),
        local_costs,
        r,
        delta_hat,
        estimator: None,
        threshold: None,
        success: delta_hat > THRESHOLD_EPS,
        noise_branch: None,
    }
}

// ---------------------------------------------------------------------------
// Linear cluster state

/// A cluster setting; each measures one stabilizer of the cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClusterSetting {
    Zxzz,
    Zzxz,
    Zyyz,
}

impl ClusterSetting {
    pub const ALL: [ClusterSetting; 3] = [ClusterSetting::Zxzz, ClusterSetting::Zzxz, ClusterSetting::Zyyz];

    pub fn bases(self) -> [Basis; 4] {
        use Basis::*;
        match self {
            ClusterSetting::Zxzz => [Z, X, Z, Z],
            ClusterSetting::Zzxz => [Z, Z, X, Z],
            ClusterSetting::Zyyz => [Z, Y, Y, Z],
        }
    }

    /// Cluster members whose outcome parity gives the stabilizer value.
    pub fn parity_members(self) -> &'static [usize] {
        match self {
            ClusterSetting::Zxzz => &[0, 1, 2],
            ClusterSetting::Zzxz => &[1, 2, 3],
            ClusterSetting::Zyyz => &[0, 1, 2, 3],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ClusterSetting::Zxzz => "ZXZZ",
            ClusterSetting::Zzxz => "ZZXZ",
            ClusterSetting::Zyyz => "ZYYZ",
        }
    }

    /// `F_s = (1 + (-1)^parity) / 2`.
    pub fn local_cost(self, cluster_bits: [u8; 4]) -> u8 {
        let parity: u8 = self.parity_members().iter().map(|&j| cluster_bits[j]).sum::<u8>() % 2;
        1 - parity
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LcsTrialConfig {
    pub num_qubits: usize,
    pub num_clusters: usize,
    /// Probabilities of ZXZZ, ZZXZ, ZYYZ.
    pub setting_probs: [f64; 3],
}

impl LcsTrialConfig {
    pub fn uniform(num_qubits: usize, num_clusters: usize) -> Self {
        LcsTrialConfig { num_qubits, num_clusters, setting_probs: [1.0 / 3.0; 3] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_qubits < 4 {
            return Err(Error::Config("the cluster scheme needs at least 4 qubits".into()));
        }
        if !has_regular(self.num_qubits, self.num_clusters) {
            return Err(Error::Config(format!(
                "no regular partition of {} qubits into {} clusters",
                self.num_qubits, self.num_clusters
            )));
        }
        check_distribution(&self.setting_probs)
    }
}

/// Qubit bases for a partition and per-cluster settings. Qubits outside
/// every cluster and shared border qubits are measured in Z.
pub fn lcs_bases(n: usize, partition: &RegularPartition, settings: &[ClusterSetting]) -> Vec<Basis> {
    let mut bases = vec![Basis::Z; n];
    for (members, setting) in partition.clusters().iter().zip(settings) {
        for (j, &q) in members.iter().enumerate() {
            let b = setting.bases()[j];
            if b != Basis::Z {
                bases[q] = b;
            }
        }
    }
    bases
}

pub fn run_lcs_trial<R: Rng + ?Sized>(cfg: &LcsTrialConfig, source: &StateHandle, rng: &mut R) -> Result<TrialRecord> {
    cfg.validate()?;
    let n = cfg.num_qubits;
    if source.num_qubits() != n {
        return Err(Error::Dimension { expected: n, actual: source.num_qubits() });
    }
    let partition = sample_regular(n, cfg.num_clusters, rng)?;
    let settings: Vec<ClusterSetting> =
        (0..cfg.num_clusters).map(|_| ClusterSetting::ALL[draw_index(&cfg.setting_probs, rng)]).collect();
    let bases = lcs_bases(n, &partition, &settings);
    let outcomes = source.measure_all(&bases, rng)?;
    let local_costs = partition
        .clusters()
        .iter()
        .zip(&settings)
        .map(|(members, s)| s.local_cost(members.map(|q| outcomes[q])))
        .collect();
    Ok(binary_record(
        Scheme::Lcs,
        Some(partition.starts.clone()),
        settings.iter().map(|s| s.label().to_string()).collect(),
        &bases,
        &outcomes,
        local_costs,
    ))
}

// ---------------------------------------------------------------------------
// Dispatch

#[derive(Debug, Clone)]
pub enum SchemeConfig {
    Singlet(SingletTrialConfig),
    Lcs(LcsTrialConfig),
    Hamiltonian(Arc<HamiltonianScheme>),
}

impl SchemeConfig {
    pub fn scheme(&self) -> Scheme {
        match self {
            SchemeConfig::Singlet(_) => Scheme::Singlet,
            SchemeConfig::Lcs(_) => Scheme::Lcs,
            SchemeConfig::Hamiltonian(_) => Scheme::Hamiltonian,
        }
    }

    pub fn num_qubits(&self) -> usize {
        match self {
            SchemeConfig::Singlet(c) => 2 * c.num_pairs,
            SchemeConfig::Lcs(c) => c.num_qubits,
            SchemeConfig::Hamiltonian(h) => h.hamiltonian().n_sites(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SchemeConfig::Singlet(c) => c.validate(),
            SchemeConfig::Lcs(c) => c.validate(),
            SchemeConfig::Hamiltonian(_) => Ok(()),
        }
    }
}

/// One trial of any scheme; `threshold` of `None` keeps the post-hoc verdict.
pub fn run_scheme_trial<R: Rng + ?Sized>(
    scheme: &SchemeConfig,
    source: &StateHandle,
    threshold: Option<f64>,
    rng: &mut R,
) -> Result<TrialRecord> {
    let record = match scheme {
        SchemeConfig::Singlet(c) => run_singlet_trial(c, source, rng)?,
        SchemeConfig::Lcs(c) => run_lcs_trial(c, source, rng)?,
        SchemeConfig::Hamiltonian(h) => return crate::hamiltonian::run_hamiltonian_trial(h, source, threshold, rng),
    };
    match threshold {
        Some(d) => record.with_threshold(d),
        None => Ok(record),
    }
}

// ---------------------------------------------------------------------------
// Success operator

/// `Σ_m p_m (1 + S_m) / 2` for the cluster with the given 0-based members.
pub fn cluster_projector(n: usize, members: [usize; 4], probs: &[f64; 3]) -> Result<PauliObservable> {
    let g1 = lcs_generator_on(n, members[0], members[1], members[2])?;
    let g2 = lcs_generator_on(n, members[1], members[2], members[3])?;
    let g12 = g1.product(&g2)?;
    let half_id = PauliObservable::identity(n).scale(0.5);
    let mut acc = PauliObservable::zero(n);
    for (p, s) in probs.iter().zip([g1, g2, g12]) {
        acc = acc.add(&half_id.add(&s.scale(0.5))?.scale(*p))?;
    }
    Ok(acc)
}

fn lcs_generator_on(n: usize, left: usize, centre: usize, right: usize) -> Result<PauliObservable> {
    use crate::pauli::Pauli;
    PauliObservable::single(n, 1.0, &[(left, Pauli::Z), (centre, Pauli::X), (right, Pauli::Z)])
}

/// Operator whose expectation is the probability that every cluster
/// succeeds, averaged over all regular partitions.
pub fn success_operator(n: usize, l: usize, probs: &[f64; 3]) -> Result<PauliObservable> {
    let partitions = enumerate_regular(n, l);
    if partitions.is_empty() {
        return Err(Error::EmptyPartitionSet { n, l });
    }
    let weight = 1.0 / partitions.len() as f64;
    let mut total = PauliObservable::zero(n);
    for p in &partitions {
        let mut prod = PauliObservable::identity(n);
        for members in p.clusters() {
            prod = prod.product(&cluster_projector(n, members, probs)?)?;
        }
        total = total.add(&prod.scale(weight))?;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub n: usize,
    pub l: usize,
    pub num_partitions: usize,
    pub top_eigenvalue: f64,
    pub top_multiplicity: usize,
    pub min_eigenvalue: f64,
    /// `<LCS|Π|LCS>`.
    pub lcs_value: f64,
    /// Whether the stabilizer expansion of `Π` reaches every group element.
    pub spans_all_stabilizers: bool,
}

/// Dense spectral analysis of the success operator for small rings.
pub fn success_operator_check(n: usize, l: usize) -> Result<SpectralReport> {
    const LIMIT: usize = 10;
    if n > LIMIT.min(DEFAULT_DENSE_LIMIT) {
        return Err(Error::DenseLimit { qubits: n, limit: LIMIT });
    }
    let probs = [1.0 / 3.0; 3];
    let pi = success_operator(n, l, &probs)?;
    let lcs = make_lcs_dense(n)?;
    let lcs_value = lcs.expectation(&pi)?;
    let eig = SymmetricEigen::new(to_dense_matrix(&pi)?);
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let top_multiplicity = values.iter().filter(|&&v| (v - top).abs() < 1e-9).count();

    // Generator subsets reached by expanding every partition's product.
    let partitions = enumerate_regular(n, l);
    let mut reached: HashSet<u64> = HashSet::new();
    for p in &partitions {
        let mut masks: Vec<u64> = vec![0];
        for members in p.clusters() {
            let (a, b) = (1u64 << members[1], 1u64 << members[2]);
            masks = masks.iter().flat_map(|&m| [m, m ^ a, m ^ b, m ^ a ^ b]).collect();
        }
        reached.extend(masks);
    }
    Ok(SpectralReport {
        n,
        l,
        num_partitions: partitions.len(),
        top_eigenvalue: top,
        top_multiplicity,
        min_eigenvalue: min,
        lcs_value,
        spans_all_stabilizers: reached.len() as u64 == 1u64 << n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{make_product, make_singlet, PureState};
    use crate::rng::stream_from_seed;
    use crate::source::ProductState;
    use crate::stabilizer::StabilizerTableau;

    fn singlets(k: usize) -> StateHandle {
        make_product(&vec![make_singlet(); k]).unwrap().into()
    }

    #[test]
    fn singlet_target_always_succeeds() {
        let cfg = SingletTrialConfig::uniform(8);
        let src = singlets(8);
        let mut rng = stream_from_seed(1);
        for _ in 0..1000 {
            let rec = run_singlet_trial(&cfg, &src, &mut rng).unwrap();
            assert_eq!(rec.r, 8);
            assert!((rec.delta_hat - 1.0 / 3.0).abs() < 1e-12);
            assert!(rec.with_threshold(1.0 / 3.0).unwrap().success);
        }
    }

    #[test]
    fn correlated_zz_always_fails() {
        let cfg = SingletTrialConfig { num_pairs: 4, setting_probs: [0.0, 0.0, 1.0] };
        let src: StateHandle = ProductState::from_labels("0", 8).unwrap().into();
        let mut rng = stream_from_seed(2);
        for _ in 0..200 {
            let rec = run_singlet_trial(&cfg, &src, &mut rng).unwrap();
            assert!(rec.local_costs.iter().all(|&c| c == 0));
            assert!(rec.settings.iter().all(|s| s == "ZZ"));
        }
    }

    #[test]
    fn size_mismatch_rejected() {
        let cfg = SingletTrialConfig::uniform(3);
        assert!(matches!(
            run_singlet_trial(&cfg, &singlets(2), &mut stream_from_seed(0)),
            Err(Error::Dimension { .. })
        ));
        let bad = LcsTrialConfig::uniform(5, 2);
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn lcs_target_always_succeeds() {
        let cfg = LcsTrialConfig::uniform(24, 8);
        let src: StateHandle = StabilizerTableau::init_lcs(24).unwrap().into();
        let mut rng = stream_from_seed(3);
        for _ in 0..1000 {
            let rec = run_lcs_trial(&cfg, &src, &mut rng).unwrap();
            assert!(rec.local_costs.iter().all(|&c| c == 1));
            assert!((rec.delta_hat - 1.0 / 3.0).abs() < 1e-12);
            assert_eq!(rec.outcomes.len(), 24);
            assert_eq!(rec.bases.len(), 24);
        }
    }

    #[test]
    fn shared_border_qubits_measured_once_in_z() {
        let cfg = LcsTrialConfig::uniform(26, 8);
        let src: StateHandle = StabilizerTableau::init_lcs(26).unwrap().into();
        let mut rng = stream_from_seed(4);
        for _ in 0..200 {
            let rec = run_lcs_trial(&cfg, &src, &mut rng).unwrap();
            let p = RegularPartition::new(26, rec.partition.clone().unwrap()).unwrap();
            let bases: Vec<char> = rec.bases.chars().collect();
            let clusters = p.clusters();
            for (members, setting) in clusters.iter().zip(&rec.settings) {
                for (j, &q) in members.iter().enumerate() {
                    assert_eq!(bases[q], setting.as_bytes()[j] as char);
                }
            }
        }
    }

    #[test]
    fn zero_state_zxzz_is_fair_coin() {
        let cfg = LcsTrialConfig { num_qubits: 8, num_clusters: 2, setting_probs: [1.0, 0.0, 0.0] };
        let src: StateHandle = PureState::basis_state(8, 0).unwrap().into();
        let mut rng = stream_from_seed(5);
        let trials = 40_000;
        let mut hits = 0usize;
        for _ in 0..trials {
            hits += run_lcs_trial(&cfg, &src, &mut rng).unwrap().local_costs[0] as usize;
        }
        let f = hits as f64 / trials as f64;
        assert!((f - 0.5).abs() < 4.0 * (0.25 / trials as f64).sqrt(), "{f}");
    }

    #[test]
    fn cost_threshold_examples() {
        let rec = |r: usize| TrialRecord {
            scheme: Scheme::Lcs,
            partition: None,
            settings: vec![],
            bases: String::new(),
            outcomes: String::new(),
            local_costs: (0..8).map(|i| (i < r) as u8).collect(),
            r,
            delta_hat: r as f64 / 8.0 - 2.0 / 3.0,
            estimator: None,
            threshold: None,
            success: false,
            noise_branch: None,
        };
        assert!(evaluate_cost(&rec(8), 1.0 / 3.0).unwrap());
        assert!(!evaluate_cost(&rec(6), 1.0 / 3.0).unwrap());
        assert!(evaluate_cost(&rec(6), 0.05).unwrap());

        assert!((post_hoc_delta(&[rec(8)]).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!((post_hoc_delta(&[rec(8), rec(4)]).unwrap() - 1.0 / 12.0).abs() < 1e-12);
        assert!(post_hoc_delta(&[]).is_err());
        let mut third = rec(0);
        third.local_costs = vec![1, 1, 0];
        third.r = 2;
        assert!(post_hoc_delta(&[third]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn success_operator_spectrum_n8() {
        let report = success_operator_check(8, 2).unwrap();
        assert_eq!(report.num_partitions, 12);
        assert!((report.lcs_value - 1.0).abs() < 1e-10);
        assert!((report.top_eigenvalue - 1.0).abs() < 1e-10);
        assert!(report.min_eigenvalue > -1e-10);
        assert!(report.top_eigenvalue < 1.0 + 1e-10);
        // Two clusters touch at most four generators, so the expansion cannot
        // reach all 2^8 group elements and uniqueness is not implied.
        assert!(!report.spans_all_stabilizers);
        assert!(report.top_multiplicity >= 1);
    }

    #[test]
    fn cluster_projector_on_lcs_is_one() {
        let lcs = make_lcs_dense(6).unwrap();
        let proj = cluster_projector(6, [4, 5, 0, 1], &[1.0 / 3.0; 3]).unwrap();
        assert!((lcs.expectation(&proj).unwrap() - 1.0).abs() < 1e-12);
    }
}
