//! Local Hamiltonians and the ground-state detection scheme.
//!
//! Each term is expanded in the overcomplete basis of outcome projectors
//! `E_{m,i} = (1 + (-1)^i σ_m) / 2`. A single-copy run measures every site in
//! a uniformly random Pauli basis and evaluates the unbiased estimator
//! `H_[N] = Σ_k 3^{|S_k|} h^(k)[x]`.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::mcdiarmid_constants;
use crate::dense::{apply_into, PureState, DEFAULT_DENSE_LIMIT};
use crate::error::{invalid, Error, Result};
use crate::pauli::{Basis, Pauli, PauliObservable, PauliString};
use crate::protocols::{NoiseBranch, Scheme, TrialRecord};
use crate::rng::stream_from_seed;
use crate::sep_oracle::{min_product_energy, min_product_expectation, OracleMethod, ProductAnsatz, GRID_QUBIT_LIMIT};
use crate::source::StateHandle;

/// Number of measurement settings per site.
pub const M_SETTINGS: usize = 3;
/// Outcome projectors per site: `(m, i)` flattened as `2m + i`.
const OUTCOMES: usize = 2 * M_SETTINGS;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianTerm {
    /// 0-based sites the term acts on.
    pub sites: Vec<usize>,
    /// Pauli strings over `sites` (one letter per site) and their coefficients.
    pub paulis: BTreeMap<String, f64>,
}

impl HamiltonianTerm {
    /// Term as an observable on its own support, qubit `j` being `sites[j]`.
    pub fn local_observable(&self) -> Result<PauliObservable> {
        let s = self.sites.len();
        let terms = self
            .paulis
            .iter()
            .map(|(p, c)| {
                let ps: PauliString = p.parse()?;
                if ps.len() != s {
                    return Err(invalid(format!("Pauli string {p:?} does not match {s} sites")));
                }
                Ok((*c, ps))
            })
            .collect::<Result<Vec<_>>>()?;
        PauliObservable::new(s, terms)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalHamiltonian {
    pub n: usize,
    #[serde(rename = "L")]
    pub locality: usize,
    pub terms: Vec<HamiltonianTerm>,
}

impl LocalHamiltonian {
    pub fn new(n: usize, locality: usize, terms: Vec<HamiltonianTerm>) -> Result<Self> {
        let h = LocalHamiltonian { n, locality, terms };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.locality == 0 {
            return Err(Error::Config("a Hamiltonian needs n >= 1 and L >= 1".into()));
        }
        if self.terms.is_empty() {
            return Err(Error::Empty("Hamiltonian terms"));
        }
        for (k, t) in self.terms.iter().enumerate() {
            if t.sites.is_empty() || t.sites.len() > self.locality {
                return Err(Error::Config(format!(
                    "term {k} acts on {} sites, locality is {}",
                    t.sites.len(),
                    self.locality
                )));
            }
            if let Some(&s) = t.sites.iter().find(|&&s| s >= self.n) {
                return Err(Error::Config(format!("term {k} references site {s} of {}", self.n)));
            }
            let mut sorted = t.sites.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != t.sites.len() {
                return Err(Error::Config(format!("term {k} repeats a site")));
            }
            if t.paulis.values().any(|c| !c.is_finite()) {
                return Err(Error::Config(format!("term {k} has a non-finite coefficient")));
            }
            t.local_observable().map_err(|e| match e {
                Error::InvalidArgument(m) => Error::UnsupportedOperator(format!("term {k}: {m}")),
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let h: LocalHamiltonian = serde_json::from_str(s)?;
        h.validate()?;
        Ok(h)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn n_sites(&self) -> usize {
        self.n
    }

    /// Support of every term, in term order.
    pub fn neighbour_matrix(&self) -> Vec<Vec<usize>> {
        self.terms.iter().map(|t| t.sites.clone()).collect()
    }

    pub fn term_observable(&self, k: usize) -> Result<PauliObservable> {
        let t = self.terms.get(k).ok_or_else(|| invalid(format!("no term {k}")))?;
        t.local_observable()?.embed(self.n, &t.sites)
    }

    pub fn to_observable(&self) -> Result<PauliObservable> {
        let mut total = PauliObservable::zero(self.n);
        for k in 0..self.terms.len() {
            total = total.add(&self.term_observable(k)?)?;
        }
        Ok(total)
    }

    /// Largest number of terms acting on one site.
    pub fn max_site_degree(&self) -> usize {
        let mut deg = vec![0usize; self.n];
        for t in &self.terms {
            for &s in &t.sites {
                deg[s] += 1;
            }
        }
        deg.into_iter().max().unwrap_or(0)
    }

    /// Ordered term pairs `(j, k)`, `j = k` included, whose supports overlap.
    pub fn crossing_pairs(&self) -> usize {
        let supports = self.neighbour_matrix();
        supports.iter().map(|a| supports.iter().filter(|b| a.iter().any(|s| b.contains(s))).count()).sum()
    }

    /// `Σ_k (X_k X_{k+1} + Y_k Y_{k+1} + Z_k Z_{k+1}) / 4` on a ring.
    pub fn heisenberg_ring(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(invalid("a ring needs at least 3 sites"));
        }
        let paulis: BTreeMap<String, f64> =
            [("XX", 0.25), ("YY", 0.25), ("ZZ", 0.25)].iter().map(|(p, c)| (p.to_string(), *c)).collect();
        let terms = (0..n).map(|k| HamiltonianTerm { sites: vec![k, (k + 1) % n], paulis: paulis.clone() }).collect();
        Self::new(n, 2, terms)
    }

    /// `Σ_k Z_k`.
    pub fn z_field(n: usize) -> Result<Self> {
        let terms = (0..n)
            .map(|k| HamiltonianTerm { sites: vec![k], paulis: [("Z".to_string(), 1.0)].into_iter().collect() })
            .collect();
        Self::new(n, 1, terms)
    }

    /// `-Σ_k Z_{k-1} X_k Z_{k+1}` on a ring; its unique ground state is the cluster state.
    pub fn lcs_parent(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(invalid("a ring needs at least 3 sites"));
        }
        let terms = (0..n)
            .map(|k| HamiltonianTerm {
                sites: vec![(k + n - 1) % n, k, (k + 1) % n],
                paulis: [("ZXZ".to_string(), -1.0)].into_iter().collect(),
            })
            .collect();
        Self::new(n, 3, terms)
    }
}

/// Coefficients of one term in the outcome-projector basis. Entry
/// `x = (x_1, ..., x_s)` with `x_j = 2 m_j + i_j` is stored at the
/// base-6 index with `x_1` most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionTensor {
    pub sites: Vec<usize>,
    pub values: Vec<f64>,
}

impl DecompositionTensor {
    pub fn get(&self, x: &[usize]) -> f64 {
        self.values[x.iter().fold(0, |acc, &v| acc * OUTCOMES + v)]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `Σ_x h_x E_{x_1} ⊗ ... ⊗ E_{x_s}` on the support.
    pub fn reconstruct(&self) -> Result<PauliObservable> {
        let s = self.sites.len();
        let mut acc: BTreeMap<PauliString, f64> = BTreeMap::new();
        for (idx, &h) in self.values.iter().enumerate() {
            if h == 0.0 {
                continue;
            }
            let xs = digits(idx, s);
            // Expand Π_j (I + (-1)^{i_j} σ_{m_j}) / 2 over subsets.
            for subset in 0..(1usize << s) {
                let mut coeff = h / (1u64 << s) as f64;
                let mut ops = vec![Pauli::I; s];
                for (j, &x) in xs.iter().enumerate() {
                    if subset >> j & 1 == 1 {
                        ops[j] = Basis::ALL[x / 2].pauli();
                        if x % 2 == 1 {
                            coeff = -coeff;
                        }
                    }
                }
                *acc.entry(PauliString(ops)).or_default() += coeff;
            }
        }
        Ok(PauliObservable::new(s, acc.into_iter().map(|(p, c)| (c, p)).collect())?.simplified())
    }
}

fn digits(mut idx: usize, s: usize) -> Vec<usize> {
    let mut xs = vec![0; s];
    for j in (0..s).rev() {
        xs[j] = idx % OUTCOMES;
        idx /= OUTCOMES;
    }
    xs
}

/// Canonical expansion: identity goes to `(1/3) Σ_x E_x` and `σ_m` to
/// `E_{m,0} - E_{m,1}`, factor by factor.
pub fn decompose_term(term: &HamiltonianTerm) -> Result<DecompositionTensor> {
    let obs = term.local_observable().map_err(|e| Error::UnsupportedOperator(e.to_string()))?;
    let s = term.sites.len();
    let mut values = vec![0.0; OUTCOMES.pow(s as u32)];
    for (c, ps) in obs.terms() {
        let factors: Vec<[f64; OUTCOMES]> =
            ps.0.iter()
                .map(|p| {
                    let mut f = [0.0; OUTCOMES];
                    match p.basis() {
                        None => f.iter_mut().for_each(|v| *v = 1.0 / M_SETTINGS as f64),
                        Some(b) => {
                            f[2 * b.index()] = 1.0;
                            f[2 * b.index() + 1] = -1.0;
                        }
                    }
                    f
                })
                .collect();
        for (idx, v) in values.iter_mut().enumerate() {
            let prod: f64 = digits(idx, s).iter().zip(&factors).map(|(&x, f)| f[x]).product();
            *v += c * prod;
        }
    }
    Ok(DecompositionTensor { sites: term.sites.clone(), values })
}

pub fn decompose(h: &LocalHamiltonian) -> Result<Vec<DecompositionTensor>> {
    h.terms.iter().map(decompose_term).collect()
}

/// `Σ_k 3^{|S_k|} h^(k)` at the observed `(setting, outcome)` of every site.
pub fn eval_estimator(tensors: &[DecompositionTensor], outcomes: &[(Basis, u8)]) -> Result<f64> {
    let mut total = 0.0;
    for t in tensors {
        let mut idx = 0;
        for &s in &t.sites {
            let &(b, bit) = outcomes.get(s).ok_or_else(|| invalid(format!("no outcome for site {s}")))?;
            idx = idx * OUTCOMES + 2 * b.index() + bit as usize;
        }
        total += (M_SETTINGS as f64).powi(t.sites.len() as i32) * t.values[idx];
    }
    Ok(total)
}

/// Lowest eigenpair by restarted Lanczos with full reorthogonalization.
/// Returns `(ε_0, |ψ_0>)` with `ε_0 = E_0 / n`.
pub fn ground_state(h: &LocalHamiltonian) -> Result<(f64, PureState)> {
    if h.n > DEFAULT_DENSE_LIMIT {
        return Err(Error::DenseLimit { qubits: h.n, limit: DEFAULT_DENSE_LIMIT });
    }
    let obs = h.to_observable()?;
    let (e0, v) = lowest_eigenpair(&obs)?;
    Ok((e0 / h.n as f64, PureState::normalized(h.n, v)?))
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn lowest_eigenpair(obs: &PauliObservable) -> Result<(f64, Vec<Complex64>)> {
    const KRYLOV: usize = 80;
    const RESTARTS: usize = 60;
    let dim = 1usize << obs.num_qubits();
    let m_max = KRYLOV.min(dim);
    let mut rng = stream_from_seed(0x1a2c_2005);
    let mut start: Vec<Complex64> =
        (0..dim).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
    let scale = norm(&start);
    start.iter_mut().for_each(|x| *x /= scale);

    let zero = Complex64::new(0.0, 0.0);
    let mut best = (f64::INFINITY, start.clone());
    for _ in 0..RESTARTS {
        let mut basis: Vec<Vec<Complex64>> = vec![start.clone()];
        let mut alpha = Vec::with_capacity(m_max);
        let mut beta: Vec<f64> = Vec::with_capacity(m_max);
        let mut w = vec![zero; dim];
        loop {
            let j = basis.len() - 1;
            w.iter_mut().for_each(|x| *x = zero);
            apply_into(obs, &basis[j], &mut w);
            alpha.push(dot(&basis[j], &w).re);
            // Two passes of Gram-Schmidt against the whole basis.
            for _ in 0..2 {
                for v in &basis {
                    let c = dot(v, &w);
                    w.iter_mut().zip(v).for_each(|(x, y)| *x -= c * y);
                }
            }
            let b = norm(&w);
            if basis.len() == m_max || b < 1e-12 {
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }
        let m = alpha.len();
        let t = DMatrix::from_fn(m, m, |r, c| {
            if r == c {
                alpha[r]
            } else if r + 1 == c {
                beta[r]
            } else if c + 1 == r {
                beta[c]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let (imin, &theta) =
            eig.eigenvalues.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("nonempty tridiagonal");
        let y = eig.eigenvectors.column(imin);
        let mut x = vec![zero; dim];
        for (coef, v) in y.iter().zip(&basis) {
            x.iter_mut().zip(v).for_each(|(a, b)| *a += *coef * b);
        }
        let nx = norm(&x);
        x.iter_mut().for_each(|a| *a /= nx);
        let mut hx = vec![zero; dim];
        apply_into(obs, &x, &mut hx);
        let residual = norm(&hx.iter().zip(&x).map(|(a, b)| a - theta * b).collect::<Vec<_>>());
        best = (theta, x.clone());
        if residual < 1e-10 * theta.abs().max(1.0) {
            break;
        }
        start = x;
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub n: usize,
    pub locality: usize,
    pub m_settings: usize,
    pub num_terms: usize,
    pub epsilon_0: f64,
    pub epsilon_s: f64,
    /// Whether the see-saw `ε_s` matches the sum of term-wise grid minima,
    /// which bounds the true separable minimum from below.
    pub epsilon_s_verified: bool,
    pub g_e: f64,
    pub a: f64,
    /// `max_k |<target|H^(k)|target>|` on the declared target (the ground state).
    pub b: f64,
    pub h_max: f64,
    pub kappa2: f64,
    pub beta2: f64,
    pub crossing_pairs: usize,
}

/// Everything a Hamiltonian-scheme trial and its certificate need.
#[derive(Debug, Clone)]
pub struct HamiltonianScheme {
    hamiltonian: LocalHamiltonian,
    tensors: Vec<DecompositionTensor>,
    gap: GapReport,
    ground_state: Arc<PureState>,
    separable_minimizer: ProductAnsatz,
}

impl HamiltonianScheme {
    /// Decompose, diagonalize, and search for `ε_s` with the given number of
    /// see-saw restarts.
    pub fn analyze<R: Rng + ?Sized>(h: LocalHamiltonian, restarts: usize, rng: &mut R) -> Result<Self> {
        h.validate()?;
        let n = h.n;
        let l = h.locality;
        let tensors = decompose(&h)?;
        let (epsilon_0, psi0) = ground_state(&h)?;
        let sep = min_product_energy(&h, OracleMethod::SeeSaw { restarts, max_sweeps: 1000 }, rng)?;
        let epsilon_s = sep.value / n as f64;

        let mut cache: HashMap<String, f64> = HashMap::new();
        let mut lower = Some(0.0);
        for t in &h.terms {
            if t.sites.len() > GRID_QUBIT_LIMIT {
                lower = None;
                break;
            }
            let key = format!("{:?}", t.paulis);
            let v = match cache.get(&key) {
                Some(v) => *v,
                None => {
                    let v = min_product_expectation(&t.local_observable()?, OracleMethod::grid(), rng)?.value;
                    cache.insert(key, v);
                    v
                }
            };
            lower = lower.map(|s| s + v);
        }
        let epsilon_s_verified = lower.is_some_and(|lb| sep.value <= lb + 1e-4);

        // Terms narrower than L are padded with identity factors of 1/3.
        let a = tensors
            .iter()
            .map(|t| t.max_abs() * (M_SETTINGS as f64).powi(t.sites.len() as i32 - l as i32))
            .fold(0.0, f64::max);
        let mut b: f64 = 0.0;
        for k in 0..h.terms.len() {
            b = b.max(psi0.expectation(&h.term_observable(k)?)?.abs());
        }
        let eff_l = l.max(h.max_site_degree());
        let kappa2 = if a > 0.0 { mcdiarmid_constants(M_SETTINGS, eff_l, a)? } else { f64::INFINITY };
        let crossing = h.crossing_pairs();
        let pair_count = (2 * l * h.terms.len()).max(crossing) as f64;
        let m2l = (M_SETTINGS as f64).powi(2 * l as i32);
        let beta2 = pair_count / n as f64 * (m2l * a * a + b * b);

        let gap = GapReport {
            n,
            locality: l,
            m_settings: M_SETTINGS,
            num_terms: h.terms.len(),
            epsilon_0,
            epsilon_s,
            epsilon_s_verified,
            g_e: epsilon_s - epsilon_0,
            a,
            b,
            h_max: a,
            kappa2,
            beta2,
            crossing_pairs: crossing,
        };
        Ok(HamiltonianScheme {
            hamiltonian: h,
            tensors,
            gap,
            ground_state: Arc::new(psi0),
            separable_minimizer: sep.ansatz,
        })
    }

    pub fn hamiltonian(&self) -> &LocalHamiltonian {
        &self.hamiltonian
    }

    pub fn tensors(&self) -> &[DecompositionTensor] {
        &self.tensors
    }

    pub fn gap(&self) -> &GapReport {
        &self.gap
    }

    pub fn ground_state(&self) -> Arc<PureState> {
        Arc::clone(&self.ground_state)
    }

    /// Product state attaining the reported `ε_s`.
    pub fn separable_minimizer(&self) -> &ProductAnsatz {
        &self.separable_minimizer
    }

    pub fn check_delta(&self, delta: f64) -> Result<()> {
        if !(delta > 0.0 && delta < self.gap.g_e) {
            return Err(invalid(format!("delta = {delta} outside (0, g_E = {})", self.gap.g_e)));
        }
        Ok(())
    }
}

/// One run of the ground-state scheme. With `delta` the verdict is
/// `H_[N] <= n (ε_s - δ)`; without it the verdict is `H_[N] < n ε_s`.
pub fn run_hamiltonian_trial<R: Rng + ?Sized>(
    scheme: &HamiltonianScheme,
    source: &StateHandle,
    delta: Option<f64>,
    rng: &mut R,
) -> Result<TrialRecord> {
    if let Some(d) = delta {
        scheme.check_delta(d)?;
    }
    let n = scheme.hamiltonian.n;
    if source.num_qubits() != n {
        return Err(Error::Dimension { expected: n, actual: source.num_qubits() });
    }
    let bases: Vec<Basis> = (0..n).map(|_| Basis::ALL[rng.gen_range(0..M_SETTINGS)]).collect();
    let outcomes = source.measure_all(&bases, rng)?;
    let observed: Vec<(Basis, u8)> = bases.iter().copied().zip(outcomes.iter().copied()).collect();
    let estimator = eval_estimator(&scheme.tensors, &observed)?;
    let eps_s = scheme.gap.epsilon_s;
    let delta_hat = eps_s - estimator / n as f64;
    let success = match delta {
        Some(d) => estimator <= n as f64 * (eps_s - d) + 1e-9,
        None => delta_hat > 1e-9,
    };
    Ok(TrialRecord {
        scheme: Scheme::Hamiltonian,
        partition: None,
        settings: bases.iter().map(|b| b.as_char().to_string()).collect(),
        bases: bases.iter().map(|b| b.as_char()).collect(),
        outcomes: outcomes.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect(),
        local_costs: Vec::new(),
        r: 0,
        delta_hat,
        estimator: Some(estimator),
        threshold: delta,
        success,
        noise_branch: None::<NoiseBranch>,
    })
}
