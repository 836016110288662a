//! Optimization of Pauli-sum expectations over pure product states.
//!
//! For a product state the expectation of a Pauli string is the product of
//! the Bloch components it selects, so the objective is multilinear in the
//! Bloch vectors and never needs a dense state.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hamiltonian::LocalHamiltonian;
use crate::pauli::PauliObservable;
use crate::rng::trial_stream;
use crate::source::ProductState;

pub const GRID_QUBIT_LIMIT: usize = 6;
pub const SEESAW_QUBIT_LIMIT: usize = 12;
/// Upper limit on grid leaves when more than one qubit is gridded.
pub const GRID_BUDGET: usize = 1 << 26;

/// Per-qubit angular grid: `theta` points on `[0, π]` and `phi` points on `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridResolution {
    pub theta: usize,
    pub phi: usize,
}

impl Default for GridResolution {
    /// 200 polar intervals by 400 azimuthal points.
    fn default() -> Self {
        GridResolution { theta: 201, phi: 400 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleMethod {
    /// Exhaustive search; every qubit but the last is gridded and the last one
    /// is optimized in closed form.
    Grid(GridResolution),
    SeeSaw {
        restarts: usize,
        max_sweeps: usize,
    },
}

impl OracleMethod {
    pub fn grid() -> Self {
        OracleMethod::Grid(GridResolution::default())
    }

    pub fn seesaw() -> Self {
        OracleMethod::SeeSaw { restarts: 64, max_sweeps: 1000 }
    }
}

/// Pure product state by Bloch angles `(θ, φ)` per qubit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductAnsatz {
    pub angles: Vec<(f64, f64)>,
}

impl ProductAnsatz {
    pub fn from_bloch(bloch: &[[f64; 3]]) -> Self {
        ProductAnsatz { angles: bloch.iter().map(|r| angles_of(*r)).collect() }
    }

    pub fn num_qubits(&self) -> usize {
        self.angles.len()
    }

    pub fn bloch(&self) -> Vec<[f64; 3]> {
        self.angles.iter().map(|&(t, p)| bloch_of(t, p)).collect()
    }

    pub fn to_product_state(&self) -> Result<ProductState> {
        ProductState::new(self.bloch())
    }
}

fn bloch_of(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

fn angles_of(r: [f64; 3]) -> (f64, f64) {
    let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    if len == 0.0 {
        return (0.0, 0.0);
    }
    let theta = (r[2] / len).clamp(-1.0, 1.0).acos();
    let phi = r[1].atan2(r[0]).rem_euclid(2.0 * PI);
    (theta, phi)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub value: f64,
    pub ansatz: ProductAnsatz,
    /// Objective after each sweep of the winning see-saw restart; empty for the grid.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub history: Vec<f64>,
}

/// Observable as `(coeff, [(qubit, component)])` with components 0, 1, 2 for X, Y, Z.
struct Compiled {
    n: usize,
    terms: Vec<(f64, Vec<(usize, usize)>)>,
}

impl Compiled {
    fn new(obs: &PauliObservable) -> Self {
        let terms = obs
            .simplified()
            .terms()
            .iter()
            .map(|(c, s)| {
                let ops = s.0.iter().enumerate().filter_map(|(q, p)| p.basis().map(|b| (q, b.index()))).collect();
                (*c, ops)
            })
            .collect();
        Compiled { n: obs.num_qubits(), terms }
    }

    fn value(&self, bloch: &[[f64; 3]]) -> f64 {
        self.terms.iter().map(|(c, ops)| c * ops.iter().map(|&(q, k)| bloch[q][k]).product::<f64>()).sum()
    }

    /// Linear coefficient `a` of the objective in the Bloch vector of qubit `j`.
    fn local_field(&self, bloch: &[[f64; 3]], j: usize, touching: &[usize]) -> [f64; 3] {
        let mut a = [0.0; 3];
        for &t in touching {
            let (c, ops) = &self.terms[t];
            let mut prod = *c;
            let mut comp = 0;
            for &(q, k) in ops {
                if q == j {
                    comp = k;
                } else {
                    prod *= bloch[q][k];
                }
            }
            a[comp] += prod;
        }
        a
    }
}

/// Exact expectation of `obs` on the product of the given Bloch vectors.
pub fn product_expectation(obs: &PauliObservable, bloch: &[[f64; 3]]) -> Result<f64> {
    if bloch.len() != obs.num_qubits() {
        return Err(Error::Dimension { expected: obs.num_qubits(), actual: bloch.len() });
    }
    Ok(Compiled::new(obs).value(bloch))
}

/// Largest `<obs>` over pure product states.
pub fn max_product_expectation<R: Rng + ?Sized>(
    obs: &PauliObservable,
    method: OracleMethod,
    rng: &mut R,
) -> Result<OracleResult> {
    let n = obs.num_qubits();
    if n == 0 {
        return Err(Error::Empty("observable qubits"));
    }
    match method {
        OracleMethod::Grid(res) => {
            if n > GRID_QUBIT_LIMIT {
                return Err(Error::Config(format!("grid search supports at most {GRID_QUBIT_LIMIT} qubits, got {n}")));
            }
            grid_max(&Compiled::new(obs), res)
        }
        OracleMethod::SeeSaw { restarts, max_sweeps } => {
            if n > SEESAW_QUBIT_LIMIT {
                return Err(Error::Config(format!("see-saw supports at most {SEESAW_QUBIT_LIMIT} qubits, got {n}")));
            }
            seesaw_max(&Compiled::new(obs), restarts, max_sweeps, rng)
        }
    }
}

/// Smallest `<obs>` over pure product states.
pub fn min_product_expectation<R: Rng + ?Sized>(
    obs: &PauliObservable,
    method: OracleMethod,
    rng: &mut R,
) -> Result<OracleResult> {
    let mut r = max_product_expectation(&obs.scale(-1.0), method, rng)?;
    r.value = -r.value;
    r.history.iter_mut().for_each(|v| *v = -*v);
    Ok(r)
}

/// Minimal product-state energy `n ε_s` of a local Hamiltonian, optimizing
/// all sites jointly so shared sites are handled consistently.
pub fn min_product_energy<R: Rng + ?Sized>(
    h: &LocalHamiltonian,
    method: OracleMethod,
    rng: &mut R,
) -> Result<OracleResult> {
    let obs = h.to_observable()?;
    match method {
        OracleMethod::SeeSaw { restarts, max_sweeps } => {
            let limit = crate::dense::DEFAULT_DENSE_LIMIT;
            if obs.num_qubits() > limit {
                return Err(Error::DenseLimit { qubits: obs.num_qubits(), limit });
            }
            let mut r = seesaw_max(&Compiled::new(&obs.scale(-1.0)), restarts, max_sweeps, rng)?;
            r.value = -r.value;
            r.history.iter_mut().for_each(|v| *v = -*v);
            Ok(r)
        }
        OracleMethod::Grid(_) => min_product_expectation(&obs, method, rng),
    }
}

/// Grid points per gridded qubit: the requested resolution when a single
/// qubit is gridded, otherwise an odd/multiple-of-four grid within budget.
/// Both shapes contain the six Pauli eigenstates.
fn grid_points(gridded: usize, res: GridResolution) -> Result<(Vec<[f64; 3]>, usize, usize)> {
    let (t_count, p_count) = if gridded <= 1 {
        if res.theta < 2 || res.phi < 1 {
            return Err(invalid("grid needs at least 2 polar and 1 azimuthal point"));
        }
        (res.theta, res.phi)
    } else {
        let per = (GRID_BUDGET as f64).powf(1.0 / gridded as f64).floor() as usize;
        let mut j = 1;
        while (2 * (j + 1) + 1) * 4 * (j + 1) <= per.min(res.theta * res.phi) {
            j += 1;
        }
        (2 * j + 1, 4 * j)
    };
    let mut pts = Vec::with_capacity(t_count * p_count);
    for i in 0..t_count {
        let theta = PI * i as f64 / (t_count - 1) as f64;
        for k in 0..p_count {
            pts.push(bloch_of(theta, 2.0 * PI * k as f64 / p_count as f64));
        }
    }
    Ok((pts, t_count, p_count))
}

fn grid_max(obj: &Compiled, res: GridResolution) -> Result<OracleResult> {
    let n = obj.n;
    let last = n - 1;
    let (pts, t_count, p_count) = grid_points(last, res)?;
    let leaf = |partial: &[f64]| -> (f64, [f64; 3]) {
        let mut c = 0.0;
        let mut a = [0.0; 3];
        for ((_, ops), p) in obj.terms.iter().zip(partial) {
            match ops.last() {
                Some(&(q, k)) if q == last => a[k] += p,
                _ => c += p,
            }
        }
        (c + (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt(), a)
    };
    let base: Vec<f64> = obj.terms.iter().map(|(c, _)| *c).collect();

    if last == 0 {
        let (value, a) = leaf(&base);
        let r = unit_or_default(a);
        return Ok(OracleResult { value, ansatz: ProductAnsatz::from_bloch(&[r]), history: Vec::new() });
    }

    // Each shard fixes qubit 0 and walks the remaining gridded qubits depth-first.
    let shards: Vec<(f64, Vec<usize>, [f64; 3])> = (0..pts.len())
        .into_par_iter()
        .map(|i0| {
            let mut best = (f64::NEG_INFINITY, vec![i0; last], [0.0; 3]);
            let mut idx = vec![0usize; last];
            idx[0] = i0;
            let mut stack = vec![base.clone(); last + 1];
            apply_qubit(obj, &base, 0, &pts[i0], &mut stack[1]);
            walk(obj, &pts, 1, last, &mut idx, &mut stack, &leaf, &mut best);
            best
        })
        .collect();
    let mut best = shards[0].clone();
    for s in shards.into_iter().skip(1) {
        if s.0 > best.0 {
            best = s;
        }
    }
    let (value, idx, a) = best;
    let mut bloch: Vec<[f64; 3]> = idx.iter().map(|&i| pts[i]).collect();
    bloch.push(unit_or_default(a));
    let mut ansatz = ProductAnsatz::from_bloch(&bloch);
    // Report the grid angles themselves rather than their round trip.
    for (q, &i) in idx.iter().enumerate() {
        ansatz.angles[q] =
            (PI * (i / p_count) as f64 / (t_count - 1) as f64, 2.0 * PI * (i % p_count) as f64 / p_count as f64);
    }
    Ok(OracleResult { value, ansatz, history: Vec::new() })
}

#[allow(clippy::too_many_arguments)]
fn walk<F>(
    obj: &Compiled,
    pts: &[[f64; 3]],
    depth: usize,
    last: usize,
    idx: &mut Vec<usize>,
    stack: &mut Vec<Vec<f64>>,
    leaf: &F,
    best: &mut (f64, Vec<usize>, [f64; 3]),
) where
    F: Fn(&[f64]) -> (f64, [f64; 3]),
{
    if depth == last {
        let (v, a) = leaf(&stack[depth]);
        if v > best.0 {
            *best = (v, idx.clone(), a);
        }
        return;
    }
    for (i, p) in pts.iter().enumerate() {
        idx[depth] = i;
        let (lower, upper) = stack.split_at_mut(depth + 1);
        apply_qubit(obj, &lower[depth], depth, p, &mut upper[0]);
        walk(obj, pts, depth + 1, last, idx, stack, leaf, best);
    }
}

fn apply_qubit(obj: &Compiled, from: &[f64], qubit: usize, r: &[f64; 3], to: &mut [f64]) {
    for ((t, (_, ops)), out) in obj.terms.iter().enumerate().zip(to.iter_mut()) {
        *out = match ops.iter().find(|&&(q, _)| q == qubit) {
            Some(&(_, k)) => from[t] * r[k],
            None => from[t],
        };
    }
}

fn unit_or_default(a: [f64; 3]) -> [f64; 3] {
    let len = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    if len < 1e-14 {
        [0.0, 0.0, 1.0]
    } else {
        [a[0] / len, a[1] / len, a[2] / len]
    }
}

fn seesaw_max<R: Rng + ?Sized>(
    obj: &Compiled,
    restarts: usize,
    max_sweeps: usize,
    rng: &mut R,
) -> Result<OracleResult> {
    if restarts == 0 || max_sweeps == 0 {
        return Err(invalid("see-saw needs at least one restart and one sweep"));
    }
    let n = obj.n;
    let mut touching = vec![Vec::new(); n];
    for (t, (_, ops)) in obj.terms.iter().enumerate() {
        for &(q, _) in ops {
            touching[q].push(t);
        }
    }
    let seed: u64 = rng.gen();
    let runs: Vec<(f64, Vec<[f64; 3]>, Vec<f64>)> = (0..restarts as u64)
        .into_par_iter()
        .map(|r| {
            let mut stream = trial_stream(seed, r);
            let mut bloch: Vec<[f64; 3]> = (0..n)
                .map(|_| {
                    let z: f64 = stream.gen_range(-1.0..=1.0);
                    let phi: f64 = stream.gen_range(0.0..2.0 * PI);
                    let s = (1.0 - z * z).max(0.0).sqrt();
                    [s * phi.cos(), s * phi.sin(), z]
                })
                .collect();
            let mut value = obj.value(&bloch);
            let mut history = vec![value];
            for _ in 0..max_sweeps {
                for j in 0..n {
                    let a = obj.local_field(&bloch, j, &touching[j]);
                    let len = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
                    if len > 1e-14 {
                        bloch[j] = [a[0] / len, a[1] / len, a[2] / len];
                    }
                }
                let next = obj.value(&bloch);
                history.push(next);
                let done = next - value < 1e-13;
                value = next;
                if done {
                    break;
                }
            }
            (value, bloch, history)
        })
        .collect();
    let mut best = &runs[0];
    for run in &runs[1..] {
        if run.0 > best.0 {
            best = run;
        }
    }
    let ansatz = ProductAnsatz::from_bloch(&best.1);
    // Value of the reported angles, so that re-evaluation reproduces it.
    let value = obj.value(&ansatz.bloch());
    Ok(OracleResult { value, ansatz, history: best.2.clone() })
}

/// `(Q + W + R)/3` on a pair: the average over XX, YY, ZZ of the
/// anticorrelation projectors.
pub fn singlet_success_observable() -> PauliObservable {
    PauliObservable::from_strs(&[(0.5, "II"), (-1.0 / 6.0, "XX"), (-1.0 / 6.0, "YY"), (-1.0 / 6.0, "ZZ")])
        .expect("valid literal")
}

/// Average over ZXZZ, ZZXZ, ZYYZ of the single-cluster success projectors.
pub fn cluster_success_observable() -> PauliObservable {
    crate::protocols::cluster_projector(4, [0, 1, 2, 3], &[1.0 / 3.0; 3]).expect("valid cluster")
}
