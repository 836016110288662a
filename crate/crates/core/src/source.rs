//! Preparable quantum sources.
//!
//! A [`StateHandle`] stands for a device that hands out one fresh copy per
//! trial. Every protocol in this crate fixes all measurement bases before any
//! outcome is seen, so a copy is consumed by a single
//! [`StateHandle::measure_all`] call.

use std::sync::Arc;

use rand::Rng;

use crate::dense::PureState;
use crate::error::{invalid, Error, Result};
use crate::pauli::Basis;
use crate::stabilizer::StabilizerTableau;

/// Product of single-qubit states given by Bloch vectors (length <= 1).
#[derive(Debug, Clone, PartialEq)]
pub struct ProductState {
    bloch: Vec<[f64; 3]>,
}

impl ProductState {
    pub fn new(bloch: Vec<[f64; 3]>) -> Result<Self> {
        if bloch.is_empty() {
            return Err(Error::Empty("product state qubits"));
        }
        for r in &bloch {
            let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
            if len > 1.0 + 1e-9 || r.iter().any(|c| !c.is_finite()) {
                return Err(invalid(format!("Bloch vector {r:?} outside the unit ball")));
            }
        }
        Ok(ProductState { bloch })
    }

    /// Pure qubits `cos(θ/2)|0> + e^{iφ} sin(θ/2)|1>`.
    pub fn from_angles(angles: &[(f64, f64)]) -> Result<Self> {
        Self::new(angles.iter().map(|&(t, p)| [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()]).collect())
    }

    /// Labels `0 1 + - r l` (r/l are the +1/-1 eigenstates of Y), repeated
    /// cyclically to cover `n` qubits.
    pub fn from_labels(labels: &str, n: usize) -> Result<Self> {
        let per: Vec<[f64; 3]> = labels
            .chars()
            .map(|c| match c {
                '0' => Ok([0.0, 0.0, 1.0]),
                '1' => Ok([0.0, 0.0, -1.0]),
                '+' => Ok([1.0, 0.0, 0.0]),
                '-' => Ok([-1.0, 0.0, 0.0]),
                'r' => Ok([0.0, 1.0, 0.0]),
                'l' => Ok([0.0, -1.0, 0.0]),
                _ => Err(invalid(format!("unknown qubit label {c:?}"))),
            })
            .collect::<Result<_>>()?;
        if per.is_empty() {
            return Err(Error::Empty("product state labels"));
        }
        Self::new((0..n).map(|q| per[q % per.len()]).collect())
    }

    /// Repeat a block of Bloch vectors until `n` qubits are covered.
    pub fn tiled(block: &[[f64; 3]], n: usize) -> Result<Self> {
        if block.is_empty() {
            return Err(Error::Empty("product state block"));
        }
        Self::new((0..n).map(|q| block[q % block.len()]).collect())
    }

    pub fn num_qubits(&self) -> usize {
        self.bloch.len()
    }

    pub fn bloch(&self) -> &[[f64; 3]] {
        &self.bloch
    }

    pub fn prob_zero(&self, qubit: usize, basis: Basis) -> f64 {
        (1.0 + self.bloch[qubit][basis.index()]) / 2.0
    }

    /// Dense pure state; only valid when every Bloch vector has unit length.
    pub fn to_dense(&self) -> Result<PureState> {
        let qubits = self
            .bloch
            .iter()
            .map(|r| {
                let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
                if (len - 1.0).abs() > 1e-9 {
                    return Err(invalid("mixed qubit has no pure-state vector"));
                }
                Ok(PureState::qubit(r[2].clamp(-1.0, 1.0).acos(), r[1].atan2(r[0])))
            })
            .collect::<Result<Vec<_>>>()?;
        crate::dense::make_product(&qubits)
    }
}

#[derive(Debug, Clone)]
pub enum StateHandle {
    Dense(Arc<PureState>),
    Stabilizer(Arc<StabilizerTableau>),
    Product(Arc<ProductState>),
    /// Maximally mixed state on `n` qubits.
    White(usize),
    /// Classical mixture; weights must sum to 1. One branch is drawn per copy.
    Mixture(Vec<(f64, StateHandle)>),
    /// Tensor product of independent blocks on consecutive qubits.
    Blocks(Vec<StateHandle>),
}

impl From<PureState> for StateHandle {
    fn from(s: PureState) -> Self {
        StateHandle::Dense(Arc::new(s))
    }
}

impl From<StabilizerTableau> for StateHandle {
    fn from(t: StabilizerTableau) -> Self {
        StateHandle::Stabilizer(Arc::new(t))
    }
}

impl From<ProductState> for StateHandle {
    fn from(p: ProductState) -> Self {
        StateHandle::Product(Arc::new(p))
    }
}

impl StateHandle {
    pub fn mixture(branches: Vec<(f64, StateHandle)>) -> Result<Self> {
        let Some((_, first)) = branches.first() else {
            return Err(Error::Empty("mixture branches"));
        };
        let n = first.num_qubits();
        let total: f64 = branches.iter().map(|(w, _)| *w).sum();
        if branches.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(invalid("mixture weights must be nonnegative and sum to 1"));
        }
        if let Some((_, b)) = branches.iter().find(|(_, b)| b.num_qubits() != n) {
            return Err(Error::Dimension { expected: n, actual: b.num_qubits() });
        }
        Ok(StateHandle::Mixture(branches))
    }

    /// `k` copies of the same block side by side.
    pub fn repeated(block: StateHandle, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Empty("blocks"));
        }
        Ok(StateHandle::Blocks(vec![block; k]))
    }

    pub fn num_qubits(&self) -> usize {
        match self {
            StateHandle::Dense(s) => s.num_qubits(),
            StateHandle::Stabilizer(t) => t.num_qubits(),
            StateHandle::Product(p) => p.num_qubits(),
            StateHandle::White(n) => *n,
            StateHandle::Mixture(b) => b.first().map_or(0, |(_, s)| s.num_qubits()),
            StateHandle::Blocks(b) => b.iter().map(StateHandle::num_qubits).sum(),
        }
    }

    /// Prepare one copy and measure qubit `k` in `bases[k]`.
    ///
    /// Stabilizer copies are measured in qubit-index order and draw one
    /// random value per indeterminate outcome.
    pub fn measure_all<R: Rng + ?Sized>(&self, bases: &[Basis], rng: &mut R) -> Result<Vec<u8>> {
        if bases.len() != self.num_qubits() {
            return Err(Error::Dimension { expected: self.num_qubits(), actual: bases.len() });
        }
        match self {
            StateHandle::Dense(s) => s.sample_all(bases, rng),
            StateHandle::Stabilizer(t) => {
                let mut copy = (**t).clone();
                bases.iter().enumerate().map(|(q, &b)| copy.measure_pauli(q, b, rng)).collect()
            }
            StateHandle::Product(p) => {
                Ok(bases.iter().enumerate().map(|(q, &b)| (rng.gen::<f64>() >= p.prob_zero(q, b)) as u8).collect())
            }
            StateHandle::White(_) => Ok(bases.iter().map(|_| rng.gen::<bool>() as u8).collect()),
            StateHandle::Mixture(branches) => {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                for (w, branch) in branches {
                    acc += w;
                    if u < acc {
                        return branch.measure_all(bases, rng);
                    }
                }
                branches.last().expect("validated nonempty").1.measure_all(bases, rng)
            }
            StateHandle::Blocks(blocks) => {
                let mut out = Vec::with_capacity(bases.len());
                let mut offset = 0;
                for b in blocks {
                    let k = b.num_qubits();
                    out.extend(b.measure_all(&bases[offset..offset + k], rng)?);
                    offset += k;
                }
                Ok(out)
            }
        }
    }
}
