//! Targets mixed with separable noise.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::dense::{lcs_generator, make_lcs_dense};
use crate::error::{invalid, Error, Result};
use crate::pauli::PauliObservable;
use crate::protocols::{run_scheme_trial, NoiseBranch, SchemeConfig, TrialRecord};
use crate::source::{ProductState, StateHandle};

#[derive(Debug, Clone, PartialEq)]
pub enum NoiseKind {
    /// Maximally mixed state: every Pauli measurement is a fair coin.
    White,
    /// Product of single-qubit states.
    Colored(Arc<ProductState>),
}

/// `λ ρ_noise + (1 - λ) ρ_target`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    lambda: f64,
    kind: NoiseKind,
}

impl NoiseModel {
    pub fn new(lambda: f64, kind: NoiseKind) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Config(format!("noise weight {lambda} outside [0, 1]")));
        }
        Ok(NoiseModel { lambda, kind })
    }

    pub fn white(lambda: f64) -> Result<Self> {
        Self::new(lambda, NoiseKind::White)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn kind(&self) -> &NoiseKind {
        &self.kind
    }

    /// Preparation used on the noise branch for an `n`-qubit register.
    pub fn noise_source(&self, n: usize) -> Result<StateHandle> {
        match &self.kind {
            NoiseKind::White => Ok(StateHandle::White(n)),
            NoiseKind::Colored(p) if p.num_qubits() == n => Ok(StateHandle::Product(Arc::clone(p))),
            NoiseKind::Colored(p) => Err(Error::Dimension { expected: n, actual: p.num_qubits() }),
        }
    }
}

/// One trial on the noisy source. The branch is drawn first and recorded
/// for diagnostics only.
pub fn sample_noisy_trial<R: Rng + ?Sized>(
    model: &NoiseModel,
    target: &StateHandle,
    scheme: &SchemeConfig,
    threshold: Option<f64>,
    rng: &mut R,
) -> Result<TrialRecord> {
    let n = target.num_qubits();
    let noisy = rng.gen::<f64>() < model.lambda;
    let mut record = if noisy {
        run_scheme_trial(scheme, &model.noise_source(n)?, threshold, rng)?
    } else {
        run_scheme_trial(scheme, target, threshold, rng)?
    };
    record.noise_branch = Some(if noisy { NoiseBranch::Noise } else { NoiseBranch::Target });
    Ok(record)
}

/// Average number of runs until the first success, `1 / ((1 - λ) p0)`.
pub fn expected_copies(p0: f64, lambda: f64) -> Result<f64> {
    let rate = (1.0 - lambda) * p0;
    if !(rate > 0.0) || !(0.0..=1.0).contains(&p0) || !(0.0..=1.0).contains(&lambda) {
        return Err(invalid(format!("no successes expected with p0 = {p0}, lambda = {lambda}")));
    }
    Ok(1.0 / rate)
}

/// `<W_k>` with `W_k = 1 - G_k - G_{k+1}` on `λ 1/2^N + (1 - λ)|LCS><LCS|`.
/// The generators are traceless and `<W_k>_LCS = -1`, giving `2λ - 1`.
pub fn lcs_witness_expectation(lambda: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(invalid(format!("lambda = {lambda} outside [0, 1]")));
    }
    Ok(2.0 * lambda - 1.0)
}

/// Witness `1 - G_k - G_{k+1}` on an `n`-qubit ring, `k` 0-based.
pub fn lcs_witness(n: usize, k: usize) -> Result<PauliObservable> {
    let g = lcs_generator(n, k)?.add(&lcs_generator(n, (k + 1) % n)?)?;
    PauliObservable::identity(n).add(&g.scale(-1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessComparison {
    pub lambda: f64,
    pub witness: f64,
    pub witness_detects: bool,
    /// Mixing-law prediction `λ p_noise + (1 - λ) p_target` of the scheme's success probability.
    pub predicted_success: f64,
}

/// Dense `<W_k>`: white noise contributes the identity coefficient.
pub fn lcs_witness_dense(n: usize, k: usize, lambda: f64) -> Result<f64> {
    let w = lcs_witness(n, k)?;
    let trace_part: f64 = w.terms().iter().filter(|(_, s)| s.is_identity()).map(|(c, _)| c).sum();
    let lcs = make_lcs_dense(n)?;
    Ok(lambda * trace_part + (1.0 - lambda) * lcs.expectation(&w)?)
}

pub fn compare_witness(lambda: f64, p_noise: f64, p_target: f64) -> Result<WitnessComparison> {
    let witness = lcs_witness_expectation(lambda)?;
    Ok(WitnessComparison {
        lambda,
        witness,
        witness_detects: witness < 0.0,
        predicted_success: lambda * p_noise + (1.0 - lambda) * p_target,
    })
}
