//! Separable-state bounds on the probability of success.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::protocols::{Scheme, SEPARABLE_CEILING};

/// Tolerance for `p + δ` slightly above 1 from floating-point rounding,
/// e.g. `2/3 + 1/3`.
const EDGE_TOL: f64 = 1e-12;

/// Binary relative entropy `D(x||y)` in nats, with `0 log 0 = 0`.
pub fn kl_divergence(x: f64, y: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(invalid(format!("x = {x} outside [0, 1]")));
    }
    if !(y > 0.0 && y < 1.0) {
        return Err(invalid(format!("y = {y} outside (0, 1)")));
    }
    let term = |a: f64, b: f64| if a == 0.0 { 0.0 } else { a * (a / b).ln() };
    Ok((term(x, y) + term(1.0 - x, 1.0 - y)).max(0.0))
}

/// `exp(-D(p + δ || p) k)`.
pub fn chernoff_separable_bound(delta: f64, k: usize, p: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(invalid(format!("delta = {delta} must be positive")));
    }
    let x = p + delta;
    if x > 1.0 + EDGE_TOL {
        return Err(invalid(format!("p + delta = {x} exceeds 1")));
    }
    let d = kl_divergence(x.min(1.0), p)?;
    Ok((-d * k as f64).exp().clamp(0.0, 1.0))
}

/// `κ² = 1 / (2 M^{2L} L² h_max²)`.
pub fn mcdiarmid_constants(m_settings: usize, locality: usize, h_max: f64) -> Result<f64> {
    if m_settings == 0 || locality == 0 || !(h_max > 0.0) {
        return Err(invalid("McDiarmid constants need positive M, L and h_max"));
    }
    let m2l = (m_settings as f64).powi(2 * locality as i32);
    let l = locality as f64;
    Ok(1.0 / (2.0 * m2l * l * l * h_max * h_max))
}

/// `exp(-n κ² δ²)`.
pub fn mcdiarmid_separable_bound(n: usize, delta: f64, kappa2: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(invalid(format!("delta = {delta} must be positive")));
    }
    if !(kappa2 > 0.0) {
        return Err(invalid("kappa^2 must be positive"));
    }
    Ok((-(n as f64) * kappa2 * delta * delta).exp().clamp(0.0, 1.0))
}

/// Chebyshev lower bound `1 - β² / (n (g_E - δ)²)`, floored at 0.
pub fn ground_state_success_bound(n: usize, g_e: f64, delta: f64, beta2: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < g_e) {
        return Err(invalid(format!("delta = {delta} outside (0, g_E = {g_e})")));
    }
    if beta2 < 0.0 || n == 0 {
        return Err(invalid("beta^2 must be nonnegative and n positive"));
    }
    let margin = g_e - delta;
    Ok((1.0 - beta2 / (n as f64 * margin * margin)).clamp(0.0, 1.0))
}

/// Statement bounding the success probability of every separable input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub scheme: Scheme,
    pub delta: f64,
    /// Number of pairs or clusters for the binary schemes, sites for the Hamiltonian scheme.
    pub k_or_n: usize,
    pub bound: f64,
    pub confidence: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_e: Option<f64>,
    /// Chebyshev lower bound for the ground state, when `0 < δ < g_E`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_state_bound: Option<f64>,
}

impl Certificate {
    fn with_bound(scheme: Scheme, delta: f64, k_or_n: usize, bound: f64) -> Self {
        Certificate {
            scheme,
            delta,
            k_or_n,
            bound,
            confidence: 1.0 - bound,
            p: None,
            kappa2: None,
            beta2: None,
            g_e: None,
            ground_state_bound: None,
        }
    }

    /// Chernoff certificate for the singlet or cluster scheme. A margin
    /// `δ <= 0` certifies nothing and yields bound 1.
    pub fn binary(scheme: Scheme, delta: f64, k: usize) -> Result<Self> {
        if !scheme.is_binary() {
            return Err(invalid("Chernoff certificates apply to binary schemes"));
        }
        let bound = if delta > 0.0 { chernoff_separable_bound(delta, k, SEPARABLE_CEILING)? } else { 1.0 };
        let mut c = Self::with_bound(scheme, delta, k, bound);
        c.p = Some(SEPARABLE_CEILING);
        Ok(c)
    }

    /// McDiarmid certificate for the Hamiltonian scheme.
    pub fn hamiltonian(delta: f64, n: usize, kappa2: f64, beta2: f64, g_e: f64) -> Result<Self> {
        let bound = if delta > 0.0 { mcdiarmid_separable_bound(n, delta, kappa2)? } else { 1.0 };
        let mut c = Self::with_bound(Scheme::Hamiltonian, delta, n, bound);
        c.kappa2 = Some(kappa2);
        c.beta2 = Some(beta2);
        c.g_e = Some(g_e);
        if delta > 0.0 && delta < g_e {
            c.ground_state_bound = Some(ground_state_success_bound(n, g_e, delta, beta2)?);
        }
        Ok(c)
    }
}
