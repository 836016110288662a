//! Exact statevector simulation of small registers.
//!
//! Amplitudes are stored in lexicographic order with qubit 0 as the most
//! significant bit of the basis index, so `|q0 q1 ... q(n-1)>` has index
//! `q0 * 2^(n-1) + ... + q(n-1)`. Measurement outcome bit `i` corresponds to
//! eigenvalue `(-1)^i`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::pauli::{Basis, PauliObservable};

pub const DEFAULT_DENSE_LIMIT: usize = 20;

const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Eigenvectors `(v0, v1)` of a basis; `v_i` has eigenvalue `(-1)^i`.
fn eigenvectors(basis: Basis) -> [[Complex64; 2]; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match basis {
        Basis::Z => [[ONE, ZERO], [ZERO, ONE]],
        Basis::X => [[ONE * h, ONE * h], [ONE * h, -ONE * h]],
        Basis::Y => [[ONE * h, I * h], [ONE * h, -I * h]],
    }
}

impl PureState {
    pub fn new(num_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::check_size(num_qubits, DEFAULT_DENSE_LIMIT)?;
        if amplitudes.len() != 1usize << num_qubits {
            return Err(invalid(format!("{} amplitudes supplied for {num_qubits} qubits", amplitudes.len())));
        }
        let state = PureState { num_qubits, amplitudes };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(invalid(format!("state is not normalized (|psi|^2 = {norm})")));
        }
        Ok(state)
    }

    /// Normalizes the given amplitudes instead of rejecting them.
    pub fn normalized(num_qubits: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(invalid("zero vector cannot be normalized"));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::new(num_qubits, amplitudes)
    }

    pub fn basis_state(num_qubits: usize, index: usize) -> Result<Self> {
        Self::check_size(num_qubits, DEFAULT_DENSE_LIMIT)?;
        if index >= 1 << num_qubits {
            return Err(invalid(format!("basis index {index} out of range")));
        }
        let mut amplitudes = vec![ZERO; 1 << num_qubits];
        amplitudes[index] = ONE;
        Ok(PureState { num_qubits, amplitudes })
    }

    /// Single qubit `cos(θ/2)|0> + e^{iφ} sin(θ/2)|1>`.
    pub fn qubit(theta: f64, phi: f64) -> Self {
        let a = Complex64::new((theta / 2.0).cos(), 0.0);
        let b = Complex64::from_polar((theta / 2.0).sin(), phi);
        PureState { num_qubits: 1, amplitudes: vec![a, b] }
    }

    /// Eigenstate of a Pauli basis for outcome bit `bit`.
    pub fn pauli_eigenstate(basis: Basis, bit: u8) -> Self {
        let v = eigenvectors(basis)[(bit & 1) as usize];
        PureState { num_qubits: 1, amplitudes: v.to_vec() }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        self.check_same(other.num_qubits)?;
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    fn check_size(num_qubits: usize, limit: usize) -> Result<()> {
        if num_qubits == 0 {
            return Err(invalid("a state needs at least one qubit"));
        }
        if num_qubits > limit {
            return Err(Error::DenseLimit { qubits: num_qubits, limit });
        }
        Ok(())
    }

    fn check_same(&self, n: usize) -> Result<()> {
        if n != self.num_qubits {
            return Err(Error::Dimension { expected: self.num_qubits, actual: n });
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            return Err(Error::QubitIndex { index: q, num_qubits: self.num_qubits });
        }
        Ok(())
    }

    fn bit(&self, q: usize) -> usize {
        1 << (self.num_qubits - 1 - q)
    }

    /// Amplitude pairs `(lo, hi)` differing only in qubit `q` (bit clear, bit set).
    fn pairs(&self, q: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let bit = self.bit(q);
        (0..self.amplitudes.len()).filter(move |i| i & bit == 0).map(move |i| (i, i | bit))
    }

    /// Born probability that measuring `qubit` in `basis` gives bit 0.
    pub fn prob_zero(&self, qubit: usize, basis: Basis) -> Result<f64> {
        self.check_qubit(qubit)?;
        let v0 = eigenvectors(basis)[0];
        Ok(self
            .pairs(qubit)
            .map(|(lo, hi)| (v0[0].conj() * self.amplitudes[lo] + v0[1].conj() * self.amplitudes[hi]).norm_sqr())
            .sum())
    }

    /// Projective measurement of one qubit; returns the outcome bit and the
    /// renormalized post-measurement state.
    pub fn measure_qubit<R: Rng + ?Sized>(&self, qubit: usize, basis: Basis, rng: &mut R) -> Result<(u8, PureState)> {
        let p0 = self.prob_zero(qubit, basis)?;
        let bit: u8 = if rng.gen::<f64>() < p0 { 0 } else { 1 };
        let p = if bit == 0 { p0 } else { 1.0 - p0 };
        let v = eigenvectors(basis)[bit as usize];
        let scale = 1.0 / p.sqrt();
        let mut amplitudes = vec![ZERO; self.amplitudes.len()];
        for (lo, hi) in self.pairs(qubit) {
            let overlap = v[0].conj() * self.amplitudes[lo] + v[1].conj() * self.amplitudes[hi];
            amplitudes[lo] = v[0] * overlap * scale;
            amplitudes[hi] = v[1] * overlap * scale;
        }
        Ok((bit, PureState { num_qubits: self.num_qubits, amplitudes }))
    }

    /// State rotated so that measuring every qubit in Z reproduces measuring
    /// qubit `k` in `bases[k]`.
    fn rotated(&self, bases: &[Basis]) -> Result<Vec<Complex64>> {
        self.check_same(bases.len())?;
        let mut amps = self.amplitudes.clone();
        for (q, &b) in bases.iter().enumerate() {
            if b == Basis::Z {
                continue;
            }
            let [v0, v1] = eigenvectors(b);
            let bit = self.bit(q);
            for lo in 0..amps.len() {
                if lo & bit != 0 {
                    continue;
                }
                let hi = lo | bit;
                let (a, c) = (amps[lo], amps[hi]);
                amps[lo] = v0[0].conj() * a + v0[1].conj() * c;
                amps[hi] = v1[0].conj() * a + v1[1].conj() * c;
            }
        }
        Ok(amps)
    }

    /// Exact joint outcome distribution for a full measurement setting,
    /// indexed like the amplitudes (qubit 0 most significant).
    pub fn outcome_distribution(&self, bases: &[Basis]) -> Result<Vec<f64>> {
        Ok(self.rotated(bases)?.iter().map(|a| a.norm_sqr()).collect())
    }

    /// Sample all qubits at once in the given bases. Same joint distribution
    /// as sequential [`measure_qubit`](Self::measure_qubit) calls.
    pub fn sample_all<R: Rng + ?Sized>(&self, bases: &[Basis], rng: &mut R) -> Result<Vec<u8>> {
        let amps = self.rotated(bases)?;
        let u: f64 = rng.gen::<f64>() * self.norm_sqr();
        let mut acc = 0.0;
        let mut index = amps.len() - 1;
        for (i, a) in amps.iter().enumerate() {
            acc += a.norm_sqr();
            if u < acc {
                index = i;
                break;
            }
        }
        Ok((0..self.num_qubits).map(|q| ((index & self.bit(q)) != 0) as u8).collect())
    }

    /// `O|psi>` as a raw amplitude vector.
    pub fn apply(&self, obs: &PauliObservable) -> Result<Vec<Complex64>> {
        self.check_same(obs.num_qubits())?;
        let mut out = vec![ZERO; self.amplitudes.len()];
        apply_into(obs, &self.amplitudes, &mut out);
        Ok(out)
    }

    /// `<psi|O|psi>`.
    pub fn expectation(&self, obs: &PauliObservable) -> Result<f64> {
        let applied = self.apply(obs)?;
        let value: Complex64 = self.amplitudes.iter().zip(&applied).map(|(a, b)| a.conj() * b).sum();
        debug_assert!(value.im.abs() < 1e-8, "imaginary expectation residue {}", value.im);
        Ok(value.re)
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        make_product(&[self.clone(), other.clone()])
    }
}

/// `out += O v`, with `O` a Pauli sum over `log2(v.len())` qubits.
pub(crate) fn apply_into(obs: &PauliObservable, v: &[Complex64], out: &mut [Complex64]) {
    let phases = [ONE, I, -ONE, -I];
    for (c, s) in obs.terms() {
        let (flip, sign, ys) = s.masks();
        let base = phases[(ys % 4) as usize] * *c;
        for (b, amp) in v.iter().enumerate() {
            if amp.re == 0.0 && amp.im == 0.0 {
                continue;
            }
            let mut t = base * amp;
            if (b & sign).count_ones() % 2 == 1 {
                t = -t;
            }
            out[b ^ flip] += t;
        }
    }
}

/// Dense matrix of a Pauli sum. Only sensible for a handful of qubits.
pub fn to_dense_matrix(obs: &PauliObservable) -> Result<DMatrix<Complex64>> {
    let n = obs.num_qubits();
    if n > 12 {
        return Err(Error::DenseLimit { qubits: n, limit: 12 });
    }
    let dim = 1usize << n;
    let phases = [ONE, I, -ONE, -I];
    let mut m = DMatrix::from_element(dim, dim, ZERO);
    for (c, s) in obs.terms() {
        let (flip, sign, ys) = s.masks();
        let base = phases[(ys % 4) as usize] * *c;
        for b in 0..dim {
            let sgn = if (b & sign).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            m[(b ^ flip, b)] += base * sgn;
        }
    }
    Ok(m)
}

/// `(|01> - |10>)/sqrt(2)`.
pub fn make_singlet() -> PureState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    PureState { num_qubits: 2, amplitudes: vec![ZERO, Complex64::new(h, 0.0), Complex64::new(-h, 0.0), ZERO] }
}

pub fn make_product(states: &[PureState]) -> Result<PureState> {
    make_product_with_limit(states, DEFAULT_DENSE_LIMIT)
}

/// Tensor product in the given order (first state on the leading qubits).
pub fn make_product_with_limit(states: &[PureState], limit: usize) -> Result<PureState> {
    let total: usize = states.iter().map(|s| s.num_qubits).sum();
    if states.is_empty() {
        return Err(Error::Empty("product factors"));
    }
    PureState::check_size(total, limit)?;
    let mut amps = vec![ONE];
    for s in states {
        let mut next = Vec::with_capacity(amps.len() * s.amplitudes.len());
        for a in &amps {
            for b in &s.amplitudes {
                next.push(a * b);
            }
        }
        amps = next;
    }
    Ok(PureState { num_qubits: total, amplitudes: amps })
}

pub fn make_lcs_dense(n: usize) -> Result<PureState> {
    make_lcs_dense_with_limit(n, DEFAULT_DENSE_LIMIT)
}

/// Ring cluster state: `|+>^n` followed by CZ on every ring edge, which is
/// the joint +1 eigenstate of `Z_{k-1} X_k Z_{k+1}` with periodic indexing.
pub fn make_lcs_dense_with_limit(n: usize, limit: usize) -> Result<PureState> {
    if n < 3 {
        return Err(invalid("a ring cluster state needs at least 3 qubits"));
    }
    PureState::check_size(n, limit)?;
    let dim = 1usize << n;
    let amp = (dim as f64).sqrt().recip();
    let amplitudes = (0..dim)
        .map(|b| {
            let bit = |q: usize| (b >> (n - 1 - q)) & 1;
            let edges: usize = (0..n).map(|q| bit(q) & bit((q + 1) % n)).sum();
            Complex64::new(if edges.is_multiple_of(2) { amp } else { -amp }, 0.0)
        })
        .collect();
    Ok(PureState { num_qubits: n, amplitudes })
}

/// Cluster-state generator `G_k = Z_{k-1} X_k Z_{k+1}` on an `n`-qubit
/// ring, with `k` a 0-based qubit index.
pub fn lcs_generator(n: usize, k: usize) -> Result<PauliObservable> {
    use crate::pauli::Pauli;
    if n < 3 || k >= n {
        return Err(invalid(format!("generator {k} undefined on a {n}-qubit ring")));
    }
    PauliObservable::single(n, 1.0, &[((k + n - 1) % n, Pauli::Z), (k, Pauli::X), ((k + 1) % n, Pauli::Z)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_from_seed;
    use approx::assert_abs_diff_eq;

    fn obs(terms: &[(f64, &str)]) -> PauliObservable {
        PauliObservable::from_strs(terms).unwrap()
    }

    /// Independent oracle: explicit Kronecker products of 2x2 matrices.
    fn kron_expectation(state: &PureState, paulis: &str) -> f64 {
        let mats: Vec<[[Complex64; 2]; 2]> = paulis
            .chars()
            .map(|c| match c {
                'I' => [[ONE, ZERO], [ZERO, ONE]],
                'X' => [[ZERO, ONE], [ONE, ZERO]],
                'Y' => [[ZERO, -I], [I, ZERO]],
                'Z' => [[ONE, ZERO], [ZERO, -ONE]],
                _ => unreachable!(),
            })
            .collect();
        let n = mats.len();
        let dim = 1 << n;
        let amps = state.amplitudes();
        let mut total = ZERO;
        for r in 0..dim {
            for c in 0..dim {
                let mut e = ONE;
                for (q, m) in mats.iter().enumerate() {
                    let rb = (r >> (n - 1 - q)) & 1;
                    let cb = (c >> (n - 1 - q)) & 1;
                    e *= m[rb][cb];
                }
                total += amps[r].conj() * e * amps[c];
            }
        }
        total.re
    }

    #[test]
    fn singlet_amplitudes_and_correlations() {
        let s = make_singlet();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(s.amplitudes()[1].re, h, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitudes()[2].re, -h, epsilon = 1e-15);
        assert_abs_diff_eq!(s.expectation(&obs(&[(1.0, "ZZ")])).unwrap(), -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.expectation(&obs(&[(1.0, "XX")])).unwrap(), -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(kron_expectation(&s, "XX"), -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.expectation(&obs(&[(1.0, "YY")])).unwrap(), -1.0, epsilon = 1e-12);
        // Q = (1 - XX)/2
        let q = obs(&[(0.5, "II"), (-0.5, "XX")]);
        assert_abs_diff_eq!(s.expectation(&q).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn product_states() {
        let zero = PureState::basis_state(1, 0).unwrap();
        let p = make_product(&[zero.clone(), zero]).unwrap();
        assert_eq!(p.amplitudes()[0], ONE);
        assert!(p.amplitudes()[1..].iter().all(|a| *a == ZERO));

        let s = make_singlet();
        let pp = make_product(&[s.clone(), s]).unwrap();
        assert_abs_diff_eq!(pp.expectation(&obs(&[(1.0, "ZZII")])).unwrap(), -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pp.norm_sqr(), 1.0, epsilon = 1e-12);

        let xp = PureState::pauli_eigenstate(Basis::X, 0);
        let xm = PureState::pauli_eigenstate(Basis::X, 1);
        let pm = make_product(&[xp, xm]).unwrap();
        assert_abs_diff_eq!(pm.expectation(&obs(&[(1.0, "XX")])).unwrap(), -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(kron_expectation(&pm, "XX"), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn dense_limit_enforced() {
        let q = PureState::basis_state(1, 0).unwrap();
        let many = vec![q; 5];
        assert!(matches!(make_product_with_limit(&many, 4), Err(Error::DenseLimit { .. })));
        assert!(matches!(make_lcs_dense_with_limit(6, 5), Err(Error::DenseLimit { .. })));
    }

    #[test]
    fn lcs_is_stabilized() {
        let s = make_lcs_dense(4).unwrap();
        assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-12);
        // G_1 = Z_4 X_1 Z_2 (1-based)
        assert_abs_diff_eq!(s.expectation(&obs(&[(1.0, "XZIZ")])).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.expectation(&obs(&[(1.0, "XIII")])).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(kron_expectation(&s, "XIII"), 0.0, epsilon = 1e-12);
        for k in 0..4 {
            let g = lcs_generator(4, k).unwrap();
            assert_abs_diff_eq!(s.expectation(&g).unwrap(), 1.0, epsilon = 1e-12);
        }
        let s5 = make_lcs_dense(5).unwrap();
        let g2g3 = lcs_generator(5, 1).unwrap().product(&lcs_generator(5, 2).unwrap()).unwrap();
        assert_abs_diff_eq!(s5.expectation(&g2g3).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(kron_expectation(&s5, "ZYYZI"), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn expectation_dimension_mismatch() {
        let s = make_singlet();
        assert!(matches!(s.expectation(&obs(&[(1.0, "Z")])), Err(Error::Dimension { .. })));
    }

    #[test]
    fn eigenstate_measurement_is_deterministic() {
        let zero = PureState::basis_state(1, 0).unwrap();
        for seed in 0..20 {
            let mut rng = stream_from_seed(seed);
            let (bit, post) = zero.measure_qubit(0, Basis::Z, &mut rng).unwrap();
            assert_eq!(bit, 0);
            assert_eq!(post, zero);
        }
        assert!(matches!(zero.measure_qubit(1, Basis::Z, &mut stream_from_seed(0)), Err(Error::QubitIndex { .. })));
    }

    #[test]
    fn singlet_z_outcomes_anticorrelated() {
        let s = make_singlet();
        let mut rng = stream_from_seed(11);
        for _ in 0..500 {
            let (a, post) = s.measure_qubit(0, Basis::Z, &mut rng).unwrap();
            let (b, post2) = post.measure_qubit(1, Basis::Z, &mut rng).unwrap();
            assert_eq!(a ^ b, 1);
            assert_abs_diff_eq!(post2.norm_sqr(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn x_measurement_of_zero_is_fair() {
        let zero = PureState::basis_state(1, 0).unwrap();
        let mut rng = stream_from_seed(5);
        let trials = 100_000;
        let zeros = (0..trials).filter(|_| zero.measure_qubit(0, Basis::X, &mut rng).unwrap().0 == 0).count();
        let freq = zeros as f64 / trials as f64;
        assert!((freq - 0.5).abs() < 0.005, "frequency {freq}");
    }

    #[test]
    fn y_eigenstates_measure_deterministically() {
        for bit in 0..2u8 {
            let s = PureState::pauli_eigenstate(Basis::Y, bit);
            assert_abs_diff_eq!(
                s.expectation(&obs(&[(1.0, "Y")])).unwrap(),
                if bit == 0 { 1.0 } else { -1.0 },
                epsilon = 1e-12
            );
            let p0 = s.prob_zero(0, Basis::Y).unwrap();
            assert_abs_diff_eq!(p0, if bit == 0 { 1.0 } else { 0.0 }, epsilon = 1e-12);
        }
    }

    #[test]
    fn joint_sampling_matches_born_rule() {
        let s = make_lcs_dense(3).unwrap();
        let bases = [Basis::X, Basis::Y, Basis::Z];
        let exact = s.outcome_distribution(&bases).unwrap();
        let mut counts = [0usize; 8];
        let mut rng = stream_from_seed(9);
        let trials = 100_000;
        for _ in 0..trials {
            let bits = s.sample_all(&bases, &mut rng).unwrap();
            let idx = bits.iter().fold(0, |acc, &b| acc * 2 + b as usize);
            counts[idx] += 1;
        }
        let tv: f64 = counts.iter().zip(&exact).map(|(&c, &p)| (c as f64 / trials as f64 - p).abs()).sum::<f64>() / 2.0;
        assert!(tv < 0.01, "total variation {tv}");
    }

    #[test]
    fn measurement_order_does_not_change_marginals() {
        // Marginal of qubit 0 in X, measured before vs after qubit 2 in Y.
        let psi =
            PureState::normalized(3, (0..8).map(|k| Complex64::new(1.0 + k as f64, 0.3 * k as f64 - 1.0)).collect())
                .unwrap();
        let trials = 100_000;
        let mut rng = stream_from_seed(21);
        let mut first = 0usize;
        let mut second = 0usize;
        for _ in 0..trials {
            let (a, _) = psi.measure_qubit(0, Basis::X, &mut rng).unwrap();
            first += a as usize;
            let (_, post) = psi.measure_qubit(2, Basis::Y, &mut rng).unwrap();
            let (b, post) = post.measure_qubit(0, Basis::X, &mut rng).unwrap();
            second += b as usize;
            assert_abs_diff_eq!(post.norm_sqr(), 1.0, epsilon = 1e-10);
        }
        let exact = 1.0 - psi.prob_zero(0, Basis::X).unwrap();
        let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
        assert!((first as f64 / trials as f64 - exact).abs() < 5.0 * sigma);
        assert!((second as f64 / trials as f64 - exact).abs() < 5.0 * sigma);
    }
}
