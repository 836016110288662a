//! Pauli strings and real linear combinations of them.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Single-qubit measurement basis. Outcome bit 0 is eigenvalue +1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

    /// Position of the basis in the measurement-setting index `m`.
    pub fn index(self) -> usize {
        match self {
            Basis::X => 0,
            Basis::Y => 1,
            Basis::Z => 2,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Basis::X => 'X',
            Basis::Y => 'Y',
            Basis::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Basis> {
        match c {
            'X' | 'x' => Some(Basis::X),
            'Y' | 'y' => Some(Basis::Y),
            'Z' | 'z' => Some(Basis::Z),
            _ => None,
        }
    }

    pub fn pauli(self) -> Pauli {
        match self {
            Basis::X => Pauli::X,
            Basis::Y => Pauli::Y,
            Basis::Z => Pauli::Z,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' | 'i' | '1' | '.' => Some(Pauli::I),
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn basis(self) -> Option<Basis> {
        match self {
            Pauli::I => None,
            Pauli::X => Some(Basis::X),
            Pauli::Y => Some(Basis::Y),
            Pauli::Z => Some(Basis::Z),
        }
    }

    /// `self * other = i^k * result`; returns `(k, result)`.
    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (X, X) | (Y, Y) | (Z, Z) => (0, I),
            (X, Y) => (1, Z),
            (Y, X) => (3, Z),
            (Y, Z) => (1, X),
            (Z, Y) => (3, X),
            (Z, X) => (1, Y),
            (X, Z) => (3, Y),
        }
    }
}

/// Tensor product of single-qubit Paulis; qubit 0 first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString(pub Vec<Pauli>);

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString(vec![Pauli::I; n])
    }

    /// `n`-qubit string with the given Paulis placed on the given qubits.
    pub fn from_sparse(n: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        let mut s = Self::identity(n);
        for &(q, p) in ops {
            if q >= n {
                return Err(Error::QubitIndex { index: q, num_qubits: n });
            }
            let (k, r) = s.0[q].mul(p);
            if k != 0 {
                return Err(invalid("sparse Pauli placement produced a non-Hermitian phase"));
            }
            s.0[q] = r;
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&p| p == Pauli::I)
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// `self * other = i^k * result`.
    pub fn mul(&self, other: &PauliString) -> (u8, PauliString) {
        debug_assert_eq!(self.len(), other.len());
        let mut k = 0u8;
        let ops = self
            .0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| {
                let (p, r) = a.mul(b);
                k = (k + p) % 4;
                r
            })
            .collect();
        (k, PauliString(ops))
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = self.0.iter().zip(&other.0).filter(|(&a, &b)| a != Pauli::I && b != Pauli::I && a != b).count();
        anti % 2 == 0
    }

    /// Bit masks for dense application. Qubit 0 is the most significant bit.
    /// Returns `(flip_mask, sign_mask, y_count)` so that
    /// `P|b> = i^y_count (-1)^popcount(b & sign_mask) |b ^ flip_mask>`.
    pub(crate) fn masks(&self) -> (usize, usize, u32) {
        let n = self.len();
        let mut flip = 0usize;
        let mut sign = 0usize;
        let mut ys = 0u32;
        for (q, &p) in self.0.iter().enumerate() {
            let bit = 1usize << (n - 1 - q);
            match p {
                Pauli::I => {}
                Pauli::X => flip |= bit,
                Pauli::Z => sign |= bit,
                Pauli::Y => {
                    flip |= bit;
                    sign |= bit;
                    ys += 1;
                }
            }
        }
        (flip, sign, ys)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| Pauli::from_char(c).ok_or_else(|| invalid(format!("bad Pauli symbol {c:?} in {s:?}"))))
            .collect::<Result<Vec<_>>>()
            .map(PauliString)
    }
}

/// Real linear combination of Pauli strings, hence Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliObservable {
    num_qubits: usize,
    terms: Vec<(f64, PauliString)>,
}

impl PauliObservable {
    pub fn new(num_qubits: usize, terms: Vec<(f64, PauliString)>) -> Result<Self> {
        for (_, s) in &terms {
            if s.len() != num_qubits {
                return Err(Error::Dimension { expected: num_qubits, actual: s.len() });
            }
        }
        Ok(PauliObservable { num_qubits, terms })
    }

    pub fn zero(num_qubits: usize) -> Self {
        PauliObservable { num_qubits, terms: Vec::new() }
    }

    pub fn identity(num_qubits: usize) -> Self {
        PauliObservable { num_qubits, terms: vec![(1.0, PauliString::identity(num_qubits))] }
    }

    pub fn single(num_qubits: usize, coeff: f64, ops: &[(usize, Pauli)]) -> Result<Self> {
        Ok(PauliObservable { num_qubits, terms: vec![(coeff, PauliString::from_sparse(num_qubits, ops)?)] })
    }

    /// Parse `[(coeff, "XZI..."), ...]`.
    pub fn from_strs(terms: &[(f64, &str)]) -> Result<Self> {
        let parsed = terms.iter().map(|&(c, s)| Ok((c, s.parse::<PauliString>()?))).collect::<Result<Vec<_>>>()?;
        let n = parsed.first().map(|(_, s)| s.len()).ok_or(Error::Empty("observable terms"))?;
        Self::new(n, parsed)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn add(&self, other: &PauliObservable) -> Result<PauliObservable> {
        self.check_same(other)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(PauliObservable { num_qubits: self.num_qubits, terms }.simplified())
    }

    pub fn scale(&self, factor: f64) -> PauliObservable {
        PauliObservable {
            num_qubits: self.num_qubits,
            terms: self.terms.iter().map(|(c, s)| (c * factor, s.clone())).collect(),
        }
    }

    /// Operator product. Fails if the product is not Hermitian, which for
    /// Pauli sums happens when anticommuting strings are multiplied.
    pub fn product(&self, other: &PauliObservable) -> Result<PauliObservable> {
        self.check_same(other)?;
        let mut acc: BTreeMap<PauliString, f64> = BTreeMap::new();
        let mut imag: BTreeMap<PauliString, f64> = BTreeMap::new();
        for (ca, sa) in &self.terms {
            for (cb, sb) in &other.terms {
                let (k, s) = sa.mul(sb);
                let c = ca * cb;
                match k {
                    0 => *acc.entry(s).or_default() += c,
                    2 => *acc.entry(s).or_default() -= c,
                    1 => *imag.entry(s).or_default() += c,
                    _ => *imag.entry(s).or_default() -= c,
                }
            }
        }
        if imag.values().any(|v| v.abs() > 1e-12) {
            return Err(invalid("operator product is not Hermitian"));
        }
        Ok(PauliObservable { num_qubits: self.num_qubits, terms: collect_nonzero(acc) })
    }

    /// Merge duplicate strings and drop zero coefficients.
    pub fn simplified(&self) -> PauliObservable {
        let mut acc: BTreeMap<PauliString, f64> = BTreeMap::new();
        for (c, s) in &self.terms {
            *acc.entry(s.clone()).or_default() += c;
        }
        PauliObservable { num_qubits: self.num_qubits, terms: collect_nonzero(acc) }
    }

    /// Embed into a larger register, placing qubit `j` of `self` at `sites[j]`.
    pub fn embed(&self, n: usize, sites: &[usize]) -> Result<PauliObservable> {
        if sites.len() != self.num_qubits {
            return Err(Error::Dimension { expected: self.num_qubits, actual: sites.len() });
        }
        let terms = self
            .terms
            .iter()
            .map(|(c, s)| {
                let ops: Vec<(usize, Pauli)> = sites.iter().copied().zip(s.0.iter().copied()).collect();
                Ok((*c, PauliString::from_sparse(n, &ops)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliObservable { num_qubits: n, terms })
    }

    /// Sum of absolute coefficients, an upper bound on the operator norm.
    pub fn coefficient_norm(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.abs()).sum()
    }

    fn check_same(&self, other: &PauliObservable) -> Result<()> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::Dimension { expected: self.num_qubits, actual: other.num_qubits });
        }
        Ok(())
    }
}

fn collect_nonzero(acc: BTreeMap<PauliString, f64>) -> Vec<(f64, PauliString)> {
    acc.into_iter().filter(|(_, c)| c.abs() > 1e-15).map(|(s, c)| (c, s)).collect()
}
