//! Stabilizer tableau with destabilizers, single-qubit Pauli measurements only.
//!
//! Rows `0..n` hold destabilizers, rows `n..2n` stabilizer generators and row
//! `2n` is scratch space. Each row stores bit-packed `x` and `z` vectors and a
//! sign bit; the pair `(x, z) = (1, 1)` on a qubit denotes `Y`.

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::pauli::{Basis, Pauli, PauliString};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerTableau {
    n: usize,
    words: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    sign: Vec<u8>,
}

impl StabilizerTableau {
    fn blank(n: usize) -> Self {
        let words = n.div_ceil(64);
        let rows = 2 * n + 1;
        StabilizerTableau { n, words, x: vec![0; rows * words], z: vec![0; rows * words], sign: vec![0; rows] }
    }

    /// `|0...0>`: destabilizers `X_k`, stabilizers `Z_k`.
    pub fn zero_state(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("a tableau needs at least one qubit"));
        }
        let mut t = Self::blank(n);
        for k in 0..n {
            t.set_x(k, k, true);
            t.set_z(n + k, k, true);
        }
        Ok(t)
    }

    /// Ring cluster state stabilized by `G_k = Z_{k-1} X_k Z_{k+1}`, all
    /// signs `+`. The destabilizer paired with `G_k` is `Z_k`.
    pub fn init_lcs(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(invalid(format!("a ring cluster state needs n >= 3, got {n}")));
        }
        let mut t = Self::blank(n);
        for k in 0..n {
            t.set_z(k, k, true);
            let row = n + k;
            t.set_x(row, k, true);
            t.set_z(row, (k + n - 1) % n, true);
            t.set_z(row, (k + 1) % n, true);
        }
        Ok(t)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    fn get_x(&self, row: usize, q: usize) -> bool {
        (self.x[row * self.words + q / 64] >> (q % 64)) & 1 == 1
    }

    #[inline]
    fn get_z(&self, row: usize, q: usize) -> bool {
        (self.z[row * self.words + q / 64] >> (q % 64)) & 1 == 1
    }

    fn set_x(&mut self, row: usize, q: usize, v: bool) {
        let w = &mut self.x[row * self.words + q / 64];
        *w = (*w & !(1 << (q % 64))) | ((v as u64) << (q % 64));
    }

    fn set_z(&mut self, row: usize, q: usize, v: bool) {
        let w = &mut self.z[row * self.words + q / 64];
        *w = (*w & !(1 << (q % 64))) | ((v as u64) << (q % 64));
    }

    #[inline]
    fn anticommutes(&self, row: usize, q: usize, basis: Basis) -> bool {
        match basis {
            Basis::X => self.get_z(row, q),
            Basis::Z => self.get_x(row, q),
            Basis::Y => self.get_x(row, q) ^ self.get_z(row, q),
        }
    }

    /// Row `h` becomes `row_i * row_h`.
    fn rowsum(&mut self, h: usize, i: usize) {
        let w = self.words;
        let mut plus = 0u32;
        let mut minus = 0u32;
        for k in 0..w {
            let (x1, z1) = (self.x[i * w + k], self.z[i * w + k]);
            let (x2, z2) = (self.x[h * w + k], self.z[h * w + k]);
            let y1 = x1 & z1;
            let xo = x1 & !z1;
            let zo = !x1 & z1;
            plus += ((y1 & !x2 & z2) | (xo & x2 & z2) | (zo & x2 & !z2)).count_ones();
            minus += ((y1 & x2 & !z2) | (xo & !x2 & z2) | (zo & x2 & z2)).count_ones();
            self.x[h * w + k] = x2 ^ x1;
            self.z[h * w + k] = z2 ^ z1;
        }
        let total = (2 * self.sign[h] as i64 + 2 * self.sign[i] as i64 + plus as i64 - minus as i64).rem_euclid(4);
        debug_assert!(total % 2 == 0, "rowsum of anticommuting rows");
        self.sign[h] = (total / 2) as u8;
    }

    fn copy_row(&mut self, dst: usize, src: usize) {
        let w = self.words;
        self.x.copy_within(src * w..(src + 1) * w, dst * w);
        self.z.copy_within(src * w..(src + 1) * w, dst * w);
        self.sign[dst] = self.sign[src];
    }

    fn clear_row(&mut self, row: usize) {
        let w = self.words;
        self.x[row * w..(row + 1) * w].fill(0);
        self.z[row * w..(row + 1) * w].fill(0);
        self.sign[row] = 0;
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::QubitIndex { index: q, num_qubits: self.n });
        }
        Ok(())
    }

    /// Outcome bit if measuring `basis` on `qubit` is deterministic.
    pub fn deterministic_outcome(&self, qubit: usize, basis: Basis) -> Result<Option<u8>> {
        self.check_qubit(qubit)?;
        let n = self.n;
        if (n..2 * n).any(|r| self.anticommutes(r, qubit, basis)) {
            return Ok(None);
        }
        let mut scratch = self.clone();
        Ok(Some(scratch.resolve_deterministic(qubit, basis)))
    }

    fn resolve_deterministic(&mut self, qubit: usize, basis: Basis) -> u8 {
        let n = self.n;
        let s = 2 * n;
        self.clear_row(s);
        for i in 0..n {
            if self.anticommutes(i, qubit, basis) {
                self.rowsum(s, i + n);
            }
        }
        self.sign[s]
    }

    /// Measure one qubit in a Pauli basis. Indeterminate outcomes consume
    /// exactly one draw from `rng`; deterministic ones consume none.
    pub fn measure_pauli<R: Rng + ?Sized>(&mut self, qubit: usize, basis: Basis, rng: &mut R) -> Result<u8> {
        self.check_qubit(qubit)?;
        let n = self.n;
        let Some(p) = (n..2 * n).find(|&r| self.anticommutes(r, qubit, basis)) else {
            return Ok(self.resolve_deterministic(qubit, basis));
        };
        for i in 0..2 * n {
            if i != p && i != p - n && self.anticommutes(i, qubit, basis) {
                self.rowsum(i, p);
            }
        }
        self.copy_row(p - n, p);
        self.clear_row(p);
        let bit: u8 = rng.gen::<bool>() as u8;
        match basis {
            Basis::X => self.set_x(p, qubit, true),
            Basis::Z => self.set_z(p, qubit, true),
            Basis::Y => {
                self.set_x(p, qubit, true);
                self.set_z(p, qubit, true);
            }
        }
        self.sign[p] = bit;
        Ok(bit)
    }

    fn row_string(&self, row: usize) -> PauliString {
        PauliString(
            (0..self.n)
                .map(|q| match (self.get_x(row, q), self.get_z(row, q)) {
                    (false, false) => Pauli::I,
                    (true, false) => Pauli::X,
                    (false, true) => Pauli::Z,
                    (true, true) => Pauli::Y,
                })
                .collect(),
        )
    }

    /// Stabilizer generators as `(negative, string)` pairs.
    pub fn stabilizers(&self) -> Vec<(bool, PauliString)> {
        (self.n..2 * self.n).map(|r| (self.sign[r] == 1, self.row_string(r))).collect()
    }

    /// Verify that generators pairwise commute, that they are independent
    /// over GF(2), and that each destabilizer anticommutes only with its
    /// partner generator.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.n;
        let sym = |a: usize, b: usize| -> u32 {
            let w = self.words;
            (0..w)
                .map(|k| {
                    ((self.x[a * w + k] & self.z[b * w + k]) ^ (self.z[a * w + k] & self.x[b * w + k])).count_ones()
                })
                .sum::<u32>()
                % 2
        };
        for a in n..2 * n {
            for b in a + 1..2 * n {
                if sym(a, b) != 0 {
                    return Err(invalid(format!("generators {} and {} anticommute", a - n, b - n)));
                }
            }
        }
        for d in 0..n {
            for s in n..2 * n {
                let expected = (s - n == d) as u32;
                if sym(d, s) != expected {
                    return Err(invalid(format!("destabilizer {d} / generator {} pairing broken", s - n)));
                }
            }
        }
        // GF(2) rank of the generator matrix [x | z].
        let mut rows: Vec<Vec<u64>> = (n..2 * n)
            .map(|r| {
                let w = self.words;
                let mut v = self.x[r * w..(r + 1) * w].to_vec();
                v.extend_from_slice(&self.z[r * w..(r + 1) * w]);
                v
            })
            .collect();
        let cols = 2 * self.words * 64;
        let mut rank = 0;
        for c in 0..cols {
            let (w, b) = (c / 64, c % 64);
            let Some(pivot) = (rank..rows.len()).find(|&r| (rows[r][w] >> b) & 1 == 1) else {
                continue;
            };
            rows.swap(rank, pivot);
            for r in 0..rows.len() {
                if r != rank && (rows[r][w] >> b) & 1 == 1 {
                    let src = rows[rank].clone();
                    rows[r].iter_mut().zip(&src).for_each(|(a, s)| *a ^= s);
                }
            }
            rank += 1;
        }
        if rank != n {
            return Err(invalid(format!("generator rank {rank} != {n}")));
        }
        Ok(())
    }
}
