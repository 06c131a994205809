//! Aaronson–Gottesman stabilizer tableau.
//!
//! Rows `0..n` are destabilizers, rows `n..2n` stabilizers, row `2n` is
//! scratch space for deterministic measurements. Each row stores its X and Z
//! parts bit-packed into `u64` words plus one sign bit.

use rand::Rng;

use super::circuit::{GateKind, GateOp};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tableau {
    n: usize,
    words: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    r: Vec<u8>,
}

#[inline]
fn bit(word: u64, b: u32) -> bool {
    (word >> b) & 1 == 1
}

impl Tableau {
    /// All qubits in |0⟩.
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        let rows = 2 * n + 1;
        let mut t = Tableau { n, words, x: vec![0; rows * words], z: vec![0; rows * words], r: vec![0; rows] };
        for q in 0..n {
            let (w, b) = (q / 64, q % 64);
            t.x[q * words + w] |= 1 << b;
            t.z[(q + n) * words + w] |= 1 << b;
        }
        t
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    fn check(&self, q: usize) -> Result<()> {
        if q >= self.n {
            Err(Error::QubitOutOfRange { index: q, n: self.n })
        } else {
            Ok(())
        }
    }

    #[inline]
    fn loc(q: usize) -> (usize, u32) {
        (q / 64, (q % 64) as u32)
    }

    /// Applies a unitary Clifford gate. Measurement and reset need randomness
    /// and go through [`Tableau::measure_z`] and [`Tableau::reset`].
    pub fn apply_gate(&mut self, op: &GateOp) -> Result<()> {
        op.validate()?;
        for &q in &op.targets {
            self.check(q)?;
        }
        match op.kind {
            GateKind::H => self.h(op.targets[0]),
            GateKind::S => self.s(op.targets[0]),
            GateKind::X => self.x_gate(op.targets[0]),
            GateKind::Z => self.z_gate(op.targets[0]),
            GateKind::Cnot => self.cnot(op.targets[0], op.targets[1]),
            GateKind::MeasureZ | GateKind::Reset => {
                return Err(Error::InvalidGate(format!("{:?} is not a unitary gate", op.kind)))
            }
        }
        Ok(())
    }

    pub(crate) fn h(&mut self, q: usize) {
        let (w, b) = Self::loc(q);
        for i in 0..2 * self.n {
            let idx = i * self.words + w;
            let (xb, zb) = (bit(self.x[idx], b), bit(self.z[idx], b));
            self.r[i] ^= (xb & zb) as u8;
            if xb != zb {
                self.x[idx] ^= 1 << b;
                self.z[idx] ^= 1 << b;
            }
        }
    }

    pub(crate) fn s(&mut self, q: usize) {
        let (w, b) = Self::loc(q);
        for i in 0..2 * self.n {
            let idx = i * self.words + w;
            let (xb, zb) = (bit(self.x[idx], b), bit(self.z[idx], b));
            self.r[i] ^= (xb & zb) as u8;
            if xb {
                self.z[idx] ^= 1 << b;
            }
        }
    }

    pub(crate) fn x_gate(&mut self, q: usize) {
        let (w, b) = Self::loc(q);
        for i in 0..2 * self.n {
            self.r[i] ^= bit(self.z[i * self.words + w], b) as u8;
        }
    }

    pub(crate) fn z_gate(&mut self, q: usize) {
        let (w, b) = Self::loc(q);
        for i in 0..2 * self.n {
            self.r[i] ^= bit(self.x[i * self.words + w], b) as u8;
        }
    }

    /// Y up to global phase.
    pub(crate) fn y_gate(&mut self, q: usize) {
        let (w, b) = Self::loc(q);
        for i in 0..2 * self.n {
            let idx = i * self.words + w;
            self.r[i] ^= (bit(self.x[idx], b) ^ bit(self.z[idx], b)) as u8;
        }
    }

    pub(crate) fn cnot(&mut self, c: usize, t: usize) {
        let (wc, bc) = Self::loc(c);
        let (wt, bt) = Self::loc(t);
        for i in 0..2 * self.n {
            let base = i * self.words;
            let xc = bit(self.x[base + wc], bc);
            let zc = bit(self.z[base + wc], bc);
            let xt = bit(self.x[base + wt], bt);
            let zt = bit(self.z[base + wt], bt);
            self.r[i] ^= (xc & zt & (xt ^ zc ^ true)) as u8;
            if xc {
                self.x[base + wt] ^= 1 << bt;
            }
            if zt {
                self.z[base + wc] ^= 1 << bc;
            }
        }
    }

    /// Left-multiplies row `h` by row `i`, tracking the sign.
    fn rowsum(&mut self, h: usize, i: usize) {
        let (hb, ib) = (h * self.words, i * self.words);
        let mut phase: i64 = 2 * i64::from(self.r[h]) + 2 * i64::from(self.r[i]);
        for w in 0..self.words {
            let (x1, z1) = (self.x[ib + w], self.z[ib + w]);
            let (x2, z2) = (self.x[hb + w], self.z[hb + w]);
            let pos = (x1 & z1 & !x2 & z2) | (x1 & !z1 & x2 & z2) | (!x1 & z1 & x2 & !z2);
            let neg = (x1 & z1 & x2 & !z2) | (x1 & !z1 & !x2 & z2) | (!x1 & z1 & x2 & z2);
            phase += i64::from(pos.count_ones()) - i64::from(neg.count_ones());
            self.x[hb + w] = x1 ^ x2;
            self.z[hb + w] = z1 ^ z2;
        }
        let phase = phase.rem_euclid(4);
        debug_assert!(phase == 0 || phase == 2, "rowsum produced an imaginary phase");
        self.r[h] = u8::from(phase == 2);
    }

    fn copy_row(&mut self, dst: usize, src: usize) {
        let w = self.words;
        self.x.copy_within(src * w..(src + 1) * w, dst * w);
        self.z.copy_within(src * w..(src + 1) * w, dst * w);
        self.r[dst] = self.r[src];
    }

    fn clear_row(&mut self, row: usize) {
        let w = self.words;
        self.x[row * w..(row + 1) * w].fill(0);
        self.z[row * w..(row + 1) * w].fill(0);
        self.r[row] = 0;
    }

    /// True when a Z measurement of `q` has a predetermined outcome.
    pub fn is_deterministic(&self, q: usize) -> Result<bool> {
        self.check(q)?;
        let (w, b) = Self::loc(q);
        Ok((self.n..2 * self.n).all(|p| !bit(self.x[p * self.words + w], b)))
    }

    /// Measures qubit `q` in the computational basis, collapsing the state.
    pub fn measure_z<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<bool> {
        self.check(q)?;
        let n = self.n;
        let (w, b) = Self::loc(q);
        let pivot = (n..2 * n).find(|&p| bit(self.x[p * self.words + w], b));
        match pivot {
            Some(p) => {
                // row p - n is overwritten below; it anticommutes with p, so
                // skipping it also keeps every rowsum phase real
                for i in 0..2 * n {
                    if i != p && i != p - n && bit(self.x[i * self.words + w], b) {
                        self.rowsum(i, p);
                    }
                }
                self.copy_row(p - n, p);
                self.clear_row(p);
                self.z[p * self.words + w] |= 1 << b;
                let outcome: bool = rng.random();
                self.r[p] = u8::from(outcome);
                Ok(outcome)
            }
            None => {
                let scratch = 2 * n;
                self.clear_row(scratch);
                for i in 0..n {
                    if bit(self.x[i * self.words + w], b) {
                        self.rowsum(scratch, i + n);
                    }
                }
                Ok(self.r[scratch] == 1)
            }
        }
    }

    /// Resets `q` to |0⟩ (measure, then flip on outcome 1).
    pub fn reset<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<()> {
        if self.measure_z(q, rng)? {
            self.x_gate(q);
        }
        Ok(())
    }

    fn symplectic(&self, a: usize, b: usize) -> bool {
        let (ab, bb) = (a * self.words, b * self.words);
        let mut acc = 0u32;
        for w in 0..self.words {
            acc += (self.x[ab + w] & self.z[bb + w]).count_ones();
            acc += (self.z[ab + w] & self.x[bb + w]).count_ones();
        }
        acc % 2 == 1
    }

    /// Rank of the 2n generator rows over GF(2), X and Z parts side by side.
    pub fn symplectic_rank(&self) -> usize {
        let n = self.n;
        let mut rows: Vec<Vec<u64>> = (0..2 * n)
            .map(|i| {
                let mut v = self.x[i * self.words..(i + 1) * self.words].to_vec();
                v.extend_from_slice(&self.z[i * self.words..(i + 1) * self.words]);
                v
            })
            .collect();
        let mut rank = 0;
        for col in 0..2 * self.words * 64 {
            let (w, b) = (col / 64, (col % 64) as u32);
            let Some(p) = (rank..rows.len()).find(|&r| bit(rows[r][w], b)) else { continue };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && bit(row[w], b) {
                    row.iter_mut().zip(&pivot).for_each(|(a, p)| *a ^= p);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Checks the symplectic structure: stabilizers commute pairwise,
    /// destabilizer `i` anticommutes exactly with stabilizer `i`, and the 2n
    /// rows are independent.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let n = self.n;
        for i in 0..2 * n {
            for j in (i + 1)..2 * n {
                let expect = j == i + n && i < n;
                if self.symplectic(i, j) != expect {
                    return Err(format!("rows {i} and {j} have wrong commutation"));
                }
            }
        }
        let rank = self.symplectic_rank();
        if rank != 2 * n {
            return Err(format!("symplectic rank {rank} != {}", 2 * n));
        }
        Ok(())
    }

    /// Stabilizer generators as strings over `IXYZ` with a leading sign.
    pub fn stabilizer_strings(&self) -> Vec<String> {
        (self.n..2 * self.n)
            .map(|row| {
                let mut s = String::from(if self.r[row] == 1 { "-" } else { "+" });
                for q in 0..self.n {
                    let (w, b) = Self::loc(q);
                    let idx = row * self.words + w;
                    s.push(match (bit(self.x[idx], b), bit(self.z[idx], b)) {
                        (false, false) => 'I',
                        (true, false) => 'X',
                        (true, true) => 'Y',
                        (false, true) => 'Z',
                    });
                }
                s
            })
            .collect()
    }
}
