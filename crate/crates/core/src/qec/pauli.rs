use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::sim::{Pauli, PauliFault};

/// Pauli operator on `n` qubits, phase dropped.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    pub x: Vec<bool>,
    pub z: Vec<bool>,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString { x: vec![false; n], z: vec![false; n] }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn from_fault(n: usize, fault: PauliFault) -> Self {
        let mut p = PauliString::identity(n);
        p.set(fault.qubit, Some(fault.pauli));
        p
    }

    pub fn x_type(n: usize, support: &[usize]) -> Self {
        let mut p = PauliString::identity(n);
        support.iter().for_each(|&q| p.x[q] = true);
        p
    }

    pub fn z_type(n: usize, support: &[usize]) -> Self {
        let mut p = PauliString::identity(n);
        support.iter().for_each(|&q| p.z[q] = true);
        p
    }

    pub fn get(&self, q: usize) -> Option<Pauli> {
        match (self.x[q], self.z[q]) {
            (false, false) => None,
            (true, false) => Some(Pauli::X),
            (true, true) => Some(Pauli::Y),
            (false, true) => Some(Pauli::Z),
        }
    }

    pub fn set(&mut self, q: usize, p: Option<Pauli>) {
        let (x, z) = match p {
            None => (false, false),
            Some(Pauli::X) => (true, false),
            Some(Pauli::Y) => (true, true),
            Some(Pauli::Z) => (false, true),
        };
        self.x[q] = x;
        self.z[q] = z;
    }

    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).filter(|(x, z)| **x || **z).count()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let mut parity = false;
        for q in 0..self.len() {
            parity ^= (self.x[q] & other.z[q]) ^ (self.z[q] & other.x[q]);
        }
        !parity
    }

    /// Product up to phase.
    pub fn mul(&self, other: &PauliString) -> PauliString {
        PauliString {
            x: self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect(),
            z: self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect(),
        }
    }

    /// Symplectic vector `[x | z]`.
    pub fn to_bits(&self) -> Vec<bool> {
        self.x.iter().chain(&self.z).copied().collect()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.len() {
            let c = match self.get(q) {
                None => 'I',
                Some(Pauli::X) => 'X',
                Some(Pauli::Y) => 'Y',
                Some(Pauli::Z) => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = PauliString::identity(s.chars().count());
        for (q, c) in s.chars().enumerate() {
            let v = match c {
                'I' | '_' | '.' => None,
                'X' => Some(Pauli::X),
                'Y' => Some(Pauli::Y),
                'Z' => Some(Pauli::Z),
                other => return Err(Error::InvalidInput(format!("bad Pauli character {other:?}"))),
            };
            p.set(q, v);
        }
        Ok(p)
    }
}

/// Rank over GF(2) of a set of bit rows.
pub(crate) fn gf2_rank(rows: &[Vec<bool>]) -> usize {
    let mut m: Vec<Vec<bool>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| m[r][c]) else { continue };
        m.swap(rank, p);
        let pivot = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && row[c] {
                row.iter_mut().zip(&pivot).for_each(|(a, b)| *a ^= b);
            }
        }
        rank += 1;
    }
    rank
}

/// True when `target` lies in the GF(2) span of `rows`.
pub(crate) fn in_span(rows: &[Vec<bool>], target: &[bool]) -> bool {
    if target.iter().all(|b| !b) {
        return true;
    }
    let mut with = rows.to_vec();
    with.push(target.to_vec());
    gf2_rank(&with) == gf2_rank(rows)
}
