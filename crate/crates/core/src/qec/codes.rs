use std::fmt;

use serde::{Deserialize, Serialize};

use super::pauli::PauliString;
use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeFamily {
    Repetition,
    Shor,
    Steane,
    Surface,
}

fn default_distance() -> usize {
    3
}

fn default_logical() -> usize {
    1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CodeSpec {
    pub family: CodeFamily,
    /// Only meaningful for the surface code; the other codes have distance 3.
    #[serde(default = "default_distance")]
    pub distance: usize,
    #[serde(default = "default_logical")]
    pub logical_qubits: usize,
}

impl CodeSpec {
    pub fn repetition(logical_qubits: usize) -> Self {
        CodeSpec { family: CodeFamily::Repetition, distance: 3, logical_qubits }
    }
    pub fn shor(logical_qubits: usize) -> Self {
        CodeSpec { family: CodeFamily::Shor, distance: 3, logical_qubits }
    }
    pub fn steane(logical_qubits: usize) -> Self {
        CodeSpec { family: CodeFamily::Steane, distance: 3, logical_qubits }
    }
    pub fn surface(distance: usize, logical_qubits: usize) -> Self {
        CodeSpec { family: CodeFamily::Surface, distance, logical_qubits }
    }

    pub fn validate(&self) -> Result<()> {
        if self.logical_qubits == 0 {
            return invalid("code needs at least one logical qubit");
        }
        match self.family {
            CodeFamily::Surface => {
                if self.distance < 3 || self.distance % 2 == 0 {
                    return invalid(format!("surface code distance must be odd and >= 3, got {}", self.distance));
                }
            }
            _ => {
                if self.distance != 3 {
                    return invalid(format!("{:?} code has fixed distance 3, got {}", self.family, self.distance));
                }
            }
        }
        Ok(())
    }

    pub fn block(&self) -> BlockCode {
        match self.family {
            CodeFamily::Repetition => BlockCode::repetition(),
            CodeFamily::Shor => BlockCode::shor(),
            CodeFamily::Steane => BlockCode::steane(),
            CodeFamily::Surface => BlockCode::rotated_surface(self.distance),
        }
    }

    pub fn data_qubits(&self) -> usize {
        self.block().n_data * self.logical_qubits
    }

    pub fn stabilizers_per_round(&self) -> usize {
        self.block().stabilizers.len() * self.logical_qubits
    }
}

impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            CodeFamily::Repetition => write!(f, "repetition"),
            CodeFamily::Shor => write!(f, "shor"),
            CodeFamily::Steane => write!(f, "steane"),
            CodeFamily::Surface => write!(f, "surface-d{}", self.distance),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StabilizerKind {
    X,
    Z,
}

/// One parity check of a single code block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stabilizer {
    pub label: String,
    pub kind: StabilizerKind,
    pub support: Vec<usize>,
}

impl Stabilizer {
    fn new(label: String, kind: StabilizerKind, support: Vec<usize>) -> Self {
        Stabilizer { label, kind, support }
    }

    pub fn pauli(&self, n: usize, offset: usize) -> PauliString {
        let support: Vec<usize> = self.support.iter().map(|q| q + offset).collect();
        match self.kind {
            StabilizerKind::X => PauliString::x_type(n, &support),
            StabilizerKind::Z => PauliString::z_type(n, &support),
        }
    }
}

/// A single logical qubit's CSS code: data count, checks and logical
/// operator supports (X̄ is X on `logical_x`, Z̄ is Z on `logical_z`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockCode {
    pub n_data: usize,
    pub stabilizers: Vec<Stabilizer>,
    pub logical_x: Vec<usize>,
    pub logical_z: Vec<usize>,
}

impl BlockCode {
    /// Three-qubit bit-flip code: checks Z0Z1 and Z1Z2.
    fn repetition() -> Self {
        BlockCode {
            n_data: 3,
            stabilizers: vec![
                Stabilizer::new("Z01".into(), StabilizerKind::Z, vec![0, 1]),
                Stabilizer::new("Z12".into(), StabilizerKind::Z, vec![1, 2]),
            ],
            logical_x: vec![0, 1, 2],
            logical_z: vec![0],
        }
    }

    fn shor() -> Self {
        let mut stabilizers = Vec::new();
        for block in 0..3 {
            let b = 3 * block;
            stabilizers.push(Stabilizer::new(format!("Z{}{}", b, b + 1), StabilizerKind::Z, vec![b, b + 1]));
            stabilizers.push(Stabilizer::new(format!("Z{}{}", b + 1, b + 2), StabilizerKind::Z, vec![b + 1, b + 2]));
        }
        stabilizers.push(Stabilizer::new("X0-5".into(), StabilizerKind::X, (0..6).collect()));
        stabilizers.push(Stabilizer::new("X3-8".into(), StabilizerKind::X, (3..9).collect()));
        BlockCode { n_data: 9, stabilizers, logical_x: vec![0, 1, 2], logical_z: vec![0, 3, 6] }
    }

    /// [7,1,3] code from the Hamming parity checks, used for both X and Z.
    fn steane() -> Self {
        let rows: [[usize; 4]; 3] = [[3, 4, 5, 6], [1, 2, 5, 6], [0, 2, 4, 6]];
        let mut stabilizers = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            stabilizers.push(Stabilizer::new(format!("X{i}"), StabilizerKind::X, r.to_vec()));
        }
        for (i, r) in rows.iter().enumerate() {
            stabilizers.push(Stabilizer::new(format!("Z{i}"), StabilizerKind::Z, r.to_vec()));
        }
        BlockCode { n_data: 7, stabilizers, logical_x: (0..7).collect(), logical_z: (0..7).collect() }
    }

    /// Rotated surface code: d×d data qubits (row-major), d²−1 checks.
    ///
    /// Plaquette `(a, b)` with `0 <= a, b <= d` touches data `(a-1|a, b-1|b)`;
    /// interior plaquettes are X when `a + b` is even, weight-two X checks sit
    /// on the top/bottom edges and weight-two Z checks on the left/right.
    fn rotated_surface(d: usize) -> Self {
        let idx = |i: usize, j: usize| i * d + j;
        let mut xs = Vec::new();
        let mut zs = Vec::new();
        for a in 0..=d {
            for b in 0..=d {
                let kind = if (a + b) % 2 == 0 { StabilizerKind::X } else { StabilizerKind::Z };
                let interior = (1..d).contains(&a) && (1..d).contains(&b);
                let top_bottom = (a == 0 || a == d) && (1..d).contains(&b);
                let left_right = (b == 0 || b == d) && (1..d).contains(&a);
                let keep = interior
                    || (top_bottom && kind == StabilizerKind::X)
                    || (left_right && kind == StabilizerKind::Z);
                if !keep {
                    continue;
                }
                let mut support = Vec::new();
                for i in [a.wrapping_sub(1), a] {
                    for j in [b.wrapping_sub(1), b] {
                        if i < d && j < d {
                            support.push(idx(i, j));
                        }
                    }
                }
                support.sort_unstable();
                let label = format!("{}({a},{b})", if kind == StabilizerKind::X { "X" } else { "Z" });
                let s = Stabilizer::new(label, kind, support);
                if kind == StabilizerKind::X {
                    xs.push(s)
                } else {
                    zs.push(s)
                }
            }
        }
        xs.extend(zs);
        BlockCode {
            n_data: d * d,
            stabilizers: xs,
            logical_x: (0..d).map(|i| idx(i, 0)).collect(),
            logical_z: (0..d).map(|j| idx(0, j)).collect(),
        }
    }

    pub fn checks_of(&self, kind: StabilizerKind) -> Vec<Vec<bool>> {
        self.stabilizers
            .iter()
            .filter(|s| s.kind == kind)
            .map(|s| {
                let mut row = vec![false; self.n_data];
                s.support.iter().for_each(|&q| row[q] = true);
                row
            })
            .collect()
    }
}

/// Generators of the full code (all logical blocks, block-major).
pub fn stabilizer_generators(code: &CodeSpec) -> Vec<PauliString> {
    let block = code.block();
    let n = block.n_data * code.logical_qubits;
    (0..code.logical_qubits)
        .flat_map(|l| block.stabilizers.iter().map(move |s| (l, s)))
        .map(|(l, s)| s.pauli(n, l * block.n_data))
        .collect()
}
