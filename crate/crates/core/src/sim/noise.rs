//! Pauli channels, readout error and the noise-model interface used by
//! [`run_shot`](super::run_shot).

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::circuit::GateOp;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    fn index(self) -> usize {
        match self {
            Pauli::X => 1,
            Pauli::Y => 2,
            Pauli::Z => 3,
        }
    }
    fn from_index(i: usize) -> Option<Pauli> {
        match i {
            1 => Some(Pauli::X),
            2 => Some(Pauli::Y),
            3 => Some(Pauli::Z),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliFault {
    pub qubit: usize,
    pub pauli: Pauli,
}

/// Single-qubit Pauli channel: X, Y, Z with the given probabilities,
/// identity otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct PauliChannel {
    pub px: f64,
    pub py: f64,
    pub pz: f64,
}

impl PauliChannel {
    pub fn new(px: f64, py: f64, pz: f64) -> Result<Self> {
        let ok = |p: f64| p.is_finite() && p >= 0.0;
        if !(ok(px) && ok(py) && ok(pz)) {
            return Err(Error::InvalidProbability(format!("({px}, {py}, {pz}) has a negative entry")));
        }
        if px + py + pz > 1.0 + 1e-12 {
            return Err(Error::InvalidProbability(format!("({px}, {py}, {pz}) sums above 1")));
        }
        Ok(PauliChannel { px, py, pz })
    }

    pub fn identity() -> Self {
        PauliChannel::default()
    }

    /// Depolarizing channel with error rate `eps`: each of X, Y, Z with `eps/4`.
    pub fn depolarizing(eps: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::InvalidProbability(format!("depolarizing rate {eps}")));
        }
        let p = eps * 0.75 / 3.0;
        PauliChannel::new(p, p, p)
    }

    /// Pauli twirl of amplitude damping plus dephasing over `duration`.
    ///
    /// `px = py = (1 - e^{-t/T1}) / 4`, `pz = (1 - e^{-t/T2}) / 2 - px`;
    /// requires `0 < T2 <= 2 T1`.
    pub fn thermal_relaxation(duration: f64, t1: f64, t2: f64) -> Result<Self> {
        if !(t1 > 0.0 && t2 > 0.0 && t2 <= 2.0 * t1 * (1.0 + 1e-12)) {
            return Err(Error::InvalidProbability(format!("T1={t1}, T2={t2} violates 0 < T2 <= 2 T1")));
        }
        if !(duration >= 0.0 && duration.is_finite()) {
            return Err(Error::InvalidProbability(format!("duration {duration}")));
        }
        let damp = 1.0 - (-duration / t1).exp();
        let deph = 1.0 - (-duration / t2).exp();
        let pxy = damp / 4.0;
        let pz = (deph / 2.0 - pxy).max(0.0);
        PauliChannel::new(pxy, pxy, pz)
    }

    pub fn total(&self) -> f64 {
        self.px + self.py + self.pz
    }

    fn probs(&self) -> [f64; 4] {
        [1.0 - self.total(), self.px, self.py, self.pz]
    }

    /// Channel of two independent Pauli channels applied back to back.
    pub fn compose(&self, other: &PauliChannel) -> PauliChannel {
        let (a, b) = (self.probs(), other.probs());
        let mut out = [0.0; 4];
        // Paulis as (x, z) bit pairs: I=00, X=10, Y=11, Z=01; product is XOR
        let code = [0b00, 0b10, 0b11, 0b01];
        let decode = |c: usize| code.iter().position(|&k| k == c).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                out[decode(code[i] ^ code[j])] += a[i] * b[j];
            }
        }
        PauliChannel { px: out[1], py: out[2], pz: out[3] }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Pauli> {
        if self.total() <= 0.0 {
            return None;
        }
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, p) in [self.px, self.py, self.pz].into_iter().enumerate() {
            acc += p;
            if u < acc {
                return Pauli::from_index(i + 1);
            }
        }
        None
    }
}

/// Draws one fault from `(pX, pY, pZ)`.
pub fn sample_pauli_channel<R: Rng + ?Sized>(probs: (f64, f64, f64), rng: &mut R) -> Result<Option<Pauli>> {
    Ok(PauliChannel::new(probs.0, probs.1, probs.2)?.sample(rng))
}

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct ReadoutError {
    pub p01: f64,
    pub p10: f64,
}

impl ReadoutError {
    pub fn new(p01: f64, p10: f64) -> Result<Self> {
        for p in [p01, p10] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidProbability(format!("readout flip probability {p}")));
            }
        }
        Ok(ReadoutError { p01, p10 })
    }

    pub fn apply<R: Rng + ?Sized>(&self, bit: bool, rng: &mut R) -> bool {
        apply_readout_error(bit, self.p01, self.p10, rng)
    }
}

/// Flips 0→1 with probability `p01` and 1→0 with probability `p10`.
pub fn apply_readout_error<R: Rng + ?Sized>(bit: bool, p01: f64, p10: f64, rng: &mut R) -> bool {
    let p = if bit { p10 } else { p01 };
    if p <= 0.0 {
        return bit;
    }
    if rng.random::<f64>() < p {
        !bit
    } else {
        bit
    }
}

/// Source of per-operation noise for the shot runner.
///
/// Qubit indices passed here are the circuit's own indices (physical qubits
/// for a laid-out circuit).
pub trait NoiseModel: Sync {
    /// Pauli channel hitting `qubit` around operation `op_index`. For
    /// measurements the channel acts just before readout, for every other
    /// operation just after it.
    fn gate_channel(&self, op_index: usize, op: &GateOp, qubit: usize) -> PauliChannel;

    fn readout(&self, qubit: usize) -> ReadoutError;
}

/// No noise at all.
#[derive(Clone, Copy, Debug, Default)]
pub struct Noiseless;

impl NoiseModel for Noiseless {
    fn gate_channel(&self, _: usize, _: &GateOp, _: usize) -> PauliChannel {
        PauliChannel::identity()
    }
    fn readout(&self, _: usize) -> ReadoutError {
        ReadoutError::default()
    }
}

/// Deterministic faults at fixed op positions; useful for checking syndrome
/// arithmetic.
#[derive(Clone, Debug, Default)]
pub struct FaultAt {
    pub faults: Vec<(usize, PauliFault)>,
}

impl FaultAt {
    pub fn single(op_index: usize, qubit: usize, pauli: Pauli) -> Self {
        FaultAt { faults: vec![(op_index, PauliFault { qubit, pauli })] }
    }
}

impl NoiseModel for FaultAt {
    fn gate_channel(&self, op_index: usize, _: &GateOp, qubit: usize) -> PauliChannel {
        let mut ch = PauliChannel::identity();
        for (at, f) in &self.faults {
            if *at == op_index && f.qubit == qubit {
                let mut p = [0.0; 4];
                p[f.pauli.index()] = 1.0;
                ch = ch.compose(&PauliChannel { px: p[1], py: p[2], pz: p[3] });
            }
        }
        ch
    }
    fn readout(&self, _: usize) -> ReadoutError {
        ReadoutError::default()
    }
}
