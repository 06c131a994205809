use rand::Rng;
use rayon::prelude::*;

use super::circuit::{Circuit, GateKind};
use super::noise::{NoiseModel, Pauli, PauliFault};
use super::tableau::Tableau;
use crate::error::Result;
use crate::rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShotOutcome {
    /// One bit per executed `MeasureZ`, in circuit order.
    pub bits: Vec<bool>,
    /// Faults drawn during the shot. Debug channel only.
    pub faults_injected: Vec<PauliFault>,
}

impl ShotOutcome {
    pub fn bit_string(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

/// Circuit with targets rewritten onto the dense range of used qubits, so a
/// 17-qubit patch on a 100-qubit device simulates with a 17-qubit tableau.
struct Compact {
    width: usize,
    targets: Vec<[usize; 2]>,
}

impl Compact {
    fn new(circuit: &Circuit) -> Self {
        let physical = circuit.used_qubits();
        let mut index = vec![usize::MAX; circuit.num_qubits];
        for (i, &q) in physical.iter().enumerate() {
            index[q] = i;
        }
        let targets = circuit
            .ops
            .iter()
            .map(|op| {
                let a = index[op.targets[0]];
                let b = op.targets.get(1).map_or(usize::MAX, |&q| index[q]);
                [a, b]
            })
            .collect();
        Compact { width: physical.len(), targets }
    }
}

fn inject<R: Rng + ?Sized>(
    t: &mut Tableau,
    noise: &impl NoiseModel,
    op_index: usize,
    circuit: &Circuit,
    phys: usize,
    local: usize,
    faults: &mut Vec<PauliFault>,
    rng: &mut R,
) {
    let ch = noise.gate_channel(op_index, &circuit.ops[op_index], phys);
    if let Some(p) = ch.sample(rng) {
        match p {
            Pauli::X => t.x_gate(local),
            Pauli::Y => t.y_gate(local),
            Pauli::Z => t.z_gate(local),
        }
        faults.push(PauliFault { qubit: phys, pauli: p });
    }
}

fn run_prepared<R: Rng + ?Sized>(
    circuit: &Circuit,
    compact: &Compact,
    noise: &impl NoiseModel,
    rng: &mut R,
) -> ShotOutcome {
    let mut t = Tableau::new(compact.width);
    let mut bits = Vec::with_capacity(circuit.num_measurements());
    let mut faults = Vec::new();
    for (i, op) in circuit.ops.iter().enumerate() {
        let [a, b] = compact.targets[i];
        match op.kind {
            GateKind::MeasureZ => {
                let q = op.targets[0];
                inject(&mut t, noise, i, circuit, q, a, &mut faults, rng);
                let raw = t.measure_z(a, rng).expect("compact index in range");
                bits.push(noise.readout(q).apply(raw, rng));
            }
            GateKind::Reset => {
                t.reset(a, rng).expect("compact index in range");
                inject(&mut t, noise, i, circuit, op.targets[0], a, &mut faults, rng);
            }
            kind => {
                match kind {
                    GateKind::H => t.h(a),
                    GateKind::S => t.s(a),
                    GateKind::X => t.x_gate(a),
                    GateKind::Z => t.z_gate(a),
                    GateKind::Cnot => t.cnot(a, b),
                    GateKind::MeasureZ | GateKind::Reset => unreachable!(),
                }
                for (k, &q) in op.targets.iter().enumerate() {
                    let local = if k == 0 { a } else { b };
                    inject(&mut t, noise, i, circuit, q, local, &mut faults, rng);
                }
            }
        }
    }
    ShotOutcome { bits, faults_injected: faults }
}

/// Executes one shot of `circuit` under `noise`.
///
/// After every unitary gate and reset, each target draws a fault from the
/// model's channel; measurements draw theirs just before readout and then
/// pass through the readout error.
pub fn run_shot<R: Rng + ?Sized>(circuit: &Circuit, noise: &impl NoiseModel, rng: &mut R) -> Result<ShotOutcome> {
    circuit.validate()?;
    let compact = Compact::new(circuit);
    Ok(run_prepared(circuit, &compact, noise, rng))
}

/// Shots `first..first + count` of a job, shot `k` on stream `k` of `seed`.
/// Output is identical regardless of thread count.
pub fn run_shots(
    circuit: &Circuit,
    noise: &impl NoiseModel,
    seed: u64,
    first: u64,
    count: usize,
) -> Result<Vec<ShotOutcome>> {
    circuit.validate()?;
    let compact = Compact::new(circuit);
    Ok((0..count as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng::stream(seed, first + k);
            run_prepared(circuit, &compact, noise, &mut rng)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{FaultAt, GateOp, Noiseless};

    fn bell() -> Circuit {
        let mut c = Circuit::new(4);
        c.push(GateOp::h(1)).push(GateOp::cnot(1, 3)).push(GateOp::measure(1)).push(GateOp::measure(3));
        c
    }

    #[test]
    fn compaction_skips_unused_qubits() {
        let c = bell();
        let shots = run_shots(&c, &Noiseless, 11, 0, 200).unwrap();
        assert!(shots.iter().all(|s| s.bits[0] == s.bits[1]));
    }

    #[test]
    fn shots_are_reproducible_in_isolation() {
        let c = bell();
        let all = run_shots(&c, &Noiseless, 5, 0, 64).unwrap();
        let one = run_shots(&c, &Noiseless, 5, 37, 1).unwrap();
        assert_eq!(all[37], one[0]);
    }

    #[test]
    fn deterministic_fault_is_recorded() {
        let mut c = Circuit::new(1);
        c.push(GateOp::h(0)).push(GateOp::h(0)).push(GateOp::measure(0));
        let noise = FaultAt::single(1, 0, Pauli::X);
        let out = run_shot(&c, &noise, &mut rng::seeded(0)).unwrap();
        assert_eq!(out.bits, vec![true]);
        assert_eq!(out.faults_injected, vec![PauliFault { qubit: 0, pauli: Pauli::X }]);
    }

    #[test]
    fn invalid_circuit_is_rejected() {
        let mut c = Circuit::new(1);
        c.push(GateOp::x(3));
        assert!(run_shot(&c, &Noiseless, &mut rng::seeded(0)).is_err());
    }
}
