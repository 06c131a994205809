use serde::{Deserialize, Serialize};

use super::codes::{BlockCode, CodeFamily, CodeSpec, StabilizerKind};
use crate::error::{invalid, Error, Result};
use crate::sim::{Circuit, GateOp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogicalBasisState {
    Zero,
    One,
    Plus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogicalGate {
    X(usize),
    Cnot(usize, usize),
}

fn default_rounds() -> usize {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogicalCircuitSpec {
    pub code: CodeSpec,
    pub initial: Vec<LogicalBasisState>,
    #[serde(default)]
    pub logical_gates: Vec<LogicalGate>,
    #[serde(default = "default_rounds")]
    pub stabilize_rounds: usize,
    #[serde(default)]
    pub measure_data: bool,
}

impl LogicalCircuitSpec {
    /// Encode, logical X, stabilize twice: the representative circuit for a
    /// single logical qubit.
    pub fn x_gate(code: CodeSpec, initial: LogicalBasisState) -> Self {
        LogicalCircuitSpec {
            code,
            initial: vec![initial],
            logical_gates: vec![LogicalGate::X(0)],
            stabilize_rounds: 2,
            measure_data: false,
        }
    }

    /// CNOT on logical |1,0⟩.
    pub fn cnot_on_one_zero(code: CodeSpec) -> Self {
        LogicalCircuitSpec {
            code: CodeSpec { logical_qubits: 2, ..code },
            initial: vec![LogicalBasisState::One, LogicalBasisState::Zero],
            logical_gates: vec![LogicalGate::Cnot(0, 1)],
            stabilize_rounds: 2,
            measure_data: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.code.validate()?;
        let l = self.code.logical_qubits;
        if self.initial.len() != l {
            return invalid(format!("{} initial states for {} logical qubits", self.initial.len(), l));
        }
        if self.stabilize_rounds == 0 {
            return invalid("stabilize_rounds must be at least 1");
        }
        for g in &self.logical_gates {
            match *g {
                LogicalGate::X(i) if i >= l => return invalid(format!("logical X operand {i} >= {l}")),
                LogicalGate::Cnot(i, j) if i >= l || j >= l || i == j => {
                    return invalid(format!("bad logical CNOT({i},{j}) for {l} logical qubits"))
                }
                LogicalGate::Cnot(..) if self.code.family == CodeFamily::Surface => {
                    return Err(Error::Unsupported("transversal CNOT between surface code patches".into()))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Where one syndrome bit comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutEntry {
    pub round: usize,
    pub logical: usize,
    pub stabilizer: String,
    /// Position in the extracted syndrome string.
    pub bit: usize,
    /// Index of the raw measurement.
    pub measurement: usize,
    /// Raw measurement this one is compared against, for checks whose first
    /// outcome is random (the projection round of a surface code patch).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyndromeLayout {
    pub entries: Vec<LayoutEntry>,
    /// Raw indices of final data measurements, block-major.
    #[serde(default)]
    pub data_bits: Vec<usize>,
}

impl SyndromeLayout {
    pub fn syndrome_len(&self) -> usize {
        self.entries.len()
    }

    pub fn feature_len(&self, include_data: bool) -> usize {
        self.entries.len() + if include_data { self.data_bits.len() } else { 0 }
    }

    /// Syndrome bits from raw shot bits, optionally followed by data bits.
    pub fn extract(&self, raw: &[bool], include_data: bool) -> Vec<bool> {
        let mut out: Vec<bool> = self
            .entries
            .iter()
            .map(|e| raw[e.measurement] ^ e.reference.is_some_and(|r| raw[r]))
            .collect();
        if include_data {
            out.extend(self.data_bits.iter().map(|&i| raw[i]));
        }
        out
    }

    /// Entries of one round, in bit order.
    pub fn round(&self, r: usize) -> impl Iterator<Item = &LayoutEntry> {
        self.entries.iter().filter(move |e| e.round == r)
    }
}

/// A built circuit plus everything needed to interpret its measurements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncodedCircuit {
    pub spec: LogicalCircuitSpec,
    pub circuit: Circuit,
    pub layout: SyndromeLayout,
    /// Data qubit indices per logical qubit.
    pub data_qubits: Vec<Vec<usize>>,
    /// Ancilla qubit per check, per logical qubit.
    pub ancilla_qubits: Vec<Vec<usize>>,
    /// Op index at which each stabilize round starts.
    pub round_starts: Vec<usize>,
}

impl EncodedCircuit {
    /// Logical Z̄ outcomes read from the final data measurement (parity over
    /// the Z̄ support, no correction).
    pub fn logical_readout(&self, raw: &[bool]) -> Result<Vec<bool>> {
        if !self.spec.measure_data {
            return invalid("circuit has no final data measurement");
        }
        let block = self.spec.code.block();
        let n = block.n_data;
        Ok((0..self.spec.code.logical_qubits)
            .map(|l| block.logical_z.iter().fold(false, |acc, &q| acc ^ raw[self.layout.data_bits[l * n + q]]))
            .collect())
    }

    /// Provenance document: ops plus syndrome layout.
    pub fn to_json_document(&self) -> serde_json::Value {
        serde_json::json!({
            "spec": self.spec,
            "num_qubits": self.circuit.num_qubits,
            "ops": self.circuit.ops,
            "layout": self.layout.entries,
            "data_bits": self.layout.data_bits,
        })
    }
}

/// Row-reduces `rows` over GF(2) and returns (pivot, support) pairs.
fn reduced_rows(rows: &[Vec<bool>]) -> Vec<(usize, Vec<usize>)> {
    let mut m = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
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
        pivots.push(c);
        rank += 1;
    }
    pivots
        .into_iter()
        .enumerate()
        .map(|(r, c)| (c, m[r].iter().enumerate().filter(|(_, &b)| b).map(|(q, _)| q).collect()))
        .collect()
}

/// Standard-form CSS encoder: prepares the uniform superposition over the
/// span of the X checks (plus X̄ for |+⟩) starting from |0…0⟩.
fn encode_block(block: &BlockCode, state: LogicalBasisState, offset: usize, c: &mut Circuit) {
    let mut rows = block.checks_of(StabilizerKind::X);
    if state == LogicalBasisState::Plus {
        let mut lx = vec![false; block.n_data];
        block.logical_x.iter().for_each(|&q| lx[q] = true);
        rows.push(lx);
    }
    let reduced = reduced_rows(&rows);
    for (pivot, _) in &reduced {
        c.push(GateOp::h(offset + pivot));
    }
    for (pivot, support) in &reduced {
        for &q in support.iter().filter(|&&q| q != *pivot) {
            c.push(GateOp::cnot(offset + pivot, offset + q));
        }
    }
    if state == LogicalBasisState::One {
        for &q in &block.logical_x {
            c.push(GateOp::x(offset + q));
        }
    }
}

/// Product-state preparation for a surface code patch; the first stabilize
/// round projects it into the code space.
fn prepare_surface_patch(block: &BlockCode, state: LogicalBasisState, offset: usize, c: &mut Circuit) {
    match state {
        LogicalBasisState::Zero => {}
        LogicalBasisState::One => {
            for &q in &block.logical_x {
                c.push(GateOp::x(offset + q));
            }
        }
        LogicalBasisState::Plus => {
            for q in 0..block.n_data {
                c.push(GateOp::h(offset + q));
            }
        }
    }
}

/// Builds the physical circuit for `spec` over logical indices
/// `0..data+ancilla` (data qubits block-major, then one ancilla per check).
///
/// Order: state preparation, encoding, logical gates, stabilize rounds,
/// optional data measurement. For the surface code the first stabilize round
/// is the encoding step and logical gates follow it.
pub fn build_circuit(spec: &LogicalCircuitSpec) -> Result<EncodedCircuit> {
    spec.validate()?;
    let code = spec.code;
    let block = code.block();
    let l = code.logical_qubits;
    let n_data = block.n_data;
    let n_checks = block.stabilizers.len();
    let total = l * (n_data + n_checks);
    let data_qubits: Vec<Vec<usize>> = (0..l).map(|b| (b * n_data..(b + 1) * n_data).collect()).collect();
    let ancilla_qubits: Vec<Vec<usize>> =
        (0..l).map(|b| (0..n_checks).map(|s| l * n_data + b * n_checks + s).collect()).collect();

    let surface = code.family == CodeFamily::Surface;
    let mut c = Circuit::new(total);
    for (b, &state) in spec.initial.iter().enumerate() {
        if surface {
            prepare_surface_patch(&block, state, b * n_data, &mut c);
        } else {
            encode_block(&block, state, b * n_data, &mut c);
        }
    }

    let apply_gates = |c: &mut Circuit| {
        for g in &spec.logical_gates {
            match *g {
                LogicalGate::X(i) => {
                    for &q in &block.logical_x {
                        c.push(GateOp::x(data_qubits[i][q]));
                    }
                }
                LogicalGate::Cnot(i, j) => {
                    for q in 0..n_data {
                        c.push(GateOp::cnot(data_qubits[i][q], data_qubits[j][q]));
                    }
                }
            }
        }
    };
    if !surface {
        apply_gates(&mut c);
    }

    let mut layout = SyndromeLayout::default();
    let mut round_starts = Vec::new();
    let mut measured = 0usize;
    // first-round outcome of checks that are random on the prepared product state
    let mut reference: Vec<Vec<Option<usize>>> = vec![vec![None; n_checks]; l];
    for round in 0..spec.stabilize_rounds {
        if surface && round == 1 {
            apply_gates(&mut c);
        }
        round_starts.push(c.ops.len());
        if round > 0 {
            for anc in ancilla_qubits.iter().flatten() {
                c.push(GateOp::reset(*anc));
            }
        }
        for b in 0..l {
            let random_kind = match spec.initial[b] {
                LogicalBasisState::Plus => StabilizerKind::Z,
                _ => StabilizerKind::X,
            };
            for (s, stab) in block.stabilizers.iter().enumerate() {
                let anc = ancilla_qubits[b][s];
                match stab.kind {
                    StabilizerKind::Z => {
                        for &q in &stab.support {
                            c.push(GateOp::cnot(data_qubits[b][q], anc));
                        }
                    }
                    StabilizerKind::X => {
                        c.push(GateOp::h(anc));
                        for &q in &stab.support {
                            c.push(GateOp::cnot(anc, data_qubits[b][q]));
                        }
                        c.push(GateOp::h(anc));
                    }
                }
                c.push(GateOp::measure(anc));
                if surface && round == 0 && stab.kind == random_kind {
                    reference[b][s] = Some(measured);
                }
                layout.entries.push(LayoutEntry {
                    round,
                    logical: b,
                    stabilizer: stab.label.clone(),
                    bit: layout.entries.len(),
                    measurement: measured,
                    reference: reference[b][s],
                });
                measured += 1;
            }
        }
    }
    if surface && spec.stabilize_rounds == 1 {
        apply_gates(&mut c);
    }
    if spec.measure_data {
        for q in data_qubits.iter().flatten() {
            c.push(GateOp::measure(*q));
            layout.data_bits.push(measured);
            measured += 1;
        }
    }
    debug_assert_eq!(measured, c.num_measurements());
    Ok(EncodedCircuit { spec: spec.clone(), circuit: c, layout, data_qubits, ancilla_qubits, round_starts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::sim::{run_shot, run_shots, Noiseless};

    fn state_cases() -> Vec<LogicalBasisState> {
        vec![LogicalBasisState::Zero, LogicalBasisState::One, LogicalBasisState::Plus]
    }

    #[test]
    fn repetition_matches_figure_one_shape() {
        let spec = LogicalCircuitSpec {
            code: CodeSpec::repetition(1),
            initial: vec![LogicalBasisState::Zero],
            logical_gates: vec![LogicalGate::X(0)],
            stabilize_rounds: 1,
            measure_data: false,
        };
        let enc = build_circuit(&spec).unwrap();
        assert_eq!(enc.circuit.num_qubits, 5);
        assert_eq!(enc.data_qubits, vec![vec![0, 1, 2]]);
        assert_eq!(enc.ancilla_qubits, vec![vec![3, 4]]);
        assert_eq!(enc.layout.syndrome_len(), 2);
        // parity checks: data 0,1 onto syndrome qubit 3, data 1,2 onto 4
        let pairs = enc.circuit.interaction_pairs();
        assert_eq!(pairs, vec![(0, 3), (1, 3), (1, 4), (2, 4)]);
    }

    #[test]
    fn steane_two_logical_counts() {
        let enc = build_circuit(&LogicalCircuitSpec {
            stabilize_rounds: 1,
            ..LogicalCircuitSpec::cnot_on_one_zero(CodeSpec::steane(1))
        })
        .unwrap();
        assert_eq!(enc.data_qubits.iter().flatten().count(), 14);
        assert_eq!(enc.layout.syndrome_len(), 12);
    }

    #[test]
    fn surface_counts_per_round() {
        let enc = build_circuit(&LogicalCircuitSpec::x_gate(CodeSpec::surface(3, 1), LogicalBasisState::Zero)).unwrap();
        assert_eq!(enc.circuit.num_qubits, 17);
        assert_eq!(enc.layout.round(0).count(), 8);
        assert_eq!(enc.layout.round(1).count(), 8);
        let enc5 = build_circuit(&LogicalCircuitSpec::x_gate(CodeSpec::surface(5, 1), LogicalBasisState::Zero)).unwrap();
        assert_eq!(enc5.circuit.num_qubits, 49);
    }

    #[test]
    fn layout_bits_are_contiguous() {
        let enc = build_circuit(&LogicalCircuitSpec::cnot_on_one_zero(CodeSpec::shor(1))).unwrap();
        let bits: Vec<usize> = enc.layout.entries.iter().map(|e| e.bit).collect();
        assert_eq!(bits, (0..enc.layout.syndrome_len()).collect::<Vec<_>>());
    }

    #[test]
    fn rejects_surface_cnot_and_bad_operands() {
        let spec = LogicalCircuitSpec::cnot_on_one_zero(CodeSpec::surface(3, 1));
        assert!(matches!(build_circuit(&spec), Err(Error::Unsupported(_))));
        let mut spec = LogicalCircuitSpec::x_gate(CodeSpec::steane(1), LogicalBasisState::Zero);
        spec.logical_gates = vec![LogicalGate::X(1)];
        assert!(build_circuit(&spec).is_err());
        spec.logical_gates.clear();
        spec.stabilize_rounds = 0;
        assert!(build_circuit(&spec).is_err());
        spec.stabilize_rounds = 1;
        spec.initial.push(LogicalBasisState::Zero);
        assert!(build_circuit(&spec).is_err());
    }

    #[test]
    fn noiseless_syndromes_are_zero_for_all_codes_and_states() {
        for code in [CodeSpec::repetition(1), CodeSpec::shor(1), CodeSpec::steane(1), CodeSpec::surface(3, 1)] {
            for state in state_cases() {
                let mut spec = LogicalCircuitSpec::x_gate(code, state);
                spec.stabilize_rounds = 3;
                spec.measure_data = true;
                let enc = build_circuit(&spec).unwrap();
                for shot in run_shots(&enc.circuit, &Noiseless, 3, 0, 40).unwrap() {
                    let syn = enc.layout.extract(&shot.bits, false);
                    assert!(syn.iter().all(|b| !b), "{code} {state:?}: {syn:?}");
                }
            }
        }
    }

    #[test]
    fn logical_x_and_cnot_act_correctly() {
        let mut rng = seeded(9);
        for code in [CodeSpec::repetition(1), CodeSpec::shor(1), CodeSpec::steane(1), CodeSpec::surface(3, 1), CodeSpec::surface(5, 1)] {
            let mut spec = LogicalCircuitSpec::x_gate(code, LogicalBasisState::Zero);
            spec.measure_data = true;
            let enc = build_circuit(&spec).unwrap();
            for _ in 0..5 {
                let shot = run_shot(&enc.circuit, &Noiseless, &mut rng).unwrap();
                assert_eq!(enc.logical_readout(&shot.bits).unwrap(), vec![true], "{code}");
            }
        }
        for code in [CodeSpec::repetition(1), CodeSpec::shor(1), CodeSpec::steane(1)] {
            let mut spec = LogicalCircuitSpec::cnot_on_one_zero(code);
            spec.measure_data = true;
            let enc = build_circuit(&spec).unwrap();
            for _ in 0..5 {
                let shot = run_shot(&enc.circuit, &Noiseless, &mut rng).unwrap();
                assert_eq!(enc.logical_readout(&shot.bits).unwrap(), vec![true, true], "{code}");
            }
        }
    }
}
