use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GateKind {
    H,
    S,
    X,
    Z,
    Cnot,
    MeasureZ,
    Reset,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot => 2,
            _ => 1,
        }
    }

    pub fn is_unitary(self) -> bool {
        !matches!(self, GateKind::MeasureZ | GateKind::Reset)
    }
}

/// One gate application.
///
/// `duration` overrides the backend's calibrated duration for this gate kind
/// when set; `None` means the backend decides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateOp {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<f64>,
}

impl GateOp {
    pub fn new(kind: GateKind, targets: Vec<usize>) -> Result<Self> {
        let op = GateOp { kind, targets, duration: None };
        op.validate()?;
        Ok(op)
    }

    pub fn h(q: usize) -> Self {
        GateOp { kind: GateKind::H, targets: vec![q], duration: None }
    }
    pub fn s(q: usize) -> Self {
        GateOp { kind: GateKind::S, targets: vec![q], duration: None }
    }
    pub fn x(q: usize) -> Self {
        GateOp { kind: GateKind::X, targets: vec![q], duration: None }
    }
    pub fn z(q: usize) -> Self {
        GateOp { kind: GateKind::Z, targets: vec![q], duration: None }
    }
    pub fn cnot(control: usize, target: usize) -> Self {
        GateOp { kind: GateKind::Cnot, targets: vec![control, target], duration: None }
    }
    pub fn measure(q: usize) -> Self {
        GateOp { kind: GateKind::MeasureZ, targets: vec![q], duration: None }
    }
    pub fn reset(q: usize) -> Self {
        GateOp { kind: GateKind::Reset, targets: vec![q], duration: None }
    }

    pub fn with_duration(mut self, seconds: f64) -> Self {
        self.duration = Some(seconds);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.targets.len() != self.kind.arity() {
            return Err(Error::InvalidGate(format!(
                "{:?} takes {} target(s), got {}",
                self.kind,
                self.kind.arity(),
                self.targets.len()
            )));
        }
        if self.kind == GateKind::Cnot && self.targets[0] == self.targets[1] {
            return Err(Error::InvalidGate("CNOT control and target coincide".into()));
        }
        if let Some(d) = self.duration {
            if !(d >= 0.0 && d.is_finite()) {
                return Err(Error::InvalidGate(format!("negative or non-finite duration {d}")));
            }
        }
        Ok(())
    }
}

/// Ordered list of gate applications over `num_qubits` qubits.
///
/// Every `MeasureZ` contributes one classical bit, in circuit order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub num_qubits: usize,
    pub ops: Vec<GateOp>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit { num_qubits, ops: Vec::new() }
    }

    pub fn push(&mut self, op: GateOp) -> &mut Self {
        self.ops.push(op);
        self
    }

    pub fn num_measurements(&self) -> usize {
        self.ops.iter().filter(|op| op.kind == GateKind::MeasureZ).count()
    }

    pub fn validate(&self) -> Result<()> {
        for op in &self.ops {
            op.validate()?;
            for &q in &op.targets {
                if q >= self.num_qubits {
                    return Err(Error::QubitOutOfRange { index: q, n: self.num_qubits });
                }
            }
        }
        Ok(())
    }

    /// Qubits touched by at least one op, ascending.
    pub fn used_qubits(&self) -> Vec<usize> {
        let mut seen = vec![false; self.num_qubits];
        for op in &self.ops {
            for &q in &op.targets {
                if q < seen.len() {
                    seen[q] = true;
                }
            }
        }
        seen.iter().enumerate().filter(|(_, &s)| s).map(|(q, _)| q).collect()
    }

    /// Distinct unordered qubit pairs acted on by two-qubit gates.
    pub fn interaction_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs: Vec<(usize, usize)> = self
            .ops
            .iter()
            .filter(|op| op.kind == GateKind::Cnot)
            .map(|op| {
                let (a, b) = (op.targets[0], op.targets[1]);
                (a.min(b), a.max(b))
            })
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        pairs
    }

    /// Rewrites every target through `f`, keeping the gate sequence.
    pub fn relabel(&self, num_qubits: usize, f: impl Fn(usize) -> usize) -> Circuit {
        Circuit {
            num_qubits,
            ops: self
                .ops
                .iter()
                .map(|op| GateOp {
                    kind: op.kind,
                    targets: op.targets.iter().map(|&q| f(q)).collect(),
                    duration: op.duration,
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arity_is_checked() {
        assert!(GateOp::new(GateKind::Cnot, vec![0]).is_err());
        assert!(GateOp::new(GateKind::Cnot, vec![1, 1]).is_err());
        assert!(GateOp::new(GateKind::H, vec![0, 1]).is_err());
        assert!(GateOp::new(GateKind::Cnot, vec![0, 1]).is_ok());
        assert!(GateOp::h(0).with_duration(-1.0).validate().is_err());
    }

    #[test]
    fn out_of_range_targets_fail_validation() {
        let mut c = Circuit::new(2);
        c.push(GateOp::cnot(0, 2));
        assert!(matches!(c.validate(), Err(Error::QubitOutOfRange { index: 2, n: 2 })));
    }

    #[test]
    fn interaction_pairs_are_unordered_and_unique() {
        let mut c = Circuit::new(3);
        c.push(GateOp::cnot(1, 0)).push(GateOp::cnot(0, 1)).push(GateOp::cnot(2, 1));
        assert_eq!(c.interaction_pairs(), vec![(0, 1), (1, 2)]);
        assert_eq!(c.used_qubits(), vec![0, 1, 2]);
    }

    #[test]
    fn json_uses_screaming_gate_names() {
        let json = serde_json::to_string(&GateOp::measure(3)).unwrap();
        assert_eq!(json, r#"{"kind":"MEASURE_Z","targets":[3]}"#);
    }
}
