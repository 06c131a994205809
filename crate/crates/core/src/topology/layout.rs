use serde::{Deserialize, Serialize};

use super::graph::ConnectivityGraph;
use crate::error::{invalid, Error, Result};
use crate::sim::{Circuit, GateKind};

/// Injective map from circuit qubit `i` to physical qubit `physical[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mapping {
    pub mapping_id: String,
    pub physical: Vec<usize>,
}

impl Mapping {
    pub fn new(mapping_id: impl Into<String>, physical: Vec<usize>) -> Result<Self> {
        let m = Mapping { mapping_id: mapping_id.into(), physical };
        m.check_injective()?;
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.physical.len()
    }

    pub fn is_empty(&self) -> bool {
        self.physical.is_empty()
    }

    fn check_injective(&self) -> Result<()> {
        let mut sorted = self.physical.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return invalid(format!("mapping {} is not injective", self.mapping_id));
        }
        Ok(())
    }

    fn check_host(&self, host: &ConnectivityGraph) -> Result<()> {
        self.check_injective()?;
        if let Some(&q) = self.physical.iter().find(|&&q| q >= host.num_qubits()) {
            return Err(Error::QubitOutOfRange { index: q, n: host.num_qubits() });
        }
        Ok(())
    }

    /// Sorted image, used to tell placements apart.
    pub fn image(&self) -> Vec<usize> {
        let mut v = self.physical.clone();
        v.sort_unstable();
        v
    }
}

/// Circuit qubit `i` on physical qubit `i`.
pub fn trivial_layout(circuit_qubits: usize, graph: &ConnectivityGraph) -> Result<Mapping> {
    if circuit_qubits > graph.num_qubits() {
        return Err(Error::InsufficientQubits { need: circuit_qubits, have: graph.num_qubits() });
    }
    Mapping::new("trivial", (0..circuit_qubits).collect())
}

fn check_adjacency(circuit: &Circuit, host: &ConnectivityGraph) -> Result<()> {
    for op in circuit.ops.iter().filter(|op| op.kind == GateKind::Cnot) {
        let (a, b) = (op.targets[0], op.targets[1]);
        if !host.has_edge(a, b) {
            return Err(Error::NotExecutable(format!("CNOT({a},{b}) acts on uncoupled qubits")));
        }
    }
    Ok(())
}

/// Rewrites a circuit over logical indices onto `host` through `mapping`.
pub fn apply_layout(circuit: &Circuit, mapping: &Mapping, host: &ConnectivityGraph) -> Result<Circuit> {
    circuit.validate()?;
    mapping.check_host(host)?;
    if mapping.len() < circuit.num_qubits {
        return Err(Error::InsufficientQubits { need: circuit.num_qubits, have: mapping.len() });
    }
    let physical = circuit.relabel(host.num_qubits(), |q| mapping.physical[q]);
    check_adjacency(&physical, host)?;
    Ok(physical)
}

/// Subgraph of `graph` induced by the qubits `circuit` occupies under
/// `mapping`. Node `i` of the result is circuit qubit `i`.
pub fn used_subgraph(circuit: &Circuit, mapping: &Mapping, graph: &ConnectivityGraph) -> Result<ConnectivityGraph> {
    apply_layout(circuit, mapping, graph)?;
    graph.induced(&mapping.physical[..circuit.num_qubits])
}

/// Moves a laid-out circuit from placement `old` to placement `new`.
pub fn remap(circuit: &Circuit, old: &Mapping, new: &Mapping, host: &ConnectivityGraph) -> Result<Circuit> {
    old.check_host(host)?;
    new.check_host(host)?;
    if old.len() != new.len() {
        return Err(Error::DimensionMismatch { expected: old.len(), got: new.len() });
    }
    let mut back = vec![usize::MAX; host.num_qubits()];
    for (i, &p) in old.physical.iter().enumerate() {
        back[p] = i;
    }
    for op in &circuit.ops {
        if let Some(&q) = op.targets.iter().find(|&&q| q >= back.len() || back[q] == usize::MAX) {
            return invalid(format!("qubit {q} is not in the image of mapping {}", old.mapping_id));
        }
    }
    let moved = circuit.relabel(host.num_qubits(), |q| new.physical[back[q]]);
    check_adjacency(&moved, host)?;
    Ok(moved)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::GateOp;

    #[test]
    fn trivial_layout_cases() {
        let g = ConnectivityGraph::grid(4, 5);
        assert_eq!(trivial_layout(5, &g).unwrap().physical, vec![0, 1, 2, 3, 4]);
        assert_eq!(trivial_layout(20, &g).unwrap().physical, (0..20).collect::<Vec<_>>());
        assert!(matches!(trivial_layout(21, &g), Err(Error::InsufficientQubits { need: 21, have: 20 })));
    }

    #[test]
    fn used_subgraph_of_single_qubit_circuit() {
        let mut c = Circuit::new(1);
        c.push(GateOp::h(0)).push(GateOp::measure(0));
        let g = ConnectivityGraph::heavy_hex(1, 1);
        let m = Mapping::new("m", vec![5]).unwrap();
        let sub = used_subgraph(&c, &m, &g).unwrap();
        assert_eq!(sub.num_qubits(), 1);
        assert!(sub.edges().is_empty());
    }

    #[test]
    fn non_adjacent_cnot_is_rejected() {
        let mut c = Circuit::new(2);
        c.push(GateOp::cnot(0, 1));
        let g = ConnectivityGraph::path(4);
        let m = Mapping::new("far", vec![0, 2]).unwrap();
        assert!(matches!(used_subgraph(&c, &m, &g), Err(Error::NotExecutable(_))));
        assert!(Mapping::new("dup", vec![1, 1]).is_err());
    }

    #[test]
    fn remap_round_trip() {
        let mut c = Circuit::new(2);
        c.push(GateOp::h(0)).push(GateOp::cnot(0, 1)).push(GateOp::measure(1));
        let g = ConnectivityGraph::cycle(6);
        let a = Mapping::new("a", vec![0, 1]).unwrap();
        let b = Mapping::new("b", vec![4, 3]).unwrap();
        let pa = apply_layout(&c, &a, &g).unwrap();
        assert_eq!(remap(&pa, &a, &a, &g).unwrap(), pa);
        let pb = remap(&pa, &a, &b, &g).unwrap();
        assert_eq!(pb.ops[1].targets, vec![4, 3]);
        assert_eq!(remap(&pb, &b, &a, &g).unwrap(), pa);
        let bad = Mapping::new("bad", vec![0, 3]).unwrap();
        assert!(remap(&pa, &a, &bad, &g).is_err());
    }
}
