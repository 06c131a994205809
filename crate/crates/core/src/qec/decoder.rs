use std::collections::HashMap;

use super::codes::{stabilizer_generators, CodeSpec, StabilizerKind};
use super::pauli::{in_span, PauliString};
use crate::error::{Error, Result};
use crate::sim::{Pauli, PauliFault};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decoded {
    /// Zero syndrome.
    NoError,
    Fault(PauliFault),
    /// Nonzero syndrome that no single-qubit fault produces.
    Unclassified,
}

/// Syndrome → single-qubit fault table for one round of a code.
///
/// Built by enumerating every X, Y and Z fault on every data qubit. When
/// several faults share a syndrome (they differ by a stabilizer), the first
/// in qubit-major X/Y/Z order is kept.
#[derive(Clone, Debug)]
pub struct LookupDecoder {
    code: CodeSpec,
    generators: Vec<PauliString>,
    table: HashMap<Vec<bool>, PauliFault>,
}

impl LookupDecoder {
    pub fn new(code: &CodeSpec) -> Result<Self> {
        code.validate()?;
        let generators = stabilizer_generators(code);
        let n = code.data_qubits();
        let mut table = HashMap::new();
        for qubit in 0..n {
            for pauli in [Pauli::X, Pauli::Y, Pauli::Z] {
                let fault = PauliFault { qubit, pauli };
                let syn = syndrome_of(&generators, &PauliString::from_fault(n, fault));
                if syn.iter().any(|&b| b) {
                    table.entry(syn).or_insert(fault);
                }
            }
        }
        Ok(LookupDecoder { code: *code, generators, table })
    }

    pub fn syndrome_len(&self) -> usize {
        self.generators.len()
    }

    pub fn syndrome(&self, error: &PauliString) -> Vec<bool> {
        syndrome_of(&self.generators, error)
    }

    pub fn decode(&self, syndrome: &[bool]) -> Result<Decoded> {
        if syndrome.len() != self.generators.len() {
            return Err(Error::DimensionMismatch { expected: self.generators.len(), got: syndrome.len() });
        }
        if syndrome.iter().all(|&b| !b) {
            return Ok(Decoded::NoError);
        }
        Ok(self.table.get(syndrome).map_or(Decoded::Unclassified, |f| Decoded::Fault(*f)))
    }

    /// Whether `residual` (injected fault times correction) acts trivially on
    /// the errors this code protects against: its X part lies in the span of
    /// the X checks when Z checks exist, and likewise for its Z part.
    pub fn is_trivial_residual(&self, residual: &PauliString) -> bool {
        let block = self.code.block();
        let n = block.n_data;
        let l = self.code.logical_qubits;
        for b in 0..l {
            let xs = &residual.x[b * n..(b + 1) * n];
            let zs = &residual.z[b * n..(b + 1) * n];
            let has = |k| block.stabilizers.iter().any(|s| s.kind == k);
            if has(StabilizerKind::Z) && !in_span(&block.checks_of(StabilizerKind::X), xs) {
                return false;
            }
            if has(StabilizerKind::X) && !in_span(&block.checks_of(StabilizerKind::Z), zs) {
                return false;
            }
        }
        true
    }
}

fn syndrome_of(generators: &[PauliString], error: &PauliString) -> Vec<bool> {
    generators.iter().map(|g| !g.commutes_with(error)).collect()
}

/// One-shot convenience wrapper around [`LookupDecoder`].
pub fn decode_single_error(code: &CodeSpec, syndrome: &[bool]) -> Result<Decoded> {
    LookupDecoder::new(code)?.decode(syndrome)
}
