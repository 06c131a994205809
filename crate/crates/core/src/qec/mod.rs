//! Error-correcting code circuits: generators, circuit construction and
//! single-error lookup decoding.

mod builder;
mod codes;
mod decoder;
mod pauli;

pub use builder::{
    build_circuit, EncodedCircuit, LayoutEntry, LogicalBasisState, LogicalCircuitSpec, LogicalGate, SyndromeLayout,
};
pub use codes::{stabilizer_generators, BlockCode, CodeFamily, CodeSpec, Stabilizer, StabilizerKind};
pub use decoder::{decode_single_error, Decoded, LookupDecoder};
pub use pauli::PauliString;
