//! Clifford stabilizer simulation with Pauli noise.

mod circuit;
mod noise;
mod shot;
mod tableau;

pub use circuit::{Circuit, GateKind, GateOp};
pub use noise::{
    apply_readout_error, sample_pauli_channel, FaultAt, NoiseModel, Noiseless, Pauli, PauliChannel,
    PauliFault, ReadoutError,
};
pub use shot::{run_shot, run_shots, ShotOutcome};
pub use tableau::Tableau;
