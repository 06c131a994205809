//! Backend fingerprinting from quantum error-correction syndromes.
//!
//! The crate builds a small virtual quantum cloud and the classical tooling
//! needed to tell its machines apart:
//!
//! - [`sim`]: a Clifford stabilizer-tableau simulator with stochastic Pauli
//!   noise and readout error.
//! - [`qec`]: repetition, Shor, Steane and rotated surface code circuits with
//!   ancilla-based syndrome extraction and single-error lookup decoders.
//! - [`topology`]: coupling graphs, layouts and randomized subgraph
//!   embeddings used to re-map circuits onto the same hardware.
//! - [`farm`]: synthetic backend fleets, calibration drift and job execution
//!   producing labelled syndrome records.
//! - [`sup`]: the supervised pipeline (features, one-hidden-layer MLP, mode
//!   aggregation, accuracy curves and summary metrics).
//! - [`unsup`]: job-averaged vectors, pair distances, DBSCAN, ARI and
//!   backend-change verdicts.
//! - [`experiment`]: scenario files and the end-to-end experiment drivers used
//!   by the `sfp` command line tool.

pub mod error;
pub mod rng;

pub mod experiment;
pub mod farm;
pub mod qec;
pub mod sim;
pub mod sup;
pub mod topology;
pub mod unsup;

pub mod cli;

pub use error::{Error, Result};
