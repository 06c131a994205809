//! The virtual provider: synthetic backends, calibration drift and job
//! execution.

mod job;
mod profile;
mod store;

pub use job::{dishonest_route, execute_job, Job, SyndromeRecord};
pub use profile::{
    advance_calibration, generate_fleet, CalibrationEpoch, CompiledNoise, DriftConfig, FleetConfig, GateDurations,
    GraphTemplate, LogRange, NoiseProfile, NoiseTier, QubitCalibration,
};
pub use store::{read_profiles, read_shot_log, write_profiles, write_shot_log, ShotLogWriter};
