//! Unsupervised change detection over job-averaged syndrome vectors.

mod cluster;
mod vectors;

pub use cluster::{ari, dbscan, sweep, verdict, ClusterModel, ClusterReport, SweepResult, SweepRow, Verdict};
pub use vectors::{
    job_vector, job_vectors, pairwise_distances, pearson, separation_stat, standardize, write_pairs_csv, JobVector,
    PairSample, Quantiles, SeparationStats,
};
