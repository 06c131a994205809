//! Scenario files and the end-to-end experiment pipelines built on them.

mod pipelines;
pub mod presets;
mod run;
mod scenario;

pub use pipelines::{
    accuracy, fit, run_causal, run_change_detection, run_clustering, run_drift_comparison, run_metrics,
    run_specificity, run_supervised, verify_jobs, CausalReport, ChangeDetection, ClusterAnalysis, DriftComparison,
    JobVerdict, SpecificityReport, SupervisedReport, TrainedModel,
};
pub use run::{
    batch_of, build_fleet, collect, encode_records, host_graph, mappings_for, prepare_circuits, profile_at_epoch, select,
    PreparedCircuit,
};
pub use scenario::{
    BatchRole, CircuitEntry, ClusterSpec, CurveSpec, FeatureBits, FeatureSpec, FleetSpec, HostSpec, JobBatch,
    MappingPlan, Pipeline, RoutingEvent, Scenario,
};
