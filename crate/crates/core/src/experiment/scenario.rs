use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::farm::{DriftConfig, FleetConfig, GraphTemplate, NoiseTier};
use crate::qec::{CodeSpec, LogicalBasisState, LogicalCircuitSpec};
use crate::sup::{CalibrationConfig, TrainConfig};

/// Coupling graph of every backend in the fleet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HostSpec {
    /// Union of the scenario circuits' own interaction graphs, so every
    /// circuit runs under the trivial layout.
    Native,
    Template { template: GraphTemplate },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FleetSpec {
    pub backends: usize,
    pub tier: NoiseTier,
    pub host: HostSpec,
    pub ranges: FleetConfig,
    pub drift: DriftConfig,
    /// Simulated hours between calibrations.
    pub calibration_interval_hours: f64,
}

impl Default for FleetSpec {
    fn default() -> Self {
        FleetSpec {
            backends: 5,
            tier: NoiseTier::FullEmulation,
            host: HostSpec::Native,
            ranges: FleetConfig::default(),
            drift: DriftConfig::default(),
            calibration_interval_hours: 24.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitEntry {
    pub name: String,
    #[serde(flatten)]
    pub spec: LogicalCircuitSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MappingPlan {
    Trivial,
    /// `k` placements per backend found by randomized embedding search.
    Embeddings { k: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatchRole {
    Train,
    Test,
    /// Jobs checked by the verification loop.
    Verify,
}

/// A block of jobs submitted to every backend (and every mapping) at one
/// simulated time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JobBatch {
    pub at_hours: f64,
    pub circuit: String,
    pub role: BatchRole,
    pub jobs_per_backend: usize,
    pub shots: usize,
}

/// Jobs claimed for `claimed` between `from_hours` and `to_hours` run on
/// `actual` instead.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoutingEvent {
    pub from_hours: f64,
    pub to_hours: f64,
    pub claimed: String,
    pub actual: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureBits {
    Raw,
    RoundDifference,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureSpec {
    pub bits: FeatureBits,
    /// Append final data measurements to the syndrome bits.
    pub include_data: bool,
}

impl Default for FeatureSpec {
    fn default() -> Self {
        FeatureSpec { bits: FeatureBits::RoundDifference, include_data: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClusterSpec {
    pub eps_grid: Vec<f64>,
    pub min_samples_grid: Vec<usize>,
    pub normalize: bool,
}

impl Default for ClusterSpec {
    fn default() -> Self {
        ClusterSpec {
            eps_grid: (1..=40).map(|i| 0.01 * i as f64).collect(),
            min_samples_grid: vec![2, 3, 4, 5, 6, 8],
            normalize: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CurveSpec {
    pub grid: Vec<usize>,
    pub trials: usize,
}

impl Default for CurveSpec {
    fn default() -> Self {
        CurveSpec { grid: vec![1, 5, 10, 25, 50, 100, 250, 500, 1000, 2000], trials: 200 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    Supervised,
    Unsupervised,
    CausalComparison,
}

/// Everything one experiment needs, loaded from a JSON file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Scenario {
    pub seed: u64,
    pub fleet: FleetSpec,
    pub circuits: Vec<CircuitEntry>,
    pub mapping: MappingPlan,
    pub schedule: Vec<JobBatch>,
    pub routing: Vec<RoutingEvent>,
    pub features: FeatureSpec,
    pub training: TrainConfig,
    pub calibration: CalibrationConfig,
    /// Fraction of each training job's trailing shots held out for the
    /// class-weight calibration loop.
    pub validation_fraction: f64,
    pub curve: CurveSpec,
    pub clustering: ClusterSpec,
    /// Shots per averaged feature vector for the metrics table.
    pub metrics_k: usize,
    pub pipeline: Pipeline,
}

impl Default for Scenario {
    /// Five full-emulation backends running a ten-round d=3 surface code
    /// memory experiment: one training day, one test day.
    fn default() -> Self {
        let mut spec = LogicalCircuitSpec::x_gate(CodeSpec::surface(3, 1), LogicalBasisState::Zero);
        spec.stabilize_rounds = 10;
        Scenario {
            seed: 7,
            fleet: FleetSpec::default(),
            circuits: vec![CircuitEntry { name: "surface-d3-r10".into(), spec }],
            mapping: MappingPlan::Trivial,
            schedule: vec![
                JobBatch { at_hours: 1.0, circuit: "surface-d3-r10".into(), role: BatchRole::Train, jobs_per_backend: 40, shots: 512 },
                JobBatch { at_hours: 6.0, circuit: "surface-d3-r10".into(), role: BatchRole::Test, jobs_per_backend: 20, shots: 512 },
                JobBatch { at_hours: 8.0, circuit: "surface-d3-r10".into(), role: BatchRole::Verify, jobs_per_backend: 2, shots: 1000 },
            ],
            routing: Vec::new(),
            features: FeatureSpec::default(),
            training: TrainConfig { max_epochs: 60, ..TrainConfig::default() },
            calibration: CalibrationConfig::default(),
            validation_fraction: 0.1,
            curve: CurveSpec::default(),
            clustering: ClusterSpec::default(),
            metrics_k: 40,
            pipeline: Pipeline::Supervised,
        }
    }
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        if !path.is_file() {
            return Err(Error::MissingArtifact(format!("scenario {}", path.display())));
        }
        let s: Scenario = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        s.validate()?;
        Ok(s)
    }

    pub fn circuit(&self, name: &str) -> Result<&CircuitEntry> {
        self.circuits
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::InvalidInput(format!("schedule names unknown circuit {name}")))
    }

    pub fn backend_ids(&self) -> Vec<String> {
        (0..self.fleet.backends).map(|b| format!("backend-{b}")).collect()
    }

    pub fn epoch_at(&self, hours: f64) -> u64 {
        (hours / self.fleet.calibration_interval_hours).floor() as u64
    }

    pub fn validate(&self) -> Result<()> {
        if self.fleet.backends < 2 {
            return invalid(format!(
                "fleet needs at least 2 backends to distinguish, got {}",
                self.fleet.backends
            ));
        }
        if !(self.fleet.calibration_interval_hours > 0.0) {
            return invalid("calibration_interval_hours must be positive");
        }
        self.fleet.ranges.validate()?;
        let mut names = BTreeSet::new();
        for c in &self.circuits {
            if !names.insert(&c.name) {
                return invalid(format!("duplicate circuit name {}", c.name));
            }
            c.spec.validate()?;
        }
        if self.schedule.is_empty() {
            return invalid("schedule is empty");
        }
        let mut last = f64::NEG_INFINITY;
        for b in &self.schedule {
            self.circuit(&b.circuit)?;
            if b.at_hours < last || b.at_hours < 0.0 {
                return invalid("schedule must be chronological and start at t >= 0");
            }
            last = b.at_hours;
            if b.jobs_per_backend == 0 || b.shots == 0 {
                return invalid("every batch needs at least one job and one shot");
            }
        }
        let ids = self.backend_ids();
        for e in &self.routing {
            for id in [&e.claimed, &e.actual] {
                if !ids.contains(id) {
                    return invalid(format!("routing event names unknown backend {id}"));
                }
            }
            if e.to_hours < e.from_hours {
                return invalid("routing event ends before it starts");
            }
        }
        if let MappingPlan::Embeddings { k } = self.mapping {
            if k == 0 {
                return invalid("embedding plan needs k >= 1");
            }
        }
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return invalid("validation_fraction must be in [0, 1)");
        }
        if self.metrics_k == 0 {
            return invalid("metrics_k must be at least 1");
        }
        Ok(())
    }
}
