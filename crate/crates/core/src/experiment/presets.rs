//! Named scenarios for the experiments the CLI and tests run.

use super::scenario::{
    BatchRole, CircuitEntry, HostSpec, JobBatch, MappingPlan, Pipeline, RoutingEvent, Scenario,
};
use crate::farm::GraphTemplate;
use crate::qec::{CodeSpec, LogicalBasisState, LogicalCircuitSpec};
use crate::sup::TrainConfig;

fn surface(rounds: usize) -> CircuitEntry {
    let mut spec = LogicalCircuitSpec::x_gate(CodeSpec::surface(3, 1), LogicalBasisState::Zero);
    spec.stabilize_rounds = rounds;
    CircuitEntry { name: format!("surface-d3-r{rounds}"), spec }
}

fn batch(at_hours: f64, circuit: &str, role: BatchRole, jobs_per_backend: usize, shots: usize) -> JobBatch {
    JobBatch { at_hours, circuit: circuit.into(), role, jobs_per_backend, shots }
}

/// Mode-aggregation curve: the default scenario.
pub fn curve(seed: u64) -> Scenario {
    Scenario { seed, ..Scenario::default() }
}

/// Five backends on a square-grid host, each running the surface code at
/// sixteen different placements.
pub fn specificity(seed: u64) -> Scenario {
    let c = surface(10);
    let name = c.name.clone();
    let mut s = Scenario {
        seed,
        circuits: vec![c],
        mapping: MappingPlan::Embeddings { k: 16 },
        schedule: vec![batch(1.0, &name, BatchRole::Train, 3, 512), batch(6.0, &name, BatchRole::Test, 1, 512)],
        training: TrainConfig { max_epochs: 30, ..TrainConfig::default() },
        ..Scenario::default()
    };
    s.fleet.host = HostSpec::Template { template: GraphTemplate::Grid { rows: 8, cols: 8 } };
    s
}

/// Jobs spread over several days with daily recalibration: clustering,
/// change detection and the one-day versus two-day training comparison.
pub fn drift(seed: u64) -> Scenario {
    let c = surface(10);
    let name = c.name.clone();
    Scenario {
        seed,
        circuits: vec![c],
        schedule: vec![
            batch(1.0, &name, BatchRole::Train, 20, 512),
            batch(25.0, &name, BatchRole::Train, 20, 512),
            batch(145.0, &name, BatchRole::Test, 20, 512),
        ],
        training: TrainConfig { max_epochs: 30, ..TrainConfig::default() },
        pipeline: Pipeline::Unsupervised,
        ..Scenario::default()
    }
}

/// Two-round surface code; run once per noise tier.
pub fn causal(seed: u64) -> Scenario {
    let c = surface(2);
    let name = c.name.clone();
    Scenario {
        seed,
        circuits: vec![c],
        schedule: vec![batch(1.0, &name, BatchRole::Train, 20, 512), batch(6.0, &name, BatchRole::Test, 10, 512)],
        training: TrainConfig { max_epochs: 30, ..TrainConfig::default() },
        pipeline: Pipeline::CausalComparison,
        ..Scenario::default()
    }
}

/// Shor and Steane running a logical CNOT on |1,0>, and the d=5 surface
/// code; trained on days 1 and 2, tested on day 10 with 40-shot averages.
pub fn metrics_table(seed: u64) -> Scenario {
    let shor = CircuitEntry { name: "shor-cnot".into(), spec: LogicalCircuitSpec::cnot_on_one_zero(CodeSpec::shor(2)) };
    let steane =
        CircuitEntry { name: "steane-cnot".into(), spec: LogicalCircuitSpec::cnot_on_one_zero(CodeSpec::steane(2)) };
    let surf = CircuitEntry {
        name: "surface-d5".into(),
        spec: LogicalCircuitSpec::x_gate(CodeSpec::surface(5, 1), LogicalBasisState::Zero),
    };
    let mut schedule = Vec::new();
    for c in ["shor-cnot", "steane-cnot", "surface-d5"] {
        schedule.push(batch(1.0, c, BatchRole::Train, 10, 800));
    }
    for c in ["shor-cnot", "steane-cnot", "surface-d5"] {
        schedule.push(batch(25.0, c, BatchRole::Train, 10, 800));
    }
    for c in ["shor-cnot", "steane-cnot", "surface-d5"] {
        schedule.push(batch(217.0, c, BatchRole::Test, 10, 800));
    }
    Scenario {
        seed,
        circuits: vec![shor, steane, surf],
        schedule,
        training: TrainConfig { max_epochs: 200, patience: 10, ..TrainConfig::default() },
        ..Scenario::default()
    }
}

/// Verification with one misrouting window: jobs claimed for backend-0
/// run on backend-3.
pub fn verification(seed: u64) -> Scenario {
    let mut s = curve(seed);
    s.routing.push(RoutingEvent {
        from_hours: 7.0,
        to_hours: 9.0,
        claimed: "backend-0".into(),
        actual: "backend-3".into(),
    });
    s
}

/// Look up a preset by name.
pub fn by_name(name: &str, seed: u64) -> Option<Scenario> {
    Some(match name {
        "default" | "curve" => curve(seed),
        "specificity" => specificity(seed),
        "drift" => drift(seed),
        "causal" => causal(seed),
        "metrics" => metrics_table(seed),
        "verification" => verification(seed),
        _ => return None,
    })
}
