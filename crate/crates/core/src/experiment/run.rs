use std::collections::HashMap;

use super::scenario::{BatchRole, FeatureBits, HostSpec, MappingPlan, Scenario};
use crate::error::{invalid, Error, Result};
use crate::farm::{
    advance_calibration, dishonest_route, execute_job, generate_fleet, CalibrationEpoch, GraphTemplate, Job, NoiseProfile,
    SyndromeRecord,
};
use crate::qec::{build_circuit, EncodedCircuit};
use crate::rng;
use crate::sim::Circuit;
use crate::sup::FeatureEncoding;
use crate::topology::{apply_layout, find_isomorphic_embeddings, trivial_layout, ConnectivityGraph, Mapping};

/// A scenario circuit, built and ready to place.
#[derive(Clone, Debug)]
pub struct PreparedCircuit {
    pub name: String,
    pub encoded: EncodedCircuit,
    pub encoding: FeatureEncoding,
}

pub fn prepare_circuits(s: &Scenario) -> Result<Vec<PreparedCircuit>> {
    s.circuits
        .iter()
        .map(|c| {
            let encoded = build_circuit(&c.spec)?;
            let encoding = match s.features.bits {
                FeatureBits::Raw => FeatureEncoding::Raw,
                FeatureBits::RoundDifference => FeatureEncoding::RoundDifference {
                    round_width: encoded.layout.round(0).count(),
                    rounds: c.spec.stabilize_rounds,
                },
            };
            Ok(PreparedCircuit { name: c.name.clone(), encoded, encoding })
        })
        .collect()
}

/// Coupling graph shared by all backends of the scenario.
pub fn host_graph(s: &Scenario, circuits: &[PreparedCircuit]) -> Result<ConnectivityGraph> {
    match &s.fleet.host {
        HostSpec::Template { template } => template.build(),
        HostSpec::Native => {
            let n = circuits.iter().map(|c| c.encoded.circuit.num_qubits).max().unwrap_or(0);
            let edges: Vec<(usize, usize)> =
                circuits.iter().flat_map(|c| c.encoded.circuit.interaction_pairs()).collect();
            ConnectivityGraph::new(n, edges)
        }
    }
}

/// Fabricated fleet at calibration epoch 0.
pub fn build_fleet(s: &Scenario) -> Result<Vec<NoiseProfile>> {
    s.validate()?;
    let circuits = prepare_circuits(s)?;
    let graph = host_graph(s, &circuits)?;
    generate_fleet(
        s.fleet.backends,
        &GraphTemplate::Explicit { graph },
        s.fleet.tier,
        &s.fleet.ranges,
        rng::derive_seed_str(s.seed, "fleet"),
    )
}

/// `base` moved to calibration `epoch`; epoch 0 is the fabricated state.
pub fn profile_at_epoch(s: &Scenario, base: &NoiseProfile, epoch: u64) -> Result<NoiseProfile> {
    if epoch == 0 {
        return Ok(base.clone());
    }
    let e = CalibrationEpoch {
        index: epoch,
        timestamp: epoch as f64 * s.fleet.calibration_interval_hours * 3600.0,
        seed: rng::derive_seed(rng::derive_seed_str(s.seed, "calibration"), epoch),
    };
    advance_calibration(base, &e, &s.fleet.drift)
}

/// Placements of `circuit` on `host` under the scenario's mapping plan.
pub fn mappings_for(s: &Scenario, circuit: &PreparedCircuit, host: &ConnectivityGraph) -> Result<Vec<Mapping>> {
    let c = &circuit.encoded.circuit;
    match s.mapping {
        MappingPlan::Trivial => Ok(vec![trivial_layout(c.num_qubits, host)?]),
        MappingPlan::Embeddings { k } => {
            let pattern = ConnectivityGraph::new(c.num_qubits, c.interaction_pairs())?;
            let mut r = rng::seeded(rng::derive_seed_str(s.seed, &format!("embeddings:{}", circuit.name)));
            let found = find_isomorphic_embeddings(&pattern, host, k, &mut r);
            if found.is_empty() {
                return Err(Error::NotExecutable(format!("{} does not embed in the host graph", circuit.name)));
            }
            Ok(found)
        }
    }
}

/// Batch index encoded at the front of every job id.
pub fn batch_of(job_id: &str) -> Option<usize> {
    job_id.strip_prefix('b')?.split('-').next()?.parse().ok()
}

/// Runs the whole schedule against `fleet` (profiles at epoch 0), applying
/// calibration epochs and routing events. Records come out batch by batch,
/// backend by backend, mapping by mapping, job by job.
pub fn collect(s: &Scenario, fleet: &[NoiseProfile]) -> Result<Vec<SyndromeRecord>> {
    s.validate()?;
    let ids = s.backend_ids();
    if fleet.len() != ids.len() || fleet.iter().zip(&ids).any(|(p, id)| &p.backend_id != id) {
        return invalid(format!("fleet does not match the scenario's {} backends", ids.len()));
    }
    let circuits = prepare_circuits(s)?;
    let host = &fleet[0].coupling;
    let mut placed: HashMap<&str, Vec<(Mapping, Circuit)>> = HashMap::new();
    for c in &circuits {
        let maps = mappings_for(s, c, host)?;
        let mut v = Vec::new();
        for m in maps {
            let phys = apply_layout(&c.encoded.circuit, &m, host)?;
            v.push((m, phys));
        }
        placed.insert(&c.name, v);
    }
    let mut cache: HashMap<(usize, u64), NoiseProfile> = HashMap::new();
    let mut out = Vec::new();
    for (bi, batch) in s.schedule.iter().enumerate() {
        let epoch = s.epoch_at(batch.at_hours);
        let circuit = circuits.iter().find(|c| c.name == batch.circuit).expect("validated");
        for (b, base) in fleet.iter().enumerate() {
            let actual = s
                .routing
                .iter()
                .find(|e| e.claimed == base.backend_id && (e.from_hours..=e.to_hours).contains(&batch.at_hours))
                .map(|e| ids.iter().position(|id| *id == e.actual).expect("validated"))
                .unwrap_or(b);
            for idx in [b, actual] {
                if let std::collections::hash_map::Entry::Vacant(slot) = cache.entry((idx, epoch)) {
                    slot.insert(profile_at_epoch(s, &fleet[idx], epoch)?);
                }
            }
            for (m, phys) in &placed[circuit.name.as_str()] {
                for j in 0..batch.jobs_per_backend {
                    let job_id = format!("b{bi:02}-{}-{}-j{j:03}", base.backend_id, m.mapping_id);
                    let job = Job {
                        job_id: job_id.clone(),
                        backend_id: base.backend_id.clone(),
                        mapping_id: m.mapping_id.clone(),
                        circuit: circuit.name.clone(),
                        code: circuit.encoded.spec.code.to_string(),
                        state: format!("{:?}", circuit.encoded.spec.initial).to_lowercase(),
                        rounds: circuit.encoded.spec.stabilize_rounds,
                        shots: batch.shots,
                        timestamp: batch.at_hours * 3600.0 + 60.0 * j as f64,
                        epoch,
                        seed: rng::derive_seed_str(s.seed, &job_id),
                    };
                    let layout = &circuit.encoded.layout;
                    let include = s.features.include_data;
                    let recs = if actual == b {
                        execute_job(&job, phys, layout, include, &cache[&(b, epoch)])?
                    } else {
                        dishonest_route(&job, &base.backend_id, &cache[&(actual, epoch)], phys, layout, include)?
                    };
                    out.extend(recs);
                }
            }
        }
    }
    Ok(out)
}

/// Records with their bit strings re-encoded for the classifier.
pub fn encode_records(records: &[SyndromeRecord], circuits: &[PreparedCircuit]) -> Result<Vec<SyndromeRecord>> {
    let enc: HashMap<&str, _> = circuits.iter().map(|c| (c.name.as_str(), c.encoding)).collect();
    records
        .iter()
        .map(|r| {
            let e = enc
                .get(r.circuit.as_str())
                .ok_or_else(|| Error::InvalidInput(format!("record for unknown circuit {}", r.circuit)))?;
            let mut bits = r.bit_vec()?;
            e.apply(&mut bits)?;
            Ok(SyndromeRecord { bits: bits.iter().map(|&b| if b { '1' } else { '0' }).collect(), ..r.clone() })
        })
        .collect()
}

/// Records of batches with the given role, optionally restricted to some
/// calibration epochs.
pub fn select(
    s: &Scenario,
    records: &[SyndromeRecord],
    role: BatchRole,
    epochs: Option<&[u64]>,
) -> Vec<SyndromeRecord> {
    records
        .iter()
        .filter(|r| {
            batch_of(&r.job_id).and_then(|b| s.schedule.get(b)).is_some_and(|b| b.role == role)
                && epochs.is_none_or(|e| e.contains(&r.epoch))
        })
        .cloned()
        .collect::<Vec<_>>()
}
