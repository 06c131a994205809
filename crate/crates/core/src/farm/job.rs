use serde::{Deserialize, Serialize};

use super::NoiseProfile;
use crate::error::{invalid, Error, Result};
use crate::qec::SyndromeLayout;
use crate::sim::{run_shots, Circuit, GateKind};

/// One submission to the provider.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Job {
    pub job_id: String,
    /// Backend the client asked for.
    pub backend_id: String,
    pub mapping_id: String,
    /// Circuit provenance: a label plus code, initial state and rounds.
    pub circuit: String,
    pub code: String,
    pub state: String,
    pub rounds: usize,
    pub shots: usize,
    /// Simulated seconds.
    pub timestamp: f64,
    pub epoch: u64,
    pub seed: u64,
}

/// One shot of one job, as written to the shot log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyndromeRecord {
    pub job_id: String,
    pub backend_id: String,
    pub mapping_id: String,
    pub circuit: String,
    pub shot: u64,
    pub bits: String,
    pub timestamp: f64,
    pub epoch: u64,
    /// Backend that actually ran the shot when it differs from
    /// `backend_id`. Evaluation only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audit: Option<String>,
}

impl SyndromeRecord {
    pub fn true_backend(&self) -> &str {
        self.audit.as_deref().unwrap_or(&self.backend_id)
    }

    pub fn bit_vec(&self) -> Result<Vec<bool>> {
        self.bits
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => invalid(format!("record {}#{}: bad bit {other:?}", self.job_id, self.shot)),
            })
            .collect()
    }
}

fn check_executable(circuit: &Circuit, profile: &NoiseProfile) -> Result<()> {
    if circuit.num_qubits > profile.num_qubits {
        return Err(Error::InsufficientQubits { need: circuit.num_qubits, have: profile.num_qubits });
    }
    for op in circuit.ops.iter().filter(|op| op.kind == GateKind::Cnot) {
        let (a, b) = (op.targets[0], op.targets[1]);
        if !profile.coupling.has_edge(a, b) {
            return Err(Error::NotExecutable(format!("CNOT({a},{b}) not coupled on {}", profile.backend_id)));
        }
    }
    Ok(())
}

fn run(
    job: &Job,
    circuit: &Circuit,
    layout: &SyndromeLayout,
    include_data: bool,
    profile: &NoiseProfile,
) -> Result<Vec<SyndromeRecord>> {
    if job.shots == 0 {
        return invalid(format!("job {} has zero shots", job.job_id));
    }
    if job.epoch != profile.epoch {
        return invalid(format!(
            "job {} is for epoch {} but {} is at epoch {}",
            job.job_id, job.epoch, profile.backend_id, profile.epoch
        ));
    }
    check_executable(circuit, profile)?;
    let noise = profile.compile()?;
    let shots = run_shots(circuit, &noise, job.seed, 0, job.shots)?;
    let audit = (profile.backend_id != job.backend_id).then(|| profile.backend_id.clone());
    Ok(shots
        .iter()
        .enumerate()
        .map(|(k, s)| SyndromeRecord {
            job_id: job.job_id.clone(),
            backend_id: job.backend_id.clone(),
            mapping_id: job.mapping_id.clone(),
            circuit: job.circuit.clone(),
            shot: k as u64,
            bits: layout.extract(&s.bits, include_data).iter().map(|&b| if b { '1' } else { '0' }).collect(),
            timestamp: job.timestamp,
            epoch: job.epoch,
            audit: audit.clone(),
        })
        .collect())
}

/// Runs `job` on `profile` (which must be the requested backend) and returns
/// one record per shot. `circuit` is already laid out on the backend.
pub fn execute_job(
    job: &Job,
    circuit: &Circuit,
    layout: &SyndromeLayout,
    include_data: bool,
    profile: &NoiseProfile,
) -> Result<Vec<SyndromeRecord>> {
    if job.backend_id != profile.backend_id {
        return invalid(format!("job {} targets {} but was given {}", job.job_id, job.backend_id, profile.backend_id));
    }
    run(job, circuit, layout, include_data, profile)
}

/// Runs `job` on `actual` while labelling every record with `claimed`. The
/// true backend is kept in the record's audit field.
pub fn dishonest_route(
    job: &Job,
    claimed: &str,
    actual: &NoiseProfile,
    circuit: &Circuit,
    layout: &SyndromeLayout,
    include_data: bool,
) -> Result<Vec<SyndromeRecord>> {
    let relabelled = Job { backend_id: claimed.to_string(), ..job.clone() };
    run(&relabelled, circuit, layout, include_data, actual)
}
