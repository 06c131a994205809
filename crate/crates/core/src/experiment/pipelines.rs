use serde::{Deserialize, Serialize};

use super::run::{build_fleet, collect, encode_records, prepare_circuits, select};
use super::scenario::{BatchRole, Scenario};
use crate::error::{invalid, Result};
use crate::farm::{NoiseTier, SyndromeRecord};
use crate::sup::{
    accuracy_vs_shots, aggregate_mode, featurize, table_metrics, train_calibrated, Aggregation, CalibrationStep,
    ClassifierModel, Curve, Dataset, LabelSpec, Metrics, Specificity,
};
use crate::unsup::{
    dbscan, job_vectors, pairwise_distances, pearson, separation_stat, standardize, sweep, verdict, JobVector,
    SeparationStats, SweepResult, Verdict,
};

#[derive(Clone, Debug)]
pub struct TrainedModel {
    pub model: ClassifierModel,
    pub calibration: Vec<CalibrationStep>,
}

fn split_validation(records: &[SyndromeRecord], fraction: f64) -> (Vec<SyndromeRecord>, Vec<SyndromeRecord>) {
    let mut train = Vec::new();
    let mut val = Vec::new();
    for job in records.chunk_by(|a, b| a.job_id == b.job_id) {
        let n_val = (job.len() as f64 * fraction).floor() as usize;
        let cut = job.len() - n_val;
        train.extend_from_slice(&job[..cut]);
        val.extend_from_slice(&job[cut..]);
    }
    (train, val)
}

/// Trains a classifier on `records` (already encoded) with the scenario's
/// hyperparameters and class-weight calibration.
pub fn fit(
    s: &Scenario,
    records: &[SyndromeRecord],
    specificity: Specificity,
    aggregation: Aggregation,
) -> Result<TrainedModel> {
    if records.is_empty() {
        return invalid("no training records");
    }
    let labels = LabelSpec::fit(specificity, records);
    let (train_recs, val_recs) = split_validation(records, s.validation_fraction);
    let train = featurize(&train_recs, aggregation, &labels)?;
    let val = if val_recs.is_empty() { Dataset::default() } else { featurize(&val_recs, aggregation, &labels)? };
    let val = if val.is_empty() { train.clone() } else { val };
    let config = crate::sup::TrainConfig { seed: crate::rng::derive_seed_str(s.seed, "train"), ..s.training.clone() };
    let (model, calibration) = train_calibrated(&train, &val, &labels, &config, &s.calibration)?;
    Ok(TrainedModel { model, calibration })
}

/// Fraction of rows classified correctly.
pub fn accuracy(model: &ClassifierModel, records: &[SyndromeRecord], aggregation: Aggregation) -> Result<f64> {
    let data = featurize(records, aggregation, &model.labels)?;
    Ok(table_metrics(model, &data)?.accuracy)
}

/// Per-job outcome of the verification loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JobVerdict {
    pub job_id: String,
    pub claimed: String,
    pub predicted: String,
    /// Ground truth from the audit trail, for evaluation.
    pub actual: String,
    pub verified: bool,
}

/// Mode of single-shot predictions per job, compared with the claimed
/// backend.
pub fn verify_jobs(model: &ClassifierModel, records: &[SyndromeRecord]) -> Result<Vec<JobVerdict>> {
    records
        .chunk_by(|a, b| a.job_id == b.job_id)
        .map(|job| {
            let data = featurize(job, Aggregation::SingleShot, &model.labels)?;
            let predicted = aggregate_mode(&model.predict_many(&data.x)?)?;
            let predicted = model.labels.backend_of(predicted).to_string();
            let claimed = job[0].backend_id.clone();
            Ok(JobVerdict {
                job_id: job[0].job_id.clone(),
                verified: predicted == claimed,
                claimed,
                predicted,
                actual: job[0].true_backend().to_string(),
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SupervisedReport {
    pub single_shot_accuracy: f64,
    pub curve: Curve,
    pub calibration: Vec<CalibrationStep>,
}

/// Backend classifier on the train batches, evaluated on the test batches.
pub fn run_supervised(s: &Scenario, records: &[SyndromeRecord]) -> Result<(TrainedModel, SupervisedReport)> {
    let circuits = prepare_circuits(s)?;
    let enc = encode_records(records, &circuits)?;
    let train = select(s, &enc, BatchRole::Train, None);
    let test = select(s, &enc, BatchRole::Test, None);
    let trained = fit(s, &train, Specificity::Backend, Aggregation::SingleShot)?;
    let test_data = featurize(&test, Aggregation::SingleShot, &trained.model.labels)?;
    let single = table_metrics(&trained.model, &test_data)?.accuracy;
    let curve = accuracy_vs_shots(
        &trained.model,
        &test_data,
        &s.curve.grid,
        s.curve.trials,
        crate::rng::derive_seed_str(s.seed, "curve"),
    )?;
    let report = SupervisedReport { single_shot_accuracy: single, curve, calibration: trained.calibration.clone() };
    Ok((trained, report))
}

/// Accuracy at three label specificities over a multi-mapping scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecificityReport {
    pub backend_backend: f64,
    pub mapping_mapping: f64,
    pub mapping_backend: f64,
    pub backends: usize,
    pub mappings: usize,
    pub test_rows: usize,
}

pub fn run_specificity(s: &Scenario, records: &[SyndromeRecord]) -> Result<SpecificityReport> {
    let circuits = prepare_circuits(s)?;
    let enc = encode_records(records, &circuits)?;
    let train = select(s, &enc, BatchRole::Train, None);
    let test = select(s, &enc, BatchRole::Test, None);
    let backend = fit(s, &train, Specificity::Backend, Aggregation::SingleShot)?.model;
    let mapping = fit(s, &train, Specificity::BackendMapping, Aggregation::SingleShot)?.model;
    let bb = accuracy(&backend, &test, Aggregation::SingleShot)?;
    let test_m = featurize(&test, Aggregation::SingleShot, &mapping.labels)?;
    let pred = mapping.predict_many(&test_m.x)?;
    let mm = pred.iter().zip(&test_m.y).filter(|(p, y)| p == y).count() as f64 / pred.len() as f64;
    let mb = pred
        .iter()
        .zip(&test_m.y)
        .filter(|(p, y)| mapping.labels.backend_of(**p) == mapping.labels.backend_of(**y))
        .count() as f64
        / pred.len() as f64;
    let mut mappings: Vec<&str> = train.iter().map(|r| r.mapping_id.as_str()).collect();
    mappings.sort_unstable();
    mappings.dedup();
    Ok(SpecificityReport {
        backend_backend: bb,
        mapping_mapping: mm,
        mapping_backend: mb,
        backends: s.fleet.backends,
        mappings: mappings.len(),
        test_rows: pred.len(),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClusterAnalysis {
    pub jobs: usize,
    pub separation: SeparationStats,
    pub sweep: SweepResult,
    /// Correlation of time gap and distance over same-backend pairs.
    pub time_correlation: f64,
}

fn vectors(s: &Scenario, records: &[SyndromeRecord]) -> Result<Vec<JobVector>> {
    let circuits = prepare_circuits(s)?;
    let jobs = job_vectors(&encode_records(records, &circuits)?)?;
    Ok(if s.clustering.normalize { standardize(&jobs) } else { jobs })
}

/// Pair distances, separation and DBSCAN sweep over every job in `records`.
pub fn run_clustering(s: &Scenario, records: &[SyndromeRecord]) -> Result<ClusterAnalysis> {
    let jobs = vectors(s, records)?;
    let pairs = pairwise_distances(&jobs)?;
    let separation = separation_stat(&pairs)?;
    let same: Vec<_> = pairs.iter().filter(|p| p.same_backend).collect();
    let time_correlation =
        pearson(&same.iter().map(|p| p.dt).collect::<Vec<_>>(), &same.iter().map(|p| p.distance).collect::<Vec<_>>());
    let sweep = sweep(&jobs, &s.clustering.eps_grid, &s.clustering.min_samples_grid)?;
    Ok(ClusterAnalysis { jobs: jobs.len(), separation, sweep, time_correlation })
}

/// Flag rates of the distance-to-core verdict for new jobs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChangeDetection {
    pub holdout: String,
    pub eps: f64,
    pub min_samples: usize,
    pub unseen_flagged: f64,
    pub honest_flagged: f64,
    pub unseen_jobs: usize,
    pub honest_jobs: usize,
}

/// Clusters the train-batch jobs of every backend except `holdout`, then
/// judges test-batch jobs: those of `holdout` should be flagged, the rest
/// should not.
pub fn run_change_detection(
    s: &Scenario,
    records: &[SyndromeRecord],
    holdout: &str,
    eps: f64,
    min_samples: usize,
) -> Result<ChangeDetection> {
    let train: Vec<_> =
        select(s, records, BatchRole::Train, None).into_iter().filter(|r| r.true_backend() != holdout).collect();
    let test = select(s, records, BatchRole::Test, None);
    let model = dbscan(&vectors(s, &train)?, eps, min_samples)?;
    let (mut unseen, mut honest) = ((0, 0), (0, 0));
    for j in vectors(s, &test)? {
        let flagged = verdict(&model, &j) == Verdict::BackendChangeSuspected;
        let slot = if j.backend == holdout { &mut unseen } else { &mut honest };
        slot.0 += usize::from(flagged);
        slot.1 += 1;
    }
    if unseen.1 == 0 || honest.1 == 0 {
        return invalid("change detection needs test jobs from both the holdout and the known backends");
    }
    Ok(ChangeDetection {
        holdout: holdout.to_string(),
        eps,
        min_samples,
        unseen_flagged: unseen.0 as f64 / unseen.1 as f64,
        honest_flagged: honest.0 as f64 / honest.1 as f64,
        unseen_jobs: unseen.1,
        honest_jobs: honest.1,
    })
}

/// Single-shot accuracy on the last test epoch when training on the first
/// training epoch only versus the first two.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftComparison {
    pub train_epochs_one: Vec<u64>,
    pub train_epochs_two: Vec<u64>,
    pub test_epoch: u64,
    pub accuracy_one: f64,
    pub accuracy_two: f64,
}

pub fn run_drift_comparison(s: &Scenario, records: &[SyndromeRecord]) -> Result<DriftComparison> {
    let circuits = prepare_circuits(s)?;
    let enc = encode_records(records, &circuits)?;
    let mut epochs: Vec<u64> = select(s, &enc, BatchRole::Train, None).iter().map(|r| r.epoch).collect();
    epochs.sort_unstable();
    epochs.dedup();
    if epochs.len() < 2 {
        return invalid("drift comparison needs training batches in at least two calibration epochs");
    }
    let test_all = select(s, &enc, BatchRole::Test, None);
    let Some(test_epoch) = test_all.iter().map(|r| r.epoch).max() else {
        return invalid("drift comparison needs a test batch");
    };
    let test = select(s, &enc, BatchRole::Test, Some(&[test_epoch]));
    let one = vec![epochs[0]];
    let two = vec![epochs[0], epochs[1]];
    let m1 = fit(s, &select(s, &enc, BatchRole::Train, Some(&one)), Specificity::Backend, Aggregation::SingleShot)?;
    let m2 = fit(s, &select(s, &enc, BatchRole::Train, Some(&two)), Specificity::Backend, Aggregation::SingleShot)?;
    Ok(DriftComparison {
        accuracy_one: accuracy(&m1.model, &test, Aggregation::SingleShot)?,
        accuracy_two: accuracy(&m2.model, &test, Aggregation::SingleShot)?,
        train_epochs_one: one,
        train_epochs_two: two,
        test_epoch,
    })
}

/// Same experiment on an ERaD fleet and a full-emulation fleet drawn from
/// the same seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CausalReport {
    pub erad_accuracy: f64,
    pub full_accuracy: f64,
}

pub fn run_causal(s: &Scenario) -> Result<CausalReport> {
    let mut acc = [0.0; 2];
    for (i, tier) in [NoiseTier::Erad, NoiseTier::FullEmulation].into_iter().enumerate() {
        let mut sc = s.clone();
        sc.fleet.tier = tier;
        let fleet = build_fleet(&sc)?;
        let records = collect(&sc, &fleet)?;
        let circuits = prepare_circuits(&sc)?;
        let enc = encode_records(&records, &circuits)?;
        let train = select(&sc, &enc, BatchRole::Train, None);
        let test = select(&sc, &enc, BatchRole::Test, None);
        let m = fit(&sc, &train, Specificity::Backend, Aggregation::SingleShot)?;
        acc[i] = accuracy(&m.model, &test, Aggregation::SingleShot)?;
    }
    Ok(CausalReport { erad_accuracy: acc[0], full_accuracy: acc[1] })
}

/// Accuracy/FPR/FNR at `metrics_k`-shot averaged features for one circuit.
pub fn run_metrics(s: &Scenario, records: &[SyndromeRecord], circuit: &str) -> Result<(Metrics, usize)> {
    let circuits = prepare_circuits(s)?;
    let enc: Vec<_> = encode_records(records, &circuits)?.into_iter().filter(|r| r.circuit == circuit).collect();
    let train = select(s, &enc, BatchRole::Train, None);
    let test = select(s, &enc, BatchRole::Test, None);
    let agg = Aggregation::MeanOverK(s.metrics_k);
    let m = fit(s, &train, Specificity::Backend, agg)?;
    let data = featurize(&test, agg, &m.model.labels)?;
    Ok((table_metrics(&m.model, &data)?, data.len()))
}
