//! The `sfp` command line: a sequential driver over the experiment layer.
//!
//! Every command works inside one output directory:
//!
//! ```text
//! <out>/scenario.json       resolved scenario (written by `fleet`)
//! <out>/profiles/*.json     backend noise profiles
//! <out>/shots.jsonl         syndrome records
//! <out>/model.json          trained classifier
//! <out>/curve.csv           accuracy versus shots
//! <out>/verdicts.json       verification outcome per job
//! <out>/cluster_report.json DBSCAN assignments at the best sweep point
//! <out>/pairs.csv           job pair distances
//! <out>/drift.json          separation, sweep, drift and change detection
//! <out>/causal.json         ERaD versus full-emulation accuracy
//! <out>/metrics.csv         accuracy/FPR/FNR per circuit
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiment::{
    accuracy, build_fleet, collect, encode_records, fit, prepare_circuits, run_causal, run_change_detection,
    run_clustering, run_drift_comparison, run_metrics, select, verify_jobs, BatchRole, ChangeDetection,
    ClusterAnalysis, DriftComparison, Scenario,
};
use crate::farm::{read_profiles, read_shot_log, write_profiles, write_shot_log, NoiseProfile, SyndromeRecord};
use crate::sup::{
    accuracy_vs_shots, featurize, write_curve_csv, write_metrics_csv, Aggregation, ClassifierModel, MetricsRow,
    Specificity,
};
use crate::unsup::{dbscan, job_vectors, pairwise_distances, standardize, write_pairs_csv, ClusterReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_UNVERIFIED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "sfp", version, about = "Fingerprint simulated quantum backends from QEC syndromes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Scenario JSON; defaults to <out>/scenario.json, then the built-in default.
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,
    /// Overrides the scenario seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Artifact directory.
    #[arg(long, global = true, default_value = "sfp-out")]
    pub out: PathBuf,
    /// Overwrite existing artifacts.
    #[arg(long, global = true)]
    pub force: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate and persist the backend fleet.
    Fleet(#[command(flatten)] Common),
    /// Execute the job schedule and write the shot log.
    Collect(#[command(flatten)] Common),
    /// Train the backend classifier on the training batches.
    Train(#[command(flatten)] Common),
    /// Check every verification job against its claimed backend.
    Verify(#[command(flatten)] Common),
    /// Accuracy versus number of aggregated shots on the test batches.
    Curve(#[command(flatten)] Common),
    /// Clustering, change detection and the training-window comparison.
    Drift(#[command(flatten)] Common),
    /// Classifier accuracy on ERaD versus full-emulation fleets.
    Causal(#[command(flatten)] Common),
    /// Accuracy, FPR and FNR per circuit on averaged shots.
    Metrics(#[command(flatten)] Common),
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Fleet(c)
            | Command::Collect(c)
            | Command::Train(c)
            | Command::Verify(c)
            | Command::Curve(c)
            | Command::Drift(c)
            | Command::Causal(c)
            | Command::Metrics(c) => c,
        }
    }
}

struct Ctx {
    s: Scenario,
    out: PathBuf,
    force: bool,
}

impl Ctx {
    fn new(c: &Common) -> Result<Self> {
        let stored = c.out.join("scenario.json");
        let mut s = match &c.scenario {
            Some(p) => Scenario::load(p)?,
            None if stored.is_file() => Scenario::load(&stored)?,
            None => Scenario::default(),
        };
        if let Some(seed) = c.seed {
            s.seed = seed;
        }
        s.validate()?;
        Ok(Ctx { s, out: c.out.clone(), force: c.force })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn profiles(&self) -> Result<Vec<NoiseProfile>> {
        let dir = self.path("profiles");
        if !dir.is_dir() {
            return Err(Error::MissingArtifact(format!("profile directory {} (run `sfp fleet`)", dir.display())));
        }
        let mut fleet = read_profiles(&dir)?;
        let ids = self.s.backend_ids();
        let mut ordered = Vec::with_capacity(ids.len());
        for id in &ids {
            let i = fleet
                .iter()
                .position(|p| &p.backend_id == id)
                .ok_or_else(|| Error::MissingArtifact(format!("profile for {id} in {}", self.path("profiles").display())))?;
            ordered.push(fleet.swap_remove(i));
        }
        Ok(ordered)
    }

    fn shots(&self) -> Result<Vec<SyndromeRecord>> {
        let p = self.path("shots.jsonl");
        if !p.is_file() {
            return Err(Error::MissingArtifact(format!("shot log {} (run `sfp collect`)", p.display())));
        }
        read_shot_log(&p)
    }

    fn encoded_shots(&self) -> Result<Vec<SyndromeRecord>> {
        encode_records(&self.shots()?, &prepare_circuits(&self.s)?)
    }

    fn model(&self) -> Result<ClassifierModel> {
        let p = self.path("model.json");
        if !p.is_file() {
            return Err(Error::MissingArtifact(format!("model {} (run `sfp train`)", p.display())));
        }
        ClassifierModel::load(&p)
    }

    fn guard(&self, name: &str) -> Result<PathBuf> {
        let p = self.path(name);
        if p.exists() && !self.force {
            return Err(Error::InvalidInput(format!("{} exists; pass --force to overwrite", p.display())));
        }
        fs::create_dir_all(&self.out)?;
        Ok(p)
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Runs one command, printing a summary; returns the process exit code.
pub fn run(cli: &Cli) -> Result<i32> {
    let ctx = Ctx::new(cli.command.common())?;
    match &cli.command {
        Command::Fleet(_) => fleet(&ctx),
        Command::Collect(_) => cmd_collect(&ctx),
        Command::Train(_) => train(&ctx),
        Command::Verify(_) => verify(&ctx),
        Command::Curve(_) => curve(&ctx),
        Command::Drift(_) => drift(&ctx),
        Command::Causal(_) => causal(&ctx),
        Command::Metrics(_) => metrics(&ctx),
    }
}

fn fleet(ctx: &Ctx) -> Result<i32> {
    let non_empty = ctx.out.is_dir() && fs::read_dir(&ctx.out)?.next().is_some();
    if non_empty && !ctx.force {
        return Err(Error::InvalidInput(format!(
            "output directory {} is not empty; pass --force to overwrite",
            ctx.out.display()
        )));
    }
    let profiles = build_fleet(&ctx.s)?;
    let dir = ctx.path("profiles");
    if dir.is_dir() {
        fs::remove_dir_all(&dir)?;
    }
    let written = write_profiles(&dir, &profiles)?;
    write_json(&ctx.path("scenario.json"), &ctx.s)?;
    println!("wrote {} profiles to {}", written.len(), dir.display());
    Ok(EXIT_OK)
}

fn cmd_collect(ctx: &Ctx) -> Result<i32> {
    let fleet = ctx.profiles()?;
    let path = ctx.guard("shots.jsonl")?;
    let records = collect(&ctx.s, &fleet)?;
    write_shot_log(&path, &records)?;
    let jobs = records.chunk_by(|a, b| a.job_id == b.job_id).count();
    println!("wrote {} records from {jobs} jobs to {}", records.len(), path.display());
    Ok(EXIT_OK)
}

fn train(ctx: &Ctx) -> Result<i32> {
    let records = ctx.encoded_shots()?;
    let path = ctx.guard("model.json")?;
    let train = select(&ctx.s, &records, BatchRole::Train, None);
    let trained = fit(&ctx.s, &train, Specificity::Backend, Aggregation::SingleShot)?;
    trained.model.save(&path)?;
    println!(
        "trained on {} shots: {} epochs, final loss {:.4}, {} calibration step(s)",
        train.len(),
        trained.model.epochs_run,
        trained.model.final_loss,
        trained.calibration.len()
    );
    let test = select(&ctx.s, &records, BatchRole::Test, None);
    if !test.is_empty() {
        println!("single-shot test accuracy {:.4}", accuracy(&trained.model, &test, Aggregation::SingleShot)?);
    }
    println!("model written to {}", path.display());
    Ok(EXIT_OK)
}

fn verify(ctx: &Ctx) -> Result<i32> {
    let model = ctx.model()?;
    let records = select(&ctx.s, &ctx.encoded_shots()?, BatchRole::Verify, None);
    if records.is_empty() {
        return Err(Error::InvalidInput("scenario schedule has no verify batch".into()));
    }
    let verdicts = verify_jobs(&model, &records)?;
    for v in &verdicts {
        let tag = if v.verified { "honest" } else { "DISHONEST" };
        println!("{}\tclaimed {}\tpredicted {}\t{tag}", v.job_id, v.claimed, v.predicted);
    }
    write_json(&ctx.guard("verdicts.json")?, &verdicts)?;
    let flagged = verdicts.iter().filter(|v| !v.verified).count();
    println!("{flagged} of {} jobs flagged", verdicts.len());
    Ok(if flagged > 0 { EXIT_UNVERIFIED } else { EXIT_OK })
}

fn curve(ctx: &Ctx) -> Result<i32> {
    let model = ctx.model()?;
    let test = select(&ctx.s, &ctx.encoded_shots()?, BatchRole::Test, None);
    let data = featurize(&test, Aggregation::SingleShot, &model.labels)?;
    let seed = crate::rng::derive_seed_str(ctx.s.seed, "curve");
    let curve = accuracy_vs_shots(&model, &data, &ctx.s.curve.grid, ctx.s.curve.trials, seed)?;
    let path = ctx.guard("curve.csv")?;
    write_curve_csv(&path, &curve)?;
    for &n in &ctx.s.curve.grid {
        if let Some(a) = curve.mean_at(n) {
            println!("n={n:>5}  mean accuracy {a:.4}");
        }
    }
    println!("curve written to {}", path.display());
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct DriftReport {
    analysis: ClusterAnalysis,
    comparison: Option<DriftComparison>,
    change_detection: Option<ChangeDetection>,
}

fn optional<T>(what: &str, r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::InvalidInput(msg)) => {
            println!("skipping {what}: {msg}");
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn drift(ctx: &Ctx) -> Result<i32> {
    let records = ctx.shots()?;
    let report_path = ctx.guard("drift.json")?;
    let cluster_path = ctx.guard("cluster_report.json")?;
    let pairs_path = ctx.guard("pairs.csv")?;
    let analysis = run_clustering(&ctx.s, &records)?;
    let enc = encode_records(&records, &prepare_circuits(&ctx.s)?)?;
    let jobs = job_vectors(&enc)?;
    let jobs = if ctx.s.clustering.normalize { standardize(&jobs) } else { jobs };
    write_pairs_csv(&pairs_path, &pairwise_distances(&jobs)?)?;
    let best = &analysis.sweep.best;
    write_json(&cluster_path, &ClusterReport::new(&dbscan(&jobs, best.eps, best.min_samples)?, true)?)?;
    println!(
        "{} jobs; pair overlap {:.4}; best eps {} min_samples {} -> {} clusters, ARI {:.3}",
        analysis.jobs, analysis.separation.overlap, best.eps, best.min_samples, best.clusters, best.ari
    );
    let comparison = optional("training-window comparison", run_drift_comparison(&ctx.s, &records))?;
    if let Some(c) = &comparison {
        println!(
            "test epoch {}: trained on {:?} -> {:.4}, on {:?} -> {:.4}",
            c.test_epoch, c.train_epochs_one, c.accuracy_one, c.train_epochs_two, c.accuracy_two
        );
    }
    let holdout = ctx.s.backend_ids().pop().expect("validated fleet");
    let change_detection = optional(
        "change detection",
        run_change_detection(&ctx.s, &records, &holdout, best.eps, best.min_samples),
    )?;
    if let Some(c) = &change_detection {
        println!(
            "unseen {} flagged {:.3}; honest jobs flagged {:.3}",
            c.holdout, c.unseen_flagged, c.honest_flagged
        );
    }
    write_json(&report_path, &DriftReport { analysis, comparison, change_detection })?;
    println!("reports written to {}", ctx.out.display());
    Ok(EXIT_OK)
}

fn causal(ctx: &Ctx) -> Result<i32> {
    let path = ctx.guard("causal.json")?;
    let r = run_causal(&ctx.s)?;
    write_json(&path, &r)?;
    println!("ERaD {:.4}  full emulation {:.4}", r.erad_accuracy, r.full_accuracy);
    Ok(EXIT_OK)
}

fn metrics(ctx: &Ctx) -> Result<i32> {
    let records = ctx.shots()?;
    let path = ctx.guard("metrics.csv")?;
    let mut rows = Vec::new();
    for c in &ctx.s.circuits {
        let (m, n) = run_metrics(&ctx.s, &records, &c.name)?;
        println!("{:<20} rows {n:>5}  accuracy {:.4}  fpr {:.4}  fnr {:.4}", c.name, m.accuracy, m.fpr, m.fnr);
        rows.push(MetricsRow { code: c.name.clone(), metrics: m });
    }
    write_metrics_csv(&path, &rows)?;
    println!("metrics written to {}", path.display());
    Ok(EXIT_OK)
}
