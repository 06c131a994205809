use std::path::Path;

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ClassifierModel, Dataset};
use crate::error::{invalid, Error, Result};
use crate::rng;

/// Most frequent label; ties go to the lowest label.
pub fn aggregate_mode(labels: &[usize]) -> Result<usize> {
    let Some(&max) = labels.iter().max() else {
        return invalid("mode of an empty label list");
    };
    let mut counts = vec![0usize; max + 1];
    for &l in labels {
        counts[l] += 1;
    }
    let mut best = 0;
    for (k, &n) in counts.iter().enumerate() {
        if n > counts[best] {
            best = k;
        }
    }
    Ok(best)
}

/// Per-row predictions of `model` on `data`.
pub fn predict_all(model: &ClassifierModel, data: &Dataset) -> Result<Vec<usize>> {
    model.predict_many(&data.x)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub n_shots: usize,
    /// Class label, or `mean` for the average over classes.
    pub class: String,
    pub accuracy: f64,
    /// Binomial standard error over trials.
    pub std_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub rows: Vec<CurveRow>,
}

impl Curve {
    pub fn mean_at(&self, n: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.n_shots == n && r.class == "mean").map(|r| r.accuracy)
    }

    pub fn class_at(&self, n: usize, class: &str) -> Option<&CurveRow> {
        self.rows.iter().find(|r| r.n_shots == n && r.class == class)
    }
}

/// Mode-aggregated accuracy as a function of shots per verdict.
///
/// For each `n` in `grid` and each class, `trials` times draws `n` distinct
/// test shots of that class, takes the mode of their single-shot
/// predictions and scores it against the class.
pub fn accuracy_vs_shots(
    model: &ClassifierModel,
    test: &Dataset,
    grid: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Curve> {
    if grid.windows(2).any(|w| w[0] >= w[1]) || grid.first() == Some(&0) {
        return invalid("shot grid must be positive and strictly ascending");
    }
    if trials == 0 {
        return invalid("need at least one trial");
    }
    let c = model.labels.len();
    let preds = predict_all(model, test)?;
    let mut pools: Vec<Vec<usize>> = vec![Vec::new(); c];
    for (p, &y) in preds.iter().zip(&test.y) {
        pools[y].push(*p);
    }
    let mut rows = Vec::new();
    for (gi, &n) in grid.iter().enumerate() {
        let mut accs = Vec::new();
        for (k, pool) in pools.iter().enumerate() {
            if pool.is_empty() {
                continue;
            }
            if n > pool.len() {
                return invalid(format!("{n} shots requested but class {} has only {}", model.labels.vocabulary[k], pool.len()));
            }
            let stream_base = rng::derive_seed(rng::derive_seed(seed, gi as u64), k as u64);
            let hits: usize = (0..trials as u64)
                .into_par_iter()
                .map(|t| {
                    let mut r = rng::stream(stream_base, t);
                    let picked: Vec<usize> = sample(&mut r, pool.len(), n).iter().map(|i| pool[i]).collect();
                    usize::from(aggregate_mode(&picked).expect("n >= 1") == k)
                })
                .sum();
            let acc = hits as f64 / trials as f64;
            accs.push(acc);
            rows.push(CurveRow {
                n_shots: n,
                class: model.labels.vocabulary[k].clone(),
                accuracy: acc,
                std_error: (acc * (1.0 - acc) / trials as f64).sqrt(),
            });
        }
        let mean = accs.iter().sum::<f64>() / accs.len().max(1) as f64;
        let se = (rows[rows.len() - accs.len()..].iter().map(|r| r.std_error.powi(2)).sum::<f64>()).sqrt()
            / accs.len().max(1) as f64;
        rows.push(CurveRow { n_shots: n, class: "mean".into(), accuracy: mean, std_error: se });
    }
    Ok(Curve { rows })
}

pub fn write_curve_csv(path: &Path, curve: &Curve) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["n_shots", "class", "accuracy"])?;
    for r in &curve.rows {
        w.write_record([r.n_shots.to_string(), r.class.clone(), format!("{:.6}", r.accuracy)])?;
    }
    w.flush()?;
    Ok(())
}

/// Accuracy plus macro-averaged one-vs-rest false positive and false
/// negative rates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub fpr: f64,
    pub fnr: f64,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<usize>>,
    pub averaging: String,
}

pub fn metrics_from_confusion(confusion: &[Vec<usize>]) -> Result<Metrics> {
    let c = confusion.len();
    if confusion.iter().any(|r| r.len() != c) {
        return invalid("confusion matrix must be square");
    }
    let total: usize = confusion.iter().flatten().sum();
    if total == 0 {
        return invalid("empty confusion matrix");
    }
    let correct: usize = (0..c).map(|k| confusion[k][k]).sum();
    let (mut fpr, mut fnr, mut n) = (0.0, 0.0, 0usize);
    for k in 0..c {
        let pos: usize = confusion[k].iter().sum();
        if pos == 0 {
            continue;
        }
        let fn_k = pos - confusion[k][k];
        let fp_k: usize = (0..c).filter(|&j| j != k).map(|j| confusion[j][k]).sum();
        let neg = total - pos;
        fnr += fn_k as f64 / pos as f64;
        fpr += if neg == 0 { 0.0 } else { fp_k as f64 / neg as f64 };
        n += 1;
    }
    Ok(Metrics {
        accuracy: correct as f64 / total as f64,
        fpr: fpr / n as f64,
        fnr: fnr / n as f64,
        confusion: confusion.to_vec(),
        averaging: "macro one-vs-rest".into(),
    })
}

/// Metrics of `model` on already featurized test rows.
pub fn table_metrics(model: &ClassifierModel, test: &Dataset) -> Result<Metrics> {
    let c = model.labels.len();
    if test.is_empty() {
        return Err(Error::InvalidInput("empty test set".into()));
    }
    let mut confusion = vec![vec![0usize; c]; c];
    for (p, &y) in predict_all(model, test)?.iter().zip(&test.y) {
        confusion[y][*p] += 1;
    }
    metrics_from_confusion(&confusion)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub code: String,
    pub metrics: Metrics,
}

pub fn write_metrics_csv(path: &Path, rows: &[MetricsRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["code", "accuracy", "fpr", "fnr"])?;
    for r in rows {
        let m = &r.metrics;
        w.write_record([r.code.clone(), format!("{:.6}", m.accuracy), format!("{:.6}", m.fpr), format!("{:.6}", m.fnr)])?;
    }
    w.flush()?;
    Ok(())
}
