use std::collections::HashMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::farm::SyndromeRecord;

/// Mean syndrome vector of one job.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JobVector {
    pub job_id: String,
    /// Backend that actually ran the job. Evaluation only.
    pub backend: String,
    pub timestamp: f64,
    pub mean: Vec<f64>,
}

pub fn job_vector(records: &[SyndromeRecord]) -> Result<JobVector> {
    let Some(first) = records.first() else {
        return invalid("job has no records");
    };
    let width = first.bits.len();
    let mut mean = vec![0.0; width];
    for r in records {
        if r.job_id != first.job_id {
            return invalid(format!("records from jobs {} and {} mixed", first.job_id, r.job_id));
        }
        if r.bits.len() != width {
            return Err(Error::DimensionMismatch { expected: width, got: r.bits.len() });
        }
        for (m, b) in mean.iter_mut().zip(r.bit_vec()?) {
            *m += f64::from(u8::from(b));
        }
    }
    mean.iter_mut().for_each(|m| *m /= records.len() as f64);
    Ok(JobVector {
        job_id: first.job_id.clone(),
        backend: first.true_backend().to_string(),
        timestamp: first.timestamp,
        mean,
    })
}

/// One vector per job, in order of first appearance.
pub fn job_vectors(records: &[SyndromeRecord]) -> Result<Vec<JobVector>> {
    let mut order: Vec<&str> = Vec::new();
    let mut groups: HashMap<&str, Vec<SyndromeRecord>> = HashMap::new();
    for r in records {
        groups
            .entry(&r.job_id)
            .or_insert_with(|| {
                order.push(&r.job_id);
                Vec::new()
            })
            .push(r.clone());
    }
    order.iter().map(|id| job_vector(&groups[id])).collect()
}

/// Z-scores every coordinate across `jobs`; constant coordinates become 0.
pub fn standardize(jobs: &[JobVector]) -> Vec<JobVector> {
    let Some(first) = jobs.first() else { return Vec::new() };
    let d = first.mean.len();
    let n = jobs.len() as f64;
    let mut mu = vec![0.0; d];
    let mut sd = vec![0.0; d];
    for j in jobs {
        for (m, v) in mu.iter_mut().zip(&j.mean) {
            *m += v / n;
        }
    }
    for j in jobs {
        for ((s, v), m) in sd.iter_mut().zip(&j.mean).zip(&mu) {
            *s += (v - m).powi(2) / n;
        }
    }
    jobs.iter()
        .map(|j| JobVector {
            mean: j
                .mean
                .iter()
                .zip(mu.iter().zip(&sd))
                .map(|(v, (m, s))| if *s > 0.0 { (v - m) / s.sqrt() } else { 0.0 })
                .collect(),
            ..j.clone()
        })
        .collect()
}

pub(crate) fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Time gap and distance of one unordered pair of jobs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSample {
    pub job_a: String,
    pub job_b: String,
    pub dt: f64,
    pub distance: f64,
    pub same_backend: bool,
}

pub fn pairwise_distances(jobs: &[JobVector]) -> Result<Vec<PairSample>> {
    if jobs.len() < 2 {
        return invalid("need at least two jobs for pair distances");
    }
    let d = jobs[0].mean.len();
    if let Some(j) = jobs.iter().find(|j| j.mean.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: j.mean.len() });
    }
    Ok((0..jobs.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            (i + 1..jobs.len()).map(move |k| {
                let (a, b) = (&jobs[i], &jobs[k]);
                PairSample {
                    job_a: a.job_id.clone(),
                    job_b: b.job_id.clone(),
                    dt: (b.timestamp - a.timestamp).abs(),
                    distance: euclid(&a.mean, &b.mean),
                    same_backend: a.backend == b.backend,
                }
            })
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
    pub mean: f64,
}

impl Quantiles {
    fn of(sorted: &[f64]) -> Quantiles {
        let q = |p: f64| {
            let pos = p * (sorted.len() - 1) as f64;
            let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
            sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
        };
        Quantiles {
            min: sorted[0],
            q25: q(0.25),
            median: q(0.5),
            q75: q(0.75),
            max: sorted[sorted.len() - 1],
            mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
        }
    }
}

/// How well a single distance threshold separates same-backend pairs from
/// different-backend pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationStats {
    pub same: Quantiles,
    pub different: Quantiles,
    /// Pairs at or below the threshold are called same-backend.
    pub threshold: f64,
    /// Smallest balanced error over all thresholds: mean of the misclassified
    /// fractions of the two pair classes.
    pub overlap: f64,
}

pub fn separation_stat(pairs: &[PairSample]) -> Result<SeparationStats> {
    let mut same: Vec<f64> = pairs.iter().filter(|p| p.same_backend).map(|p| p.distance).collect();
    let mut diff: Vec<f64> = pairs.iter().filter(|p| !p.same_backend).map(|p| p.distance).collect();
    if same.is_empty() || diff.is_empty() {
        return invalid("separation needs both same-backend and different-backend pairs");
    }
    same.sort_by(f64::total_cmp);
    diff.sort_by(f64::total_cmp);
    let (ns, nd) = (same.len() as f64, diff.len() as f64);
    let mut cuts: Vec<f64> = same.iter().chain(&diff).cloned().collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    // threshold below everything: all pairs called different
    let mut best = (0.5, cuts[0] - 1e-12);
    for (i, &t) in cuts.iter().enumerate() {
        let same_above = ns - same.partition_point(|&d| d <= t) as f64;
        let diff_below = diff.partition_point(|&d| d <= t) as f64;
        let err = 0.5 * (same_above / ns + diff_below / nd);
        if err < best.0 {
            let next = cuts.get(i + 1).copied().unwrap_or(t);
            best = (err, 0.5 * (t + next));
        }
    }
    Ok(SeparationStats { same: Quantiles::of(&same), different: Quantiles::of(&diff), threshold: best.1, overlap: best.0 })
}

/// Pearson correlation; 0 when either side is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len()) as f64;
    if n < 2.0 {
        return 0.0;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

pub fn write_pairs_csv(path: &Path, pairs: &[PairSample]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["job_a", "job_b", "dt_seconds", "distance", "same_backend"])?;
    for p in pairs {
        w.write_record([
            p.job_a.clone(),
            p.job_b.clone(),
            format!("{}", p.dt),
            format!("{:.6}", p.distance),
            p.same_backend.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
