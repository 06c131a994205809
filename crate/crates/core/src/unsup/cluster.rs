use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use super::vectors::euclid;
use super::JobVector;
use crate::error::{invalid, Error, Result};

/// DBSCAN result. `assignments[i]` is the cluster of `jobs[i]` in input
/// order, `None` for noise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    pub eps: f64,
    pub min_samples: usize,
    pub jobs: Vec<JobVector>,
    pub assignments: Vec<Option<usize>>,
    /// Indices into `jobs` of core points.
    pub core: Vec<usize>,
}

impl ClusterModel {
    pub fn num_clusters(&self) -> usize {
        self.assignments.iter().flatten().max().map_or(0, |m| m + 1)
    }

    pub fn num_noise(&self) -> usize {
        self.assignments.iter().filter(|a| a.is_none()).count()
    }

    /// Assignments as integers with noise as -1.
    pub fn labels(&self) -> Vec<i64> {
        self.assignments.iter().map(|a| a.map_or(-1, |c| c as i64)).collect()
    }
}

/// Density clustering with an inclusive radius (`distance <= eps`) and a
/// self-counting neighbourhood. Points are visited in ascending `job_id`
/// order, so a border point joins the first cluster that reaches it in that
/// order and the result does not depend on input order.
pub fn dbscan(jobs: &[JobVector], eps: f64, min_samples: usize) -> Result<ClusterModel> {
    if !(eps > 0.0) || min_samples == 0 {
        return invalid("dbscan needs eps > 0 and min_samples >= 1");
    }
    let n = jobs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| jobs[a].job_id.cmp(&jobs[b].job_id));
    let neighbours: Vec<Vec<usize>> = (0..n)
        .map(|i| order.iter().copied().filter(|&k| euclid(&jobs[i].mean, &jobs[k].mean) <= eps).collect())
        .collect();
    let is_core: Vec<bool> = neighbours.iter().map(|nb| nb.len() >= min_samples).collect();
    let mut assign: Vec<Option<usize>> = vec![None; n];
    let mut next = 0;
    for &i in &order {
        if assign[i].is_some() || !is_core[i] {
            continue;
        }
        let c = next;
        next += 1;
        assign[i] = Some(c);
        let mut queue = std::collections::VecDeque::from([i]);
        while let Some(p) = queue.pop_front() {
            for &q in &neighbours[p] {
                if assign[q].is_none() {
                    assign[q] = Some(c);
                    if is_core[q] {
                        queue.push_back(q);
                    }
                }
            }
        }
    }
    let core = order.iter().copied().filter(|&i| is_core[i]).collect();
    Ok(ClusterModel { eps, min_samples, jobs: jobs.to_vec(), assignments: assign, core })
}

fn comb2(n: usize) -> f64 {
    (n as f64) * (n as f64 - 1.0) / 2.0
}

/// Adjusted Rand index of two labelings. Noise, if encoded as its own
/// label value, counts as one more cluster.
pub fn ari<A: Eq + Hash, B: Eq + Hash>(predicted: &[A], truth: &[B]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::DimensionMismatch { expected: truth.len(), got: predicted.len() });
    }
    let n = predicted.len();
    let mut cells: HashMap<(&A, &B), usize> = HashMap::new();
    let mut rows: HashMap<&A, usize> = HashMap::new();
    let mut cols: HashMap<&B, usize> = HashMap::new();
    for (a, b) in predicted.iter().zip(truth) {
        *cells.entry((a, b)).or_default() += 1;
        *rows.entry(a).or_default() += 1;
        *cols.entry(b).or_default() += 1;
    }
    let index: f64 = cells.values().map(|&v| comb2(v)).sum();
    let sa: f64 = rows.values().map(|&v| comb2(v)).sum();
    let sb: f64 = cols.values().map(|&v| comb2(v)).sum();
    let expected = if n < 2 { 0.0 } else { sa * sb / comb2(n) };
    let max = 0.5 * (sa + sb);
    if max == expected {
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "verdict", content = "cluster")]
pub enum Verdict {
    KnownBackendCluster(usize),
    BackendChangeSuspected,
}

/// Known if some core point lies within `eps` of `job`; reports the
/// cluster of the nearest such core point.
pub fn verdict(model: &ClusterModel, job: &JobVector) -> Verdict {
    let mut best: Option<(f64, usize)> = None;
    for &i in &model.core {
        let d = euclid(&model.jobs[i].mean, &job.mean);
        if d <= model.eps && best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, i));
        }
    }
    match best {
        Some((_, i)) => Verdict::KnownBackendCluster(model.assignments[i].expect("core points are clustered")),
        None => Verdict::BackendChangeSuspected,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub eps: f64,
    pub min_samples: usize,
    pub ari: f64,
    pub clusters: usize,
    pub noise: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub best: SweepRow,
}

/// Clusters `jobs` for every grid point and keeps the highest ARI against
/// the jobs' true backends; the first grid point wins ties.
pub fn sweep(jobs: &[JobVector], eps_grid: &[f64], min_samples_grid: &[usize]) -> Result<SweepResult> {
    if eps_grid.is_empty() || min_samples_grid.is_empty() {
        return invalid("empty sweep grid");
    }
    let truth: Vec<&str> = jobs.iter().map(|j| j.backend.as_str()).collect();
    let mut rows = Vec::new();
    for &eps in eps_grid {
        for &ms in min_samples_grid {
            let m = dbscan(jobs, eps, ms)?;
            rows.push(SweepRow {
                eps,
                min_samples: ms,
                ari: ari(&m.labels(), &truth)?,
                clusters: m.num_clusters(),
                noise: m.num_noise(),
            });
        }
    }
    let best = rows.iter().fold(rows[0].clone(), |b, r| if r.ari > b.ari { r.clone() } else { b });
    Ok(SweepResult { rows, best })
}

/// Serializable summary of a clustering.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub eps: f64,
    pub min_samples: usize,
    pub assignments: Vec<(String, Option<usize>)>,
    pub core_jobs: Vec<String>,
    pub ari: Option<f64>,
}

impl ClusterReport {
    pub fn new(model: &ClusterModel, with_truth: bool) -> Result<Self> {
        let ari = if with_truth {
            let truth: Vec<&str> = model.jobs.iter().map(|j| j.backend.as_str()).collect();
            Some(ari(&model.labels(), &truth)?)
        } else {
            None
        };
        Ok(ClusterReport {
            eps: model.eps,
            min_samples: model.min_samples,
            assignments: model.jobs.iter().zip(&model.assignments).map(|(j, a)| (j.job_id.clone(), *a)).collect(),
            core_jobs: model.core.iter().map(|&i| model.jobs[i].job_id.clone()).collect(),
            ari,
        })
    }
}
