use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Dataset, LabelSpec};
use crate::error::{invalid, Error, Result};
use crate::rng;

/// Training hyperparameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub hidden: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Stop after this many epochs without the epoch loss improving by
    /// `min_delta`.
    pub patience: usize,
    pub min_delta: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { hidden: 128, learning_rate: 1e-3, batch_size: 64, max_epochs: 30, patience: 3, min_delta: 1e-4, seed: 0 }
    }
}

/// Softmax classifier with one rectified hidden layer.
///
/// `w1` is stored input-major (`w1[i * hidden + j]`), `w2` class-major
/// (`w2[k * hidden + j]`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierModel {
    pub input_dim: usize,
    pub hidden: usize,
    pub labels: LabelSpec,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
    pub class_weights: Vec<f64>,
    pub config: TrainConfig,
    pub final_loss: f64,
    pub epochs_run: usize,
}

#[derive(Clone, Copy)]
struct Shape {
    d: usize,
    h: usize,
    c: usize,
}

impl Shape {
    fn len(&self) -> usize {
        self.d * self.h + self.h + self.c * self.h + self.c
    }

    fn split<'a>(&self, p: &'a [f64]) -> (&'a [f64], &'a [f64], &'a [f64], &'a [f64]) {
        let (w1, rest) = p.split_at(self.d * self.h);
        let (b1, rest) = rest.split_at(self.h);
        let (w2, b2) = rest.split_at(self.c * self.h);
        (w1, b1, w2, b2)
    }

    fn split_mut<'a>(&self, p: &'a mut [f64]) -> (&'a mut [f64], &'a mut [f64], &'a mut [f64], &'a mut [f64]) {
        let (w1, rest) = p.split_at_mut(self.d * self.h);
        let (b1, rest) = rest.split_at_mut(self.h);
        let (w2, b2) = rest.split_at_mut(self.c * self.h);
        (w1, b1, w2, b2)
    }
}

/// Hidden activations and logits for one input.
fn forward(s: Shape, p: &[f64], x: &[f64], hidden: &mut [f64], logits: &mut [f64]) {
    let (w1, b1, w2, b2) = s.split(p);
    hidden.copy_from_slice(b1);
    for (i, &xi) in x.iter().enumerate() {
        if xi != 0.0 {
            for (a, w) in hidden.iter_mut().zip(&w1[i * s.h..(i + 1) * s.h]) {
                *a += xi * w;
            }
        }
    }
    hidden.iter_mut().for_each(|a| *a = a.max(0.0));
    for k in 0..s.c {
        logits[k] = b2[k] + w2[k * s.h..(k + 1) * s.h].iter().zip(hidden.iter()).map(|(w, a)| w * a).sum::<f64>();
    }
}

/// In-place softmax; returns log-sum-exp of the input.
fn softmax(v: &mut [f64]) -> f64 {
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = v.iter().map(|z| (z - m).exp()).sum();
    let lse = m + sum.ln();
    v.iter_mut().for_each(|z| *z = (*z - lse).exp());
    lse
}

/// Class-weighted mean cross-entropy over `rows` and its gradient.
fn loss_and_grad(
    s: Shape,
    p: &[f64],
    data: &Dataset,
    rows: &[usize],
    weights: &[f64],
    grad: Option<&mut [f64]>,
) -> f64 {
    let mut hidden = vec![0.0; s.h];
    let mut probs = vec![0.0; s.c];
    let mut dh = vec![0.0; s.h];
    let total_w: f64 = rows.iter().map(|&n| weights[data.y[n]]).sum();
    let mut loss = 0.0;
    let mut grad = grad;
    if let Some(g) = grad.as_deref_mut() {
        g.iter_mut().for_each(|v| *v = 0.0);
    }
    let (_, _, w2, _) = s.split(p);
    for &n in rows {
        let x = &data.x[n];
        let y = data.y[n];
        let wy = weights[y] / total_w;
        forward(s, p, x, &mut hidden, &mut probs);
        let zy = probs[y];
        let lse = softmax(&mut probs);
        loss += wy * (lse - zy);
        let Some(g) = grad.as_deref_mut() else { continue };
        let (gw1, gb1, gw2, gb2) = s.split_mut(g);
        probs[y] -= 1.0;
        dh.iter_mut().for_each(|v| *v = 0.0);
        for k in 0..s.c {
            let dz = wy * probs[k];
            gb2[k] += dz;
            let row = k * s.h..(k + 1) * s.h;
            for ((gw, a), (w, d)) in gw2[row.clone()].iter_mut().zip(&hidden).zip(w2[row].iter().zip(dh.iter_mut())) {
                *gw += dz * a;
                *d += dz * w;
            }
        }
        for (d, a) in dh.iter_mut().zip(&hidden) {
            if *a <= 0.0 {
                *d = 0.0;
            }
        }
        for (gb, d) in gb1.iter_mut().zip(&dh) {
            *gb += d;
        }
        for (i, &xi) in x.iter().enumerate() {
            if xi != 0.0 {
                for (gw, d) in gw1[i * s.h..(i + 1) * s.h].iter_mut().zip(&dh) {
                    *gw += xi * d;
                }
            }
        }
    }
    loss
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConfig {
    pub max_iterations: usize,
    /// A class lags when its recall is this far below the mean recall.
    pub lag: f64,
    /// Multiplier applied to a lagging class's weight.
    pub factor: f64,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        CalibrationConfig { max_iterations: 5, lag: 0.10, factor: 1.5 }
    }
}

/// One pass of the class-weight calibration loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationStep {
    pub weights: Vec<f64>,
    pub recalls: Vec<f64>,
    pub lagging: Vec<usize>,
}

fn balanced_weights(y: &[usize], c: usize) -> Result<Vec<f64>> {
    let mut counts = vec![0usize; c];
    for &v in y {
        counts[v] += 1;
    }
    if let Some(k) = counts.iter().position(|&n| n == 0) {
        return invalid(format!("class {k} has no training rows"));
    }
    Ok(counts.iter().map(|&n| y.len() as f64 / (c as f64 * n as f64)).collect())
}

/// Fits a classifier. `class_weights` defaults to inverse class frequency.
pub fn train(
    data: &Dataset,
    labels: &LabelSpec,
    class_weights: Option<&[f64]>,
    config: &TrainConfig,
) -> Result<ClassifierModel> {
    let c = labels.len();
    if c < 2 {
        return invalid("training needs at least two classes");
    }
    if data.is_empty() {
        return invalid("empty training set");
    }
    if data.y.iter().any(|&y| y >= c) {
        return invalid("label index outside vocabulary");
    }
    let d = data.dim();
    if let Some(row) = data.x.iter().find(|r| r.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: row.len() });
    }
    let distinct = data.y.iter().collect::<std::collections::BTreeSet<_>>().len();
    if distinct < 2 {
        return invalid("training data contains a single class");
    }
    let weights = match class_weights {
        Some(w) if w.len() != c => return Err(Error::DimensionMismatch { expected: c, got: w.len() }),
        Some(w) if w.iter().any(|v| !(*v > 0.0)) => return invalid("class weights must be positive"),
        Some(w) => w.to_vec(),
        None => balanced_weights(&data.y, c)?,
    };
    if config.hidden == 0 || config.batch_size == 0 || !(config.learning_rate > 0.0) {
        return invalid("hidden, batch_size and learning_rate must be positive");
    }

    let s = Shape { d, h: config.hidden, c };
    let mut r = rng::seeded(config.seed);
    let mut p = vec![0.0; s.len()];
    {
        let (w1, _, w2, _) = s.split_mut(&mut p);
        let a1 = (6.0 / d.max(1) as f64).sqrt();
        w1.iter_mut().for_each(|w| *w = r.random_range(-a1..a1));
        let a2 = (6.0 / (s.h + c) as f64).sqrt();
        w2.iter_mut().for_each(|w| *w = r.random_range(-a2..a2));
    }

    let (beta1, beta2, eps): (f64, f64, f64) = (0.9, 0.999, 1e-8);
    let mut m = vec![0.0; s.len()];
    let mut v = vec![0.0; s.len()];
    let mut g = vec![0.0; s.len()];
    let mut step = 0i32;
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut best = f64::INFINITY;
    let mut stale = 0;
    let mut epochs_run = 0;
    for _ in 0..config.max_epochs {
        epochs_run += 1;
        order.shuffle(&mut r);
        let mut epoch_loss = 0.0;
        let mut epoch_w = 0.0;
        for batch in order.chunks(config.batch_size) {
            let bw: f64 = batch.iter().map(|&n| weights[data.y[n]]).sum();
            epoch_loss += bw * loss_and_grad(s, &p, data, batch, &weights, Some(&mut g));
            epoch_w += bw;
            step += 1;
            let (c1, c2) = (1.0 - beta1.powi(step), 1.0 - beta2.powi(step));
            for i in 0..p.len() {
                m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
                v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
                p[i] -= config.learning_rate * (m[i] / c1) / ((v[i] / c2).sqrt() + eps);
            }
        }
        let epoch_loss = epoch_loss / epoch_w;
        if epoch_loss < best - config.min_delta {
            best = epoch_loss;
            stale = 0;
        } else {
            stale += 1;
            if stale >= config.patience {
                break;
            }
        }
    }
    let all: Vec<usize> = (0..data.len()).collect();
    let final_loss = loss_and_grad(s, &p, data, &all, &weights, None);
    let (w1, b1, w2, b2) = s.split(&p);
    Ok(ClassifierModel {
        input_dim: d,
        hidden: s.h,
        labels: labels.clone(),
        w1: w1.to_vec(),
        b1: b1.to_vec(),
        w2: w2.to_vec(),
        b2: b2.to_vec(),
        class_weights: weights,
        config: config.clone(),
        final_loss,
        epochs_run,
    })
}

/// Per-class recall of `model` on `data`.
pub(crate) fn recalls(model: &ClassifierModel, data: &Dataset) -> Result<Vec<f64>> {
    let c = model.labels.len();
    let mut hit = vec![0usize; c];
    let mut tot = vec![0usize; c];
    for (x, &y) in data.x.iter().zip(&data.y) {
        tot[y] += 1;
        if model.predict(x)? == y {
            hit[y] += 1;
        }
    }
    Ok(hit.iter().zip(&tot).map(|(&h, &t)| if t == 0 { f64::NAN } else { h as f64 / t as f64 }).collect())
}

/// Trains, then raises the weight of every class whose validation recall
/// lags the mean by more than `cal.lag` and retrains, up to
/// `cal.max_iterations` fits. Returns the fit with the best mean recall.
pub fn train_calibrated(
    data: &Dataset,
    validation: &Dataset,
    labels: &LabelSpec,
    config: &TrainConfig,
    cal: &CalibrationConfig,
) -> Result<(ClassifierModel, Vec<CalibrationStep>)> {
    let mut weights = balanced_weights(&data.y, labels.len())?;
    let mut steps = Vec::new();
    let mut best: Option<(f64, ClassifierModel)> = None;
    for _ in 0..cal.max_iterations.max(1) {
        let model = train(data, labels, Some(&weights), config)?;
        let rec = recalls(&model, validation)?;
        let present: Vec<f64> = rec.iter().cloned().filter(|r| !r.is_nan()).collect();
        let mean = present.iter().sum::<f64>() / present.len().max(1) as f64;
        let lagging: Vec<usize> = (0..rec.len()).filter(|&k| rec[k] < mean - cal.lag).collect();
        steps.push(CalibrationStep { weights: weights.clone(), recalls: rec, lagging: lagging.clone() });
        if best.as_ref().is_none_or(|(b, _)| mean > *b) {
            best = Some((mean, model));
        }
        if lagging.is_empty() {
            break;
        }
        for k in lagging {
            weights[k] *= cal.factor;
        }
    }
    Ok((best.expect("at least one fit").1, steps))
}

impl ClassifierModel {
    fn shape(&self) -> Shape {
        Shape { d: self.input_dim, h: self.hidden, c: self.labels.len() }
    }

    fn params(&self) -> Vec<f64> {
        [&self.w1[..], &self.b1, &self.w2, &self.b2].concat()
    }

    pub fn validate(&self) -> Result<()> {
        let s = self.shape();
        if self.w1.len() != s.d * s.h || self.b1.len() != s.h || self.w2.len() != s.c * s.h || self.b2.len() != s.c {
            return invalid("model weight shapes are inconsistent");
        }
        if self.class_weights.len() != s.c || self.class_weights.iter().any(|w| !(*w > 0.0)) {
            return invalid("class weights must be positive, one per class");
        }
        Ok(())
    }

    /// Class probabilities for one feature vector.
    pub fn probabilities(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch { expected: self.input_dim, got: x.len() });
        }
        let s = self.shape();
        let mut hidden = vec![0.0; s.h];
        let mut out = vec![0.0; s.c];
        let p = self.params();
        forward(s, &p, x, &mut hidden, &mut out);
        softmax(&mut out);
        Ok(out)
    }

    /// Label of the largest probability, lowest index on ties.
    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        Ok(argmax(&self.probabilities(x)?))
    }

    /// Batch prediction that reuses buffers.
    pub fn predict_many(&self, xs: &[Vec<f64>]) -> Result<Vec<usize>> {
        let s = self.shape();
        let p = self.params();
        let mut hidden = vec![0.0; s.h];
        let mut out = vec![0.0; s.c];
        xs.iter()
            .map(|x| {
                if x.len() != s.d {
                    return Err(Error::DimensionMismatch { expected: s.d, got: x.len() });
                }
                forward(s, &p, x, &mut hidden, &mut out);
                Ok(argmax(&out))
            })
            .collect()
    }

    /// Weighted loss of `data` under this model's class weights.
    pub fn loss(&self, data: &Dataset) -> f64 {
        let rows: Vec<usize> = (0..data.len()).collect();
        loss_and_grad(self.shape(), &self.params(), data, &rows, &self.class_weights, None)
    }

    /// Loss and its gradient with respect to all parameters, flattened as
    /// `w1, b1, w2, b2`.
    pub fn loss_and_gradient(&self, data: &Dataset) -> (f64, Vec<f64>) {
        let s = self.shape();
        let rows: Vec<usize> = (0..data.len()).collect();
        let mut g = vec![0.0; s.len()];
        let l = loss_and_grad(s, &self.params(), data, &rows, &self.class_weights, Some(&mut g));
        (l, g)
    }

    /// Overwrites parameter `i` of the flattened parameter vector.
    pub fn set_param(&mut self, i: usize, value: f64) {
        let s = self.shape();
        let (n1, n2, n3) = (s.d * s.h, s.h, s.c * s.h);
        match i {
            i if i < n1 => self.w1[i] = value,
            i if i < n1 + n2 => self.b1[i - n1] = value,
            i if i < n1 + n2 + n3 => self.w2[i - n1 - n2] = value,
            i => self.b2[i - n1 - n2 - n3] = value,
        }
    }

    pub fn param(&self, i: usize) -> f64 {
        self.params()[i]
    }

    pub fn num_params(&self) -> usize {
        self.shape().len()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.is_file() {
            return Err(Error::MissingArtifact(format!("model {}", path.display())));
        }
        let m: ClassifierModel = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        m.validate()?;
        Ok(m)
    }
}

pub(crate) fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Predicted label and class probabilities of one shot.
pub fn infer_shot(model: &ClassifierModel, feature: &[f64]) -> Result<(usize, Vec<f64>)> {
    let p = model.probabilities(feature)?;
    Ok((argmax(&p), p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sup::Specificity;
    use rand_distr::{Distribution, StandardNormal};

    fn labels(c: usize) -> LabelSpec {
        LabelSpec::new(Specificity::Backend, (0..c).map(|k| format!("b{k}")).collect()).unwrap()
    }

    fn small_config() -> TrainConfig {
        TrainConfig { hidden: 8, max_epochs: 200, patience: 20, learning_rate: 1e-2, batch_size: 16, ..Default::default() }
    }

    #[test]
    fn separable_bits_are_learned() {
        let mut d = Dataset::default();
        for n in 0..200 {
            let y = n % 2;
            d.x.push(vec![y as f64, (n % 3 == 0) as u8 as f64, 1.0 - y as f64]);
            d.y.push(y);
            d.jobs.push(String::new());
        }
        let m = train(&d, &labels(2), None, &small_config()).unwrap();
        let acc = m.predict_many(&d.x).unwrap().iter().zip(&d.y).filter(|(a, b)| a == b).count();
        assert!(acc as f64 / 200.0 >= 0.99);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut r = rng::seeded(3);
        let mut d = Dataset::default();
        for n in 0..6 {
            d.x.push((0..4).map(|_| r.random_range(-1.0..1.0)).collect());
            d.y.push(n % 3);
            d.jobs.push(String::new());
        }
        let cfg = TrainConfig { hidden: 5, max_epochs: 1, batch_size: 6, ..Default::default() };
        let mut m = train(&d, &labels(3), Some(&[1.0, 2.0, 0.5]), &cfg).unwrap();
        let (_, g) = m.loss_and_gradient(&d);
        let h = 1e-6;
        for i in 0..m.num_params() {
            let p0 = m.param(i);
            m.set_param(i, p0 + h);
            let lp = m.loss(&d);
            m.set_param(i, p0 - h);
            let lm = m.loss(&d);
            m.set_param(i, p0);
            let num = (lp - lm) / (2.0 * h);
            let rel = (g[i] - num).abs() / (g[i].abs() + num.abs()).max(1e-7);
            assert!(rel < 1e-4, "param {i}: analytic {} numeric {num} rel {rel}", g[i]);
        }
    }

    #[test]
    fn training_is_seed_deterministic() {
        let mut d = Dataset::default();
        for n in 0..50 {
            d.x.push(vec![(n % 2) as f64, (n % 5 == 0) as u8 as f64]);
            d.y.push(n % 2);
            d.jobs.push(String::new());
        }
        let a = train(&d, &labels(2), None, &small_config()).unwrap();
        let b = train(&d, &labels(2), None, &small_config()).unwrap();
        assert_eq!(a, b);
        let c = train(&d, &labels(2), None, &TrainConfig { seed: 1, ..small_config() }).unwrap();
        assert_ne!(a.w1, c.w1);
    }

    #[test]
    fn single_class_is_rejected() {
        let d = Dataset { x: vec![vec![0.0]; 3], y: vec![0; 3], jobs: vec![String::new(); 3] };
        assert!(train(&d, &labels(2), Some(&[1.0, 1.0]), &small_config()).is_err());
        assert!(train(&d, &labels(1), None, &small_config()).is_err());
    }

    #[test]
    fn upweighting_raises_recall() {
        let mut r = rng::seeded(8);
        let mut d = Dataset::default();
        for n in 0..400 {
            let y = n % 2;
            let z: f64 = StandardNormal.sample(&mut r);
            d.x.push(vec![y as f64 + z]);
            d.y.push(y);
            d.jobs.push(String::new());
        }
        let cfg = small_config();
        let even = train(&d, &labels(2), Some(&[1.0, 1.0]), &cfg).unwrap();
        let heavy = train(&d, &labels(2), Some(&[1.0, 2.0]), &cfg).unwrap();
        let r0 = recalls(&even, &d).unwrap()[1];
        let r1 = recalls(&heavy, &d).unwrap()[1];
        assert!(r1 > r0, "recall {r0} -> {r1}");
    }

    #[test]
    fn uniform_logits_pick_label_zero() {
        let mut model = train(
            &Dataset { x: vec![vec![0.0]; 3], y: vec![0, 1, 2], jobs: vec![String::new(); 3] },
            &labels(3),
            None,
            &small_config(),
        )
        .unwrap();
        model.w2.iter_mut().for_each(|w| *w = 0.0);
        model.b2.iter_mut().for_each(|b| *b = 0.0);
        let (label, p) = infer_shot(&model, &[0.3]).unwrap();
        assert_eq!(label, 0);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(infer_shot(&model, &[0.3, 0.1]).is_err());
    }

    #[test]
    fn calibration_loop_records_steps() {
        let mut d = Dataset::default();
        for n in 0..300 {
            let y = n % 3;
            d.x.push(vec![(y == 0) as u8 as f64, ((y == 1) && n % 2 == 0) as u8 as f64]);
            d.y.push(y);
            d.jobs.push(String::new());
        }
        let (m, steps) = train_calibrated(&d, &d, &labels(3), &small_config(), &CalibrationConfig::default()).unwrap();
        assert!(!steps.is_empty() && steps.len() <= 5);
        m.validate().unwrap();
    }

    #[test]
    fn model_json_round_trip() {
        let d = Dataset { x: vec![vec![0.0], vec![1.0]], y: vec![0, 1], jobs: vec![String::new(); 2] };
        let m = train(&d, &labels(2), None, &small_config()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.json");
        m.save(&p).unwrap();
        assert_eq!(ClassifierModel::load(&p).unwrap(), m);
    }
}
