use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::farm::SyndromeRecord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    SingleShot,
    /// Element-wise mean of consecutive disjoint groups of k shots from one
    /// job. A trailing partial group is dropped.
    MeanOverK(usize),
}

/// How raw syndrome bits become feature entries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum FeatureEncoding {
    #[default]
    Raw,
    /// The first `rounds * round_width` bits are round-major syndrome bits;
    /// each bit after the first round is replaced by its XOR with the same
    /// stabilizer's bit one round earlier. Remaining bits pass through.
    RoundDifference { round_width: usize, rounds: usize },
}

impl FeatureEncoding {
    pub fn apply(&self, bits: &mut [bool]) -> Result<()> {
        if let FeatureEncoding::RoundDifference { round_width, rounds } = *self {
            let span = round_width * rounds;
            if span > bits.len() {
                return Err(Error::DimensionMismatch { expected: span, got: bits.len() });
            }
            for i in (round_width..span).rev() {
                bits[i] ^= bits[i - round_width];
            }
        }
        Ok(())
    }
}

/// What a class label identifies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Specificity {
    Backend,
    BackendMapping,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelSpec {
    pub specificity: Specificity,
    pub vocabulary: Vec<String>,
}

impl LabelSpec {
    pub fn new(specificity: Specificity, vocabulary: Vec<String>) -> Result<Self> {
        let unique: BTreeSet<&String> = vocabulary.iter().collect();
        if unique.len() != vocabulary.len() {
            return invalid("label vocabulary has duplicates");
        }
        Ok(LabelSpec { specificity, vocabulary })
    }

    /// Sorted vocabulary of every label present in `records`.
    pub fn fit(specificity: Specificity, records: &[SyndromeRecord]) -> Self {
        let set: BTreeSet<String> = records.iter().map(|r| Self::key_for(specificity, r)).collect();
        LabelSpec { specificity, vocabulary: set.into_iter().collect() }
    }

    /// Ground-truth label text of a record; uses the audited backend when
    /// the record was misrouted.
    pub fn key_for(specificity: Specificity, r: &SyndromeRecord) -> String {
        match specificity {
            Specificity::Backend => r.true_backend().to_string(),
            Specificity::BackendMapping => format!("{}|{}", r.true_backend(), r.mapping_id),
        }
    }

    pub fn key(&self, r: &SyndromeRecord) -> String {
        Self::key_for(self.specificity, r)
    }

    pub fn len(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocabulary.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.vocabulary.iter().position(|v| v == label)
    }

    /// Backend part of label `i`.
    pub fn backend_of(&self, i: usize) -> &str {
        let v = &self.vocabulary[i];
        v.split('|').next().unwrap_or(v)
    }
}

/// Feature matrix with labels and the job each row came from.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Dataset {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<usize>,
    pub jobs: Vec<String>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x.first().map_or(0, Vec::len)
    }

    /// Same rows with labels replaced.
    pub fn with_labels(&self, y: Vec<usize>) -> Dataset {
        Dataset { x: self.x.clone(), y, jobs: self.jobs.clone() }
    }

    pub fn extend(&mut self, other: Dataset) {
        self.x.extend(other.x);
        self.y.extend(other.y);
        self.jobs.extend(other.jobs);
    }
}

fn bits(r: &SyndromeRecord, encoding: FeatureEncoding) -> Result<Vec<f64>> {
    let mut b = r.bit_vec()?;
    encoding.apply(&mut b)?;
    Ok(b.into_iter().map(|b| if b { 1.0 } else { 0.0 }).collect())
}

/// Turns records into labelled feature rows from raw bits. Records of one
/// job must be contiguous, as they are in a shot log.
pub fn featurize(records: &[SyndromeRecord], aggregation: Aggregation, labels: &LabelSpec) -> Result<Dataset> {
    featurize_encoded(records, aggregation, FeatureEncoding::Raw, labels)
}

/// [`featurize`] with an explicit bit encoding, applied per shot before any
/// averaging.
pub fn featurize_encoded(
    records: &[SyndromeRecord],
    aggregation: Aggregation,
    encoding: FeatureEncoding,
    labels: &LabelSpec,
) -> Result<Dataset> {
    let Some(first) = records.first() else {
        return invalid("no records to featurize");
    };
    let width = first.bits.len();
    if let Some(r) = records.iter().find(|r| r.bits.len() != width) {
        return Err(Error::DimensionMismatch { expected: width, got: r.bits.len() });
    }
    let label = |r: &SyndromeRecord| -> Result<usize> {
        let key = labels.key(r);
        labels.index_of(&key).ok_or_else(|| Error::InvalidInput(format!("label {key} not in vocabulary")))
    };
    let mut out = Dataset::default();
    match aggregation {
        Aggregation::SingleShot => {
            for r in records {
                out.x.push(bits(r, encoding)?);
                out.y.push(label(r)?);
                out.jobs.push(r.job_id.clone());
            }
        }
        Aggregation::MeanOverK(k) => {
            if k == 0 {
                return invalid("MeanOverK needs k >= 1");
            }
            for job in records.chunk_by(|a, b| a.job_id == b.job_id) {
                for group in job.chunks_exact(k) {
                    let mut mean = vec![0.0; width];
                    for r in group {
                        for (m, b) in mean.iter_mut().zip(bits(r, encoding)?) {
                            *m += b;
                        }
                    }
                    mean.iter_mut().for_each(|m| *m /= k as f64);
                    out.x.push(mean);
                    out.y.push(label(&group[0])?);
                    out.jobs.push(group[0].job_id.clone());
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn rec(job: &str, backend: &str, bits: &str) -> SyndromeRecord {
        SyndromeRecord {
            job_id: job.into(),
            backend_id: backend.into(),
            mapping_id: "trivial".into(),
            circuit: "c".into(),
            shot: 0,
            bits: bits.into(),
            timestamp: 0.0,
            epoch: 0,
            audit: None,
        }
    }

    fn spec() -> LabelSpec {
        LabelSpec::new(Specificity::Backend, vec!["a".into(), "b".into()]).unwrap()
    }

    #[test]
    fn mean_over_k_examples() {
        let d = featurize(&[rec("j", "a", "01"), rec("j", "a", "01")], Aggregation::MeanOverK(2), &spec()).unwrap();
        assert_eq!(d.x, vec![vec![0.0, 1.0]]);
        let d = featurize(&[rec("j", "a", "00"), rec("j", "a", "11")], Aggregation::MeanOverK(2), &spec()).unwrap();
        assert_eq!(d.x, vec![vec![0.5, 0.5]]);
    }

    #[test]
    fn trailing_group_dropped() {
        let recs: Vec<_> = (0..85).map(|_| rec("j", "b", "1")).collect();
        let d = featurize(&recs, Aggregation::MeanOverK(40), &spec()).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.y, vec![1, 1]);
    }

    #[test]
    fn groups_do_not_cross_jobs() {
        let recs = vec![rec("j1", "a", "1"), rec("j2", "a", "0"), rec("j2", "a", "0")];
        let d = featurize(&recs, Aggregation::MeanOverK(2), &spec()).unwrap();
        assert_eq!(d.x, vec![vec![0.0]]);
        assert_eq!(d.jobs, vec!["j2".to_string()]);
    }

    #[test]
    fn mixed_widths_and_unknown_labels_fail() {
        assert!(featurize(&[rec("j", "a", "01"), rec("j", "a", "1")], Aggregation::SingleShot, &spec()).is_err());
        assert!(featurize(&[rec("j", "z", "01")], Aggregation::SingleShot, &spec()).is_err());
        assert!(featurize(&[], Aggregation::SingleShot, &spec()).is_err());
    }

    #[test]
    fn audit_overrides_label() {
        let mut r = rec("j", "a", "1");
        r.audit = Some("b".into());
        let d = featurize(&[r], Aggregation::SingleShot, &spec()).unwrap();
        assert_eq!(d.y, vec![1]);
    }

    #[test]
    fn round_difference_encoding() {
        let mut b = vec![true, false, true, true, true, false, true];
        FeatureEncoding::RoundDifference { round_width: 2, rounds: 3 }.apply(&mut b).unwrap();
        assert_eq!(b, vec![true, false, false, true, false, true, true]);
        let d = featurize_encoded(
            &[rec("j", "a", "1111"), rec("j", "a", "1011")],
            Aggregation::MeanOverK(2),
            FeatureEncoding::RoundDifference { round_width: 2, rounds: 2 },
            &spec(),
        )
        .unwrap();
        assert_eq!(d.x, vec![vec![1.0, 0.5, 0.0, 0.5]]);
        assert!(FeatureEncoding::RoundDifference { round_width: 3, rounds: 2 }.apply(&mut [true; 5]).is_err());
    }

    #[test]
    fn mapping_labels() {
        let mut r = rec("j", "a", "1");
        r.mapping_id = "embedding-03".into();
        let l = LabelSpec::fit(Specificity::BackendMapping, &[r]);
        assert_eq!(l.vocabulary, vec!["a|embedding-03".to_string()]);
        assert_eq!(l.backend_of(0), "a");
        assert!(LabelSpec::new(Specificity::Backend, vec!["a".into(), "a".into()]).is_err());
    }
}
