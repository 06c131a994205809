//! Supervised fingerprinting: features from syndrome records, a one hidden
//! layer classifier, shot aggregation and evaluation tables.

mod eval;
mod features;
mod mlp;

pub use eval::{
    accuracy_vs_shots, aggregate_mode, metrics_from_confusion, predict_all, table_metrics, write_curve_csv,
    write_metrics_csv, Curve, CurveRow, Metrics, MetricsRow,
};
pub use features::{featurize, featurize_encoded, Aggregation, Dataset, FeatureEncoding, LabelSpec, Specificity};
pub use mlp::{
    infer_shot, train, train_calibrated, CalibrationConfig, CalibrationStep, ClassifierModel, TrainConfig,
};
