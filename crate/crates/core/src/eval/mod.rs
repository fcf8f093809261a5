//! Classification and ranking metrics, annotation handling, and the three
//! experiment harnesses.

mod experiments;
mod labels;
mod metrics;

pub use experiments::{
    judged_lists, large, medium, run_experiment, small, synthetic_data, EvalConfig, ExperimentData, ExperimentKind,
    LargeReport, MediumReport, Report, SmallReport,
};
pub use labels::{
    agreement_filter, agreement_from_records, append_labels, apply_labels, derive_url_ground_truth, read_labels,
    write_labels, Agreement, AnnotationRecord, PairLabel,
};
pub use metrics::{
    confusion_metrics, dcg_at_k, ndcg_at_k, precision_at_1, precision_at_1_values, roc_auc, t_interval,
    ConfusionCounts, ConfusionMetrics, MeanCi, RankedJudgedList, Ratio, MAX_GRADE,
};
