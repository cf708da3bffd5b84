//! Region and boundary metrics for one (ground truth, prediction) pair.

mod confusion;
mod edges;
mod report;

pub use confusion::{
    confusion, f1_score, iou, weighted_confusion, wiou, ConfusionCounts, WeightedConfusion,
};
pub use edges::{bf_score, check_theta, edge_match, edge_prf, EdgeScores};
pub use report::{
    evaluate_pair, Aggregate, AlphaValue, ClassMetrics, EvalConfig, MetricReport, DEFAULT_THETA,
};
