//! Synthetic benchmark: street scenes, the erosion/dilation dataset,
//! equal-error triplets and the cross-metric comparison.

mod compare;
mod dataset;
mod run;
mod scene;
mod triplet;

pub use compare::{compare_metrics, mean_abs_diff, pearson, ComparisonMatrix, MetricSeries};
pub use dataset::{
    generate_dataset, jitter_boundary, read_dataset, write_dataset, DatasetPair, LoadedDataset,
    Manifest, ManifestPair, Variant, DEFAULT_LEVELS, DEFAULT_SEED, JITTER_BAND,
    JITTER_PROBABILITY, MANIFEST_FILE, PALETTE_FILE,
};
pub use run::{
    evaluate_all, run_benchmark, wiou_label, BenchmarkConfig, BenchmarkResult, ImageRow,
    ImageScores, TripletRow, EDGE_F1_LABEL, IOU_LABEL,
};
pub use scene::{
    classes, default_scenes, generate_scene, kitti_palette, Band, Part, SceneObject, SceneSpec,
    Shape,
};
pub use triplet::{generate_equal_error_triplet, Placement, Triplet, DEFAULT_ERROR_COUNT};
