use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use super::compare::{compare_metrics, ComparisonMatrix, MetricSeries};
use super::dataset::DatasetPair;
use super::scene::SceneSpec;
use super::triplet::{generate_equal_error_triplet, Placement, DEFAULT_ERROR_COUNT};
use crate::distance::DistanceOptions;
use crate::fmt::{format_opt, format_value};
use crate::metrics::{evaluate_pair, EvalConfig, MetricReport, DEFAULT_THETA};
use crate::weighting::ALPHA_SWEEP;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkConfig {
    pub alphas: Vec<f64>,
    pub theta: f64,
    pub distance: DistanceOptions,
    /// Mislabeled pixels per equal-error triplet member; 0 skips triplets.
    pub error_count: usize,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            alphas: ALPHA_SWEEP.to_vec(),
            theta: DEFAULT_THETA,
            distance: DistanceOptions::default(),
            error_count: DEFAULT_ERROR_COUNT,
        }
    }
}

impl BenchmarkConfig {
    pub fn eval_config(&self) -> EvalConfig {
        EvalConfig {
            alphas: self.alphas.clone(),
            theta: self.theta,
            distance: self.distance,
        }
    }
}

/// Aggregate scores of one evaluated image.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageScores {
    pub iou: Option<f64>,
    pub wiou: Vec<Option<f64>>,
    pub edge_f1: Option<f64>,
    pub bf_score: Option<f64>,
    /// Non-ignored pixels whose predicted label is wrong.
    pub error_pixels: u64,
}

impl ImageScores {
    fn from_report(report: &MetricReport, gt: &crate::LabelMap, pred: &crate::LabelMap) -> Self {
        let g = &report.aggregate;
        let error_pixels = gt
            .labels()
            .iter()
            .zip(pred.labels())
            .enumerate()
            .filter(|&(i, (a, b))| a != b && !gt.is_ignored_at(i))
            .count() as u64;
        Self {
            iou: g.iou,
            wiou: g.wiou.iter().map(|a| a.value).collect(),
            edge_f1: g.edge_f1,
            bf_score: g.bf_score,
            error_pixels,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImageRow {
    pub scene: String,
    pub variant: String,
    pub scores: ImageScores,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TripletRow {
    pub scene: String,
    pub placement: Placement,
    pub scores: ImageScores,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkResult {
    pub alphas: Vec<f64>,
    pub series: Vec<MetricSeries>,
    pub comparison: ComparisonMatrix,
    pub per_image: Vec<ImageRow>,
    pub triplets: Vec<TripletRow>,
}

pub fn wiou_label(alpha: f64) -> String {
    format!("wIoU@{}", format_value(alpha))
}

pub const IOU_LABEL: &str = "IoU";
pub const EDGE_F1_LABEL: &str = "edgeF1";

/// Evaluates every pair in parallel; results keep the input order.
pub fn evaluate_all(pairs: &[DatasetPair], config: &EvalConfig) -> Result<Vec<MetricReport>> {
    config.validate()?;
    pairs
        .par_iter()
        .map(|p| evaluate_pair(&p.gt, &p.pred, config))
        .collect()
}

/// Scores every dataset pair, builds the IoU / wIoU-per-alpha / edge-F1
/// series in dataset order and compares them. Equal-error triplets are
/// generated from `scenes`.
pub fn run_benchmark(
    pairs: &[DatasetPair],
    scenes: &[SceneSpec],
    config: &BenchmarkConfig,
) -> Result<BenchmarkResult> {
    if pairs.is_empty() {
        return Err(Error::InvalidDataset("dataset has no pairs".into()));
    }
    let eval = config.eval_config();
    let reports = evaluate_all(pairs, &eval)?;
    let per_image: Vec<ImageRow> = pairs
        .iter()
        .zip(&reports)
        .map(|(p, r)| ImageRow {
            scene: p.scene.clone(),
            variant: p.variant.to_string(),
            scores: ImageScores::from_report(r, &p.gt, &p.pred),
        })
        .collect();

    let column = |name: String, get: &dyn Fn(&ImageScores) -> Option<f64>| {
        let values = per_image
            .iter()
            .map(|row| {
                get(&row.scores).ok_or_else(|| {
                    Error::InvalidSeries(format!(
                        "{name} is undefined for {}/{}",
                        row.scene, row.variant
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok::<_, Error>(MetricSeries::new(name, values))
    };
    let mut series = vec![column(IOU_LABEL.into(), &|s| s.iou)?];
    for (k, &a) in config.alphas.iter().enumerate() {
        series.push(column(wiou_label(a), &|s| s.wiou[k])?);
    }
    series.push(column(EDGE_F1_LABEL.into(), &|s| s.edge_f1)?);
    let comparison = compare_metrics(&series)?;

    let mut triplets = Vec::new();
    if config.error_count > 0 {
        for spec in scenes {
            let t = generate_equal_error_triplet(spec, config.error_count)?;
            let members: Vec<_> = t.members.iter().map(|(p, pred)| (*p, pred)).collect();
            let rows: Vec<TripletRow> = members
                .par_iter()
                .map(|&(placement, pred)| {
                    let r = evaluate_pair(&t.gt, pred, &eval)?;
                    Ok(TripletRow {
                        scene: spec.name.clone(),
                        placement,
                        scores: ImageScores::from_report(&r, &t.gt, pred),
                    })
                })
                .collect::<Result<_>>()?;
            triplets.extend(rows);
        }
    }

    Ok(BenchmarkResult {
        alphas: config.alphas.clone(),
        series,
        comparison,
        per_image,
        triplets,
    })
}

fn score_header(out: &mut String, alphas: &[f64]) {
    out.push_str("iou");
    for &a in alphas {
        let _ = write!(out, ",wiou@{}", format_value(a));
    }
    out.push_str(",edge_f1,bf_score,error_pixels\n");
}

fn score_cells(out: &mut String, s: &ImageScores) {
    out.push_str(&format_opt(s.iou));
    for &w in &s.wiou {
        let _ = write!(out, ",{}", format_opt(w));
    }
    let _ = writeln!(
        out,
        ",{},{},{}",
        format_opt(s.edge_f1),
        format_opt(s.bf_score),
        s.error_pixels
    );
}

impl BenchmarkResult {
    pub fn per_image_csv(&self) -> String {
        let mut out = String::from("scene,variant,");
        score_header(&mut out, &self.alphas);
        for row in &self.per_image {
            let _ = write!(out, "{},{},", row.scene, row.variant);
            score_cells(&mut out, &row.scores);
        }
        out
    }

    pub fn triplet_csv(&self) -> String {
        let mut out = String::from("scene,placement,");
        score_header(&mut out, &self.alphas);
        for row in &self.triplets {
            let _ = write!(out, "{},{},", row.scene, row.placement);
            score_cells(&mut out, &row.scores);
        }
        out
    }

    /// Writes `comparison.json`, `per_image.csv` and `triplet.csv` to `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, text) in [
            ("comparison.json", self.comparison.to_json()),
            ("per_image.csv", self.per_image_csv()),
            ("triplet.csv", self.triplet_csv()),
        ] {
            let path = dir.join(name);
            fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }
}
