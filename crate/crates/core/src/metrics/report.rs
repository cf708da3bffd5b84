use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::confusion::{confusion_all, f1_score, iou, weighted_confusion_all, ConfusionCounts};
use super::edges::{bf_score_sets, check_theta, edge_prf_sets};
use crate::distance::{scene_distance_field, DistanceOptions};
use crate::fmt::{format_opt, format_value, ser_f64, ser_opt_f64};
use crate::label::{extract_boundary, ClassId, LabelMap};
use crate::weighting::{check_alpha, weight_map};
use crate::Result;

/// Default matching tolerance in pixels.
pub const DEFAULT_THETA: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub alphas: Vec<f64>,
    pub theta: f64,
    #[serde(flatten)]
    pub distance: DistanceOptions,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            alphas: vec![1.0],
            theta: DEFAULT_THETA,
            distance: DistanceOptions::default(),
        }
    }
}

impl EvalConfig {
    pub fn with_alphas(alphas: &[f64]) -> Self {
        Self {
            alphas: alphas.to_vec(),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for &a in &self.alphas {
            check_alpha(a)?;
        }
        check_theta(self.theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaValue {
    #[serde(serialize_with = "ser_f64")]
    pub alpha: f64,
    #[serde(serialize_with = "ser_opt_f64")]
    pub value: Option<f64>,
}

/// All metrics of one class. `None` marks an undefined value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub counts: ConfusionCounts,
    #[serde(serialize_with = "ser_opt_f64")]
    pub iou: Option<f64>,
    pub wiou: Vec<AlphaValue>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub precision: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub recall: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub f1: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub edge_precision: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub edge_recall: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub edge_f1: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub bf_score: Option<f64>,
}

impl ClassMetrics {
    pub fn wiou_at(&self, alpha: f64) -> Option<f64> {
        self.wiou.iter().find(|a| a.alpha == alpha).and_then(|a| a.value)
    }
}

/// Unweighted means over the classes present in the ground truth, each metric
/// averaged over the classes where it is defined.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub classes: Vec<ClassId>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub iou: Option<f64>,
    pub wiou: Vec<AlphaValue>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub precision: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub recall: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub f1: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub edge_precision: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub edge_recall: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub edge_f1: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub bf_score: Option<f64>,
}

impl Aggregate {
    pub fn wiou_at(&self, alpha: f64) -> Option<f64> {
        self.wiou.iter().find(|a| a.alpha == alpha).and_then(|a| a.value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub width: usize,
    pub height: usize,
    pub config: EvalConfig,
    pub per_class: BTreeMap<ClassId, ClassMetrics>,
    pub aggregate: Aggregate,
    pub warnings: Vec<String>,
}

fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let (mut sum, mut n) = (0.0, 0usize);
    for v in values.flatten() {
        sum += v;
        n += 1;
    }
    (n > 0).then(|| sum / n as f64)
}

/// Evaluates `pred` against `gt` for every class that occurs in either map.
///
/// The distance field and one weight map per alpha are computed once from
/// `gt` and shared by all classes.
pub fn evaluate_pair(gt: &LabelMap, pred: &LabelMap, config: &EvalConfig) -> Result<MetricReport> {
    gt.same_shape(pred)?;
    config.validate()?;
    let mut warnings = Vec::new();

    let gt_classes = gt.classes_present();
    let mut classes = gt_classes.clone();
    classes.extend(pred.classes_present());
    classes.retain(|&c| Some(c) != gt.ignore_id());
    classes.sort_unstable();
    classes.dedup();

    let counts = confusion_all(gt, pred);

    let scene = scene_distance_field(gt, &config.distance)?;
    for c in &scene.degenerate_classes {
        warnings.push(format!(
            "class {c} covers the whole image; its normalized distance is set to 1"
        ));
    }
    let weighted: Vec<_> = config
        .alphas
        .iter()
        .map(|&a| Ok(weighted_confusion_all(gt, pred, &weight_map(&scene.field, a)?)))
        .collect::<Result<_>>()?;

    let mut per_class = BTreeMap::new();
    for &c in &classes {
        let cc = counts[c as usize];
        let wiou: Vec<AlphaValue> = config
            .alphas
            .iter()
            .zip(&weighted)
            .map(|(&alpha, w)| {
                let value = w[c as usize].wiou();
                if value.is_none() && cc.true_pos + cc.false_pos + cc.false_neg > 0 {
                    warnings.push(format!(
                        "class {c}: weighted union mass is zero at alpha {}; wIoU undefined",
                        format_value(alpha)
                    ));
                }
                AlphaValue { alpha, value }
            })
            .collect();

        let gt_edges = extract_boundary(gt, c);
        let pred_edges = extract_boundary(pred, c);
        let edges = edge_prf_sets(&gt_edges, &pred_edges, config.theta)?;
        let bf = bf_score_sets(&gt_edges, &pred_edges, gt.width(), gt.height(), config.theta)?;
        if edges.f1.is_none() && gt_classes.contains(&c) {
            warnings.push(format!(
                "class {c}: no boundary pixels in either map; edge metrics undefined"
            ));
        }

        per_class.insert(
            c,
            ClassMetrics {
                counts: cc,
                iou: iou(&cc),
                wiou,
                precision: cc.precision(),
                recall: cc.recall(),
                f1: f1_score(&cc),
                edge_precision: edges.precision,
                edge_recall: edges.recall,
                edge_f1: edges.f1,
                bf_score: bf,
            },
        );
    }

    let in_gt = || gt_classes.iter().map(|c| &per_class[c]);
    let aggregate = Aggregate {
        classes: gt_classes.clone(),
        iou: mean(in_gt().map(|m| m.iou)),
        wiou: config
            .alphas
            .iter()
            .enumerate()
            .map(|(k, &alpha)| AlphaValue {
                alpha,
                value: mean(in_gt().map(|m| m.wiou[k].value)),
            })
            .collect(),
        precision: mean(in_gt().map(|m| m.precision)),
        recall: mean(in_gt().map(|m| m.recall)),
        f1: mean(in_gt().map(|m| m.f1)),
        edge_precision: mean(in_gt().map(|m| m.edge_precision)),
        edge_recall: mean(in_gt().map(|m| m.edge_recall)),
        edge_f1: mean(in_gt().map(|m| m.edge_f1)),
        bf_score: mean(in_gt().map(|m| m.bf_score)),
    };

    Ok(MetricReport {
        width: gt.width(),
        height: gt.height(),
        config: config.clone(),
        per_class,
        aggregate,
        warnings,
    })
}

fn or_na(v: Option<f64>) -> String {
    v.map(format_value).unwrap_or_else(|| "NA".to_string())
}

impl MetricReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One row per class and alpha, followed by the same rows for the mean.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "class,alpha,iou,wiou,precision,recall,f1,edge_precision,edge_recall,edge_f1,bf_score\n",
        );
        let alphas: Vec<Option<f64>> = if self.config.alphas.is_empty() {
            vec![None]
        } else {
            self.config.alphas.iter().copied().map(Some).collect()
        };
        let mut row = |name: &str,
                       alpha: Option<f64>,
                       iou: Option<f64>,
                       wiou: Option<f64>,
                       rest: [Option<f64>; 7]| {
            let _ = write!(
                out,
                "{name},{},{},{}",
                format_opt(alpha),
                format_opt(iou),
                format_opt(wiou)
            );
            for v in rest {
                let _ = write!(out, ",{}", format_opt(v));
            }
            out.push('\n');
        };
        for (c, m) in &self.per_class {
            for (k, &a) in alphas.iter().enumerate() {
                let w = a.and_then(|_| m.wiou[k].value);
                row(
                    &c.to_string(),
                    a,
                    m.iou,
                    w,
                    [
                        m.precision,
                        m.recall,
                        m.f1,
                        m.edge_precision,
                        m.edge_recall,
                        m.edge_f1,
                        m.bf_score,
                    ],
                );
            }
        }
        let g = &self.aggregate;
        for (k, &a) in alphas.iter().enumerate() {
            let w = a.and_then(|_| g.wiou[k].value);
            row(
                "mean",
                a,
                g.iou,
                w,
                [
                    g.precision,
                    g.recall,
                    g.f1,
                    g.edge_precision,
                    g.edge_recall,
                    g.edge_f1,
                    g.bf_score,
                ],
            );
        }
        out
    }

    /// `mIoU=<v> mwIoU[a=<alpha>]=<v> ... edgeF1=<v>`
    pub fn summary_line(&self) -> String {
        let g = &self.aggregate;
        let mut s = format!("mIoU={}", or_na(g.iou));
        for a in &g.wiou {
            let _ = write!(s, " mwIoU[a={}]={}", format_value(a.alpha), or_na(a.value));
        }
        let _ = write!(s, " edgeF1={}", or_na(g.edge_f1));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weighting::ALPHA_SWEEP;

    fn scene() -> LabelMap {
        let mut map = LabelMap::filled(12, 10, 3, 0).unwrap();
        for y in 5..10 {
            for x in 0..12 {
                map.set(x, y, 1);
            }
        }
        for y in 3..7 {
            for x in 4..9 {
                map.set(x, y, 2);
            }
        }
        map
    }

    #[test]
    fn self_comparison_is_perfect() {
        let gt = scene();
        let r = evaluate_pair(&gt, &gt, &EvalConfig::with_alphas(&ALPHA_SWEEP)).unwrap();
        assert_eq!(r.per_class.len(), 3);
        for m in r.per_class.values() {
            assert_eq!(m.iou, Some(1.0));
            assert!(m.wiou.iter().all(|a| a.value == Some(1.0)));
            assert_eq!(m.edge_f1, Some(1.0));
            assert_eq!(m.bf_score, Some(1.0));
        }
        assert_eq!(r.aggregate.iou, Some(1.0));
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn disjoint_prediction_scores_zero() {
        let gt = scene();
        let mut pred = gt.clone();
        for y in 3..7 {
            for x in 4..9 {
                pred.set(x, y, 0);
            }
        }
        pred.set(0, 0, 2);
        let r = evaluate_pair(&gt, &pred, &EvalConfig::default()).unwrap();
        let m = &r.per_class[&2];
        assert_eq!(m.iou, Some(0.0));
        assert_eq!(m.wiou[0].value, Some(0.0));
    }

    #[test]
    fn prediction_only_class_is_reported_but_not_averaged() {
        let gt = LabelMap::filled(4, 4, 3, 0).unwrap();
        let mut pred = gt.clone();
        pred.set(1, 1, 2);
        let r = evaluate_pair(&gt, &pred, &EvalConfig::default()).unwrap();
        assert!(r.per_class.contains_key(&2));
        assert_eq!(r.aggregate.classes, vec![0]);
        // class 0 fills the ground truth
        assert!(r.warnings.iter().any(|w| w.contains("whole image")));
    }

    #[test]
    fn summary_and_csv_shapes() {
        let gt = scene();
        let r = evaluate_pair(&gt, &gt, &EvalConfig::with_alphas(&[0.1, 1.0])).unwrap();
        assert_eq!(
            r.summary_line(),
            "mIoU=1 mwIoU[a=0.1]=1 mwIoU[a=1]=1 edgeF1=1"
        );
        let csv = r.to_csv();
        assert_eq!(csv.lines().count(), 1 + 3 * 2 + 2);
        assert!(csv.lines().nth(1).unwrap().starts_with("0,0.1,1,1,"));
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["per_class"]["2"]["iou"], 1.0);
        assert_eq!(json["config"]["norm"], "l2");
    }

    #[test]
    fn rejects_bad_config() {
        let gt = scene();
        assert!(evaluate_pair(&gt, &gt, &EvalConfig::with_alphas(&[0.0])).is_err());
        let cfg = EvalConfig {
            theta: -1.0,
            ..EvalConfig::default()
        };
        assert!(evaluate_pair(&gt, &gt, &cfg).is_err());
    }
}
