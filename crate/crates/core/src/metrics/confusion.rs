use serde::Serialize;

use crate::label::{ClassId, LabelMap};
use crate::weighting::WeightMap;
use crate::{Error, Result};

/// Pixel counts of one class against the rest, ignore pixels excluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ConfusionCounts {
    pub true_pos: u64,
    pub false_pos: u64,
    pub false_neg: u64,
    pub true_neg: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.true_pos + self.false_pos + self.false_neg + self.true_neg
    }

    /// FP + FN.
    pub fn errors(&self) -> u64 {
        self.false_pos + self.false_neg
    }

    pub fn precision(&self) -> Option<f64> {
        ratio(self.true_pos, self.true_pos + self.false_pos)
    }

    pub fn recall(&self) -> Option<f64> {
        ratio(self.true_pos, self.true_pos + self.false_neg)
    }
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// `2 tp / (2 tp + fn + fp)`; `None` when the class is absent from both maps.
pub fn f1_score(c: &ConfusionCounts) -> Option<f64> {
    ratio(2 * c.true_pos, 2 * c.true_pos + c.false_neg + c.false_pos)
}

/// `tp / (tp + fn + fp)`; `None` when the class is absent from both maps.
pub fn iou(c: &ConfusionCounts) -> Option<f64> {
    ratio(c.true_pos, c.true_pos + c.false_neg + c.false_pos)
}

pub fn confusion(gt: &LabelMap, pred: &LabelMap, class: ClassId) -> Result<ConfusionCounts> {
    gt.same_shape(pred)?;
    let mut c = ConfusionCounts::default();
    for (i, (&g, &p)) in gt.labels().iter().zip(pred.labels()).enumerate() {
        if gt.is_ignored_at(i) {
            continue;
        }
        match (g == class, p == class) {
            (true, true) => c.true_pos += 1,
            (false, true) => c.false_pos += 1,
            (true, false) => c.false_neg += 1,
            (false, false) => c.true_neg += 1,
        }
    }
    Ok(c)
}

/// Counts for every class id in one pass, indexed by class id.
pub(crate) fn confusion_all(gt: &LabelMap, pred: &LabelMap) -> Vec<ConfusionCounts> {
    let mut tp = [0u64; 256];
    let mut fp = [0u64; 256];
    let mut fneg = [0u64; 256];
    let mut valid = 0u64;
    for (i, (&g, &p)) in gt.labels().iter().zip(pred.labels()).enumerate() {
        if gt.is_ignored_at(i) {
            continue;
        }
        valid += 1;
        if g == p {
            tp[g as usize] += 1;
        } else {
            fneg[g as usize] += 1;
            fp[p as usize] += 1;
        }
    }
    (0..256)
        .map(|c| ConfusionCounts {
            true_pos: tp[c],
            false_pos: fp[c],
            false_neg: fneg[c],
            true_neg: valid - tp[c] - fp[c] - fneg[c],
        })
        .collect()
}

/// Weight masses of one class: intersection, and the two halves of the
/// symmetric difference.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct WeightedConfusion {
    pub tp_w: f64,
    pub fp_w: f64,
    pub fn_w: f64,
}

impl WeightedConfusion {
    /// Intersection mass over union mass.
    pub fn wiou(&self) -> Option<f64> {
        let union = self.tp_w + self.fp_w + self.fn_w;
        (union > 0.0).then(|| self.tp_w / union)
    }
}

fn check_weights(gt: &LabelMap, wmap: &WeightMap) -> Result<()> {
    if (gt.width(), gt.height()) != (wmap.width(), wmap.height()) {
        return Err(Error::DimensionMismatch {
            left_w: gt.width(),
            left_h: gt.height(),
            right_w: wmap.width(),
            right_h: wmap.height(),
        });
    }
    Ok(())
}

/// Weighted masses for one class. Every pixel contributes the weight at its
/// own location, whichever side of the confusion it falls on.
pub fn weighted_confusion(
    gt: &LabelMap,
    pred: &LabelMap,
    wmap: &WeightMap,
    class: ClassId,
) -> Result<WeightedConfusion> {
    gt.same_shape(pred)?;
    check_weights(gt, wmap)?;
    let mut c = WeightedConfusion::default();
    let weights = wmap.weights();
    for (i, (&g, &p)) in gt.labels().iter().zip(pred.labels()).enumerate() {
        if gt.is_ignored_at(i) {
            continue;
        }
        let w = weights[i];
        match (g == class, p == class) {
            (true, true) => c.tp_w += w,
            (false, true) => c.fp_w += w,
            (true, false) => c.fn_w += w,
            (false, false) => {}
        }
    }
    Ok(c)
}

/// Same accumulation as [`weighted_confusion`] for all classes at once; the
/// per-class summation order is identical, so results are bit-equal.
pub(crate) fn weighted_confusion_all(
    gt: &LabelMap,
    pred: &LabelMap,
    wmap: &WeightMap,
) -> Vec<WeightedConfusion> {
    let mut out = vec![WeightedConfusion::default(); 256];
    let weights = wmap.weights();
    for (i, (&g, &p)) in gt.labels().iter().zip(pred.labels()).enumerate() {
        if gt.is_ignored_at(i) {
            continue;
        }
        let w = weights[i];
        if g == p {
            out[g as usize].tp_w += w;
        } else {
            out[g as usize].fn_w += w;
            out[p as usize].fp_w += w;
        }
    }
    out
}

/// Weighted IoU of one class: the weight mass of `{gt = c and pred = c}` over
/// the weight mass of `{gt = c or pred = c}`, with `wmap` built from `gt`.
pub fn wiou(gt: &LabelMap, pred: &LabelMap, wmap: &WeightMap, class: ClassId) -> Result<Option<f64>> {
    Ok(weighted_confusion(gt, pred, wmap, class)?.wiou())
}
