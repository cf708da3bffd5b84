use std::fmt;

use serde::{Deserialize, Serialize};

use super::scene::{generate_scene, SceneSpec};
use crate::distance::{distance_map, NormKind};
use crate::label::{ClassId, LabelMap};
use crate::{Error, Result};

pub const DEFAULT_ERROR_COUNT: usize = 200;

/// Where the mislabeled pixels of a triplet member sit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Placement {
    /// Spread along the object contour, on both sides.
    Boundary,
    /// One blob deep inside the object, one deep inside the neighbor class.
    Interior,
    /// Misses along the contour plus a detached false-positive blob.
    Split,
}

impl Placement {
    pub const ALL: [Placement; 3] = [Placement::Boundary, Placement::Interior, Placement::Split];
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Placement::Boundary => "boundary",
            Placement::Interior => "interior",
            Placement::Split => "split",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Triplet {
    pub gt: LabelMap,
    pub object: ClassId,
    /// The class exchanging pixels with the object.
    pub partner: ClassId,
    pub members: [(Placement, LabelMap); 3],
}

/// Three predictions of the scene's ground truth, each with exactly
/// `error_count` mislabeled pixels.
///
/// The object loses `ceil(n/2)` pixels to its most common neighbor class and
/// takes `floor(n/2)` pixels from it, so every class has the same false
/// positive and false negative counts in all three members; only the location
/// of the errors differs.
pub fn generate_equal_error_triplet(spec: &SceneSpec, error_count: usize) -> Result<Triplet> {
    let gt = generate_scene(spec)?;
    let object = spec.object.class;
    let infeasible = |reason: String| Error::InfeasibleErrorCount {
        requested: error_count,
        reason,
    };
    if error_count == 0 {
        return Err(infeasible("at least one error pixel is required".into()));
    }
    let partner = partner_class(&gt, object)
        .ok_or_else(|| infeasible("object has no neighboring class".into()))?;
    let n_miss = error_count.div_ceil(2);
    let n_extra = error_count / 2;

    let w = gt.width();
    let d_obj = distance_map(&gt, object, NormKind::L2)?;
    let d_par = distance_map(&gt, partner, NormKind::L2)?;
    let labels = gt.labels();

    let inner: Vec<usize> = (0..labels.len())
        .filter(|&i| labels[i] == object && d_obj.raw_values()[i] == 1)
        .collect();
    let outer: Vec<usize> = (0..labels.len())
        .filter(|&i| {
            labels[i] == partner
                && gt
                    .neighbors(i % w, i / w, crate::Connectivity::Four.offsets())
                    .any(|(x, y)| gt.get(x, y) == object)
        })
        .collect();
    let inner_pick = spread(&inner, n_miss)
        .ok_or_else(|| infeasible(format!("object contour has only {} pixels", inner.len())))?;
    let outer_pick = spread(&outer, n_extra)
        .ok_or_else(|| infeasible(format!("outer contour has only {} pixels", outer.len())))?;
    let miss_blob = deep_blob(&gt, d_obj.raw_values(), object, n_miss)
        .ok_or_else(|| infeasible("object interior too small for a compact blob".into()))?;
    let extra_blob = deep_blob(&gt, d_par.raw_values(), partner, n_extra)
        .ok_or_else(|| infeasible("neighbor interior too small for a compact blob".into()))?;

    let build = |miss: &[usize], extra: &[usize]| {
        let mut pred = gt.clone();
        for &i in miss {
            pred.set(i % w, i / w, partner);
        }
        for &i in extra {
            pred.set(i % w, i / w, object);
        }
        pred
    };
    Ok(Triplet {
        members: [
            (Placement::Boundary, build(&inner_pick, &outer_pick)),
            (Placement::Interior, build(&miss_blob, &extra_blob)),
            (Placement::Split, build(&inner_pick, &extra_blob)),
        ],
        gt,
        object,
        partner,
    })
}

/// Most frequent class among the 4-neighbors of the object, ties to the
/// smallest id.
fn partner_class(gt: &LabelMap, object: ClassId) -> Option<ClassId> {
    let mut counts = [0usize; 256];
    let w = gt.width();
    for (i, &l) in gt.labels().iter().enumerate() {
        if l != object {
            continue;
        }
        for (x, y) in gt.neighbors(i % w, i / w, crate::Connectivity::Four.offsets()) {
            let n = gt.get(x, y);
            if n != object && gt.ignore_id() != Some(n) {
                counts[n as usize] += 1;
            }
        }
    }
    let (best, &n) = counts.iter().enumerate().rev().max_by_key(|(_, &c)| c)?;
    (n > 0).then_some(best as ClassId)
}

/// `n` items evenly spaced through `items`.
fn spread(items: &[usize], n: usize) -> Option<Vec<usize>> {
    (n <= items.len()).then(|| (0..n).map(|k| items[k * items.len() / n]).collect())
}

/// The `n` pixels of `class` closest to its deepest pixel, all of them at
/// least two pixels away from any other label.
fn deep_blob(gt: &LabelMap, d2: &[u32], class: ClassId, n: usize) -> Option<Vec<usize>> {
    if n == 0 {
        return Some(Vec::new());
    }
    let w = gt.width();
    let labels = gt.labels();
    let center = (0..labels.len())
        .filter(|&i| labels[i] == class)
        .max_by_key(|&i| (d2[i], std::cmp::Reverse(i)))?;
    let (cx, cy) = ((center % w) as i64, (center / w) as i64);
    let mut cands: Vec<(i64, usize)> = (0..labels.len())
        .filter(|&i| labels[i] == class)
        .map(|i| {
            let (dx, dy) = ((i % w) as i64 - cx, (i / w) as i64 - cy);
            (dx * dx + dy * dy, i)
        })
        .collect();
    if cands.len() < n {
        return None;
    }
    cands.select_nth_unstable(n - 1);
    let mut blob: Vec<usize> = cands[..n].iter().map(|&(_, i)| i).collect();
    blob.sort_unstable();
    blob.iter().all(|&i| d2[i] >= 4).then_some(blob)
}

#[cfg(test)]
mod tests {
    use super::super::scene::default_scenes;
    use super::*;
    use crate::metrics::confusion;

    #[test]
    fn members_have_identical_counts() {
        for spec in default_scenes() {
            let t = generate_equal_error_triplet(&spec, 101).unwrap();
            for class in [t.object, t.partner] {
                let counts: Vec<_> = t
                    .members
                    .iter()
                    .map(|(_, p)| confusion(&t.gt, p, class).unwrap())
                    .collect();
                assert!(counts.windows(2).all(|c| c[0] == c[1]), "{counts:?}");
            }
            for (_, pred) in &t.members {
                let wrong = t.gt.labels().iter().zip(pred.labels()).filter(|(a, b)| a != b).count();
                assert_eq!(wrong, 101);
            }
        }
    }

    #[test]
    fn placements_differ() {
        let t = generate_equal_error_triplet(&default_scenes()[0], 40).unwrap();
        let [a, b, c] = &t.members;
        assert_ne!(a.1, b.1);
        assert_ne!(a.1, c.1);
        assert_ne!(b.1, c.1);
    }

    #[test]
    fn infeasible_counts() {
        let spec = &default_scenes()[1];
        assert!(matches!(
            generate_equal_error_triplet(spec, 0),
            Err(Error::InfeasibleErrorCount { .. })
        ));
        assert!(matches!(
            generate_equal_error_triplet(spec, 100_000),
            Err(Error::InfeasibleErrorCount { .. })
        ));
    }

    #[test]
    fn spread_is_even() {
        assert_eq!(spread(&[0, 1, 2, 3, 4, 5], 3).unwrap(), vec![0, 2, 4]);
        assert!(spread(&[1], 2).is_none());
    }
}
