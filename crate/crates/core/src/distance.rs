//! Exact boundary-distance fields.
//!
//! For a class `c`, every pixel of `c` gets the distance to the nearest pixel of
//! another label (the background of `c`); background pixels get 0. Distances are
//! exact for the L1, L2 and L-infinity norms. The transform is separable: a
//! column pass computes the vertical distance to the nearest background pixel,
//! and a row pass takes the lower envelope of the per-column distance functions,
//! so the cost is linear in the pixel count for every norm. L2 distances are
//! kept as exact integer squares until normalization.
//!
//! Raw distances are then divided by the maximum of their connected instance,
//! giving values in `[0, 1]`, and the per-class fields are merged into a single
//! scene-wide field following the ground-truth labels.

use serde::{Deserialize, Serialize};

use crate::label::{connected_components, ClassId, Connectivity, InstanceMap, LabelMap};
use crate::{png_io, Error, Result};

/// The rho of the rho-norm used for pixel distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    /// Manhattan distance.
    L1,
    /// Euclidean distance.
    #[default]
    L2,
    /// Chessboard distance.
    Linf,
}

impl std::str::FromStr for NormKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "l1" | "1" => Ok(NormKind::L1),
            "l2" | "2" => Ok(NormKind::L2),
            "linf" | "inf" => Ok(NormKind::Linf),
            other => Err(format!("norm must be one of l1, l2, linf; got '{other}'")),
        }
    }
}

impl std::fmt::Display for NormKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NormKind::L1 => "l1",
            NormKind::L2 => "l2",
            NormKind::Linf => "linf",
        })
    }
}

/// How raw distances are mapped into `[0, 1]` within an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// `d / max`: boundary pixels get `1 / max`.
    #[default]
    Max,
    /// `(d - 1) / (max - 1)`: boundary pixels get exactly 0. A one-pixel-deep
    /// instance maps to 0.
    Shifted,
}

/// Row-pass metric: `f(x, i)` is the distance from column `x` to the nearest
/// background pixel in column `i` given that column's vertical distance `g`;
/// `sep(i, u)` is the first column at which `u` is at least as good as `i`,
/// minus one.
trait RowMetric {
    fn f(x: i64, i: i64, g: i64) -> i64;
    fn sep(i: i64, u: i64, gi: i64, gu: i64) -> i64;
}

const NEG_INF: i64 = i64::MIN / 4;
const POS_INF: i64 = i64::MAX / 4;

struct Euclid;
struct Manhattan;
struct Chessboard;

impl RowMetric for Euclid {
    #[inline(always)]
    fn f(x: i64, i: i64, g: i64) -> i64 {
        (x - i) * (x - i) + g * g
    }

    #[inline(always)]
    fn sep(i: i64, u: i64, gi: i64, gu: i64) -> i64 {
        (u * u - i * i + gu * gu - gi * gi).div_euclid(2 * (u - i))
    }
}

impl RowMetric for Manhattan {
    #[inline(always)]
    fn f(x: i64, i: i64, g: i64) -> i64 {
        (x - i).abs() + g
    }

    #[inline(always)]
    fn sep(i: i64, u: i64, gi: i64, gu: i64) -> i64 {
        if gu >= gi + u - i {
            POS_INF
        } else if gi > gu + u - i {
            NEG_INF
        } else {
            (gu - gi + u + i).div_euclid(2)
        }
    }
}

impl RowMetric for Chessboard {
    #[inline(always)]
    fn f(x: i64, i: i64, g: i64) -> i64 {
        (x - i).abs().max(g)
    }

    #[inline(always)]
    fn sep(i: i64, u: i64, gi: i64, gu: i64) -> i64 {
        let mid = (i + u).div_euclid(2);
        if gi <= gu {
            (i + gu).max(mid)
        } else {
            (u - gi).min(mid)
        }
    }
}

fn row_pass<M: RowMetric>(g: &[u32], out: &mut [u32], s: &mut [usize], t: &mut [i64]) {
    let m = g.len();
    let gv = |i: usize| i64::from(g[i]);
    let mut q: isize = 0;
    s[0] = 0;
    t[0] = 0;
    for u in 1..m {
        while q >= 0 {
            let (sq, tq) = (s[q as usize], t[q as usize]);
            if M::f(tq, sq as i64, gv(sq)) > M::f(tq, u as i64, gv(u)) {
                q -= 1;
            } else {
                break;
            }
        }
        if q < 0 {
            q = 0;
            s[0] = u;
        } else {
            let sq = s[q as usize];
            let w = 1 + M::sep(sq as i64, u as i64, gv(sq), gv(u));
            if w < m as i64 {
                q += 1;
                s[q as usize] = u;
                t[q as usize] = w;
            }
        }
    }
    for u in (0..m).rev() {
        let sq = s[q as usize];
        out[u] = M::f(u as i64, sq as i64, gv(sq)) as u32;
        if u as i64 == t[q as usize] {
            q -= 1;
        }
    }
}

fn transform_by<F: Fn(usize) -> bool>(
    is_foreground: F,
    width: usize,
    height: usize,
    norm: NormKind,
) -> Option<Vec<u32>> {
    let n = width * height;
    // larger than any in-image distance
    let inf = (width + height) as u32;

    // column pass, swept row by row so memory access stays sequential
    let mut g = vec![0u32; n];
    let mut any_background = false;
    for (x, v) in g[..width].iter_mut().enumerate() {
        *v = if is_foreground(x) { inf } else { 0 };
    }
    for y in 1..height {
        let (prev, cur) = g.split_at_mut(y * width);
        let prev = &prev[(y - 1) * width..];
        for x in 0..width {
            cur[x] = if is_foreground(y * width + x) {
                (prev[x] + 1).min(inf)
            } else {
                0
            };
        }
    }
    for y in (0..height.saturating_sub(1)).rev() {
        let (cur, next) = g.split_at_mut((y + 1) * width);
        let cur = &mut cur[y * width..];
        for x in 0..width {
            let below = next[x] + 1;
            if below < cur[x] {
                cur[x] = below;
            }
        }
    }
    for v in &g[..width] {
        any_background |= *v < inf;
    }
    if !any_background {
        return None;
    }

    let mut out = vec![0u32; n];
    let mut s = vec![0usize; width];
    let mut t = vec![0i64; width];
    for (grow, orow) in g.chunks_exact(width).zip(out.chunks_exact_mut(width)) {
        match norm {
            NormKind::L1 => row_pass::<Manhattan>(grow, orow, &mut s, &mut t),
            NormKind::L2 => row_pass::<Euclid>(grow, orow, &mut s, &mut t),
            NormKind::Linf => row_pass::<Chessboard>(grow, orow, &mut s, &mut t),
        }
    }
    Some(out)
}

/// Exact distance from every foreground pixel to the nearest background pixel.
///
/// Returns plain integer distances for L1 and L-infinity and *squared*
/// distances for L2. Background pixels get 0. `None` when there is no
/// background pixel at all.
pub fn exact_transform(
    foreground: &[bool],
    width: usize,
    height: usize,
    norm: NormKind,
) -> Option<Vec<u32>> {
    assert_eq!(foreground.len(), width * height, "mask size mismatch");
    transform_by(|i| foreground[i], width, height, norm)
}

/// Distance of each pixel of one class to the nearest pixel of any other label.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDistanceMap {
    width: usize,
    height: usize,
    class: ClassId,
    norm: NormKind,
    // distance for L1/Linf, squared distance for L2; all zero when degenerate
    values: Vec<u32>,
    degenerate: bool,
}

impl RawDistanceMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn class(&self) -> ClassId {
        self.class
    }

    pub fn norm(&self) -> NormKind {
        self.norm
    }

    /// True when the class covers the whole image and has no background.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Integer form of the distances: squared for L2, plain otherwise.
    pub fn raw_values(&self) -> &[u32] {
        &self.values
    }

    #[inline]
    pub fn distance(&self, i: usize) -> f64 {
        match self.norm {
            NormKind::L2 => f64::from(self.values[i]).sqrt(),
            _ => f64::from(self.values[i]),
        }
    }

    pub fn distances(&self) -> Vec<f64> {
        (0..self.values.len()).map(|i| self.distance(i)).collect()
    }
}

pub fn distance_map(map: &LabelMap, class: ClassId, norm: NormKind) -> Result<RawDistanceMap> {
    map.check_class(class)?;
    let labels = map.labels();
    let (w, h) = (map.width(), map.height());
    let (values, degenerate) = match transform_by(|i| labels[i] == class, w, h, norm) {
        Some(v) => (v, false),
        None => (vec![0; w * h], true),
    };
    Ok(RawDistanceMap {
        width: w,
        height: h,
        class,
        norm,
        values,
        degenerate,
    })
}

/// Normalized distances in `[0, 1]`, or [`DistanceField::EXCLUDED`] for pixels
/// that take no part in evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceField {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl DistanceField {
    /// Sentinel stored for ignore pixels.
    pub const EXCLUDED: f64 = f64::NAN;

    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != width * height {
            return Err(Error::InvalidLabelMap(format!(
                "distance field needs {} values, got {}",
                width * height,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_nan() && !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidLabelMap(format!(
                "distance value {v} outside [0, 1]"
            )));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn is_excluded(&self, i: usize) -> bool {
        self.values[i].is_nan()
    }
}

pub fn normalize_per_instance(raw: &RawDistanceMap, instances: &InstanceMap) -> DistanceField {
    normalize_per_instance_with(raw, instances, Normalization::Max)
}

/// Divides the raw distances of every instance by that instance's maximum.
///
/// Pixels outside the class stay 0. A degenerate map (the class fills the
/// image) yields 1 on every class pixel.
pub fn normalize_per_instance_with(
    raw: &RawDistanceMap,
    instances: &InstanceMap,
    mode: Normalization,
) -> DistanceField {
    assert_eq!(
        (raw.width, raw.height),
        (instances.width(), instances.height()),
        "instance map and distance map differ in size"
    );
    let ids = instances.ids();
    let mut values = vec![0.0; ids.len()];
    if raw.degenerate {
        for (v, &id) in values.iter_mut().zip(ids) {
            if id != 0 {
                *v = 1.0;
            }
        }
        return DistanceField {
            width: raw.width,
            height: raw.height,
            values,
        };
    }

    let mut max = vec![0u32; instances.count() as usize + 1];
    for (&id, &d) in ids.iter().zip(&raw.values) {
        debug_assert!(id == 0 || d > 0, "instance pixel with zero distance");
        if id != 0 && d > max[id as usize] {
            max[id as usize] = d;
        }
    }

    for (i, (v, &id)) in values.iter_mut().zip(ids).enumerate() {
        if id == 0 {
            continue;
        }
        let (d, m) = (raw.values[i], max[id as usize]);
        *v = match (mode, raw.norm) {
            (Normalization::Max, NormKind::L2) => (f64::from(d) / f64::from(m)).sqrt(),
            (Normalization::Max, _) => f64::from(d) / f64::from(m),
            (Normalization::Shifted, norm) => {
                let (d, m) = match norm {
                    NormKind::L2 => (f64::from(d).sqrt(), f64::from(m).sqrt()),
                    _ => (f64::from(d), f64::from(m)),
                };
                if m > 1.0 {
                    (d - 1.0) / (m - 1.0)
                } else {
                    0.0
                }
            }
        };
    }
    DistanceField {
        width: raw.width,
        height: raw.height,
        values,
    }
}

/// Merges per-class fields into one: each pixel takes the value of the field
/// belonging to its label in `map`. Ignore pixels become
/// [`DistanceField::EXCLUDED`].
pub fn combine_fields(fields: &[(ClassId, DistanceField)], map: &LabelMap) -> Result<DistanceField> {
    let mut lut: [Option<usize>; 256] = [None; 256];
    for (k, (class, field)) in fields.iter().enumerate() {
        if (field.width, field.height) != (map.width(), map.height()) {
            return Err(Error::DimensionMismatch {
                left_w: map.width(),
                left_h: map.height(),
                right_w: field.width,
                right_h: field.height,
            });
        }
        lut[*class as usize] = Some(k);
    }
    let mut values = Vec::with_capacity(map.len());
    for (i, &l) in map.labels().iter().enumerate() {
        if map.is_ignored_at(i) {
            values.push(DistanceField::EXCLUDED);
            continue;
        }
        match lut[l as usize] {
            Some(k) => values.push(fields[k].1.values[i]),
            None => {
                return Err(Error::UncoveredPixel {
                    x: i % map.width(),
                    y: i / map.width(),
                    class: l,
                })
            }
        }
    }
    Ok(DistanceField {
        width: map.width(),
        height: map.height(),
        values,
    })
}

/// Settings for building a scene-wide distance field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DistanceOptions {
    pub norm: NormKind,
    pub connectivity: Connectivity,
    pub normalization: Normalization,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneDistance {
    pub field: DistanceField,
    /// Classes that cover the whole image and were given the constant field 1.
    pub degenerate_classes: Vec<ClassId>,
}

/// Distance transform, per-instance normalization and merging for every class
/// present in `gt`.
pub fn scene_distance_field(gt: &LabelMap, opts: &DistanceOptions) -> Result<SceneDistance> {
    let mut fields = Vec::new();
    let mut degenerate_classes = Vec::new();
    for class in gt.classes_present() {
        let raw = distance_map(gt, class, opts.norm)?;
        if raw.is_degenerate() {
            degenerate_classes.push(class);
        }
        let inst = connected_components(gt, class, opts.connectivity);
        fields.push((class, normalize_per_instance_with(&raw, &inst, opts.normalization)));
    }
    let field = combine_fields(&fields, gt)?;
    Ok(SceneDistance {
        field,
        degenerate_classes,
    })
}

/// 16-bit grayscale rendering, `round(value * 65535)`; excluded pixels are 0.
pub fn export_distance_png(field: &DistanceField) -> Result<Vec<u8>> {
    let data: Vec<u16> = field
        .values
        .iter()
        .map(|&v| if v.is_nan() { 0 } else { (v * 65535.0).round() as u16 })
        .collect();
    png_io::encode_gray16(field.width, field.height, &data)
}
