use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::scene::{generate_scene, SceneSpec};
use crate::distance::{exact_transform, NormKind};
use crate::label::{
    decode_label_image, encode_label_image, morphological_op, nearest_other_label, ClassId,
    LabelMap, MorphOp, Palette,
};
use crate::{Error, Result};

pub const DEFAULT_LEVELS: u32 = 5;
pub const DEFAULT_SEED: u64 = 2021;

/// Width of the jitter band on each side of the object contour, in pixels.
pub const JITTER_BAND: u32 = 2;
pub const JITTER_PROBABILITY: f64 = 0.3;

/// How a prediction was derived from the base prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Erode(u32),
    Base,
    Dilate(u32),
}

impl Variant {
    /// `erode levels..1`, `base`, `dilate 1..levels`.
    pub fn sequence(levels: u32) -> Vec<Variant> {
        (1..=levels)
            .rev()
            .map(Variant::Erode)
            .chain([Variant::Base])
            .chain((1..=levels).map(Variant::Dilate))
            .collect()
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Erode(l) => write!(f, "erode{l}"),
            Variant::Base => f.write_str("base"),
            Variant::Dilate(l) => write!(f, "dilate{l}"),
        }
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let level = |rest: &str| {
            rest.parse::<u32>()
                .ok()
                .filter(|&l| l > 0)
                .ok_or_else(|| Error::InvalidDataset(format!("bad variant tag '{s}'")))
        };
        if s == "base" {
            Ok(Variant::Base)
        } else if let Some(rest) = s.strip_prefix("erode") {
            level(rest).map(Variant::Erode)
        } else if let Some(rest) = s.strip_prefix("dilate") {
            level(rest).map(Variant::Dilate)
        } else {
            Err(Error::InvalidDataset(format!("bad variant tag '{s}'")))
        }
    }
}

impl Serialize for Variant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Variant {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetPair {
    pub scene: String,
    pub variant: Variant,
    pub gt: LabelMap,
    pub pred: LabelMap,
}

/// Flips pixels within [`JITTER_BAND`] pixels (chessboard distance) of the
/// object contour with probability [`JITTER_PROBABILITY`]. Object pixels take
/// the nearest other label, outside pixels become the object. Pixels are
/// visited in row-major order, one draw per band pixel.
pub fn jitter_boundary<R: Rng>(gt: &LabelMap, object: ClassId, rng: &mut R) -> LabelMap {
    let (w, h) = (gt.width(), gt.height());
    let inside = gt.class_mask(object);
    let outside: Vec<bool> = inside.iter().map(|&m| !m).collect();
    let (Some(d_in), Some(d_out)) = (
        exact_transform(&inside, w, h, NormKind::Linf),
        exact_transform(&outside, w, h, NormKind::Linf),
    ) else {
        return gt.clone();
    };
    let mut pred = gt.clone();
    for i in 0..w * h {
        let d = if inside[i] { d_in[i] } else { d_out[i] };
        if d > JITTER_BAND || gt.is_ignored_at(i) {
            continue;
        }
        if rng.random_bool(JITTER_PROBABILITY) {
            let (x, y) = (i % w, i / w);
            let label = if inside[i] {
                nearest_other_label(gt, x, y, object).expect("object does not fill the image")
            } else {
                object
            };
            pred.set(x, y, label);
        }
    }
    pred
}

/// Builds `len(specs) * (2 * levels + 1)` pairs in scene-major, variant-minor
/// order. One generator seeded with `seed` drives the jitter of all scenes.
pub fn generate_dataset(specs: &[SceneSpec], levels: u32, seed: u64) -> Result<Vec<DatasetPair>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(specs.len() * (2 * levels as usize + 1));
    for spec in specs {
        let gt = generate_scene(spec)?;
        let object = spec.object.class;
        let base = jitter_boundary(&gt, object, &mut rng);
        for variant in Variant::sequence(levels) {
            let pred = match variant {
                Variant::Erode(l) => morphological_op(&base, object, MorphOp::Erode, l),
                Variant::Base => base.clone(),
                Variant::Dilate(l) => morphological_op(&base, object, MorphOp::Dilate, l),
            };
            pairs.push(DatasetPair {
                scene: spec.name.clone(),
                variant,
                gt: gt.clone(),
                pred,
            });
        }
    }
    Ok(pairs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestPair {
    pub scene: String,
    pub variant: Variant,
    pub gt: String,
    pub pred: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub levels: u32,
    pub palette: String,
    pub scenes: Vec<SceneSpec>,
    pub pairs: Vec<ManifestPair>,
}

pub const MANIFEST_FILE: &str = "manifest.json";
pub const PALETTE_FILE: &str = "palette.json";

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

/// Writes `scene##/variant##/{gt.png,pred.png}`, `palette.json` and
/// `manifest.json` under `dir`. Directory and file numbering starts at 01.
pub fn write_dataset(
    dir: &Path,
    specs: &[SceneSpec],
    pairs: &[DatasetPair],
    palette: &Palette,
    levels: u32,
    seed: u64,
) -> Result<Manifest> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_file(&dir.join(PALETTE_FILE), palette.to_json().as_bytes())?;
    let mut entries = Vec::with_capacity(pairs.len());
    for spec in specs {
        let scene_idx = specs.iter().position(|s| s.name == spec.name).unwrap() + 1;
        let scene_pairs = pairs.iter().filter(|p| p.scene == spec.name);
        for (v, pair) in scene_pairs.enumerate() {
            let rel = format!("scene{scene_idx:02}/variant{:02}", v + 1);
            let sub = dir.join(&rel);
            fs::create_dir_all(&sub).map_err(|e| Error::io(&sub, e))?;
            write_file(&sub.join("gt.png"), &encode_label_image(&pair.gt, palette)?)?;
            write_file(&sub.join("pred.png"), &encode_label_image(&pair.pred, palette)?)?;
            entries.push(ManifestPair {
                scene: pair.scene.clone(),
                variant: pair.variant,
                gt: format!("{rel}/gt.png"),
                pred: format!("{rel}/pred.png"),
            });
        }
    }
    if entries.len() != pairs.len() {
        return Err(Error::InvalidDataset(
            "pairs reference scenes missing from the spec list".into(),
        ));
    }
    let manifest = Manifest {
        seed,
        levels,
        palette: PALETTE_FILE.into(),
        scenes: specs.to_vec(),
        pairs: entries,
    };
    let mut json = serde_json::to_string_pretty(&manifest)?;
    json.push('\n');
    write_file(&dir.join(MANIFEST_FILE), json.as_bytes())?;
    Ok(manifest)
}

/// A dataset read back from disk.
#[derive(Debug, Clone)]
pub struct LoadedDataset {
    pub manifest: Manifest,
    pub palette: Palette,
    pub pairs: Vec<DatasetPair>,
}

pub fn read_dataset(dir: &Path) -> Result<LoadedDataset> {
    let text = read_file(&dir.join(MANIFEST_FILE))?;
    let manifest: Manifest = serde_json::from_slice(&text)
        .map_err(|e| Error::InvalidDataset(format!("{}: {e}", dir.join(MANIFEST_FILE).display())))?;
    let palette_bytes = read_file(&dir.join(&manifest.palette))?;
    let palette = Palette::from_json(&String::from_utf8_lossy(&palette_bytes))?;
    let mut pairs = Vec::with_capacity(manifest.pairs.len());
    for entry in &manifest.pairs {
        let load = |rel: &str| -> Result<LabelMap> {
            let path = dir.join(rel);
            decode_label_image(&read_file(&path)?, &palette)
                .map_err(|e| Error::InvalidDataset(format!("{}: {e}", path.display())))
        };
        let gt = load(&entry.gt)?;
        let pred = load(&entry.pred)?;
        gt.same_shape(&pred)?;
        pairs.push(DatasetPair {
            scene: entry.scene.clone(),
            variant: entry.variant,
            gt,
            pred,
        });
    }
    if pairs.is_empty() {
        return Err(Error::InvalidDataset(format!("{}: no pairs", dir.display())));
    }
    Ok(LoadedDataset {
        manifest,
        palette,
        pairs,
    })
}
