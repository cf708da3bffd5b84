//! Dense label maps and the operations that interrogate them.

mod boundary;
mod components;
mod image;
mod morphology;
mod palette;

pub use boundary::{extract_boundary, extract_boundary_with, BoundarySet};
pub use components::{connected_components, InstanceMap};
pub use image::{decode_label_image, encode_label_image};
pub use morphology::{morphological_op, MorphOp};
pub use palette::{Palette, PaletteEntry};

pub(crate) use morphology::nearest_other_label;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Class identifier stored per pixel.
pub type ClassId = u8;

/// Pixel adjacency used by connected components and boundary extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash, Serialize, Deserialize)]
pub enum Connectivity {
    #[default]
    #[serde(rename = "4")]
    Four,
    #[serde(rename = "8")]
    Eight,
}

impl Connectivity {
    pub(crate) fn offsets(self) -> &'static [(isize, isize)] {
        const FOUR: [(isize, isize); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];
        const EIGHT: [(isize, isize); 8] = [
            (-1, -1),
            (0, -1),
            (1, -1),
            (-1, 0),
            (1, 0),
            (-1, 1),
            (0, 1),
            (1, 1),
        ];
        match self {
            Connectivity::Four => &FOUR,
            Connectivity::Eight => &EIGHT,
        }
    }
}

impl std::str::FromStr for Connectivity {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "4" => Ok(Connectivity::Four),
            "8" => Ok(Connectivity::Eight),
            other => Err(format!("connectivity must be 4 or 8, got '{other}'")),
        }
    }
}

impl std::fmt::Display for Connectivity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Connectivity::Four => f.write_str("4"),
            Connectivity::Eight => f.write_str("8"),
        }
    }
}

/// A row-major grid of class ids, one per pixel.
///
/// Coordinates are `(x, y)` with `x` to the right and `y` down. Every stored id
/// is below `num_classes`. An optional ignore id marks pixels that take no part
/// in evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    num_classes: u16,
    labels: Vec<ClassId>,
    ignore: Option<ClassId>,
}

impl LabelMap {
    pub fn new(width: usize, height: usize, num_classes: u16, labels: Vec<ClassId>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidLabelMap(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        if num_classes == 0 || num_classes > 256 {
            return Err(Error::InvalidLabelMap(format!(
                "class count must be in 1..=256, got {num_classes}"
            )));
        }
        if labels.len() != width * height {
            return Err(Error::InvalidLabelMap(format!(
                "expected {} labels for {width}x{height}, got {}",
                width * height,
                labels.len()
            )));
        }
        if let Some(bad) = labels.iter().find(|&&l| u16::from(l) >= num_classes) {
            return Err(Error::InvalidLabelMap(format!(
                "class {bad} exceeds declared class count {num_classes}"
            )));
        }
        Ok(Self {
            width,
            height,
            num_classes,
            labels,
            ignore: None,
        })
    }

    pub fn filled(width: usize, height: usize, num_classes: u16, class: ClassId) -> Result<Self> {
        Self::new(width, height, num_classes, vec![class; width * height])
    }

    /// Declares `id` as the ignore label.
    pub fn with_ignore(mut self, id: ClassId) -> Result<Self> {
        if u16::from(id) >= self.num_classes {
            return Err(Error::InvalidLabelMap(format!(
                "ignore id {id} exceeds declared class count {}",
                self.num_classes
            )));
        }
        self.ignore = Some(id);
        Ok(self)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_classes(&self) -> u16 {
        self.num_classes
    }

    pub fn ignore_id(&self) -> Option<ClassId> {
        self.ignore
    }

    pub fn labels(&self) -> &[ClassId] {
        &self.labels
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> ClassId {
        self.labels[y * self.width + x]
    }

    /// Sets one pixel. Panics if `class` is outside the declared class range.
    pub fn set(&mut self, x: usize, y: usize, class: ClassId) {
        assert!(
            u16::from(class) < self.num_classes,
            "class {class} out of range"
        );
        let i = self.index(x, y);
        self.labels[i] = class;
    }

    #[inline]
    pub fn is_ignored_at(&self, i: usize) -> bool {
        self.ignore == Some(self.labels[i])
    }

    pub fn check_class(&self, class: ClassId) -> Result<()> {
        if u16::from(class) >= self.num_classes {
            return Err(Error::InvalidLabelMap(format!(
                "class {class} exceeds declared class count {}",
                self.num_classes
            )));
        }
        Ok(())
    }

    /// Sorted, de-duplicated classes that occur in the map, ignore id excluded.
    pub fn classes_present(&self) -> Vec<ClassId> {
        let mut seen = [false; 256];
        for &l in &self.labels {
            seen[l as usize] = true;
        }
        if let Some(ig) = self.ignore {
            seen[ig as usize] = false;
        }
        (0..=255u8).filter(|&c| seen[c as usize]).collect()
    }

    pub fn class_mask(&self, class: ClassId) -> Vec<bool> {
        self.labels.iter().map(|&l| l == class).collect()
    }

    pub fn count(&self, class: ClassId) -> usize {
        self.labels.iter().filter(|&&l| l == class).count()
    }

    pub fn same_shape(&self, other: &LabelMap) -> Result<()> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::DimensionMismatch {
                left_w: self.width,
                left_h: self.height,
                right_w: other.width,
                right_h: other.height,
            });
        }
        Ok(())
    }

    pub fn flip_horizontal(&self) -> LabelMap {
        let mut out = self.clone();
        for row in out.labels.chunks_mut(self.width) {
            row.reverse();
        }
        out
    }

    pub fn flip_vertical(&self) -> LabelMap {
        let mut out = self.clone();
        for (dst, src) in out
            .labels
            .chunks_mut(self.width)
            .zip(self.labels.chunks(self.width).rev())
        {
            dst.copy_from_slice(src);
        }
        out
    }

    /// In-image neighbors of `(x, y)` under the given offsets.
    #[inline]
    pub(crate) fn neighbors<'a>(
        &self,
        x: usize,
        y: usize,
        offsets: &'a [(isize, isize)],
    ) -> impl Iterator<Item = (usize, usize)> + 'a {
        let (w, h) = (self.width as isize, self.height as isize);
        let (x, y) = (x as isize, y as isize);
        offsets.iter().filter_map(move |&(dx, dy)| {
            let (nx, ny) = (x + dx, y + dy);
            (nx >= 0 && ny >= 0 && nx < w && ny < h).then_some((nx as usize, ny as usize))
        })
    }
}
