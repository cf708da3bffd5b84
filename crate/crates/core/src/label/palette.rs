use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::ClassId;
use crate::{Error, Result};

/// One class of a palette file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaletteEntry {
    pub id: ClassId,
    #[serde(default)]
    pub name: String,
    pub rgb: [u8; 3],
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub ignore: bool,
}

/// Bijective mapping between class ids and RGB colors.
///
/// Serialized as a JSON array of `{id, name, rgb: [r, g, b]}` objects; at most
/// one entry may carry `"ignore": true`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Palette {
    entries: Vec<PaletteEntry>,
    by_color: HashMap<[u8; 3], ClassId>,
    by_id: [Option<u16>; 256],
}

impl Palette {
    pub fn new(entries: Vec<PaletteEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidPalette("palette has no entries".into()));
        }
        if entries.len() > 256 {
            return Err(Error::InvalidPalette("more than 256 entries".into()));
        }
        let mut by_color = HashMap::with_capacity(entries.len());
        let mut by_id = [None; 256];
        let mut ignores = 0;
        for (pos, e) in entries.iter().enumerate() {
            if by_id[e.id as usize].replace(pos as u16).is_some() {
                return Err(Error::InvalidPalette(format!("duplicate class id {}", e.id)));
            }
            if let Some(other) = by_color.insert(e.rgb, e.id) {
                return Err(Error::InvalidPalette(format!(
                    "classes {other} and {} share color {:?}",
                    e.id, e.rgb
                )));
            }
            ignores += usize::from(e.ignore);
        }
        if ignores > 1 {
            return Err(Error::InvalidPalette("more than one ignore entry".into()));
        }
        Ok(Self {
            entries,
            by_color,
            by_id,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let entries: Vec<PaletteEntry> = serde_json::from_str(text)?;
        Self::new(entries)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.entries).expect("palette entries serialize")
    }

    pub fn entries(&self) -> &[PaletteEntry] {
        &self.entries
    }

    /// One past the largest class id; the class count of decoded maps.
    pub fn num_classes(&self) -> u16 {
        self.entries.iter().map(|e| u16::from(e.id) + 1).max().unwrap_or(0)
    }

    pub fn ignore_id(&self) -> Option<ClassId> {
        self.entries.iter().find(|e| e.ignore).map(|e| e.id)
    }

    pub fn class_of(&self, rgb: [u8; 3]) -> Option<ClassId> {
        self.by_color.get(&rgb).copied()
    }

    pub fn entry(&self, id: ClassId) -> Option<&PaletteEntry> {
        self.by_id[id as usize].map(|pos| &self.entries[pos as usize])
    }

    /// Position of `id` in the entry list, used as the PNG palette index.
    pub(crate) fn position(&self, id: ClassId) -> Option<u8> {
        self.by_id[id as usize].map(|p| p as u8)
    }

    pub fn color_of(&self, id: ClassId) -> Option<[u8; 3]> {
        self.entry(id).map(|e| e.rgb)
    }

    pub fn name_of(&self, id: ClassId) -> Option<&str> {
        self.entry(id).map(|e| e.name.as_str())
    }
}
