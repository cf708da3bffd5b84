use super::{LabelMap, Palette};
use crate::png_io;
use crate::{Error, Result};

/// Decodes an RGB or indexed PNG into a label map by looking up every pixel
/// color in `palette`. Pixels with the palette's ignore color receive the
/// ignore id.
pub fn decode_label_image(image_bytes: &[u8], palette: &Palette) -> Result<LabelMap> {
    let raster = png_io::decode_rgb(image_bytes)?;
    let mut labels = Vec::with_capacity(raster.width * raster.height);
    // consecutive pixels usually share a color
    let mut last: Option<([u8; 3], u8)> = None;
    for (i, px) in raster.rgb.chunks_exact(3).enumerate() {
        let rgb = [px[0], px[1], px[2]];
        let class = match last {
            Some((c, id)) if c == rgb => id,
            _ => {
                let id = palette.class_of(rgb).ok_or(Error::UnknownColor {
                    x: i % raster.width,
                    y: i / raster.width,
                    rgb,
                })?;
                last = Some((rgb, id));
                id
            }
        };
        labels.push(class);
    }
    let map = LabelMap::new(raster.width, raster.height, palette.num_classes(), labels)?;
    match palette.ignore_id() {
        Some(id) => map.with_ignore(id),
        None => Ok(map),
    }
}

/// Encodes a label map as an 8-bit indexed PNG whose palette holds the class
/// colors in palette-entry order.
pub fn encode_label_image(map: &LabelMap, palette: &Palette) -> Result<Vec<u8>> {
    let mut lut = [None; 256];
    for c in map.classes_present().into_iter().chain(map.ignore_id()) {
        lut[c as usize] = Some(palette.position(c).ok_or(Error::MissingPaletteEntry(c))?);
    }
    let indices: Vec<u8> = map
        .labels()
        .iter()
        .map(|&l| lut[l as usize].ok_or(Error::MissingPaletteEntry(l)))
        .collect::<Result<_>>()?;
    let plte: Vec<u8> = palette.entries().iter().flat_map(|e| e.rgb).collect();
    png_io::encode_indexed(map.width(), map.height(), plte, &indices)
}
