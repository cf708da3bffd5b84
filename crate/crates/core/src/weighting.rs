//! Per-pixel evaluation weights, `W(p) = exp(-alpha * D(p))`.

use crate::distance::DistanceField;
use crate::{png_io, Error, Result};

/// The boundary-importance sweep used by the benchmark.
pub const ALPHA_SWEEP: [f64; 5] = [0.01, 0.1, 1.0, 10.0, 100.0];

#[derive(Debug, Clone, PartialEq)]
pub struct WeightMap {
    width: usize,
    height: usize,
    alpha: f64,
    weights: Vec<f64>,
}

impl WeightMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Weights in `[exp(-alpha), 1]`; 0 on ignore pixels.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

pub fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

pub fn weight_map(field: &DistanceField, alpha: f64) -> Result<WeightMap> {
    check_alpha(alpha)?;
    let weights = field
        .values()
        .iter()
        .map(|&d| if d.is_nan() { 0.0 } else { (-alpha * d).exp() })
        .collect();
    Ok(WeightMap {
        width: field.width(),
        height: field.height(),
        alpha,
        weights,
    })
}

/// 8-bit grayscale rendering, `round(weight * 255)`.
pub fn export_weight_png(wmap: &WeightMap) -> Result<Vec<u8>> {
    let data: Vec<u8> = wmap
        .weights
        .iter()
        .map(|&w| (w * 255.0).round() as u8)
        .collect();
    png_io::encode_gray8(wmap.width, wmap.height, &data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(values: Vec<f64>) -> DistanceField {
        DistanceField::new(values.len(), 1, values).unwrap()
    }

    #[test]
    fn closed_form_values() {
        let w = weight_map(&field(vec![0.0, 1.0, 0.5]), 1.0).unwrap();
        assert_eq!(w.weights()[0], 1.0);
        assert!((w.weights()[1] - 0.367879441171).abs() < 1e-12);
        assert!((w.weights()[2] - (-0.5f64).exp()).abs() < 1e-15);
        for alpha in ALPHA_SWEEP {
            assert_eq!(weight_map(&field(vec![0.0]), alpha).unwrap().weights()[0], 1.0);
        }
    }

    #[test]
    fn invalid_alpha() {
        let f = field(vec![0.5]);
        for a in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(weight_map(&f, a), Err(Error::InvalidAlpha(_))));
        }
    }

    #[test]
    fn excluded_pixels_weigh_nothing() {
        let w = weight_map(&field(vec![DistanceField::EXCLUDED, 0.0]), 1.0).unwrap();
        assert_eq!(w.weights(), &[0.0, 1.0]);
        let png = export_weight_png(&w).unwrap();
        let (_, data) = png_io::decode_raw(&png);
        assert_eq!(data, vec![0, 255]);
    }

    #[test]
    fn uniform_one_is_white() {
        let w = weight_map(&field(vec![0.0; 6]), 3.0).unwrap();
        let (info, data) = png_io::decode_raw(&export_weight_png(&w).unwrap());
        assert_eq!(info.color_type, png::ColorType::Grayscale);
        assert!(data.iter().all(|&v| v == 255));
    }

    #[test]
    fn tiny_alpha_is_nearly_uniform() {
        let values: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        let w = weight_map(&field(values), 1e-6).unwrap();
        let min = w.weights().iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min >= 1.0 - 2e-6);
    }
}
