use serde::{Deserialize, Serialize};

use crate::label::{ClassId, LabelMap, Palette, PaletteEntry};
use crate::{Error, Result};

/// A horizontal band of the background, listed top to bottom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub class: ClassId,
    pub fraction: f64,
}

/// Object geometry relative to the object center. Sizes are in pixels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Shape {
    Rectangle { width: f64, height: f64 },
    Disk { radius: f64 },
    Ellipse { rx: f64, ry: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
    Union { parts: Vec<Part> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Part {
    pub offset: [f64; 2],
    pub shape: Shape,
}

impl Shape {
    /// Whether the point `(x, y)`, relative to the shape origin, is inside.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        match self {
            Shape::Rectangle { width, height } => {
                -width / 2.0 <= x && x < width / 2.0 && -height / 2.0 <= y && y < height / 2.0
            }
            Shape::Disk { radius } => x * x + y * y <= radius * radius,
            Shape::Ellipse { rx, ry } => (x / rx).powi(2) + (y / ry).powi(2) <= 1.0,
            Shape::Polygon { vertices } => {
                // even-odd rule
                let mut inside = false;
                let n = vertices.len();
                for i in 0..n {
                    let [xi, yi] = vertices[i];
                    let [xj, yj] = vertices[(i + n - 1) % n];
                    if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
                        inside = !inside;
                    }
                }
                inside
            }
            Shape::Union { parts } => parts
                .iter()
                .any(|p| p.shape.contains(x - p.offset[0], y - p.offset[1])),
        }
    }

    /// Bounding box `[x0, y0, x1, y1]` relative to the shape origin.
    pub fn bounds(&self) -> [f64; 4] {
        match self {
            Shape::Rectangle { width, height } => {
                [-width / 2.0, -height / 2.0, width / 2.0, height / 2.0]
            }
            Shape::Disk { radius } => [-radius, -radius, *radius, *radius],
            Shape::Ellipse { rx, ry } => [-rx, -ry, *rx, *ry],
            Shape::Polygon { vertices } => vertices.iter().fold(
                [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY],
                |b, v| [b[0].min(v[0]), b[1].min(v[1]), b[2].max(v[0]), b[3].max(v[1])],
            ),
            Shape::Union { parts } => parts.iter().fold(
                [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY],
                |b, p| {
                    let [x0, y0, x1, y1] = p.shape.bounds();
                    let [ox, oy] = p.offset;
                    [
                        b[0].min(x0 + ox),
                        b[1].min(y0 + oy),
                        b[2].max(x1 + ox),
                        b[3].max(y1 + oy),
                    ]
                },
            ),
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = |v: f64, what: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidScene(format!("{what} must be positive, got {v}")))
            }
        };
        match self {
            Shape::Rectangle { width, height } => {
                positive(*width, "rectangle width")?;
                positive(*height, "rectangle height")
            }
            Shape::Disk { radius } => positive(*radius, "disk radius"),
            Shape::Ellipse { rx, ry } => {
                positive(*rx, "ellipse rx")?;
                positive(*ry, "ellipse ry")
            }
            Shape::Polygon { vertices } => {
                if vertices.len() < 3 || vertices.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidScene(
                        "polygon needs at least 3 finite vertices".into(),
                    ));
                }
                Ok(())
            }
            Shape::Union { parts } => {
                if parts.is_empty() {
                    return Err(Error::InvalidScene("empty shape union".into()));
                }
                parts.iter().try_for_each(|p| p.shape.validate())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneObject {
    pub class: ClassId,
    pub center: [f64; 2],
    pub shape: Shape,
}

/// A synthetic scene: background bands with one object drawn on top.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub name: String,
    pub width: usize,
    pub height: usize,
    pub num_classes: u16,
    pub bands: Vec<Band>,
    pub object: SceneObject,
}

impl SceneSpec {
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidScene("dimensions must be positive".into()));
        }
        if self.num_classes == 0 || self.num_classes > 256 {
            return Err(Error::InvalidScene("class count must be in 1..=256".into()));
        }
        if self.bands.is_empty() {
            return Err(Error::InvalidScene("at least one band is required".into()));
        }
        let mut sum = 0.0;
        for b in &self.bands {
            if !(b.fraction.is_finite() && b.fraction > 0.0) {
                return Err(Error::InvalidScene(format!(
                    "band fraction must be positive, got {}",
                    b.fraction
                )));
            }
            if u16::from(b.class) >= self.num_classes {
                return Err(Error::InvalidScene(format!("band class {} out of range", b.class)));
            }
            sum += b.fraction;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidScene(format!("band fractions sum to {sum}, not 1")));
        }
        if u16::from(self.object.class) >= self.num_classes {
            return Err(Error::InvalidScene(format!(
                "object class {} out of range",
                self.object.class
            )));
        }
        self.object.shape.validate()?;
        let [x0, y0, x1, y1] = self.object.shape.bounds();
        let [cx, cy] = self.object.center;
        if cx + x0 < 0.0 || cy + y0 < 0.0 || cx + x1 > self.width as f64 || cy + y1 > self.height as f64
        {
            return Err(Error::InvalidScene(format!(
                "object of scene '{}' does not fit inside {}x{}",
                self.name, self.width, self.height
            )));
        }
        Ok(())
    }
}

/// Rasterizes a scene: bands first, then the object, sampling at pixel centers.
pub fn generate_scene(spec: &SceneSpec) -> Result<LabelMap> {
    spec.validate()?;
    let (w, h) = (spec.width, spec.height);
    let mut labels = vec![0 as ClassId; w * h];
    let mut cum = 0.0;
    let mut row0 = 0usize;
    for (k, band) in spec.bands.iter().enumerate() {
        cum += band.fraction;
        let row1 = if k + 1 == spec.bands.len() {
            h
        } else {
            ((cum * h as f64).round() as usize).min(h)
        };
        labels[row0 * w..row1 * w].fill(band.class);
        row0 = row1;
    }
    let obj = &spec.object;
    let [x0, y0, x1, y1] = obj.shape.bounds();
    let [cx, cy] = obj.center;
    let ys = ((cy + y0).floor().max(0.0) as usize)..((cy + y1).ceil() as usize).min(h);
    let xs = ((cx + x0).floor().max(0.0) as usize)..((cx + x1).ceil() as usize).min(w);
    for y in ys {
        for x in xs.clone() {
            if obj.shape.contains(x as f64 + 0.5 - cx, y as f64 + 0.5 - cy) {
                labels[y * w + x] = obj.class;
            }
        }
    }
    LabelMap::new(w, h, spec.num_classes, labels)
}

pub mod classes {
    use crate::label::ClassId;

    pub const UNLABELED: ClassId = 0;
    pub const ROAD: ClassId = 1;
    pub const SIDEWALK: ClassId = 2;
    pub const BUILDING: ClassId = 3;
    pub const VEGETATION: ClassId = 4;
    pub const TERRAIN: ClassId = 5;
    pub const SKY: ClassId = 6;
    pub const PERSON: ClassId = 7;
    pub const CAR: ClassId = 8;
    pub const COUNT: u16 = 9;
}

/// KITTI-style class colors for the synthetic scenes; class 0 is the ignore
/// label.
pub fn kitti_palette() -> Palette {
    use classes::*;
    let e = |id, name: &str, rgb, ignore| PaletteEntry {
        id,
        name: name.to_string(),
        rgb,
        ignore,
    };
    Palette::new(vec![
        e(UNLABELED, "unlabeled", [0, 0, 0], true),
        e(ROAD, "road", [128, 64, 128], false),
        e(SIDEWALK, "sidewalk", [244, 35, 232], false),
        e(BUILDING, "building", [70, 70, 70], false),
        e(VEGETATION, "vegetation", [107, 142, 35], false),
        e(TERRAIN, "terrain", [152, 251, 152], false),
        e(SKY, "sky", [70, 130, 180], false),
        e(PERSON, "person", [220, 20, 60], false),
        e(CAR, "car", [0, 0, 142], false),
    ])
    .expect("built-in palette is a bijection")
}

/// The three 256x256 street scenes: a car on the road, a pedestrian on the
/// sidewalk and a tree.
pub fn default_scenes() -> Vec<SceneSpec> {
    use classes::*;
    let band = |class, fraction| Band { class, fraction };
    let part = |dx, dy, shape| Part {
        offset: [dx, dy],
        shape,
    };
    vec![
        SceneSpec {
            name: "car".into(),
            width: 256,
            height: 256,
            num_classes: COUNT,
            bands: vec![
                band(SKY, 0.35),
                band(BUILDING, 0.2),
                band(SIDEWALK, 0.1),
                band(ROAD, 0.35),
            ],
            object: SceneObject {
                class: CAR,
                center: [128.0, 192.0],
                shape: Shape::Union {
                    parts: vec![
                        part(0.0, 6.0, Shape::Rectangle { width: 120.0, height: 36.0 }),
                        part(0.0, -10.0, Shape::Disk { radius: 30.0 }),
                    ],
                },
            },
        },
        SceneSpec {
            name: "person".into(),
            width: 256,
            height: 256,
            num_classes: COUNT,
            bands: vec![band(SKY, 0.3), band(VEGETATION, 0.25), band(SIDEWALK, 0.45)],
            object: SceneObject {
                class: PERSON,
                center: [128.0, 150.0],
                shape: Shape::Ellipse { rx: 22.0, ry: 60.0 },
            },
        },
        SceneSpec {
            name: "tree".into(),
            width: 256,
            height: 256,
            num_classes: COUNT,
            bands: vec![band(SKY, 0.4), band(TERRAIN, 0.25), band(ROAD, 0.35)],
            object: SceneObject {
                class: VEGETATION,
                center: [128.0, 128.0],
                shape: Shape::Union {
                    parts: vec![
                        part(0.0, -30.0, Shape::Disk { radius: 48.0 }),
                        part(0.0, 40.0, Shape::Rectangle { width: 20.0, height: 70.0 }),
                    ],
                },
            },
        },
    ]
}
