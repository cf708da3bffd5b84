use super::{ClassId, LabelMap};

/// Binary morphology applied to one class of a label map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MorphOp {
    Erode,
    Dilate,
}

const SQUARE: [(isize, isize); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

fn step(map: &LabelMap, mask: &[bool], op: MorphOp) -> Vec<bool> {
    let w = map.width();
    let mut out = mask.to_vec();
    for y in 0..map.height() {
        for x in 0..w {
            let i = y * w + x;
            match op {
                MorphOp::Erode if mask[i] => {
                    out[i] = map.neighbors(x, y, &SQUARE).all(|(nx, ny)| mask[ny * w + nx]);
                }
                MorphOp::Dilate if !mask[i] => {
                    out[i] = map.neighbors(x, y, &SQUARE).any(|(nx, ny)| mask[ny * w + nx]);
                }
                _ => {}
            }
        }
    }
    out
}

/// Label of the nearest pixel (squared Euclidean distance) whose label differs
/// from `class`; ties go to the smallest label. `None` if every pixel is `class`.
pub(crate) fn nearest_other_label(
    map: &LabelMap,
    x: usize,
    y: usize,
    class: ClassId,
) -> Option<ClassId> {
    let (w, h) = (map.width() as isize, map.height() as isize);
    let (x, y) = (x as isize, y as isize);
    let max_r = w.max(h);
    let mut best: Option<(isize, ClassId)> = None;
    for r in 1..=max_r {
        if let Some((d2, _)) = best {
            if r * r > d2 {
                break;
            }
        }
        // ring of Chebyshev radius r
        for dy in -r..=r {
            let ny = y + dy;
            if ny < 0 || ny >= h {
                continue;
            }
            let step = if dy.abs() == r { 1 } else { 2 * r };
            let mut dx = -r;
            while dx <= r {
                let nx = x + dx;
                if nx >= 0 && nx < w {
                    let l = map.get(nx as usize, ny as usize);
                    if l != class {
                        let cand = (dx * dx + dy * dy, l);
                        if best.is_none_or(|b| cand < b) {
                            best = Some(cand);
                        }
                    }
                }
                dx += step;
            }
        }
    }
    best.map(|(_, l)| l)
}

/// Applies `level` iterations of erosion or dilation with a 3x3 square to the
/// mask of `class`.
///
/// Dilated-into pixels become `class`. Pixels removed by erosion take the label
/// of the nearest pixel of another class in the input map (ties to the smallest
/// class id). Out-of-image pixels neither erode nor dilate the mask. `level == 0`
/// returns the input unchanged.
pub fn morphological_op(map: &LabelMap, class: ClassId, op: MorphOp, level: u32) -> LabelMap {
    let mut mask = map.class_mask(class);
    for _ in 0..level {
        mask = step(map, &mask, op);
    }
    let mut out = map.clone();
    let w = map.width();
    for (i, &m) in mask.iter().enumerate() {
        let (x, y) = (i % w, i / w);
        let before = map.labels()[i] == class;
        if m && !before {
            out.set(x, y, class);
        } else if !m && before {
            // erosion only removes pixels next to another class, so one exists
            let fill = nearest_other_label(map, x, y, class).expect("eroded pixel has a neighbor class");
            out.set(x, y, fill);
        }
    }
    out
}
