#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wiou::distance::NormKind;
use wiou::label::BoundarySet;
use wiou::LabelMap;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random map built from a few random rectangles over a random base, so it has
/// both large regions and thin structures.
pub fn random_map(rng: &mut ChaCha8Rng, w: usize, h: usize, classes: u8) -> LabelMap {
    let mut labels = vec![rng.random_range(0..classes); w * h];
    let rects = rng.random_range(1..8);
    for _ in 0..rects {
        let c = rng.random_range(0..classes);
        let x0 = rng.random_range(0..w);
        let y0 = rng.random_range(0..h);
        let x1 = rng.random_range(x0..w) + 1;
        let y1 = rng.random_range(y0..h) + 1;
        for y in y0..y1 {
            for x in x0..x1 {
                labels[y * w + x] = c;
            }
        }
    }
    // salt noise
    let noise = rng.random_range(0..(w * h / 8).max(1));
    for _ in 0..noise {
        let i = rng.random_range(0..w * h);
        labels[i] = rng.random_range(0..classes);
    }
    LabelMap::new(w, h, u16::from(classes), labels).unwrap()
}

/// Uniformly random labels.
pub fn noise_map(rng: &mut ChaCha8Rng, w: usize, h: usize, classes: u8) -> LabelMap {
    let labels = (0..w * h).map(|_| rng.random_range(0..classes)).collect();
    LabelMap::new(w, h, u16::from(classes), labels).unwrap()
}

/// Integer distance (L1, Linf) or squared distance (L2) to the nearest pixel
/// with a different label, by exhaustive search.
pub fn brute_force_edt(map: &LabelMap, class: u8, norm: NormKind) -> Option<Vec<u64>> {
    let (w, h) = (map.width() as i64, map.height() as i64);
    let bg: Vec<(i64, i64)> = (0..h)
        .flat_map(|y| (0..w).map(move |x| (x, y)))
        .filter(|&(x, y)| map.get(x as usize, y as usize) != class)
        .collect();
    if bg.is_empty() {
        return None;
    }
    let mut out = Vec::with_capacity((w * h) as usize);
    for y in 0..h {
        for x in 0..w {
            if map.get(x as usize, y as usize) != class {
                out.push(0);
                continue;
            }
            let best = bg
                .iter()
                .map(|&(qx, qy)| {
                    let (dx, dy) = ((x - qx).abs(), (y - qy).abs());
                    match norm {
                        NormKind::L1 => dx + dy,
                        NormKind::L2 => dx * dx + dy * dy,
                        NormKind::Linf => dx.max(dy),
                    }
                })
                .min()
                .unwrap();
            out.push(best as u64);
        }
    }
    Some(out)
}

/// Maximum matching size between `pred` and `gt` points at distance at most
/// `theta`, by simple augmenting-path search over an all-pairs adjacency.
pub fn brute_force_matching(gt: &[(usize, usize)], pred: &[(usize, usize)], theta: f64) -> usize {
    let adj: Vec<Vec<usize>> = pred
        .iter()
        .map(|&(px, py)| {
            (0..gt.len())
                .filter(|&j| {
                    let (dx, dy) = (px as f64 - gt[j].0 as f64, py as f64 - gt[j].1 as f64);
                    (dx * dx + dy * dy).sqrt() <= theta
                })
                .collect()
        })
        .collect();
    fn augment(l: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &r in &adj[l] {
            if seen[r] {
                continue;
            }
            seen[r] = true;
            if owner[r].is_none_or(|o| augment(o, adj, seen, owner)) {
                owner[r] = Some(l);
                return true;
            }
        }
        false
    }
    let mut owner = vec![None; gt.len()];
    (0..pred.len())
        .filter(|&l| augment(l, &adj, &mut vec![false; gt.len()], &mut owner))
        .count()
}

/// Up to `max` distinct points clustered in a `span` x `span` window.
pub fn random_points(rng: &mut ChaCha8Rng, max: usize, span: usize) -> BoundarySet {
    let n = rng.random_range(0..=max);
    let mut pts: Vec<(usize, usize)> = (0..n)
        .map(|_| (rng.random_range(0..span), rng.random_range(0..span)))
        .collect();
    pts.sort_by_key(|&(x, y)| (y, x));
    pts.dedup();
    BoundarySet::from_points(pts)
}
