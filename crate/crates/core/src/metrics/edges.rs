//! Boundary metrics: one-to-one matched edge precision/recall/F1 and the
//! thresholded BF score.

use std::collections::VecDeque;

use serde::Serialize;

use crate::distance::{exact_transform, NormKind};
use crate::label::{extract_boundary, BoundarySet, ClassId, LabelMap};
use crate::{Error, Result};

pub fn check_theta(theta: f64) -> Result<()> {
    if theta.is_finite() && theta >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidTheta(theta))
    }
}

/// Squared integer radius equivalent to `dx² + dy² <= theta²` on the grid.
fn theta_sq(theta: f64) -> i64 {
    (theta * theta).floor() as i64
}

/// Uniform grid over a point set with cell size `cell`.
struct GridIndex {
    cell: i64,
    cols: i64,
    rows: i64,
    starts: Vec<u32>,
    items: Vec<u32>,
}

impl GridIndex {
    fn new(points: &[(usize, usize)], cell: i64) -> Self {
        let max_x = points.iter().map(|p| p.0).max().unwrap_or(0) as i64;
        let max_y = points.iter().map(|p| p.1).max().unwrap_or(0) as i64;
        let cols = max_x / cell + 1;
        let rows = max_y / cell + 1;
        let key = |p: &(usize, usize)| ((p.1 as i64 / cell) * cols + p.0 as i64 / cell) as usize;
        let mut starts = vec![0u32; (cols * rows) as usize + 1];
        for p in points {
            starts[key(p) + 1] += 1;
        }
        for k in 1..starts.len() {
            starts[k] += starts[k - 1];
        }
        let mut fill = starts.clone();
        let mut items = vec![0u32; points.len()];
        for (i, p) in points.iter().enumerate() {
            let k = key(p);
            items[fill[k] as usize] = i as u32;
            fill[k] += 1;
        }
        Self {
            cell,
            cols,
            rows,
            starts,
            items,
        }
    }

    /// Indices of points within squared distance `r2` of `(x, y)`, ascending.
    fn within(&self, points: &[(usize, usize)], x: i64, y: i64, r2: i64, out: &mut Vec<u32>) {
        out.clear();
        let reach = (r2 as f64).sqrt().ceil() as i64;
        let cx0 = ((x - reach).max(0)) / self.cell;
        let cy0 = ((y - reach).max(0)) / self.cell;
        let cx1 = ((x + reach) / self.cell).min(self.cols - 1);
        let cy1 = ((y + reach) / self.cell).min(self.rows - 1);
        for cy in cy0..=cy1 {
            for cx in cx0..=cx1 {
                let k = (cy * self.cols + cx) as usize;
                for &j in &self.items[self.starts[k] as usize..self.starts[k + 1] as usize] {
                    let (px, py) = points[j as usize];
                    let (dx, dy) = (px as i64 - x, py as i64 - y);
                    if dx * dx + dy * dy <= r2 {
                        out.push(j);
                    }
                }
            }
        }
        out.sort_unstable();
    }
}

const NIL: u32 = u32::MAX;

/// Maximum-cardinality bipartite matching (Hopcroft-Karp). `adj[l]` lists the
/// right vertices adjacent to left vertex `l`.
fn hopcroft_karp(adj: &[Vec<u32>], n_right: usize) -> usize {
    let n_left = adj.len();
    let mut match_l = vec![NIL; n_left];
    let mut match_r = vec![NIL; n_right];
    let mut size = 0;

    // greedy start
    for (l, nbrs) in adj.iter().enumerate() {
        if let Some(&r) = nbrs.iter().find(|&&r| match_r[r as usize] == NIL) {
            match_l[l] = r;
            match_r[r as usize] = l as u32;
            size += 1;
        }
    }

    let mut dist = vec![u32::MAX; n_left];
    let mut queue = VecDeque::new();
    let mut next_edge = vec![0usize; n_left];
    let mut stack: Vec<u32> = Vec::new();
    loop {
        // layer free left vertices
        queue.clear();
        for l in 0..n_left {
            if match_l[l] == NIL {
                dist[l] = 0;
                queue.push_back(l as u32);
            } else {
                dist[l] = u32::MAX;
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &r in &adj[l as usize] {
                let m = match_r[r as usize];
                if m == NIL {
                    found = true;
                } else if dist[m as usize] == u32::MAX {
                    dist[m as usize] = dist[l as usize] + 1;
                    queue.push_back(m);
                }
            }
        }
        if !found {
            break;
        }

        // vertex-disjoint shortest augmenting paths, iterative DFS
        next_edge.fill(0);
        for root in 0..n_left {
            if match_l[root] != NIL {
                continue;
            }
            stack.clear();
            stack.push(root as u32);
            while let Some(&l) = stack.last() {
                let l = l as usize;
                if next_edge[l] == adj[l].len() {
                    dist[l] = u32::MAX;
                    stack.pop();
                    continue;
                }
                let r = adj[l][next_edge[l]];
                let m = match_r[r as usize];
                if m == NIL {
                    // augment along the stack
                    for &v in stack.iter().rev() {
                        let v = v as usize;
                        let r = adj[v][next_edge[v]];
                        match_l[v] = r;
                        match_r[r as usize] = v as u32;
                    }
                    size += 1;
                    stack.clear();
                    break;
                }
                if dist[m as usize] == dist[l] + 1 {
                    stack.push(m);
                } else {
                    next_edge[l] += 1;
                }
            }
        }
    }
    size
}

/// Size of a maximum one-to-one matching between predicted and ground-truth
/// edge pixels, where a pair may match if their Euclidean distance is at most
/// `theta`. Returns `(matched_pred, matched_gt)`, which are always equal.
pub fn edge_match(
    gt_edges: &BoundarySet,
    pred_edges: &BoundarySet,
    theta: f64,
) -> Result<(usize, usize)> {
    check_theta(theta)?;
    let (gt, pred) = (gt_edges.points(), pred_edges.points());
    if gt.is_empty() || pred.is_empty() {
        return Ok((0, 0));
    }
    let r2 = theta_sq(theta);
    let cell = ((r2 as f64).sqrt().floor() as i64).max(1);
    let index = GridIndex::new(gt, cell);
    let mut buf = Vec::new();
    let adj: Vec<Vec<u32>> = pred
        .iter()
        .map(|&(x, y)| {
            index.within(gt, x as i64, y as i64, r2, &mut buf);
            buf.clone()
        })
        .collect();
    let m = hopcroft_karp(&adj, gt.len());
    Ok((m, m))
}

/// Edge precision, recall and F1 for one class. Each component is `None` when
/// undefined; F1 is defined whenever at least one edge set is non-empty.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct EdgeScores {
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

fn f_measure(hits_pred: usize, n_pred: usize, hits_gt: usize, n_gt: usize) -> EdgeScores {
    let precision = (n_pred > 0).then(|| hits_pred as f64 / n_pred as f64);
    let recall = (n_gt > 0).then(|| hits_gt as f64 / n_gt as f64);
    // 2PR / (P + R) with P = hp/np and R = hg/ng, reduced to one division of
    // exact integers so that the result is monotone in the hit counts
    let num = 2 * hits_pred as u64 * hits_gt as u64;
    let den = hits_pred as u64 * n_gt as u64 + hits_gt as u64 * n_pred as u64;
    let f1 = match (precision, recall) {
        (None, None) => None,
        _ if den == 0 => Some(0.0),
        _ => Some(num as f64 / den as f64),
    };
    EdgeScores {
        precision,
        recall,
        f1,
    }
}

pub(crate) fn edge_prf_sets(
    gt_edges: &BoundarySet,
    pred_edges: &BoundarySet,
    theta: f64,
) -> Result<EdgeScores> {
    let (m, _) = edge_match(gt_edges, pred_edges, theta)?;
    Ok(f_measure(m, pred_edges.len(), m, gt_edges.len()))
}

/// Matched edge precision/recall/F1 with distance tolerance `theta`.
pub fn edge_prf(gt: &LabelMap, pred: &LabelMap, class: ClassId, theta: f64) -> Result<EdgeScores> {
    gt.same_shape(pred)?;
    check_theta(theta)?;
    edge_prf_sets(&extract_boundary(gt, class), &extract_boundary(pred, class), theta)
}

/// Count of `points` lying within `theta` of any pixel of `targets`.
fn covered(points: &BoundarySet, targets: &BoundarySet, w: usize, h: usize, theta: f64) -> usize {
    let mut foreground = vec![true; w * h];
    for &(x, y) in targets.points() {
        foreground[y * w + x] = false;
    }
    let Some(d2) = exact_transform(&foreground, w, h, NormKind::L2) else {
        return 0;
    };
    let r2 = theta_sq(theta);
    points
        .points()
        .iter()
        .filter(|&&(x, y)| i64::from(d2[y * w + x]) <= r2)
        .count()
}

pub(crate) fn bf_score_sets(
    gt_edges: &BoundarySet,
    pred_edges: &BoundarySet,
    w: usize,
    h: usize,
    theta: f64,
) -> Result<Option<f64>> {
    check_theta(theta)?;
    let hits_pred = covered(pred_edges, gt_edges, w, h, theta);
    let hits_gt = covered(gt_edges, pred_edges, w, h, theta);
    Ok(f_measure(hits_pred, pred_edges.len(), hits_gt, gt_edges.len()).f1)
}

/// BF score: a predicted edge pixel counts as correct if any ground-truth edge
/// pixel lies within `theta`, and symmetrically for recall. No one-to-one
/// constraint.
pub fn bf_score(gt: &LabelMap, pred: &LabelMap, class: ClassId, theta: f64) -> Result<Option<f64>> {
    gt.same_shape(pred)?;
    bf_score_sets(
        &extract_boundary(gt, class),
        &extract_boundary(pred, class),
        gt.width(),
        gt.height(),
        theta,
    )
}
