mod common;

use common::{brute_force_matching, random_map, random_points, rng};
use rand::Rng;
use wiou::label::BoundarySet;
use wiou::metrics::{bf_score, edge_match, edge_prf};

#[test]
fn matching_size_equals_oracle() {
    let mut r = rng(99);
    for case in 0..300 {
        let span = r.random_range(4..30);
        let gt = random_points(&mut r, 40, span);
        let pred = random_points(&mut r, 40, span);
        let theta = [0.0, 1.0, 1.5, 2.0, 3.0, 4.5][case % 6];
        let (m, n) = edge_match(&gt, &pred, theta).unwrap();
        assert_eq!(m, n);
        assert_eq!(
            m,
            brute_force_matching(gt.points(), pred.points(), theta),
            "case {case} theta {theta}"
        );
    }
}

/// All injective assignments, for tiny instances.
fn exhaustive(gt: &[(usize, usize)], pred: &[(usize, usize)], theta: f64) -> usize {
    fn go(k: usize, gt: &[(usize, usize)], pred: &[(usize, usize)], used: &mut [bool], t: f64) -> usize {
        if k == pred.len() {
            return 0;
        }
        let mut best = go(k + 1, gt, pred, used, t);
        for j in 0..gt.len() {
            let (dx, dy) = (pred[k].0 as f64 - gt[j].0 as f64, pred[k].1 as f64 - gt[j].1 as f64);
            if !used[j] && dx.hypot(dy) <= t {
                used[j] = true;
                best = best.max(1 + go(k + 1, gt, pred, used, t));
                used[j] = false;
            }
        }
        best
    }
    go(0, gt, pred, &mut vec![false; gt.len()], theta)
}

#[test]
fn tiny_instances_match_enumeration() {
    let mut r = rng(5);
    for _ in 0..300 {
        let gt = random_points(&mut r, 7, 5);
        let pred = random_points(&mut r, 7, 5);
        let theta = r.random_range(0.0..2.5);
        assert_eq!(
            edge_match(&gt, &pred, theta).unwrap().0,
            exhaustive(gt.points(), pred.points(), theta)
        );
    }
}

#[test]
fn matching_is_symmetric() {
    let mut r = rng(8);
    for _ in 0..100 {
        let a = random_points(&mut r, 30, 20);
        let b = random_points(&mut r, 30, 20);
        assert_eq!(edge_match(&a, &b, 2.0).unwrap(), edge_match(&b, &a, 2.0).unwrap());
    }
}

#[test]
fn bf_dominates_edge_f1() {
    let mut r = rng(31);
    for _ in 0..200 {
        let gt = random_map(&mut r, 24, 24, 3);
        let pred = random_map(&mut r, 24, 24, 3);
        for class in 0..3 {
            for theta in [0.0, 1.0, 3.0] {
                let ef = edge_prf(&gt, &pred, class, theta).unwrap().f1;
                let bf = bf_score(&gt, &pred, class, theta).unwrap();
                match (ef, bf) {
                    (Some(e), Some(b)) => assert!(b >= e, "{b} < {e}"),
                    (e, b) => assert_eq!(e, b),
                }
            }
        }
    }
}

#[test]
fn shifted_straight_boundary() {
    // a vertical edge moved by `shift` pixels
    let edge = |x: usize| BoundarySet::from_points((0..50).map(|y| (x, y)).collect());
    let gt = edge(10);
    for (shift, full) in [(0, true), (2, true), (3, true), (4, false), (5, false)] {
        let pred = edge(10 + shift);
        let (m, _) = edge_match(&gt, &pred, 3.0).unwrap();
        assert_eq!(m == gt.len(), full, "shift {shift}");
    }
}
