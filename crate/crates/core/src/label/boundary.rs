use super::{ClassId, Connectivity, LabelMap};

/// Boundary pixels of one class, stored in row-major order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BoundarySet {
    points: Vec<(usize, usize)>,
}

impl BoundarySet {
    pub fn from_points(mut points: Vec<(usize, usize)>) -> Self {
        points.sort_by_key(|&(x, y)| (y, x));
        points.dedup();
        Self { points }
    }

    pub fn points(&self) -> &[(usize, usize)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: (usize, usize)) -> bool {
        self.points
            .binary_search_by_key(&(p.1, p.0), |&(x, y)| (y, x))
            .is_ok()
    }
}

/// Pixels of `class` with at least one in-image four-neighbor of another label.
pub fn extract_boundary(map: &LabelMap, class: ClassId) -> BoundarySet {
    extract_boundary_with(map, class, Connectivity::Four)
}

/// [`extract_boundary`] with a selectable neighborhood. Out-of-image neighbors
/// never make a pixel a boundary pixel.
pub fn extract_boundary_with(
    map: &LabelMap,
    class: ClassId,
    connectivity: Connectivity,
) -> BoundarySet {
    let (w, h) = (map.width(), map.height());
    let labels = map.labels();
    let offsets = connectivity.offsets();
    let mut points = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if labels[y * w + x] != class {
                continue;
            }
            if map
                .neighbors(x, y, offsets)
                .any(|(nx, ny)| labels[ny * w + nx] != class)
            {
                points.push((x, y));
            }
        }
    }
    BoundarySet { points }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_map_has_no_boundary() {
        let map = LabelMap::filled(3, 3, 2, 1).unwrap();
        assert!(extract_boundary(&map, 1).is_empty());
        assert!(extract_boundary(&map, 0).is_empty());
    }

    #[test]
    fn single_center_pixel() {
        let mut map = LabelMap::filled(3, 3, 2, 0).unwrap();
        map.set(1, 1, 1);
        assert_eq!(extract_boundary(&map, 1).points(), &[(1, 1)]);
        // the class-0 ring: the four edge-adjacent pixels of the center
        assert_eq!(
            extract_boundary(&map, 0).points(),
            &[(1, 0), (0, 1), (2, 1), (1, 2)]
        );
    }

    #[test]
    fn square_perimeter() {
        let mut map = LabelMap::filled(5, 5, 2, 0).unwrap();
        for y in 1..4 {
            for x in 1..4 {
                map.set(x, y, 1);
            }
        }
        let b = extract_boundary(&map, 1);
        // hand-enumerated: every square pixel except the center touches class 0
        let expected: Vec<(usize, usize)> = (1..4)
            .flat_map(|y| (1..4).map(move |x| (x, y)))
            .filter(|&p| p != (2, 2))
            .collect();
        assert_eq!(b.points(), expected.as_slice());
        assert!(!b.contains((2, 2)));
        assert!(b.contains((3, 1)));
    }
}
