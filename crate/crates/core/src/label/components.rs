use super::{ClassId, Connectivity, LabelMap};

/// Per-pixel component ids for one class. Id 0 marks pixels of other classes;
/// components are numbered `1..=count` in the row-major order of their first
/// pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceMap {
    width: usize,
    height: usize,
    ids: Vec<u32>,
    count: u32,
}

impl InstanceMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn ids(&self) -> &[u32] {
        &self.ids
    }

    pub fn count(&self) -> u32 {
        self.count
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.ids[y * self.width + x]
    }
}

fn find(parent: &mut [u32], mut a: u32) -> u32 {
    while parent[a as usize] != a {
        let grand = parent[parent[a as usize] as usize];
        parent[a as usize] = grand;
        a = grand;
    }
    a
}

fn union(parent: &mut [u32], a: u32, b: u32) -> u32 {
    let (ra, rb) = (find(parent, a), find(parent, b));
    let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
    parent[hi as usize] = lo;
    lo
}

/// Labels the connected components of `class` with a two-pass union-find scan.
pub fn connected_components(
    map: &LabelMap,
    class: ClassId,
    connectivity: Connectivity,
) -> InstanceMap {
    let (w, h) = (map.width(), map.height());
    let labels = map.labels();
    let mut prov = vec![0u32; w * h];
    // parent[0] is unused so provisional labels start at 1
    let mut parent: Vec<u32> = vec![0];

    // only already-visited neighbors
    let back: &[(isize, isize)] = match connectivity {
        Connectivity::Four => &[(-1, 0), (0, -1)],
        Connectivity::Eight => &[(-1, 0), (-1, -1), (0, -1), (1, -1)],
    };

    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if labels[i] != class {
                continue;
            }
            let mut current = 0u32;
            for (nx, ny) in map.neighbors(x, y, back) {
                let l = prov[ny * w + nx];
                if l == 0 {
                    continue;
                }
                current = if current == 0 {
                    find(&mut parent, l)
                } else {
                    union(&mut parent, current, l)
                };
            }
            if current == 0 {
                current = parent.len() as u32;
                parent.push(current);
            }
            prov[i] = current;
        }
    }

    let mut final_id = vec![0u32; parent.len()];
    let mut count = 0u32;
    for l in prov.iter_mut() {
        if *l == 0 {
            continue;
        }
        let root = find(&mut parent, *l) as usize;
        if final_id[root] == 0 {
            count += 1;
            final_id[root] = count;
        }
        *l = final_id[root];
    }

    InstanceMap {
        width: w,
        height: h,
        ids: prov,
        count,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_pixels_depend_on_connectivity() {
        let map = LabelMap::new(2, 2, 2, vec![1, 0, 0, 1]).unwrap();
        assert_eq!(connected_components(&map, 1, Connectivity::Four).count(), 2);
        let eight = connected_components(&map, 1, Connectivity::Eight);
        assert_eq!(eight.count(), 1);
        assert_eq!(eight.ids(), &[1, 0, 0, 1]);
    }

    #[test]
    fn absent_class_has_no_components() {
        let map = LabelMap::filled(3, 3, 2, 0).unwrap();
        let inst = connected_components(&map, 1, Connectivity::Four);
        assert_eq!(inst.count(), 0);
        assert!(inst.ids().iter().all(|&id| id == 0));
    }

    #[test]
    fn ids_follow_first_pixel_order() {
        // U shape: the two arms get provisional labels 1 and 2 and merge at the bottom,
        // the lone pixel on the right is the second component.
        #[rustfmt::skip]
        let map = LabelMap::new(5, 3, 2, vec![
            1, 0, 1, 0, 1,
            1, 0, 1, 0, 0,
            1, 1, 1, 0, 0,
        ]).unwrap();
        let inst = connected_components(&map, 1, Connectivity::Four);
        assert_eq!(inst.count(), 2);
        assert_eq!(inst.get(0, 0), 1);
        assert_eq!(inst.get(2, 0), 1);
        assert_eq!(inst.get(4, 0), 2);
    }
}
