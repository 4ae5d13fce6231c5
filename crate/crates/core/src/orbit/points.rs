use std::collections::HashMap;

use super::max_dist;
use crate::jet::C64;

/// Points of `Cⁿ` identified up to a max-norm tolerance, backed by a hash
/// grid with cell size equal to the tolerance.
#[derive(Clone, Debug)]
pub struct PointSet {
    eps: f64,
    points: Vec<Vec<C64>>,
    cells: HashMap<Vec<i64>, Vec<usize>>,
}

impl PointSet {
    pub fn new(eps: f64) -> Self {
        assert!(eps > 0.0, "dedup tolerance must be positive");
        PointSet {
            eps,
            points: Vec::new(),
            cells: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<C64>] {
        &self.points
    }

    fn key(&self, p: &[C64]) -> Vec<i64> {
        p.iter()
            .flat_map(|v| [v.re, v.im])
            .map(|x| (x / self.eps).floor() as i64)
            .collect()
    }

    /// Index of a stored point within the tolerance of `p`.
    pub fn find(&self, p: &[C64]) -> Option<usize> {
        let key = self.key(p);
        let dims = key.len();
        let mut offset = vec![-1i64; dims];
        loop {
            let cell: Vec<i64> = key.iter().zip(&offset).map(|(k, o)| k + o).collect();
            if let Some(ids) = self.cells.get(&cell) {
                for &i in ids {
                    if max_dist(&self.points[i], p) <= self.eps {
                        return Some(i);
                    }
                }
            }
            // odometer over {−1, 0, 1}^dims
            let mut d = 0;
            while d < dims {
                offset[d] += 1;
                if offset[d] <= 1 {
                    break;
                }
                offset[d] = -1;
                d += 1;
            }
            if d == dims {
                return None;
            }
        }
    }

    /// Inserts `p` unless an equivalent point exists. Returns the index of
    /// the stored representative and whether it was new.
    pub fn insert(&mut self, p: &[C64]) -> (usize, bool) {
        if let Some(i) = self.find(p) {
            return (i, false);
        }
        let i = self.points.len();
        self.cells.entry(self.key(p)).or_default().push(i);
        self.points.push(p.to_vec());
        (i, true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_nearby_points() {
        let mut s = PointSet::new(1e-6);
        assert!(s.insert(&[C64::new(0.1, 0.2)]).1);
        assert!(!s.insert(&[C64::new(0.1 + 5e-7, 0.2 - 5e-7)]).1);
        assert!(s.insert(&[C64::new(0.1 + 3e-6, 0.2)]).1);
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn finds_across_cell_boundaries() {
        let mut s = PointSet::new(1.0);
        s.insert(&[C64::new(0.99, 0.0), C64::new(-0.01, 0.0)]);
        assert_eq!(s.find(&[C64::new(1.01, 0.0), C64::new(0.01, 0.0)]), Some(0));
    }
}
