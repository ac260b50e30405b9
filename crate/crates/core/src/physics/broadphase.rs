//! Uniform spatial hash over disc centres.
//!
//! Entries live in one vector sorted by cell key, so queries are binary
//! searches and candidate pairs come out in a deterministic order.

use super::vec2::Vec2;

pub struct SpatialHash {
    cell: f64,
    entries: Vec<(u64, usize)>,
}

fn pack(cx: i64, cy: i64) -> u64 {
    ((cx as i32 as u32 as u64) << 32) | (cy as i32 as u32 as u64)
}

impl SpatialHash {
    /// `cell` must be at least twice the largest radius inserted.
    pub fn build(cell: f64, points: impl IntoIterator<Item = (usize, Vec2)>) -> Self {
        let cell = cell.max(1e-6);
        let mut entries: Vec<(u64, usize)> = points
            .into_iter()
            .map(|(idx, p)| {
                let (cx, cy) = Self::coords(cell, p);
                (pack(cx, cy), idx)
            })
            .collect();
        entries.sort_unstable();
        Self { cell, entries }
    }

    /// Insert each index into every cell its bounding box overlaps.
    pub fn build_boxes(cell: f64, boxes: impl IntoIterator<Item = (usize, Vec2, Vec2)>) -> Self {
        let cell = cell.max(1e-6);
        let mut entries = Vec::new();
        for (idx, min, max) in boxes {
            let (x0, y0) = Self::coords(cell, min);
            let (x1, y1) = Self::coords(cell, max);
            for cx in x0..=x1 {
                for cy in y0..=y1 {
                    entries.push((pack(cx, cy), idx));
                }
            }
        }
        entries.sort_unstable();
        Self { cell, entries }
    }

    fn coords(cell: f64, p: Vec2) -> (i64, i64) {
        ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64)
    }

    fn bucket(&self, key: u64) -> &[(u64, usize)] {
        let lo = self.entries.partition_point(|e| e.0 < key);
        let hi = self.entries.partition_point(|e| e.0 <= key);
        &self.entries[lo..hi]
    }

    /// Indices stored in the 3x3 block of cells around `p`.
    pub fn query(&self, p: Vec2, out: &mut Vec<usize>) {
        let (cx, cy) = Self::coords(self.cell, p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                out.extend(self.bucket(pack(cx + dx, cy + dy)).iter().map(|e| e.1));
            }
        }
    }

    /// Indices stored in cells overlapping the axis-aligned box.
    pub fn query_box(&self, min: Vec2, max: Vec2, out: &mut Vec<usize>) {
        let (x0, y0) = Self::coords(self.cell, min);
        let (x1, y1) = Self::coords(self.cell, max);
        for cx in (x0 - 1)..=(x1 + 1) {
            for cy in (y0 - 1)..=(y1 + 1) {
                out.extend(self.bucket(pack(cx, cy)).iter().map(|e| e.1));
            }
        }
    }

    /// Every unordered pair `(i, j)`, `i < j`, sharing a neighbourhood; sorted.
    pub fn candidate_pairs(&self, positions: &[Vec2]) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        let mut scratch = Vec::new();
        for &(_, i) in &self.entries {
            scratch.clear();
            self.query(positions[i], &mut scratch);
            pairs.extend(scratch.iter().filter(|&&j| j > i).map(|&j| (i, j)));
        }
        pairs.sort_unstable();
        pairs.dedup();
        pairs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_all_close_pairs_like_brute_force() {
        let mut s = crate::rng::RngStream::from_master_seed(5);
        let pts: Vec<Vec2> = (0..200)
            .map(|_| Vec2::new(s.uniform(-20.0, 20.0), s.uniform(-20.0, 20.0)))
            .collect();
        let reach = 1.5;
        let hash = SpatialHash::build(reach, pts.iter().copied().enumerate());
        let got: Vec<(usize, usize)> = hash
            .candidate_pairs(&pts)
            .into_iter()
            .filter(|&(i, j)| (pts[i] - pts[j]).length() < reach)
            .collect();
        let mut want = Vec::new();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                if (pts[i] - pts[j]).length() < reach {
                    want.push((i, j));
                }
            }
        }
        assert_eq!(got, want);
    }
}
