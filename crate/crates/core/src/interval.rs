//! Closed real intervals and exact measure of finite unions.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    /// Builds `[min(a,b), max(a,b)]`.
    pub fn new(a: f64, b: f64) -> Self {
        if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    pub fn centered(center: f64, half_width: f64) -> Self {
        Interval::new(center - half_width, center + half_width)
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Containment with an absolute slack on both ends.
    pub fn contains_approx(&self, x: f64, tol: f64) -> bool {
        self.lo - tol <= x && x <= self.hi + tol
    }

    pub fn contains_interval(&self, other: &Interval, tol: f64) -> bool {
        self.lo - tol <= other.lo && other.hi <= self.hi + tol
    }

    /// Closed intervals: touching endpoints intersect.
    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn intersection(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    /// Point at relative position `t` in `[0, 1]`.
    pub fn lerp(&self, t: f64) -> f64 {
        self.lo + t * (self.hi - self.lo)
    }

    pub fn grid(&self, points: usize) -> Vec<f64> {
        match points {
            0 => vec![],
            1 => vec![self.center()],
            _ => (0..points)
                .map(|i| self.lerp(i as f64 / (points - 1) as f64))
                .collect(),
        }
    }
}

/// Merges a family of closed intervals into disjoint sorted components.
///
/// Components whose gap is at most `tol` are joined; `tol = 0` keeps the
/// closed-interval convention (touching intervals merge).
pub fn union(intervals: &[Interval], tol: f64) -> Vec<Interval> {
    let mut sorted: Vec<Interval> = intervals.to_vec();
    sorted.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
    let mut out: Vec<Interval> = Vec::with_capacity(sorted.len());
    for iv in sorted {
        match out.last_mut() {
            Some(last) if iv.lo <= last.hi + tol => {
                if iv.hi > last.hi {
                    last.hi = iv.hi;
                }
            }
            _ => out.push(iv),
        }
    }
    out
}

/// Lebesgue measure of a finite union of closed intervals.
pub fn union_measure(intervals: &[Interval]) -> f64 {
    union(intervals, 0.0).iter().map(Interval::len).sum()
}

/// Number of cells `[kδ, (k+1)δ)` met by a finite union of closed intervals.
pub fn grid_cells_hit(intervals: &[Interval], delta: f64) -> u64 {
    let merged = union(intervals, 0.0);
    let mut count = 0u64;
    let mut last: Option<i64> = None;
    for iv in merged {
        let mut first = (iv.lo / delta).floor() as i64;
        let end = (iv.hi / delta).floor() as i64;
        if let Some(l) = last {
            if first <= l {
                first = l + 1;
            }
        }
        if end >= first {
            count += (end - first + 1) as u64;
            last = Some(end);
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_merges_overlaps_and_touching() {
        let u = union(
            &[
                Interval::new(0.0, 1.0),
                Interval::new(2.0, 3.0),
                Interval::new(1.0, 1.5),
                Interval::new(0.2, 0.4),
            ],
            0.0,
        );
        assert_eq!(u, vec![Interval::new(0.0, 1.5), Interval::new(2.0, 3.0)]);
        assert_eq!(union_measure(&[]), 0.0);
    }

    #[test]
    fn tolerance_closes_small_gaps() {
        let parts = [Interval::new(0.0, 1.0), Interval::new(1.0 + 1e-14, 2.0)];
        assert_eq!(union(&parts, 0.0).len(), 2);
        assert_eq!(union(&parts, 1e-12).len(), 1);
    }

    #[test]
    fn cells_are_not_double_counted() {
        // both pieces touch cell 0
        let n = grid_cells_hit(&[Interval::new(0.0, 0.1), Interval::new(0.2, 0.3)], 1.0);
        assert_eq!(n, 1);
        let n = grid_cells_hit(&[Interval::new(0.0, 2.5)], 1.0);
        assert_eq!(n, 3);
    }
}
