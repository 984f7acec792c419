use crate::error::{Error, Result};

/// Finite union of disjoint closed intervals, kept in ascending order.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalUnion {
    intervals: Vec<(f64, f64)>,
}

impl IntervalUnion {
    /// Sorts the intervals and merges any that overlap or touch.
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::EmptySet);
        }
        for &(lo, hi) in &intervals {
            if !(lo.is_finite() && hi.is_finite()) || lo > hi {
                return Err(Error::InvalidParameter(format!("bad interval [{lo}, {hi}]")));
            }
        }
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
        for (lo, hi) in intervals {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        Ok(Self { intervals: merged })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn contains(&self, t: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| lo <= t && t <= hi)
    }

    /// Smallest interval containing the union.
    pub fn hull(&self) -> (f64, f64) {
        (self.intervals[0].0, self.intervals[self.intervals.len() - 1].1)
    }
}

/// Nearest point of `set` to `t`; an exact tie goes to the smaller point.
pub fn project_interval_union(set: &IntervalUnion, t: f64) -> f64 {
    let mut best = f64::NAN;
    let mut best_dist = f64::INFINITY;
    for &(lo, hi) in &set.intervals {
        let p = t.clamp(lo, hi);
        let d = (p - t).abs();
        // Intervals are ascending, so strict comparison keeps the smaller point on ties.
        if d < best_dist {
            best = p;
            best_dist = d;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b() -> IntervalUnion {
        IntervalUnion::new(vec![(2.0, 3.0), (0.0, 1.0)]).unwrap()
    }

    #[test]
    fn projection_examples() {
        assert_eq!(project_interval_union(&b(), 18.0 / 11.0), 2.0);
        assert_eq!(project_interval_union(&b(), 0.25), 0.25);
        assert_eq!(project_interval_union(&b(), 1.5), 1.0);
        assert_eq!(project_interval_union(&b(), -4.0), 0.0);
        assert_eq!(project_interval_union(&b(), 7.0), 3.0);
    }

    #[test]
    fn construction_merges_and_validates() {
        let u = IntervalUnion::new(vec![(0.0, 1.0), (0.5, 2.0), (3.0, 3.0)]).unwrap();
        assert_eq!(u.intervals(), &[(0.0, 2.0), (3.0, 3.0)]);
        assert!(matches!(IntervalUnion::new(vec![]), Err(Error::EmptySet)));
        assert!(IntervalUnion::new(vec![(1.0, 0.0)]).is_err());
        assert_eq!(b().hull(), (0.0, 3.0));
        assert!(b().contains(2.5) && !b().contains(1.5));
    }
}
