use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::interval::Interval;
use super::rational::Rational;
use crate::error::{Error, Result};

/// A finite union of intervals in `[0, 1]`, kept sorted, pairwise disjoint
/// and maximally merged.
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetOp {
    Union,
    Intersect,
    Difference,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BallStyle {
    Open,
    Closed,
}

fn start_order(a: &Interval, b: &Interval) -> Ordering {
    a.lo.cmp(&b.lo).then_with(|| b.lo_closed.cmp(&a.lo_closed))
}

/// `a` and `b` (with `a` starting no later) overlap or share a boundary
/// point that one of them includes.
fn touches(a: &Interval, b: &Interval) -> bool {
    match b.lo.cmp(&a.hi) {
        Ordering::Less => true,
        Ordering::Equal => a.hi_closed || b.lo_closed,
        Ordering::Greater => false,
    }
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn unit() -> Self {
        Self { intervals: vec![Interval::unit()] }
    }

    pub fn point(x: Rational) -> Self {
        Self { intervals: vec![Interval::point(x)] }
    }

    pub fn from_interval(iv: Interval) -> Self {
        Self { intervals: vec![iv] }
    }

    /// Normalizes an arbitrary collection of intervals.
    pub fn from_intervals<I: IntoIterator<Item = Interval>>(items: I) -> Self {
        let mut items: Vec<Interval> = items.into_iter().collect();
        items.sort_by(start_order);
        let mut out: Vec<Interval> = Vec::with_capacity(items.len());
        for iv in items {
            if let Some(last) = out.last_mut() {
                if touches(last, &iv) {
                    match iv.hi.cmp(&last.hi) {
                        Ordering::Greater => {
                            last.hi = iv.hi;
                            last.hi_closed = iv.hi_closed;
                        }
                        Ordering::Equal => last.hi_closed |= iv.hi_closed,
                        Ordering::Less => {}
                    }
                    continue;
                }
            }
            out.push(iv);
        }
        Self { intervals: out }
    }

    pub fn from_points<I: IntoIterator<Item = Rational>>(points: I) -> Self {
        Self::from_intervals(points.into_iter().map(Interval::point))
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        // Last interval starting at or before x.
        let idx = self.intervals.partition_point(|iv| iv.lo <= *x);
        idx > 0 && self.intervals[idx - 1].contains(x)
    }

    pub fn length(&self) -> Rational {
        self.intervals.iter().map(Interval::length).sum()
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        if other.is_empty() {
            return self.clone();
        }
        if self.is_empty() {
            return other.clone();
        }
        Self::from_intervals(self.intervals.iter().chain(&other.intervals).cloned())
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let (a, b) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            if let Some(iv) = a[i].intersect(&b[j]) {
                out.push(iv);
            }
            // Advance whichever ends first.
            let a_first = match a[i].hi.cmp(&b[j].hi) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => !a[i].hi_closed || b[j].hi_closed,
            };
            if a_first {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::from_intervals(out)
    }

    /// Complement relative to `[0, 1]`.
    pub fn complement(&self) -> IntervalSet {
        let mut out = Vec::new();
        let mut cursor = Rational::zero();
        let mut cursor_closed = true;
        for iv in &self.intervals {
            if let Some(gap) = Interval::new(cursor, iv.lo.clone(), cursor_closed, !iv.lo_closed) {
                out.push(gap);
            }
            cursor = iv.hi.clone();
            cursor_closed = !iv.hi_closed;
        }
        if let Some(gap) = Interval::new(cursor, Rational::one(), cursor_closed, true) {
            out.push(gap);
        }
        Self { intervals: out }
    }

    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        if other.is_empty() || self.is_empty() {
            return self.clone();
        }
        self.intersect(&other.complement())
    }

    pub fn apply(&self, other: &IntervalSet, op: SetOp) -> IntervalSet {
        match op {
            SetOp::Union => self.union(other),
            SetOp::Intersect => self.intersect(other),
            SetOp::Difference => self.difference(other),
        }
    }

    pub fn intersects(&self, other: &IntervalSet) -> bool {
        !self.intersect(other).is_empty()
    }

    pub fn is_subset(&self, other: &IntervalSet) -> bool {
        self.difference(other).is_empty()
    }

    /// Smallest closed interval containing the set.
    pub fn hull(&self) -> Option<Interval> {
        let first = self.intervals.first()?;
        let last = self.intervals.last()?;
        Some(Interval::closed(first.lo.clone(), last.hi.clone()))
    }

    /// Fails with [`Error::Budget`] if the set has more than `max` pieces.
    pub fn check_size(&self, max: usize) -> Result<()> {
        if self.intervals.len() > max {
            Err(Error::Budget(format!(
                "set has {} intervals, limit is {max}",
                self.intervals.len()
            )))
        } else {
            Ok(())
        }
    }
}

/// The ball of radius `eps` around `x`, clipped to `[0, 1]`.
pub fn ball(x: &Rational, eps: &Rational, style: BallStyle) -> Result<IntervalSet> {
    ball_on(x, eps, style, false)
}

/// Like [`ball`]; when `circle` is set the space is `[0, 1]` with `0 ~ 1`
/// and the ball wraps around.
pub fn ball_on(x: &Rational, eps: &Rational, style: BallStyle, circle: bool) -> Result<IntervalSet> {
    if !eps.is_positive() {
        return Err(Error::InvalidArgument(format!("ball radius {eps} must be positive")));
    }
    if x.is_negative() || *x > Rational::one() {
        return Err(Error::InvalidArgument(format!("ball centre {x} outside [0,1]")));
    }
    let closed = style == BallStyle::Closed;
    let lo = x - eps;
    let hi = x + eps;
    let mut parts: Vec<Interval> = Interval::new(lo.clone(), hi.clone(), closed, closed)
        .into_iter()
        .collect();
    if circle {
        let one = Rational::one();
        if lo.is_negative() {
            parts.extend(Interval::new(&lo + &one, one.clone(), closed, true));
            // 1 and 0 are the same point on the circle.
            parts.push(Interval::point(Rational::zero()));
        }
        if hi > one {
            parts.extend(Interval::new(Rational::zero(), &hi - &one, true, closed));
            parts.push(Interval::point(one.clone()));
        }
        if x.is_zero() || *x == one {
            parts.push(Interval::point(Rational::zero()));
            parts.push(Interval::point(one));
        }
    }
    Ok(IntervalSet::from_intervals(parts))
}

impl fmt::Debug for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "∅");
        }
        for (i, iv) in self.intervals.iter().enumerate() {
            if i > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}

impl<'de> Deserialize<'de> for IntervalSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let items = Vec::<Interval>::deserialize(d)?;
        Ok(IntervalSet::from_intervals(items))
    }
}
