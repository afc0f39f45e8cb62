use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::rational::Rational;
use crate::error::{Error, Result};

/// A nonempty subinterval of `[0, 1]` with rational endpoints.
///
/// A degenerate interval `[a, a]` is a point and is always closed on both
/// sides.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Interval {
    pub(crate) lo: Rational,
    pub(crate) hi: Rational,
    pub(crate) lo_closed: bool,
    pub(crate) hi_closed: bool,
}

impl Interval {
    /// Clips the given bounds to `[0, 1]`; `None` when the result is empty.
    pub fn new(lo: Rational, hi: Rational, lo_closed: bool, hi_closed: bool) -> Option<Self> {
        let zero = Rational::zero();
        let one = Rational::one();
        let (lo, lo_closed) = if lo < zero { (zero, true) } else { (lo, lo_closed) };
        let (hi, hi_closed) = if hi > one { (one, true) } else { (hi, hi_closed) };
        match lo.cmp(&hi) {
            Ordering::Less => Some(Interval { lo, hi, lo_closed, hi_closed }),
            Ordering::Equal if lo_closed && hi_closed => Some(Interval::point(lo)),
            _ => None,
        }
    }

    /// Strict constructor for external input: bounds must already lie in
    /// `[0, 1]` and describe a nonempty set.
    pub fn checked(lo: Rational, hi: Rational, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        if lo.is_negative() || hi > Rational::one() {
            return Err(Error::InvalidArgument(format!(
                "interval bounds {lo}..{hi} leave [0,1]"
            )));
        }
        Interval::new(lo.clone(), hi.clone(), lo_closed, hi_closed).ok_or_else(|| {
            Error::InvalidArgument(format!("interval {lo}..{hi} is empty"))
        })
    }

    pub fn point(x: Rational) -> Self {
        Interval { lo: x.clone(), hi: x, lo_closed: true, hi_closed: true }
    }

    pub fn closed(lo: Rational, hi: Rational) -> Self {
        Self::new(lo, hi, true, true).expect("empty closed interval")
    }

    pub fn open(lo: Rational, hi: Rational) -> Self {
        Self::new(lo, hi, false, false).expect("empty open interval")
    }

    pub fn closed_open(lo: Rational, hi: Rational) -> Self {
        Self::new(lo, hi, true, false).expect("empty half-open interval")
    }

    pub fn open_closed(lo: Rational, hi: Rational) -> Self {
        Self::new(lo, hi, false, true).expect("empty half-open interval")
    }

    pub fn unit() -> Self {
        Self::closed(Rational::zero(), Rational::one())
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let above = match x.cmp(&self.lo) {
            Ordering::Greater => true,
            Ordering::Equal => self.lo_closed,
            Ordering::Less => false,
        };
        above
            && match x.cmp(&self.hi) {
                Ordering::Less => true,
                Ordering::Equal => self.hi_closed,
                Ordering::Greater => false,
            }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let (lo, lo_closed) = match self.lo.cmp(&other.lo) {
            Ordering::Greater => (&self.lo, self.lo_closed),
            Ordering::Less => (&other.lo, other.lo_closed),
            Ordering::Equal => (&self.lo, self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&other.hi) {
            Ordering::Less => (&self.hi, self.hi_closed),
            Ordering::Greater => (&other.hi, other.hi_closed),
            Ordering::Equal => (&self.hi, self.hi_closed && other.hi_closed),
        };
        Interval::new(lo.clone(), hi.clone(), lo_closed, hi_closed)
    }

    /// Midpoint; an interior point unless the interval is a point.
    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            return write!(f, "{{{}}}", self.lo);
        }
        write!(
            f,
            "{}{},{}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

#[derive(Deserialize)]
struct RawInterval {
    lo: Rational,
    hi: Rational,
    #[serde(default = "yes")]
    lo_closed: bool,
    #[serde(default = "yes")]
    hi_closed: bool,
}

fn yes() -> bool {
    true
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawInterval::deserialize(d)?;
        Interval::checked(raw.lo, raw.hi, raw.lo_closed, raw.hi_closed)
            .map_err(serde::de::Error::custom)
    }
}
