use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Interval, IntervalSet, Rational};

/// A probability measure on `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Measure {
    Lebesgue,
    Dirac { point: Rational },
    /// Piecewise-constant density on `weights.len()` equal cells; the cell
    /// weights are masses, not density heights.
    Density { weights: Vec<Rational> },
}

/// The `j`-th of `n` equal cells: `[j/n, (j+1)/n)`, the last one closed.
pub fn bin(j: usize, n: usize) -> Interval {
    let lo = Rational::new(j as i64, n as i64);
    let hi = Rational::new(j as i64 + 1, n as i64);
    if j + 1 == n {
        Interval::closed(lo, hi)
    } else {
        Interval::closed_open(lo, hi)
    }
}

/// Index of the cell containing `y`.
pub fn bin_of(y: &Rational, n: usize) -> usize {
    let scaled = y * &Rational::from_integer(n as i64);
    let floor = scaled.numer().div_floor(&scaled.denom());
    let j: i64 = floor.try_into().unwrap_or(i64::MAX);
    (j.max(0) as usize).min(n - 1)
}

impl Measure {
    pub fn dirac(point: Rational) -> Result<Self> {
        if point.is_negative() || point > Rational::one() {
            return Err(Error::InvalidArgument(format!("Dirac point {point} outside [0, 1]")));
        }
        Ok(Measure::Dirac { point })
    }

    pub fn density(weights: Vec<Rational>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(Rational::is_negative) {
            return Err(Error::InvalidArgument("density weights must be nonnegative".into()));
        }
        let total: Rational = weights.iter().sum();
        if total != Rational::one() {
            return Err(Error::InvalidArgument(format!("density weights sum to {total}")));
        }
        Ok(Measure::Density { weights })
    }

    /// Uniform density on the cells `range` out of `n`.
    pub fn uniform_on(n: usize, range: std::ops::Range<usize>) -> Result<Self> {
        let k = range.len() as i64;
        if k == 0 || range.end > n {
            return Err(Error::InvalidArgument("empty or out-of-range support".into()));
        }
        let weights = (0..n)
            .map(|j| if range.contains(&j) { Rational::new(1, k) } else { Rational::zero() })
            .collect();
        Measure::density(weights)
    }

    pub fn measure_of(&self, s: &IntervalSet) -> Rational {
        match self {
            Measure::Lebesgue => s.length(),
            Measure::Dirac { point } => {
                if s.contains(point) {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }
            Measure::Density { weights } => {
                let n = weights.len();
                let scale = Rational::from_integer(n as i64);
                weights
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| !w.is_zero())
                    .map(|(j, w)| {
                        let overlap = s.intersect(&IntervalSet::from_interval(bin(j, n))).length();
                        w * &(overlap * &scale)
                    })
                    .sum()
            }
        }
    }

    /// Masses of the `n` equal cells.
    pub fn bin_weights(&self, n: usize) -> Result<Vec<Rational>> {
        if n == 0 {
            return Err(Error::InvalidArgument("need at least one bin".into()));
        }
        Ok((0..n)
            .map(|j| self.measure_of(&IntervalSet::from_interval(bin(j, n))))
            .collect())
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measure::Lebesgue => write!(f, "lebesgue"),
            Measure::Dirac { point } => write!(f, "dirac:{point}"),
            Measure::Density { weights } => {
                let parts: Vec<String> = weights.iter().map(ToString::to_string).collect();
                write!(f, "density:{}", parts.join(","))
            }
        }
    }
}

/// Parses `lebesgue`, `dirac:p/q` or `density:w1,w2,...`.
impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "lebesgue" {
            return Ok(Measure::Lebesgue);
        }
        if let Some(p) = s.strip_prefix("dirac:") {
            return Measure::dirac(p.parse()?);
        }
        if let Some(ws) = s.strip_prefix("density:") {
            let weights = ws.split(',').map(str::parse).collect::<Result<Vec<Rational>>>()?;
            return Measure::density(weights);
        }
        Err(Error::Parse(format!("unknown measure `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::q;

    #[test]
    fn measure_examples() {
        let half = IntervalSet::from_interval(Interval::open_closed(q(0, 1), q(1, 2)));
        assert_eq!(Measure::Lebesgue.measure_of(&half), q(1, 2));
        let dirac0 = Measure::dirac(q(0, 1)).unwrap();
        let near0 = IntervalSet::from_interval(Interval::closed_open(q(0, 1), q(1, 8)));
        assert_eq!(dirac0.measure_of(&near0), q(1, 1));
        assert_eq!(dirac0.measure_of(&half.union(&IntervalSet::from_interval(Interval::closed(q(1, 2), q(1, 1))))), q(0, 1));
    }

    #[test]
    fn density_overlap() {
        let m = Measure::uniform_on(4, 0..2).unwrap();
        let s = IntervalSet::from_interval(Interval::closed(q(1, 8), q(3, 4)));
        // cells [0,1/4) and [1/4,1/2) carry 1/2 each; s covers half of the first.
        assert_eq!(m.measure_of(&s), q(3, 4));
        assert_eq!(m.measure_of(&IntervalSet::unit()), q(1, 1));
    }

    #[test]
    fn bins_and_lookup() {
        assert_eq!(bin_of(&q(1, 1), 4), 3);
        assert_eq!(bin_of(&q(1, 4), 4), 1);
        assert_eq!(bin_of(&q(0, 1), 3), 0);
        let w = Measure::dirac(q(1, 2)).unwrap().bin_weights(2).unwrap();
        assert_eq!(w, vec![q(0, 1), q(1, 1)]);
    }

    #[test]
    fn parsing() {
        assert_eq!("lebesgue".parse::<Measure>().unwrap(), Measure::Lebesgue);
        assert_eq!("dirac:1/3".parse::<Measure>().unwrap(), Measure::Dirac { point: q(1, 3) });
        assert!("density:1/2,1/3".parse::<Measure>().is_err());
        assert!("dirac:0.5".parse::<Measure>().is_err());
    }
}
