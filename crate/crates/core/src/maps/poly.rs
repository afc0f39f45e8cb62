use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::{Interval, IntervalSet, Rational};

/// Polynomial with rational coefficients, lowest degree first.
///
/// Trailing zero coefficients are trimmed, so the zero polynomial has no
/// coefficients and every other polynomial has a nonzero leading one.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<Rational>", into = "Vec<Rational>")]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl From<Vec<Rational>> for Poly {
    fn from(coeffs: Vec<Rational>) -> Self {
        Poly::new(coeffs)
    }
}

impl From<Poly> for Vec<Rational> {
    fn from(p: Poly) -> Self {
        if p.coeffs.is_empty() {
            vec![Rational::zero()]
        } else {
            p.coeffs
        }
    }
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Rational::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    /// `slope * x + intercept`.
    pub fn affine(slope: Rational, intercept: Rational) -> Self {
        Poly::new(vec![intercept, slope])
    }

    pub fn identity() -> Self {
        Poly::affine(Rational::one(), Rational::zero())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_affine(&self) -> bool {
        self.coeffs.len() <= 2
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        if self.coeffs.len() == 2 {
            return self.coeffs[1].mul_add(x, &self.coeffs[0]);
        }
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    fn mul(&self, other: &Poly) -> Poly {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Poly::new(Vec::new());
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Poly::new(out)
    }

    /// `self ∘ inner`, i.e. `x ↦ self(inner(x))`.
    pub fn compose(&self, inner: &Poly) -> Poly {
        let mut acc = Poly::new(Vec::new());
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner).add(&Poly::constant(c.clone()));
        }
        acc
    }

    /// Image of an interval on which the polynomial is monotone.
    pub(crate) fn image_of(&self, iv: &Interval) -> Interval {
        let a = self.eval(iv.lo());
        let b = self.eval(iv.hi());
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Interval::new(a, b, iv.lo_closed(), iv.hi_closed()),
            std::cmp::Ordering::Greater => Interval::new(b, a, iv.hi_closed(), iv.lo_closed()),
            std::cmp::Ordering::Equal => Some(Interval::point(a)),
        }
        .expect("monotone image of a nonempty interval is nonempty")
    }

    /// Exact `{x : self(x) ∈ target}` for an affine polynomial; `None` when
    /// the polynomial is not affine.
    pub(crate) fn affine_preimage(&self, target: &IntervalSet) -> Option<IntervalSet> {
        if !self.is_affine() {
            return None;
        }
        let c0 = self.coeff(0);
        let c1 = self.coeff(1);
        if c1.is_zero() {
            return Some(if target.contains(&c0) {
                IntervalSet::unit()
            } else {
                IntervalSet::empty()
            });
        }
        let inv = |y: &Rational| (y - &c0) / &c1;
        let parts = target.intervals().iter().filter_map(|iv| {
            let (a, b) = (inv(iv.lo()), inv(iv.hi()));
            if c1.is_positive() {
                Interval::new(a, b, iv.lo_closed(), iv.hi_closed())
            } else {
                Interval::new(b, a, iv.hi_closed(), iv.lo_closed())
            }
        });
        Some(IntervalSet::from_intervals(parts))
    }

    /// Whether the polynomial is monotone on the interval (degree ≤ 2 only;
    /// higher degrees return `None`).
    pub(crate) fn monotone_on(&self, iv: &Interval) -> Option<bool> {
        match self.degree() {
            0 | 1 => Some(true),
            2 => {
                // Vertex at -c1 / (2 c2) must not lie strictly inside.
                let v = -(self.coeff(1) / (Rational::from_integer(2) * self.coeff(2)));
                Some(!(&v > iv.lo() && &v < iv.hi()))
            }
            _ => None,
        }
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})x")?,
                _ => write!(f, "({c})x^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::q;

    #[test]
    fn composition_of_squares() {
        let sq = Poly::new(vec![q(0, 1), q(0, 1), q(1, 1)]);
        let quartic = sq.compose(&sq);
        assert_eq!(quartic.degree(), 4);
        assert_eq!(quartic.eval(&q(1, 2)), q(1, 16));
    }

    #[test]
    fn affine_preimage_flips_for_negative_slope() {
        let p = Poly::affine(q(-1, 2), q(3, 4));
        let target = IntervalSet::from_interval(Interval::closed_open(q(1, 2), q(5, 8)));
        let pre = p.affine_preimage(&target).unwrap();
        // 3/4 - x/2 ∈ [1/2, 5/8) ⟺ x ∈ (1/4, 1/2]
        assert_eq!(pre, IntervalSet::from_interval(Interval::open_closed(q(1, 4), q(1, 2))));
    }

    #[test]
    fn monotonicity_check() {
        let sq = Poly::new(vec![q(0, 1), q(0, 1), q(1, 1)]);
        assert_eq!(sq.monotone_on(&Interval::unit()), Some(true));
        let bump = Poly::new(vec![q(0, 1), q(1, 1), q(-1, 1)]);
        assert_eq!(bump.monotone_on(&Interval::unit()), Some(false));
    }
}
