use serde::{Deserialize, Serialize};

use super::map::check_point;
use crate::error::{Error, Result};
use crate::geometry::{ball_on, BallStyle, IntervalSet, Rational};
use crate::limits::Limits;
use crate::maps::PiecewiseMap;

/// Bracket for the largest radius whose closed ball is disjoint from all of
/// its forward images up to the horizon.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RBracket {
    pub lower: Rational,
    pub upper: Rational,
    pub horizon: usize,
    pub steps: usize,
}

fn disjoint_from_images(t: &PiecewiseMap, x: &Rational, r: &Rational, horizon: usize, limits: &Limits) -> Result<bool> {
    let b = ball_on(x, r, BallStyle::Closed, t.is_circle())?;
    let mut u = b.clone();
    for _ in 0..horizon {
        let next = t.image(&u);
        next.check_size(limits.set_budget)?;
        if next.intersects(&b) {
            return Ok(false);
        }
        if next == u {
            break;
        }
        u = next;
    }
    Ok(true)
}

/// Bisection on `r ∈ [0, 1]` until the bracket is at most `r_tol` wide.
pub fn r_function(t: &PiecewiseMap, x: &Rational, horizon: usize, r_tol: &Rational, limits: &Limits) -> Result<RBracket> {
    check_point(x, &Rational::one())?;
    if !r_tol.is_positive() {
        return Err(Error::InvalidArgument("r_tol must be positive".into()));
    }
    if !t.is_affine() {
        return Err(Error::Unsupported(format!("radius function of nonlinear map `{}`", t.label())));
    }
    let mut lo = Rational::zero();
    let mut hi = Rational::one();
    let mut steps = 0;
    if disjoint_from_images(t, x, &hi, horizon, limits)? {
        return Ok(RBracket { lower: hi.clone(), upper: hi, horizon, steps });
    }
    let two = Rational::from_integer(2);
    while &hi - &lo > *r_tol {
        let mid = &(&lo + &hi) / &two;
        steps += 1;
        if disjoint_from_images(t, x, &mid, horizon, limits)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(RBracket { lower: lo, upper: hi, horizon, steps })
}

/// The images of a small closed ball keep meeting it.
pub fn meets_own_images(t: &PiecewiseMap, ball: &IntervalSet, horizon: usize) -> bool {
    let mut u = ball.clone();
    (0..horizon).any(|_| {
        u = t.image(&u);
        u.intersects(ball)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalogue::examples::example1;
    use crate::geometry::q;

    #[test]
    fn bracket_for_a_quarter() {
        let t = example1().unwrap();
        let tol = Rational::dyadic(16);
        let br = r_function(&t, &q(1, 4), 50, &tol, &Limits::default()).unwrap();
        assert!(br.lower < q(1, 12) && q(1, 12) <= br.upper);
        assert!(&br.upper - &br.lower <= tol);
        let end = r_function(&t, &q(0, 1), 50, &tol, &Limits::default()).unwrap();
        assert_eq!(end.lower, q(0, 1));
        assert!(end.upper <= tol);
    }

    #[test]
    fn identity_has_zero_radius() {
        let tol = Rational::dyadic(10);
        let br = r_function(&PiecewiseMap::identity(), &q(1, 3), 5, &tol, &Limits::default()).unwrap();
        assert_eq!(br.lower, q(0, 1));
        assert!(br.upper <= tol);
    }
}
