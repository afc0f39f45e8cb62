use rayon::prelude::*;

use super::orbit::{first_image_return, orbit_returns};
use super::verdict::{Certificate, ClassifyConfig, RecurrenceVerdict, Subject, UniformEstimate};
use crate::error::{Error, Result};
use crate::geometry::{ball_on, BallStyle, IntervalSet, Rational};
use crate::maps::PiecewiseMap;

pub(crate) fn check_point(x: &Rational, eps: &Rational) -> Result<()> {
    if !eps.is_positive() {
        return Err(Error::InvalidArgument(format!("ε must be positive, got {eps}")));
    }
    if x.is_negative() || x > &Rational::one() {
        return Err(Error::InvalidArgument(format!("point {x} outside [0, 1]")));
    }
    Ok(())
}

/// `k` points spread evenly through the ball around `x`, plus `x` itself.
pub(crate) fn ball_grid(x: &Rational, eps: &Rational, ball: &IntervalSet, k: usize) -> Vec<Rational> {
    let mut pts = vec![x.clone()];
    if k == 0 {
        return pts;
    }
    let step = &(eps * &Rational::from_integer(2)) / &Rational::from_integer(k as i64);
    let start = x - eps;
    for j in 0..k {
        let mut y = &start + &(&step * &Rational::new(2 * j as i64 + 1, 2));
        if y.is_negative() {
            y = &y + &Rational::one();
        } else if y > Rational::one() {
            y = &y - &Rational::one();
        }
        if ball.contains(&y) && &y != x {
            pts.push(y);
        }
    }
    pts
}

pub fn map_ball(t: &PiecewiseMap, x: &Rational, eps: &Rational) -> Result<IntervalSet> {
    ball_on(x, eps, BallStyle::Open, t.is_circle())
}

/// Finite-horizon classification of `x` under a single map.
pub fn classify_map_point(t: &PiecewiseMap, x: &Rational, cfg: &ClassifyConfig) -> Result<RecurrenceVerdict> {
    check_point(x, &cfg.eps)?;
    let n = cfg.horizon;
    let b = map_ball(t, x, &cfg.eps)?;
    let returns = orbit_returns(t, x, &b, n, &cfg.limits)?;
    let recurrent = match returns.first() {
        Some(time) => Certificate::at(time),
        None => Certificate::NoneWithinHorizon,
    };
    let weak_limit = returns.first().unwrap_or(n);
    let weak = match first_image_return(t, &b, weak_limit, &cfg.limits)? {
        Some(time) => Certificate::at(time),
        None => match returns.first() {
            Some(time) => Certificate::at(time),
            None => Certificate::NoneWithinHorizon,
        },
    };
    let window = cfg.window();
    let threshold = Rational::from_integer(cfg.r_min as i64);
    let count = returns.count_in(window.0, window.1);
    let uniform = UniformEstimate::new(window, Rational::from_integer(count as i64), threshold.clone());
    let weak_uniform = if cfg.grid_points == 0 {
        None
    } else {
        let grid = ball_grid(x, &cfg.eps, &b, cfg.grid_points);
        let counts = grid
            .par_iter()
            .map(|y| Ok(orbit_returns(t, y, &b, n, &cfg.limits)?.count_in(window.0, window.1)))
            .collect::<Result<Vec<usize>>>()?;
        let best = counts.into_iter().max().unwrap_or(0);
        Some(UniformEstimate::new(window, Rational::from_integer(best as i64), threshold))
    };
    Ok(RecurrenceVerdict {
        subject: Subject::Map,
        x: x.clone(),
        eps: cfg.eps.clone(),
        horizon: n,
        ball: b,
        recurrent,
        weak,
        uniform_estimate: Some(uniform),
        weak_uniform_estimate: weak_uniform,
        return_times: returns.times,
        mc: None,
    })
}
