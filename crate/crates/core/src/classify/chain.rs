use std::collections::BTreeSet;

use rayon::prelude::*;

use super::map::{ball_grid, check_point};
use super::verdict::{
    Certificate, ClassifyConfig, McSummary, Mode, RecurrenceVerdict, Subject, UniformEstimate,
};
use crate::error::{Error, Result};
use crate::geometry::{ball_on, BallStyle, IntervalSet, Rational};
use crate::limits::Limits;
use crate::maps::GeneratorSet;
use crate::markov::MarkovChain;
use crate::semigroup::kappa_sequence;

pub fn chain_ball(g: &GeneratorSet, x: &Rational, eps: &Rational) -> Result<IntervalSet> {
    ball_on(x, eps, BallStyle::Open, g.is_circle())
}

/// First `n ≤ limit` at which the set reachable from the ball in `n` steps
/// meets the ball again.
pub fn first_reachable_return(
    g: &GeneratorSet,
    ball: &IntervalSet,
    limit: usize,
    limits: &Limits,
) -> Result<Option<usize>> {
    let mut r = ball.clone();
    for n in 1..=limit {
        let mut next = IntervalSet::empty();
        for t in g.maps() {
            next = next.union(&t.image(&r));
        }
        next.check_size(limits.set_budget)?;
        if next.intersects(ball) {
            return Ok(Some(n));
        }
        if next == r {
            return Ok(None);
        }
        let bits = next
            .intervals()
            .iter()
            .map(|iv| iv.lo().bits().max(iv.hi().bits()))
            .max()
            .unwrap_or(0);
        if bits > limits.bit_cap {
            return Err(Error::BitCap { bits, cap: limits.bit_cap });
        }
        r = next;
    }
    Ok(None)
}

fn window_min(values: &[Rational], window: (usize, usize)) -> Rational {
    values[window.0..=window.1].iter().min().cloned().unwrap_or_else(Rational::zero)
}

fn weak_certificate(
    g: &GeneratorSet,
    b: &IntervalSet,
    recurrent: &Certificate,
    horizon: usize,
    limits: &Limits,
) -> Result<Certificate> {
    let limit = recurrent.time().unwrap_or(horizon);
    Ok(match first_reachable_return(g, b, limit, limits)? {
        Some(t) => Certificate::at(t),
        None => match recurrent.time() {
            Some(t) => Certificate::at(t),
            None => Certificate::NoneWithinHorizon,
        },
    })
}

/// Finite-horizon classification of `x` for the chain `Q`.
pub fn classify_chain_point(
    chain: &MarkovChain,
    x: &Rational,
    cfg: &ClassifyConfig,
) -> Result<RecurrenceVerdict> {
    classify_inner(chain, x, cfg, Subject::Chain)
}

/// Same positivity flags as the induced chain; the uniform estimate is the
/// window minimum of the trajectory proportion `κ_n`.
pub fn classify_semigroup_point(
    g: &GeneratorSet,
    p: &[Rational],
    x: &Rational,
    cfg: &ClassifyConfig,
) -> Result<RecurrenceVerdict> {
    let chain = MarkovChain::new(g.clone(), p.to_vec())?;
    classify_inner(&chain, x, cfg, Subject::Semigroup)
}

fn classify_inner(
    chain: &MarkovChain,
    x: &Rational,
    cfg: &ClassifyConfig,
    subject: Subject,
) -> Result<RecurrenceVerdict> {
    check_point(x, &cfg.eps)?;
    chain.require_non_degenerate()?;
    let g = chain.generators();
    let n = cfg.horizon;
    let b = chain_ball(g, x, &cfg.eps)?;
    let window = cfg.window();
    match cfg.mode {
        Mode::Exact => {
            let (masses, word) = chain.return_masses(x, &b, n, &cfg.limits)?;
            let return_times: Vec<usize> = (1..=n).filter(|&k| masses[k].is_positive()).collect();
            let recurrent = match return_times.first() {
                Some(&time) => Certificate::Certified { time, word },
                None => Certificate::NoneWithinHorizon,
            };
            let weak = weak_certificate(g, &b, &recurrent, n, &cfg.limits)?;
            let uniform_value = match subject {
                Subject::Semigroup if !is_uniform(chain.probs()) => {
                    let ks = kappa_sequence(g, x, &b, n, &cfg.limits)?;
                    let mut kappas: Vec<Rational> = vec![Rational::zero()];
                    kappas.extend(ks.into_iter().map(|r| r.kappa));
                    window_min(&kappas, window)
                }
                _ => window_min(&masses, window),
            };
            let uniform = UniformEstimate::new(window, uniform_value, cfg.threshold.clone());
            let weak_uniform = if cfg.grid_points == 0 {
                None
            } else {
                let grid = ball_grid(x, &cfg.eps, &b, cfg.grid_points);
                let best = grid
                    .par_iter()
                    .map(|y| Ok(window_min(&chain.return_masses(y, &b, n, &cfg.limits)?.0, window)))
                    .collect::<Result<Vec<Rational>>>()?
                    .into_iter()
                    .max()
                    .unwrap_or_else(Rational::zero);
                Some(UniformEstimate::new(window, best, cfg.threshold.clone()))
            };
            Ok(RecurrenceVerdict {
                subject,
                x: x.clone(),
                eps: cfg.eps.clone(),
                horizon: n,
                ball: b,
                recurrent,
                weak,
                uniform_estimate: Some(uniform),
                weak_uniform_estimate: weak_uniform,
                return_times,
                mc: None,
            })
        }
        Mode::Mc(mc) => {
            let res = chain.mc_first_returns(x, &b, n, mc, &cfg.limits)?;
            let recurrent = match res.first() {
                Some((time, word)) => Certificate::Certified { time, word: Some(word.clone()) },
                None => Certificate::NoneWithinHorizon,
            };
            let weak = weak_certificate(g, &b, &recurrent, n, &cfg.limits)?;
            let return_times: BTreeSet<usize> = res
                .trials
                .iter()
                .filter_map(|t| match t {
                    crate::markov::Trial::Returned { time, .. } => Some(*time),
                    _ => None,
                })
                .collect();
            Ok(RecurrenceVerdict {
                subject,
                x: x.clone(),
                eps: cfg.eps.clone(),
                horizon: n,
                ball: b,
                recurrent,
                weak,
                uniform_estimate: None,
                weak_uniform_estimate: None,
                return_times: return_times.into_iter().collect(),
                mc: Some(McSummary {
                    seed: res.seed,
                    samples: res.samples,
                    returned: res.returned,
                    truncated: res.truncated,
                }),
            })
        }
    }
}

fn is_uniform(p: &[Rational]) -> bool {
    p.iter().all(|v| v == &p[0])
}
