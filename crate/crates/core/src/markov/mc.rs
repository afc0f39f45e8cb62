use std::collections::BTreeMap;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chain::{IntegerWeights, MarkovChain};
use crate::error::{Error, Result};
use crate::geometry::{IntervalSet, Rational};
use crate::limits::Limits;
use crate::maps::Word;

/// Monte Carlo parameters. Sample `s` draws its letters from a generator
/// seeded with `seed ^ s`, so results do not depend on scheduling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub seed: u64,
    pub samples: usize,
}

impl McConfig {
    fn rng(&self, s: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ s as u64)
    }
}

/// Draws a letter with probability `numer[i] / denom` exactly.
fn draw(rng: &mut ChaCha8Rng, w: &IntegerWeights) -> usize {
    let zone = u64::MAX - u64::MAX % w.denom;
    let r = loop {
        let v = rng.next_u64();
        if v < zone {
            break v % w.denom;
        }
    };
    let mut acc = 0u64;
    for (i, &a) in w.numer.iter().enumerate() {
        acc += a;
        if r < acc {
            return i;
        }
    }
    unreachable!("weights sum to the denominator")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    pub seed: u64,
    pub samples: usize,
    /// Endpoint counts, serialized as `[point, count]` pairs.
    #[serde(with = "pairs")]
    pub counts: BTreeMap<Rational, u64>,
}

mod pairs {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::geometry::Rational;

    pub fn serialize<S: Serializer>(m: &BTreeMap<Rational, u64>, s: S) -> Result<S::Ok, S::Error> {
        m.iter().collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<Rational, u64>, D::Error> {
        Ok(Vec::<(Rational, u64)>::deserialize(d)?.into_iter().collect())
    }
}

/// Outcome of one sampled trajectory that stops at its first return.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Trial {
    Returned { time: usize, word: Word },
    NoReturn,
    /// The orbit outgrew the rational bit cap before returning.
    Truncated { at: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct McReturns {
    pub seed: u64,
    pub samples: usize,
    pub returned: usize,
    pub truncated: usize,
    pub trials: Vec<Trial>,
}

impl McReturns {
    /// The earliest return over all trials, ties broken by sample index.
    pub fn first(&self) -> Option<(usize, &Word)> {
        self.trials
            .iter()
            .filter_map(|t| match t {
                Trial::Returned { time, word } => Some((*time, word)),
                _ => None,
            })
            .min_by_key(|(t, _)| *t)
    }
}

impl MarkovChain {
    /// Empirical `n`-step distribution from `samples` independent runs.
    pub fn mc_distribution(
        &self,
        x: &Rational,
        n: usize,
        cfg: McConfig,
        limits: &Limits,
    ) -> Result<EmpiricalDistribution> {
        let w = self.integer_weights()?;
        let ends: Vec<Rational> = (0..cfg.samples)
            .into_par_iter()
            .map(|s| {
                let mut rng = cfg.rng(s);
                let mut y = x.clone();
                for _ in 0..n {
                    let i = draw(&mut rng, &w);
                    y = self.generators().get(i).eval_capped(&y, limits.bit_cap)?;
                }
                Ok(y)
            })
            .collect::<Result<_>>()?;
        let mut counts = BTreeMap::new();
        for y in ends {
            *counts.entry(y).or_insert(0) += 1;
        }
        Ok(EmpiricalDistribution { seed: cfg.seed, samples: cfg.samples, counts })
    }

    /// Runs `samples` trajectories from `x` for at most `horizon` steps,
    /// stopping each at its first visit to `target`.
    pub fn mc_first_returns(
        &self,
        x: &Rational,
        target: &IntervalSet,
        horizon: usize,
        cfg: McConfig,
        limits: &Limits,
    ) -> Result<McReturns> {
        if cfg.samples == 0 {
            return Err(Error::InvalidArgument("Monte Carlo needs at least one sample".into()));
        }
        let w = self.integer_weights()?;
        let trials: Vec<Trial> = (0..cfg.samples)
            .into_par_iter()
            .map(|s| {
                let mut rng = cfg.rng(s);
                let mut y = x.clone();
                let mut word = Word::empty();
                for t in 1..=horizon {
                    let i = draw(&mut rng, &w);
                    word.push(i);
                    y = match self.generators().get(i).eval_capped(&y, limits.bit_cap) {
                        Ok(v) => v,
                        Err(Error::BitCap { .. }) => return Ok(Trial::Truncated { at: t }),
                        Err(e) => return Err(e),
                    };
                    if target.contains(&y) {
                        return Ok(Trial::Returned { time: t, word });
                    }
                }
                Ok(Trial::NoReturn)
            })
            .collect::<Result<_>>()?;
        let returned = trials.iter().filter(|t| matches!(t, Trial::Returned { .. })).count();
        let truncated = trials.iter().filter(|t| matches!(t, Trial::Truncated { .. })).count();
        Ok(McReturns { seed: cfg.seed, samples: cfg.samples, returned, truncated, trials })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_follow_integer_weights() {
        let w = IntegerWeights { numer: vec![1, 3], denom: 4 };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let ones = (0..40_000).filter(|_| draw(&mut rng, &w) == 1).count();
        assert!((29_000..31_000).contains(&ones), "{ones}");
    }

    #[test]
    fn zero_weight_letters_are_never_drawn() {
        let w = IntegerWeights { numer: vec![0, 1], denom: 1 };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!((0..1000).all(|_| draw(&mut rng, &w) == 1));
    }
}
