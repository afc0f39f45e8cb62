use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{IntervalSet, Rational};
use crate::limits::Limits;
use crate::maps::GeneratorSet;

/// The Markov chain induced by a generator set and a probability vector:
/// from `x` it jumps to `T_i x` with probability `p_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkovChain {
    generators: GeneratorSet,
    probs: Vec<Rational>,
}

/// Probabilities written over a common denominator: `p_i = numer[i] / denom`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct IntegerWeights {
    pub numer: Vec<u64>,
    pub denom: u64,
}

impl IntegerWeights {
    /// Unit weights: the DP then counts words instead of summing masses.
    pub fn counting(d: usize) -> Self {
        IntegerWeights { numer: vec![1; d], denom: 1 }
    }
}

impl MarkovChain {
    pub fn new(generators: GeneratorSet, probs: Vec<Rational>) -> Result<Self> {
        if probs.len() != generators.len() {
            return Err(Error::InvalidArgument(format!(
                "{} probabilities for {} generators",
                probs.len(),
                generators.len()
            )));
        }
        if probs.iter().any(Rational::is_negative) {
            return Err(Error::InvalidArgument("negative probability".into()));
        }
        let total: Rational = probs.iter().sum();
        if total != Rational::one() {
            return Err(Error::InvalidArgument(format!("probabilities sum to {total}, not 1")));
        }
        let chain = MarkovChain { generators, probs };
        chain.integer_weights()?;
        Ok(chain)
    }

    pub fn uniform(generators: GeneratorSet) -> Self {
        let d = generators.len() as i64;
        let probs = vec![Rational::new(1, d); generators.len()];
        MarkovChain { generators, probs }
    }

    pub fn generators(&self) -> &GeneratorSet {
        &self.generators
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// All probabilities strictly positive.
    pub fn is_non_degenerate(&self) -> bool {
        self.probs.iter().all(Rational::is_positive)
    }

    pub fn require_non_degenerate(&self) -> Result<()> {
        if self.is_non_degenerate() {
            Ok(())
        } else {
            Err(Error::Degenerate(format!(
                "recurrence analysis needs every p_i > 0, got {:?}",
                self.probs
            )))
        }
    }

    pub(crate) fn integer_weights(&self) -> Result<IntegerWeights> {
        let too_big = || Error::InvalidArgument("probability denominators exceed 64 bits".into());
        let mut denom: u64 = 1;
        for p in &self.probs {
            let d = p.denom().to_u64().ok_or_else(too_big)?;
            let l = denom.lcm(&d);
            denom = l;
        }
        let numer = self
            .probs
            .iter()
            .map(|p| {
                let scaled = p * &Rational::from_integer(denom as i64);
                scaled.numer().to_u64().ok_or_else(too_big)
            })
            .collect::<Result<Vec<_>>>()?;
        if denom > i64::MAX as u64 {
            return Err(too_big());
        }
        Ok(IntegerWeights { numer, denom })
    }

    /// One-step transition probability `Q(x, S) = Σ p_i 1_S(T_i x)`.
    pub fn q_value(&self, x: &Rational, s: &IntervalSet) -> Result<Rational> {
        let mut total = Rational::zero();
        for (t, p) in self.generators.maps().iter().zip(&self.probs) {
            if s.contains(&t.eval(x)?) {
                total = total + p;
            }
        }
        Ok(total)
    }

    /// `Q^{-t}(S) = {x : Q^t(x, S) > 0}`, computed as the iterated union of
    /// generator preimages.
    pub fn q_preimage(&self, s: &IntervalSet, t: usize, limits: &Limits) -> Result<IntervalSet> {
        self.require_non_degenerate()?;
        let mut current = s.clone();
        for _ in 0..t {
            let mut next = IntervalSet::empty();
            for map in self.generators.maps() {
                next = next.union(&map.preimage(&current)?);
            }
            next.check_size(limits.set_budget)?;
            current = next;
        }
        Ok(current)
    }

    /// The same generators with another probability vector.
    pub fn with_probs(&self, probs: Vec<Rational>) -> Result<Self> {
        MarkovChain::new(self.generators.clone(), probs)
    }
}

/// The largest `γ` with `γ Q̃ ≤ Q ≤ γ⁻¹ Q̃` guaranteed for any two chains
/// on the same generators: `min_i min(p_i / p̃_i, p̃_i / p_i)`.
pub fn compatibility_gamma(p: &[Rational], p_tilde: &[Rational]) -> Result<Rational> {
    if p.len() != p_tilde.len() || p.is_empty() {
        return Err(Error::InvalidArgument("probability vectors differ in length".into()));
    }
    if p.iter().chain(p_tilde).any(|v| !v.is_positive()) {
        return Err(Error::Degenerate(
            "compatibility is undefined when some probability is zero".into(),
        ));
    }
    let gamma = p
        .iter()
        .zip(p_tilde)
        .map(|(a, b)| {
            let r = a / b;
            let inv = r.recip();
            if r < inv {
                r
            } else {
                inv
            }
        })
        .min()
        .expect("nonempty");
    Ok(gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{q, Interval};
    use crate::maps::{Piece, PiecewiseMap};

    fn example2() -> GeneratorSet {
        let t1 = PiecewiseMap::new(
            "T1",
            vec![
                Piece::affine(Interval::closed_open(q(0, 1), q(1, 2)), q(1, 2), q(1, 4)).unwrap(),
                Piece::affine(Interval::closed_open(q(1, 2), q(1, 1)), q(1, 2), q(1, 2)).unwrap(),
            ],
            [(q(1, 1), q(0, 1))],
            false,
        )
        .unwrap();
        let t2 = PiecewiseMap::new(
            "T2",
            vec![
                Piece::affine(Interval::open_closed(q(0, 1), q(1, 2)), q(1, 2), q(0, 1)).unwrap(),
                Piece::affine(Interval::open_closed(q(1, 2), q(1, 1)), q(1, 2), q(1, 4)).unwrap(),
            ],
            [(q(0, 1), q(1, 1))],
            false,
        )
        .unwrap();
        GeneratorSet::new(vec![t1, t2]).unwrap()
    }

    #[test]
    fn q_value_examples() {
        let chain = MarkovChain::uniform(example2());
        assert_eq!(chain.q_value(&q(0, 1), &IntervalSet::unit()).unwrap(), q(1, 1));
        let left = IntervalSet::from_interval(Interval::closed(q(0, 1), q(1, 2)));
        assert_eq!(chain.q_value(&q(0, 1), &left).unwrap(), q(1, 2));
    }

    #[test]
    fn q_preimage_of_open_left_half() {
        let chain = MarkovChain::uniform(example2());
        let a = IntervalSet::from_interval(Interval::open(q(0, 1), q(1, 2)));
        let limits = Limits::default();
        assert_eq!(chain.q_preimage(&a, 0, &limits).unwrap(), a);
        assert_eq!(
            chain.q_preimage(&a, 1, &limits).unwrap(),
            IntervalSet::from_interval(Interval::closed(q(0, 1), q(1, 2)))
        );
    }

    #[test]
    fn gamma_examples() {
        let half = vec![q(1, 2), q(1, 2)];
        assert_eq!(compatibility_gamma(&half, &half).unwrap(), q(1, 1));
        assert_eq!(compatibility_gamma(&half, &[q(1, 4), q(3, 4)]).unwrap(), q(1, 2));
        assert!(matches!(
            compatibility_gamma(&half, &[q(0, 1), q(1, 1)]),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn probabilities_are_validated() {
        assert!(MarkovChain::new(example2(), vec![q(1, 2), q(1, 3)]).is_err());
        assert!(MarkovChain::new(example2(), vec![q(1, 1)]).is_err());
        let degenerate = MarkovChain::new(example2(), vec![q(0, 1), q(1, 1)]).unwrap();
        assert!(!degenerate.is_non_degenerate());
        assert!(degenerate.q_preimage(&IntervalSet::unit(), 1, &Limits::default()).is_err());
    }

    #[test]
    fn integer_weights_share_a_denominator() {
        let chain = MarkovChain::new(example2(), vec![q(1, 10), q(9, 10)]).unwrap();
        let w = chain.integer_weights().unwrap();
        assert_eq!(w.denom, 10);
        assert_eq!(w.numer, vec![1, 9]);
    }
}
