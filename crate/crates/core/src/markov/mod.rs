//! The Markov chain induced by choosing generator `T_i` with probability
//! `p_i` at every step.

mod chain;
pub(crate) mod dp;
mod mc;

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

pub use chain::{compatibility_gamma, MarkovChain};
pub(crate) use chain::IntegerWeights;
pub use mc::{EmpiricalDistribution, McConfig, McReturns, Trial};

use crate::error::Result;
use crate::geometry::{IntervalSet, Rational};
use crate::limits::Limits;
use crate::maps::Word;
use crate::measures::{ulam_matrix, Measure};

/// Exact `Q^n(x, ·)` as a finite list of atoms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointDistribution {
    #[serde(with = "atoms")]
    atoms: BTreeMap<Rational, Rational>,
}

mod atoms {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::geometry::Rational;

    #[derive(Serialize, Deserialize)]
    struct Atom {
        point: Rational,
        mass: Rational,
    }

    pub fn serialize<S: Serializer>(
        m: &BTreeMap<Rational, Rational>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        m.iter()
            .map(|(p, w)| Atom { point: p.clone(), mass: w.clone() })
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<Rational, Rational>, D::Error> {
        Ok(Vec::<Atom>::deserialize(d)?.into_iter().map(|a| (a.point, a.mass)).collect())
    }
}

impl PointDistribution {
    pub fn dirac(x: Rational) -> Self {
        PointDistribution { atoms: BTreeMap::from([(x, Rational::one())]) }
    }

    pub fn atoms(&self) -> &BTreeMap<Rational, Rational> {
        &self.atoms
    }

    pub fn mass(&self, s: &IntervalSet) -> Rational {
        self.atoms.iter().filter(|(p, _)| s.contains(p)).map(|(_, m)| m).sum()
    }

    pub fn total(&self) -> Rational {
        self.atoms.values().sum()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// `weight / denom^n` as an exact rational.
pub(crate) fn scaled(weight: &BigUint, denom: u64, n: usize) -> Rational {
    if denom == 1 {
        return Rational::from_big(BigRational::from_integer(BigInt::from(weight.clone())));
    }
    let d = BigUint::from(denom).pow(n as u32);
    Rational::from_big(BigRational::new(BigInt::from(weight.clone()), BigInt::from(d)))
}

impl MarkovChain {
    /// Exact `Q^n(x, ·)` by deduplicating word DP.
    pub fn qn_distribution(&self, x: &Rational, n: usize, limits: &Limits) -> Result<PointDistribution> {
        let w = self.integer_weights()?;
        let level = dp::level_at(self.generators(), &w, x, n, limits)?;
        let atoms = level
            .points
            .into_iter()
            .zip(&level.weights)
            .map(|(p, wt)| (p, scaled(wt, w.denom, n)))
            .collect();
        Ok(PointDistribution { atoms })
    }

    /// `Q^n(x, S)` for `n = 0..=horizon`, with the shortest word from `x`
    /// into `S` of length at least one.
    pub fn return_masses(
        &self,
        x: &Rational,
        s: &IntervalSet,
        horizon: usize,
        limits: &Limits,
    ) -> Result<(Vec<Rational>, Option<Word>)> {
        let w = self.integer_weights()?;
        let prof = dp::hit_profile(self.generators(), &w, x, s, horizon, limits, true)?;
        let masses = prof.totals.iter().enumerate().map(|(n, t)| scaled(t, w.denom, n)).collect();
        Ok((masses, prof.first_hit))
    }

    /// Ulam projection of `Qμ` onto `n_bins` equal cells.
    pub fn act_on_measure(&self, mu: &Measure, n_bins: usize) -> Result<Measure> {
        let m = ulam_matrix(self, n_bins)?;
        let v = mu.bin_weights(n_bins)?;
        Measure::density(m.left_multiply(&v))
    }
}
