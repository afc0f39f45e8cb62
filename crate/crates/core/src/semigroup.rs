//! Trajectory counting for the free semigroup generated by a finite set of
//! maps, and rebasing onto another generating set of words.

use std::fmt::Write;

use num_bigint::BigUint;
use serde::{Serialize, Serializer};

pub use crate::maps::GeneratorSet;

use crate::error::{Error, Result};
use crate::geometry::{IntervalSet, Rational};
use crate::limits::Limits;
use crate::maps::Word;
use crate::markov::{dp, scaled, IntegerWeights, MarkovChain, McConfig};

fn as_string<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// `N(x, A, n)` for `n = 0..=horizon`: the number of words of each length
/// sending `x` into `A`.
pub fn count_profile(
    g: &GeneratorSet,
    x: &Rational,
    a: &IntervalSet,
    horizon: usize,
    limits: &Limits,
) -> Result<Vec<BigUint>> {
    let w = IntegerWeights::counting(g.len());
    Ok(dp::hit_profile(g, &w, x, a, horizon, limits, false)?.totals)
}

pub fn count_returns(
    g: &GeneratorSet,
    x: &Rational,
    a: &IntervalSet,
    n: usize,
    limits: &Limits,
) -> Result<BigUint> {
    Ok(count_profile(g, x, a, n, limits)?.pop().expect("horizon entry"))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KappaRow {
    pub n: usize,
    #[serde(serialize_with = "as_string")]
    pub count: BigUint,
    #[serde(serialize_with = "as_string")]
    pub total: BigUint,
    pub kappa: Rational,
}

/// `κ_n = N(x, O, n) / d^n` for `n = 1..=horizon`.
pub fn kappa_sequence(
    g: &GeneratorSet,
    x: &Rational,
    o: &IntervalSet,
    horizon: usize,
    limits: &Limits,
) -> Result<Vec<KappaRow>> {
    let counts = count_profile(g, x, o, horizon, limits)?;
    let d = g.len() as u64;
    Ok(counts
        .into_iter()
        .enumerate()
        .skip(1)
        .map(|(n, count)| KappaRow {
            n,
            kappa: scaled(&count, d, n),
            total: BigUint::from(d).pow(n as u32),
            count,
        })
        .collect())
}

pub fn kappa(g: &GeneratorSet, x: &Rational, o: &IntervalSet, n: usize, limits: &Limits) -> Result<Rational> {
    if n == 0 {
        return Err(Error::InvalidArgument("κ needs n ≥ 1".into()));
    }
    Ok(kappa_sequence(g, x, o, n, limits)?.pop().expect("nonempty").kappa)
}

/// Sampled estimate of `κ_n`: the fraction of uniformly drawn words of length
/// `n` that end in `O`, as `(hits, samples)`.
pub fn kappa_mc(
    g: &GeneratorSet,
    x: &Rational,
    o: &IntervalSet,
    n: usize,
    cfg: McConfig,
    limits: &Limits,
) -> Result<(u64, usize)> {
    let chain = MarkovChain::uniform(g.clone());
    let emp = chain.mc_distribution(x, n, cfg, limits)?;
    let hits = emp.counts.iter().filter(|(p, _)| o.contains(p)).map(|(_, c)| *c).sum();
    Ok((hits, emp.samples))
}

/// CSV with columns `n,count,total,kappa`.
pub fn kappa_csv(rows: &[KappaRow]) -> String {
    let mut s = String::from("n,count,total,kappa\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{}", r.n, r.count, r.total, r.kappa);
    }
    s
}

/// New generators `T̃_j = T_{w_j}` with weights `∏ p` over the letters of
/// `w_j`, renormalized to sum to one.
pub fn rebase_generators(
    g: &GeneratorSet,
    p: &[Rational],
    words: &[Word],
    limits: &Limits,
) -> Result<(GeneratorSet, Vec<Rational>)> {
    if p.len() != g.len() {
        return Err(Error::InvalidArgument(format!(
            "{} probabilities for {} generators",
            p.len(),
            g.len()
        )));
    }
    if p.iter().any(|v| !v.is_positive()) {
        return Err(Error::Degenerate("rebasing needs every p_i > 0".into()));
    }
    if words.is_empty() || words.iter().any(Word::is_empty) {
        return Err(Error::InvalidArgument("rebasing needs nonempty words".into()));
    }
    let maps = words
        .iter()
        .map(|w| {
            let label = format!("T{:?}", w);
            Ok(g.compose(w, limits.piece_budget)?.with_label(label))
        })
        .collect::<Result<Vec<_>>>()?;
    let raw: Vec<Rational> = words
        .iter()
        .map(|w| w.letters().iter().fold(Rational::one(), |acc, &l| acc * &p[l]))
        .collect();
    let total: Rational = raw.iter().sum();
    let weights = raw.iter().map(|r| r / &total).collect();
    Ok((GeneratorSet::new(maps)?, weights))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{q, Interval};
    use crate::maps::{Piece, PiecewiseMap, Poly};

    fn qu() -> GeneratorSet {
        let sq = PiecewiseMap::new(
            "x^2",
            vec![Piece::new(Interval::unit(), Poly::new(vec![q(0, 1), q(0, 1), q(1, 1)])).unwrap()],
            [],
            false,
        )
        .unwrap();
        GeneratorSet::new(vec![sq, PiecewiseMap::constant(q(1, 1)).unwrap()]).unwrap()
    }

    #[test]
    fn counts_for_squares_and_one() {
        let g = qu();
        let l = Limits::default();
        for n in 1..=10 {
            assert_eq!(count_returns(&g, &q(0, 1), &IntervalSet::point(q(0, 1)), n, &l).unwrap(), BigUint::from(1u32));
            assert_eq!(
                count_returns(&g, &q(1, 3), &IntervalSet::unit(), n, &l).unwrap(),
                BigUint::from(1u32) << n
            );
        }
        let ks = kappa_sequence(&g, &q(1, 1), &IntervalSet::point(q(1, 1)), 6, &l).unwrap();
        assert!(ks.iter().all(|r| r.kappa == q(1, 1)));
        assert!(kappa_csv(&ks).starts_with("n,count,total,kappa\n1,2,2,1\n"));
    }

    #[test]
    fn rebase_onto_the_same_letters() {
        let g = qu();
        let p = vec![q(1, 3), q(2, 3)];
        let words = vec![Word::new(vec![0]), Word::new(vec![1])];
        let (h, pt) = rebase_generators(&g, &p, &words, &Limits::default()).unwrap();
        assert_eq!(pt, p);
        assert_eq!(h.get(0).eval(&q(1, 2)).unwrap(), q(1, 4));
        let (c, w) = rebase_generators(&g, &p, &[Word::new(vec![1])], &Limits::default()).unwrap();
        assert_eq!(w, vec![q(1, 1)]);
        assert_eq!(c.get(0).eval(&q(1, 7)).unwrap(), q(1, 1));
        assert!(rebase_generators(&g, &p, &[Word::empty()], &Limits::default()).is_err());
        assert!(rebase_generators(&g, &[q(0, 1), q(1, 1)], &words, &Limits::default()).is_err());
    }
}
