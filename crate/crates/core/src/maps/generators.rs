use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::piecewise::PiecewiseMap;
use crate::error::{Error, Result};
use crate::geometry::{Rational, DEFAULT_BIT_CAP};

/// A word over the generators. Letters are stored 0-based and shown
/// 1-based; the first letter is applied first.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(letters: Vec<usize>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// From 1-based letters, as written in the literature and on the CLI.
    pub fn from_one_based(letters: &[usize]) -> Result<Self> {
        letters
            .iter()
            .map(|&l| {
                l.checked_sub(1)
                    .ok_or_else(|| Error::InvalidArgument("word letters start at 1".into()))
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|l| l + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, letter: usize) {
        self.0.push(letter);
    }

    /// Parses `"1,2,2"` (1-based); the empty string is the empty word.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Word::empty());
        }
        let letters = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad word letter `{t}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Word::from_one_based(&letters)
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.one_based())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.one_based().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let letters = Vec::<usize>::deserialize(d)?;
        Word::from_one_based(&letters).map_err(serde::de::Error::custom)
    }
}

/// The generators `T_1, …, T_d` of a free semigroup of interval maps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GeneratorSet {
    maps: Vec<PiecewiseMap>,
}

impl GeneratorSet {
    pub fn new(maps: Vec<PiecewiseMap>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::InvalidArgument("a generator set needs at least one map".into()));
        }
        Ok(GeneratorSet { maps })
    }

    pub fn single(map: PiecewiseMap) -> Self {
        GeneratorSet { maps: vec![map] }
    }

    pub fn maps(&self) -> &[PiecewiseMap] {
        &self.maps
    }

    pub fn get(&self, i: usize) -> &PiecewiseMap {
        &self.maps[i]
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.maps.iter().map(PiecewiseMap::label).collect()
    }

    pub fn is_affine(&self) -> bool {
        self.maps.iter().all(PiecewiseMap::is_affine)
    }

    pub fn is_circle(&self) -> bool {
        self.maps.iter().any(PiecewiseMap::is_circle)
    }

    fn check_word(&self, w: &Word) -> Result<()> {
        match w.letters().iter().find(|&&l| l >= self.maps.len()) {
            Some(l) => Err(Error::InvalidArgument(format!(
                "word letter {} outside 1..={}",
                l + 1,
                self.maps.len()
            ))),
            None => Ok(()),
        }
    }

    /// Materializes `T_{w_n} ∘ ⋯ ∘ T_{w_1}`.
    pub fn compose(&self, w: &Word, piece_budget: usize) -> Result<PiecewiseMap> {
        self.check_word(w)?;
        let mut acc = PiecewiseMap::identity();
        for &l in w.letters() {
            acc = acc.then(&self.maps[l], piece_budget)?;
        }
        Ok(acc)
    }

    /// Evaluates a word pointwise without materializing the composition.
    pub fn eval_word(&self, w: &Word, x: &Rational) -> Result<Rational> {
        self.eval_word_capped(w, x, DEFAULT_BIT_CAP)
    }

    pub fn eval_word_capped(&self, w: &Word, x: &Rational, bit_cap: u64) -> Result<Rational> {
        self.check_word(w)?;
        let mut y = x.clone();
        for &l in w.letters() {
            y = self.maps[l].eval_capped(&y, bit_cap)?;
        }
        Ok(y)
    }

    /// Same maps in a different order.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.maps.len()];
        for &i in order {
            if i >= seen.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidArgument("not a permutation".into()));
        }
        GeneratorSet::new(order.iter().map(|&i| self.maps[i].clone()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{q, Interval};
    use crate::maps::{Piece, Poly};

    fn square_and_one() -> GeneratorSet {
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
    fn empty_word_is_identity() {
        let g = square_and_one();
        let id = g.compose(&Word::empty(), 10).unwrap();
        assert_eq!(id.eval(&q(3, 7)).unwrap(), q(3, 7));
    }

    #[test]
    fn nonlinear_words_compose_when_breakpoints_stay_rational() {
        let g = square_and_one();
        let w = Word::parse("1,1").unwrap();
        assert_eq!(g.compose(&w, 10).unwrap().eval(&q(1, 2)).unwrap(), q(1, 16));
        assert_eq!(g.eval_word(&w, &q(1, 2)).unwrap(), q(1, 16));
        let c = g.compose(&Word::parse("2").unwrap(), 10).unwrap();
        assert_eq!(c.eval(&q(1, 5)).unwrap(), q(1, 1));
    }

    #[test]
    fn word_parsing() {
        assert_eq!(Word::parse("1, 2,2").unwrap().letters(), &[0, 1, 1]);
        assert!(Word::parse("0").is_err());
        assert!(Word::parse("a").is_err());
        let g = square_and_one();
        assert!(g.eval_word(&Word::parse("3").unwrap(), &q(0, 1)).is_err());
    }
}
