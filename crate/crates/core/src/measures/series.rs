use serde::{Deserialize, Serialize};

use super::measure::Measure;
use crate::error::{Error, Result};
use crate::geometry::{IntervalSet, Rational};
use crate::limits::Limits;
use crate::maps::{GeneratorSet, PiecewiseMap, Word};
use crate::markov::MarkovChain;

/// Heuristic reading of a finite run of partial sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    LinearGrowth,
    Bounded,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    /// Index of the first term.
    pub start: usize,
    pub terms: Vec<Rational>,
    pub partial_sums: Vec<Rational>,
    /// Reference mass of the set, used to scale the growth threshold.
    pub set_mass: Rational,
    pub slope: f64,
    pub trend: Trend,
}

impl SeriesReport {
    fn from_terms(start: usize, terms: Vec<Rational>, set_mass: Rational) -> Self {
        let mut acc = Rational::zero();
        let partial_sums: Vec<Rational> = terms
            .iter()
            .map(|t| {
                acc = &acc + t;
                acc.clone()
            })
            .collect();
        let (trend, slope) = trend_tag(start, &partial_sums, &set_mass);
        SeriesReport { start, terms, partial_sums, set_mass, slope, trend }
    }

    pub fn last(&self) -> Rational {
        self.partial_sums.last().cloned().unwrap_or_else(Rational::zero)
    }
}

/// Least-squares slope of `ys` against `x0, x0 + 1, ...`.
pub fn least_squares_slope(x0: usize, ys: &[f64]) -> f64 {
    let n = ys.len() as f64;
    if ys.len() < 2 {
        return 0.0;
    }
    let mx = x0 as f64 + (n - 1.0) / 2.0;
    let my = ys.iter().sum::<f64>() / n;
    let (mut num, mut den) = (0.0, 0.0);
    for (k, y) in ys.iter().enumerate() {
        let dx = (x0 + k) as f64 - mx;
        num += dx * (y - my);
        den += dx * dx;
    }
    num / den
}

/// Bounded when the last half of the partial sums is constant, linear growth
/// when the fitted slope reaches half the set's reference mass.
pub fn trend_tag(start: usize, partial_sums: &[Rational], set_mass: &Rational) -> (Trend, f64) {
    let ys: Vec<f64> = partial_sums.iter().map(Rational::to_f64).collect();
    let slope = least_squares_slope(start, &ys);
    let n = partial_sums.len();
    if n >= 2 {
        let tail = &partial_sums[n - 1 - n / 2..];
        if tail.iter().all(|s| s == &tail[0]) {
            return (Trend::Bounded, slope);
        }
    }
    if slope > 0.0 && slope >= 0.5 * set_mass.to_f64() {
        (Trend::LinearGrowth, slope)
    } else {
        (Trend::Undetermined, slope)
    }
}

fn check_horizon(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidArgument("series horizon must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `Σ_{n=1}^{N} m(T^{-n} A)` by iterated exact preimages.
pub fn poincare_partial_sums(
    t: &PiecewiseMap,
    m: &Measure,
    a: &IntervalSet,
    n: usize,
    limits: &Limits,
) -> Result<SeriesReport> {
    check_horizon(n)?;
    let mut current = a.clone();
    let mut terms = Vec::with_capacity(n);
    for _ in 0..n {
        current = t.preimage(&current)?;
        current.check_size(limits.set_budget)?;
        terms.push(m.measure_of(&current));
    }
    Ok(SeriesReport::from_terms(1, terms, m.measure_of(a)))
}

/// `Σ_{n=1}^{N} m(Q^{-n}(A) ∩ A)`.
pub fn chain_return_sums(
    chain: &MarkovChain,
    m: &Measure,
    a: &IntervalSet,
    n: usize,
    limits: &Limits,
) -> Result<SeriesReport> {
    check_horizon(n)?;
    chain.require_non_degenerate()?;
    let mut current = a.clone();
    let mut terms = Vec::with_capacity(n);
    for _ in 0..n {
        current = chain.q_preimage(&current, 1, limits)?;
        terms.push(m.measure_of(&current.intersect(a)));
    }
    Ok(SeriesReport::from_terms(1, terms, m.measure_of(a)))
}

/// Per-generator sums `Σ_{n=0}^{N} m(T_i^{-n} A)`, one report per generator.
pub fn naive_generator_sums(
    g: &GeneratorSet,
    m: &Measure,
    a: &IntervalSet,
    n: usize,
    limits: &Limits,
) -> Result<Vec<SeriesReport>> {
    g.maps()
        .iter()
        .map(|t| {
            let mut current = a.clone();
            let mut terms = vec![m.measure_of(a)];
            for _ in 0..n {
                current = t.preimage(&current)?;
                current.check_size(limits.set_budget)?;
                terms.push(m.measure_of(&current));
            }
            Ok(SeriesReport::from_terms(0, terms, m.measure_of(a)))
        })
        .collect()
}

/// `Σ_{n=1}^{|w|} m(C_n^{-1} A)` where `C_n` applies the first `n` letters.
pub fn naive_sequence_sums(
    g: &GeneratorSet,
    m: &Measure,
    a: &IntervalSet,
    sequence: &Word,
    limits: &Limits,
) -> Result<SeriesReport> {
    check_horizon(sequence.len())?;
    let mut comp = PiecewiseMap::identity();
    let mut terms = Vec::with_capacity(sequence.len());
    for &l in sequence.letters() {
        if l >= g.len() {
            return Err(Error::InvalidArgument(format!("index {} outside 1..={}", l + 1, g.len())));
        }
        comp = comp.then(g.get(l), limits.piece_budget)?;
        terms.push(m.measure_of(&comp.preimage(a)?));
    }
    Ok(SeriesReport::from_terms(1, terms, m.measure_of(a)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_line() {
        let ys: Vec<f64> = (0..10).map(|k| 3.0 * k as f64 + 1.0).collect();
        assert!((least_squares_slope(4, &ys) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn tags() {
        use crate::geometry::q;
        let flat = vec![q(1, 2); 6];
        assert_eq!(trend_tag(1, &flat, &q(1, 4)).0, Trend::Bounded);
        let growing: Vec<Rational> = (1..=6).map(|k| q(k, 2)).collect();
        assert_eq!(trend_tag(1, &growing, &q(1, 2)).0, Trend::LinearGrowth);
        let slow: Vec<Rational> = (1..=6).map(|k| q(k, 100)).collect();
        assert_eq!(trend_tag(1, &slow, &q(1, 2)).0, Trend::Undetermined);
    }
}
