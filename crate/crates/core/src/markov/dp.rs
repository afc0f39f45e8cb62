//! Word dynamic programming over the tree of trajectories.
//!
//! Level `n` holds the distinct endpoints of all length-`n` words together
//! with integer weights: with weights `a_i / L` the mass of an atom is
//! `weight / L^n`, and with unit weights it is the number of words landing
//! there. When the number of distinct atoms outgrows the budget the remaining
//! depth is enumerated depth-first from the last stored level.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigUint;
use rayon::prelude::*;

use super::chain::IntegerWeights;
use crate::error::{Error, Result};
use crate::geometry::{IntervalSet, Rational};
use crate::limits::Limits;
use crate::maps::{GeneratorSet, Word};

pub(crate) struct Level {
    pub points: Vec<Rational>,
    pub weights: Vec<BigUint>,
    /// `(index in previous level, letter)` for each atom.
    pub parents: Vec<(u32, u32)>,
}

impl Level {
    fn root(x: &Rational) -> Self {
        Level {
            points: vec![x.clone()],
            weights: vec![BigUint::from(1u32)],
            parents: vec![(0, 0)],
        }
    }
}

fn step(gens: &GeneratorSet, w: &IntegerWeights, level: &Level, limits: &Limits) -> Result<Level> {
    let mut index: HashMap<Rational, usize> = HashMap::with_capacity(level.points.len() * 2);
    let mut next = Level { points: Vec::new(), weights: Vec::new(), parents: Vec::new() };
    for (j, (x, wt)) in level.points.iter().zip(&level.weights).enumerate() {
        for (i, t) in gens.maps().iter().enumerate() {
            if w.numer[i] == 0 {
                continue;
            }
            let y = t.eval_capped(x, limits.bit_cap)?;
            let add = wt * w.numer[i];
            match index.get(&y) {
                Some(&k) => next.weights[k] += add,
                None => {
                    if next.points.len() >= limits.atom_budget {
                        return Err(Error::Budget(format!(
                            "more than {} distinct atoms",
                            limits.atom_budget
                        )));
                    }
                    index.insert(y.clone(), next.points.len());
                    next.points.push(y);
                    next.weights.push(add);
                    next.parents.push((j as u32, i as u32));
                }
            }
        }
    }
    Ok(next)
}

/// Exact `n`-step level, refusing to exceed the atom budget.
pub(crate) fn level_at(
    gens: &GeneratorSet,
    w: &IntegerWeights,
    x: &Rational,
    n: usize,
    limits: &Limits,
) -> Result<Level> {
    let mut level = Level::root(x);
    for _ in 0..n {
        level = step(gens, w, &level, limits)?;
    }
    Ok(level)
}

/// Per-time weight of the trajectories that end in a target set.
#[derive(Clone, Debug)]
pub(crate) struct HitProfile {
    /// `totals[n]` for `n = 0..=horizon`.
    pub totals: Vec<BigUint>,
    /// Shortest word (then first in enumeration order) ending in the target.
    pub first_hit: Option<Word>,
    /// Number of levels stored breadth-first before switching to depth-first.
    #[cfg_attr(not(test), allow(dead_code))]
    pub stored_levels: usize,
}

fn reconstruct(history: &[Vec<(u32, u32)>], level: usize, mut idx: usize) -> Vec<usize> {
    let mut rev = Vec::with_capacity(level);
    for l in (1..=level).rev() {
        let (p, letter) = history[l][idx];
        rev.push(letter as usize);
        idx = p as usize;
    }
    rev.reverse();
    rev
}

struct DfsOut {
    sums: Vec<u128>,
    best: Option<Vec<usize>>,
}

struct DfsCtx<'a> {
    gens: &'a GeneratorSet,
    w: &'a IntegerWeights,
    target: &'a IntervalSet,
    limits: &'a Limits,
    work: &'a AtomicU64,
    witness: bool,
}

impl DfsCtx<'_> {
    fn run(&self, x: &Rational, depth: usize) -> Result<DfsOut> {
        let mut out = DfsOut { sums: vec![0; depth + 1], best: None };
        let mut path = Vec::with_capacity(depth);
        self.visit(x, 1, depth, &mut path, &mut out)?;
        Ok(out)
    }

    fn visit(
        &self,
        x: &Rational,
        weight: u128,
        remaining: usize,
        path: &mut Vec<usize>,
        out: &mut DfsOut,
    ) -> Result<()> {
        if remaining == 0 {
            return Ok(());
        }
        let spent = self.work.fetch_add(self.gens.len() as u64, Ordering::Relaxed);
        if spent > self.limits.work_budget {
            return Err(Error::Budget(format!(
                "more than {} evaluations in word enumeration",
                self.limits.work_budget
            )));
        }
        for (i, t) in self.gens.maps().iter().enumerate() {
            if self.w.numer[i] == 0 {
                continue;
            }
            let y = t.eval_capped(x, self.limits.bit_cap)?;
            let wt = weight
                .checked_mul(self.w.numer[i] as u128)
                .ok_or_else(|| Error::Budget("word weight overflows 128 bits".into()))?;
            path.push(i);
            let d = path.len();
            if self.target.contains(&y) {
                out.sums[d] = out.sums[d]
                    .checked_add(wt)
                    .ok_or_else(|| Error::Budget("weight sum overflows 128 bits".into()))?;
                if self.witness && out.best.as_ref().is_none_or(|b| b.len() > d) {
                    out.best = Some(path.clone());
                }
            }
            self.visit(&y, wt, remaining - 1, path, out)?;
            path.pop();
        }
        Ok(())
    }
}

/// Weight of trajectories from `x` ending in `target` at every time up to
/// `horizon`, plus the shortest witnessing word when `witness` is set.
pub(crate) fn hit_profile(
    gens: &GeneratorSet,
    w: &IntegerWeights,
    x: &Rational,
    target: &IntervalSet,
    horizon: usize,
    limits: &Limits,
    witness: bool,
) -> Result<HitProfile> {
    let mut totals = vec![BigUint::default(); horizon + 1];
    if target.contains(x) {
        totals[0] = BigUint::from(1u32);
    }
    let mut first_hit: Option<Word> = None;
    let mut history: Vec<Vec<(u32, u32)>> = vec![vec![(0, 0)]];
    let mut level = Level::root(x);
    let mut n = 0;
    while n < horizon {
        match step(gens, w, &level, limits) {
            Ok(next) => {
                n += 1;
                for (k, (p, wt)) in next.points.iter().zip(&next.weights).enumerate() {
                    if target.contains(p) {
                        totals[n] += wt;
                        if witness && first_hit.is_none() {
                            first_hit = Some(Word::new(
                                reconstruct(&history, n - 1, next.parents[k].0 as usize)
                                    .into_iter()
                                    .chain([next.parents[k].1 as usize])
                                    .collect(),
                            ));
                        }
                    }
                }
                if witness {
                    history.push(next.parents.clone());
                }
                level = next;
            }
            Err(Error::Budget(_)) => break,
            Err(e) => return Err(e),
        }
    }
    let stored_levels = n;
    if n < horizon {
        let depth = horizon - n;
        let work = AtomicU64::new(0);
        let ctx = DfsCtx { gens, w, target, limits, work: &work, witness: witness && first_hit.is_none() };
        let outs: Vec<DfsOut> = level
            .points
            .par_iter()
            .map(|p| ctx.run(p, depth))
            .collect::<Result<_>>()?;
        let mut best: Option<(usize, usize, Vec<usize>)> = None;
        for (j, (out, wt)) in outs.iter().zip(&level.weights).enumerate() {
            for (d, s) in out.sums.iter().enumerate().skip(1) {
                if *s != 0 {
                    totals[n + d] += wt * BigUint::from(*s);
                }
            }
            if let Some(b) = &out.best {
                if best.as_ref().is_none_or(|(len, _, _)| b.len() < *len) {
                    best = Some((b.len(), j, b.clone()));
                }
            }
        }
        if let Some((_, j, suffix)) = best {
            let mut letters = if witness { reconstruct(&history, n, j) } else { Vec::new() };
            letters.extend(suffix);
            first_hit = Some(Word::new(letters));
        }
    }
    Ok(HitProfile { totals, first_hit, stored_levels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{q, Interval};
    use crate::maps::{Piece, PiecewiseMap};

    fn doubling_and_half() -> GeneratorSet {
        let dbl = PiecewiseMap::new(
            "2x",
            vec![
                Piece::affine(Interval::closed_open(q(0, 1), q(1, 2)), q(2, 1), q(0, 1)).unwrap(),
                Piece::affine(Interval::closed_open(q(1, 2), q(1, 1)), q(2, 1), q(-1, 1)).unwrap(),
            ],
            [(q(1, 1), q(0, 1))],
            false,
        )
        .unwrap();
        let half = PiecewiseMap::new(
            "x/2",
            vec![Piece::affine(Interval::unit(), q(1, 2), q(0, 1)).unwrap()],
            [],
            false,
        )
        .unwrap();
        GeneratorSet::new(vec![dbl, half]).unwrap()
    }

    #[test]
    fn counts_sum_to_all_words() {
        let g = doubling_and_half();
        let w = IntegerWeights::counting(2);
        let prof =
            hit_profile(&g, &w, &q(1, 3), &IntervalSet::unit(), 8, &Limits::default(), true).unwrap();
        for (n, t) in prof.totals.iter().enumerate() {
            assert_eq!(*t, BigUint::from(1u32 << n));
        }
        assert_eq!(prof.first_hit.unwrap().len(), 1);
    }

    #[test]
    fn depth_first_fallback_matches_breadth_first() {
        let g = doubling_and_half();
        let w = IntegerWeights { numer: vec![1, 3], denom: 4 };
        let target = IntervalSet::from_interval(Interval::closed(q(1, 8), q(1, 2)));
        let x = q(3, 7);
        let full = hit_profile(&g, &w, &x, &target, 10, &Limits::default(), true).unwrap();
        let tight = Limits { atom_budget: 5, ..Limits::default() };
        let hybrid = hit_profile(&g, &w, &x, &target, 10, &tight, true).unwrap();
        assert!(hybrid.stored_levels < 10);
        assert_eq!(full.totals, hybrid.totals);
        let (a, b) = (full.first_hit.unwrap(), hybrid.first_hit.unwrap());
        assert_eq!(a.len(), b.len());
        assert!(target.contains(&g.eval_word(&a, &x).unwrap()));
        assert!(target.contains(&g.eval_word(&b, &x).unwrap()));
    }

    #[test]
    fn witness_found_in_depth_first_phase() {
        let g = doubling_and_half();
        let w = IntegerWeights::counting(2);
        let target = IntervalSet::from_interval(Interval::closed(q(1, 2), q(1, 1)));
        let tight = Limits { atom_budget: 1, ..Limits::default() };
        let prof = hit_profile(&g, &w, &q(1, 5), &target, 6, &tight, true).unwrap();
        let full = hit_profile(&g, &w, &q(1, 5), &target, 6, &Limits::default(), true).unwrap();
        assert_eq!(prof.totals, full.totals);
        assert_eq!(prof.first_hit.as_ref().map(Word::len), full.first_hit.as_ref().map(Word::len));
        let word = prof.first_hit.unwrap();
        assert!(target.contains(&g.eval_word(&word, &q(1, 5)).unwrap()));
    }

    #[test]
    fn work_budget_is_enforced() {
        let g = doubling_and_half();
        let w = IntegerWeights::counting(2);
        let tight = Limits { atom_budget: 1, work_budget: 10, ..Limits::default() };
        let r = hit_profile(&g, &w, &q(1, 5), &IntervalSet::unit(), 12, &tight, false);
        assert!(matches!(r, Err(Error::Budget(_))));
    }
}
