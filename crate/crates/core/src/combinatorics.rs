//! Finite multivalued maps `G: Ω → 2^Ω \ {∅}` and the return lemma: some
//! `ω` satisfies `ω ∈ Gⁿ({ω})` with `n ≤ |Ω| + 1`.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::IntervalSet;
use crate::markov::MarkovChain;

pub const MAX_SIZE: usize = 64;
pub const MAX_EXHAUSTIVE: usize = 4;

/// Images stored as bitmask rows; element `i` is bit `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "MultimapRepr", into = "MultimapRepr")]
pub struct MultivaluedMap {
    rows: Vec<u64>,
}

/// 1-based element lists.
#[derive(Serialize, Deserialize)]
struct MultimapRepr {
    images: Vec<Vec<usize>>,
}

impl TryFrom<MultimapRepr> for MultivaluedMap {
    type Error = Error;

    fn try_from(r: MultimapRepr) -> Result<Self> {
        let m = r.images.len();
        let mut rows = Vec::with_capacity(m);
        for img in &r.images {
            let mut mask = 0u64;
            for &j in img {
                if j == 0 || j > m {
                    return Err(Error::InvalidArgument(format!("image element {j} outside 1..={m}")));
                }
                mask |= 1 << (j - 1);
            }
            rows.push(mask);
        }
        MultivaluedMap::from_rows(rows)
    }
}

impl From<MultivaluedMap> for MultimapRepr {
    fn from(g: MultivaluedMap) -> Self {
        MultimapRepr { images: (0..g.size()).map(|i| g.image(i).into_iter().map(|j| j + 1).collect()).collect() }
    }
}

impl MultivaluedMap {
    pub fn from_rows(rows: Vec<u64>) -> Result<Self> {
        let m = rows.len();
        if m == 0 || m > MAX_SIZE {
            return Err(Error::InvalidArgument(format!("multivalued map size {m} outside 1..={MAX_SIZE}")));
        }
        let full = full_mask(m);
        for (i, &r) in rows.iter().enumerate() {
            if r == 0 || r & !full != 0 {
                return Err(Error::InvalidArgument(format!("bad image for element {}", i + 1)));
            }
        }
        Ok(MultivaluedMap { rows })
    }

    /// From 0-based image lists.
    pub fn from_images(images: &[Vec<usize>]) -> Result<Self> {
        let m = images.len();
        let mut rows = Vec::with_capacity(m);
        for img in images {
            let mut mask = 0u64;
            for &j in img {
                if j >= m {
                    return Err(Error::InvalidArgument(format!("image element {j} outside 0..{m}")));
                }
                mask |= 1 << j;
            }
            rows.push(mask);
        }
        Self::from_rows(rows)
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn image(&self, i: usize) -> Vec<usize> {
        (0..self.size()).filter(|j| self.rows[i] >> j & 1 == 1).collect()
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    fn apply(&self, set: u64) -> u64 {
        let mut out = 0;
        let mut s = set;
        while s != 0 {
            let i = s.trailing_zeros() as usize;
            out |= self.rows[i];
            s &= s - 1;
        }
        out
    }
}

fn full_mask(m: usize) -> u64 {
    if m == 64 {
        u64::MAX
    } else {
        (1u64 << m) - 1
    }
}

/// `ω` (0-based) with `ω ∈ Gⁿ({ω})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct L1Witness {
    pub element: usize,
    pub n: usize,
}

/// Smallest `n`, then smallest `ω`.
pub fn l1_search(g: &MultivaluedMap) -> L1Witness {
    let m = g.size();
    let mut sets: Vec<u64> = (0..m).map(|i| 1u64 << i).collect();
    // The image sequences are eventually periodic, so a return shows up
    // within m + 1 steps.
    for n in 1..=m + 1 {
        for (w, s) in sets.iter_mut().enumerate() {
            *s = g.apply(*s);
            if *s >> w & 1 == 1 {
                return L1Witness { element: w, n };
            }
        }
    }
    unreachable!("multivalued map of size {m} without a return within {} steps", m + 1)
}

/// Replays a witness with plain sets.
pub fn verify_witness(g: &MultivaluedMap, w: L1Witness) -> bool {
    if w.element >= g.size() || w.n == 0 {
        return false;
    }
    let mut set: BTreeSet<usize> = BTreeSet::from([w.element]);
    for _ in 0..w.n {
        set = set.iter().flat_map(|&i| g.image(i)).collect();
    }
    set.contains(&w.element)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct L1Report {
    pub size: usize,
    pub instances: u64,
    pub failures: u64,
    pub max_n: usize,
}

/// Runs the search on every multivalued map of size `m`.
pub fn l1_exhaustive(m: usize) -> Result<L1Report> {
    if m == 0 || m > MAX_EXHAUSTIVE {
        return Err(Error::InvalidArgument(format!("exhaustive size {m} outside 1..={MAX_EXHAUSTIVE}")));
    }
    let base = (1u64 << m) - 1;
    let instances = base.pow(m as u32);
    let (failures, max_n) = (0..instances)
        .into_par_iter()
        .map(|mut idx| {
            let rows: Vec<u64> = (0..m)
                .map(|_| {
                    let r = idx % base + 1;
                    idx /= base;
                    r
                })
                .collect();
            let g = MultivaluedMap { rows };
            let w = l1_search(&g);
            let ok = w.n <= m + 1 && verify_witness(&g, w);
            (u64::from(!ok), w.n)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1.max(b.1)));
    Ok(L1Report { size: m, instances, failures, max_n })
}

/// `j ∈ G(i)` iff some generator with positive weight sends a point of
/// `C_i` into `C_j`.
pub fn cover_multimap(chain: &MarkovChain, cover: &[IntervalSet]) -> Result<MultivaluedMap> {
    if cover.is_empty() || cover.len() > MAX_SIZE {
        return Err(Error::InvalidArgument(format!("cover size {} outside 1..={MAX_SIZE}", cover.len())));
    }
    let mut union = IntervalSet::empty();
    for c in cover {
        if c.intervals().is_empty() {
            return Err(Error::InvalidArgument("empty cover element".into()));
        }
        union = union.union(c);
    }
    if union != IntervalSet::unit() {
        return Err(Error::InvalidArgument("cover does not cover [0, 1]".into()));
    }
    let active: Vec<_> = chain
        .generators()
        .maps()
        .iter()
        .zip(chain.probs())
        .filter(|(_, p)| p.is_positive())
        .map(|(t, _)| t)
        .collect();
    let rows = cover
        .par_iter()
        .map(|c| {
            let images: Vec<IntervalSet> = active.iter().map(|t| t.image(c)).collect();
            cover
                .iter()
                .enumerate()
                .filter(|(_, cj)| images.iter().any(|im| im.intersects(cj)))
                .fold(0u64, |acc, (j, _)| acc | 1 << j)
        })
        .collect();
    MultivaluedMap::from_rows(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalogue::examples::{example1, example2};
    use crate::geometry::{q, Interval};
    use crate::maps::{GeneratorSet, PiecewiseMap};

    #[test]
    fn small_cases() {
        let g = MultivaluedMap::from_images(&[vec![0]]).unwrap();
        assert_eq!(l1_search(&g), L1Witness { element: 0, n: 1 });
        let cyc = MultivaluedMap::from_images(&[vec![1], vec![2], vec![0]]).unwrap();
        assert_eq!(l1_search(&cyc).n, 3);
        let g = MultivaluedMap::from_images(&[vec![1], vec![0, 2], vec![2]]).unwrap();
        assert_eq!(l1_search(&g), L1Witness { element: 2, n: 1 });
        assert!(MultivaluedMap::from_images(&[vec![]]).is_err());
    }

    #[test]
    fn exhaustive_small() {
        let r = l1_exhaustive(1).unwrap();
        assert_eq!((r.instances, r.failures, r.max_n), (1, 0, 1));
        let r = l1_exhaustive(3).unwrap();
        assert_eq!((r.instances, r.failures), (343, 0));
        assert!(l1_exhaustive(5).is_err());
    }

    #[test]
    fn serde_is_one_based() {
        let g = MultivaluedMap::from_images(&[vec![1], vec![0, 1]]).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"images":[[2],[1,2]]}"#);
        assert_eq!(serde_json::from_str::<MultivaluedMap>(&s).unwrap(), g);
    }

    fn dyadic_cover(n: i64) -> Vec<IntervalSet> {
        (0..n)
            .map(|j| {
                let iv = if j + 1 == n {
                    Interval::closed(q(j, n), q(1, 1))
                } else {
                    Interval::closed_open(q(j, n), q(j + 1, n))
                };
                IntervalSet::from_interval(iv)
            })
            .collect()
    }

    #[test]
    fn covers() {
        let id = MarkovChain::uniform(GeneratorSet::single(PiecewiseMap::identity()));
        let g = cover_multimap(&id, &dyadic_cover(4)).unwrap();
        assert!((0..4).all(|i| g.image(i).contains(&i)));
        assert_eq!(l1_search(&g).n, 1);

        let e1 = MarkovChain::uniform(GeneratorSet::single(example1().unwrap()));
        let g = cover_multimap(&e1, &dyadic_cover(8)).unwrap();
        assert!(verify_witness(&g, l1_search(&g)));

        let e2 = MarkovChain::uniform(example2().unwrap());
        let halves = vec![
            IntervalSet::from_interval(Interval::closed_open(q(0, 1), q(1, 2))),
            IntervalSet::from_interval(Interval::closed(q(1, 2), q(1, 1))),
        ];
        let g = cover_multimap(&e2, &halves).unwrap();
        assert_eq!(l1_search(&g).n, 1);
        assert!(cover_multimap(&e2, &halves[..1]).is_err());
    }
}
