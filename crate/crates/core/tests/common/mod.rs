#![allow(dead_code)]

use std::collections::BTreeMap;

use proptest::prelude::*;
use semirec::catalogue::{build_example, ExampleParams, NAMES};
use semirec::geometry::{q, Interval, IntervalSet, Rational};
use semirec::maps::GeneratorSet;

pub fn example(name: &str) -> GeneratorSet {
    build_example(name, &ExampleParams::default()).unwrap()
}

pub fn all_examples() -> Vec<(&'static str, GeneratorSet)> {
    NAMES.iter().map(|(n, _)| (*n, example(n))).collect()
}

pub fn affine_examples() -> Vec<(&'static str, GeneratorSet)> {
    all_examples().into_iter().filter(|(_, g)| g.is_affine()).collect()
}

pub fn uniform(d: usize) -> Vec<Rational> {
    vec![Rational::new(1, d as i64); d]
}

/// Plain left-to-right evaluation of every word of length `n`, with the
/// product of its letter weights.
pub fn enumerate(g: &GeneratorSet, p: &[Rational], x: &Rational, n: usize) -> Vec<(Rational, Rational)> {
    let mut out = vec![(x.clone(), Rational::one())];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|(y, m)| {
                g.maps().iter().zip(p).map(move |(t, pi)| (t.eval(&y).unwrap(), &m * pi)).collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

pub fn enumerate_distribution(
    g: &GeneratorSet,
    p: &[Rational],
    x: &Rational,
    n: usize,
) -> BTreeMap<Rational, Rational> {
    let mut atoms = BTreeMap::new();
    for (y, m) in enumerate(g, p, x, n) {
        let e = atoms.entry(y).or_insert_with(Rational::zero);
        *e = &*e + &m;
    }
    atoms
}

pub fn arb_point() -> impl Strategy<Value = Rational> {
    (0i64..=96).prop_map(|k| q(k, 96))
}

pub fn arb_interval() -> impl Strategy<Value = Interval> {
    (0i64..=48, 0i64..=48, any::<bool>(), any::<bool>()).prop_filter_map("empty", |(a, b, lc, hc)| {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if lo == hi {
            Some(Interval::point(q(lo, 48)))
        } else {
            Interval::new(q(lo, 48), q(hi, 48), lc, hc)
        }
    })
}

pub fn arb_set() -> impl Strategy<Value = IntervalSet> {
    prop::collection::vec(arb_interval(), 0..4).prop_map(IntervalSet::from_intervals)
}

pub fn arb_eps() -> impl Strategy<Value = Rational> {
    prop::sample::select(vec![q(1, 4), q(1, 10), q(1, 16), q(1, 50), q(1, 64)])
}
