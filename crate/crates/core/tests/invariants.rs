//! Structural properties that must hold on every input.

mod common;

use common::*;
use proptest::prelude::*;
use semirec::classify::{classify_chain_point, classify_map_point, classify_semigroup_point, ClassifyConfig, RecurrenceVerdict};
use semirec::geometry::{q, Rational};
use semirec::maps::Word;
use semirec::markov::{compatibility_gamma, MarkovChain};
use semirec::measures::{stationary_components, ulam_matrix};
use semirec::semigroup::{count_returns, kappa, rebase_generators};
use semirec::Limits;

fn arb_probs() -> impl Strategy<Value = Vec<Rational>> {
    prop::sample::select(vec![vec![q(1, 2), q(1, 2)], vec![q(1, 10), q(9, 10)], vec![q(9, 10), q(1, 10)], vec![q(1, 3), q(2, 3)]])
}

fn two_generator() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["example2", "example3", "example4"])
}

fn flags(v: &RecurrenceVerdict) -> (Option<usize>, Option<usize>, Vec<usize>) {
    (v.recurrent.time(), v.weak.time(), v.return_times.clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn compatibility_sandwich(
        name in two_generator(),
        p in arb_probs(),
        pt in arb_probs(),
        x in arb_point(),
        s in arb_set(),
        n in 0usize..=5,
    ) {
        let g = example(name);
        let gamma = compatibility_gamma(&p, &pt).unwrap();
        let a = MarkovChain::new(g.clone(), p).unwrap().qn_distribution(&x, n, &Limits::default()).unwrap().mass(&s);
        let b = MarkovChain::new(g, pt).unwrap().qn_distribution(&x, n, &Limits::default()).unwrap().mass(&s);
        let gn = gamma.pow(n as u32);
        prop_assert!(&gn * &b <= a);
        prop_assert!(&gn * &a <= b);
    }

    #[test]
    fn positivity_pattern_ignores_weights(name in two_generator(), p in arb_probs(), x in arb_point(), n in 0usize..=6) {
        let g = example(name);
        let a = MarkovChain::uniform(g.clone()).qn_distribution(&x, n, &Limits::default()).unwrap();
        let b = MarkovChain::new(g, p).unwrap().qn_distribution(&x, n, &Limits::default()).unwrap();
        prop_assert!(a.atoms().keys().eq(b.atoms().keys()));
    }

    #[test]
    fn count_positivity_ignores_labels(name in two_generator(), x in arb_point(), s in arb_set(), n in 1usize..=6) {
        let g = example(name);
        let swapped = g.permuted(&[1, 0]).unwrap();
        let a = count_returns(&g, &x, &s, n, &Limits::default()).unwrap();
        let b = count_returns(&swapped, &x, &s, n, &Limits::default()).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn kappa_equals_chain_mass() {
    let limits = Limits::default();
    let mut runner = proptest::test_runner::TestRunner::new(ProptestConfig::with_cases(50));
    for (name, g) in affine_examples() {
        let chain = MarkovChain::uniform(g.clone());
        runner
            .run(&(arb_point(), arb_set(), 1usize..=8), |(x, o, n)| {
                let k = kappa(&g, &x, &o, n, &limits).unwrap();
                let m = chain.qn_distribution(&x, n, &limits).unwrap().mass(&o);
                prop_assert_eq!(k, m, "{}", name);
                Ok(())
            })
            .unwrap();
    }
}

#[test]
fn ulam_rows_are_stochastic() {
    for (name, g) in affine_examples() {
        let chain = MarkovChain::uniform(g);
        for bins in [2, 8, 12, 48] {
            let m = ulam_matrix(&chain, bins).unwrap();
            assert!(m.is_stochastic(), "{name} {bins}");
            for i in 0..bins {
                assert_eq!(m.row_sum(i), Rational::one());
            }
            for c in stationary_components(&m, 1e-10).unwrap() {
                let sum: f64 = c.values.iter().sum();
                assert!((sum - 1.0).abs() < 1e-9 && c.residual < 1e-10, "{name} {bins}");
            }
        }
    }
    assert!(ulam_matrix(&MarkovChain::uniform(example("doubling")), 10).is_err());
    assert!(ulam_matrix(&MarkovChain::uniform(example("example-qu")), 4).is_err());
}

fn sweep_case(name: &str, x: &Rational, eps: &Rational, n: usize) -> Result<(), TestCaseError> {
    let g = example(name);
    let limits = Limits::default();
    if g.len() == 1 {
        let t = g.get(0);
        let cfg = ClassifyConfig::new(eps.clone(), n).with_grid(8);
        let v = classify_map_point(t, x, &cfg).unwrap();
        prop_assert!(v.check_invariants().is_ok(), "{:?}", v.check_invariants());
        let longer = classify_map_point(t, x, &ClassifyConfig::new(eps.clone(), 2 * n).with_grid(0)).unwrap();
        if let Some(r) = v.recurrent.time() {
            prop_assert_eq!(longer.recurrent.time(), Some(r));
        }
        if let Some(w) = v.weak.time() {
            prop_assert!(longer.weak.time().is_some_and(|l| l <= w));
        }
        if g.is_affine() && n <= 40 {
            let c = classify_chain_point(&MarkovChain::uniform(g.clone()), x, &cfg.clone().with_grid(0)).unwrap();
            prop_assert_eq!(c.recurrent.time(), v.recurrent.time());
            prop_assert_eq!(c.weak.time(), v.weak.time());
            prop_assert_eq!(&c.return_times, &v.return_times);
        }
    } else {
        let n = n.min(12);
        let cfg = ClassifyConfig::new(eps.clone(), n).with_grid(2).with_limits(limits);
        // Squaring runs into the bit cap; that is a loud error, not a verdict.
        let v = match classify_semigroup_point(&g, &uniform(g.len()), x, &cfg) {
            Err(e) if e.is_resource() && !g.is_affine() => return Ok(()),
            r => r.unwrap(),
        };
        prop_assert!(v.check_invariants().is_ok(), "{:?}", v.check_invariants());
        let longer = match classify_chain_point(
            &MarkovChain::uniform(g.clone()),
            x,
            &ClassifyConfig::new(eps.clone(), n + 3).with_grid(0),
        ) {
            Err(e) if e.is_resource() && !g.is_affine() => return Ok(()),
            r => r.unwrap(),
        };
        prop_assert_eq!(longer.recurrent.time(), v.recurrent.time().or(longer.recurrent.time()));
        if let Some(w) = v.weak.time() {
            prop_assert!(longer.weak.time().is_some_and(|l| l <= w));
        }
        prop_assert!(v.return_times.iter().all(|t| longer.return_times.contains(t)));
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn verdict_sweep(
        name in prop::sample::select(vec![
            "eq2-map", "example1", "example1exp", "example-wu", "doubling", "identity", "rotation",
            "example2", "example3", "example4", "example-qu",
        ]),
        x in arb_point(),
        eps in arb_eps(),
        n in 2usize..=40,
    ) {
        sweep_case(name, &x, &eps, n)?;
    }
}

#[test]
fn flags_do_not_depend_on_weights() {
    let mut runner = proptest::test_runner::TestRunner::new(ProptestConfig::with_cases(50));
    for name in ["example2", "example3", "example4"] {
        let g = example(name);
        runner
            .run(&(arb_point(), arb_eps()), |(x, eps)| {
                let cfg = ClassifyConfig::new(eps, 12).with_grid(0);
                let base = classify_semigroup_point(&g, &uniform(2), &x, &cfg).unwrap();
                for p in [vec![q(1, 10), q(9, 10)], vec![q(9, 10), q(1, 10)]] {
                    let v = classify_semigroup_point(&g, &p, &x, &cfg).unwrap();
                    prop_assert_eq!(flags(&v), flags(&base));
                }
                Ok(())
            })
            .unwrap();
    }
}

#[test]
fn map_returns_keep_growing() {
    // Fine enough that transient early returns of non-recurrent points do
    // not produce certificates.
    let eps = Rational::dyadic(10);
    for (name, g) in all_examples() {
        for t in g.maps() {
            for k in 0..=16 {
                let x = q(k, 16);
                for n in [100, 1000] {
                    let cfg = ClassifyConfig::new(eps.clone(), 2 * n).with_grid(0);
                    let v = match classify_map_point(t, &x, &cfg) {
                        Err(e) if e.is_resource() && !t.is_affine() => continue,
                        r => r.unwrap_or_else(|e| panic!("{name} {} at {x}: {e}", t.label())),
                    };
                    let within = |m: usize| v.return_times.iter().filter(|&&r| r <= m).count();
                    if within(n) > 0 {
                        assert!(within(2 * n) > within(n), "{name} {} at {x}", t.label());
                    }
                }
            }
        }
    }
}

#[test]
fn rebased_returns_are_even_returns() {
    let g = example("example2");
    let words: Vec<Word> =
        [[1, 1], [1, 2], [2, 1], [2, 2]].iter().map(|w| Word::from_one_based(w).unwrap()).collect();
    let (h, p) = rebase_generators(&g, &uniform(2), &words, &Limits::default()).unwrap();
    for k in 0..=8 {
        let x = q(k, 8);
        let eps = q(1, 16);
        let v = classify_semigroup_point(&h, &p, &x, &ClassifyConfig::new(eps.clone(), 6).with_grid(0)).unwrap();
        let base = classify_semigroup_point(&g, &uniform(2), &x, &ClassifyConfig::new(eps, 12).with_grid(0)).unwrap();
        let even: Vec<usize> = base.return_times.iter().filter(|t| *t % 2 == 0).map(|t| t / 2).collect();
        assert_eq!(v.return_times, even, "x = {x}");
    }
}
