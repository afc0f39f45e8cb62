//! Executable expected properties for each catalogue entry.

use serde::{Deserialize, Serialize};

use super::examples::{build_example, ExampleParams, Kind, DEFAULT_DEPTH, NAMES};
use crate::classify::{
    classify_chain_point, classify_map_point, classify_semigroup_point, r_function, ClassifyConfig, Mode,
};
use crate::error::{Error, Result};
use crate::geometry::{ball, q, BallStyle, Interval, IntervalSet, Rational};
use crate::limits::Limits;
use crate::maps::GeneratorSet;
use crate::markov::{MarkovChain, McConfig};
use crate::measures::{least_squares_slope, poincare_partial_sums, stationary_components, ulam_matrix, Measure, Trend};
use crate::semigroup::{kappa, kappa_sequence};

/// Where an expected value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    /// Stated for the example in the published analysis.
    Published,
    /// Produced by an independent computation (orbit, enumeration, analytic solve).
    Oracle,
    /// Forced by the definitions.
    Immediate,
}

/// Points of a grid on `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grid {
    /// `j / n` for `j = 0..=n`.
    Nodes(usize),
    /// `(2j + 1) / 2n` for `j = 0..n`.
    Midpoints(usize),
}

impl Grid {
    pub fn points(&self) -> Vec<Rational> {
        match *self {
            Grid::Nodes(n) => (0..=n).map(|j| Rational::new(j as i64, n as i64)).collect(),
            Grid::Midpoints(n) => (0..n).map(|j| Rational::new(2 * j as i64 + 1, 2 * n as i64)).collect(),
        }
    }
}

/// An operation with its arguments and the expected outcome. Generator
/// indices are 0-based; chains use uniform weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum Check {
    Eval {
        generator: usize,
        x: Rational,
        expected: Rational,
    },
    /// Map verdict: first return time (or none) and flags.
    MapVerdict {
        generator: usize,
        x: Rational,
        eps: Rational,
        horizon: usize,
        first_return: Option<usize>,
        weak: bool,
        uniform: Option<bool>,
    },
    /// Weak certificate present and the weak-uniform window count is zero.
    WeakNotUniform {
        generator: usize,
        x: Rational,
        eps: Rational,
        horizon: usize,
    },
    ChainVerdict {
        x: Rational,
        eps: Rational,
        horizon: usize,
        recurrent: bool,
        weak: bool,
    },
    /// Semigroup verdict with uniform weights; exact κ window minimum.
    KappaWindowMin {
        x: Rational,
        eps: Rational,
        horizon: usize,
        expected: Rational,
    },
    Kappa {
        x: Rational,
        set: IntervalSet,
        n: usize,
        expected: Rational,
    },
    /// `Qⁿ(x, ball)` window minimum below a quarter of its value at
    /// `reference`, and a nonpositive least-squares slope from `reference`.
    ReturnMassDecays {
        x: Rational,
        eps: Rational,
        horizon: usize,
        reference: usize,
    },
    /// Exact `Qⁿ(x, ball)` window minimum.
    ReturnMassWindowMin {
        x: Rational,
        eps: Rational,
        horizon: usize,
        expected: Rational,
    },
    /// Fraction of grid points with a map-recurrence certificate.
    RecFraction {
        generator: usize,
        grid: Grid,
        eps: Rational,
        horizon: usize,
        expected: Rational,
        tolerance: Rational,
    },
    /// Monte Carlo semigroup certificate.
    McRecurrent {
        x: Rational,
        eps: Rational,
        horizon: usize,
        seed: u64,
        samples: usize,
    },
    /// Closed classes of the Ulam matrix as bin ranges, each with a uniform
    /// stationary vector.
    UniformComponents {
        bins: usize,
        supports: Vec<(usize, usize)>,
    },
    PoincareSums {
        generator: usize,
        measure: Measure,
        set: IntervalSet,
        n: usize,
        last: Rational,
        trend: Trend,
    },
    RadiusBracket {
        generator: usize,
        x: Rational,
        horizon: usize,
        tol: Rational,
        contains: Rational,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub text: String,
    pub basis: Basis,
    pub check: Check,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExampleManifest {
    pub name: String,
    pub kind: Kind,
    pub params: ExampleParams,
    pub generators: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation: Option<String>,
    pub claims: Vec<Claim>,
    /// Conflicts between the verbal description and the formulas.
    pub discrepancies: Vec<String>,
}

fn claim(text: &str, basis: Basis, check: Check) -> Claim {
    Claim { text: text.into(), basis, check, notes: Vec::new() }
}

fn noted(mut c: Claim, note: &str) -> Claim {
    c.notes.push(note.into());
    c
}

fn single(lo: Rational, hi: Rational, lo_closed: bool, hi_closed: bool) -> IntervalSet {
    Interval::new(lo, hi, lo_closed, hi_closed).map(IntervalSet::from_interval).unwrap_or_else(IntervalSet::empty)
}

pub fn manifest(name: &str) -> Result<ExampleManifest> {
    use Basis::*;
    let kind = NAMES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, k)| *k)
        .ok_or_else(|| Error::UnknownExample(name.to_string()))?;
    let params = ExampleParams::default();
    let mut truncation = None;
    let mut discrepancies = Vec::new();
    let claims = match name {
        "eq2-map" => vec![
            claim("T(0) = 1", Published, Check::Eval { generator: 0, x: q(0, 1), expected: q(1, 1) }),
            claim("T(1/2) = 1/4", Published, Check::Eval { generator: 0, x: q(1, 2), expected: q(1, 4) }),
            claim(
                "the series for {0} under the Dirac measure at 0 vanishes",
                Published,
                Check::PoincareSums {
                    generator: 0,
                    measure: Measure::Dirac { point: q(0, 1) },
                    set: IntervalSet::point(q(0, 1)),
                    n: 20,
                    last: q(0, 1),
                    trend: Trend::Bounded,
                },
            ),
            claim(
                "0 is uniformly recurrent; the orbit 0, 1, 1/2, ... first enters (-1/32, 1/32) at n = 7",
                Oracle,
                Check::MapVerdict {
                    generator: 0,
                    x: q(0, 1),
                    eps: q(1, 32),
                    horizon: 100,
                    first_return: Some(7),
                    weak: true,
                    uniform: Some(true),
                },
            ),
        ],
        "example1" => vec![
            claim("T(0) = 4/5", Published, Check::Eval { generator: 0, x: q(0, 1), expected: q(4, 5) }),
            claim("T(1) = 1/5", Immediate, Check::Eval { generator: 0, x: q(1, 1), expected: q(1, 5) }),
            claim(
                "the orbit of 1/4 decreases to 0 and never returns",
                Oracle,
                Check::MapVerdict {
                    generator: 0,
                    x: q(1, 4),
                    eps: q(1, 16),
                    horizon: 10_000,
                    first_return: None,
                    weak: false,
                    uniform: Some(false),
                },
            ),
            claim(
                "1 is weakly recurrent but not recurrent",
                Published,
                Check::ChainVerdict { x: q(1, 1), eps: q(1, 8), horizon: 100, recurrent: false, weak: true },
            ),
            claim(
                "0 is weakly recurrent but not recurrent",
                Published,
                Check::ChainVerdict { x: q(0, 1), eps: q(1, 8), horizon: 100, recurrent: false, weak: true },
            ),
            claim(
                "R(1/4) = 1/12 from (1/4 + r)/2 = 1/4 - r",
                Oracle,
                Check::RadiusBracket {
                    generator: 0,
                    x: q(1, 4),
                    horizon: 50,
                    tol: Rational::dyadic(16),
                    contains: q(1, 12),
                },
            ),
        ],
        "example1exp" => {
            truncation = Some(format!("cells X_k for k <= {DEFAULT_DEPTH}; identity on (0, 2^-{DEFAULT_DEPTH}]"));
            discrepancies.push(
                "every measure is said to converge to the Dirac mass at 1 while T(1) = 3/4; the untruncated \
                 orbit of 1 only approaches 1 through the identification of 0 and 1, and the claim below is the \
                 truncated computation"
                    .into(),
            );
            vec![
                claim("T(1) = 3/4", Published, Check::Eval { generator: 0, x: q(1, 1), expected: q(3, 4) }),
                claim(
                    "1 is recurrent on the circle: the orbit 1, 3/4, 1/2, ... enters the ball around 0 = 1",
                    Oracle,
                    Check::MapVerdict {
                        generator: 0,
                        x: q(1, 1),
                        eps: q(1, 16),
                        horizon: 1000,
                        first_return: Some(9),
                        weak: true,
                        uniform: None,
                    },
                ),
            ]
        }
        "example-wu" => {
            truncation = Some(format!("shifts on X_k for k < {DEFAULT_DEPTH}; identity on (0, 2^-{DEFAULT_DEPTH}]"));
            vec![
                claim("T(0) = 2/3", Published, Check::Eval { generator: 0, x: q(0, 1), expected: q(2, 3) }),
                claim(
                    "0 is weakly recurrent but not weakly uniformly recurrent",
                    Published,
                    Check::WeakNotUniform { generator: 0, x: q(0, 1), eps: Rational::dyadic(4), horizon: 1000 },
                ),
            ]
        }
        "example2" => {
            discrepancies.push(
                "the text states T2(1/2) = 1, the formula gives 1/2 * 1/2 = 1/4; the formula is used".into(),
            );
            vec![
                claim("T1(1/2) = 3/4", Published, Check::Eval { generator: 0, x: q(1, 2), expected: q(3, 4) }),
                claim("T1(1) = 0", Published, Check::Eval { generator: 0, x: q(1, 1), expected: q(0, 1) }),
                claim("T2(0) = 1", Published, Check::Eval { generator: 1, x: q(0, 1), expected: q(1, 1) }),
                noted(
                    claim("T2(1/2) = 1/4", Published, Check::Eval { generator: 1, x: q(1, 2), expected: q(1, 4) }),
                    "formula value; the text says 1",
                ),
                claim(
                    "two stationary components on [0, 1/2] and [1/2, 1]",
                    Published,
                    Check::UniformComponents { bins: 16, supports: vec![(0, 8), (8, 16)] },
                ),
                claim(
                    "T1 has no recurrent points",
                    Published,
                    Check::RecFraction {
                        generator: 0,
                        grid: Grid::Nodes(64),
                        eps: Rational::dyadic(10),
                        horizon: 10_000,
                        expected: q(0, 1),
                        tolerance: q(0, 1),
                    },
                ),
                claim(
                    "T2 has no recurrent points",
                    Published,
                    Check::RecFraction {
                        generator: 1,
                        grid: Grid::Nodes(64),
                        eps: Rational::dyadic(10),
                        horizon: 10_000,
                        expected: q(0, 1),
                        tolerance: q(0, 1),
                    },
                ),
                claim(
                    "1/3 is recurrent for the semigroup",
                    Oracle,
                    Check::McRecurrent { x: q(1, 3), eps: Rational::dyadic(6), horizon: 10_000, seed: 7, samples: 100 },
                ),
            ]
        }
        "example3" => {
            discrepancies.push(
                "1/3 and 2/3 are called uniformly recurrent for T1, but T1(1/3) = 3/5 and the orbit is caught by \
                 the 2-cycle {4/9, 5/9}; the claims store the computed behaviour"
                    .into(),
            );
            discrepancies.push(
                "T2 'otherwise 1 - T1(1 - x)' is read as the mirror 1 - T2(1 - x), which matches the description \
                 of T2 mapping (0, 1/3) and (2/3, 1) onto (1/3, 2/3)"
                    .into(),
            );
            discrepancies.push(
                "both x/2 on [0, 1/3) and T1(0) = 1/4 are listed; the point value wins".into(),
            );
            discrepancies.push(
                "return masses at 1/2 settle near 0.24 instead of decaying: T1 and T2 both map (1/3, 2/3) into \
                 itself and the chain keeps a stationary law there"
                    .into(),
            );
            vec![
                claim("T1(0) = 1/4", Published, Check::Eval { generator: 0, x: q(0, 1), expected: q(1, 4) }),
                claim("T1(1/3) = 3/5", Published, Check::Eval { generator: 0, x: q(1, 3), expected: q(3, 5) }),
                claim("T2(1/2) = 1/3", Published, Check::Eval { generator: 1, x: q(1, 2), expected: q(1, 3) }),
                claim("T1(1) = 3/4 by symmetry", Immediate, Check::Eval { generator: 0, x: q(1, 1), expected: q(3, 4) }),
                claim(
                    "0 is uniformly recurrent for T1",
                    Published,
                    Check::MapVerdict {
                        generator: 0,
                        x: q(0, 1),
                        eps: q(1, 50),
                        horizon: 1000,
                        first_return: Some(5),
                        weak: true,
                        uniform: Some(true),
                    },
                ),
                claim(
                    "1 is uniformly recurrent for T1",
                    Published,
                    Check::MapVerdict {
                        generator: 0,
                        x: q(1, 1),
                        eps: q(1, 50),
                        horizon: 1000,
                        first_return: Some(5),
                        weak: true,
                        uniform: Some(true),
                    },
                ),
                noted(
                    claim(
                        "1/3 does not return under T1",
                        Oracle,
                        Check::MapVerdict {
                            generator: 0,
                            x: q(1, 3),
                            eps: q(1, 50),
                            horizon: 1000,
                            first_return: None,
                            weak: false,
                            uniform: Some(false),
                        },
                    ),
                    "the text calls 1/3 uniformly recurrent",
                ),
                claim(
                    "1/2 is uniformly recurrent for T2",
                    Published,
                    Check::MapVerdict {
                        generator: 1,
                        x: q(1, 2),
                        eps: q(1, 50),
                        horizon: 1000,
                        first_return: Some(5),
                        weak: true,
                        uniform: Some(true),
                    },
                ),
                claim(
                    "return masses at 0 decay",
                    Published,
                    Check::ReturnMassDecays { x: q(0, 1), eps: q(1, 10), horizon: 24, reference: 4 },
                ),
                claim(
                    "return masses at 1 decay",
                    Published,
                    Check::ReturnMassDecays { x: q(1, 1), eps: q(1, 10), horizon: 24, reference: 4 },
                ),
                noted(
                    claim(
                        "return masses at 1/2 stay at 983/4096 or above on [12, 24]",
                        Oracle,
                        Check::ReturnMassWindowMin {
                            x: q(1, 2),
                            eps: q(1, 50),
                            horizon: 24,
                            expected: q(983, 4096),
                        },
                    ),
                    "the text expects decay to 0 at every candidate point",
                ),
            ]
        }
        "example4" => vec![
            claim("T1(1/6) = 1/6", Published, Check::Eval { generator: 0, x: q(1, 6), expected: q(1, 6) }),
            claim("T2(1/2) = 1/2", Published, Check::Eval { generator: 1, x: q(1, 2), expected: q(1, 2) }),
            noted(
                claim("T1(1/2) = 7/12", Immediate, Check::Eval { generator: 0, x: q(1, 2), expected: q(7, 12) }),
                "T1 is undefined at 1/3, 1/2, 2/3; the left limits are used",
            ),
            claim(
                "points of [0, 1/3) are fixed by T1",
                Immediate,
                Check::MapVerdict {
                    generator: 0,
                    x: q(1, 6),
                    eps: q(1, 64),
                    horizon: 100,
                    first_return: Some(1),
                    weak: true,
                    uniform: Some(true),
                },
            ),
            noted(
                claim(
                    "m(Rec(T1)) = 1/3",
                    Published,
                    Check::RecFraction {
                        generator: 0,
                        grid: Grid::Midpoints(192),
                        eps: Rational::dyadic(10),
                        horizon: 2000,
                        expected: q(1, 3),
                        tolerance: q(1, 64),
                    },
                ),
                "grid points within ε of the attracting cycle also return",
            ),
            claim(
                "m(Rec(T2)) = 1/3",
                Published,
                Check::RecFraction {
                    generator: 1,
                    grid: Grid::Midpoints(192),
                    eps: Rational::dyadic(10),
                    horizon: 2000,
                    expected: q(1, 3),
                    tolerance: q(1, 64),
                },
            ),
        ],
        "example-qu" => vec![
            claim("T1(1/2) = 1/4", Immediate, Check::Eval { generator: 0, x: q(1, 2), expected: q(1, 4) }),
            claim("T2(1/3) = 1", Published, Check::Eval { generator: 1, x: q(1, 3), expected: q(1, 1) }),
            claim(
                "only the all-T1 word keeps 0 near 0",
                Oracle,
                Check::Kappa {
                    x: q(0, 1),
                    set: ball(&q(0, 1), &q(1, 4), BallStyle::Open)?,
                    n: 20,
                    expected: Rational::dyadic(20),
                },
            ),
            claim(
                "both maps fix 1",
                Oracle,
                Check::Kappa { x: q(1, 1), set: IntervalSet::point(q(1, 1)), n: 20, expected: q(1, 1) },
            ),
            claim(
                "1 is uniformly recurrent",
                Published,
                Check::KappaWindowMin { x: q(1, 1), eps: q(1, 4), horizon: 20, expected: q(1, 1) },
            ),
            claim(
                "0 is recurrent but its return proportion is 2^-n",
                Published,
                Check::KappaWindowMin { x: q(0, 1), eps: q(1, 4), horizon: 20, expected: Rational::dyadic(20) },
            ),
        ],
        "doubling" => vec![
            claim(
                "Lebesgue measure is invariant, so every term is 1/2",
                Immediate,
                Check::PoincareSums {
                    generator: 0,
                    measure: Measure::Lebesgue,
                    set: single(q(0, 1), q(1, 2), false, false),
                    n: 10,
                    last: q(5, 1),
                    trend: Trend::LinearGrowth,
                },
            ),
            claim(
                "one stationary component, uniform",
                Oracle,
                Check::UniformComponents { bins: 2, supports: vec![(0, 2)] },
            ),
        ],
        "identity" => vec![
            claim(
                "every point returns at n = 1",
                Immediate,
                Check::MapVerdict {
                    generator: 0,
                    x: q(1, 3),
                    eps: q(1, 8),
                    horizon: 10,
                    first_return: Some(1),
                    weak: true,
                    uniform: Some(true),
                },
            ),
            claim(
                "each bin is its own component",
                Immediate,
                Check::UniformComponents { bins: 4, supports: vec![(0, 1), (1, 2), (2, 3), (3, 4)] },
            ),
        ],
        "rotation" => vec![claim(
            "period 3",
            Immediate,
            Check::MapVerdict {
                generator: 0,
                x: q(0, 1),
                eps: q(1, 8),
                horizon: 30,
                first_return: Some(3),
                weak: true,
                uniform: Some(true),
            },
        )],
        other => return Err(Error::UnknownExample(other.to_string())),
    };
    let generators = build_example(name, &params)?.len();
    Ok(ExampleManifest { name: name.to_string(), kind, params, generators, truncation, claims, discrepancies })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimResult {
    pub text: String,
    pub basis: Basis,
    pub passed: bool,
    pub observed: String,
}

fn config(eps: &Rational, horizon: usize, limits: &Limits) -> ClassifyConfig {
    ClassifyConfig::new(eps.clone(), horizon).with_limits(limits.clone())
}

/// Runs one check against a built generator set.
pub fn run_check(g: &GeneratorSet, check: &Check, limits: &Limits) -> Result<(bool, String)> {
    let chain = || MarkovChain::uniform(g.clone());
    let map = |i: usize| {
        (i < g.len()).then(|| g.get(i)).ok_or_else(|| Error::InvalidArgument(format!("no generator {i}")))
    };
    Ok(match check {
        Check::Eval { generator, x, expected } => {
            let y = map(*generator)?.eval(x)?;
            (&y == expected, y.to_string())
        }
        Check::MapVerdict { generator, x, eps, horizon, first_return, weak, uniform } => {
            let v = classify_map_point(map(*generator)?, x, &config(eps, *horizon, limits).with_grid(0))?;
            let u = v.uniform_certified();
            let ok = v.recurrent.time() == *first_return
                && v.weak.is_certified() == *weak
                && uniform.is_none_or(|want| want == u);
            (ok, format!("first return {:?}, weak {}, uniform {u}", v.recurrent.time(), v.weak.is_certified()))
        }
        Check::WeakNotUniform { generator, x, eps, horizon } => {
            let v = classify_map_point(map(*generator)?, x, &config(eps, *horizon, limits))?;
            let wu = v.weak_uniform_estimate.as_ref().map(|w| w.value.clone());
            let ok = v.weak.is_certified() && wu.as_ref().is_some_and(|w| w.is_zero());
            (ok, format!("weak {}, weak-uniform window count {wu:?}", v.weak.is_certified()))
        }
        Check::ChainVerdict { x, eps, horizon, recurrent, weak } => {
            let v = classify_chain_point(&chain(), x, &config(eps, *horizon, limits).with_grid(0))?;
            let ok = v.recurrent.is_certified() == *recurrent && v.weak.is_certified() == *weak;
            (ok, format!("recurrent {}, weak {}", v.recurrent.is_certified(), v.weak.is_certified()))
        }
        Check::KappaWindowMin { x, eps, horizon, expected } => {
            let p = vec![Rational::new(1, g.len() as i64); g.len()];
            let v = classify_semigroup_point(g, &p, x, &config(eps, *horizon, limits).with_grid(0))?;
            let value = v.uniform_estimate.map(|u| u.value).unwrap_or_else(Rational::zero);
            (&value == expected && v.recurrent.is_certified(), value.to_string())
        }
        Check::Kappa { x, set, n, expected } => {
            let k = kappa(g, x, set, *n, limits)?;
            let rows = kappa_sequence(g, x, set, *n, limits)?;
            let ok = &k == expected && rows.len() == *n;
            (ok, k.to_string())
        }
        Check::ReturnMassDecays { x, eps, horizon, reference } => {
            let b = ball(x, eps, BallStyle::Open)?;
            let (m, _) = chain().return_masses(x, &b, *horizon, limits)?;
            let window_min = m[horizon / 2..].iter().min().cloned().unwrap_or_else(Rational::zero);
            let ys: Vec<f64> = m[*reference..].iter().map(Rational::to_f64).collect();
            let slope = least_squares_slope(*reference, &ys);
            let ok = window_min < &m[*reference] / &Rational::from_integer(4) && slope <= 0.0;
            (ok, format!("window min {window_min}, value at {reference} {}, slope {slope:.3e}", m[*reference]))
        }
        Check::ReturnMassWindowMin { x, eps, horizon, expected } => {
            let b = ball(x, eps, BallStyle::Open)?;
            let (m, _) = chain().return_masses(x, &b, *horizon, limits)?;
            let window_min = m[horizon / 2..].iter().min().cloned().unwrap_or_else(Rational::zero);
            (&window_min == expected, window_min.to_string())
        }
        Check::RecFraction { generator, grid, eps, horizon, expected, tolerance } => {
            use rayon::prelude::*;
            let t = map(*generator)?;
            let pts = grid.points();
            let cfg = config(eps, *horizon, limits).with_grid(0);
            let hits = pts
                .par_iter()
                .map(|x| Ok(usize::from(classify_map_point(t, x, &cfg)?.recurrent.is_certified())))
                .collect::<Result<Vec<usize>>>()?
                .into_iter()
                .sum::<usize>();
            let frac = Rational::new(hits as i64, pts.len() as i64);
            (&(&frac - expected).abs() <= tolerance, format!("{hits}/{}", pts.len()))
        }
        Check::McRecurrent { x, eps, horizon, seed, samples } => {
            let mode = Mode::Mc(McConfig { seed: *seed, samples: *samples });
            let v = classify_chain_point(&chain(), x, &config(eps, *horizon, limits).with_mode(mode))?;
            let returned = v.mc.as_ref().map_or(0, |m| m.returned);
            (v.recurrent.is_certified(), format!("first return {:?}, {returned}/{samples} trials", v.recurrent.time()))
        }
        Check::UniformComponents { bins, supports } => {
            let comps = stationary_components(&ulam_matrix(&chain(), *bins)?, 1e-12)?;
            let got: Vec<(usize, usize)> =
                comps.iter().map(|c| (c.support[0], c.support[c.support.len() - 1] + 1)).collect();
            let contiguous = comps.iter().all(|c| c.support.windows(2).all(|w| w[1] == w[0] + 1));
            let uniform = comps.iter().all(|c| {
                let u = 1.0 / c.values.len() as f64;
                c.values.iter().all(|v| (v - u).abs() < 1e-9)
            });
            (contiguous && uniform && &got == supports, format!("{got:?}, uniform {uniform}"))
        }
        Check::PoincareSums { generator, measure, set, n, last, trend } => {
            let r = poincare_partial_sums(map(*generator)?, measure, set, *n, limits)?;
            (&r.last() == last && r.trend == *trend, format!("{} ({:?})", r.last(), r.trend))
        }
        Check::RadiusBracket { generator, x, horizon, tol, contains } => {
            let br = r_function(map(*generator)?, x, *horizon, tol, limits)?;
            let ok = &br.lower <= contains && contains <= &br.upper && &(&br.upper - &br.lower) <= tol;
            (ok, format!("[{}, {}]", br.lower, br.upper))
        }
    })
}

/// Builds the example and runs every claim of its manifest.
pub fn run_manifest(m: &ExampleManifest, limits: &Limits) -> Result<Vec<ClaimResult>> {
    let g = build_example(&m.name, &m.params)?;
    m.claims
        .iter()
        .map(|c| {
            let (passed, observed) = run_check(&g, &c.check, limits)?;
            Ok(ClaimResult { text: c.text.clone(), basis: c.basis, passed, observed })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_has_a_manifest() {
        for (name, _) in NAMES {
            let m = manifest(name).unwrap();
            assert!(!m.claims.is_empty(), "{name}");
        }
        assert!(manifest("nope").is_err());
    }

    #[test]
    fn small_manifests_hold() {
        for name in ["eq2-map", "example1", "example-qu", "doubling", "identity", "rotation"] {
            for r in run_manifest(&manifest(name).unwrap(), &Limits::default()).unwrap() {
                assert!(r.passed, "{name}: {} observed {}", r.text, r.observed);
            }
        }
    }

    #[test]
    fn manifests_serialize() {
        let m = manifest("example2").unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<ExampleManifest>(&s).unwrap(), m);
    }
}
