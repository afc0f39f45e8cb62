use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{q, Interval, Rational};
use crate::maps::{GeneratorSet, Piece, PiecewiseMap, Poly};

pub const DEFAULT_DEPTH: u32 = 40;

/// Construction parameters; only the truncated constructions read them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExampleParams {
    /// Truncation depth of infinite partitions.
    pub depth: u32,
    /// Slope of the expanding/contracting circle family.
    pub slope: Rational,
}

impl Default for ExampleParams {
    fn default() -> Self {
        ExampleParams { depth: DEFAULT_DEPTH, slope: q(1, 1) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Example,
    Anchor,
}

/// Names in listing order: eight examples, then three anchors.
pub const NAMES: [(&str, Kind); 11] = [
    ("eq2-map", Kind::Example),
    ("example1", Kind::Example),
    ("example1exp", Kind::Example),
    ("example-wu", Kind::Example),
    ("example2", Kind::Example),
    ("example3", Kind::Example),
    ("example4", Kind::Example),
    ("example-qu", Kind::Example),
    ("doubling", Kind::Anchor),
    ("identity", Kind::Anchor),
    ("rotation", Kind::Anchor),
];

fn aff(domain: Interval, slope: Rational, intercept: Rational) -> Result<Piece> {
    Piece::affine(domain, slope, intercept)
}

fn co(a: Rational, b: Rational) -> Interval {
    Interval::closed_open(a, b)
}

fn oc(a: Rational, b: Rational) -> Interval {
    Interval::open_closed(a, b)
}

fn op(a: Rational, b: Rational) -> Interval {
    Interval::open(a, b)
}

fn cl(a: Rational, b: Rational) -> Interval {
    Interval::closed(a, b)
}

/// `1` at `0`, `x/2` elsewhere.
pub fn eq2_map() -> Result<PiecewiseMap> {
    PiecewiseMap::new("T", vec![aff(oc(q(0, 1), q(1, 1)), q(1, 2), q(0, 1))?], [(q(0, 1), q(1, 1))], false)
}

/// Halving toward `0` on the left half and its mirror toward `1` on the
/// right half, with `0 ↦ 4/5` and `1 ↦ 1/5`.
pub fn example1() -> Result<PiecewiseMap> {
    PiecewiseMap::new(
        "T",
        vec![
            aff(oc(q(0, 1), q(1, 2)), q(1, 2), q(0, 1))?,
            aff(op(q(1, 2), q(1, 1)), q(1, 2), q(1, 2))?,
        ],
        [(q(0, 1), q(4, 5)), (q(1, 1), q(1, 5))],
        false,
    )
}

/// Circle map `x ↦ a x - (2a - 3/2) 2^{-k}` on `X_k = (2^{-k}, 2^{-k+1}]`,
/// `k = 1..=K`, identity on `(0, 2^{-K}]`; `0` is identified with `1`.
pub fn example1exp(params: &ExampleParams) -> Result<PiecewiseMap> {
    let a = &params.slope;
    if !(a > &q(3, 4) && a < &q(3, 2)) {
        return Err(Error::InvalidArgument(format!("slope {a} outside (3/4, 3/2)")));
    }
    check_depth(params.depth)?;
    let shift = a * &q(2, 1) - q(3, 2);
    let mut pieces = Vec::new();
    for k in 1..=params.depth {
        let lo = Rational::dyadic(k);
        let hi = Rational::dyadic(k - 1);
        pieces.push(aff(oc(lo.clone(), hi), a.clone(), -(&shift * &lo))?);
    }
    pieces.push(aff(oc(q(0, 1), Rational::dyadic(params.depth)), q(1, 1), q(0, 1))?);
    PiecewiseMap::new(format!("T_{a}"), pieces, [(q(0, 1), q(3, 4))], true)
}

/// `0 ↦ 2/3`; `x ↦ x + 2^{-k-2}` on `X_k = (2^{-k-1}, 2^{-k}]` for
/// `1 ≤ k < K`; identity on `(1/2, 1]` and on `(0, 2^{-K}]`.
pub fn example_wu(params: &ExampleParams) -> Result<PiecewiseMap> {
    check_depth(params.depth)?;
    let mut pieces = vec![aff(oc(q(1, 2), q(1, 1)), q(1, 1), q(0, 1))?];
    for k in 1..params.depth {
        pieces.push(aff(
            oc(Rational::dyadic(k + 1), Rational::dyadic(k)),
            q(1, 1),
            Rational::dyadic(k + 2),
        )?);
    }
    pieces.push(aff(oc(q(0, 1), Rational::dyadic(params.depth)), q(1, 1), q(0, 1))?);
    PiecewiseMap::new("T", pieces, [(q(0, 1), q(2, 3))], false)
}

pub fn example2() -> Result<GeneratorSet> {
    let t1 = PiecewiseMap::new(
        "T1",
        vec![
            aff(co(q(0, 1), q(1, 2)), q(1, 2), q(1, 4))?,
            aff(co(q(1, 2), q(1, 1)), q(1, 2), q(1, 2))?,
        ],
        [(q(1, 1), q(0, 1))],
        false,
    )?;
    let t2 = PiecewiseMap::new(
        "T2",
        vec![
            aff(oc(q(0, 1), q(1, 2)), q(1, 2), q(0, 1))?,
            aff(oc(q(1, 2), q(1, 1)), q(1, 2), q(1, 4))?,
        ],
        [(q(0, 1), q(1, 1))],
        false,
    )?;
    GeneratorSet::new(vec![t1, t2])
}

/// The right halves are the mirror images `1 - T(1 - x)` of the left
/// halves. `T1(0) = 1/4` takes precedence over the `x/2` branch, and `T1`
/// fixes `1/2`, the only value consistent with its own mirror clause.
pub fn example3() -> Result<GeneratorSet> {
    let t1 = PiecewiseMap::new(
        "T1",
        vec![
            aff(co(q(0, 1), q(1, 3)), q(1, 2), q(0, 1))?,
            aff(op(q(1, 3), q(1, 2)), q(1, 2), q(1, 3))?,
            aff(op(q(1, 2), q(2, 3)), q(1, 2), q(1, 6))?,
            aff(oc(q(2, 3), q(1, 1)), q(1, 2), q(1, 2))?,
        ],
        [
            (q(0, 1), q(1, 4)),
            (q(1, 3), q(3, 5)),
            (q(1, 2), q(1, 2)),
            (q(2, 3), q(2, 5)),
            (q(1, 1), q(3, 4)),
        ],
        false,
    )?;
    let t2 = PiecewiseMap::new(
        "T2",
        vec![
            aff(co(q(0, 1), q(1, 3)), q(1, 1), q(1, 3))?,
            aff(co(q(1, 3), q(1, 2)), q(-1, 2), q(3, 4))?,
            aff(oc(q(1, 2), q(2, 3)), q(-1, 2), q(3, 4))?,
            aff(oc(q(2, 3), q(1, 1)), q(1, 1), q(-1, 3))?,
        ],
        [(q(1, 2), q(1, 3))],
        false,
    )?;
    GeneratorSet::new(vec![t1, t2])
}

/// `T1` is left undefined at `1/3`, `1/2` and `2/3`; those points take the
/// left-limit values.
pub fn example4() -> Result<GeneratorSet> {
    let t1 = PiecewiseMap::new(
        "T1",
        vec![
            aff(co(q(0, 1), q(1, 3)), q(1, 1), q(0, 1))?,
            aff(op(q(1, 3), q(1, 2)), q(1, 2), q(1, 3))?,
            aff(op(q(1, 2), q(2, 3)), q(1, 2), q(2, 9))?,
            aff(oc(q(2, 3), q(1, 1)), q(1, 1), q(-1, 3))?,
        ],
        [(q(1, 3), q(1, 3)), (q(1, 2), q(7, 12)), (q(2, 3), q(5, 9))],
        false,
    )?;
    let t2 = PiecewiseMap::new(
        "T2",
        vec![
            aff(co(q(0, 1), q(1, 3)), q(1, 1), q(1, 3))?,
            aff(cl(q(1, 3), q(2, 3)), q(-1, 2), q(3, 4))?,
            aff(oc(q(2, 3), q(1, 1)), q(1, 1), q(0, 1))?,
        ],
        [],
        false,
    )?;
    GeneratorSet::new(vec![t1, t2])
}

/// `T1 x = x²`, `T2 x = 1`.
pub fn example_qu() -> Result<GeneratorSet> {
    let sq = PiecewiseMap::new(
        "T1",
        vec![Piece::new(Interval::unit(), Poly::new(vec![q(0, 1), q(0, 1), q(1, 1)]))?],
        [],
        false,
    )?;
    GeneratorSet::new(vec![sq, PiecewiseMap::constant(q(1, 1))?.with_label("T2")])
}

pub fn doubling() -> Result<PiecewiseMap> {
    PiecewiseMap::new(
        "2x mod 1",
        vec![
            aff(co(q(0, 1), q(1, 2)), q(2, 1), q(0, 1))?,
            aff(co(q(1, 2), q(1, 1)), q(2, 1), q(-1, 1))?,
        ],
        [(q(1, 1), q(0, 1))],
        false,
    )
}

/// Rotation of the circle by `1/3`.
pub fn rotation() -> Result<PiecewiseMap> {
    PiecewiseMap::new(
        "x + 1/3 mod 1",
        vec![
            aff(co(q(0, 1), q(2, 3)), q(1, 1), q(1, 3))?,
            aff(cl(q(2, 3), q(1, 1)), q(1, 1), q(-2, 3))?,
        ],
        [],
        true,
    )
}

fn check_depth(depth: u32) -> Result<()> {
    if (8..=1000).contains(&depth) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("truncation depth {depth} outside 8..=1000")))
    }
}

/// Builds the named generator set.
pub fn build_example(name: &str, params: &ExampleParams) -> Result<GeneratorSet> {
    Ok(match name {
        "eq2-map" => GeneratorSet::single(eq2_map()?),
        "example1" => GeneratorSet::single(example1()?),
        "example1exp" => GeneratorSet::single(example1exp(params)?),
        "example-wu" => GeneratorSet::single(example_wu(params)?),
        "example2" => example2()?,
        "example3" => example3()?,
        "example4" => example4()?,
        "example-qu" => example_qu()?,
        "doubling" => GeneratorSet::single(doubling()?),
        "identity" => GeneratorSet::single(PiecewiseMap::identity()),
        "rotation" => GeneratorSet::single(rotation()?),
        other => return Err(Error::UnknownExample(other.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_builds() {
        for (name, _) in NAMES {
            build_example(name, &ExampleParams::default()).unwrap();
        }
        assert!(matches!(
            build_example("nope", &ExampleParams::default()),
            Err(Error::UnknownExample(_))
        ));
    }

    #[test]
    fn parameters_are_validated() {
        let bad_slope = ExampleParams { slope: q(3, 2), ..Default::default() };
        assert!(example1exp(&bad_slope).is_err());
        let shallow = ExampleParams { depth: 4, ..Default::default() };
        assert!(example_wu(&shallow).is_err());
    }

    #[test]
    fn pointwise_values() {
        let t = eq2_map().unwrap();
        assert_eq!(t.eval(&q(0, 1)).unwrap(), q(1, 1));
        assert_eq!(t.eval(&q(1, 2)).unwrap(), q(1, 4));
        let g = example2().unwrap();
        assert_eq!(g.get(0).eval(&q(1, 2)).unwrap(), q(3, 4));
        assert_eq!(g.get(0).eval(&q(1, 1)).unwrap(), q(0, 1));
        assert_eq!(g.get(1).eval(&q(0, 1)).unwrap(), q(1, 1));
        let e = example1exp(&ExampleParams::default()).unwrap();
        assert_eq!(e.eval(&q(1, 1)).unwrap(), q(3, 4));
        assert_eq!(e.eval(&q(0, 1)).unwrap(), q(3, 4));
        let wu = example_wu(&ExampleParams::default()).unwrap();
        assert_eq!(wu.eval(&q(1, 4)).unwrap(), q(5, 16));
        assert_eq!(wu.eval(&q(3, 8)).unwrap(), q(1, 2));
        assert_eq!(wu.eval(&q(3, 4)).unwrap(), q(3, 4));
    }

    #[test]
    fn circle_family_shifts_left() {
        // T_a X_k \ X_k lies in the cells with larger index and half of X_k stays.
        for a in [q(4, 5), q(1, 1), q(7, 5)] {
            let t = example1exp(&ExampleParams { slope: a, depth: 12 }).unwrap();
            for k in 1..=10u32 {
                let cell = oc(Rational::dyadic(k), Rational::dyadic(k - 1));
                let image = t.image(&crate::geometry::IntervalSet::from_interval(cell.clone()));
                let stay = image.intersect(&crate::geometry::IntervalSet::from_interval(cell.clone()));
                assert_eq!(stay.length(), cell.length() / q(2, 1));
                assert!(image.intervals().iter().all(|iv| iv.hi() <= cell.hi()));
            }
        }
    }
}
