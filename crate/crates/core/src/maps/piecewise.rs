use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::poly::Poly;
use crate::error::{Error, Result};
use crate::geometry::{Interval, IntervalSet, Rational, DEFAULT_BIT_CAP};

/// One polynomial branch of a piecewise map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    pub domain: Interval,
    #[serde(rename = "coeffs")]
    pub poly: Poly,
}

impl Piece {
    /// Validated constructor: degree at most 2, monotone on the domain and
    /// mapping it into `[0, 1]`.
    pub fn new(domain: Interval, poly: Poly) -> Result<Self> {
        if poly.degree() > 2 {
            return Err(Error::InvalidArgument(format!(
                "piece polynomial {poly} has degree above 2"
            )));
        }
        if poly.monotone_on(&domain) != Some(true) {
            return Err(Error::InvalidArgument(format!(
                "piece polynomial {poly} is not monotone on {domain}"
            )));
        }
        let piece = Piece { domain, poly };
        piece.check_range()?;
        Ok(piece)
    }

    pub fn affine(domain: Interval, slope: Rational, intercept: Rational) -> Result<Self> {
        Self::new(domain, Poly::affine(slope, intercept))
    }

    fn check_range(&self) -> Result<()> {
        let one = Rational::one();
        for v in [self.poly.eval(self.domain.lo()), self.poly.eval(self.domain.hi())] {
            if v.is_negative() || v > one {
                return Err(Error::InvalidArgument(format!(
                    "piece {} on {} leaves [0,1] (value {v})",
                    self.poly, self.domain
                )));
            }
        }
        Ok(())
    }
}

/// Exact self-map of `[0, 1]`: polynomial pieces on disjoint domains plus
/// isolated point overrides, which take precedence over the pieces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MapSpec", into = "MapSpec")]
pub struct PiecewiseMap {
    label: String,
    pieces: Vec<Piece>,
    overrides: BTreeMap<Rational, Rational>,
    circle: bool,
    /// Piece domains with override points removed.
    effective: Vec<IntervalSet>,
}

/// On-disk JSON shape of a map definition.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapSpec {
    #[serde(default)]
    pub label: String,
    pub pieces: Vec<Piece>,
    #[serde(default)]
    pub overrides: Vec<OverrideSpec>,
    #[serde(default)]
    pub circle: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OverrideSpec {
    pub point: Rational,
    pub value: Rational,
}

impl TryFrom<MapSpec> for PiecewiseMap {
    type Error = Error;

    fn try_from(spec: MapSpec) -> Result<Self> {
        let pieces = spec
            .pieces
            .into_iter()
            .map(|p| Piece::new(p.domain, p.poly))
            .collect::<Result<Vec<_>>>()?;
        let overrides = spec.overrides.into_iter().map(|o| (o.point, o.value));
        PiecewiseMap::new(spec.label, pieces, overrides, spec.circle)
    }
}

impl From<PiecewiseMap> for MapSpec {
    fn from(map: PiecewiseMap) -> Self {
        MapSpec {
            label: map.label,
            pieces: map.pieces,
            overrides: map
                .overrides
                .into_iter()
                .map(|(point, value)| OverrideSpec { point, value })
                .collect(),
            circle: map.circle,
        }
    }
}

fn in_unit(x: &Rational) -> bool {
    !x.is_negative() && *x <= Rational::one()
}

impl PiecewiseMap {
    /// Builds a map, checking that the piece domains are disjoint and,
    /// together with the override points, cover `[0, 1]` exactly.
    pub fn new<I>(label: impl Into<String>, pieces: Vec<Piece>, overrides: I, circle: bool) -> Result<Self>
    where
        I: IntoIterator<Item = (Rational, Rational)>,
    {
        let label = label.into();
        let mut map_overrides = BTreeMap::new();
        for (p, v) in overrides {
            if !in_unit(&p) || !in_unit(&v) {
                return Err(Error::InvalidArgument(format!(
                    "{label}: override {p} ↦ {v} leaves [0,1]"
                )));
            }
            map_overrides.insert(p, v);
        }
        Self::assemble(label, pieces, map_overrides, circle)
    }

    fn assemble(
        label: String,
        mut pieces: Vec<Piece>,
        overrides: BTreeMap<Rational, Rational>,
        circle: bool,
    ) -> Result<Self> {
        pieces.sort_by(|a, b| {
            a.domain
                .lo()
                .cmp(b.domain.lo())
                .then_with(|| b.domain.lo_closed().cmp(&a.domain.lo_closed()))
        });
        for w in pieces.windows(2) {
            if w[0].domain.intersect(&w[1].domain).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "{label}: piece domains {} and {} overlap",
                    w[0].domain, w[1].domain
                )));
            }
        }
        let override_points = IntervalSet::from_points(overrides.keys().cloned());
        let covered = IntervalSet::from_intervals(pieces.iter().map(|p| p.domain.clone()))
            .union(&override_points);
        if covered != IntervalSet::unit() {
            let gap = IntervalSet::unit().difference(&covered);
            return Err(Error::Uncovered(format!("{label}: {gap}")));
        }
        let effective = pieces
            .iter()
            .map(|p| IntervalSet::from_interval(p.domain.clone()).difference(&override_points))
            .collect();
        Ok(PiecewiseMap { label, pieces, overrides, circle, effective })
    }

    pub fn identity() -> Self {
        let piece = Piece { domain: Interval::unit(), poly: Poly::identity() };
        Self::assemble("identity".into(), vec![piece], BTreeMap::new(), false)
            .expect("identity map is total")
    }

    pub fn constant(value: Rational) -> Result<Self> {
        let piece = Piece::new(Interval::unit(), Poly::constant(value.clone()))?;
        Self::new(format!("const {value}"), vec![piece], [], false)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn overrides(&self) -> &BTreeMap<Rational, Rational> {
        &self.overrides
    }

    /// Whether `0` and `1` are identified (circle maps).
    pub fn is_circle(&self) -> bool {
        self.circle
    }

    pub fn is_affine(&self) -> bool {
        self.pieces.iter().all(|p| p.poly.is_affine())
    }

    fn require_affine(&self, what: &str) -> Result<()> {
        if self.is_affine() {
            Ok(())
        } else {
            Err(Error::Unsupported(format!(
                "{what} of `{}` needs exact preimages, which a nonlinear branch would give \
                 irrational endpoints; use forward evaluation instead",
                self.label
            )))
        }
    }

    /// Index of the piece whose effective domain contains `x`.
    pub(crate) fn piece_index(&self, x: &Rational) -> Option<usize> {
        let idx = self.pieces.partition_point(|p| p.domain.lo() <= x);
        (idx.saturating_sub(2)..idx).rev().find(|&i| self.pieces[i].domain.contains(x))
    }

    /// Evaluates under the default bit cap.
    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        self.eval_capped(x, DEFAULT_BIT_CAP)
    }

    pub fn eval_capped(&self, x: &Rational, bit_cap: u64) -> Result<Rational> {
        if let Some(v) = self.overrides.get(x) {
            return Ok(v.clone());
        }
        let i = self
            .piece_index(x)
            .ok_or_else(|| Error::Uncovered(format!("{}: {x}", self.label)))?;
        let y = self.pieces[i].poly.eval(x);
        y.check_bits(bit_cap)?;
        Ok(y)
    }

    /// Exact forward image of a set.
    pub fn image(&self, s: &IntervalSet) -> IntervalSet {
        let mut parts = Vec::new();
        for (piece, eff) in self.pieces.iter().zip(&self.effective) {
            for iv in s.intersect(eff).intervals() {
                parts.push(piece.poly.image_of(iv));
            }
        }
        for (p, v) in &self.overrides {
            if s.contains(p) {
                parts.push(Interval::point(v.clone()));
            }
        }
        IntervalSet::from_intervals(parts)
    }

    /// Exact preimage `{x : T(x) ∈ s}`; affine maps only.
    pub fn preimage(&self, s: &IntervalSet) -> Result<IntervalSet> {
        self.require_affine("preimage")?;
        let mut out = IntervalSet::empty();
        for (piece, eff) in self.pieces.iter().zip(&self.effective) {
            let pre = piece.poly.affine_preimage(s).expect("affine checked");
            out = out.union(&pre.intersect(eff));
        }
        let hits = self.overrides.iter().filter(|(_, v)| s.contains(v)).map(|(p, _)| p.clone());
        Ok(out.union(&IntervalSet::from_points(hits)))
    }

    /// `next ∘ self` as a new materialized map.
    pub fn then(&self, next: &PiecewiseMap, piece_budget: usize) -> Result<PiecewiseMap> {
        let mut pieces: Vec<Piece> = Vec::new();
        let mut overrides = BTreeMap::new();
        for (p, v) in &self.overrides {
            overrides.insert(p.clone(), next.eval(v)?);
        }
        // Regions of `next` on which it is a single polynomial.
        let mut regions: Vec<(IntervalSet, Poly)> = next
            .pieces
            .iter()
            .zip(&next.effective)
            .map(|(piece, eff)| (eff.clone(), piece.poly.clone()))
            .collect();
        regions.extend(
            next.overrides
                .iter()
                .map(|(p, v)| (IntervalSet::point(p.clone()), Poly::constant(v.clone()))),
        );
        for (piece, eff) in self.pieces.iter().zip(&self.effective) {
            for (target, outer) in &regions {
                let sub = pullback(&piece.poly, eff, target, &self.label)?;
                if sub.is_empty() {
                    continue;
                }
                let poly = outer.compose(&piece.poly);
                for iv in sub.intervals() {
                    if iv.is_point() {
                        overrides.insert(iv.lo().clone(), poly.eval(iv.lo()));
                    } else {
                        pieces.push(Piece { domain: iv.clone(), poly: poly.clone() });
                    }
                }
                if pieces.len() > piece_budget {
                    return Err(Error::Budget(format!(
                        "composition exceeds {piece_budget} pieces"
                    )));
                }
            }
        }
        let pieces = merge_pieces(pieces);
        let label = format!("{}∘{}", next.label, self.label);
        Self::assemble(label, pieces, overrides, self.circle || next.circle)
    }
}

/// `{x ∈ eff : poly(x) ∈ target}`. Exact for affine branches; for nonlinear
/// branches only the all-or-nothing cases are decidable with rationals.
fn pullback(poly: &Poly, eff: &IntervalSet, target: &IntervalSet, label: &str) -> Result<IntervalSet> {
    if let Some(pre) = poly.affine_preimage(target) {
        return Ok(pre.intersect(eff));
    }
    let mut out = Vec::new();
    for iv in eff.intervals() {
        let img = IntervalSet::from_interval(poly.image_of(iv));
        if img.is_subset(target) {
            out.push(iv.clone());
        } else if img.intersects(target) {
            return Err(Error::Unsupported(format!(
                "composing through the nonlinear branch {poly} of `{label}` would need \
                 irrational breakpoints; evaluate the word pointwise instead"
            )));
        }
    }
    Ok(IntervalSet::from_intervals(out))
}

fn merge_pieces(mut pieces: Vec<Piece>) -> Vec<Piece> {
    pieces.sort_by(|a, b| a.domain.lo().cmp(b.domain.lo()));
    let mut out: Vec<Piece> = Vec::with_capacity(pieces.len());
    for piece in pieces {
        if let Some(last) = out.last_mut() {
            if last.poly == piece.poly {
                let joined = IntervalSet::from_intervals([last.domain.clone(), piece.domain.clone()]);
                if joined.len() == 1 {
                    last.domain = joined.intervals()[0].clone();
                    continue;
                }
            }
        }
        out.push(piece);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::q;

    /// 1 at 0, x/2 elsewhere.
    fn halving() -> PiecewiseMap {
        PiecewiseMap::new(
            "halving",
            vec![Piece::affine(Interval::open_closed(q(0, 1), q(1, 1)), q(1, 2), q(0, 1)).unwrap()],
            [(q(0, 1), q(1, 1))],
            false,
        )
        .unwrap()
    }

    #[test]
    fn eval_prefers_overrides() {
        let t = halving();
        assert_eq!(t.eval(&q(0, 1)).unwrap(), q(1, 1));
        assert_eq!(t.eval(&q(1, 2)).unwrap(), q(1, 4));
    }

    #[test]
    fn totality_is_checked() {
        let err = PiecewiseMap::new(
            "gap",
            vec![Piece::affine(Interval::open_closed(q(0, 1), q(1, 1)), q(1, 2), q(0, 1)).unwrap()],
            [],
            false,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Uncovered(_)));
        let overlap = PiecewiseMap::new(
            "overlap",
            vec![
                Piece::affine(Interval::closed(q(0, 1), q(1, 2)), q(1, 2), q(0, 1)).unwrap(),
                Piece::affine(Interval::closed(q(1, 2), q(1, 1)), q(1, 2), q(0, 1)).unwrap(),
            ],
            [],
            false,
        );
        assert!(overlap.is_err());
    }

    #[test]
    fn image_and_preimage_of_halving() {
        let t = halving();
        let half_open = IntervalSet::from_interval(Interval::open_closed(q(0, 1), q(1, 1)));
        assert_eq!(
            t.image(&half_open),
            IntervalSet::from_interval(Interval::open_closed(q(0, 1), q(1, 2)))
        );
        assert_eq!(t.image(&IntervalSet::point(q(0, 1))), IntervalSet::point(q(1, 1)));
        assert!(t.preimage(&IntervalSet::point(q(0, 1))).unwrap().is_empty());
        assert_eq!(
            t.preimage(&IntervalSet::from_interval(Interval::open_closed(q(0, 1), q(1, 4)))).unwrap(),
            IntervalSet::from_interval(Interval::open_closed(q(0, 1), q(1, 2)))
        );
        assert_eq!(
            t.preimage(&IntervalSet::from_interval(Interval::open_closed(q(1, 2), q(1, 1)))).unwrap(),
            IntervalSet::point(q(0, 1))
        );
    }

    #[test]
    fn identity_image_is_identity() {
        let s = IntervalSet::from_intervals([
            Interval::point(q(1, 7)),
            Interval::open(q(1, 3), q(2, 3)),
        ]);
        assert_eq!(PiecewiseMap::identity().image(&s), s);
    }

    #[test]
    fn nonlinear_preimage_is_refused() {
        let sq = PiecewiseMap::new(
            "square",
            vec![Piece::new(Interval::unit(), Poly::new(vec![q(0, 1), q(0, 1), q(1, 1)])).unwrap()],
            [],
            false,
        )
        .unwrap();
        assert!(matches!(sq.preimage(&IntervalSet::unit()), Err(Error::Unsupported(_))));
        assert_eq!(sq.eval(&q(1, 2)).unwrap(), q(1, 4));
    }

    #[test]
    fn composition_with_self() {
        let t = halving();
        let tt = t.then(&t, 1000).unwrap();
        for x in [q(0, 1), q(1, 3), q(1, 1), q(1, 2)] {
            assert_eq!(tt.eval(&x).unwrap(), t.eval(&t.eval(&x).unwrap()).unwrap());
        }
    }

    #[test]
    fn map_json_round_trip() {
        let t = halving();
        let json = serde_json::to_string(&t).unwrap();
        assert!(json.contains("\"coeffs\":[\"0\",\"1/2\"]"));
        let back: PiecewiseMap = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
    }
}
