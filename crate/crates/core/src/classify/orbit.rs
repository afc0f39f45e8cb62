//! Exact forward orbits and iterated images of a single map.
//!
//! Contracting branches make the denominators of an orbit grow without
//! bound, so plain iteration would reach the bit cap long before typical
//! horizons. Both iterations therefore look for a verified trapping
//! structure: intervals `C_0, …, C_{p-1}` with `T(C_r) ⊆ C_{r+1 mod p}`,
//! each inside or outside the ball, which fixes every later return exactly.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{Interval, IntervalSet, Rational};
use crate::limits::Limits;
use crate::maps::PiecewiseMap;

const MAX_PERIOD: usize = 8;
/// Orbit points narrower than this are simply iterated.
const SETTLE_BITS: u64 = 96;

/// Returns of one orbit to a target set up to a horizon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitReturns {
    pub times: Vec<usize>,
    /// Time after which the returns follow a verified periodic pattern.
    pub settled_at: Option<usize>,
}

impl OrbitReturns {
    pub fn first(&self) -> Option<usize> {
        self.times.first().copied()
    }

    pub fn count_in(&self, lo: usize, hi: usize) -> usize {
        let a = self.times.partition_point(|&t| t < lo);
        let b = self.times.partition_point(|&t| t <= hi);
        b - a
    }

    pub fn count_upto(&self, n: usize) -> usize {
        self.times.partition_point(|&t| t <= n)
    }
}

/// Which phases of a verified cycle of trapping sets lie in the target.
struct Pattern {
    inside: Vec<bool>,
}

fn hull_with(a: &Rational, a_closed: bool, b: &Rational, b_closed: bool) -> Option<Interval> {
    if a == b {
        return Some(Interval::point(a.clone()));
    }
    if a < b {
        Interval::new(a.clone(), b.clone(), a_closed, b_closed)
    } else {
        Interval::new(b.clone(), a.clone(), b_closed, a_closed)
    }
}

fn classify_phases(t: &PiecewiseMap, sets: &[IntervalSet], target: &IntervalSet) -> Option<Pattern> {
    let p = sets.len();
    let mut inside = Vec::with_capacity(p);
    for (r, c) in sets.iter().enumerate() {
        if !t.image(c).is_subset(&sets[(r + 1) % p]) {
            return None;
        }
        if c.is_subset(target) {
            inside.push(true);
        } else if !c.intersects(target) {
            inside.push(false);
        } else {
            return None;
        }
    }
    Some(Pattern { inside })
}

/// Candidate trapping intervals around the orbit segment starting at `y`.
fn settle_point(t: &PiecewiseMap, y: &Rational, target: &IntervalSet, limits: &Limits) -> Option<Pattern> {
    let mut z = vec![y.clone()];
    for _ in 0..2 * MAX_PERIOD {
        let next = t.eval_capped(z.last().unwrap(), limits.bit_cap.saturating_mul(2)).ok()?;
        z.push(next);
    }
    for p in 1..=MAX_PERIOD {
        if let Some(sets) = affine_cycle_sets(t, &z, p) {
            if let Some(pat) = classify_phases(t, &sets, target) {
                return Some(pat);
            }
        }
        if p == 1 {
            for end in [Rational::zero(), Rational::one()] {
                let Some(c) = hull_with(&z[0], true, &end, true) else { continue };
                if let Some(pat) = classify_phases(t, &[IntervalSet::from_interval(c)], target) {
                    return Some(pat);
                }
            }
        }
    }
    None
}

/// Composite slope `A` of `p` affine steps along `z` and the phase fixed
/// points of that cycle.
fn affine_cycle(t: &PiecewiseMap, z: &[Rational], p: usize) -> Option<(Rational, Vec<Rational>)> {
    let mut slopes = Vec::with_capacity(p);
    let mut intercepts = Vec::with_capacity(p);
    for zr in &z[..p] {
        if t.overrides().contains_key(zr) {
            return None;
        }
        let piece = &t.pieces()[t.piece_index(zr)?];
        if !piece.poly.is_affine() {
            return None;
        }
        slopes.push(piece.poly.coeff(1));
        intercepts.push(piece.poly.coeff(0));
    }
    // g = f_{p-1} ∘ … ∘ f_0, written as A z + B.
    let (mut a, mut b) = (Rational::one(), Rational::zero());
    for (s, c) in slopes.iter().zip(&intercepts) {
        a = s * &a;
        b = &(s * &b) + c;
    }
    if a.is_zero() || a.abs() >= Rational::one() {
        return None;
    }
    let mut fixed = vec![&b / &(Rational::one() - &a)];
    for r in 0..p - 1 {
        let f = &(&slopes[r] * &fixed[r]) + &intercepts[r];
        fixed.push(f);
    }
    Some((a, fixed))
}

/// For an orbit following affine branches with period `p` and contraction
/// factor `A`, the phase `r` points lie between `z_r` and the phase fixed
/// point when `A > 0`, and between `z_r` and `z_{r+p}` when `A < 0`.
fn affine_cycle_sets(t: &PiecewiseMap, z: &[Rational], p: usize) -> Option<Vec<IntervalSet>> {
    let (a, fixed) = affine_cycle(t, z, p)?;
    let mut sets = Vec::with_capacity(p);
    for r in 0..p {
        let c = if a.is_positive() {
            let closed_end = fixed[r] == z[r];
            hull_with(&z[r], true, &fixed[r], closed_end)?
        } else {
            hull_with(&z[r], true, &z[r + p], true)?
        };
        sets.push(IntervalSet::from_interval(c));
    }
    Some(sets)
}

/// All `n` in `1..=horizon` with `T^n x ∈ target`.
pub fn orbit_returns(
    t: &PiecewiseMap,
    x: &Rational,
    target: &IntervalSet,
    horizon: usize,
    limits: &Limits,
) -> Result<OrbitReturns> {
    let mut times = Vec::new();
    let mut seen: HashMap<Rational, usize> = HashMap::new();
    let mut history: Vec<bool> = vec![target.contains(x)];
    seen.insert(x.clone(), 0);
    let mut y = x.clone();
    for n in 1..=horizon {
        y = t.eval_capped(&y, limits.bit_cap)?;
        let hit = target.contains(&y);
        history.push(hit);
        if hit {
            times.push(n);
        }
        if let Some(&s) = seen.get(&y) {
            // Exact cycle of period n - s: replay the recorded hits.
            let p = n - s;
            times.extend((n + 1..=horizon).filter(|m| history[s + (m - s) % p]));
            return Ok(OrbitReturns { times, settled_at: Some(n) });
        }
        seen.insert(y.clone(), n);
        if y.bits() > SETTLE_BITS && n % 4 == 0 {
            if let Some(pat) = settle_point(t, &y, target, limits) {
                let p = pat.inside.len();
                times.extend((n + 1..=horizon).filter(|m| pat.inside[(m - n) % p]));
                return Ok(OrbitReturns { times, settled_at: Some(n) });
            }
        }
    }
    Ok(OrbitReturns { times, settled_at: None })
}

fn max_bits(s: &IntervalSet) -> u64 {
    s.intervals().iter().map(|iv| iv.lo().bits().max(iv.hi().bits())).max().unwrap_or(0)
}

/// Every component of `u` is trapped away from the target.
fn settle_set(t: &PiecewiseMap, u: &IntervalSet, target: &IntervalSet) -> bool {
    settle_one(t, u, target)
        || u.intervals().iter().all(|iv| settle_one(t, &IntervalSet::from_interval(iv.clone()), target))
}

/// Trapping region for a set: its hull, possibly stretched to the fixed
/// points of contracting branches that meet it, or to an end of `[0, 1]`.
fn settle_one(t: &PiecewiseMap, u: &IntervalSet, target: &IntervalSet) -> bool {
    let Some(h) = u.hull() else { return true };
    let mut candidates = vec![h.clone()];
    let mut fixed = Vec::new();
    for piece in t.pieces() {
        if !piece.poly.is_affine() || piece.domain.intersect(&h).is_none() {
            continue;
        }
        let a = piece.poly.coeff(1);
        if a.abs() >= Rational::one() {
            continue;
        }
        let f = piece.poly.coeff(0) / (Rational::one() - a);
        if f.is_negative() || f > Rational::one() {
            continue;
        }
        fixed.push(f);
    }
    let stretch = |iv: &Interval, f: &Rational, closed: bool| -> Option<Interval> {
        if f > iv.hi() {
            Interval::new(iv.lo().clone(), f.clone(), iv.lo_closed(), closed)
        } else if f < iv.lo() {
            Interval::new(f.clone(), iv.hi().clone(), closed, iv.hi_closed())
        } else {
            Some(iv.clone())
        }
    };
    for f in &fixed {
        candidates.extend(stretch(&h, f, false));
    }
    let mut all = h.clone();
    for f in &fixed {
        if let Some(s) = stretch(&all, f, false) {
            all = s;
        }
    }
    candidates.push(all);
    candidates.extend(stretch(&h, &Rational::zero(), true));
    candidates.extend(stretch(&h, &Rational::one(), true));
    let invariant = candidates.into_iter().any(|c| {
        let c = IntervalSet::from_interval(c);
        u.is_subset(&c) && !c.intersects(target) && t.image(&c).is_subset(&c)
    });
    invariant || settle_set_cycle(t, u, &h, target)
}

/// Periodic version: phase hulls of `T^r u` stretched to the phase fixed
/// points of the cycle followed by the left end of `u`.
fn settle_set_cycle(t: &PiecewiseMap, u: &IntervalSet, h: &Interval, target: &IntervalSet) -> bool {
    let mut z = vec![h.lo().clone()];
    let mut images = vec![u.clone()];
    for _ in 0..2 * MAX_PERIOD {
        let Ok(next) = t.eval(z.last().unwrap()) else { return false };
        z.push(next);
        let im = t.image(images.last().unwrap());
        images.push(im);
    }
    for p in 1..=MAX_PERIOD {
        let Some((a, fixed)) = affine_cycle(t, &z, p) else { continue };
        let sets: Option<Vec<IntervalSet>> = (0..p)
            .map(|r| {
                let hr = images[r].hull()?;
                let c = if a.is_positive() {
                    stretch_open(&hr, &fixed[r])?
                } else {
                    let far = images[r + p].hull()?;
                    let lo = if hr.lo() <= far.lo() { (hr.lo(), hr.lo_closed()) } else { (far.lo(), far.lo_closed()) };
                    let hi = if hr.hi() >= far.hi() { (hr.hi(), hr.hi_closed()) } else { (far.hi(), far.hi_closed()) };
                    Interval::new(lo.0.clone(), hi.0.clone(), lo.1, hi.1)?
                };
                Some(IntervalSet::from_interval(c))
            })
            .collect();
        let Some(sets) = sets else { continue };
        if !u.is_subset(&sets[0]) {
            continue;
        }
        if let Some(pat) = classify_phases(t, &sets, target) {
            if pat.inside.iter().all(|&i| !i) {
                return true;
            }
        }
    }
    false
}

fn stretch_open(iv: &Interval, f: &Rational) -> Option<Interval> {
    if f > iv.hi() {
        Interval::new(iv.lo().clone(), f.clone(), iv.lo_closed(), false)
    } else if f < iv.lo() {
        Interval::new(f.clone(), iv.hi().clone(), false, iv.hi_closed())
    } else {
        Some(iv.clone())
    }
}

/// First `n` in `1..=horizon` with `T^n(ball) ∩ ball ≠ ∅`.
pub fn first_image_return(
    t: &PiecewiseMap,
    ball: &IntervalSet,
    horizon: usize,
    limits: &Limits,
) -> Result<Option<usize>> {
    let mut u = ball.clone();
    for n in 1..=horizon {
        let next = t.image(&u);
        next.check_size(limits.set_budget)?;
        if next.intersects(ball) {
            return Ok(Some(n));
        }
        if next == u {
            return Ok(None);
        }
        u = next;
        let bits = max_bits(&u);
        if bits > limits.bit_cap {
            return Err(Error::BitCap { bits, cap: limits.bit_cap });
        }
        if bits > SETTLE_BITS && n % 4 == 0 && settle_set(t, &u, ball) {
            return Ok(None);
        }
    }
    Ok(None)
}
