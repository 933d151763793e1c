//! Seeded generators for randomized checks.

use rand::Rng;

use crate::error::{Error, Result};
use crate::profile::{pl_max, PLProfile};
use crate::scalar::{Bound, Rational};

fn small_rational(rng: &mut impl Rng, lo: i128, hi: i128) -> Rational {
    let den = rng.gen_range(1..=8);
    Rational::new(rng.gen_range(lo * den..=hi * den), den)
}

/// Exact profile with 1 to 6 segments, small-denominator data, and a random
/// domain bound (half the time).
pub fn random_rational_profile(rng: &mut impl Rng) -> PLProfile<Rational> {
    let segments = rng.gen_range(1..=6);
    let mut radius = Rational::from_integer(0);
    let mut slope = small_rational(rng, 0, 1);
    let mut pairs = vec![(radius, slope)];
    for _ in 1..segments {
        radius += small_rational(rng, 0, 2) + Rational::new(1, 8);
        slope += small_rational(rng, 0, 2) + Rational::new(1, 8);
        pairs.push((radius, slope));
    }
    let bound = if rng.gen_bool(0.5) {
        Bound::At(radius + small_rational(rng, 0, 2) + Rational::new(1, 8))
    } else {
        Bound::Unbounded
    };
    let base = small_rational(rng, -3, 3);
    PLProfile::new(base, &pairs, bound).expect("generated data is convex")
}

/// Finite-valued coercive profile with 1 to 4 segments and positive slopes.
pub fn random_coercive_profile(rng: &mut impl Rng) -> PLProfile {
    let segments = rng.gen_range(1..=4);
    let mut radius = 0.0;
    let mut slope = rng.gen_range(0.2..1.0);
    let mut pairs = vec![(radius, slope)];
    for _ in 1..segments {
        radius += rng.gen_range(0.25..1.5);
        slope += rng.gen_range(0.1..1.5);
        pairs.push((radius, slope));
    }
    PLProfile::new(rng.gen_range(0.0..1.0), &pairs, Bound::Unbounded).expect("convex by construction")
}

/// `r -> c + a r` with `a >= 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialAffine {
    pub c: f64,
    pub a: f64,
}

impl RadialAffine {
    fn at(&self, r: f64) -> f64 {
        self.c + self.a * r
    }
}

/// `u = w v l1`, `v = w v l2` for bumps with disjoint regions `{l_i > w}`,
/// so that `u ^ v = w`. The regions are intervals in the radius;
/// `min(l1 - w, l2 - w)` is concave and piecewise linear, so it is checked
/// at the knots of `w`, at the crossing of `l1` and `l2`, and at infinity.
pub fn radial_bump_pair(
    w: &PLProfile,
    l1: RadialAffine,
    l2: RadialAffine,
) -> Result<(PLProfile, PLProfile)> {
    if l1.a < 0.0 || l2.a < 0.0 {
        return Err(Error::Domain("bumps must be non-decreasing in the radius".into()));
    }
    let knots = w.knots()?;
    let mut candidates: Vec<f64> = knots.iter().map(|k| k.radius).collect();
    if l1.a != l2.a {
        let r = (l2.c - l1.c) / (l1.a - l2.a);
        if r > 0.0 {
            candidates.push(r);
        }
    }
    if let Some(d) = w.bound().finite() {
        candidates.push(d);
        candidates.retain(|r| *r <= d);
    }
    let gap = |r: f64| {
        let wr = w.value_at(r).unwrap_or(f64::INFINITY);
        (l1.at(r) - wr).min(l2.at(r) - wr)
    };
    let overlap_far = w.bound().finite().is_none()
        && knots.last().is_some_and(|k| l1.a.min(l2.a) > k.slope);
    if overlap_far || candidates.iter().any(|&r| gap(r) > 0.0) {
        return Err(Error::Rejected("bump regions overlap".into()));
    }
    let lift = |l: RadialAffine| PLProfile::linear(l.c, l.a).and_then(|p| pl_max(w, &p));
    Ok((lift(l1)?, lift(l2)?))
}

/// Random disjoint bump pair over a random coercive base: a cap near the
/// origin and a shoulder further out. Returns `(w, u, v)`.
pub fn random_bump_pair(rng: &mut impl Rng) -> (PLProfile, PLProfile, PLProfile) {
    loop {
        let w = random_coercive_profile(rng);
        let bump = |rng: &mut dyn rand::RngCore, r0: f64| {
            let w0 = w.value_at(r0).expect("finite base");
            let s0 = w.segment_at(r0).slope;
            let a = s0 * rng.gen_range(0.0..1.0);
            let h = rng.gen_range(0.05..0.5);
            RadialAffine {
                c: w0 + h - a * r0,
                a,
            }
        };
        let r1 = rng.gen_range(0.0..0.5);
        let r2 = rng.gen_range(1.5..3.0);
        let (l1, l2) = (bump(rng, r1), bump(rng, r2));
        if let Ok((u, v)) = radial_bump_pair(&w, l1, l2) {
            return (w, u, v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::pl_min;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rational_profiles_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let p = random_rational_profile(&mut rng);
            assert!(p.knots().unwrap().windows(2).all(|w| w[0].slope < w[1].slope));
        }
    }

    #[test]
    fn bump_pairs_meet_in_the_base() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let (w, u, v) = random_bump_pair(&mut rng);
            let meet = pl_min(&u, &v).unwrap();
            assert!(meet.approx_eq(&w), "{w:?} {meet:?}");
        }
    }

    #[test]
    fn overlapping_bumps_rejected() {
        let w = PLProfile::linear(0.0, 1.0).unwrap();
        let l1 = RadialAffine { c: 0.5, a: 0.0 };
        let l2 = RadialAffine { c: 0.2, a: 0.5 };
        assert!(radial_bump_pair(&w, l1, l2).is_err());
        let far = RadialAffine { c: -4.0, a: 2.0 };
        assert!(radial_bump_pair(&w, l1, far).is_ok());
        let both_far = RadialAffine { c: -5.0, a: 3.0 };
        assert!(radial_bump_pair(&w, far, both_far).is_err());
    }
}
