//! Valuation components of radial functions `u(x) = v(|x|)` on `R^n`.
//!
//! `z0` and the two annulus sums are closed forms over the knots of the
//! profile. `z1` integrates `r^{n-1} zeta(v(r))` segment by segment with
//! Gauss-Kronrod quadrature and stops once a certified tail bound is small.

use crate::error::{Error, Result};
use crate::profile::{Knot, PLProfile};
use crate::quadrature::{integrate, Integral};
use crate::scalar::Bound;
use crate::zeta::ScalarZeta;

/// Terms summed by the annulus formulas before giving up.
pub const MAX_ANNULI: usize = 200_000;

/// Segments integrated by [`z1`] before declaring the integral unbounded.
pub const MAX_Z1_SEGMENTS: usize = 100_000;

/// A profile lifted to `R^n`.
#[derive(Clone, Debug)]
pub struct RadialFn {
    pub profile: PLProfile,
    pub n: usize,
}

impl RadialFn {
    pub fn new(profile: PLProfile, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("dimension must be at least 1".into()));
        }
        Ok(RadialFn { profile, n })
    }

    /// `u(x / lambda)`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        RadialFn::new(self.profile.scaled(lambda)?, self.n)
    }

    /// The conjugate `u*`, again radial.
    pub fn conjugate(&self) -> Self {
        RadialFn {
            profile: self.profile.conjugate(),
            n: self.n,
        }
    }

    pub fn min_value(&self) -> f64 {
        self.profile.base()
    }

    /// `u(x)` for a point given by its coordinates.
    pub fn eval_point(&self, x: &[f64]) -> f64 {
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        self.profile.eval(r).map_or(f64::INFINITY, |v| v.to_f64())
    }
}

/// Volume of the Euclidean unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// `zeta_0(min u)`.
pub fn z0(zeta0: &ScalarZeta, u: &RadialFn) -> f64 {
    zeta0.eval(u.min_value())
}

/// `int zeta_1(u)` over `R^n` to absolute tolerance `tol`.
pub fn z1(zeta1: &ScalarZeta, u: &RadialFn, tol: f64) -> Result<f64> {
    z1_with_error(zeta1, u, tol).map(|i| i.value)
}

/// [`z1`] with the accumulated error estimate (quadrature plus tail bound).
pub fn z1_with_error(zeta1: &ScalarZeta, u: &RadialFn, tol: f64) -> Result<Integral> {
    radial_integral(zeta1, u, tol, None)
}

/// `int_{|x| <= radius} zeta(u)`, with no tail treatment.
pub fn z1_ball(zeta: &ScalarZeta, u: &RadialFn, radius: f64, tol: f64) -> Result<f64> {
    radial_integral(zeta, u, tol, Some(radius)).map(|i| i.value)
}

/// `int_a^b r^{n-1} zeta(value + slope (r - a)) dr`, split where the
/// affine argument crosses a breakpoint of `zeta`.
fn affine_piece(
    zeta: &ScalarZeta,
    n: usize,
    knot: Knot<f64>,
    a: f64,
    b: f64,
    tol: f64,
) -> Integral {
    let arg = |r: f64| knot.value + knot.slope * (r - knot.radius);
    let mut cuts = vec![a];
    if knot.slope > 0.0 {
        let (lo, hi) = (arg(a), arg(b));
        for t in zeta.breakpoints() {
            if t > lo && t < hi {
                cuts.push(knot.radius + (t - knot.value) / knot.slope);
            }
        }
    }
    cuts.push(b);
    let f = |r: f64| r.powi(n as i32 - 1) * zeta.eval(arg(r));
    let pieces = (cuts.len() - 1) as f64;
    let mut total = Integral {
        value: 0.0,
        error: 0.0,
    };
    for w in cuts.windows(2) {
        let i = integrate(&f, w[0], w[1], tol / pieces);
        total.value += i.value;
        total.error += i.error;
    }
    total
}

fn radial_integral(
    zeta: &ScalarZeta,
    u: &RadialFn,
    tol: f64,
    ball: Option<f64>,
) -> Result<Integral> {
    let n = u.n;
    let p = &u.profile;
    let scale = n as f64 * unit_ball_volume(n);
    // Budget: half for quadrature (sum of tol_i), half for the tail bound.
    let quad_tol = |i: usize| 0.5 * tol / scale * 6.0 / (std::f64::consts::PI.powi(2) * ((i + 1) as f64).powi(2));
    let tail_tol = 0.5 * tol / scale;
    let limit = match (p.bound(), ball) {
        (Bound::At(d), Some(r)) => Some(d.min(r)),
        (Bound::At(d), None) => Some(d),
        (Bound::Unbounded, r) => r,
    };

    let mut total = Integral {
        value: 0.0,
        error: 0.0,
    };
    let mut piece = 0;
    let mut i = 0;
    loop {
        let Some(knot) = p.knot(i) else { break };
        let next = p.knot(i + 1).map(|k| k.radius);
        let a = knot.radius;
        if limit.is_some_and(|l| a >= l) {
            break;
        }
        let seg_end = match (next, limit) {
            (Some(b), Some(l)) => Some(b.min(l)),
            (Some(b), None) => Some(b),
            (None, l) => l,
        };
        match seg_end {
            Some(b) => {
                let part = affine_piece(zeta, n, knot, a, b, quad_tol(piece));
                piece += 1;
                total.value += part.value;
                total.error += part.error;
                if ball.is_none() && limit.is_none_or(|l| b < l) {
                    let level = knot.value + knot.slope * (b - a);
                    let slope = p.knot(i + 1).map_or(knot.slope, |k| k.slope);
                    if let Some(bound) = zeta.radial_tail_bound(n, b, level, slope) {
                        if bound <= tail_tol {
                            total.error += bound * scale;
                            break;
                        }
                    }
                }
            }
            None => {
                // Infinite final segment: extend in chunks until certified.
                if knot.slope == 0.0 {
                    if zeta.eval(knot.value) == 0.0 {
                        break;
                    }
                    return Err(Error::Unbounded(
                        "zeta is non-zero on an unbounded flat region".into(),
                    ));
                }
                let mut lo = a;
                loop {
                    let hi = 2.0 * lo + 1.0;
                    let part = affine_piece(zeta, n, knot, lo, hi, quad_tol(piece));
                    piece += 1;
                    total.value += part.value;
                    total.error += part.error;
                    let level = knot.value + knot.slope * (hi - a);
                    match zeta.radial_tail_bound(n, hi, level, knot.slope) {
                        Some(bound) if bound <= tail_tol => {
                            total.error += bound * scale;
                            break;
                        }
                        _ if piece > MAX_Z1_SEGMENTS || !hi.is_finite() => {
                            return Err(Error::Unbounded(
                                "no tail certificate for the final segment".into(),
                            ));
                        }
                        _ => lo = hi,
                    }
                }
                break;
            }
        }
        i += 1;
        if piece > MAX_Z1_SEGMENTS {
            return Err(Error::Unbounded(format!(
                "tail bound not reached after {MAX_Z1_SEGMENTS} segments"
            )));
        }
    }
    total.value *= scale;
    total.error *= scale;
    Ok(total)
}

/// One annulus `inner < |x| < outer` on which a gradient expression is constant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Annulus {
    pub inner: f64,
    /// `+inf` for the unbounded outer region.
    pub outer: f64,
    pub value: f64,
}

impl Annulus {
    /// `v_n (outer^n - inner^n)`.
    pub fn volume(&self, n: usize) -> f64 {
        unit_ball_volume(n) * (self.outer.powi(n as i32) - self.inner.powi(n as i32))
    }
}

/// A.e. values of `grad u*(x) . x - u*(x)`: the annulus between consecutive
/// slopes `s_{i-1} < |x| < s_i` carries the knot value `v_i`. Lazy profiles
/// are listed until the first value at or above `stop_level`.
pub fn annulus_decomposition(u: &RadialFn, stop_level: Option<f64>) -> Result<Vec<Annulus>> {
    let p = &u.profile;
    if p.is_lazy() && stop_level.is_none() {
        return Err(Error::LazyOperand);
    }
    let mut out = Vec::new();
    let mut inner = 0.0;
    for (i, k) in p.iter_knots().enumerate() {
        if i >= MAX_ANNULI {
            return Err(Error::NonTerminating(i));
        }
        out.push(Annulus {
            inner,
            outer: k.slope,
            value: k.value,
        });
        inner = k.slope;
        if stop_level.is_some_and(|t| k.value >= t) {
            return Ok(out);
        }
    }
    if let Some(d) = p.bound().finite() {
        out.push(Annulus {
            inner,
            outer: f64::INFINITY,
            value: p.value_at(d).expect("bound is in the domain"),
        });
    }
    Ok(out)
}

/// A.e. values of `grad u(x) . x - u(x)`: on the segment from `rho_i` to
/// `rho_{i+1}` with slope `s_i` it equals `s_i rho_i - v_i`.
pub fn dual_annulus_decomposition(u: &RadialFn, stop_level: Option<f64>) -> Result<Vec<Annulus>> {
    let p = &u.profile;
    if p.is_lazy() && stop_level.is_none() {
        return Err(Error::LazyOperand);
    }
    let mut out = Vec::new();
    let mut i = 0;
    loop {
        if i >= MAX_ANNULI {
            return Err(Error::NonTerminating(i));
        }
        let Some(k) = p.knot(i) else { break };
        let outer = match p.knot(i + 1) {
            Some(next) => next.radius,
            None => p.bound().to_f64(),
        };
        let value = k.radius * k.slope - k.value;
        out.push(Annulus {
            inner: k.radius,
            outer,
            value,
        });
        if stop_level.is_some_and(|t| value >= t) {
            break;
        }
        i += 1;
    }
    Ok(out)
}

fn annulus_sum(zeta2: &ScalarZeta, n: usize, annuli: &[Annulus]) -> Result<f64> {
    let mut total = 0.0;
    for a in annuli {
        let z = zeta2.eval(a.value);
        if z == 0.0 {
            continue;
        }
        if a.outer == f64::INFINITY {
            return Err(Error::Unbounded(format!(
                "zeta_2({}) != 0 on an unbounded region",
                a.value
            )));
        }
        total += z * a.volume(n);
    }
    Ok(total)
}

fn stop_level(zeta2: &ScalarZeta, u: &RadialFn) -> Result<Option<f64>> {
    match (zeta2.threshold, u.profile.is_lazy()) {
        (Some(t), _) => Ok(Some(t)),
        (None, false) => Ok(None),
        (None, true) => Err(Error::Domain(
            "an infinite profile needs a declared threshold for zeta_2".into(),
        )),
    }
}

/// `int zeta_2(grad u* . x - u*)` as a finite annulus sum.
pub fn z2_exact(zeta2: &ScalarZeta, u: &RadialFn) -> Result<f64> {
    let annuli = annulus_decomposition(u, stop_level(zeta2, u)?)?;
    annulus_sum(zeta2, u.n, &annuli)
}

/// `int zeta_2(grad u . x - u)` as a finite sum over profile segments.
pub fn z2_dual_exact(zeta2: &ScalarZeta, u: &RadialFn) -> Result<f64> {
    let annuli = dual_annulus_decomposition(u, stop_level(zeta2, u)?)?;
    annulus_sum(zeta2, u.n, &annuli)
}

/// Outcome of [`moment_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Moment {
    Finite(f64),
    /// No certificate; carries the partial integral up to the budget.
    DivergesBeyond { budget: f64, partial: f64 },
}

/// `int_0^inf t^{n-1} zeta(t) dt` when the tail certifies convergence.
pub fn moment_check(zeta1: &ScalarZeta, n: usize, budget: f64) -> Moment {
    if zeta1.has_finite_moment(n) {
        Moment::Finite(zeta1.moment(n, f64::INFINITY))
    } else {
        Moment::DivergesBeyond {
            budget,
            partial: zeta1.moment(n, budget),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::TailRule;
    use std::f64::consts::PI;

    fn staircase() -> PLProfile {
        PLProfile::with_tail(
            PLProfile::linear(0.0, 1.0).unwrap(),
            TailRule::Linear {
                level_step: 1.0,
                slope_step: 1.0,
            },
        )
        .unwrap()
    }

    #[test]
    fn ball_volumes() {
        assert_eq!(unit_ball_volume(1), 2.0);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn z0_examples() {
        let u = RadialFn::new(PLProfile::linear(5.0, 1.0).unwrap(), 2).unwrap();
        assert_eq!(z0(&ScalarZeta::identity(), &u), 5.0);
        let square = ScalarZeta::new(
            vec![[-3.0, 9.0], [-2.0, 4.0], [-1.0, 1.0], [0.0, 0.0]],
            crate::zeta::Tail::Zero,
            None,
        )
        .unwrap();
        let w = RadialFn::new(PLProfile::linear(-2.0, 1.0).unwrap(), 2).unwrap();
        assert_eq!(z0(&square, &w), 4.0);
    }

    #[test]
    fn z1_exponential_gauge() {
        let u = RadialFn::new(PLProfile::linear(0.0, 1.0).unwrap(), 2).unwrap();
        let v = z1(&ScalarZeta::exp_decay(1.0), &u, 1e-9).unwrap();
        assert!((v - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn z1_indicator() {
        let t = 0.7;
        let u = RadialFn::new(PLProfile::indicator(t, 1.0).unwrap(), 3).unwrap();
        let z = ScalarZeta::exp_decay(1.0);
        let v = z1(&z, &u, 1e-12).unwrap();
        assert!((v - unit_ball_volume(3) * z.eval(t)).abs() < 1e-12);
    }

    #[test]
    fn z2_staircase_is_pi() {
        let u = RadialFn::new(staircase(), 2).unwrap();
        let v = z2_exact(&ScalarZeta::hat(1.0), &u).unwrap();
        assert!((v - PI).abs() < 1e-12);
        let d = z2_dual_exact(&ScalarZeta::hat(1.0), &u).unwrap();
        assert!((d - PI).abs() < 1e-12);
    }

    #[test]
    fn annuli_of_staircase() {
        let u = RadialFn::new(staircase(), 2).unwrap();
        let a = annulus_decomposition(&u, Some(2.0)).unwrap();
        assert_eq!(a[0], Annulus { inner: 0.0, outer: 1.0, value: 0.0 });
        assert_eq!(a[1], Annulus { inner: 1.0, outer: 2.0, value: 1.0 });
        assert_eq!(a[2].value, 2.0);
    }

    #[test]
    fn zero_zeta_gives_zero() {
        let u = RadialFn::new(staircase(), 2).unwrap();
        assert_eq!(z2_exact(&ScalarZeta::zero(), &u).unwrap(), 0.0);
        assert_eq!(z2_dual_exact(&ScalarZeta::zero(), &u).unwrap(), 0.0);
    }

    #[test]
    fn unbounded_region_needs_vanishing_zeta() {
        // The indicator's conjugate region |x| > 0 has value t = 0.5.
        let u = RadialFn::new(PLProfile::indicator(0.5, 1.0).unwrap(), 2).unwrap();
        assert!(matches!(
            z2_exact(&ScalarZeta::hat(1.0), &u),
            Err(Error::Unbounded(_))
        ));
        assert_eq!(z2_exact(&ScalarZeta::hat(0.5), &u).unwrap(), 0.0);
    }

    #[test]
    fn moments() {
        assert_eq!(moment_check(&ScalarZeta::exp_decay(1.0), 2, 10.0), Moment::Finite(1.0));
        match moment_check(&ScalarZeta::harmonic(), 2, 100.0) {
            Moment::DivergesBeyond { partial, .. } => {
                assert!((partial - (100.0 - 101f64.ln())).abs() < 1e-10)
            }
            m => panic!("unexpected {m:?}"),
        }
        assert!(matches!(
            moment_check(&ScalarZeta::hat(3.0), 3, 1.0),
            Moment::Finite(_)
        ));
    }
}
