//! The factorial embedding `g_k` of coercive into super-coercive functions,
//! its inverse, and the explicit profiles `v_l^t` and `u_zeta`.
//!
//! `g_k` is the identity up to `sf_k` and then piecewise linear with slopes
//! `k+1, k+2, ...`; its kinks sit at `sf_k` and at `sf_{k+j-1} + k!` with
//! values `sf_{k+j}`. Composition of a profile with `g_k` (or `g_k^{-1}`)
//! inserts a knot wherever the profile crosses a kink level.

use crate::error::{Error, Result};
use crate::profile::{Knot, KnotGenerator, PLProfile, Source};
use crate::scalar::{Bound, Scalar};
use crate::zeta::ScalarZeta;

/// Largest `k` for which `sf_k` fits in a `u64`.
pub const MAX_SF_INDEX: u32 = 20;

/// `sum_{i=1..k} i!`; `sf(0) = 0`.
pub fn sf(k: u32) -> Result<u64> {
    if k > MAX_SF_INDEX {
        return Err(Error::Overflow(format!("sf_{k}")));
    }
    let mut fact: u64 = 1;
    let mut sum: u64 = 0;
    for i in 1..=u64::from(k) {
        fact *= i;
        sum += fact;
    }
    Ok(sum)
}

/// `k!` for `k <= 20`.
pub fn factorial(k: u32) -> Result<u64> {
    if k > MAX_SF_INDEX {
        return Err(Error::Overflow(format!("{k}!")));
    }
    Ok((1..=u64::from(k)).product())
}

/// `sf_m` as a scalar; exact while it fits in 64 bits, rounded beyond.
fn sf_scalar<T: Scalar>(m: u32) -> T {
    match sf(m) {
        Ok(v) => T::from_u64(v),
        Err(_) => {
            let mut fact = 1.0_f64;
            let mut sum = 0.0_f64;
            for i in 1..=m {
                fact *= f64::from(i);
                sum += fact;
            }
            T::from_f64(sum)
        }
    }
}

fn factorial_scalar<T: Scalar>(m: u32) -> T {
    match factorial(m) {
        Ok(v) => T::from_u64(v),
        Err(_) => T::from_f64((1..=m).map(f64::from).product()),
    }
}

/// The function `g_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gk {
    pub k: u32,
}

/// One kink of `g_k`: input level, output value and right slope there.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Kink<T> {
    at: T,
    value: T,
    slope: T,
}

impl Gk {
    pub fn new(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("g_k needs k >= 1".into()));
        }
        Ok(Gk { k })
    }

    /// The `j`-th kink, `j >= 0`.
    fn kink<T: Scalar>(&self, j: u32) -> Kink<T> {
        let k = self.k;
        let at = if j == 0 {
            sf_scalar(k)
        } else {
            sf_scalar::<T>(k + j - 1) + factorial_scalar(k)
        };
        Kink {
            at,
            value: sf_scalar(k + j),
            slope: T::from_u64(u64::from(k + j + 1)),
        }
    }

    /// Kink of `g_k^{-1}`: roles of input and output swapped.
    fn inverse_kink<T: Scalar>(&self, j: u32) -> Kink<T> {
        let g = self.kink::<T>(j);
        Kink {
            at: g.value,
            value: g.at,
            slope: T::one() / g.slope,
        }
    }

    fn kink_of<T: Scalar>(&self, j: u32, inverse: bool) -> Kink<T> {
        if inverse {
            self.inverse_kink(j)
        } else {
            self.kink(j)
        }
    }

    /// Index of the last kink at or below `y`.
    fn active<T: Scalar>(&self, y: T, inverse: bool) -> Option<(u32, Kink<T>)> {
        let mut found = None;
        let mut j = 0;
        loop {
            let kink = self.kink_of::<T>(j, inverse);
            if kink.at > y {
                return found;
            }
            found = Some((j, kink));
            j += 1;
        }
    }

    fn apply<T: Scalar>(&self, y: T, inverse: bool) -> T {
        match self.active(y, inverse) {
            None => y,
            Some((_, kink)) => kink.value + kink.slope * (y - kink.at),
        }
    }

    fn right_slope<T: Scalar>(&self, y: T, inverse: bool) -> T {
        self.active(y, inverse).map_or(T::one(), |(_, kink)| kink.slope)
    }

    pub fn eval<T: Scalar>(&self, r: T) -> T {
        self.apply(r, false)
    }

    pub fn inverse<T: Scalar>(&self, s: T) -> T {
        self.apply(s, true)
    }

    /// Right derivative of `g_k` at `r`.
    pub fn slope<T: Scalar>(&self, r: T) -> T {
        self.right_slope(r, false)
    }

    /// Input levels where `g_k` changes slope, below `limit`.
    pub fn kink_levels(&self, limit: f64) -> Vec<f64> {
        (0..)
            .map(|j| self.kink::<f64>(j).at)
            .take_while(|&a| a < limit)
            .collect()
    }
}

/// `g_k(r)`.
pub fn gk_eval(k: u32, r: f64) -> f64 {
    Gk { k: k.max(1) }.eval(r)
}

/// `g_k^{-1}(s)`.
pub fn gk_inverse(k: u32, s: f64) -> f64 {
    Gk { k: k.max(1) }.inverse(s)
}

/// Knot stream of `g_k ∘ v` or `g_k^{-1} ∘ v`.
struct ComposeGen<T: Scalar> {
    g: Gk,
    inverse: bool,
    inner: PLProfile<T>,
    /// Index of the inner segment being walked.
    seg: usize,
    /// Next kink to test for a crossing inside the segment.
    next_kink: u32,
    started: bool,
    finished: bool,
}

impl<T: Scalar> ComposeGen<T> {
    fn new(g: Gk, inverse: bool, inner: PLProfile<T>) -> Self {
        ComposeGen {
            g,
            inverse,
            inner,
            seg: 0,
            next_kink: 0,
            started: false,
            finished: false,
        }
    }

    fn segment_end(&self) -> Option<T> {
        match self.inner.knot(self.seg + 1) {
            Some(k) => Some(k.radius),
            None => self.inner.bound().finite(),
        }
    }

    fn step(&mut self) -> Option<Knot<T>> {
        loop {
            if self.finished {
                return None;
            }
            let seg = self.inner.knot(self.seg).expect("segment exists");
            if !self.started {
                self.started = true;
                self.next_kink = self
                    .g
                    .active(seg.value, self.inverse)
                    .map_or(0, |(j, _)| j + 1);
                let slope = if seg.slope == T::zero() {
                    T::zero()
                } else {
                    self.g.right_slope(seg.value, self.inverse) * seg.slope
                };
                return Some(Knot::new(
                    seg.radius,
                    self.g.apply(seg.value, self.inverse),
                    slope,
                ));
            }
            let end = self.segment_end();
            if seg.slope > T::zero() {
                let kink = self.g.kink_of::<T>(self.next_kink, self.inverse);
                let r = seg.radius + (kink.at - seg.value) / seg.slope;
                if end.is_none_or(|e| r < e) {
                    self.next_kink += 1;
                    return Some(Knot::new(r, kink.value, kink.slope * seg.slope));
                }
            }
            if self.inner.knot(self.seg + 1).is_none() {
                // Last segment of a finite profile: it ends at the domain
                // bound (an unbounded flat tail was rejected up front).
                self.finished = true;
                continue;
            }
            self.seg += 1;
            self.started = false;
        }
    }
}

impl<T: Scalar> KnotGenerator<T> for ComposeGen<T> {
    fn next_knot(&mut self) -> Knot<T> {
        self.step().expect("composition of an unbounded profile is infinite")
    }
}

fn compose<T: Scalar>(k: u32, u: &PLProfile<T>, inverse: bool) -> Result<PLProfile<T>> {
    let g = Gk::new(k)?;
    if !u.is_coercive() {
        return Err(Error::NotCoercive(
            "composition with g_k needs a coercive profile".into(),
        ));
    }
    if u.knot_count().is_some() {
        if let Bound::At(_) = u.bound() {
            let mut gen = ComposeGen::new(g, inverse, u.clone());
            let mut knots = Vec::new();
            while let Some(kn) = gen.step() {
                knots.push(kn);
            }
            return PLProfile::from_knots(knots, u.bound()).map_err(|e| match e {
                Error::InvalidProfile(_) => Error::NotConvex { at: f64::NAN },
                e => e,
            });
        }
    }
    let source = if inverse {
        Source::GkInverse {
            k,
            inner: u.clone(),
        }
    } else {
        Source::Gk {
            k,
            inner: u.clone(),
        }
    };
    Ok(PLProfile::lazy(
        source,
        Box::new(ComposeGen::new(g, inverse, u.clone())),
    ))
}

/// `g_k ∘ v`. Coercive unbounded inputs become lazy super-coercive profiles;
/// inputs with a finite domain bound stay finite.
pub fn compose_gk<T: Scalar>(k: u32, u: &PLProfile<T>) -> Result<PLProfile<T>> {
    compose(k, u, false)
}

/// `g_k^{-1} ∘ v`. Convexity is not automatic here: finite results are
/// validated, lazy results report slope drops through
/// [`PLProfile::convexity_violation`].
pub fn compose_gk_inverse<T: Scalar>(k: u32, u: &PLProfile<T>) -> Result<PLProfile<T>> {
    compose(k, u, true)
}

/// `m_t = min { m >= 1 : t <= sf_m }`.
pub fn m_t<T: Scalar>(t: T) -> u32 {
    (1..).find(|&m| t <= sf_scalar::<T>(m)).expect("sf_m is unbounded")
}

/// `A^t_{l,m} = 1 + (sf_{m_t} - t + (m - m_t)) / l` for `m >= m_t`.
pub fn a_lm<T: Scalar>(t: T, l: u64, m: u32) -> T {
    let mt = m_t(t);
    assert!(m >= mt, "A_(l,m) is defined for m >= m_t");
    T::one() + (sf_scalar::<T>(mt) - t + T::from_u64(u64::from(m - mt))) / T::from_u64(l)
}

struct VltGen<T> {
    t: T,
    l: u64,
    mt: u32,
    /// 0: plateau, 1: ramp, then m = mt + (step - 2).
    step: u32,
}

impl<T: Scalar> KnotGenerator<T> for VltGen<T> {
    fn next_knot(&mut self) -> Knot<T> {
        let l = T::from_u64(self.l);
        let step = self.step;
        self.step += 1;
        match step {
            0 => Knot::new(T::zero(), self.t, T::zero()),
            1 => Knot::new(T::one(), self.t, l),
            _ => {
                let m = self.mt + (step - 2);
                Knot::new(a_lm(self.t, self.l, m), sf_scalar(m), factorial_scalar::<T>(m + 1) * l)
            }
        }
    }
}

/// `v_l^t`: equal to `t` on `[0, 1]`, slope `l` up to `A_{l,m_t}`, then
/// slope `(m+1)! l` between `A_{l,m}` and `A_{l,m+1}`.
pub fn build_vlt<T: Scalar>(t: T, l: u64) -> Result<PLProfile<T>> {
    if l == 0 {
        return Err(Error::Domain("v_l^t needs l >= 1".into()));
    }
    let gen = VltGen {
        t,
        l,
        mt: m_t(t),
        step: 0,
    };
    Ok(PLProfile::lazy(Source::Vlt { t, l }, Box::new(gen)))
}

/// Smallest `t >= lo` with `moment(t) >= target`, by bracketing and
/// bisection on the closed-form moment.
fn uzeta_level(zeta: &ScalarZeta, n: usize, lo: f64, target: f64) -> Option<f64> {
    let m = |t: f64| zeta.moment(n, t);
    if m(lo) >= target {
        return Some(lo);
    }
    let mut a = lo;
    let mut b = 2.0 * lo + 1.0;
    let mut doublings = 0;
    while m(b) < target {
        a = b;
        b = 2.0 * b + 1.0;
        doublings += 1;
        if doublings > 1100 || !b.is_finite() {
            return None;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if m(mid) >= target {
            b = mid;
        } else {
            a = mid;
        }
    }
    Some(b)
}

struct UzetaGen {
    zeta: ScalarZeta,
    n: usize,
    k: u64,
    t: f64,
    r: f64,
}

impl UzetaGen {
    fn advance(&mut self) -> Option<Knot<f64>> {
        let k = self.k + 1;
        let slope = (k as f64).powf(1.0 / self.n as f64);
        let knot = Knot::new(self.r, self.t, slope);
        let tk = uzeta_level(&self.zeta, self.n, self.t + 1.0, k as f64)?;
        self.r += (tk - self.t) / slope;
        self.t = tk;
        self.k = k;
        Some(knot)
    }
}

impl KnotGenerator<f64> for UzetaGen {
    fn next_knot(&mut self) -> Knot<f64> {
        self.advance()
            .unwrap_or_else(|| panic!("u_zeta level {} not reached; moment appears finite", self.k + 1))
    }
}

/// Levels checked eagerly by [`build_uzeta`] before the lazy stream is handed out.
pub const UZETA_EAGER_LEVELS: usize = 32;

/// The profile of `u_zeta`: slope `k^{1/n}` between levels `t_{k-1}` and
/// `t_k`, where `t_k` is the smallest value `>= t_{k-1} + 1` with
/// `int_0^{t_k} s^{n-1} zeta(s) ds >= k`.
pub fn build_uzeta(zeta: &ScalarZeta, n: usize) -> Result<PLProfile<f64>> {
    if n == 0 {
        return Err(Error::Domain("dimension must be positive".into()));
    }
    zeta.validate()?;
    if !zeta.is_nonnegative() {
        return Err(Error::InvalidZeta("u_zeta needs a non-negative zeta".into()));
    }
    if zeta.has_finite_moment(n) {
        return Err(Error::MomentFinite(format!(
            "moment of order {} is finite; u_zeta does not exist",
            n - 1
        )));
    }
    let mut probe = UzetaGen {
        zeta: zeta.clone(),
        n,
        k: 0,
        t: 0.0,
        r: 0.0,
    };
    for _ in 0..UZETA_EAGER_LEVELS {
        if probe.advance().is_none() {
            return Err(Error::MomentFinite(format!(
                "level {} not reached; moment appears finite",
                probe.k + 1
            )));
        }
    }
    let gen = UzetaGen {
        zeta: zeta.clone(),
        n,
        k: 0,
        t: 0.0,
        r: 0.0,
    };
    Ok(PLProfile::lazy(
        Source::Uzeta {
            zeta: zeta.clone(),
            n,
        },
        Box::new(gen),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Ext, Rational};

    #[test]
    fn sf_table() {
        assert_eq!(sf(0).unwrap(), 0);
        assert_eq!(sf(1).unwrap(), 1);
        assert_eq!(sf(2).unwrap(), 3);
        assert_eq!(sf(3).unwrap(), 9);
        assert_eq!(sf(20).unwrap(), 2_561_327_494_111_820_313);
        assert!(matches!(sf(21), Err(Error::Overflow(_))));
    }

    #[test]
    fn gk_branches() {
        assert_eq!(gk_eval(1, 0.5), 0.5);
        assert_eq!(gk_eval(1, 2.0), 3.0);
        assert_eq!(gk_eval(1, 1.5), 2.0);
        assert_eq!(gk_eval(2, -4.0), -4.0);
        assert_eq!(gk_inverse(1, 0.2), 0.2);
        assert_eq!(gk_inverse(1, 3.0), 2.0);
    }

    #[test]
    fn gk_kink_values_exact() {
        for k in 1..=5 {
            let g = Gk { k };
            for j in 0..=5 {
                let x = sf(k + j - 1).unwrap() + factorial(k).unwrap();
                let got: Rational = g.eval(Rational::from_integer(i128::from(x)));
                assert_eq!(got, Rational::from_integer(i128::from(sf(k + j).unwrap())));
            }
        }
    }

    #[test]
    fn compose_linear_matches_pointwise() {
        let v = PLProfile::linear(0.0, 1.0).unwrap();
        let c = compose_gk(1, &v).unwrap();
        assert!(c.is_lazy());
        for i in 0..100 {
            let r = i as f64 * 0.37;
            let want = gk_eval(1, r);
            let got = c.eval(r).unwrap().to_f64();
            assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "r={r}");
        }
    }

    #[test]
    fn compose_keeps_low_sublevels() {
        let v = PLProfile::new(0.0, &[(0.0, 0.5), (1.0, 2.0)], Bound::Unbounded).unwrap();
        let c = compose_gk(1, &v).unwrap();
        assert_eq!(c.sublevel_radius(0.7), v.sublevel_radius(0.7));
    }

    #[test]
    fn compose_bounded_stays_finite() {
        let v = PLProfile::new(0.0, &[(0.0, 1.0)], Bound::At(5.0)).unwrap();
        let c = compose_gk(2, &v).unwrap();
        assert!(!c.is_lazy());
        assert_eq!(c.bound(), Bound::At(5.0));
        assert_eq!(c.eval(4.0).unwrap(), Ext::Finite(gk_eval(2, 4.0)));
    }

    #[test]
    fn compose_rejects_flat() {
        let v = PLProfile::linear(1.0, 0.0).unwrap();
        assert!(matches!(compose_gk(1, &v), Err(Error::NotCoercive(_))));
    }

    #[test]
    fn vlt_structure_rational() {
        let t = Rational::new(1, 2);
        let l = 10;
        let v = build_vlt(t, l).unwrap();
        assert_eq!(v.eval(Rational::new(1, 2)).unwrap(), Ext::Finite(t));
        let mt = m_t(t);
        assert_eq!(mt, 1);
        for m in mt..mt + 5 {
            let a = a_lm(t, l, m);
            assert_eq!(v.eval(a).unwrap(), Ext::Finite(sf_scalar(m)));
            if m > mt {
                assert_eq!(a - a_lm(t, l, m - 1), Rational::new(1, 10));
            }
        }
    }

    #[test]
    fn vlt_epi_limit_off_sphere() {
        for l in [1, 10, 100] {
            let v = build_vlt(0.0, l).unwrap();
            assert_eq!(v.eval(0.9).unwrap(), Ext::Finite(0.0));
        }
        let big: Vec<f64> = [1, 10, 100]
            .iter()
            .map(|&l| build_vlt(0.0, l).unwrap().eval(1.3).unwrap().to_f64())
            .collect();
        assert!(big[0] < big[1] && big[1] < big[2]);
    }

    #[test]
    fn uzeta_first_level() {
        let p = build_uzeta(&ScalarZeta::harmonic(), 2).unwrap();
        let k1 = p.knot(1).unwrap();
        // r_1 = t_1 since the first slope is 1.
        assert_eq!(k1.radius, k1.value);
        assert!((k1.value - (k1.value + 1.0).ln() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uzeta_rejects_finite_moment() {
        assert!(matches!(
            build_uzeta(&ScalarZeta::exp_decay(1.0), 2),
            Err(Error::MomentFinite(_))
        ));
    }
}
