//! Scalar weight functions `zeta: R -> R` used by the valuations.
//!
//! A [`ScalarZeta`] is piecewise linear through its knots, with a closed-form
//! tail beyond the last knot (zero, `c e^{-alpha t}` or `c (1+t)^{-p}`).
//! Repeated knot abscissae encode jumps; evaluation is right-continuous.
//! The closed family keeps integrals and moment tails certifiable.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Tail {
    #[default]
    Zero,
    Exp {
        c: f64,
        alpha: f64,
    },
    Power {
        c: f64,
        p: f64,
    },
    /// Continues the last knot segment.
    Linear,
}

/// Behaviour left of the first knot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Head {
    /// Constant equal to the first knot value.
    #[default]
    Constant,
    /// Continues the first segment linearly.
    Linear,
}

fn is_false(b: &bool) -> bool {
    !*b
}

fn is_default_head(h: &Head) -> bool {
    *h == Head::Constant
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarZeta {
    #[serde(default)]
    pub knots: Vec<[f64; 2]>,
    #[serde(default)]
    pub tail: Tail,
    /// `zeta(t) = 0` for every `t >= threshold`, when declared.
    #[serde(rename = "threshold_T", default)]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "is_default_head")]
    pub head: Head,
    /// Evaluate at `-t` instead of `t`.
    #[serde(default, skip_serializing_if = "is_false")]
    pub reflect: bool,
}

/// A maximal interval on which the function has one closed form.
#[derive(Clone, Copy, Debug)]
enum Piece {
    /// `value(t) = a + b t`.
    Affine { a: f64, b: f64 },
    Tail(Tail),
}

impl ScalarZeta {
    pub fn new(knots: Vec<[f64; 2]>, tail: Tail, threshold: Option<f64>) -> Result<Self> {
        let z = ScalarZeta {
            knots,
            tail,
            threshold,
            head: Head::Constant,
            reflect: false,
        };
        z.validate()?;
        Ok(z)
    }

    pub fn zero() -> Self {
        ScalarZeta {
            knots: Vec::new(),
            tail: Tail::Zero,
            threshold: Some(f64::NEG_INFINITY),
            head: Head::Constant,
            reflect: false,
        }
    }

    /// `t -> t`, for use as `zeta_0`.
    pub fn identity() -> Self {
        ScalarZeta {
            knots: vec![[0.0, 0.0], [1.0, 1.0]],
            tail: Tail::Linear,
            threshold: None,
            head: Head::Linear,
            reflect: false,
        }
    }

    /// `e^{-alpha t}` for `t >= 0` and `0` for `t < 0`.
    pub fn exp_decay(alpha: f64) -> Self {
        ScalarZeta {
            knots: vec![[0.0, 0.0], [0.0, 1.0]],
            tail: Tail::Exp { c: 1.0, alpha },
            threshold: None,
            head: Head::Constant,
            reflect: false,
        }
    }

    /// `max(0, 1 - t / width)` (linear continuation for negative `t`),
    /// vanishing from `width` on.
    pub fn hat(width: f64) -> Self {
        ScalarZeta {
            knots: vec![[0.0, 1.0], [width, 0.0]],
            tail: Tail::Zero,
            threshold: Some(width),
            head: Head::Linear,
            reflect: false,
        }
    }

    /// `1 / (1 + t)` for `t >= 0`, constant 1 below.
    pub fn harmonic() -> Self {
        ScalarZeta {
            knots: vec![[0.0, 1.0]],
            tail: Tail::Power { c: 1.0, p: 1.0 },
            threshold: None,
            head: Head::Constant,
            reflect: false,
        }
    }

    /// `t -> zeta(-t)`.
    pub fn reflected(&self) -> Self {
        let mut z = self.clone();
        z.reflect = !z.reflect;
        z
    }

    pub fn validate(&self) -> Result<()> {
        for w in self.knots.windows(2) {
            if w[1][0] < w[0][0] {
                return Err(Error::InvalidZeta("knot abscissae must be non-decreasing".into()));
            }
        }
        if self.knots.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidZeta("knots must be finite".into()));
        }
        match self.tail {
            Tail::Zero | Tail::Linear => {}
            Tail::Exp { c, alpha } => {
                if !(alpha > 0.0) || !c.is_finite() {
                    return Err(Error::InvalidZeta("exp tail needs alpha > 0".into()));
                }
            }
            Tail::Power { c, p } => {
                if !(p > 0.0) || !c.is_finite() {
                    return Err(Error::InvalidZeta("power tail needs p > 0".into()));
                }
                if self.knots.last().is_none_or(|k| k[0] <= -1.0) {
                    return Err(Error::InvalidZeta(
                        "power tail must start right of t = -1".into(),
                    ));
                }
            }
        }
        if (self.head == Head::Linear || self.tail == Tail::Linear) && self.knots.len() < 2 {
            return Err(Error::InvalidZeta("linear head or tail needs two knots".into()));
        }
        if let Some(t) = self.threshold {
            if self.sup_on_ray(t) > 0.0 {
                return Err(Error::InvalidZeta(format!(
                    "zeta does not vanish on [{t}, inf)"
                )));
            }
        }
        Ok(())
    }

    /// Largest absolute value on `[t, inf)`, from the closed-form pieces.
    fn sup_on_ray(&self, t: f64) -> f64 {
        if self.reflect {
            return f64::INFINITY;
        }
        let mut sup = 0.0_f64;
        let tail_active = match self.tail {
            Tail::Zero => false,
            Tail::Exp { c, .. } | Tail::Power { c, .. } => c != 0.0,
            Tail::Linear => self.last_segment().iter().flatten().any(|v| v[1] != 0.0),
        };
        if tail_active {
            return f64::INFINITY;
        }
        for (i, k) in self.knots.iter().enumerate() {
            if k[0] >= t {
                sup = sup.max(k[1].abs());
            } else if let Some(next) = self.knots.get(i + 1) {
                if next[0] > t {
                    sup = sup.max(self.eval(t).abs());
                }
            }
        }
        if self.knots.last().is_none_or(|k| k[0] < t) {
            // Only the zero tail remains.
            return sup;
        }
        if self.knots.first().is_some_and(|k| k[0] > t) {
            sup = sup.max(self.eval(t).abs());
        }
        sup
    }

    fn last_segment(&self) -> Option<[[f64; 2]; 2]> {
        let n = self.knots.len();
        (n >= 2).then(|| [self.knots[n - 2], self.knots[n - 1]])
    }

    fn eval_tail(&self, t: f64) -> f64 {
        match self.tail {
            Tail::Zero => 0.0,
            Tail::Linear => {
                let [a, b] = self.last_segment().expect("validated");
                affine_between(a, b, t)
            }
            Tail::Exp { c, alpha } => c * (-alpha * t).exp(),
            Tail::Power { c, p } => c * (1.0 + t).powf(-p),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let t = if self.reflect { -t } else { t };
        if t == f64::INFINITY {
            return 0.0;
        }
        let ks = &self.knots;
        if ks.is_empty() {
            return self.eval_tail(t);
        }
        let idx = ks.partition_point(|k| k[0] <= t);
        if idx == 0 {
            return match self.head {
                Head::Constant => ks[0][1],
                Head::Linear => affine_between(ks[0], ks[1], t),
            };
        }
        if idx == ks.len() {
            return if t == ks[idx - 1][0] {
                ks[idx - 1][1]
            } else {
                self.eval_tail(t)
            };
        }
        affine_between(ks[idx - 1], ks[idx], t)
    }

    /// Abscissae where the closed form changes.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self
            .knots
            .iter()
            .map(|k| if self.reflect { -k[0] } else { k[0] })
            .collect();
        b.sort_by(|x, y| x.partial_cmp(y).expect("finite knots"));
        b.dedup();
        b
    }

    /// Left end of the tail region, if the function has a non-trivial tail.
    pub fn tail_start(&self) -> f64 {
        self.knots.last().map_or(f64::NEG_INFINITY, |k| k[0])
    }

    /// Non-negative everywhere (checked on knots and tail coefficient).
    pub fn is_nonnegative(&self) -> bool {
        let tail_ok = match self.tail {
            Tail::Zero => true,
            Tail::Exp { c, .. } | Tail::Power { c, .. } => c >= 0.0,
            Tail::Linear => self.last_segment().is_some_and(|[a, b]| b[1] >= a[1]),
        };
        let head_ok = match self.head {
            Head::Constant => true,
            Head::Linear => self.knots.len() >= 2 && self.knots[1][1] <= self.knots[0][1],
        };
        tail_ok && head_ok && self.knots.iter().all(|k| k[1] >= 0.0)
    }

    /// Closed-form pieces covering `[lo, hi]` in the unreflected variable.
    fn pieces(&self, lo: f64, hi: f64) -> Vec<(f64, f64, Piece)> {
        let mut out = Vec::new();
        let ks = &self.knots;
        let push = |out: &mut Vec<(f64, f64, Piece)>, a: f64, b: f64, p: Piece| {
            let (a, b) = (a.max(lo), b.min(hi));
            if a < b {
                out.push((a, b, p));
            }
        };
        if ks.is_empty() {
            push(&mut out, f64::NEG_INFINITY, f64::INFINITY, Piece::Tail(self.tail));
            return out;
        }
        let head = match self.head {
            Head::Constant => Piece::Affine { a: ks[0][1], b: 0.0 },
            Head::Linear => affine_piece(ks[0], ks[1]),
        };
        push(&mut out, f64::NEG_INFINITY, ks[0][0], head);
        for w in ks.windows(2) {
            if w[1][0] > w[0][0] {
                push(&mut out, w[0][0], w[1][0], affine_piece(w[0], w[1]));
            }
        }
        let tail = match self.last_segment() {
            Some([a, b]) if self.tail == Tail::Linear => affine_piece(a, b),
            _ => Piece::Tail(self.tail),
        };
        push(&mut out, ks[ks.len() - 1][0], f64::INFINITY, tail);
        out
    }

    /// `int_a^b zeta(t) dt` in closed form; `b` may be `+inf`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if self.reflect {
            let mut unreflected = self.clone();
            unreflected.reflect = false;
            return unreflected.integral(-b, -a);
        }
        self.pieces(a, b)
            .into_iter()
            .map(|(lo, hi, p)| piece_moment(p, 0, lo, hi))
            .sum()
    }

    /// `int_0^upper t^{n-1} zeta(t) dt` in closed form (unreflected weight).
    pub fn moment(&self, n: usize, upper: f64) -> f64 {
        assert!(n >= 1, "dimension must be positive");
        let z = if self.reflect { self.reflected() } else { self.clone() };
        z.pieces(0.0, upper)
            .into_iter()
            .map(|(lo, hi, p)| piece_moment(p, n - 1, lo, hi))
            .sum()
    }

    /// Whether `int_0^inf t^{n-1} zeta(t) dt` converges, judged from the tail.
    pub fn has_finite_moment(&self, n: usize) -> bool {
        if self.reflect {
            return false;
        }
        match self.tail {
            Tail::Zero | Tail::Exp { .. } => true,
            Tail::Power { c, p } => c == 0.0 || p > n as f64,
            Tail::Linear => self.last_segment().is_some_and(|[a, b]| a[1] == 0.0 && b[1] == 0.0),
        }
    }

    /// Bound on `int_R^inf r^{n-1} zeta(v(r)) dr` for a convex increasing
    /// `v` with `v(R) = level` and `v'(R+) >= slope`, valid once `level`
    /// lies in the tail region. `None` if no certificate applies.
    pub fn radial_tail_bound(&self, n: usize, radius: f64, level: f64, slope: f64) -> Option<f64> {
        if self.reflect || level < self.tail_start() {
            return None;
        }
        let m = n - 1;
        match self.tail {
            Tail::Zero => Some(0.0),
            Tail::Linear => None,
            Tail::Exp { c, alpha } => {
                if slope <= 0.0 {
                    return if c == 0.0 { Some(0.0) } else { None };
                }
                let rate = alpha * slope;
                let mut sum = 0.0;
                for i in 0..=m {
                    sum += binom(m, i) * radius.powi((m - i) as i32) * factorial(i) / rate.powi(i as i32 + 1);
                }
                Some(c.abs() * (-alpha * level).exp() * sum)
            }
            Tail::Power { c, p } => {
                if c == 0.0 {
                    return Some(0.0);
                }
                if slope <= 0.0 || p <= n as f64 {
                    return None;
                }
                let w0 = 1.0 + level;
                let mut sum = 0.0;
                for i in 0..=m {
                    // int_0^inf y^i (w0 + s y)^{-p} dy = s^{-(i+1)} w0^{i+1-p} B(i+1, p-i-1)
                    let b = p - i as f64 - 1.0;
                    let mut beta = factorial(i);
                    for j in 0..=i {
                        beta /= b + j as f64;
                    }
                    sum += binom(m, i)
                        * radius.powi((m - i) as i32)
                        * slope.powi(-(i as i32) - 1)
                        * w0.powf(i as f64 + 1.0 - p)
                        * beta;
                }
                Some(c.abs() * sum)
            }
        }
    }
}

fn affine_between(a: [f64; 2], b: [f64; 2], t: f64) -> f64 {
    if b[0] == a[0] {
        return b[1];
    }
    a[1] + (b[1] - a[1]) * (t - a[0]) / (b[0] - a[0])
}

fn affine_piece(a: [f64; 2], b: [f64; 2]) -> Piece {
    let slope = if b[0] > a[0] {
        (b[1] - a[1]) / (b[0] - a[0])
    } else {
        0.0
    };
    Piece::Affine {
        a: a[1] - slope * a[0],
        b: slope,
    }
}

pub(crate) fn factorial(i: usize) -> f64 {
    (1..=i).map(|k| k as f64).product()
}

pub(crate) fn binom(m: usize, i: usize) -> f64 {
    factorial(m) / (factorial(i) * factorial(m - i))
}

/// `int_lo^hi t^m piece(t) dt`.
fn piece_moment(p: Piece, m: usize, lo: f64, hi: f64) -> f64 {
    match p {
        Piece::Affine { a, b } => {
            if (lo.is_infinite() || hi.is_infinite()) && (a != 0.0 || b != 0.0) {
                return f64::INFINITY;
            }
            if a == 0.0 && b == 0.0 {
                return 0.0;
            }
            let pw = |t: f64, e: usize| t.powi(e as i32);
            let mf = m as f64;
            a * (pw(hi, m + 1) - pw(lo, m + 1)) / (mf + 1.0)
                + b * (pw(hi, m + 2) - pw(lo, m + 2)) / (mf + 2.0)
        }
        Piece::Tail(Tail::Zero) => 0.0,
        Piece::Tail(Tail::Linear) => unreachable!("linear tails become affine pieces"),
        Piece::Tail(Tail::Exp { c, alpha }) => {
            if c == 0.0 {
                return 0.0;
            }
            // F(t) = -e^{-alpha t} sum_i m!/(m-i)! t^{m-i} / alpha^{i+1}
            let anti = |t: f64| -> f64 {
                if t == f64::INFINITY {
                    return 0.0;
                }
                let mut s = 0.0;
                for i in 0..=m {
                    s += factorial(m) / factorial(m - i) * t.powi((m - i) as i32)
                        / alpha.powi(i as i32 + 1);
                }
                -(-alpha * t).exp() * s
            };
            if lo == f64::NEG_INFINITY {
                return f64::INFINITY;
            }
            c * (anti(hi) - anti(lo))
        }
        Piece::Tail(Tail::Power { c, p }) => {
            if c == 0.0 {
                return 0.0;
            }
            // t^m = (w - 1)^m with w = 1 + t.
            let anti = |t: f64| -> f64 {
                let w = 1.0 + t;
                let mut s = 0.0;
                for j in 0..=m {
                    let e = j as f64 - p + 1.0;
                    let sign = if (m - j) % 2 == 0 { 1.0 } else { -1.0 };
                    let term = if t == f64::INFINITY {
                        if e < 0.0 {
                            0.0
                        } else {
                            f64::INFINITY
                        }
                    } else if e == 0.0 {
                        w.ln()
                    } else {
                        w.powf(e) / e
                    };
                    s += sign * binom(m, j) * term;
                }
                s
            };
            c * (anti(hi) - anti(lo))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_decay_values_and_jump() {
        let z = ScalarZeta::exp_decay(1.0);
        assert_eq!(z.eval(-0.5), 0.0);
        assert_eq!(z.eval(0.0), 1.0);
        assert!((z.eval(2.0) - (-2.0f64).exp()).abs() < 1e-15);
        assert_eq!(z.eval(f64::INFINITY), 0.0);
    }

    #[test]
    fn hat_values() {
        let z = ScalarZeta::hat(1.0);
        assert_eq!(z.eval(0.0), 1.0);
        assert_eq!(z.eval(1.0), 0.0);
        assert_eq!(z.eval(3.0), 0.0);
        assert_eq!(z.eval(-1.0), 2.0);
        assert!(z.validate().is_ok());
    }

    #[test]
    fn threshold_is_checked() {
        let mut z = ScalarZeta::hat(1.0);
        z.threshold = Some(0.5);
        assert!(z.validate().is_err());
        let e = ScalarZeta::exp_decay(1.0);
        assert!(ScalarZeta::new(e.knots.clone(), e.tail, Some(10.0)).is_err());
    }

    #[test]
    fn integral_closed_forms() {
        let z = ScalarZeta::exp_decay(1.0);
        assert!((z.integral(-3.0, f64::INFINITY) - 1.0).abs() < 1e-15);
        let h = ScalarZeta::harmonic();
        assert!((h.integral(0.0, 3.0) - 4f64.ln()).abs() < 1e-15);
        assert!((ScalarZeta::hat(2.0).integral(0.0, 5.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn moments() {
        // int_0^inf t e^{-t} dt = Gamma(2) = 1
        assert!((ScalarZeta::exp_decay(1.0).moment(2, f64::INFINITY) - 1.0).abs() < 1e-15);
        // int_0^T t/(1+t) dt = T - ln(1+T)
        let h = ScalarZeta::harmonic();
        let t = 7.5_f64;
        assert!((h.moment(2, t) - (t - (1.0 + t).ln())).abs() < 1e-12);
        assert!(!h.has_finite_moment(2));
        assert!(h.has_finite_moment(0));
    }

    #[test]
    fn reflection() {
        let z = ScalarZeta::hat(1.0).reflected();
        assert_eq!(z.eval(-0.25), 0.75);
        assert!((z.integral(-1.0, 0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn tail_bound_exp_dominates_truth() {
        // v(r) = r, zeta = e^{-t}, n = 2: int_R^inf r e^{-r} dr = (R+1) e^{-R}
        let z = ScalarZeta::exp_decay(1.0);
        let b = z.radial_tail_bound(2, 3.0, 3.0, 1.0).unwrap();
        assert!((b - 4.0 * (-3.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn tail_bound_power() {
        // v(r) = r, zeta = (1+t)^{-4}, n = 2, R = 0:
        // int_0^inf r (1+r)^{-4} dr = B(2, 2) = 1/6
        let z = ScalarZeta::new(vec![[0.0, 1.0]], Tail::Power { c: 1.0, p: 4.0 }, None).unwrap();
        let b = z.radial_tail_bound(2, 0.0, 0.0, 1.0).unwrap();
        assert!((b - 1.0 / 6.0).abs() < 1e-15);
        assert!(z.radial_tail_bound(4, 0.0, 0.0, 1.0).is_none());
    }

    #[test]
    fn json_shape() {
        let z: ScalarZeta = serde_json::from_str(
            r#"{"knots":[[0,1],[1,0]],"tail":{"kind":"zero"},"threshold_T":1}"#,
        )
        .unwrap();
        assert_eq!(z.threshold, Some(1.0));
        let e: ScalarZeta =
            serde_json::from_str(r#"{"knots":[],"tail":{"kind":"exp","c":2,"alpha":0.5},"threshold_T":null}"#)
                .unwrap();
        assert!((e.eval(2.0) - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
    }
}
