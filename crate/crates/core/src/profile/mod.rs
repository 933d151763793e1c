//! Piecewise-linear convex increasing profiles `v: [0, inf) -> R ∪ {+inf}`.
//!
//! A profile is a list of knots `(radius, value, right slope)` starting at
//! radius 0, plus a domain bound beyond which the profile is `+inf`. Radii and
//! slopes are strictly increasing after canonicalization; slopes are
//! non-negative so the radial lift `x -> v(|x|)` is convex and coercive.
//!
//! Profiles built by the embedding constructions have infinitely many knots.
//! Those are held lazily: a generator produces knots on demand and a shared
//! cache memoizes them, so every profile value is immutable and `Send + Sync`.
//!
//! Knot values are carried alongside radii and slopes, but equality of
//! profiles compares only the base value, radii, slopes and domain bound.
//! Values are derived data and may differ from exact cumulative sums by
//! rounding when `T = f64`.

mod conjugate;
mod lattice;
mod lazy;
mod level_slope;
mod metric;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{Bound, Ext, Scalar};

pub use lattice::{pl_max, pl_min};
pub use lazy::{KnotGenerator, Source, TailRule};
pub use level_slope::LevelSlopeForm;
pub use metric::{epi_distance, epi_distance_with, EpiMetric, Interval};

use lazy::LazyKnots;

/// One breakpoint of a profile: the profile takes `value` at `radius` and has
/// right derivative `slope` until the next knot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Knot<T> {
    pub radius: T,
    pub value: T,
    pub slope: T,
}

impl<T: Scalar> Knot<T> {
    pub fn new(radius: T, value: T, slope: T) -> Self {
        Knot {
            radius,
            value,
            slope,
        }
    }

    /// Value of this knot's affine piece at `r`.
    pub fn at(&self, r: T) -> T {
        self.value + self.slope * (r - self.radius)
    }
}

#[derive(Clone)]
enum Repr<T: Scalar> {
    Finite { knots: Arc<[Knot<T>]>, bound: Bound<T> },
    Lazy(Arc<LazyKnots<T>>),
}

/// A convex, increasing, piecewise-linear profile on `[0, inf)`.
#[derive(Clone)]
pub struct PLProfile<T: Scalar = f64> {
    repr: Repr<T>,
}

impl<T: Scalar> fmt::Debug for PLProfile<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Finite { knots, bound } => f
                .debug_struct("PLProfile")
                .field("knots", knots)
                .field("bound", bound)
                .finish(),
            Repr::Lazy(lazy) => f
                .debug_struct("PLProfile")
                .field("source", &lazy.source.rule_name())
                .field("prefix", &lazy.cached())
                .finish(),
        }
    }
}

/// Upper limit on materialized knots of a lazy profile. Streams that reach it
/// have radii or levels that do not grow, which is a construction bug.
pub const MAX_LAZY_KNOTS: usize = 1 << 20;

impl<T: Scalar> PLProfile<T> {
    /// Builds a profile from `v(0)` and `(radius, right slope)` pairs. The
    /// first radius must be 0. Values at knots are accumulated from the base.
    pub fn new(base: T, segments: &[(T, T)], bound: Bound<T>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidProfile("no segments".into()));
        }
        if segments[0].0 != T::zero() {
            return Err(Error::InvalidProfile("first segment must start at 0".into()));
        }
        let mut knots = Vec::with_capacity(segments.len());
        let mut value = base;
        for (i, &(radius, slope)) in segments.iter().enumerate() {
            if i > 0 {
                let prev: Knot<T> = knots[i - 1];
                if radius < prev.radius {
                    return Err(Error::InvalidProfile("radii must be increasing".into()));
                }
                value = prev.at(radius);
            }
            knots.push(Knot::new(radius, value, slope));
        }
        Self::from_knots(knots, bound)
    }

    /// Builds a profile from explicit knots, validating and canonicalizing.
    pub fn from_knots(knots: Vec<Knot<T>>, bound: Bound<T>) -> Result<Self> {
        if let Bound::At(d) = bound {
            if d < T::zero() {
                return Err(Error::InvalidProfile("negative domain bound".into()));
            }
        }
        let knots = canonicalize(knots, bound);
        validate(&knots, bound)?;
        Ok(PLProfile {
            repr: Repr::Finite {
                knots: knots.into(),
                bound,
            },
        })
    }

    pub(crate) fn lazy(source: Source<T>, generator: Box<dyn KnotGenerator<T>>) -> Self {
        PLProfile {
            repr: Repr::Lazy(Arc::new(LazyKnots::new(source, generator))),
        }
    }

    /// `v(r) = slope * r + base` on `[0, inf)`.
    pub fn linear(base: T, slope: T) -> Result<Self> {
        Self::new(base, &[(T::zero(), slope)], Bound::Unbounded)
    }

    /// The profile of `I_{radius B} + level`: constant on `[0, radius]`.
    pub fn indicator(level: T, radius: T) -> Result<Self> {
        Self::new(level, &[(T::zero(), T::zero())], Bound::At(radius))
    }

    pub fn is_lazy(&self) -> bool {
        matches!(self.repr, Repr::Lazy(_))
    }

    pub fn source(&self) -> Option<&Source<T>> {
        match &self.repr {
            Repr::Lazy(lazy) => Some(&lazy.source),
            Repr::Finite { .. } => None,
        }
    }

    pub fn bound(&self) -> Bound<T> {
        match &self.repr {
            Repr::Finite { bound, .. } => *bound,
            Repr::Lazy(_) => Bound::Unbounded,
        }
    }

    /// `v(0)`, which is also the minimum of the radial lift.
    pub fn base(&self) -> T {
        self.knot(0).expect("profiles have a knot at 0").value
    }

    /// Number of knots, or `None` for an infinite stream.
    pub fn knot_count(&self) -> Option<usize> {
        match &self.repr {
            Repr::Finite { knots, .. } => Some(knots.len()),
            Repr::Lazy(_) => None,
        }
    }

    /// The `i`-th knot; `None` past the end of a finite profile.
    pub fn knot(&self, i: usize) -> Option<Knot<T>> {
        match &self.repr {
            Repr::Finite { knots, .. } => knots.get(i).copied(),
            Repr::Lazy(lazy) => Some(lazy.knot(i)),
        }
    }

    /// Knots of a finite profile.
    pub fn knots(&self) -> Result<&[Knot<T>]> {
        match &self.repr {
            Repr::Finite { knots, .. } => Ok(knots),
            Repr::Lazy(_) => Err(Error::LazyOperand),
        }
    }

    /// Iterates over all knots; infinite for lazy profiles.
    pub fn iter_knots(&self) -> KnotIter<'_, T> {
        KnotIter {
            profile: self,
            next: 0,
        }
    }

    /// Every knot with radius `<= radius`.
    pub fn materialize_to_radius(&self, radius: T) -> Vec<Knot<T>> {
        match &self.repr {
            Repr::Finite { knots, .. } => {
                knots.iter().copied().take_while(|k| k.radius <= radius).collect()
            }
            Repr::Lazy(lazy) => lazy.prefix_while(|k| k.radius <= radius),
        }
    }

    /// Every knot with value `< level` plus the first knot at or above it.
    pub fn materialize_to_level(&self, level: T) -> Vec<Knot<T>> {
        let mut out = Vec::new();
        for k in self.iter_knots() {
            let stop = k.value >= level;
            out.push(k);
            if stop {
                break;
            }
        }
        out
    }

    /// Index of the knot whose segment contains `r` (`r` inside the domain).
    fn segment_index(&self, r: T) -> usize {
        match &self.repr {
            Repr::Finite { knots, .. } => knots.partition_point(|k| k.radius <= r) - 1,
            Repr::Lazy(lazy) => lazy.segment_index(r),
        }
    }

    /// Knot whose affine piece is active at `r`.
    pub fn segment_at(&self, r: T) -> Knot<T> {
        let i = self.segment_index(r);
        self.knot(i).expect("segment index is within the profile")
    }

    /// Value at `r >= 0`; `+inf` beyond the domain bound.
    pub fn eval(&self, r: T) -> Result<Ext<T>> {
        if r < T::zero() {
            return Err(Error::Domain(format!("negative radius {:?}", r)));
        }
        if !self.bound().contains(r) {
            return Ok(Ext::PosInf);
        }
        Ok(Ext::Finite(self.segment_at(r).at(r)))
    }

    /// Convenience evaluation for finite points of the domain.
    pub fn value_at(&self, r: T) -> Option<T> {
        self.eval(r).ok().and_then(Ext::finite)
    }

    /// Finite at every radius.
    pub fn is_finite_valued(&self) -> bool {
        matches!(self.bound(), Bound::Unbounded)
    }

    /// `v(r)/r -> inf`: infinitely many knots with unbounded slopes, or a
    /// bounded domain.
    pub fn is_super_coercive(&self) -> bool {
        self.is_lazy() || self.bound().finite().is_some()
    }

    /// `v(r) -> inf`.
    pub fn is_coercive(&self) -> bool {
        match &self.repr {
            Repr::Lazy(_) => true,
            Repr::Finite { knots, bound } => {
                bound.finite().is_some() || knots.last().is_some_and(|k| k.slope > T::zero())
            }
        }
    }

    /// Slope of the last segment of a finite profile.
    pub fn final_slope(&self) -> Option<T> {
        match &self.repr {
            Repr::Finite { knots, .. } => knots.last().map(|k| k.slope),
            Repr::Lazy(_) => None,
        }
    }

    /// `v` restricted to `[0, radius]` (`+inf` beyond), as a finite profile.
    pub fn restrict(&self, radius: T) -> Result<Self> {
        let bound = self.bound().min(Bound::At(radius));
        let limit = bound.finite().expect("restricted bound is finite");
        let knots = self.materialize_to_radius(limit);
        Self::from_knots(knots, bound)
    }

    /// `u_lambda(x) = u(x / lambda)`: radii scale by `lambda`, slopes by `1/lambda`.
    pub fn scaled(&self, lambda: T) -> Result<Self> {
        if lambda <= T::zero() {
            return Err(Error::Domain("scale factor must be positive".into()));
        }
        match &self.repr {
            Repr::Finite { knots, bound } => {
                let knots = knots.iter().map(|k| lazy::scale_knot(*k, lambda)).collect();
                let bound = match bound {
                    Bound::At(d) => Bound::At(*d * lambda),
                    Bound::Unbounded => Bound::Unbounded,
                };
                Self::from_knots(knots, bound)
            }
            Repr::Lazy(_) => Ok(lazy::scaled(self.clone(), lambda)),
        }
    }

    /// `v + offset`.
    pub fn shifted(&self, offset: T) -> Self {
        match &self.repr {
            Repr::Finite { knots, bound } => {
                let knots: Vec<_> = knots
                    .iter()
                    .map(|k| Knot::new(k.radius, k.value + offset, k.slope))
                    .collect();
                PLProfile {
                    repr: Repr::Finite {
                        knots: knots.into(),
                        bound: *bound,
                    },
                }
            }
            Repr::Lazy(_) => lazy::shifted(self.clone(), offset),
        }
    }

    /// Exact structural equality of canonical finite profiles: base value,
    /// radii, slopes and domain bound. Lazy profiles never compare equal
    /// here; use [`PLProfile::agrees_to`].
    pub fn canonical_eq(&self, other: &Self) -> bool {
        match (&self.repr, &other.repr) {
            (
                Repr::Finite { knots: a, bound: da },
                Repr::Finite { knots: b, bound: db },
            ) => {
                da == db
                    && a.len() == b.len()
                    && a[0].value == b[0].value
                    && a.iter()
                        .zip(b.iter())
                        .all(|(x, y)| x.radius == y.radius && x.slope == y.slope)
            }
            _ => false,
        }
    }

    /// Structural equality up to the canonicalization tolerance.
    pub fn approx_eq(&self, other: &Self) -> bool {
        match (&self.repr, &other.repr) {
            (
                Repr::Finite { knots: a, bound: da },
                Repr::Finite { knots: b, bound: db },
            ) => {
                let bounds = match (da, db) {
                    (Bound::At(x), Bound::At(y)) => x.near(*y),
                    (Bound::Unbounded, Bound::Unbounded) => true,
                    _ => false,
                };
                bounds
                    && a.len() == b.len()
                    && a.iter().zip(b.iter()).all(|(x, y)| {
                        x.radius.near(y.radius) && x.slope.near(y.slope) && x.value.near(y.value)
                    })
            }
            _ => false,
        }
    }

    /// Knot-by-knot agreement (radius, slope, value, within tolerance) of
    /// the two profiles on `[0, radius]`.
    pub fn agrees_to(&self, other: &Self, radius: T) -> bool {
        match (self.restrict(radius), other.restrict(radius)) {
            (Ok(a), Ok(b)) => a.approx_eq(&b),
            _ => false,
        }
    }

    /// Converts the knot data to `f64`.
    pub fn to_f64(&self) -> Result<PLProfile<f64>> {
        let knots = self
            .knots()?
            .iter()
            .map(|k| Knot::new(k.radius.to_f64(), k.value.to_f64(), k.slope.to_f64()))
            .collect();
        let bound = match self.bound() {
            Bound::At(d) => Bound::At(d.to_f64()),
            Bound::Unbounded => Bound::Unbounded,
        };
        PLProfile::from_knots(knots, bound)
    }
}

pub struct KnotIter<'a, T: Scalar> {
    profile: &'a PLProfile<T>,
    next: usize,
}

impl<T: Scalar> Iterator for KnotIter<'_, T> {
    type Item = Knot<T>;

    fn next(&mut self) -> Option<Knot<T>> {
        let k = self.profile.knot(self.next)?;
        self.next += 1;
        Some(k)
    }
}

/// Merges zero-length segments, drops knots past the domain bound and merges
/// collinear neighbours.
pub(crate) fn canonicalize<T: Scalar>(knots: Vec<Knot<T>>, bound: Bound<T>) -> Vec<Knot<T>> {
    let mut out: Vec<Knot<T>> = Vec::with_capacity(knots.len());
    for k in knots {
        if let Some(d) = bound.finite() {
            // A knot sitting on the bound only opens a zero-length segment.
            if !out.is_empty() && (k.radius > d || k.radius.near(d)) {
                continue;
            }
        }
        if let Some(last) = out.last_mut() {
            if k.radius.near(last.radius) {
                *last = Knot::new(last.radius, last.value, k.slope);
                // A replaced slope may now repeat its predecessor.
                if out.len() >= 2 && out[out.len() - 2].slope.near(k.slope) {
                    out.pop();
                }
                continue;
            }
            if k.slope.near(last.slope) {
                continue;
            }
        }
        out.push(k);
    }
    out
}

fn validate<T: Scalar>(knots: &[Knot<T>], bound: Bound<T>) -> Result<()> {
    let first = knots
        .first()
        .ok_or_else(|| Error::InvalidProfile("no knots".into()))?;
    if first.radius != T::zero() {
        return Err(Error::InvalidProfile("first knot must sit at radius 0".into()));
    }
    for w in knots.windows(2) {
        if w[1].radius <= w[0].radius {
            return Err(Error::InvalidProfile("radii must be strictly increasing".into()));
        }
        if w[1].slope < w[0].slope {
            return Err(Error::InvalidProfile(format!(
                "slopes must be non-decreasing (convexity), got {:?} then {:?}",
                w[0].slope, w[1].slope
            )));
        }
    }
    if first.slope < T::zero() {
        return Err(Error::InvalidProfile("slopes must be non-negative".into()));
    }
    if let Bound::At(d) = bound {
        if knots.last().is_some_and(|k| k.radius > d) {
            return Err(Error::InvalidProfile("knot beyond domain bound".into()));
        }
    }
    Ok(())
}
