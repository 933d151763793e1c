use std::sync::{Mutex, MutexGuard};

use super::{Knot, PLProfile, MAX_LAZY_KNOTS};
use crate::scalar::Scalar;
use crate::zeta::ScalarZeta;

/// Produces the knots of an infinite profile in order of increasing radius.
/// Generators need not be canonical; the cache merges zero-length segments
/// and collinear neighbours before storing.
pub trait KnotGenerator<T>: Send {
    fn next_knot(&mut self) -> Knot<T>;
}

/// Continuation rule for an explicitly listed prefix, in level/slope form.
#[derive(Clone, Debug, PartialEq)]
pub enum TailRule<T> {
    /// Levels step by `level_step`, slopes step by `slope_step`.
    Linear { level_step: T, slope_step: T },
    /// Segments of length `radius_step`; the j-th extra slope is the last
    /// listed slope times `(j + 1)!`.
    Factorial { radius_step: T },
}

/// Describes how a lazy profile was built. Used for serialization and for
/// shortcuts such as `conjugate(conjugate(p)) = p`.
#[derive(Clone, Debug)]
pub enum Source<T: Scalar> {
    Tail { prefix: PLProfile<T>, rule: TailRule<T> },
    Conjugate(PLProfile<T>),
    Scaled { of: PLProfile<T>, factor: T },
    Shifted { of: PLProfile<T>, offset: T },
    Gk { k: u32, inner: PLProfile<T> },
    GkInverse { k: u32, inner: PLProfile<T> },
    Vlt { t: T, l: u64 },
    Uzeta { zeta: ScalarZeta, n: usize },
}

impl<T: Scalar> Source<T> {
    pub fn rule_name(&self) -> &'static str {
        match self {
            Source::Tail { rule: TailRule::Linear { .. }, .. } => "linear",
            Source::Tail { rule: TailRule::Factorial { .. }, .. } => "factorial",
            Source::Conjugate(_) => "conjugate",
            Source::Scaled { .. } => "scaled",
            Source::Shifted { .. } => "shifted",
            Source::Gk { .. } => "gk",
            Source::GkInverse { .. } => "gk_inverse",
            Source::Vlt { .. } => "vlt",
            Source::Uzeta { .. } => "uzeta",
        }
    }
}

struct Canonicalizer<T> {
    inner: Box<dyn KnotGenerator<T>>,
    pending: Option<Knot<T>>,
    last_slope: Option<T>,
}

impl<T: Scalar> Canonicalizer<T> {
    fn next(&mut self) -> Knot<T> {
        for _ in 0..MAX_LAZY_KNOTS {
            let k = self.inner.next_knot();
            let Some(p) = self.pending.take() else {
                self.pending = Some(k);
                continue;
            };
            if k.radius.near(p.radius) {
                self.pending = Some(Knot::new(p.radius, p.value, k.slope));
                continue;
            }
            self.pending = Some(k);
            if self.last_slope.is_some_and(|s| p.slope.near(s)) {
                continue;
            }
            self.last_slope = Some(p.slope);
            return p;
        }
        panic!("lazy knot stream stalled: {MAX_LAZY_KNOTS} knots without progress");
    }
}

struct State<T> {
    knots: Vec<Knot<T>>,
    gen: Canonicalizer<T>,
    violation: Option<usize>,
}

impl<T: Scalar> State<T> {
    fn push_next(&mut self) {
        assert!(
            self.knots.len() < MAX_LAZY_KNOTS,
            "lazy profile exceeded {MAX_LAZY_KNOTS} knots; radii or levels are not growing"
        );
        let k = self.gen.next();
        if let Some(last) = self.knots.last() {
            if k.slope < last.slope && self.violation.is_none() {
                self.violation = Some(self.knots.len());
            }
        }
        self.knots.push(k);
    }
}

/// Memoized knot stream. Concurrent readers serialize on the mutex; every
/// call only appends, so materialization is idempotent.
pub(crate) struct LazyKnots<T: Scalar> {
    pub(crate) source: Source<T>,
    state: Mutex<State<T>>,
}

impl<T: Scalar> LazyKnots<T> {
    pub(crate) fn new(source: Source<T>, generator: Box<dyn KnotGenerator<T>>) -> Self {
        LazyKnots {
            source,
            state: Mutex::new(State {
                knots: Vec::new(),
                gen: Canonicalizer {
                    inner: generator,
                    pending: None,
                    last_slope: None,
                },
                violation: None,
            }),
        }
    }

    fn lock(&self) -> MutexGuard<'_, State<T>> {
        self.state.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub(crate) fn knot(&self, i: usize) -> Knot<T> {
        let mut s = self.lock();
        while s.knots.len() <= i {
            s.push_next();
        }
        s.knots[i]
    }

    pub(crate) fn cached(&self) -> Vec<Knot<T>> {
        self.lock().knots.clone()
    }

    /// Knots up to (excluding) the first one failing `keep`.
    pub(crate) fn prefix_while(&self, keep: impl Fn(&Knot<T>) -> bool) -> Vec<Knot<T>> {
        let mut s = self.lock();
        loop {
            if let Some(last) = s.knots.last() {
                if !keep(last) {
                    break;
                }
            }
            s.push_next();
        }
        s.knots.iter().copied().take_while(|k| keep(k)).collect()
    }

    pub(crate) fn segment_index(&self, r: T) -> usize {
        let mut s = self.lock();
        while s.knots.last().is_none_or(|k| k.radius <= r) {
            s.push_next();
        }
        s.knots.partition_point(|k| k.radius <= r) - 1
    }

    pub(crate) fn violation(&self) -> Option<usize> {
        self.lock().violation
    }
}

impl<T: Scalar> PLProfile<T> {
    /// Index of the first materialized knot whose slope drops below its
    /// predecessor's, if any. Always `None` for finite profiles, which are
    /// validated on construction.
    pub fn convexity_violation(&self) -> Option<usize> {
        match &self.repr {
            super::Repr::Lazy(lazy) => lazy.violation(),
            super::Repr::Finite { .. } => None,
        }
    }

    /// Continues a finite prefix (finite-valued, positive final slope) with a
    /// level/slope rule, giving an infinite super-coercive profile.
    pub fn with_tail(prefix: PLProfile<T>, rule: TailRule<T>) -> crate::Result<Self> {
        let knots = prefix.knots()?.to_vec();
        if !prefix.is_finite_valued() {
            return Err(crate::Error::InvalidProfile(
                "tail rules continue finite-valued prefixes only".into(),
            ));
        }
        let last = *knots.last().expect("non-empty");
        if last.slope <= T::zero() {
            return Err(crate::Error::NotCoercive("tail needs a positive final slope".into()));
        }
        let (level_step, ok) = match &rule {
            TailRule::Linear {
                level_step,
                slope_step,
            } => (*level_step, *slope_step > T::zero()),
            TailRule::Factorial { radius_step } => (*radius_step, true),
        };
        if level_step <= T::zero() || !ok {
            return Err(crate::Error::InvalidProfile(
                "tail steps must be positive".into(),
            ));
        }
        let gen = TailGen {
            prefix: knots,
            rule: rule.clone(),
            next: 0,
            extra: 0,
            last,
        };
        Ok(PLProfile::lazy(Source::Tail { prefix, rule }, Box::new(gen)))
    }
}

struct TailGen<T> {
    prefix: Vec<Knot<T>>,
    rule: TailRule<T>,
    next: usize,
    extra: u64,
    last: Knot<T>,
}

impl<T: Scalar> KnotGenerator<T> for TailGen<T> {
    fn next_knot(&mut self) -> Knot<T> {
        if self.next < self.prefix.len() {
            self.next += 1;
            return self.prefix[self.next - 1];
        }
        let (dr, slope) = match &self.rule {
            TailRule::Linear {
                level_step,
                slope_step,
            } => (*level_step / self.last.slope, self.last.slope + *slope_step),
            TailRule::Factorial { radius_step } => {
                (*radius_step, self.last.slope * T::from_u64(self.extra + 2))
            }
        };
        self.extra += 1;
        let radius = self.last.radius + dr;
        let k = Knot::new(radius, self.last.at(radius), slope);
        self.last = k;
        k
    }
}

pub(super) fn scale_knot<T: Scalar>(k: Knot<T>, lambda: T) -> Knot<T> {
    Knot::new(k.radius * lambda, k.value, k.slope / lambda)
}

struct MapGen<T: Scalar> {
    of: PLProfile<T>,
    i: usize,
    map: fn(Knot<T>, T) -> Knot<T>,
    param: T,
}

impl<T: Scalar> KnotGenerator<T> for MapGen<T> {
    fn next_knot(&mut self) -> Knot<T> {
        let k = self.of.knot(self.i).expect("lazy profiles are infinite");
        self.i += 1;
        (self.map)(k, self.param)
    }
}

pub(super) fn scaled<T: Scalar>(of: PLProfile<T>, factor: T) -> PLProfile<T> {
    let gen = MapGen {
        of: of.clone(),
        i: 0,
        map: scale_knot,
        param: factor,
    };
    PLProfile::lazy(Source::Scaled { of, factor }, Box::new(gen))
}

pub(super) fn shifted<T: Scalar>(of: PLProfile<T>, offset: T) -> PLProfile<T> {
    let gen = MapGen {
        of: of.clone(),
        i: 0,
        map: |k, c| Knot::new(k.radius, k.value + c, k.slope),
        param: offset,
    };
    PLProfile::lazy(Source::Shifted { of, offset }, Box::new(gen))
}

/// Knots of the conjugate of an infinite profile. The conjugate has a knot
/// at every slope value of the input and takes the input radii as slopes.
pub(super) struct ConjugateGen<T: Scalar> {
    pub(super) of: PLProfile<T>,
    pub(super) i: usize,
}

impl<T: Scalar> KnotGenerator<T> for ConjugateGen<T> {
    fn next_knot(&mut self) -> Knot<T> {
        let i = self.i;
        self.i += 1;
        let cur = self.of.knot(i).expect("lazy profiles are infinite");
        if i == 0 {
            return Knot::new(T::zero(), -cur.value, T::zero());
        }
        let prev = self.of.knot(i - 1).expect("index below current");
        Knot::new(prev.slope, prev.radius * prev.slope - prev.value, cur.radius)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Bound, Ext};

    fn staircase() -> PLProfile {
        let prefix = PLProfile::linear(0.0, 1.0).unwrap();
        PLProfile::with_tail(
            prefix,
            TailRule::Linear {
                level_step: 1.0,
                slope_step: 1.0,
            },
        )
        .unwrap()
    }

    #[test]
    fn linear_tail_levels_and_slopes() {
        let p = staircase();
        let k: Vec<_> = p.iter_knots().take(4).collect();
        assert_eq!(k[1], Knot::new(1.0, 1.0, 2.0));
        assert_eq!(k[2], Knot::new(1.5, 2.0, 3.0));
        assert_eq!(k[3].value, 3.0);
        assert_eq!(p.eval(1.25).unwrap(), Ext::Finite(1.5));
    }

    #[test]
    fn factorial_tail_grows_slopes() {
        let prefix = PLProfile::linear(0.0, 1.0).unwrap();
        let p = PLProfile::with_tail(prefix, TailRule::Factorial { radius_step: 1.0 }).unwrap();
        let slopes: Vec<f64> = p.iter_knots().take(4).map(|k| k.slope).collect();
        assert_eq!(slopes, vec![1.0, 2.0, 6.0, 24.0]);
    }

    #[test]
    fn tail_needs_finite_prefix() {
        let ind = PLProfile::indicator(0.0, 1.0).unwrap();
        assert!(PLProfile::with_tail(ind, TailRule::Factorial { radius_step: 1.0 }).is_err());
    }

    #[test]
    fn lazy_flags() {
        let p = staircase();
        assert!(p.is_lazy());
        assert!(p.is_super_coercive());
        assert_eq!(p.bound(), Bound::Unbounded);
        assert!(p.convexity_violation().is_none());
    }

    #[test]
    fn materialization_by_radius_and_level() {
        let p = staircase();
        assert_eq!(p.materialize_to_radius(1.5).len(), 3);
        let by_level = p.materialize_to_level(2.5);
        assert_eq!(by_level.last().unwrap().value, 3.0);
    }

    #[test]
    fn concurrent_materialization_is_idempotent() {
        let p = staircase();
        let handles: Vec<_> = (0..4)
            .map(|t| {
                let p = p.clone();
                std::thread::spawn(move || p.knot(50 + t).unwrap())
            })
            .collect();
        let got: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        for (t, k) in got.iter().enumerate() {
            assert_eq!(*k, p.knot(50 + t).unwrap());
        }
    }

    #[test]
    fn lazy_scaling_matches_pointwise() {
        let p = staircase();
        let q = p.scaled(2.0).unwrap();
        for r in [0.3, 1.7, 4.2, 9.0] {
            let a = q.eval(r).unwrap().to_f64();
            let b = p.eval(r / 2.0).unwrap().to_f64();
            assert!((a - b).abs() < 1e-12);
        }
    }
}
