use super::lazy::ConjugateGen;
use super::{Knot, PLProfile, Repr, Source};
use crate::scalar::{Bound, Scalar};

impl<T: Scalar> PLProfile<T> {
    /// Monotone conjugate `v*(s) = sup_{r >= 0} (r s - v(r))` for `s >= 0`,
    /// which is the profile of the Legendre transform of the radial lift.
    ///
    /// Radii and slopes exchange roles: `v*` has a knot at every slope value
    /// of `v` and its slopes are the radii of `v`. A finite domain bound turns
    /// into a final slope and vice versa, so `v` is super-coercive exactly
    /// when `v*` is finite everywhere. Knot values come from the
    /// Fenchel-Young equality `v*(s_i) = r_i s_i - v(r_i)`.
    pub fn conjugate(&self) -> PLProfile<T> {
        match &self.repr {
            Repr::Lazy(lazy) => match &lazy.source {
                Source::Conjugate(inner) => inner.clone(),
                _ => PLProfile::lazy(
                    Source::Conjugate(self.clone()),
                    Box::new(ConjugateGen {
                        of: self.clone(),
                        i: 0,
                    }),
                ),
            },
            Repr::Finite { knots, bound } => conjugate_finite(knots, *bound),
        }
    }
}

fn conjugate_finite<T: Scalar>(knots: &[Knot<T>], bound: Bound<T>) -> PLProfile<T> {
    let mut out = Vec::with_capacity(knots.len() + 2);
    out.push(Knot::new(T::zero(), -knots[0].value, T::zero()));
    for w in knots.windows(2) {
        let (prev, cur) = (w[0], w[1]);
        out.push(Knot::new(
            prev.slope,
            prev.radius * prev.slope - prev.value,
            cur.radius,
        ));
    }
    let last = *knots.last().expect("non-empty");
    let out_bound = match bound {
        Bound::At(d) => {
            out.push(Knot::new(last.slope, last.radius * last.slope - last.value, d));
            Bound::Unbounded
        }
        Bound::Unbounded => Bound::At(last.slope),
    };
    PLProfile::from_knots(out, out_bound).expect("conjugate of a valid profile is valid")
}
