use super::{Knot, PLProfile};
use crate::error::{Error, Result};
use crate::scalar::{Bound, Ext, Scalar};

#[derive(Clone, Copy, PartialEq)]
enum Op {
    Max,
    Min,
}

/// Pointwise maximum `p ∨ q`; always convex.
pub fn pl_max<T: Scalar>(p: &PLProfile<T>, q: &PLProfile<T>) -> Result<PLProfile<T>> {
    combine(p, q, Op::Max)
}

/// Pointwise minimum `p ∧ q`, or [`Error::NotConvex`] when the slope drops
/// at a crossing or the value jumps at a domain bound.
pub fn pl_min<T: Scalar>(p: &PLProfile<T>, q: &PLProfile<T>) -> Result<PLProfile<T>> {
    combine(p, q, Op::Min)
}

fn sort_dedup<T: Scalar>(v: &mut Vec<T>) {
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite radii"));
    v.dedup_by(|a, b| a.near(*b));
}

fn finite_on<T: Scalar>(bound: Bound<T>, right_end: Option<T>) -> bool {
    match (bound, right_end) {
        (Bound::Unbounded, _) => true,
        (Bound::At(d), Some(b)) => b <= d,
        (Bound::At(_), None) => false,
    }
}

fn combine<T: Scalar>(p: &PLProfile<T>, q: &PLProfile<T>, op: Op) -> Result<PLProfile<T>> {
    let (pk, qk) = (p.knots()?, q.knots()?);
    let (dp, dq) = (p.bound(), q.bound());
    let dom = match op {
        Op::Max => dp.min(dq),
        Op::Min => dp.max(dq),
    };

    let mut pts: Vec<T> = pk.iter().chain(qk).map(|k| k.radius).collect();
    pts.extend(dp.finite());
    pts.extend(dq.finite());
    sort_dedup(&mut pts);
    pts.retain(|&r| dom.contains(r));

    let mut all = pts.clone();
    for (i, &a) in pts.iter().enumerate() {
        let b = pts.get(i + 1).copied();
        if b.is_none() && dom.finite().is_some() {
            break;
        }
        if !finite_on(dp, b) || !finite_on(dq, b) {
            continue;
        }
        let (sp, sq) = (p.segment_at(a), q.segment_at(a));
        let da = sp.at(a) - sq.at(a);
        match b {
            Some(b) => {
                let db = sp.at(b) - sq.at(b);
                let zero = T::zero();
                if (da < zero && db > zero) || (da > zero && db < zero) {
                    all.push(a + da / (da - db) * (b - a));
                }
            }
            None => {
                let ds = sp.slope - sq.slope;
                if da * ds < T::zero() {
                    all.push(a - da / ds);
                }
            }
        }
    }
    sort_dedup(&mut all);

    let pick = |x: Ext<T>, y: Ext<T>| match op {
        Op::Max => x.max(y),
        Op::Min => x.min(y),
    };

    let mut knots: Vec<Knot<T>> = Vec::with_capacity(all.len());
    for (i, &x) in all.iter().enumerate() {
        let value = pick(p.eval(x)?, q.eval(x)?)
            .finite()
            .ok_or_else(|| Error::InvalidProfile("lattice operand infinite inside domain".into()))?;
        let probe = match all.get(i + 1) {
            Some(&next) => (x + next).half(),
            None if dom.finite().is_some() => {
                knots.push(Knot::new(x, value, knots.last().map_or(T::zero(), |k| k.slope)));
                continue;
            }
            None => x + T::one(),
        };
        let (vp, vq) = (p.eval(probe)?, q.eval(probe)?);
        let use_p = match op {
            Op::Max => vq.le(vp),
            Op::Min => vp.le(vq),
        };
        let active = if use_p {
            p.segment_at(probe)
        } else {
            q.segment_at(probe)
        };
        // An upward jump just right of x (a domain bound of the lower operand).
        if op == Op::Min && !active.at(x).near(value) {
            return Err(Error::NotConvex { at: x.to_f64() });
        }
        knots.push(Knot::new(x, value, active.slope));
    }

    if op == Op::Min {
        for w in knots.windows(2) {
            let expected = w[0].at(w[1].radius);
            if !expected.near(w[1].value) || w[1].slope < w[0].slope && !w[1].slope.near(w[0].slope) {
                return Err(Error::NotConvex {
                    at: w[1].radius.to_f64(),
                });
            }
        }
    }
    PLProfile::from_knots(knots, dom)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lin(base: f64, slope: f64) -> PLProfile {
        PLProfile::linear(base, slope).unwrap()
    }

    #[test]
    fn max_crossing_at_one() {
        let m = pl_max(&lin(0.0, 1.0), &lin(-1.0, 2.0)).unwrap();
        let k = m.knots().unwrap();
        assert_eq!(k.len(), 2);
        assert_eq!(k[1], Knot::new(1.0, 1.0, 2.0));
        assert_eq!(k[0].slope, 1.0);
    }

    #[test]
    fn min_slope_drop_is_not_convex() {
        let err = pl_min(&lin(0.0, 1.0), &lin(0.5, 0.5)).unwrap_err();
        assert_eq!(err, Error::NotConvex { at: 1.0 });
    }

    #[test]
    fn min_of_comparable_pair_is_lower() {
        let p = lin(0.0, 1.0);
        let q = pl_max(&p, &lin(-1.0, 2.0)).unwrap();
        let m = pl_min(&p, &q).unwrap();
        assert!(m.canonical_eq(&p));
    }

    #[test]
    fn max_respects_smaller_domain() {
        let ind = PLProfile::indicator(0.5, 2.0).unwrap();
        let m = pl_max(&lin(0.0, 1.0), &ind).unwrap();
        assert_eq!(m.bound(), Bound::At(2.0));
        assert_eq!(m.eval(0.25).unwrap(), Ext::Finite(0.5));
        assert_eq!(m.eval(1.5).unwrap(), Ext::Finite(1.5));
        assert_eq!(m.eval(2.5).unwrap(), Ext::PosInf);
    }

    #[test]
    fn min_with_indicator_jump_is_not_convex() {
        let ind = PLProfile::indicator(0.0, 1.0).unwrap();
        assert!(matches!(
            pl_min(&lin(0.0, 2.0), &ind),
            Err(Error::NotConvex { .. })
        ));
    }

    #[test]
    fn min_with_indicator_continuous_ok() {
        // q = r is below the indicator level 1 until r = 1, then the
        // indicator ends where q already equals 1.
        let ind = PLProfile::indicator(1.0, 1.0).unwrap();
        let m = pl_min(&lin(0.0, 1.0), &ind).unwrap();
        assert!(m.canonical_eq(&lin(0.0, 1.0)));
    }

    #[test]
    fn lazy_operands_rejected() {
        let lazy = PLProfile::with_tail(
            lin(0.0, 1.0),
            crate::profile::TailRule::Factorial { radius_step: 1.0 },
        )
        .unwrap();
        assert_eq!(pl_max(&lazy, &lin(0.0, 1.0)).unwrap_err(), Error::LazyOperand);
    }
}
