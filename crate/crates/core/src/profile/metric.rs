use super::PLProfile;
use crate::error::{Error, Result};
use crate::scalar::{Bound, Ext, Scalar};

/// Closed interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> PLProfile<T> {
    /// `[left slope, right slope]` at `r`. At `r = 0` the monotone
    /// subdifferential `[0, v'(0+)]` is returned.
    pub fn subdifferential(&self, r: T) -> Result<Interval<T>> {
        if r < T::zero() {
            return Err(Error::Domain(format!("negative radius {:?}", r)));
        }
        if let Bound::At(d) = self.bound() {
            if r >= d {
                return Err(Error::Domain(format!(
                    "radius {:?} is not interior to the domain [0, {:?}]",
                    r, d
                )));
            }
        }
        let i = self.segment_index(r);
        let seg = self.knot(i).expect("segment exists");
        if r == T::zero() {
            return Ok(Interval {
                lo: T::zero(),
                hi: seg.slope,
            });
        }
        let left = if seg.radius == r && i > 0 {
            self.knot(i - 1).expect("previous knot").slope
        } else {
            seg.slope
        };
        Ok(Interval {
            lo: left,
            hi: seg.slope,
        })
    }

    /// Radius `rho` with `{v <= level} = [0, rho]`: `None` when
    /// `level < v(0)`, `Some(PosInf)` when the sublevel set is unbounded.
    pub fn sublevel_radius(&self, level: T) -> Option<Ext<T>> {
        let base = self.base();
        if level < base {
            return None;
        }
        let mut prev = self.knot(0).expect("non-empty");
        let mut i = 1;
        loop {
            match self.knot(i) {
                Some(k) if k.value <= level => {
                    prev = k;
                    i += 1;
                }
                Some(_) => {
                    // Crossing inside the segment of prev; its slope is positive.
                    return Some(Ext::Finite(prev.radius + (level - prev.value) / prev.slope));
                }
                None => {
                    return Some(match self.bound() {
                        Bound::At(d) => {
                            if prev.at(d) <= level {
                                Ext::Finite(d)
                            } else {
                                Ext::Finite(prev.radius + (level - prev.value) / prev.slope)
                            }
                        }
                        Bound::Unbounded if prev.slope == T::zero() => Ext::PosInf,
                        Bound::Unbounded => {
                            Ext::Finite(prev.radius + (level - prev.value) / prev.slope)
                        }
                    });
                }
            }
        }
    }
}

/// Parameters of the epi-distance surrogate.
#[derive(Clone, Debug, PartialEq)]
pub struct EpiMetric {
    /// Number of unit balls `[0, j]` in the local-uniform part.
    pub horizon: u32,
    /// Levels above `min(v_p(0), v_q(0))` at which sublevel radii are compared.
    pub ladder: Vec<f64>,
}

impl Default for EpiMetric {
    fn default() -> Self {
        EpiMetric {
            horizon: 8,
            ladder: vec![0.5, 1.0, 2.0, 4.0],
        }
    }
}

/// Epi-distance surrogate with the default ladder and the given horizon.
pub fn epi_distance<T: Scalar>(p: &PLProfile<T>, q: &PLProfile<T>, horizon: u32) -> f64 {
    epi_distance_with(
        p,
        q,
        &EpiMetric {
            horizon,
            ..EpiMetric::default()
        },
    )
}

/// `sum_j 2^-j min(1, sup_{[0,j]} |p - q|)` plus the mean over the ladder of
/// `min(1, |rho_p(t) - rho_q(t)|)`, the Hausdorff distance of the sublevel
/// intervals. Zero iff the profiles agree on `[0, horizon]` and at the
/// ladder levels.
pub fn epi_distance_with<T: Scalar>(p: &PLProfile<T>, q: &PLProfile<T>, metric: &EpiMetric) -> f64 {
    let horizon = metric.horizon.max(1) as f64;
    let to64 = |v: Ext<T>| v.to_f64();

    // Candidate points where |p - q| on [0, horizon] can peak.
    let h = T::from_f64(horizon);
    let mut pts: Vec<f64> = p
        .materialize_to_radius(h)
        .iter()
        .chain(q.materialize_to_radius(h).iter())
        .map(|k| k.radius.to_f64())
        .collect();
    for d in [p.bound(), q.bound()].iter().filter_map(|b| b.finite()) {
        let d = d.to_f64();
        pts.push(d);
        // Just past a bound one side is +inf.
        pts.push(d + 1e-9 * (1.0 + d));
    }
    pts.extend((1..=metric.horizon).map(f64::from));
    pts.retain(|&r| (0.0..=horizon).contains(&r));
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));

    let gap = |r: f64| -> f64 {
        let rr = T::from_f64(r);
        let a = p.eval(rr).map(to64).unwrap_or(f64::INFINITY);
        let b = q.eval(rr).map(to64).unwrap_or(f64::INFINITY);
        match (a.is_finite(), b.is_finite()) {
            (true, true) => (a - b).abs(),
            (false, false) => 0.0,
            _ => f64::INFINITY,
        }
    };

    let mut uniform = 0.0;
    let mut running = 0.0_f64;
    let mut idx = 0;
    for j in 1..=metric.horizon {
        let jf = f64::from(j);
        while idx < pts.len() && pts[idx] <= jf {
            running = running.max(gap(pts[idx]));
            idx += 1;
        }
        uniform += running.min(1.0) / 2f64.powi(j as i32);
    }

    let floor = p.base().to_f64().min(q.base().to_f64());
    let mut level_part = 0.0;
    for &dt in &metric.ladder {
        let t = T::from_f64(floor + dt);
        let d = match (p.sublevel_radius(t), q.sublevel_radius(t)) {
            (None, None) => 0.0,
            (Some(a), Some(b)) => match (a, b) {
                (Ext::Finite(a), Ext::Finite(b)) => (a.to_f64() - b.to_f64()).abs(),
                (Ext::PosInf, Ext::PosInf) => 0.0,
                _ => f64::INFINITY,
            },
            _ => f64::INFINITY,
        };
        level_part += d.min(1.0);
    }
    if !metric.ladder.is_empty() {
        level_part /= metric.ladder.len() as f64;
    }
    uniform + level_part
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kink() -> PLProfile {
        PLProfile::new(0.0, &[(0.0, 1.0), (1.0, 3.0)], Bound::Unbounded).unwrap()
    }

    #[test]
    fn subdifferential_smooth_and_kink() {
        let lin = PLProfile::linear(0.0, 1.0).unwrap();
        assert_eq!(lin.subdifferential(0.5).unwrap(), Interval { lo: 1.0, hi: 1.0 });
        assert_eq!(kink().subdifferential(1.0).unwrap(), Interval { lo: 1.0, hi: 3.0 });
    }

    #[test]
    fn subdifferential_outside_domain() {
        let ind = PLProfile::indicator(0.0, 1.0).unwrap();
        assert!(matches!(ind.subdifferential(1.0), Err(Error::Domain(_))));
        assert!(matches!(ind.subdifferential(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn fenchel_young_equality_at_kink() {
        let v = kink();
        let w = v.conjugate();
        let gap = v.eval(1.0).unwrap().to_f64() + w.eval(2.0).unwrap().to_f64() - 2.0;
        assert_eq!(gap, 0.0);
    }

    #[test]
    fn sublevel_radii() {
        let lin = PLProfile::linear(0.0, 1.0).unwrap();
        assert_eq!(lin.sublevel_radius(2.0), Some(Ext::Finite(2.0)));
        assert_eq!(PLProfile::linear(5.0, 2.0).unwrap().sublevel_radius(4.0), None);
        assert_eq!(kink().sublevel_radius(4.0), Some(Ext::Finite(2.0)));
        let ind = PLProfile::indicator(0.0, 1.0).unwrap();
        assert_eq!(ind.sublevel_radius(3.0), Some(Ext::Finite(1.0)));
        let flat = PLProfile::linear(1.0, 0.0).unwrap();
        assert_eq!(flat.sublevel_radius(1.0), Some(Ext::PosInf));
    }

    #[test]
    fn epi_distance_identity_and_shift() {
        let p = PLProfile::linear(0.0, 1.0).unwrap();
        assert_eq!(epi_distance(&p, &p, 8), 0.0);
        let d1 = epi_distance(&p, &p.shifted(1e-3), 8);
        let d2 = epi_distance(&p, &p.shifted(2e-3), 8);
        assert!(d1 > 0.0);
        assert!((d2 / d1 - 2.0).abs() < 1e-9);
    }

    #[test]
    fn epi_distance_sees_domain_bound() {
        let a = PLProfile::indicator(0.0, 1.0).unwrap();
        let b = PLProfile::indicator(0.0, 2.0).unwrap();
        assert!(epi_distance(&a, &b, 8) > 0.4);
    }
}
