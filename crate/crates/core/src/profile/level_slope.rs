use super::{Knot, PLProfile};
use crate::error::{Error, Result};
use crate::scalar::{Bound, Scalar};

/// Level/slope parameterization of a finite-valued profile: `v(0) = t_1`
/// and `v' = b_k` while `t_k < v < t_{k+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelSlopeForm<T> {
    pub levels: Vec<T>,
    pub slopes: Vec<T>,
}

impl<T: Scalar> LevelSlopeForm<T> {
    pub fn new(levels: Vec<T>, slopes: Vec<T>) -> Result<Self> {
        if levels.is_empty() || levels.len() != slopes.len() {
            return Err(Error::InvalidProfile(
                "levels and slopes must be non-empty and of equal length".into(),
            ));
        }
        if slopes[0] <= T::zero() {
            return Err(Error::InvalidProfile("slopes must be positive".into()));
        }
        let increasing = |v: &[T]| v.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&levels) || !increasing(&slopes) {
            return Err(Error::InvalidProfile(
                "levels and slopes must be strictly increasing".into(),
            ));
        }
        Ok(LevelSlopeForm { levels, slopes })
    }

    /// The profile; the last slope continues to infinity.
    pub fn to_profile(&self) -> PLProfile<T> {
        let mut knots = Vec::with_capacity(self.levels.len());
        let mut radius = T::zero();
        for (i, (&t, &b)) in self.levels.iter().zip(&self.slopes).enumerate() {
            if i > 0 {
                radius = radius + (t - self.levels[i - 1]) / self.slopes[i - 1];
            }
            knots.push(Knot::new(radius, t, b));
        }
        PLProfile::from_knots(knots, Bound::Unbounded).expect("strict level/slope data")
    }

    /// Reads levels and slopes off a finite profile. The profile must be
    /// finite-valued with a positive initial slope.
    pub fn from_profile(p: &PLProfile<T>) -> Result<Self> {
        if !p.is_finite_valued() {
            return Err(Error::InvalidProfile(
                "level/slope form needs a finite-valued profile".into(),
            ));
        }
        let knots = p.knots()?;
        Self::new(
            knots.iter().map(|k| k.value).collect(),
            knots.iter().map(|k| k.slope).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn round_trip_rational() {
        let r = |a, b| Rational::new(a, b);
        let form = LevelSlopeForm::new(
            vec![r(0, 1), r(1, 1), r(5, 2), r(7, 1)],
            vec![r(1, 3), r(2, 1), r(9, 4), r(11, 1)],
        )
        .unwrap();
        let p = form.to_profile();
        assert_eq!(LevelSlopeForm::from_profile(&p).unwrap(), form);
        assert_eq!(p.knots().unwrap()[1].radius, r(3, 1));
    }

    #[test]
    fn rejects_flat_or_non_strict() {
        assert!(LevelSlopeForm::new(vec![0.0, 1.0], vec![0.0, 1.0]).is_err());
        assert!(LevelSlopeForm::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(LevelSlopeForm::new(vec![0.0, 1.0], vec![2.0, 2.0]).is_err());
    }
}
