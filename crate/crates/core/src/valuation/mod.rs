//! Valuations built from ζ-triples, evaluated on radial and grid inputs,
//! together with the checks that exercise their defining properties.

mod checks;
mod experiment;
pub mod generate;
mod growth;
mod discontinuity;
pub mod report;
pub mod suites;

pub use checks::{
    check_continuity, check_dual_translation_grid, check_invariance_grid,
    check_valuation_identity, check_valuation_identity_gk, closed_form_z1_1d, valuation_residual,
};
pub use experiment::{volume_product_csv, volume_product_experiment, VolumeProductRow};
pub use growth::{growth_probe, k0, GrowthReport};
pub use discontinuity::{discontinuity_example, DiscontinuityReport};
pub use report::Report;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{llt, z_numeric, AffineMax, DualRange, GridFn};
use crate::radial::{z1, z2_dual_exact, z2_exact, RadialFn};
use crate::zeta::ScalarZeta;

/// `(zeta_0, zeta_1, zeta_2)`; the threshold `T` lives on `zeta_2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaTriple {
    pub zeta0: ScalarZeta,
    pub zeta1: ScalarZeta,
    pub zeta2: ScalarZeta,
}

impl ZetaTriple {
    pub fn new(zeta0: ScalarZeta, zeta1: ScalarZeta, zeta2: ScalarZeta) -> Self {
        ZetaTriple { zeta0, zeta1, zeta2 }
    }

    pub fn zero() -> Self {
        ZetaTriple::new(ScalarZeta::zero(), ScalarZeta::zero(), ScalarZeta::zero())
    }

    /// `T` with `zeta_2 = 0` on `[T, inf)`.
    pub fn threshold(&self) -> Option<f64> {
        self.zeta2.threshold
    }

    /// Same triple with `zeta_0(t)` replaced by `zeta_0(-t)`.
    pub fn reflect_zeta0(&self) -> Self {
        ZetaTriple {
            zeta0: self.zeta0.reflected(),
            ..self.clone()
        }
    }

    /// Checks the hypotheses for dimension `n`: each function valid and
    /// non-negative, a declared threshold for `zeta_2`, and a finite moment
    /// of order `n - 1` for `zeta_1`.
    pub fn validate(&self, n: usize) -> Result<()> {
        for (name, z) in [("zeta0", &self.zeta0), ("zeta1", &self.zeta1), ("zeta2", &self.zeta2)] {
            z.validate()
                .map_err(|e| Error::InvalidZeta(format!("{name}: {e}")))?;
            if !z.is_nonnegative() {
                return Err(Error::InvalidZeta(format!("{name} takes negative values")));
            }
        }
        if self.zeta2.threshold.is_none() {
            return Err(Error::InvalidZeta("zeta2 needs a threshold T".into()));
        }
        if !self.zeta1.has_finite_moment(n) {
            return Err(Error::InvalidZeta(format!(
                "zeta1 has an infinite moment of order {}",
                n - 1
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZComponents {
    pub z0: f64,
    pub z1: f64,
    pub z2: f64,
    pub total: f64,
}

impl ZComponents {
    pub fn new(z0: f64, z1: f64, z2: f64) -> Self {
        ZComponents {
            z0,
            z1,
            z2,
            total: z0 + z1 + z2,
        }
    }
}

/// `Z(u)` on the exact radial path. `tol` is the absolute tolerance of the
/// `zeta_1` quadrature.
pub fn evaluate_z(zeta: &ZetaTriple, u: &RadialFn, tol: f64) -> Result<ZComponents> {
    if !u.profile.is_super_coercive() {
        return Err(Error::NotCoercive(
            "Z needs a super-coercive input; compose with g_k first".into(),
        ));
    }
    Ok(ZComponents::new(
        zeta.zeta0.eval(u.min_value()),
        z1(&zeta.zeta1, u, tol)?,
        z2_exact(&zeta.zeta2, u)?,
    ))
}

/// `Z(u)` on the grid path.
pub fn evaluate_z_grid(zeta: &ZetaTriple, u: &GridFn, support_tol: f64) -> Result<ZComponents> {
    let z = z_numeric(u, zeta, support_tol)?;
    Ok(ZComponents::new(z.z0, z.z1, z.z2))
}

/// Affine maxima are never super-coercive, so `Z` is only taken after
/// composing with `g_k` and sampling on `[lo, hi]^dims`.
pub fn evaluate_z_affine_gk(
    zeta: &ZetaTriple,
    u: &AffineMax,
    k: u32,
    lo: f64,
    hi: f64,
    res: usize,
    support_tol: f64,
) -> Result<ZComponents> {
    if !u.is_coercive() {
        return Err(Error::NotCoercive("affine maximum is not coercive".into()));
    }
    let g = u.sample(lo, hi, res)?.compose_gk(k)?;
    evaluate_z_grid(zeta, &g, support_tol)
}

/// `Z*(u) = zeta_0(u(0)) + int zeta_1(u*) + int zeta_2(grad u . x - u)`.
pub fn evaluate_z_dual(zeta: &ZetaTriple, u: &RadialFn, tol: f64) -> Result<ZComponents> {
    if !u.profile.is_super_coercive() {
        return Err(Error::NotCoercive(
            "Z* needs a super-coercive input; compose with g_k first".into(),
        ));
    }
    Ok(ZComponents::new(
        zeta.zeta0.eval(u.profile.base()),
        z1(&zeta.zeta1, &u.conjugate(), tol)?,
        z2_dual_exact(&zeta.zeta2, u)?,
    ))
}

/// [`evaluate_z_dual`] on the grid path: the dual integrals are the primal
/// ones of the discrete conjugate.
pub fn evaluate_z_dual_grid(zeta: &ZetaTriple, u: &GridFn, support_tol: f64) -> Result<ZComponents> {
    let at_origin = u
        .interpolate(&vec![0.0; u.dims()])
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Domain("u must be finite at the origin".into()))?;
    let conj = llt(u, DualRange::Auto)?;
    let rest = ZetaTriple {
        zeta0: ScalarZeta::zero(),
        ..zeta.clone()
    };
    let z = z_numeric(&conj.grid, &rest, support_tol)?;
    Ok(ZComponents::new(zeta.zeta0.eval(at_origin), z.z1, z.z2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::PLProfile;
    use crate::scalar::Bound;
    use std::f64::consts::PI;

    fn staircase(levels: usize) -> RadialFn {
        let segments: Vec<(f64, f64)> = (0..levels).map(|i| (i as f64, (i + 1) as f64)).collect();
        let p = PLProfile::new(0.0, &segments, Bound::At(levels as f64)).unwrap();
        RadialFn::new(p, 2).unwrap()
    }

    fn triple() -> ZetaTriple {
        ZetaTriple::new(ScalarZeta::identity(), ScalarZeta::exp_decay(1.0), ScalarZeta::hat(1.0))
    }

    #[test]
    fn staircase_components() {
        let z = evaluate_z(&triple(), &staircase(6), 1e-12).unwrap();
        assert_eq!(z.z0, 0.0);
        assert!((z.z2 - PI).abs() < 1e-12);
        assert_eq!(z.total, z.z0 + z.z1 + z.z2);
    }

    #[test]
    fn only_zeta0() {
        let z = ZetaTriple::new(ScalarZeta::identity(), ScalarZeta::zero(), ScalarZeta::zero());
        let u = staircase(4);
        let c = evaluate_z(&z, &u, 1e-12).unwrap();
        assert_eq!((c.z0, c.z1, c.z2), (0.0, 0.0, 0.0));
        let d = evaluate_z_dual(&z, &u, 1e-12).unwrap();
        assert_eq!(d.total, 0.0);
    }

    #[test]
    fn plain_linear_rejected() {
        let u = RadialFn::new(PLProfile::linear(0.0, 1.0).unwrap(), 2).unwrap();
        assert!(matches!(evaluate_z(&triple(), &u, 1e-9), Err(Error::NotCoercive(_))));
    }

    #[test]
    fn dual_matches_reflected_primal_of_conjugate() {
        let u = staircase(5);
        let zeta = ZetaTriple::new(ScalarZeta::hat(3.0), ScalarZeta::exp_decay(1.0), ScalarZeta::hat(2.5));
        let dual = evaluate_z_dual(&zeta, &u, 1e-12).unwrap();
        let primal = evaluate_z(&zeta.reflect_zeta0(), &u.conjugate(), 1e-12);
        // u* is finite-valued with bounded slopes: not super-coercive, so
        // the primal route is assembled from its parts.
        assert!(primal.is_err());
        let v = u.conjugate();
        let z0 = zeta.reflect_zeta0().zeta0.eval(v.min_value());
        let z2 = z2_exact(&zeta.zeta2, &v).unwrap();
        assert_eq!(dual.z0, z0);
        assert_eq!(dual.z2, z2);
    }

    #[test]
    fn triple_validation() {
        let t = ZetaTriple::new(ScalarZeta::hat(1.0), ScalarZeta::exp_decay(1.0), ScalarZeta::hat(1.0));
        assert!(t.validate(2).is_ok());
        let bad = ZetaTriple::new(ScalarZeta::hat(1.0), ScalarZeta::harmonic(), ScalarZeta::hat(1.0));
        assert!(bad.validate(2).is_err());
        assert!(triple().validate(2).is_err());
    }
}
