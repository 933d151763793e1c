use rayon::prelude::*;

use super::{evaluate_z, evaluate_z_dual_grid, evaluate_z_grid, ZComponents, ZetaTriple};
use crate::embed::compose_gk;
use crate::error::{Error, Result};
use crate::grid::{AffineMax, GridFn, UnimodularMap};
use crate::profile::{pl_max, pl_min, PLProfile};
use crate::radial::RadialFn;
use crate::zeta::ScalarZeta;

/// `|Z(u) + Z(v) - Z(join) - Z(meet)|` on the radial path.
pub fn valuation_residual(
    zeta: &ZetaTriple,
    [u, v, join, meet]: [&RadialFn; 4],
    tol: f64,
) -> Result<f64> {
    let z: Vec<ZComponents> = [u, v, join, meet]
        .par_iter()
        .map(|f| evaluate_z(zeta, f, tol))
        .collect::<Result<_>>()?;
    Ok((z[0].total + z[1].total - z[2].total - z[3].total).abs())
}

fn lattice(u: &PLProfile, v: &PLProfile) -> Result<(PLProfile, PLProfile)> {
    Ok((pl_max(u, v)?, pl_min(u, v)?))
}

/// Valuation identity for radial `u`, `v` in `R^n`. A non-convex `u ^ v`
/// surfaces as `NotConvex`, which callers report as a skipped case.
pub fn check_valuation_identity(
    zeta: &ZetaTriple,
    u: &PLProfile,
    v: &PLProfile,
    n: usize,
    tol: f64,
) -> Result<f64> {
    let (join, meet) = lattice(u, v)?;
    let lift = |p: PLProfile| RadialFn::new(p, n);
    valuation_residual(
        zeta,
        [
            &lift(u.clone())?,
            &lift(v.clone())?,
            &lift(join)?,
            &lift(meet)?,
        ],
        tol,
    )
}

/// As [`check_valuation_identity`] after composing all four lattice
/// members with `g_k`, which commutes with `max` and `min`.
pub fn check_valuation_identity_gk(
    zeta: &ZetaTriple,
    u: &PLProfile,
    v: &PLProfile,
    n: usize,
    k: u32,
    tol: f64,
) -> Result<f64> {
    let (join, meet) = lattice(u, v)?;
    let lift = |p: &PLProfile| RadialFn::new(compose_gk(k, p)?, n);
    valuation_residual(
        zeta,
        [&lift(u)?, &lift(v)?, &lift(&join)?, &lift(&meet)?],
        tol,
    )
}

/// `int_R zeta(u(x)) dx` for a 1-D affine maximum, in closed form: on a
/// piece of slope `s` the integral is `|int zeta| / |s|` over the values.
pub fn closed_form_z1_1d(zeta: &ScalarZeta, u: &AffineMax) -> Result<f64> {
    if u.dims != 1 {
        return Err(Error::Domain("closed form is for 1-D inputs".into()));
    }
    // Domain interval from the constraints.
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for h in &u.constraints {
        let (a, b) = (h.n[0], h.b);
        if a > 0.0 {
            hi = hi.min(b / a);
        } else if a < 0.0 {
            lo = lo.max(b / a);
        } else if b < 0.0 {
            return Ok(0.0);
        }
    }
    if lo > hi {
        return Ok(0.0);
    }
    // Breakpoints of the upper envelope: crossings of pairs of pieces that
    // are active there.
    let mut xs: Vec<f64> = Vec::new();
    for (i, p) in u.pieces.iter().enumerate() {
        for q in &u.pieces[i + 1..] {
            if p.a[0] != q.a[0] {
                let x = (q.c - p.c) / (p.a[0] - q.a[0]);
                if x > lo && x < hi {
                    xs.push(x);
                }
            }
        }
    }
    xs.push(lo);
    xs.push(hi);
    xs.sort_by(|a, b| a.total_cmp(b));
    xs.dedup();
    let mut total = 0.0;
    for w in xs.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(b > a) {
            continue;
        }
        // Active piece: evaluate at an interior point.
        let mid = match (a.is_finite(), b.is_finite()) {
            (true, true) => 0.5 * (a + b),
            (true, false) => a + 1.0,
            (false, true) => b - 1.0,
            (false, false) => 0.0,
        };
        let piece = u
            .pieces
            .iter()
            .max_by(|p, q| (p.a[0] * mid + p.c).total_cmp(&(q.a[0] * mid + q.c)))
            .expect("at least one piece");
        let s = piece.a[0];
        let at = |x: f64| s * x + piece.c;
        if s == 0.0 {
            let z = zeta.eval(piece.c);
            if z == 0.0 {
                continue;
            }
            if !(b - a).is_finite() {
                return Err(Error::Unbounded("zeta non-zero on a flat ray".into()));
            }
            total += z * (b - a);
            continue;
        }
        // A ray must climb in value; a descending ray is not coercive.
        let (lo_v, hi_v) = match (a.is_finite(), b.is_finite()) {
            (true, true) => (at(a).min(at(b)), at(a).max(at(b))),
            (true, false) if s > 0.0 => (at(a), f64::INFINITY),
            (false, true) if s < 0.0 => (at(b), f64::INFINITY),
            _ => return Err(Error::NotCoercive("affine maximum decreases along a ray".into())),
        };
        total += zeta.integral(lo_v, hi_v) / s.abs();
    }
    Ok(total)
}

/// Relative residuals `|Z(phi u) - Z(u)| / |Z(u)|` on the grid path for
/// each map. `support_level` is the sublevel of `u` that must stay inside
/// the box after transport.
pub fn check_invariance_grid(
    zeta: &ZetaTriple,
    u: &GridFn,
    maps: &[UnimodularMap],
    support_level: f64,
    support_tol: f64,
) -> Result<Vec<f64>> {
    let base = evaluate_z_grid(zeta, u, support_tol)?.total;
    maps.par_iter()
        .map(|phi| {
            let moved = phi.push_grid(u, support_level)?;
            let z = evaluate_z_grid(zeta, &moved, support_tol)?.total;
            Ok((z - base).abs() / base.abs().max(f64::MIN_POSITIVE))
        })
        .collect()
}

/// Relative residual of `Z*(u + l) - Z*(u)` on the grid path for linear `l`.
pub fn check_dual_translation_grid(
    zeta: &ZetaTriple,
    u: &GridFn,
    l: &[f64],
    support_tol: f64,
) -> Result<f64> {
    let base = evaluate_z_dual_grid(zeta, u, support_tol)?.total;
    let shifted = GridFn::sample(&u.lo, &u.hi, &u.res, |x| {
        let v = u.interpolate(x).unwrap_or(f64::INFINITY);
        v + x.iter().zip(l).map(|(a, b)| a * b).sum::<f64>()
    })?;
    let z = evaluate_z_dual_grid(zeta, &shifted, support_tol)?.total;
    Ok((z - base).abs() / base.abs().max(f64::MIN_POSITIVE))
}

/// `|Z(g_k u) - Z(u)|` for `k = 1..=k_max`.
pub fn check_continuity(zeta: &ZetaTriple, u: &RadialFn, k_max: u32, tol: f64) -> Result<Vec<f64>> {
    let base = evaluate_z(zeta, u, tol)?.total;
    (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let g = RadialFn::new(compose_gk(k, &u.profile)?, u.n)?;
            Ok((evaluate_z(zeta, &g, tol)?.total - base).abs())
        })
        .collect()
}
