use serde::Serialize;

use super::ZetaTriple;
use crate::embed::{compose_gk, sf, Gk, MAX_SF_INDEX};
use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::radial::{unit_ball_volume, z1, z2_exact, RadialFn, MAX_Z1_SEGMENTS};
use crate::zeta::ScalarZeta;

/// `min { k : sf_k >= T + 1 }`.
pub fn k0(threshold: f64) -> Result<u32> {
    (1..=MAX_SF_INDEX)
        .find(|&k| sf(k).is_ok_and(|s| s as f64 >= threshold + 1.0))
        .ok_or_else(|| Error::Overflow(format!("no sf_k >= {} + 1 in range", threshold)))
}

/// Both sides of the decomposition of `Z(g_k u)` for a coercive `u`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    pub k: u32,
    pub k0: u32,
    pub direct: [f64; 3],
    /// `zeta_2` part is `None` below `k0`, where it is not comparable.
    pub decomposed: [Option<f64>; 3],
    pub residuals: [Option<f64>; 3],
}

/// Compares `Z(g_k u)` computed on the composed profile with
/// `zeta_0(g_k(min u)) + int zeta_1(g_k(u)) + int zeta_2(...u...)`, the last
/// term evaluated on `u` itself once `k >= k0`.
pub fn growth_probe(zeta: &ZetaTriple, u: &RadialFn, k: u32, tol: f64) -> Result<GrowthReport> {
    if !u.profile.is_coercive() || u.profile.is_lazy() {
        return Err(Error::NotCoercive("growth probe needs a finite coercive profile".into()));
    }
    let t = zeta
        .threshold()
        .ok_or_else(|| Error::InvalidZeta("zeta2 needs a threshold T".into()))?;
    let k0 = k0(t)?;
    let gk = Gk::new(k)?;
    let composed = RadialFn::new(compose_gk(k, &u.profile)?, u.n)?;

    let direct = [
        zeta.zeta0.eval(composed.min_value()),
        z1(&zeta.zeta1, &composed, tol)?,
        z2_exact(&zeta.zeta2, &composed)?,
    ];
    let decomposed = [
        Some(zeta.zeta0.eval(gk.eval(u.min_value()))),
        Some(z1_through_gk(&zeta.zeta1, gk, u, tol)?),
        if k >= k0 {
            Some(z2_exact(&zeta.zeta2, u)?)
        } else {
            None
        },
    ];
    let mut residuals = [None; 3];
    for i in 0..3 {
        residuals[i] = decomposed[i].map(|d| (direct[i] - d).abs());
    }
    Ok(GrowthReport {
        k,
        k0,
        direct,
        decomposed,
        residuals,
    })
}

/// `int (zeta o g_k)(u)` integrated over the segments of `u` itself, split
/// at preimages of the kinks of `g_k` and of the breakpoints of `zeta`.
fn z1_through_gk(zeta: &ScalarZeta, gk: Gk, u: &RadialFn, tol: f64) -> Result<f64> {
    let n = u.n;
    let p = &u.profile;
    let knots = p.knots()?;
    let scale = n as f64 * unit_ball_volume(n);
    let tail_tol = 0.5 * tol / scale;
    let piece_tol = |i: usize| {
        0.5 * tol / scale * 6.0 / (std::f64::consts::PI.powi(2) * ((i + 1) as f64).powi(2))
    };
    let zeta_cuts: Vec<f64> = zeta.breakpoints().iter().map(|&b| gk.inverse(b)).collect();
    let limit = p.bound().finite();
    let mut total = 0.0;
    let mut piece = 0;

    let integrate_span = |knot: crate::profile::Knot<f64>, a: f64, b: f64, piece: &mut usize| {
        let arg = |r: f64| knot.value + knot.slope * (r - knot.radius);
        let mut cuts = vec![a, b];
        if knot.slope > 0.0 {
            let (lo, hi) = (arg(a), arg(b));
            for level in gk.kink_levels(hi).into_iter().chain(zeta_cuts.iter().copied()) {
                if level > lo && level < hi {
                    cuts.push(knot.radius + (level - knot.value) / knot.slope);
                }
            }
        }
        cuts.sort_by(|x, y| x.total_cmp(y));
        let f = |r: f64| r.powi(n as i32 - 1) * zeta.eval(gk.eval(arg(r)));
        let mut sum = 0.0;
        for w in cuts.windows(2) {
            sum += integrate(&f, w[0], w[1], piece_tol(*piece)).value;
            *piece += 1;
        }
        sum
    };

    for (i, &knot) in knots.iter().enumerate() {
        let a = knot.radius;
        let next = knots.get(i + 1).map(|k| k.radius);
        match (next, limit) {
            (Some(b), _) => total += integrate_span(knot, a, b, &mut piece),
            (None, Some(d)) => {
                if d > a {
                    total += integrate_span(knot, a, d, &mut piece);
                }
            }
            (None, None) => {
                let mut lo = a;
                loop {
                    let hi = 2.0 * lo + 1.0;
                    total += integrate_span(knot, lo, hi, &mut piece);
                    let level = knot.value + knot.slope * (hi - a);
                    let slope = gk.slope(level) * knot.slope;
                    match zeta.radial_tail_bound(n, hi, gk.eval(level), slope) {
                        Some(bound) if bound <= tail_tol => break,
                        _ if piece > MAX_Z1_SEGMENTS || !hi.is_finite() => {
                            return Err(Error::Unbounded(
                                "no tail certificate for the final segment".into(),
                            ));
                        }
                        _ => lo = hi,
                    }
                }
            }
        }
    }
    Ok(total * scale)
}
