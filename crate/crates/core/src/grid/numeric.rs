//! Grid approximation of the valuation `Z`.

use rayon::prelude::*;
use serde::Serialize;

use super::llt::{llt, DualRange};
use super::GridFn;
use crate::error::{Error, Result};
use crate::valuation::ZetaTriple;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZNumeric {
    pub z0: f64,
    pub z1: f64,
    pub z2: f64,
    pub total: f64,
    /// Largest primal grid step.
    pub h: f64,
    /// Largest dual grid step.
    pub dual_h: f64,
}

const CHUNK: usize = 4096;

/// Deterministic parallel sum: fixed chunks, summed in order.
fn chunked_sum(n: usize, f: impl Fn(usize) -> f64 + Sync) -> f64 {
    let partial: Vec<f64> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| (c * CHUNK..((c + 1) * CHUNK).min(n)).map(&f).sum())
        .collect();
    partial.iter().sum()
}

/// `Z(u)` on a grid.
///
/// The `zeta1` term is a trapezoid sum of `zeta1(u)`. The `zeta2` term is
/// a trapezoid sum over the dual grid of the linear-time transform, with
/// `grad u*` from central differences of the discrete conjugate.
///
/// `support_tol` bounds `|zeta1(u)|` on the box boundary and `|zeta2(u(x*))|`
/// at dual nodes whose maximizer sits on the box boundary; beyond it the
/// box truncates the integrand and the result is `SupportExceeded`.
pub fn z_numeric(u: &GridFn, zeta: &ZetaTriple, support_tol: f64) -> Result<ZNumeric> {
    let min = u.min_value().ok_or(Error::Empty)?;
    let z0 = zeta.zeta0.eval(min);

    let leak = (0..u.len())
        .filter(|&f| u.on_boundary(f) && u.values[f].is_finite())
        .map(|f| zeta.zeta1.eval(u.values[f]).abs())
        .fold(0.0, f64::max);
    if leak > support_tol {
        return Err(Error::SupportExceeded(format!(
            "zeta1(u) reaches {leak:e} on the box boundary"
        )));
    }
    let z1 = chunked_sum(u.len(), |f| {
        let v = u.values[f];
        if v.is_finite() {
            zeta.zeta1.eval(v) * u.weight(f)
        } else {
            0.0
        }
    });

    let conj = llt(u, DualRange::Auto)?;
    let dual = &conj.grid;
    let leak = (0..dual.len())
        .filter(|&d| conj.argmax[d] != usize::MAX && u.on_boundary(conj.argmax[d]))
        .map(|d| zeta.zeta2.eval(u.values[conj.argmax[d]]).abs())
        .fold(0.0, f64::max);
    if leak > support_tol {
        return Err(Error::SupportExceeded(format!(
            "zeta2 reaches {leak:e} at gradients pinned to the box boundary"
        )));
    }
    let z2 = chunked_sum(dual.len(), |d| match conj.argmax[d] {
        usize::MAX => 0.0,
        x => {
            let value = young_gap(dual, d).unwrap_or(u.values[x]);
            zeta.zeta2.eval(value) * dual.weight(d)
        }
    });

    let step = |g: &GridFn| (0..g.dims()).map(|a| g.step(a)).fold(0.0, f64::max);
    Ok(ZNumeric {
        z0,
        z1,
        z2,
        total: z0 + z1 + z2,
        h: step(u),
        dual_h: step(dual),
    })
}

/// `grad u*(y) . y - u*(y)` at dual node `d`, with the gradient from
/// central differences (one-sided at the box edge or next to `+inf`).
/// `None` when some axis has no finite neighbour.
fn young_gap(dual: &GridFn, d: usize) -> Option<f64> {
    let v = dual.values[d];
    let idx = dual.index(d);
    let y = dual.point(d);
    let mut dot = 0.0;
    for axis in 0..dual.dims() {
        let h = dual.step(axis);
        let neighbour = |delta: isize| {
            let i = idx[axis] as isize + delta;
            if i < 0 || i as usize >= dual.res[axis] {
                return None;
            }
            let mut j = idx;
            j[axis] = i as usize;
            Some(dual.values[dual.flat(j)]).filter(|w| w.is_finite())
        };
        let g = match (neighbour(-1), neighbour(1)) {
            (Some(a), Some(b)) => (b - a) / (2.0 * h),
            (Some(a), None) => (v - a) / h,
            (None, Some(b)) => (b - v) / h,
            (None, None) => return None,
        };
        dot += g * y[axis];
    }
    Some(dot - v)
}
