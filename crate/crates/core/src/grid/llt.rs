//! Linear-time Legendre transform on uniform grids.
//!
//! The discrete conjugate is `max_i (x_i y - f_i)` over finite samples,
//! computed from the lower hull with a two-pointer sweep. In 2-D the
//! transform factorizes into row passes and column passes. Dual points
//! beyond the hull slopes take their maximizer on the box boundary.

use rayon::prelude::*;

use super::GridFn;
use crate::error::{Error, Result};

/// Dual box selection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DualRange {
    /// Slope range of the data plus one dual step on each side.
    Auto,
    /// Same interval on every axis.
    Fixed { lo: f64, hi: f64 },
}

#[derive(Clone, Debug)]
pub struct Conjugate {
    pub grid: GridFn,
    /// Flat primal index of the maximizer per dual node (`usize::MAX`
    /// where the conjugate is `+inf`). Ties go to the lexicographically
    /// smallest multi-index.
    pub argmax: Vec<usize>,
}

const NONE: usize = usize::MAX;

/// Per-axis `(min, max)` of finite differences between adjacent finite
/// samples. Axes with no finite pair report `(0, 0)`.
pub fn slope_range(u: &GridFn) -> Vec<(f64, f64)> {
    (0..u.dims())
        .map(|axis| {
            let h = u.step(axis);
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for flat in 0..u.len() {
                let idx = u.index(flat);
                if idx[axis] + 1 >= u.res[axis] {
                    continue;
                }
                let mut next = idx;
                next[axis] += 1;
                let (a, b) = (u.values[flat], u.values[u.flat(next)]);
                if a.is_finite() && b.is_finite() {
                    let s = (b - a) / h;
                    lo = lo.min(s);
                    hi = hi.max(s);
                }
            }
            if lo > hi {
                (0.0, 0.0)
            } else {
                (lo, hi)
            }
        })
        .collect()
}

/// Conjugate on a dual grid with the same resolution as `u`.
pub fn llt(u: &GridFn, range: DualRange) -> Result<Conjugate> {
    let slopes = slope_range(u);
    let mut lo = Vec::with_capacity(u.dims());
    let mut hi = Vec::with_capacity(u.dims());
    for (axis, &(s_lo, s_hi)) in slopes.iter().enumerate() {
        match range {
            DualRange::Auto => {
                let n = u.res[axis] as f64;
                let width = (s_hi - s_lo).max(1e-9);
                let margin = if n > 3.0 { width / (n - 3.0) } else { width };
                lo.push(s_lo - margin);
                hi.push(s_hi + margin);
            }
            DualRange::Fixed { lo: a, hi: b } => {
                if !(a < b) {
                    return Err(Error::InvalidGrid(format!("empty dual range {a}:{b}")));
                }
                let tol = 1e-9 * (1.0 + s_lo.abs().max(s_hi.abs()));
                if s_lo < a - tol || s_hi > b + tol {
                    return Err(Error::SlopeRangeExceeded {
                        lo: a,
                        hi: b,
                        need_lo: s_lo,
                        need_hi: s_hi,
                    });
                }
                lo.push(a);
                hi.push(b);
            }
        }
    }
    Ok(llt_onto(u, &lo, &hi, &u.res))
}

/// Conjugate evaluated on an arbitrary dual box, with no slope coverage check.
pub fn llt_onto(u: &GridFn, lo: &[f64], hi: &[f64], res: &[usize]) -> Conjugate {
    let dual = GridFn::new(lo.to_vec(), hi.to_vec(), res.to_vec(), vec![0.0; res.iter().product()])
        .expect("dual box shape");
    let mut out = vec![f64::INFINITY; dual.len()];
    let mut arg = vec![NONE; dual.len()];
    let axis = |g: &GridFn, a: usize| Axis {
        x0: g.lo[a],
        h: g.step(a),
        n: g.res[a],
        last: g.hi[a],
    };

    if u.dims() == 1 {
        conj_1d(axis(u, 0), &u.values, axis(&dual, 0), &mut out, &mut arg);
    } else {
        let (n0, n1) = (u.res[0], u.res[1]);
        let (m0, m1) = (res[0], res[1]);
        // Row pass: h(i0, j1) = sup_x2 (x2 y2 - u(x1, x2)).
        let mut rows = vec![0.0; n0 * m1];
        let mut row_arg = vec![NONE; n0 * m1];
        rows.par_chunks_mut(m1)
            .zip(row_arg.par_chunks_mut(m1))
            .enumerate()
            .for_each(|(i0, (r, a))| {
                // An all-infinite row comes back as -inf and drops out below.
                conj_1d(axis(u, 1), &u.values[i0 * n1..(i0 + 1) * n1], axis(&dual, 1), r, a);
            });
        // Column pass over y2: conjugate of x1 -> -h(x1, y2).
        let columns: Vec<(Vec<f64>, Vec<usize>)> = (0..m1)
            .into_par_iter()
            .map(|j1| {
                let g: Vec<f64> = (0..n0).map(|i0| -rows[i0 * m1 + j1]).collect();
                let mut col = vec![f64::INFINITY; m0];
                let mut col_arg = vec![NONE; m0];
                conj_1d(axis(u, 0), &g, axis(&dual, 0), &mut col, &mut col_arg);
                for a in col_arg.iter_mut().filter(|a| **a != NONE) {
                    *a = *a * n1 + row_arg[*a * m1 + j1];
                }
                (col, col_arg)
            })
            .collect();
        for (j1, (col, col_arg)) in columns.into_iter().enumerate() {
            for j0 in 0..m0 {
                out[j0 * m1 + j1] = col[j0];
                arg[j0 * m1 + j1] = col_arg[j0];
            }
        }
    }
    for v in out.iter_mut() {
        if *v == f64::NEG_INFINITY {
            // Only reachable for an all-infinite input; report as +inf dual.
            *v = f64::INFINITY;
        }
    }
    let mut grid = dual;
    grid.values = out;
    grid.convex = true;
    Conjugate { grid, argmax: arg }
}

/// Gradient of `u` at `x` via the conjugate: the maximizer of
/// `x . y - u*(y)` over the dual grid, lexicographically smallest on ties.
pub fn gradient_via_conjugate(u_star: &GridFn, u: &GridFn, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != u.dims() || !u.contains(x) {
        return Err(Error::Domain(format!("{x:?} lies outside the primal box")));
    }
    let mut best: Option<(f64, usize)> = None;
    for flat in 0..u_star.len() {
        let v = u_star.values[flat];
        if !v.is_finite() {
            continue;
        }
        let y = u_star.point(flat);
        let s: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() - v;
        if best.map_or(true, |(b, _)| s > b) {
            best = Some((s, flat));
        }
    }
    best.map(|(_, flat)| u_star.point(flat)).ok_or(Error::Empty)
}

#[derive(Clone, Copy)]
struct Axis {
    x0: f64,
    h: f64,
    n: usize,
    last: f64,
}

impl Axis {
    fn at(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.last
        } else {
            self.x0 + i as f64 * self.h
        }
    }
}

/// 1-D discrete conjugate. `out` is `-inf` when every sample is `+inf`.
fn conj_1d(x: Axis, f: &[f64], y: Axis, out: &mut [f64], arg: &mut [usize]) {
    let mut hull: Vec<usize> = Vec::new();
    for i in 0..f.len() {
        if !f[i].is_finite() {
            continue;
        }
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // Drop b when it lies on or above the chord a -> i.
            let lhs = (f[b] - f[a]) * (x.at(i) - x.at(a));
            let rhs = (f[i] - f[a]) * (x.at(b) - x.at(a));
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    if hull.is_empty() {
        out.fill(f64::NEG_INFINITY);
        arg.fill(NONE);
        return;
    }
    let slopes: Vec<f64> = hull
        .windows(2)
        .map(|w| (f[w[1]] - f[w[0]]) / (x.at(w[1]) - x.at(w[0])))
        .collect();
    let mut k = 0;
    for j in 0..y.n {
        let yj = y.at(j);
        while k < slopes.len() && slopes[k] < yj {
            k += 1;
        }
        let i = hull[k];
        out[j] = x.at(i) * yj - f[i];
        arg[j] = i;
    }
}
