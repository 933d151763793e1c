//! Sampled convex functions on boxes in `R^1` and `R^2`.
//!
//! Values are stored row-major (last axis fastest) with `f64::INFINITY`
//! standing for `+inf`; the I/O layer maps it to a finite sentinel.

mod affine;
mod geometry;
pub mod io;
mod llt;
mod numeric;
mod transform;

pub use affine::{
    affine_join, gauge_from_halfspaces, gauge_from_vertices, pair_generator_disjoint_bump, AffineMax, Halfspace,
    Piece,
};
pub use geometry::{
    convex_hull, hausdorff, hausdorff_sublevel, point_polygon_distance, Polygon, Sublevel,
    SublevelSource,
};
pub use llt::{gradient_via_conjugate, llt, llt_onto, slope_range, Conjugate, DualRange};
pub use numeric::{z_numeric, ZNumeric};
pub use transform::{sample_unimodular, UnimodularMap};

use rayon::prelude::*;

use crate::embed::Gk;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct GridFn {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// Points per axis, endpoints included.
    pub res: Vec<usize>,
    pub values: Vec<f64>,
    /// Set by constructors that produce convex data.
    pub convex: bool,
}

impl GridFn {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, res: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        let dims = lo.len();
        if !(1..=2).contains(&dims) || hi.len() != dims || res.len() != dims {
            return Err(Error::InvalidGrid("grids are 1- or 2-dimensional".into()));
        }
        if res.iter().any(|&r| r < 2) {
            return Err(Error::InvalidGrid("need at least two points per axis".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::InvalidGrid("box bounds must be finite with lo < hi".into()));
        }
        if values.len() != res.iter().product::<usize>() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                res.iter().product::<usize>(),
                values.len()
            )));
        }
        if values.iter().any(|v| v.is_nan() || *v == f64::NEG_INFINITY) {
            return Err(Error::InvalidGrid("values must be finite or +inf".into()));
        }
        Ok(GridFn {
            lo,
            hi,
            res,
            values,
            convex: false,
        })
    }

    /// Samples `f` at every node, in parallel.
    pub fn sample(
        lo: &[f64],
        hi: &[f64],
        res: &[usize],
        f: impl Fn(&[f64]) -> f64 + Sync,
    ) -> Result<Self> {
        let shape = GridFn::new(lo.to_vec(), hi.to_vec(), res.to_vec(), vec![0.0; res.iter().product()])?;
        let values: Vec<f64> = (0..shape.len())
            .into_par_iter()
            .map(|i| f(&shape.point(i)))
            .collect();
        GridFn::new(lo.to_vec(), hi.to_vec(), res.to_vec(), values)
    }

    /// Square box `[lo, hi]^dims` with `res` points per axis.
    pub fn sample_square(
        dims: usize,
        lo: f64,
        hi: f64,
        res: usize,
        f: impl Fn(&[f64]) -> f64 + Sync,
    ) -> Result<Self> {
        GridFn::sample(&vec![lo; dims], &vec![hi; dims], &vec![res; dims], f)
    }

    pub fn dims(&self) -> usize {
        self.lo.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn step(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / (self.res[axis] - 1) as f64
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        if i + 1 == self.res[axis] {
            self.hi[axis]
        } else {
            self.lo[axis] + i as f64 * self.step(axis)
        }
    }

    /// Multi-index of a flat index.
    pub fn index(&self, flat: usize) -> [usize; 2] {
        match self.dims() {
            1 => [flat, 0],
            _ => [flat / self.res[1], flat % self.res[1]],
        }
    }

    pub fn flat(&self, i: [usize; 2]) -> usize {
        match self.dims() {
            1 => i[0],
            _ => i[0] * self.res[1] + i[1],
        }
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        let idx = self.index(flat);
        (0..self.dims()).map(|a| self.coord(a, idx[a])).collect()
    }

    /// Node on the boundary of the box.
    pub fn on_boundary(&self, flat: usize) -> bool {
        let idx = self.index(flat);
        (0..self.dims()).any(|a| idx[a] == 0 || idx[a] + 1 == self.res[a])
    }

    /// Trapezoid weight of a node (cell volume, halved per boundary axis).
    pub fn weight(&self, flat: usize) -> f64 {
        let idx = self.index(flat);
        (0..self.dims())
            .map(|a| {
                let h = self.step(a);
                if idx[a] == 0 || idx[a] + 1 == self.res[a] {
                    0.5 * h
                } else {
                    h
                }
            })
            .product()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .enumerate()
            .all(|(a, &c)| c >= self.lo[a] - 1e-12 && c <= self.hi[a] + 1e-12)
    }

    /// Multilinear interpolation; `None` outside the box, `+inf` if any
    /// contributing node is `+inf`.
    pub fn interpolate(&self, x: &[f64]) -> Option<f64> {
        if !self.contains(x) {
            return None;
        }
        let mut base = [0usize; 2];
        let mut frac = [0.0f64; 2];
        for a in 0..self.dims() {
            let t = ((x[a] - self.lo[a]) / self.step(a)).clamp(0.0, (self.res[a] - 1) as f64);
            let i = (t.floor() as usize).min(self.res[a] - 2);
            base[a] = i;
            frac[a] = t - i as f64;
        }
        let corners: &[[usize; 2]] = if self.dims() == 1 {
            &[[0, 0], [1, 0]]
        } else {
            &[[0, 0], [0, 1], [1, 0], [1, 1]]
        };
        let mut acc = 0.0;
        for c in corners {
            let w: f64 = (0..self.dims())
                .map(|a| if c[a] == 1 { frac[a] } else { 1.0 - frac[a] })
                .product();
            if w == 0.0 {
                continue;
            }
            let v = self.values[self.flat([base[0] + c[0], base[1] + c[1]])];
            if v == f64::INFINITY {
                return Some(f64::INFINITY);
            }
            acc += w * v;
        }
        Some(acc)
    }

    /// Minimum over finite samples.
    pub fn min_value(&self) -> Option<f64> {
        self.values
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .min_by(|a, b| a.total_cmp(b))
    }

    /// Midpoint convexity along every axis and (in 2-D) both diagonals,
    /// within `tol`, on finite triples.
    pub fn is_midpoint_convex(&self, tol: f64) -> bool {
        let dirs: &[[isize; 2]] = if self.dims() == 1 {
            &[[1, 0]]
        } else {
            &[[1, 0], [0, 1], [1, 1], [1, -1]]
        };
        (0..self.len()).into_par_iter().all(|flat| {
            let [i, j] = self.index(flat);
            dirs.iter().all(|d| {
                let step = |s: isize| -> Option<f64> {
                    let a = i as isize + s * d[0];
                    let b = j as isize + s * d[1];
                    let in_range = a >= 0
                        && (a as usize) < self.res[0]
                        && (self.dims() == 1 || (b >= 0 && (b as usize) < self.res[1]));
                    in_range.then(|| self.values[self.flat([a as usize, b.max(0) as usize])])
                };
                match (step(-1), step(1)) {
                    (Some(l), Some(r)) if l.is_finite() && r.is_finite() => {
                        let m = self.values[flat];
                        m.is_finite() && 2.0 * m <= l + r + tol * (1.0 + m.abs())
                    }
                    _ => true,
                }
            })
        })
    }

    /// Pointwise map of finite values.
    pub fn map(&self, f: impl Fn(f64) -> f64 + Sync) -> GridFn {
        let values = self
            .values
            .par_iter()
            .map(|&v| if v.is_finite() { f(v) } else { v })
            .collect();
        GridFn {
            values,
            ..self.clone()
        }
    }

    /// `g_k` applied to every finite sample.
    pub fn compose_gk(&self, k: u32) -> Result<GridFn> {
        let gk = Gk::new(k)?;
        Ok(self.map(|v| gk.eval(v)))
    }

    /// Maximum absolute difference over nodes finite in both grids, or
    /// `None` if the grids differ in shape or in their `+inf` pattern.
    pub fn max_abs_diff(&self, other: &GridFn) -> Option<f64> {
        if self.res != other.res || self.lo != other.lo || self.hi != other.hi {
            return None;
        }
        let mut worst = 0.0_f64;
        for (a, b) in self.values.iter().zip(&other.values) {
            match (a.is_finite(), b.is_finite()) {
                (true, true) => worst = worst.max((a - b).abs()),
                (false, false) => {}
                _ => return None,
            }
        }
        Some(worst)
    }
}
