//! Volume-preserving affine maps of the plane.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{AffineMax, GridFn};
use crate::error::{Error, Result};

/// `x -> M x + shift` with `det M = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnimodularMap {
    pub m: [[f64; 2]; 2],
    pub shift: [f64; 2],
}

impl UnimodularMap {
    pub fn new(m: [[f64; 2]; 2], shift: [f64; 2]) -> Result<Self> {
        let map = UnimodularMap { m, shift };
        if (map.det() - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("determinant {} is not 1", map.det())));
        }
        Ok(map)
    }

    pub fn identity() -> Self {
        UnimodularMap {
            m: [[1.0, 0.0], [0.0, 1.0]],
            shift: [0.0, 0.0],
        }
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn apply(&self, x: [f64; 2]) -> [f64; 2] {
        [
            self.m[0][0] * x[0] + self.m[0][1] * x[1] + self.shift[0],
            self.m[1][0] * x[0] + self.m[1][1] * x[1] + self.shift[1],
        ]
    }

    /// Uses the adjugate, which is the inverse when `det M = 1`.
    pub fn apply_inverse(&self, x: [f64; 2]) -> [f64; 2] {
        let d = [x[0] - self.shift[0], x[1] - self.shift[1]];
        [
            self.m[1][1] * d[0] - self.m[0][1] * d[1],
            -self.m[1][0] * d[0] + self.m[0][0] * d[1],
        ]
    }

    pub fn push_affine(&self, u: &AffineMax) -> Result<AffineMax> {
        u.push_forward(&self.m, &self.shift)
    }

    /// Backward-warps `u` to `x -> u(phi^{-1} x)` on the same box by
    /// bilinear interpolation. Nodes whose preimage leaves the box are
    /// `+inf`. The relevant support `{u <= level}` must map into the box,
    /// otherwise the result would be truncated: `SupportExceeded`.
    pub fn push_grid(&self, u: &GridFn, level: f64) -> Result<GridFn> {
        if u.dims() != 2 {
            return Err(Error::InvalidGrid("unimodular maps act on 2-D grids".into()));
        }
        if let Some(flat) = (0..u.len()).find(|&f| {
            u.values[f] <= level && {
                let p = u.point(f);
                !u.contains(&self.apply([p[0], p[1]]))
            }
        }) {
            return Err(Error::SupportExceeded(format!(
                "node {:?} with value {} leaves the box",
                u.point(flat),
                u.values[flat]
            )));
        }
        let values = (0..u.len())
            .into_par_iter()
            .map(|f| {
                let p = u.point(f);
                u.interpolate(&self.apply_inverse([p[0], p[1]]))
                    .unwrap_or(f64::INFINITY)
            })
            .collect();
        Ok(GridFn {
            values,
            convex: false,
            ..u.clone()
        })
    }
}

/// Random product of `shears` alternating upper/lower shears with entries
/// in `[-magnitude, magnitude]`, plus a shift in `[-shift, shift]^2`.
pub fn sample_unimodular(seed: u64, shears: usize, magnitude: f64, shift: f64) -> UnimodularMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = [[1.0, 0.0], [0.0, 1.0]];
    for i in 0..shears {
        let s: f64 = rng.gen_range(-magnitude..=magnitude);
        let e = if i % 2 == 0 {
            [[1.0, s], [0.0, 1.0]]
        } else {
            [[1.0, 0.0], [s, 1.0]]
        };
        m = [
            [
                e[0][0] * m[0][0] + e[0][1] * m[1][0],
                e[0][0] * m[0][1] + e[0][1] * m[1][1],
            ],
            [
                e[1][0] * m[0][0] + e[1][1] * m[1][0],
                e[1][0] * m[0][1] + e[1][1] * m[1][1],
            ],
        ];
    }
    let t = if shift > 0.0 {
        [rng.gen_range(-shift..=shift), rng.gen_range(-shift..=shift)]
    } else {
        [0.0, 0.0]
    };
    UnimodularMap { m, shift: t }
}
