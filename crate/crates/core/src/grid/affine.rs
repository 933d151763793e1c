//! Finite maxima of affine functions restricted to polyhedra.

use serde::{Deserialize, Serialize};

use super::GridFn;
use crate::error::{Error, Result};

/// `x -> a . x + c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub a: Vec<f64>,
    pub c: f64,
}

/// `{x : n . x <= b}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub n: Vec<f64>,
    pub b: f64,
}

/// `u(x) = max_i (a_i . x + c_i)` on the polyhedron cut out by the
/// constraints, `+inf` off it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMax {
    pub dims: usize,
    pub pieces: Vec<Piece>,
    #[serde(default)]
    pub constraints: Vec<Halfspace>,
}

const FEAS_TOL: f64 = 1e-12;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl AffineMax {
    pub fn new(dims: usize, pieces: Vec<Piece>, constraints: Vec<Halfspace>) -> Result<Self> {
        if !(1..=2).contains(&dims) {
            return Err(Error::Domain("affine maxima are 1- or 2-dimensional".into()));
        }
        if pieces.is_empty() {
            return Err(Error::Empty);
        }
        let shapes_ok = pieces.iter().all(|p| p.a.len() == dims && p.c.is_finite())
            && constraints.iter().all(|h| h.n.len() == dims && h.b.is_finite());
        if !shapes_ok {
            return Err(Error::Domain("piece or constraint has the wrong dimension".into()));
        }
        Ok(AffineMax {
            dims,
            pieces,
            constraints,
        })
    }

    pub fn feasible(&self, x: &[f64]) -> bool {
        self.constraints
            .iter()
            .all(|h| dot(&h.n, x) <= h.b + FEAS_TOL * (1.0 + h.b.abs()))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        if !self.feasible(x) {
            return f64::INFINITY;
        }
        self.pieces
            .iter()
            .map(|p| dot(&p.a, x) + p.c)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Coercive iff the piece slopes together with the constraint normals
    /// positively span the space, i.e. no direction `d != 0` has
    /// `a_i . d <= 0` and `n_j . d <= 0` for all `i, j`.
    pub fn is_coercive(&self) -> bool {
        let gens: Vec<&[f64]> = self
            .pieces
            .iter()
            .map(|p| p.a.as_slice())
            .chain(self.constraints.iter().map(|h| h.n.as_slice()))
            .filter(|g| g.iter().any(|c| *c != 0.0))
            .collect();
        if self.dims == 1 {
            return gens.iter().any(|g| g[0] > 0.0) && gens.iter().any(|g| g[0] < 0.0);
        }
        let mut angles: Vec<f64> = gens.iter().map(|g| g[1].atan2(g[0])).collect();
        if angles.len() < 3 {
            return false;
        }
        angles.sort_by(|a, b| a.total_cmp(b));
        let wrap = angles[0] + std::f64::consts::TAU - angles[angles.len() - 1];
        let max_gap = angles
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(wrap, f64::max);
        max_gap < std::f64::consts::PI - 1e-12
    }

    /// `x -> u(M^{-1}(x - t))`.
    pub fn push_forward(&self, m: &[[f64; 2]; 2], t: &[f64; 2]) -> Result<AffineMax> {
        if self.dims != 2 {
            return Err(Error::Domain("push_forward needs a 2-D function".into()));
        }
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::Domain("singular map".into()));
        }
        // a . M^{-1}(x - t) = (M^{-T} a) . x - (M^{-T} a) . t
        let inv_t = |a: &[f64]| -> Vec<f64> {
            vec![
                (m[1][1] * a[0] - m[1][0] * a[1]) / det,
                (-m[0][1] * a[0] + m[0][0] * a[1]) / det,
            ]
        };
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let a = inv_t(&p.a);
                let c = p.c - dot(&a, t);
                Piece { a, c }
            })
            .collect();
        let constraints = self
            .constraints
            .iter()
            .map(|h| {
                let n = inv_t(&h.n);
                let b = h.b + dot(&n, t);
                Halfspace { n, b }
            })
            .collect();
        AffineMax::new(2, pieces, constraints)
    }

    /// `x -> u(x - t)`.
    pub fn translate(&self, t: &[f64]) -> AffineMax {
        AffineMax {
            dims: self.dims,
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    a: p.a.clone(),
                    c: p.c - dot(&p.a, t),
                })
                .collect(),
            constraints: self
                .constraints
                .iter()
                .map(|h| Halfspace {
                    n: h.n.clone(),
                    b: h.b + dot(&h.n, t),
                })
                .collect(),
        }
    }

    /// Samples `f(u(x))` on a square box.
    pub fn sample_with(
        &self,
        lo: f64,
        hi: f64,
        res: usize,
        f: impl Fn(f64) -> f64 + Sync,
    ) -> Result<GridFn> {
        let mut g = GridFn::sample_square(self.dims, lo, hi, res, |x| {
            let v = self.eval(x);
            if v.is_finite() {
                f(v)
            } else {
                v
            }
        })?;
        g.convex = true;
        Ok(g)
    }

    pub fn sample(&self, lo: f64, hi: f64, res: usize) -> Result<GridFn> {
        self.sample_with(lo, hi, res, |v| v)
    }
}

/// Gauge `x -> min{s >= 0 : x in sK}` of the polytope
/// `K = {x : n_i . x <= h_i}`. Requires `h_i >= 0` (origin in `K`); facets
/// through the origin become domain constraints.
pub fn gauge_from_halfspaces(dims: usize, facets: &[Halfspace]) -> Result<AffineMax> {
    if facets.is_empty() {
        return Err(Error::Empty);
    }
    let mut pieces = vec![Piece {
        a: vec![0.0; dims],
        c: 0.0,
    }];
    let mut constraints = Vec::new();
    for f in facets {
        if f.b < 0.0 {
            return Err(Error::Rejected(format!(
                "origin outside the polytope (offset {})",
                f.b
            )));
        }
        if f.b == 0.0 {
            constraints.push(Halfspace {
                n: f.n.clone(),
                b: 0.0,
            });
        } else {
            pieces.push(Piece {
                a: f.n.iter().map(|c| c / f.b).collect(),
                c: 0.0,
            });
        }
    }
    AffineMax::new(dims, pieces, constraints)
}

/// Gauge of the convex hull of planar vertices.
pub fn gauge_from_vertices(vertices: &[[f64; 2]]) -> Result<AffineMax> {
    let hull = super::geometry::convex_hull(vertices);
    if hull.len() < 3 {
        return Err(Error::Rejected("polytope has empty interior".into()));
    }
    let facets: Vec<Halfspace> = (0..hull.len())
        .map(|i| {
            let p = hull[i];
            let q = hull[(i + 1) % hull.len()];
            // Counter-clockwise hull: outward normal is the edge turned right.
            let n = vec![q[1] - p[1], p[0] - q[0]];
            let b = n[0] * p[0] + n[1] * p[1];
            Halfspace { n, b }
        })
        .collect();
    // Snap offsets that vanish up to rounding so the origin on a facet is kept.
    let scale = facets
        .iter()
        .map(|f| f.n[0].abs() + f.n[1].abs())
        .fold(0.0, f64::max);
    let facets: Vec<Halfspace> = facets
        .into_iter()
        .map(|f| Halfspace {
            b: if f.b.abs() <= 1e-14 * scale { 0.0 } else { f.b },
            ..f
        })
        .collect();
    gauge_from_halfspaces(2, &facets)
}

/// Builds `u = w v l1` and `v = w v l2` when the bumps `{l1 > w}` and
/// `{l2 > w}` are disjoint, so that `u ^ v = w` and `u v v = w v l1 v l2`
/// are convex. Overlap (up to a relative margin) is `Rejected`.
pub fn pair_generator_disjoint_bump(
    w: &AffineMax,
    l1: &Piece,
    l2: &Piece,
) -> Result<(AffineMax, AffineMax)> {
    if l1.a.len() != w.dims || l2.a.len() != w.dims {
        return Err(Error::Domain("bump dimension differs from the base".into()));
    }
    let scale = w
        .pieces
        .iter()
        .chain([l1, l2])
        .map(|p| p.c.abs())
        .fold(1.0, f64::max);
    let eps = 1e-12 * scale;
    // Points where both bumps exceed every piece of w by eps.
    let mut cuts: Vec<(Vec<f64>, f64)> = Vec::new();
    for l in [l1, l2] {
        for p in &w.pieces {
            let n = p.a.iter().zip(&l.a).map(|(x, y)| x - y).collect();
            cuts.push((n, l.c - p.c - eps));
        }
    }
    cuts.extend(w.constraints.iter().map(|h| (h.n.clone(), h.b)));
    if super::geometry::polyhedron_nonempty(w.dims, &cuts) {
        return Err(Error::Rejected("bump regions overlap".into()));
    }
    let with = |l: &Piece| {
        let mut pieces = w.pieces.clone();
        pieces.push(l.clone());
        AffineMax::new(w.dims, pieces, w.constraints.clone())
    };
    Ok((with(l1)?, with(l2)?))
}

/// Pointwise `max` of two affine maxima on the intersection of domains.
pub fn affine_join(u: &AffineMax, v: &AffineMax) -> Result<AffineMax> {
    if u.dims != v.dims {
        return Err(Error::Domain("dimension mismatch".into()));
    }
    let pieces = u.pieces.iter().chain(&v.pieces).cloned().collect();
    let constraints = u.constraints.iter().chain(&v.constraints).cloned().collect();
    AffineMax::new(u.dims, pieces, constraints)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_gauge() -> AffineMax {
        gauge_from_vertices(&[[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]).unwrap()
    }

    #[test]
    fn square_gauge_is_sup_norm() {
        let g = square_gauge();
        for x in [[0.3, -0.7], [2.0, 1.0], [-0.5, 0.5], [0.0, 0.0]] {
            assert!((g.eval(&x) - x[0].abs().max(x[1].abs())).abs() < 1e-15);
        }
        assert!(g.is_coercive());
    }

    #[test]
    fn origin_on_boundary_gives_constraint() {
        let g = gauge_from_vertices(&[[0.0, -1.0], [1.0, -1.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        assert_eq!(g.constraints.len(), 1);
        assert_eq!(g.eval(&[-0.1, 0.0]), f64::INFINITY);
        assert!((g.eval(&[0.5, 0.75]) - 0.75).abs() < 1e-15);
        assert!(g.is_coercive());
    }

    #[test]
    fn origin_outside_rejected() {
        assert!(matches!(
            gauge_from_vertices(&[[1.0, 0.0], [2.0, 0.0], [1.0, 1.0]]),
            Err(Error::Rejected(_))
        ));
    }

    #[test]
    fn coercivity() {
        let flat = AffineMax::new(
            2,
            vec![Piece { a: vec![1.0, 0.0], c: 0.0 }, Piece { a: vec![-1.0, 0.0], c: 0.0 }],
            vec![],
        )
        .unwrap();
        assert!(!flat.is_coercive());
        let boxed = AffineMax::new(
            2,
            flat.pieces.clone(),
            vec![Halfspace { n: vec![0.0, 1.0], b: 1.0 }, Halfspace { n: vec![0.0, -1.0], b: 1.0 }],
        )
        .unwrap();
        assert!(boxed.is_coercive());
        let one_d = AffineMax::new(1, vec![Piece { a: vec![2.0], c: 0.0 }], vec![]).unwrap();
        assert!(!one_d.is_coercive());
    }

    #[test]
    fn push_forward_matches_pointwise() {
        let u = square_gauge();
        let m = [[1.0, 0.5], [0.0, 1.0]];
        let t = [0.25, -0.5];
        let v = u.push_forward(&m, &t).unwrap();
        for x in [[0.1, 0.2], [-1.0, 3.0], [2.5, -0.5]] {
            // Preimage y with M y + t = x.
            let y1 = x[1] - t[1];
            let y0 = x[0] - t[0] - 0.5 * y1;
            assert!((v.eval(&x) - u.eval(&[y0, y1])).abs() < 1e-14);
        }
    }

    #[test]
    fn one_d_pair_from_abs() {
        let w = AffineMax::new(1, vec![Piece { a: vec![1.0], c: 0.0 }, Piece { a: vec![-1.0], c: 0.0 }], vec![])
            .unwrap();
        let (u, v) = pair_generator_disjoint_bump(
            &w,
            &Piece { a: vec![-2.0], c: 0.0 },
            &Piece { a: vec![2.0], c: 0.0 },
        )
        .unwrap();
        for x in [-1.5, -0.2, 0.0, 0.7, 3.0] {
            assert_eq!(u.eval(&[x]), (-2.0 * x).max(x));
            assert_eq!(v.eval(&[x]), (-x).max(2.0 * x));
            assert_eq!(u.eval(&[x]).min(v.eval(&[x])), w.eval(&[x]));
        }
    }

    #[test]
    fn overlapping_bumps_rejected() {
        let w = square_gauge();
        let r = pair_generator_disjoint_bump(
            &w,
            &Piece { a: vec![0.0, 0.0], c: 0.5 },
            &Piece { a: vec![0.5, 0.0], c: 0.4 },
        );
        assert!(matches!(r, Err(Error::Rejected(_))));
    }

    #[test]
    fn translate_shifts_graph() {
        let u = square_gauge();
        let v = u.translate(&[1.0, 0.0]);
        assert!((v.eval(&[1.0, 0.0])).abs() < 1e-15);
        assert!((v.eval(&[0.0, 0.0]) - 1.0).abs() < 1e-15);
    }
}
