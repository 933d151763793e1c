//! Planar convex polygons, sublevel sets and Hausdorff distances.

use super::{AffineMax, GridFn};
use crate::error::{Error, Result};

/// Counter-clockwise vertex list of a convex polygon.
pub type Polygon = Vec<[f64; 2]>;

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain; collinear points are dropped.
pub fn convex_hull(points: &[[f64; 2]]) -> Polygon {
    let mut pts: Vec<[f64; 2]> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0)
    };
    ((p[0] - a[0] - t * d[0]).powi(2) + (p[1] - a[1] - t * d[1]).powi(2)).sqrt()
}

/// Euclidean distance from `p` to a convex polygon (0 inside).
pub fn point_polygon_distance(p: [f64; 2], poly: &[[f64; 2]]) -> f64 {
    match poly.len() {
        0 => f64::INFINITY,
        1 => segment_distance(p, poly[0], poly[0]),
        2 => segment_distance(p, poly[0], poly[1]),
        n => {
            let inside = (0..n).all(|i| cross(poly[i], poly[(i + 1) % n], p) >= 0.0);
            if inside {
                return 0.0;
            }
            (0..n)
                .map(|i| segment_distance(p, poly[i], poly[(i + 1) % n]))
                .fold(f64::INFINITY, f64::min)
        }
    }
}

/// Hausdorff distance of two convex polygons. The distance to a convex set
/// is convex, so the supremum over a polygon sits at a vertex.
pub fn hausdorff(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    let one = |p: &[[f64; 2]], q: &[[f64; 2]]| {
        p.iter()
            .map(|&v| point_polygon_distance(v, q))
            .fold(0.0, f64::max)
    };
    one(a, b).max(one(b, a))
}

/// A compact convex sublevel set.
#[derive(Clone, Debug, PartialEq)]
pub enum Sublevel {
    Interval(f64, f64),
    Polygon(Polygon),
}

impl Sublevel {
    pub fn distance(&self, other: &Sublevel) -> Result<f64> {
        match (self, other) {
            (Sublevel::Interval(a0, a1), Sublevel::Interval(b0, b1)) => {
                Ok((a0 - b0).abs().max((a1 - b1).abs()))
            }
            (Sublevel::Polygon(p), Sublevel::Polygon(q)) => Ok(hausdorff(p, q)),
            _ => Err(Error::Domain("sublevel sets of different dimension".into())),
        }
    }
}

/// Functions whose sublevel sets can be extracted.
#[derive(Clone, Copy, Debug)]
pub enum SublevelSource<'a> {
    Grid(&'a GridFn),
    Affine(&'a AffineMax),
}

impl SublevelSource<'_> {
    pub fn sublevel(&self, t: f64) -> Result<Sublevel> {
        match self {
            SublevelSource::Grid(g) => grid_sublevel(g, t),
            SublevelSource::Affine(u) => affine_sublevel(u, t),
        }
    }
}

/// Hausdorff distance between `{u <= t}` and `{v <= t}`.
pub fn hausdorff_sublevel(u: SublevelSource, v: SublevelSource, t: f64) -> Result<f64> {
    u.sublevel(t)?.distance(&v.sublevel(t)?)
}

fn grid_sublevel(g: &GridFn, t: f64) -> Result<Sublevel> {
    let mut pts: Vec<[f64; 2]> = Vec::new();
    for flat in 0..g.len() {
        let v = g.values[flat];
        let p = g.point(flat);
        let here = [p[0], p.get(1).copied().unwrap_or(0.0)];
        if v <= t {
            pts.push(here);
        }
        // Linear crossings towards the next node along each axis.
        let idx = g.index(flat);
        for axis in 0..g.dims() {
            if idx[axis] + 1 >= g.res[axis] {
                continue;
            }
            let mut next = idx;
            next[axis] += 1;
            let w = g.values[g.flat(next)];
            if v.is_finite() && w.is_finite() && (v <= t) != (w <= t) {
                let s = (t - v) / (w - v);
                let mut x = here;
                x[axis] += s * g.step(axis);
                pts.push(x);
            }
        }
    }
    if pts.is_empty() {
        return Err(Error::Empty);
    }
    if g.dims() == 1 {
        let lo = pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
        return Ok(Sublevel::Interval(lo, hi));
    }
    Ok(Sublevel::Polygon(convex_hull(&pts)))
}

const CLIP_BOX: f64 = 1e6;

/// Sutherland-Hodgman clip of a convex polygon against `n . x <= b`.
fn clip(poly: &[[f64; 2]], n: &[f64], b: f64) -> Polygon {
    let side = |p: [f64; 2]| n[0] * p[0] + n[1] * p[1] - b;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        let (sp, sq) = (side(p), side(q));
        if sp <= 0.0 {
            out.push(p);
        }
        if (sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0) {
            let s = sp / (sp - sq);
            out.push([p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])]);
        }
    }
    out
}

/// Whether `{x : n_i . x <= b_i for all i}` meets the clipping box.
pub(super) fn polyhedron_nonempty(dims: usize, cuts: &[(Vec<f64>, f64)]) -> bool {
    if dims == 1 {
        let (mut lo, mut hi) = (-CLIP_BOX, CLIP_BOX);
        for (a, b) in cuts {
            if a[0] > 0.0 {
                hi = hi.min(b / a[0]);
            } else if a[0] < 0.0 {
                lo = lo.max(b / a[0]);
            } else if *b < 0.0 {
                return false;
            }
        }
        return lo <= hi;
    }
    let mut poly: Polygon = vec![
        [-CLIP_BOX, -CLIP_BOX],
        [CLIP_BOX, -CLIP_BOX],
        [CLIP_BOX, CLIP_BOX],
        [-CLIP_BOX, CLIP_BOX],
    ];
    for (a, b) in cuts {
        poly = clip(&poly, a, *b);
        if poly.is_empty() {
            return false;
        }
    }
    true
}

fn affine_sublevel(u: &AffineMax, t: f64) -> Result<Sublevel> {
    let cuts = u
        .pieces
        .iter()
        .map(|p| (p.a.as_slice(), t - p.c))
        .chain(u.constraints.iter().map(|h| (h.n.as_slice(), h.b)));
    if u.dims == 1 {
        let (mut lo, mut hi) = (-CLIP_BOX, CLIP_BOX);
        for (a, b) in cuts {
            if a[0] > 0.0 {
                hi = hi.min(b / a[0]);
            } else if a[0] < 0.0 {
                lo = lo.max(b / a[0]);
            } else if b < 0.0 {
                return Err(Error::Empty);
            }
        }
        if lo > hi {
            return Err(Error::Empty);
        }
        if lo <= -CLIP_BOX || hi >= CLIP_BOX {
            return Err(Error::Unbounded(format!("sublevel set at {t}")));
        }
        return Ok(Sublevel::Interval(lo, hi));
    }
    let cuts: Vec<(&[f64], f64)> = cuts.collect();
    let clip_all = |half: f64| -> Result<Polygon> {
        let mut poly: Polygon = vec![[-half, -half], [half, -half], [half, half], [-half, half]];
        for &(a, b) in &cuts {
            poly = clip(&poly, a, b);
            if poly.is_empty() {
                return Err(Error::Empty);
            }
        }
        Ok(poly)
    };
    let poly = clip_all(CLIP_BOX)?;
    let reach = poly.iter().map(|p| p[0].abs().max(p[1].abs())).fold(0.0, f64::max);
    if reach >= CLIP_BOX * (1.0 - 1e-12) {
        return Err(Error::Unbounded(format!("sublevel set at {t}")));
    }
    // Vertices cut from the huge box carry its rounding; redo the clip
    // from a box of the set's own size.
    let poly = clip_all(2.0 * reach + 1.0)?;
    Ok(Sublevel::Polygon(convex_hull(&poly)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::gauge_from_vertices;

    #[test]
    fn hull_of_square_with_interior_points() {
        let h = convex_hull(&[[0.0, 0.0], [1.0, 0.0], [0.5, 0.5], [1.0, 1.0], [0.0, 1.0], [0.5, 0.0]]);
        assert_eq!(h, vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
    }

    #[test]
    fn hausdorff_of_nested_squares() {
        let a = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let b = vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [0.0, 1.0]];
        assert!((hausdorff(&a, &b) - 1.0).abs() < 1e-15);
        assert_eq!(hausdorff(&a, &a), 0.0);
    }

    #[test]
    fn affine_sublevel_of_gauge_is_scaled_body() {
        let g = gauge_from_vertices(&[[-1.0, -1.0], [2.0, -1.0], [2.0, 1.0], [-1.0, 1.0]]).unwrap();
        let Sublevel::Polygon(p) = SublevelSource::Affine(&g).sublevel(2.0).unwrap() else {
            panic!()
        };
        let expect = vec![[-2.0, -2.0], [4.0, -2.0], [4.0, 2.0], [-2.0, 2.0]];
        assert!(hausdorff(&p, &expect) < 1e-9);
    }

    #[test]
    fn grid_sublevel_approximates_disc() {
        let g = GridFn::sample_square(2, -2.0, 2.0, 201, |x| (x[0] * x[0] + x[1] * x[1]).sqrt()).unwrap();
        let Sublevel::Polygon(p) = SublevelSource::Grid(&g).sublevel(1.0).unwrap() else {
            panic!()
        };
        for v in &p {
            assert!(((v[0] * v[0] + v[1] * v[1]).sqrt() - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn unbounded_sublevel_reported() {
        let u = AffineMax::new(
            2,
            vec![crate::grid::Piece { a: vec![1.0, 0.0], c: 0.0 }],
            vec![],
        )
        .unwrap();
        assert!(matches!(
            SublevelSource::Affine(&u).sublevel(0.0),
            Err(Error::Unbounded(_))
        ));
    }
}
