use proptest::prelude::*;

use convexval::embed::{compose_gk, gk_eval, gk_inverse, Gk};
use convexval::grid::{llt_onto, GridFn};
use convexval::profile::{pl_max, pl_min};
use convexval::radial::{z2_dual_exact, z2_exact, RadialFn};
use convexval::valuation::{evaluate_z, ZetaTriple};
use convexval::{Bound, Error, PLProfile, Rational, Scalar, ScalarZeta};

fn q(n: i64, d: i64) -> Rational {
    Rational::new(i128::from(n), i128::from(d))
}

/// Exact profile on a quarter-integer lattice: radii and slopes grow by
/// positive multiples of 1/4.
fn rational_profile() -> impl Strategy<Value = PLProfile<Rational>> {
    (
        -12i64..12,
        0i64..4,
        prop::collection::vec((1i64..8, 1i64..8), 0..5),
        prop::option::of(1i64..8),
    )
        .prop_map(|(base, first, steps, extra)| {
            let mut radius = 0;
            let mut slope = first;
            let mut pairs = vec![(q(0, 1), q(slope, 4))];
            for (dr, ds) in steps {
                radius += dr;
                slope += ds;
                pairs.push((q(radius, 4), q(slope, 4)));
            }
            let bound = extra.map_or(Bound::Unbounded, |e| Bound::At(q(radius + e, 4)));
            PLProfile::new(q(base, 4), &pairs, bound).unwrap()
        })
}

/// Float profile cut off past the level 2.5, so that weights vanishing
/// from 2 on have compact support on both sides.
fn bounded_profile() -> impl Strategy<Value = PLProfile> {
    (0.0f64..1.0, 0.2f64..1.0, prop::collection::vec((0.25f64..1.5, 0.1f64..1.5), 0..4), 0.5f64..3.0)
        .prop_map(|(base, first, steps, tail)| {
            let mut radius = 0.0;
            let mut slope = first;
            let mut pairs = vec![(0.0, slope)];
            for (dr, ds) in steps {
                radius += dr;
                slope += ds;
                pairs.push((radius, slope));
            }
            let open = PLProfile::new(base, &pairs, Bound::Unbounded).unwrap();
            let at = open.value_at(radius).unwrap();
            let reach = radius + ((2.5 - at) / slope).max(0.0);
            open.restrict(reach + tail).unwrap()
        })
}

fn triple() -> ZetaTriple {
    ZetaTriple::new(ScalarZeta::hat(2.0), ScalarZeta::exp_decay(1.0), ScalarZeta::hat(2.0))
}

proptest! {
    #[test]
    fn conjugation_is_an_involution(p in rational_profile()) {
        prop_assert!(p.conjugate().conjugate().canonical_eq(&p));
    }

    #[test]
    fn fenchel_young(p in rational_profile(), r in 0i64..64, s in 0i64..64) {
        let (r, s) = (q(r, 4), q(s, 4));
        if let (Some(a), Some(b)) = (p.value_at(r), p.conjugate().value_at(s)) {
            prop_assert!(a + b >= r * s);
        }
    }

    #[test]
    fn conjugate_of_meet_is_join_of_conjugates(p in rational_profile(), w in rational_profile()) {
        match pl_min(&p, &w) {
            Ok(m) => {
                let join = pl_max(&p.conjugate(), &w.conjugate()).unwrap();
                prop_assert!(m.conjugate().canonical_eq(&join));
            }
            Err(Error::NotConvex { .. }) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn conjugate_of_join_is_below_meet_of_conjugates(p in rational_profile(), w in rational_profile(), s in 0i64..64) {
        let j = pl_max(&p, &w).unwrap().conjugate();
        let s = q(s, 4);
        if let (Some(a), Some(b), Some(c)) = (j.value_at(s), p.conjugate().value_at(s), w.conjugate().value_at(s)) {
            prop_assert!(a <= std::cmp::min(b, c));
        }
    }

    #[test]
    fn gk_scalar_properties(k in 1u32..6, a in -50.0f64..5000.0, b in -50.0f64..5000.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(gk_eval(k, lo) <= gk_eval(k, hi));
        prop_assert!(gk_eval(k, a) >= a);
        let back = gk_inverse(k, gk_eval(k, a));
        prop_assert!((back - a).abs() <= 1e-9 * a.abs().max(1.0));
        let g = Gk::new(k).unwrap();
        let mid = 0.5 * (lo + hi);
        prop_assert!(2.0 * g.eval(mid) <= g.eval(lo) + g.eval(hi) + 1e-9 * hi.abs().max(1.0));
    }

    #[test]
    fn gk_commutes_with_join(p in rational_profile(), w in rational_profile(), k in 1u32..4) {
        let cut = |x: PLProfile<Rational>| match x.bound() {
            Bound::At(_) => x,
            Bound::Unbounded => x.restrict(q(40, 1)).unwrap(),
        };
        let (p, w) = (cut(p), cut(w));
        let lhs = compose_gk(k, &pl_max(&p, &w).unwrap()).unwrap();
        let rhs = pl_max(&compose_gk(k, &p).unwrap(), &compose_gk(k, &w).unwrap()).unwrap();
        prop_assert!(lhs.canonical_eq(&rhs));
    }

    #[test]
    fn dual_polar_volume_is_polar_volume_of_conjugate(p in bounded_profile(), n in 1usize..4, t in 0.5f64..4.0) {
        let u = RadialFn::new(p, n).unwrap();
        let zeta = ScalarZeta::hat(t);
        let direct = z2_dual_exact(&zeta, &u).unwrap();
        let via_conjugate = z2_exact(&zeta, &u.conjugate()).unwrap();
        prop_assert!((direct - via_conjugate).abs() <= 1e-10 * direct.abs().max(1.0));
    }

    #[test]
    fn homogeneity_of_components(p in bounded_profile(), n in 1usize..4, lambda in 0.25f64..4.0) {
        let u = RadialFn::new(p, n).unwrap();
        let base = evaluate_z(&triple(), &u, 1e-13).unwrap();
        let s = evaluate_z(&triple(), &u.scaled(lambda).unwrap(), 1e-13).unwrap();
        let ln = lambda.powi(n as i32);
        prop_assert_eq!(s.z0, base.z0);
        prop_assert!((s.z1 - ln * base.z1).abs() <= 1e-9 * (ln * base.z1).max(1.0));
        prop_assert!((s.z2 - base.z2 / ln).abs() <= 1e-12 * (base.z2 / ln).max(1.0));
    }

    #[test]
    fn grid_conjugate_matches_exact_profile(p in rational_profile(), lo in -3.0f64..0.0, hi in 0.0f64..3.0) {
        // Kinks sit on the quarter-integer nodes, so the discrete conjugate
        // of the restricted even function is exact.
        let r = match p.bound() {
            Bound::At(d) => d,
            Bound::Unbounded => p.knots().unwrap().last().unwrap().radius + q(1, 1),
        };
        let p = p.restrict(r).unwrap();
        let pf = p.to_f64().unwrap();
        let rf = r.to_f64();
        let nodes = (r * q(8, 1)).to_integer() as usize + 1;
        let g = GridFn::sample_square(1, -rf, rf, nodes, |x| pf.value_at(x[0].abs()).unwrap()).unwrap();
        let c = llt_onto(&g, &[lo], &[hi], &[33]);
        let exact = p.conjugate().to_f64().unwrap();
        for i in 0..c.grid.len() {
            let y = c.grid.point(i)[0];
            let want = exact.value_at(y.abs()).unwrap();
            prop_assert!((c.grid.values[i] - want).abs() <= 1e-9 * want.abs().max(1.0), "y {} got {} want {}", y, c.grid.values[i], want);
        }
    }
}
