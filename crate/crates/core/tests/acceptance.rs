//! Acceptance gate. Each criterion prints one PASS/FAIL line with its
//! measured residual and runtime; the test fails if any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use convexval::embed::{build_vlt, compose_gk, a_lm, factorial, m_t, sf, Gk};
use convexval::grid::GridFn;
use convexval::profile::{pl_max, pl_min, TailRule};
use convexval::radial::{z1, z2_exact, RadialFn};
use convexval::valuation::generate::{random_bump_pair, random_coercive_profile, random_rational_profile};
use convexval::valuation::suites::{involution_oracle, parabola_oracle, sl2_residuals, uzeta_partials};
use convexval::valuation::{
    check_valuation_identity_gk, closed_form_z1_1d, evaluate_z, evaluate_z_grid, growth_probe, discontinuity_example,
    ZetaTriple,
};
use convexval::grid::{AffineMax, Piece};
use convexval::{Bound, PLProfile, Rational, Scalar, ScalarZeta};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rat(n: i128) -> Rational {
    Rational::from_integer(n)
}

fn staircase() -> PLProfile {
    PLProfile::with_tail(
        PLProfile::linear(0.0, 1.0).unwrap(),
        TailRule::Linear {
            level_step: 1.0,
            slope_step: 1.0,
        },
    )
    .unwrap()
}

fn within(elapsed: Duration, budget_secs: f64) -> bool {
    elapsed.as_secs_f64() < budget_secs
}

fn c01_involution() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let failures = (0..1000)
        .filter(|_| {
            let p = random_rational_profile(&mut r);
            !p.conjugate().conjugate().canonical_eq(&p)
        })
        .count();
    let t = start.elapsed();
    outcome(
        failures == 0 && within(t, 1.0),
        format!("{failures} mismatches in 1000 profiles, {t:.2?} (budget 1 s)"),
    )
}

fn c02_llt_oracle() -> Outcome {
    let start = Instant::now();
    let (err, h) = parabola_oracle().unwrap();
    let (worst, quantization) = involution_oracle(65).unwrap();
    let t = start.elapsed();
    outcome(
        err <= 2.0 * h * h && worst <= 1e-9 + quantization && within(t, 1.0),
        format!(
            "parabola error {err:.3e} <= 2h^2 = {:.3e}; involution {worst:.3e} <= {:.3e}; {t:.2?}",
            2.0 * h * h,
            1e-9 + quantization
        ),
    )
}

fn c03_annulus_sum() -> Outcome {
    let start = Instant::now();
    let u = RadialFn::new(staircase(), 2).unwrap();
    let hat = ScalarZeta::hat(1.0);
    let exact = z2_exact(&hat, &u).unwrap();
    let g = GridFn::sample_square(2, -3.0, 3.0, 512, |x| u.eval_point(x)).unwrap();
    let zeta = ZetaTriple::new(ScalarZeta::zero(), ScalarZeta::zero(), hat);
    let grid = evaluate_z_grid(&zeta, &g, 1e-12).unwrap().z2;
    let rel = (grid - PI).abs() / PI;
    let t = start.elapsed();
    outcome(
        (exact - PI).abs() <= 1e-12 && rel <= 0.02 && within(t, 30.0),
        format!("exact {exact:.15} (pi), grid 512^2 {grid:.6} (rel {rel:.2e} <= 2%), {t:.2?}"),
    )
}

fn c04_z1_cone() -> Outcome {
    let zeta = ScalarZeta::exp_decay(1.0);
    let cone = RadialFn::new(PLProfile::linear(0.0, 1.0).unwrap(), 2).unwrap();
    let quad = z1(&zeta, &cone, 1e-9).unwrap();
    let g = GridFn::sample_square(2, -30.0, 30.0, 801, |x| x[0].hypot(x[1])).unwrap();
    let triple = ZetaTriple::new(ScalarZeta::zero(), zeta, ScalarZeta::zero());
    let grid = evaluate_z_grid(&triple, &g, 1e-9).unwrap().z1;
    let rel = (grid - 2.0 * PI).abs() / (2.0 * PI);
    outcome(
        (quad - 2.0 * PI).abs() <= 1e-6 && rel <= 0.01,
        format!("quadrature error {:.2e} <= 1e-6, grid rel {rel:.2e} <= 1%", (quad - 2.0 * PI).abs()),
    )
}

fn c05_homogeneity() -> Outcome {
    let triple = ZetaTriple::new(ScalarZeta::hat(2.0), ScalarZeta::exp_decay(1.0), ScalarZeta::hat(2.0));
    let p = PLProfile::new(0.0, &[(0.0, 1.0), (1.0, 2.0), (2.0, 3.0)], Bound::At(3.0)).unwrap();
    let mut worst: f64 = 0.0;
    for n in [2usize, 3] {
        let u = RadialFn::new(p.clone(), n).unwrap();
        let base = evaluate_z(&triple, &u, 1e-13).unwrap();
        for lambda in [0.5, 2.0, 3.0] {
            let s = evaluate_z(&triple, &u.scaled(lambda).unwrap(), 1e-13).unwrap();
            let ln = lambda.powi(n as i32);
            let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
            worst = worst
                .max(rel(s.z0, base.z0))
                .max(rel(s.z1, ln * base.z1))
                .max(rel(s.z2, base.z2 / ln));
        }
    }
    outcome(worst <= 1e-12, format!("max relative deviation {worst:.2e} <= 1e-12"))
}

fn c06_valuation_identity() -> Outcome {
    let zeta = ScalarZeta::exp_decay(1.0);
    let one_d = |pieces: &[(f64, f64)]| {
        AffineMax::new(1, pieces.iter().map(|&(a, c)| Piece { a: vec![a], c }).collect(), vec![]).unwrap()
    };
    let z = |pieces: &[(f64, f64)]| closed_form_z1_1d(&zeta, &one_d(pieces)).unwrap();
    let (u, v) = (z(&[(-2.0, 0.0), (1.0, 0.0)]), z(&[(-1.0, 0.0), (2.0, 0.0)]));
    let (meet, join) = (z(&[(-1.0, 0.0), (1.0, 0.0)]), z(&[(-2.0, 0.0), (2.0, 0.0)]));
    let closed = (u + v - meet - join).abs();

    let triple = ZetaTriple::new(ScalarZeta::hat(2.0), ScalarZeta::exp_decay(1.0), ScalarZeta::hat(2.0));
    let mut r = rng(6);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let (_, u, v) = random_bump_pair(&mut r);
        let k = r.gen_range(1..=3u32);
        worst = worst.max(check_valuation_identity_gk(&triple, &u, &v, 2, k, 1e-11).unwrap());
    }
    outcome(
        closed == 0.0 && worst <= 1e-9,
        format!("closed form {u} + {v} = {meet} + {join} (residual {closed}); 200 bump pairs max {worst:.2e} <= 1e-9"),
    )
}

fn c07_gk() -> Outcome {
    // Kink table: g_k(a_j) = sf_{k+j}, slope k+j+1 to the right.
    let mut table = true;
    for k in 1..=5u32 {
        let g = Gk::new(k).unwrap();
        let kf = rat(i128::from(factorial(k).unwrap()));
        for j in 0..=5u32 {
            let at = if j == 0 {
                rat(i128::from(sf(k).unwrap()))
            } else {
                rat(i128::from(sf(k + j - 1).unwrap())) + kf
            };
            table &= g.eval(at) == rat(i128::from(sf(k + j).unwrap()));
            table &= g.slope(at) == rat(i128::from(k + j + 1));
        }
    }
    let mut r = rng(7);
    let mut bad = 0;
    for _ in 0..1000 {
        let k = r.gen_range(1..=4u32);
        let g = Gk::new(k).unwrap();
        let top = 2 * sf(k + 3).unwrap() as i128;
        let mut pick = || Rational::new(r.gen_range(-40..=8 * top), 8);
        let (a, b) = (pick(), pick());
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let mid = (lo + hi) / rat(2);
        let ok = g.eval(lo) <= g.eval(hi)
            && g.eval(mid) * rat(2) <= g.eval(lo) + g.eval(hi)
            && g.eval(hi) == std::cmp::max(g.eval(a), g.eval(b))
            && g.eval(lo) == std::cmp::min(g.eval(a), g.eval(b));
        bad += usize::from(!ok);
    }
    // Lattice commutation on whole profiles.
    let mut lattice_bad = 0;
    for _ in 0..200 {
        let p = bounded(random_rational_profile(&mut r));
        let q = bounded(random_rational_profile(&mut r));
        let k = r.gen_range(1..=3u32);
        let (gp, gq) = (compose_gk(k, &p).unwrap(), compose_gk(k, &q).unwrap());
        let join = compose_gk(k, &pl_max(&p, &q).unwrap()).unwrap();
        lattice_bad += usize::from(!join.canonical_eq(&pl_max(&gp, &gq).unwrap()));
        if let Ok(m) = pl_min(&p, &q) {
            lattice_bad += usize::from(!compose_gk(k, &m).unwrap().canonical_eq(&pl_min(&gp, &gq).unwrap()));
        }
    }
    outcome(
        table && bad == 0 && lattice_bad == 0,
        format!("table exact: {table}; {bad} probe failures in 1000; {lattice_bad} lattice failures in 200 pairs"),
    )
}

fn bounded(p: PLProfile<Rational>) -> PLProfile<Rational> {
    match p.bound() {
        Bound::At(_) => p,
        Bound::Unbounded => {
            let last = p.knots().unwrap().last().unwrap().radius;
            p.restrict(last + rat(1)).unwrap()
        }
    }
}

fn c08_appendix() -> Outcome {
    let mut exact = true;
    let mut slope_err: f64 = 0.0;
    for t in [rat(0), Rational::new(1, 2), rat(2), Rational::new(7, 3)] {
        for l in [1u64, 3, 10] {
            let v = build_vlt(t, l).unwrap();
            let vf = build_vlt(t.to_f64(), l).unwrap();
            let mt = m_t(t);
            for m in mt..mt + 4 {
                let (a, b) = (a_lm(t, l, m), a_lm(t, l, m + 1));
                exact &= b - a == Rational::new(1, i128::from(l));
                exact &= v.value_at(a) == Some(rat(i128::from(sf(m).unwrap())));
                let (af, bf) = (a.to_f64(), b.to_f64());
                let h = 1e-4 * (bf - af);
                let mid = 0.5 * (af + bf);
                let fd = (vf.value_at(mid + h).unwrap() - vf.value_at(mid - h).unwrap()) / (2.0 * h);
                let want = (factorial(m + 1).unwrap() * l) as f64;
                slope_err = slope_err.max((fd - want).abs() / want);
            }
        }
    }
    outcome(
        exact && slope_err <= 1e-9,
        format!("spacing and values exact: {exact}; slope relative error {slope_err:.2e} <= 1e-9"),
    )
}

fn c09_uzeta() -> Outcome {
    let partials = uzeta_partials(&ScalarZeta::harmonic(), 2, 20).unwrap();
    let monotone = partials.windows(2).all(|w| w[1] >= w[0]);
    let first = partials.iter().position(|&p| p > 10.0);
    outcome(
        monotone && first.is_some(),
        format!(
            "monotone: {monotone}; first partial above 10 at k = {:?}; last {:.3}",
            first.map(|i| i + 1),
            partials.last().unwrap()
        ),
    )
}

fn c10_growth() -> Outcome {
    let tol = 1e-10;
    let mut r = rng(10);
    let mut worst = [0.0f64; 3];
    let mut compared = 0;
    for _ in 0..20 {
        let t = r.gen_range(0.5..3.0);
        let zeta = ZetaTriple::new(ScalarZeta::hat(2.0), ScalarZeta::exp_decay(1.0), ScalarZeta::hat(t));
        let u = RadialFn::new(random_coercive_profile(&mut r), 2).unwrap();
        for k in 1..=4 {
            let g = growth_probe(&zeta, &u, k, tol).unwrap();
            compared += usize::from(g.residuals[2].is_some());
            for i in 0..3 {
                if let Some(x) = g.residuals[i] {
                    worst[i] = worst[i].max(x);
                }
            }
        }
    }
    outcome(
        worst[2] == 0.0 && worst[0] <= tol && worst[1] <= tol && compared > 0,
        format!(
            "zeta2 part {} over {compared} cases with k >= k0; zeta0 {:.2e}, zeta1 {:.2e} <= {tol:e}",
            worst[2], worst[0], worst[1]
        ),
    )
}

fn c11_discontinuity() -> Outcome {
    let zeta = ScalarZeta::hat(2.0);
    let r = discontinuity_example(&zeta, &[1, 2, 4, 10, 100, 1000]).unwrap();
    let stuck = r.zeta_sequence.iter().all(|&z| z == zeta.eval(-1.0));
    outcome(
        r.epi_converges && r.discontinuous && stuck && zeta.eval(-1.0) != zeta.eval(0.0),
        format!(
            "distances {:?}; zeta(-u_k(0)) = {} for every k, limit {}: discontinuity reported",
            r.hausdorff,
            zeta.eval(-1.0),
            r.zeta_limit
        ),
    )
}

fn c12_sl2() -> Outcome {
    let start = Instant::now();
    let worst: Vec<f64> = [128, 256, 512]
        .iter()
        .map(|&res| sl2_residuals(res, 0, 4).unwrap().into_iter().fold(0.0, f64::max))
        .collect();
    let t = start.elapsed();
    outcome(
        worst[0] > worst[1] && worst[1] > worst[2] && worst[2] <= 0.02,
        format!(
            "max relative residual 128: {:.2e}, 256: {:.2e}, 512: {:.2e} (<= 2%), {t:.2?}",
            worst[0], worst[1], worst[2]
        ),
    )
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("conjugation involution", c01_involution),
        ("LLT oracle", c02_llt_oracle),
        ("annulus sum cross-validation", c03_annulus_sum),
        ("z1 analytic check", c04_z1_cone),
        ("homogeneity", c05_homogeneity),
        ("valuation identity", c06_valuation_identity),
        ("g_k suite", c07_gk),
        ("appendix suite", c08_appendix),
        ("u_zeta divergence", c09_uzeta),
        ("growth probe", c10_growth),
        ("negative continuity test", c11_discontinuity),
        ("SL(2) invariance", c12_sl2),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("[{status}] {:>2} {name}: {} [{:.2?}]", i + 1, o.detail, start.elapsed());
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
