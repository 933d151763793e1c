//! Named verification suites behind `convexval verify`. Each suite is a pure
//! function of its [`SuiteConfig`]; trials run in parallel with per-trial
//! seeds, so reports are reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::generate::{random_bump_pair, random_coercive_profile, random_rational_profile};
use super::{
    check_continuity, check_dual_translation_grid, check_invariance_grid,
    check_valuation_identity_gk, closed_form_z1_1d, evaluate_z, evaluate_z_dual, growth_probe,
    discontinuity_example, Report, ZetaTriple,
};
use crate::embed::{a_lm, build_uzeta, build_vlt, compose_gk, factorial, m_t, sf, Gk};
use crate::error::{Error, Result};
use crate::grid::{llt, llt_onto, sample_unimodular, slope_range, AffineMax, DualRange, GridFn, Piece};
use crate::profile::{pl_max, pl_min, PLProfile};
use crate::radial::{z1_ball, RadialFn};
use crate::scalar::{Bound, Rational, Scalar};
use crate::zeta::ScalarZeta;

pub const SUITES: &[&str] = &[
    "g_k",
    "conjugate",
    "valuation",
    "invariance",
    "continuity",
    "growth",
    "remark33",
    "uzeta",
    "appendix",
];

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Randomized trials; `None` takes the suite default.
    pub trials: Option<usize>,
    pub n: usize,
    pub grid_res: usize,
    pub tol: f64,
    /// Weight for the `uzeta` suite; harmonic when absent.
    pub zeta: Option<ScalarZeta>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            trials: None,
            n: 2,
            grid_res: 257,
            tol: 1e-9,
            zeta: None,
        }
    }
}

impl SuiteConfig {
    fn trials(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }
}

pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<Report> {
    match name {
        "g_k" | "gk" => gk_suite(cfg),
        "conjugate" => conjugate_suite(cfg),
        "valuation" => valuation_suite(cfg),
        "invariance" => invariance_suite(cfg),
        "continuity" => continuity_suite(cfg),
        "growth" => growth_suite(cfg),
        "remark33" => discontinuity_suite(),
        "uzeta" => uzeta_suite(cfg),
        "appendix" => appendix_suite(cfg),
        _ => Err(Error::Domain(format!(
            "unknown suite {name:?}; expected one of {}",
            SUITES.join(", ")
        ))),
    }
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Runs `f` on every trial in parallel and collects the results in order.
fn trials<T: Send>(seed: u64, count: usize, f: impl Fn(&mut ChaCha8Rng) -> T + Sync) -> Vec<T> {
    (0..count)
        .into_par_iter()
        .map(|i| f(&mut trial_rng(seed, i)))
        .collect()
}

fn count_failures(flags: &[bool]) -> f64 {
    flags.iter().filter(|ok| !**ok).count() as f64
}

fn rat(n: i128) -> Rational {
    Rational::from_integer(n)
}

/// Bounded rational profile, so that lattice operations and composition
/// stay finitely represented.
fn bounded_rational(rng: &mut ChaCha8Rng) -> PLProfile<Rational> {
    let p = random_rational_profile(rng);
    match p.bound() {
        Bound::At(_) => p,
        Bound::Unbounded => {
            let last = p.knots().expect("finite").last().expect("non-empty").radius;
            p.restrict(last + rat(1)).expect("positive radius")
        }
    }
}

/// Restriction of a random finite coercive profile to a random radius at
/// which it has climbed past `level`; beyond `level` the `zeta_2` weights
/// vanish, so the dual integrand has compact support.
fn random_bounded_profile(rng: &mut ChaCha8Rng, level: f64) -> Result<PLProfile> {
    let p = random_coercive_profile(rng);
    let mut radius: f64 = rng.gen_range(0.5..2.5);
    while p.value_at(radius).is_some_and(|v| v < level) {
        radius *= 1.5;
    }
    p.restrict(radius)
}

fn gk_suite(cfg: &SuiteConfig) -> Result<Report> {
    let mut report = Report::new("g_k");

    // Kink table: g_k(a_j) = sf_{k+j} with slope k+j+1 on the right, and the
    // previous piece reaches the same value (continuity).
    for k in 1..=5u32 {
        let g = Gk::new(k)?;
        let kf = rat(i128::from(factorial(k)?));
        let mut table_ok = true;
        let mut prev: Option<(Rational, Rational, Rational)> = None;
        for j in 0..=5u32 {
            let at = if j == 0 {
                rat(i128::from(sf(k)?))
            } else {
                rat(i128::from(sf(k + j - 1)?)) + kf
            };
            let value = rat(i128::from(sf(k + j)?));
            table_ok &= g.eval(at) == value && g.slope(at) == rat(i128::from(k + j + 1));
            if let Some((pa, pv, ps)) = prev {
                table_ok &= pv + ps * (at - pa) == value;
            }
            prev = Some((at, value, g.slope(at)));
        }
        let below = rat(i128::from(sf(k)?)) - Rational::new(1, 3);
        table_ok &= g.eval(below) == below && g.slope(below) == rat(1);
        report.flag(format!("kink table k={k}"), table_ok);
    }

    let probes = cfg.trials(1000);
    let results = trials(cfg.seed, probes, |rng| {
        let k = rng.gen_range(1..=4u32);
        let g = Gk::new(k).expect("k >= 1");
        let top = 2 * sf(k + 3).expect("small") as i128;
        let pick = |rng: &mut ChaCha8Rng| Rational::new(rng.gen_range(-40..=8 * top), 8);
        let (r, s) = (pick(rng), pick(rng));
        let (lo, hi) = if r <= s { (r, s) } else { (s, r) };
        let mid = (lo + hi) / rat(2);
        [
            g.eval(lo) <= g.eval(hi),
            g.eval(mid) * rat(2) <= g.eval(lo) + g.eval(hi),
            g.eval(r) >= r,
            g.eval(if r >= s { r } else { s }) == std::cmp::max(g.eval(r), g.eval(s))
                && g.eval(if r <= s { r } else { s }) == std::cmp::min(g.eval(r), g.eval(s)),
            (g.eval(r) <= s) == (r <= g.inverse(s)),
            g.inverse(g.eval(r)) == r,
            // Identity below sf_k, hence g_k -> id pointwise.
            Gk::new(k + 6).expect("k >= 1").eval(r) == r,
        ]
    });
    let names = [
        "monotone",
        "midpoint convex",
        "above identity",
        "commutes with max and min",
        "sublevel identity",
        "inverse round trip",
        "pointwise limit is the identity",
    ];
    for (i, name) in names.iter().enumerate() {
        let flags: Vec<bool> = results.iter().map(|r| r[i]).collect();
        report.case(format!("{name} ({probes} probes)"), count_failures(&flags), 0.0);
    }

    // Profile-level properties on exact bounded profiles.
    let count = cfg.trials(1000).min(300);
    let profile_results: Vec<Result<[bool; 4]>> = trials(cfg.seed.wrapping_add(1), count, |rng| {
        let k = rng.gen_range(1..=3u32);
        let (p, q) = (bounded_rational(rng), bounded_rational(rng));
        let gp = compose_gk(k, &p)?;
        let gq = compose_gk(k, &q)?;
        let join = compose_gk(k, &pl_max(&p, &q)?)?.canonical_eq(&pl_max(&gp, &gq)?);
        let meet = match pl_min(&p, &q) {
            Ok(m) => compose_gk(k, &m)?.canonical_eq(&pl_min(&gp, &gq)?),
            Err(Error::NotConvex { .. }) => true,
            Err(e) => return Err(e),
        };
        // g_k of a bounded profile stays convex and dominates it.
        let knots = gp.knots()?;
        let convex = knots.windows(2).all(|w| w[0].slope <= w[1].slope);
        let above = knots.iter().all(|kn| p.value_at(kn.radius).is_some_and(|v| kn.value >= v));
        Ok([join, meet, convex, above])
    });
    let profile_results: Vec<[bool; 4]> = profile_results.into_iter().collect::<Result<_>>()?;
    for (i, name) in ["lattice join", "lattice meet", "composition convex", "composition above"]
        .iter()
        .enumerate()
    {
        let flags: Vec<bool> = profile_results.iter().map(|r| r[i]).collect();
        report.case(format!("{name} ({count} profiles)"), count_failures(&flags), 0.0);
    }

    // A coercive linear profile becomes super-coercive: final slopes grow.
    let lin = PLProfile::linear(rat(0), rat(1))?;
    let slopes: Vec<Rational> = compose_gk(2, &lin)?
        .materialize_to_radius(rat(200))
        .iter()
        .map(|k| k.slope)
        .collect();
    report.flag(
        "composition of a linear profile has unbounded slopes",
        slopes.windows(2).all(|w| w[0] < w[1]) && slopes.last().is_some_and(|s| *s >= rat(6)),
    );

    // Composition equals the profile once sf_k clears its values.
    let p = PLProfile::new(rat(0), &[(rat(0), rat(1)), (rat(1), rat(2))], Bound::At(rat(2)))?;
    let settles = (1..=5)
        .map(|k| compose_gk(k, &p).map(|g| g.canonical_eq(&p)))
        .collect::<Result<Vec<_>>>()?;
    report.flag(
        "composition settles once sf_k exceeds the top value",
        settles == [false, true, true, true, true],
    );
    Ok(report)
}

fn conjugate_suite(cfg: &SuiteConfig) -> Result<Report> {
    let mut report = Report::new("conjugate");
    let count = cfg.trials(1000);
    let results = trials(cfg.seed, count, |rng| {
        let p = random_rational_profile(rng);
        let q = random_rational_profile(rng);
        let ps = p.conjugate();
        let involution = ps.conjugate().canonical_eq(&p);
        // Fenchel-Young on a few rational probes.
        let mut young = true;
        for _ in 0..8 {
            let r = Rational::new(rng.gen_range(0..=80), 8);
            let s = Rational::new(rng.gen_range(0..=80), 8);
            if let (Some(a), Some(b)) = (p.value_at(r), ps.value_at(s)) {
                young &= a + b >= r * s;
            }
        }
        let lattice = match (pl_min(&p, &q), pl_max(&ps, &q.conjugate())) {
            (Ok(m), Ok(j)) => m.conjugate().canonical_eq(&j),
            (Err(Error::NotConvex { .. }), _) => true,
            _ => false,
        };
        [involution, young, lattice]
    });
    for (i, name) in ["involution", "Fenchel-Young", "conjugate of meet is join"].iter().enumerate() {
        let flags: Vec<bool> = results.iter().map(|r| r[i]).collect();
        report.case(format!("{name} ({count} profiles)"), count_failures(&flags), 0.0);
    }

    let (g, h) = parabola_oracle()?;
    report.case("grid parabola conjugate", g, 2.0 * h * h);

    let (worst, quantization) = involution_oracle(65)?;
    report.case("grid involution on a convex quadratic", worst, 1e-9 + quantization);
    Ok(report)
}

/// Worst error of the discrete conjugate of `x^2 / 2` on `[-3, 3]` with 601
/// points, over dual nodes inside the slope range, and the primal step.
pub fn parabola_oracle() -> Result<(f64, f64)> {
    let g = GridFn::sample_square(1, -3.0, 3.0, 601, |x| 0.5 * x[0] * x[0])?;
    let h = g.step(0);
    let (s_lo, s_hi) = slope_range(&g)[0];
    let c = llt(&g, DualRange::Auto)?;
    let err = (0..c.grid.len())
        .filter_map(|i| {
            let y = c.grid.point(i)[0];
            (y >= s_lo && y <= s_hi).then(|| (c.grid.values[i] - 0.5 * y * y).abs())
        })
        .fold(0.0, f64::max);
    Ok((err, h))
}

/// `max |u** - u|` over the nodes for a non-separable convex quadratic
/// that is `+inf` outside a disc inside the box, and the quantization
/// bound `h * h_dual`. The finite region stays off the box edge, so no
/// edge continuation is involved.
pub fn involution_oracle(res: usize) -> Result<(f64, f64)> {
    let q = GridFn::sample_square(2, -2.0, 2.0, res, |x| {
        if x[0] * x[0] + x[1] * x[1] <= 1.5 * 1.5 {
            x[0] * x[0] + 0.5 * x[0] * x[1] + x[1] * x[1]
        } else {
            f64::INFINITY
        }
    })?;
    let c = llt(&q, DualRange::Auto)?;
    let back = llt_onto(&c.grid, &q.lo, &q.hi, &q.res);
    let worst = (0..q.len())
        .filter(|&i| q.values[i].is_finite())
        .map(|i| (back.grid.values[i] - q.values[i]).abs())
        .fold(0.0, f64::max);
    Ok((worst, q.step(0) * c.grid.step(0).max(c.grid.step(1))))
}

fn valuation_triple() -> ZetaTriple {
    ZetaTriple::new(ScalarZeta::hat(2.0), ScalarZeta::exp_decay(1.0), ScalarZeta::hat(2.0))
}

fn valuation_suite(cfg: &SuiteConfig) -> Result<Report> {
    let mut report = Report::new("valuation");
    let zeta = ScalarZeta::exp_decay(1.0);
    let one_d = |pieces: &[(f64, f64)]| {
        AffineMax::new(1, pieces.iter().map(|&(a, c)| Piece { a: vec![a], c }).collect(), vec![])
    };
    let u = closed_form_z1_1d(&zeta, &one_d(&[(-2.0, 0.0), (1.0, 0.0)])?)?;
    let v = closed_form_z1_1d(&zeta, &one_d(&[(-1.0, 0.0), (2.0, 0.0)])?)?;
    let meet = closed_form_z1_1d(&zeta, &one_d(&[(-1.0, 0.0), (1.0, 0.0)])?)?;
    let join = closed_form_z1_1d(&zeta, &one_d(&[(-2.0, 0.0), (2.0, 0.0)])?)?;
    report.case("closed-form exponential pair", (u + v - meet - join).abs(), 0.0);

    let triple = valuation_triple();
    let count = cfg.trials(200);
    let n = cfg.n;
    let residuals: Vec<Result<f64>> = trials(cfg.seed, count, |rng| {
        let (_, u, v) = random_bump_pair(rng);
        let k = rng.gen_range(1..=3u32);
        check_valuation_identity_gk(&triple, &u, &v, n, k, cfg.tol * 1e-2)
    });
    let residuals: Vec<f64> = residuals.into_iter().collect::<Result<_>>()?;
    report.case(
        format!("disjoint bump pairs through g_k ({count} pairs, max)"),
        residuals.iter().copied().fold(0.0, f64::max),
        cfg.tol,
    );

    // Homogeneity of the components under u(x / lambda) and duality on a
    // fixed super-coercive example.
    let p = PLProfile::new(0.0, &[(0.0, 1.0), (1.0, 2.0), (2.0, 3.0)], Bound::At(3.0))?;
    for dim in [2usize, 3] {
        let u = RadialFn::new(p.clone(), dim)?;
        let base = evaluate_z(&triple, &u, 1e-13)?;
        for lambda in [0.5, 2.0, 3.0] {
            let s = evaluate_z(&triple, &u.scaled(lambda)?, 1e-13)?;
            let ln = lambda.powi(dim as i32);
            let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
            let r = rel(s.z0, base.z0).max(rel(s.z1, ln * base.z1)).max(rel(s.z2, base.z2 / ln));
            report.case(format!("homogeneity n={dim} lambda={lambda}"), r, 1e-12);
        }
    }

    // Duality: Z*(u) against the primal parts of u* with zeta_0 reflected.
    let dual_count = cfg.trials(100).min(100);
    let dual: Vec<Result<f64>> = trials(cfg.seed.wrapping_add(7), dual_count, |rng| {
        let u = RadialFn::new(random_bounded_profile(rng, 2.0)?, n)?;
        let d = evaluate_z_dual(&triple, &u, 1e-12)?;
        let reflected = triple.reflect_zeta0();
        let c = u.conjugate();
        let z0 = reflected.zeta0.eval(c.min_value());
        let z1 = crate::radial::z1(&triple.zeta1, &c, 1e-12)?;
        let z2 = crate::radial::z2_dual_exact(&triple.zeta2, &u)?;
        Ok((d.total - (z0 + z1 + z2)).abs())
    });
    let dual: Vec<f64> = dual.into_iter().collect::<Result<_>>()?;
    report.case(
        format!("dual equals reflected primal of the conjugate ({dual_count} inputs, max)"),
        dual.iter().copied().fold(0.0, f64::max),
        cfg.tol,
    );
    Ok(report)
}

/// Smooth, convex, super-coercive test function that is not radial.
pub fn invariance_test_grid(res: usize) -> Result<GridFn> {
    GridFn::sample_square(2, -4.0, 4.0, res, |x| {
        let (a, b) = (x[0], x[1]);
        0.5 * (1.3 * a * a + 0.4 * a * b + 0.8 * b * b)
    })
}

pub fn invariance_triple() -> ZetaTriple {
    ZetaTriple::new(ScalarZeta::hat(1.0), ScalarZeta::hat(1.0), ScalarZeta::hat(1.0))
}

/// Relative SL(2) residuals at one resolution for the fixed shear set used
/// by the suite and the acceptance run.
pub fn sl2_residuals(res: usize, seed: u64, maps: usize) -> Result<Vec<f64>> {
    let u = invariance_test_grid(res)?;
    let phis: Vec<_> = (0..maps as u64)
        .map(|i| sample_unimodular(seed.wrapping_add(i), 2, 0.4, 0.3))
        .collect();
    check_invariance_grid(&invariance_triple(), &u, &phis, 1.0, 1e-12)
}

fn invariance_suite(cfg: &SuiteConfig) -> Result<Report> {
    let mut report = Report::new("invariance");
    let maps = cfg.trials(4);

    let residuals = sl2_residuals(cfg.grid_res, cfg.seed, maps)?;
    let tol = if cfg.grid_res >= 512 { 0.02 } else { 0.05 };
    report.case(
        format!("SL(2) on a {0}x{0} grid ({maps} maps, max relative)", cfg.grid_res),
        residuals.iter().copied().fold(0.0, f64::max),
        tol,
    );

    let g = invariance_test_grid(cfg.grid_res.min(257))?;
    let r = check_dual_translation_grid(&invariance_triple(), &g, &[0.3, -0.2], 1e-12)?;
    report.case("dual translation u + l on the grid (relative)", r, 0.05);
    Ok(report)
}

fn continuity_suite(cfg: &SuiteConfig) -> Result<Report> {
    let mut report = Report::new("continuity");
    let zeta = ZetaTriple::new(ScalarZeta::hat(2.0), ScalarZeta::hat(1.5), ScalarZeta::hat(2.0));
    let count = cfg.trials(50);
    let k_max = 6;
    let n = cfg.n;
    let results: Vec<Result<(f64, bool)>> = trials(cfg.seed, count, |rng| {
        let u = RadialFn::new(random_bounded_profile(rng, 2.0)?, n)?;
        let radius = u.profile.bound().to_f64();
        let r = check_continuity(&zeta, &u, k_max, 1e-12)?;
        // Beyond the index where sf_k clears every level of u below the
        // domain bound, the composition is u itself.
        let top = u.profile.value_at(radius).unwrap_or(f64::INFINITY);
        let settled = (1..=k_max).find(|&k| sf(k).is_ok_and(|s| s as f64 >= top.max(2.0)));
        let tail = settled.map_or(0.0, |k| {
            r[(k - 1) as usize..].iter().copied().fold(0.0, f64::max)
        });
        Ok((tail, settled.is_some()))
    });
    let results: Vec<(f64, bool)> = results.into_iter().collect::<Result<_>>()?;
    report.case(
        format!("|Z(g_k u) - Z(u)| once sf_k clears the levels ({count} inputs, max)"),
        results.iter().map(|r| r.0).fold(0.0, f64::max),
        1e-10,
    );
    let u = RadialFn::new(PLProfile::new(0.0, &[(0.0, 1.0)], Bound::At(5.0))?, n)?;
    let zero = check_continuity(&ZetaTriple::zero(), &u, 4, 1e-12)?;
    report.case("zero triple", zero.iter().copied().fold(0.0, f64::max), 0.0);
    Ok(report)
}

fn growth_suite(cfg: &SuiteConfig) -> Result<Report> {
    let mut report = Report::new("growth");
    let count = cfg.trials(20);
    let n = cfg.n;
    let quad_tol = 1e-10;
    let results: Vec<Result<[f64; 3]>> = trials(cfg.seed, count, |rng| {
        let t = rng.gen_range(0.5..3.0);
        let zeta = ZetaTriple::new(ScalarZeta::hat(2.0), ScalarZeta::exp_decay(1.0), ScalarZeta::hat(t));
        let u = RadialFn::new(random_coercive_profile(rng), n)?;
        let mut worst = [0.0f64; 3];
        for k in 1..=4 {
            let r = growth_probe(&zeta, &u, k, quad_tol)?;
            for i in 0..3 {
                if let Some(x) = r.residuals[i] {
                    worst[i] = worst[i].max(x);
                }
            }
        }
        Ok(worst)
    });
    let results: Vec<[f64; 3]> = results.into_iter().collect::<Result<_>>()?;
    let max = |i: usize| results.iter().map(|r| r[i]).fold(0.0, f64::max);
    report.case(format!("zeta0 part ({count} inputs)"), max(0), 0.0);
    report.case(format!("zeta1 part ({count} inputs)"), max(1), 10.0 * quad_tol);
    report.case(format!("zeta2 part for k >= k0 ({count} inputs)"), max(2), 0.0);
    Ok(report)
}

fn discontinuity_suite() -> Result<Report> {
    let mut report = Report::new("remark33");
    let zeta = ScalarZeta::hat(2.0);
    let ks = [1, 2, 4, 10, 100, 1000];
    let r = discontinuity_example(&zeta, &ks)?;
    for (k, d) in ks.iter().zip(&r.hausdorff) {
        report.case(format!("sublevel distance k={k} equals 1/k"), (d - 1.0 / f64::from(*k)).abs(), 1e-12);
    }
    report.flag("sublevel sets converge", r.epi_converges);
    report.flag("value at the origin does not converge", r.discontinuous);
    report.note(format!(
        "zeta(-u_k(0)) = {:?} while zeta(-u(0)) = {}: the map u -> zeta(-u(0)) is not continuous",
        r.zeta_sequence, r.zeta_limit
    ));
    Ok(report)
}

/// Partial integrals `int_{B(r_k)} zeta(u_zeta)` over the first `levels`
/// materialized knots of `u_zeta`.
pub fn uzeta_partials(zeta: &ScalarZeta, n: usize, levels: usize) -> Result<Vec<f64>> {
    let u = build_uzeta(zeta, n)?;
    let knots: Vec<_> = u.iter_knots().take(levels + 1).collect();
    let prefix = PLProfile::from_knots(knots.clone(), Bound::Unbounded)?;
    let f = RadialFn::new(prefix, n)?;
    knots[1..]
        .par_iter()
        .map(|k| z1_ball(zeta, &f, k.radius, 1e-9))
        .collect()
}

fn uzeta_suite(cfg: &SuiteConfig) -> Result<Report> {
    let mut report = Report::new("uzeta");
    let zeta = cfg.zeta.clone().unwrap_or_else(ScalarZeta::harmonic);
    let partials = uzeta_partials(&zeta, cfg.n, 20)?;
    report.flag("partial integrals increase", partials.windows(2).all(|w| w[1] >= w[0]));
    let top = partials.iter().copied().fold(0.0, f64::max);
    report.case("partial integral reaches 10 by k = 20 (shortfall)", (10.0 - top).max(0.0), 0.0);
    report.note(format!("partial integrals: {partials:?}"));
    Ok(report)
}

fn appendix_suite(cfg: &SuiteConfig) -> Result<Report> {
    let mut report = Report::new("appendix");
    let mut spacing = true;
    let mut values = true;
    let mut slope_err: f64 = 0.0;
    let ts = [rat(0), Rational::new(1, 2), rat(2), Rational::new(7, 3), rat(10)];
    for &t in &ts {
        for l in [1u64, 3, 10] {
            let v = build_vlt(t, l)?;
            let mt = m_t(t);
            for m in mt..mt + 4 {
                let (a, b) = (a_lm(t, l, m), a_lm(t, l, m + 1));
                spacing &= b - a == Rational::new(1, i128::from(l));
                values &= v.value_at(a) == Some(rat(i128::from(sf(m)?)));
                let vf = build_vlt(t.to_f64(), l)?;
                let (af, bf) = (a_lm(t.to_f64(), l, m), a_lm(t.to_f64(), l, m + 1));
                let mid = 0.5 * (af + bf);
                let h = 1e-4 * (bf - af);
                let fd = (vf.value_at(mid + h).unwrap() - vf.value_at(mid - h).unwrap()) / (2.0 * h);
                let exact = (factorial(m + 1)? * l) as f64;
                slope_err = slope_err.max((fd - exact).abs() / exact);
            }
        }
    }
    let _ = cfg;
    report.flag("A spacing is 1/l", spacing);
    report.flag("v(A_m) = sf_m", values);
    report.case("slope (m+1)! l against finite differences (relative)", slope_err, 1e-9);
    Ok(report)
}
