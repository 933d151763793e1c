//! Adaptive Gauss-Kronrod (7/15) quadrature on finite intervals.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

/// Gauss weights for the odd-indexed Kronrod nodes (plus the centre).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Kronrod estimate and `|Kronrod - Gauss|` on `[a, b]`.
pub fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let pair = f(c - x) + f(c + x);
        kron += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol` by bisection.
/// The error estimate is reported even when `max_depth` stops refinement.
pub fn integrate(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Integral {
    if !(b > a) {
        return Integral {
            value: 0.0,
            error: 0.0,
        };
    }
    let (value, error) = gk15(f, a, b);
    refine(f, a, b, value, error, tol.max(f64::MIN_POSITIVE), 48)
}

fn refine(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    tol: f64,
    depth: u32,
) -> Integral {
    let scale = value.abs().max(1.0);
    if error <= tol || depth == 0 || error <= 1e-15 * scale {
        return Integral { value, error };
    }
    let m = 0.5 * (a + b);
    let (lv, le) = gk15(f, a, m);
    let (rv, re) = gk15(f, m, b);
    let l = refine(f, a, m, lv, le, 0.5 * tol, depth - 1);
    let r = refine(f, m, b, rv, re, 0.5 * tol, depth - 1);
    Integral {
        value: l.value + r.value,
        error: l.error + r.error,
    }
}

/// Integrates over consecutive intervals of a sorted breakpoint list,
/// splitting the tolerance evenly.
pub fn integrate_pieces(f: &impl Fn(f64) -> f64, breaks: &[f64], tol: f64) -> Integral {
    let pieces = breaks.len().saturating_sub(1).max(1) as f64;
    breaks.windows(2).fold(
        Integral {
            value: 0.0,
            error: 0.0,
        },
        |acc, w| {
            let i = integrate(f, w[0], w[1], tol / pieces);
            Integral {
                value: acc.value + i.value,
                error: acc.error + i.error,
            }
        },
    )
}
