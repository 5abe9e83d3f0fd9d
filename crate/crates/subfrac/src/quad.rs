//! Adaptive Gauss-Kronrod quadrature (G7-K15 pair with bisection).
//!
//! Small, allocation-free engine used for the Mittag-Leffler integral
//! representation and as the independent oracle in Duhamel tests. The
//! error estimate per panel is the usual |K15 − G7| heuristic scaled
//! conservatively.

/// Kronrod-15 abscissae on [0, 1] side (symmetric), paired with G7.
const XK: [f64; 8] = [
    0.0,
    0.207_784_955_007_898_47,
    0.405_845_151_377_397_17,
    0.586_087_235_467_691_13,
    0.741_531_185_599_394_44,
    0.864_864_423_359_769_07,
    0.949_107_912_342_758_5,
    0.991_455_371_120_812_6,
];
const WK: [f64; 8] = [
    0.209_482_141_084_727_83,
    0.204_432_940_075_298_9,
    0.190_350_578_064_785_4,
    0.169_004_726_639_267_9,
    0.140_653_259_715_525_92,
    0.104_790_010_322_250_18,
    0.063_092_092_629_978_55,
    0.022_935_322_010_529_224,
];
const WG: [f64; 4] = [
    0.417_959_183_673_469_4,
    0.381_830_050_505_118_94,
    0.279_705_391_489_276_7,
    0.129_484_966_168_869_69,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub est_error: f64,
    pub evals: usize,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let h = 0.5 * (b - a);
    let c = 0.5 * (a + b);
    let f0 = f(c);
    let mut k = WK[0] * f0;
    let mut g = WG[0] * f0;
    for i in 1..8 {
        let dx = h * XK[i];
        let fs = f(c - dx) + f(c + dx);
        k += WK[i] * fs;
        if i % 2 == 0 {
            g += WG[i / 2] * fs;
        }
    }
    let ik = k * h;
    let ig = g * h;
    // plain |K15 − G7| is conservative; adaptivity absorbs the cost
    (ik, (ik - ig).abs())
}

/// Integrate f on [a, b] to absolute tolerance `abs_tol` by recursive
/// bisection; gives up (with an honest error estimate) past `max_depth`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64, max_depth: u32) -> QuadResult {
    let mut out = QuadResult { value: 0.0, est_error: 0.0, evals: 0 };
    rec(f, a, b, abs_tol, max_depth, &mut out);
    out
}

fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32, out: &mut QuadResult) {
    let (v, e) = gk15(f, a, b);
    out.evals += 15;
    if e <= tol || depth == 0 || (b - a) < 1e-15 * (a.abs() + b.abs() + 1e-300) {
        out.value += v;
        out.est_error += e;
        return;
    }
    let m = 0.5 * (a + b);
    rec(f, a, m, 0.5 * tol, depth - 1, out);
    rec(f, m, b, 0.5 * tol, depth - 1, out);
}

/// Integrate over a split domain given by ascending breakpoints.
pub fn integrate_split<F: Fn(f64) -> f64>(f: &F, pts: &[f64], abs_tol: f64, max_depth: u32) -> QuadResult {
    let mut total = QuadResult { value: 0.0, est_error: 0.0, evals: 0 };
    let per = abs_tol / (pts.len().max(2) - 1) as f64;
    for w in pts.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let r = integrate(f, w[0], w[1], per, max_depth);
        total.value += r.value;
        total.est_error += r.est_error;
        total.evals += r.evals;
    }
    total
}
