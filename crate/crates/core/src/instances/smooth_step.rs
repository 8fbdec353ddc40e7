//! A `C^infinity` step from 0 to 1 on `[0, 1]`, the normalized integral of
//! the bump `exp(-1/(s(1-s)))`.

use std::sync::OnceLock;

const REL_TOL: f64 = 1e-12;
const MAX_DEPTH: u32 = 40;

// 15-point Kronrod nodes/weights on [-1, 1] (non-negative half) and the
// embedded 7-point Gauss weights at the odd-indexed nodes.
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
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn bump(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else {
        (-1.0 / (s * (1.0 - s))).exp()
    }
}

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let pair = f(c - dx) + f(c + dx);
        k += WGK[i] * pair;
        if i % 2 == 1 {
            g += WG[i / 2] * pair;
        }
    }
    (k * h, (k - g).abs() * h)
}

fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64, depth: u32) -> f64 {
    let (k, err) = gk15(f, a, b);
    if err <= abs_tol.max(REL_TOL * k.abs()) || depth >= MAX_DEPTH {
        return k;
    }
    let m = 0.5 * (a + b);
    adaptive(f, a, m, abs_tol / 2.0, depth + 1) + adaptive(f, m, b, abs_tol / 2.0, depth + 1)
}

/// `int_0^t exp(-1/(s(1-s))) ds` for `t` in `[0, 1/2]`.
fn lower_integral(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    // The integrand at t bounds the integral from above, which gives a
    // natural absolute scale for the tolerance.
    let scale = bump(t) * t;
    adaptive(&bump, 0.0, t, 1e-14 * scale, 0)
}

fn normalizer() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| 2.0 * lower_integral(0.5))
}

/// `Gamma~(t)`: 0 for `t <= 0`, 1 for `t >= 1`, smooth and increasing between.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else if t <= 0.5 {
        lower_integral(t) / normalizer()
    } else {
        1.0 - lower_integral(1.0 - t) / normalizer()
    }
}

pub fn smooth_step_d1(t: f64) -> f64 {
    bump(t) / normalizer()
}

pub fn smooth_step_d2(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    let q = t * (1.0 - t);
    smooth_step_d1(t) * (1.0 - 2.0 * t) / (q * q)
}
