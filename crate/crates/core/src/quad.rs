//! Adaptive Gauss-Kronrod (7, 15) quadrature for complex integrands.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("quadrature error estimate {error:.3e} above target {target:.3e} (value {value})")]
pub struct QuadratureFailure {
    pub value: Complex64,
    pub error: f64,
    pub target: f64,
}

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

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        k += s * WGK[i];
        if i % 2 == 1 {
            g += s * WG[i / 2];
        }
    }
    ((k * h), ((k - g) * h).norm())
}

pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-11, rel: 1e-12, max_intervals: 4000 }
    }
}

/// Integrates f over [a, b], bisecting the interval with the largest error.
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, tol: &Tolerance) -> Result<Complex64, QuadratureFailure> {
    let mut parts = vec![(a, b, gk15(&f, a, b))];
    loop {
        let total: Complex64 = parts.iter().map(|p| p.2 .0).sum();
        let err: f64 = parts.iter().map(|p| p.2 .1).sum();
        let target = tol.abs.max(tol.rel * total.norm());
        if err <= target {
            return Ok(total);
        }
        if parts.len() >= tol.max_intervals || !err.is_finite() {
            return Err(QuadratureFailure { value: total, error: err, target });
        }
        let (i, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.total_cmp(&y.1 .2 .1))
            .expect("nonempty partition");
        let (lo, hi, _) = parts.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(QuadratureFailure { value: total, error: err, target });
        }
        parts.push((lo, mid, gk15(&f, lo, mid)));
        parts.push((mid, hi, gk15(&f, mid, hi)));
    }
}

/// Integral over (0, inf) using t = u^2 on (0, 1] and t = 1/v^2 on [1, inf).
pub fn integrate_half_line<F: Fn(f64) -> Complex64>(f: F, tol: &Tolerance) -> Result<Complex64, QuadratureFailure> {
    let near = integrate(|u| f(u * u) * (2.0 * u), 0.0, 1.0, tol)?;
    let far = integrate(
        |v| {
            let t = 1.0 / (v * v);
            let w = 2.0 / (v * v * v);
            let y = f(t);
            if y == Complex64::new(0.0, 0.0) { y } else { y * w }
        },
        0.0,
        1.0,
        tol,
    )?;
    Ok(near + far)
}
