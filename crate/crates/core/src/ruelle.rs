//! The Ruelle L-function in its convergence region and the series built from
//! the length spectrum: weights a_j, Y_j, S_j, the Fried factorization and the
//! hyperbolic heat terms.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::laplace::{quadrature_lprime, LaplaceError};
use crate::par::{self, Execution};
use crate::spectrum::{Completeness, GeodesicClass, Spectrum};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RuelleError {
    #[error("Re z = {0} is outside the convergence region Re z > 2")]
    ConvergenceRegion(f64),
}

/// Growth exponent of the geodesic counting function.
pub const ENTROPY: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicWeights {
    pub delta: f64,
    pub a0: Complex64,
    pub a1: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TruncationReport {
    #[serde(serialize_with = "ser_complex")]
    pub value: Complex64,
    pub tail_bound: f64,
    pub terms_used: usize,
}

pub(crate) fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("Complex", 2)?;
    st.serialize_field("re", &z.re)?;
    st.serialize_field("im", &z.im)?;
    st.end()
}

pub fn weights(c: &GeodesicClass) -> HyperbolicWeights {
    let q = (-c.length).exp();
    let delta = 1.0 - 2.0 * q * c.holonomy.cos() + q * q;
    let a0 = c.char_value * (c.primitive_length / delta);
    HyperbolicWeights { delta, a0, a1: a0 * (2.0 * c.holonomy.cos()) }
}

fn check_region(s: &Spectrum, z: Complex64) -> Result<(), RuelleError> {
    if z.re > ENTROPY || s.completeness == Completeness::Exhaustive {
        Ok(())
    } else {
        Err(RuelleError::ConvergenceRegion(z.re))
    }
}

/// C with N(l) <= C e^{2l}: the larger of the least-squares fit and the
/// envelope over the given lengths (sorted).
fn counting_constant(lengths: &[f64]) -> f64 {
    let mut envelope: f64 = 0.0;
    let (mut num, mut den) = (0.0, 0.0);
    for (i, &l) in lengths.iter().enumerate() {
        let n = (i + 1) as f64;
        let g = (ENTROPY * l).exp();
        envelope = envelope.max(n / g);
        num += n * g;
        den += g * g;
    }
    if den > 0.0 { envelope.max(num / den) } else { 0.0 }
}

// Bound on sum over lengths > cutoff of g(l) e^{-x l} dN(l), N(l) <= C e^{2l}
fn counting_tail(s: &Spectrum, lengths: &[f64], x: f64, with_length_factor: bool) -> f64 {
    if s.completeness == Completeness::Exhaustive {
        return 0.0;
    }
    let cutoff = s.cutoff_length;
    if !cutoff.is_finite() || x <= ENTROPY {
        return f64::INFINITY;
    }
    let c = counting_constant(lengths).max(1.0);
    let a = x - ENTROPY;
    if with_length_factor {
        let l = cutoff.max(1.0 / x);
        c * x * (-a * l).exp() * (l / a + 1.0 / (a * a))
    } else {
        c * x * (-a * cutoff).exp() / a / (1.0 - (-x * cutoff).exp())
    }
}

/// Largest power present for each primitive length, sorted by length.
fn power_depth(s: &Spectrum) -> Vec<(f64, u32)> {
    let mut pairs: Vec<(f64, u32)> = s.classes.iter().map(|c| (c.primitive_length, c.multiplicity)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, u32)> = Vec::new();
    for (l, k) in pairs {
        match out.last_mut() {
            Some(e) if (l - e.0).abs() <= 1e-9 * e.0.max(1.0) => e.1 = e.1.max(k),
            _ => out.push((l, k)),
        }
    }
    out
}

fn depth_of(depth: &[(f64, u32)], l: f64) -> u32 {
    let tol = 1e-9 * l.max(1.0);
    let i = depth.partition_point(|e| e.0 < l - tol);
    depth.get(i).filter(|e| (e.0 - l).abs() <= tol).map_or(1, |e| e.1)
}

/// Sum over primitives of log(1 - rho e^{-z l}).
pub fn log_euler_product(s: &Spectrum, z: Complex64) -> Result<TruncationReport, RuelleError> {
    log_euler_product_with(s, z, Execution::default())
}

pub fn log_euler_product_with(s: &Spectrum, z: Complex64, exec: Execution) -> Result<TruncationReport, RuelleError> {
    check_region(s, z)?;
    let prims: Vec<&GeodesicClass> = s.primitives().collect();
    let terms = par::map(exec, &prims, |c| (1.0 - c.char_value * (-z * c.length).exp()).ln());
    let lengths: Vec<f64> = prims.iter().map(|c| c.length).collect();
    Ok(TruncationReport {
        value: par::pairwise_sum(&terms),
        tail_bound: counting_tail(s, &lengths, z.re, false),
        terms_used: prims.len(),
    })
}

/// The truncated Euler product; the tail bound is on the absolute error.
pub fn euler_product(s: &Spectrum, z: Complex64) -> Result<TruncationReport, RuelleError> {
    euler_product_with(s, z, Execution::default())
}

pub fn euler_product_with(s: &Spectrum, z: Complex64, exec: Execution) -> Result<TruncationReport, RuelleError> {
    let lg = log_euler_product_with(s, z, exec)?;
    let value = lg.value.exp();
    Ok(TruncationReport { value, tail_bound: value.norm() * lg.tail_bound.exp_m1(), terms_used: lg.terms_used })
}

/// Y_j(z) = sum over all classes of a_j e^{-z l}.
pub fn y_series(s: &Spectrum, j: u8, z: Complex64) -> Result<TruncationReport, RuelleError> {
    y_series_with(s, j, z, Execution::default())
}

pub fn y_series_with(s: &Spectrum, j: u8, z: Complex64, exec: Execution) -> Result<TruncationReport, RuelleError> {
    check_region(s, z)?;
    let terms = par::map(exec, &s.classes, |c| {
        let w = weights(c);
        let a = if j == 0 { w.a0 } else { w.a1 };
        a * (-z * c.length).exp()
    });
    let lengths: Vec<f64> = s.classes.iter().map(|c| c.length).collect();
    let weight = (if j == 0 { 1.0 } else { 2.0 }) / (-(-s.cutoff_length.min(1e3)).exp_m1()).powi(2);
    let x = z.re;
    let mut tail = weight * counting_tail(s, &lengths, x, true);
    let depth = power_depth(s);
    for p in s.primitives() {
        let (l0, k) = (p.length, depth_of(&depth, p.length));
        let d = (-(-l0).exp_m1()).powi(2);
        let r = (-x * l0).exp();
        tail += (if j == 0 { 1.0 } else { 2.0 }) * l0 / d * r.powi(k as i32 + 1) / (1.0 - r);
    }
    Ok(TruncationReport { value: par::pairwise_sum(&terms), tail_bound: tail, terms_used: terms.len() })
}

/// log S_j(z) = -sum over all classes of a_j e^{-z l} / l.
pub fn log_s(s: &Spectrum, j: u8, z: Complex64) -> Complex64 {
    let terms: Vec<Complex64> = s
        .classes
        .iter()
        .map(|c| {
            let w = weights(c);
            let a = if j == 0 { w.a0 } else { w.a1 };
            -a * (-z * c.length).exp() / c.length
        })
        .collect();
    par::pairwise_sum(&terms)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FriedResidual {
    pub residual: f64,
    pub tail_bound: f64,
    #[serde(serialize_with = "ser_complex")]
    pub lhs: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub rhs: Complex64,
}

/// |log R(z) - (log S0(z) + log S0(z+2) - log S1(z+1))| over one class set.
/// The identity holds class by class, so the only truncation is in the
/// powers of each primitive that are missing from the right side.
pub fn fried_residual(s: &Spectrum, z: Complex64) -> Result<FriedResidual, RuelleError> {
    let lhs = log_euler_product(s, z)?.value;
    let one = Complex64::new(1.0, 0.0);
    let rhs = log_s(s, 0, z) + log_s(s, 0, z + 2.0 * one) - log_s(s, 1, z + one);
    let x = z.re;
    let depth = power_depth(s);
    let mut tail = 0.0;
    for p in s.primitives() {
        let k = depth_of(&depth, p.length) as f64;
        let r = (-x * p.length).exp();
        tail += r.powf(k + 1.0) / ((k + 1.0) * (1.0 - r));
    }
    Ok(FriedResidual { residual: (lhs - rhs).norm(), tail_bound: tail, lhs, rhs })
}

/// H_0(t) (with the e^{-t} factor) or H_1(t).
pub fn hyperbolic_heat(s: &Spectrum, j: u8, t: f64) -> Complex64 {
    let norm = 1.0 / (4.0 * PI * t).sqrt();
    let terms: Vec<Complex64> = s
        .classes
        .iter()
        .map(|c| {
            let w = weights(c);
            let l = c.length;
            if j == 0 {
                w.a0 * norm * (-(l * l / (4.0 * t) + t + l)).exp()
            } else {
                w.a1 * norm * (-(l * l / (4.0 * t) + l)).exp()
            }
        })
        .collect();
    par::pairwise_sum(&terms)
}

/// L'(e^t H_0)(z) for j = 0 and L'(H_1)(z) for j = 1, by quadrature. These
/// equal Y_0(z+1) and Y_1(z+1).
pub fn heat_transform_quadrature(s: &Spectrum, j: u8, z: Complex64) -> Result<Complex64, LaplaceError> {
    if j == 0 {
        quadrature_lprime(|t| t.exp() * hyperbolic_heat(s, 0, t), z)
    } else {
        quadrature_lprime(|t| hyperbolic_heat(s, 1, t), z)
    }
}

/// d/dz log R(z) by central differences (h = 1e-4) with one Richardson step.
pub fn log_derivative_numeric(s: &Spectrum, z: Complex64) -> Result<Complex64, RuelleError> {
    let f = |w: Complex64| log_euler_product(s, w).map(|r| r.value);
    let d = |h: f64| -> Result<Complex64, RuelleError> {
        let h = Complex64::new(h, 0.0);
        Ok((f(z + h)? - f(z - h)?) / (2.0 * h))
    };
    let (d1, d2) = (d(1e-4)?, d(5e-5)?);
    Ok((4.0 * d2 - d1) / 3.0)
}

/// Y_0(z) - Y_1(z+1) + Y_0(z+2).
pub fn log_derivative_series(s: &Spectrum, z: Complex64) -> Result<TruncationReport, RuelleError> {
    let one = Complex64::new(1.0, 0.0);
    let a = y_series(s, 0, z)?;
    let b = y_series(s, 1, z + one)?;
    let c = y_series(s, 0, z + 2.0 * one)?;
    Ok(TruncationReport {
        value: a.value - b.value + c.value,
        tail_bound: a.tail_bound + b.tail_bound + c.tail_bound,
        terms_used: a.terms_used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn class(l: f64, th: f64, chi: Complex64) -> GeodesicClass {
        GeodesicClass { length: l, holonomy: th, char_value: chi, primitive_length: l, multiplicity: 1, word: "g".into() }
    }

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn weight_examples() {
        let w = weights(&class(1.0, 0.0, one()));
        assert!((w.delta - 0.39957640089372803).abs() < 1e-12);
        assert!((w.a0.re - 2.502650301077119).abs() < 1e-12);
        assert_eq!(w.a1, w.a0 * 2.0);
        let w = weights(&class(1.0, PI, one()));
        assert!((w.delta - (1.0 + (-1.0f64).exp()).powi(2)).abs() < 1e-14);
        assert!((w.a1 + 2.0 * w.a0).norm() < 1e-14);
        let m = weights(&class(1.0, 0.7, -one()));
        let p = weights(&class(1.0, 0.7, one()));
        assert_eq!(m.a0, -p.a0);
        assert_eq!(m.a1, -p.a1);
    }

    #[test]
    fn power_tail_counts_each_primitive() {
        let z = Complex64::new(3.0, 0.0);
        let tail = |l2: f64| {
            let s = Spectrum::synthetic(&[(1.0, 0.3, one()), (l2, -0.8, one())], 3, Completeness::Exhaustive);
            y_series(&s, 0, z).unwrap().tail_bound
        };
        let (same, apart) = (tail(1.0), tail(1.0 + 1e-6));
        assert!((same - apart).abs() <= 1e-4 * apart, "{} vs {}", same, apart);
    }

    #[test]
    fn empty_spectrum() {
        let s = Spectrum::empty(1.0, 1.0);
        let z = Complex64::new(3.0, 0.0);
        let e = euler_product(&s, z).unwrap();
        assert_eq!(e.value, one());
        assert_eq!(e.tail_bound, 0.0);
        assert_eq!(y_series(&s, 0, z).unwrap().value, Complex64::new(0.0, 0.0));
        assert_eq!(fried_residual(&s, z).unwrap().residual, 0.0);
        assert_eq!(hyperbolic_heat(&s, 0, 0.3), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn single_factor() {
        let s = Spectrum::synthetic(&[(1.0, 0.0, one())], 1, Completeness::Exhaustive);
        let e = euler_product(&s, one()).unwrap();
        assert!((e.value.re - 0.6321205588285577).abs() < 1e-15);
        let mut partial = s.clone();
        partial.completeness = Completeness::Partial;
        assert_eq!(euler_product(&partial, one()), Err(RuelleError::ConvergenceRegion(1.0)));
    }

    #[test]
    fn y_series_single_orbit() {
        let k_max = 12;
        let s = Spectrum::synthetic(&[(1.0, 0.0, one())], k_max, Completeness::Exhaustive);
        let z = Complex64::new(2.5, 0.0);
        let y0 = y_series(&s, 0, z).unwrap().value;
        let oracle: f64 = (1..=k_max).map(|k| (-(k as f64) * 2.5).exp() / (1.0 - (-(k as f64)).exp()).powi(2)).sum();
        assert!((y0.re - oracle).abs() < 1e-15);
        let y1 = y_series(&s, 1, z).unwrap().value;
        assert!((y1 - 2.0 * y0).norm() < 1e-15);
    }

    #[test]
    fn heat_single_class() {
        let c = class(1.0, 0.0, one());
        let s = Spectrum { classes: vec![c.clone()], ..Spectrum::empty(1.0, 1.0) };
        let h = hyperbolic_heat(&s, 0, 0.25);
        let want = weights(&c).a0.re / (PI).sqrt() * (-2.25f64).exp();
        assert!((h.re - want).abs() < 1e-15);
    }

    #[test]
    fn heat_transforms_match_y_series() {
        let s = Spectrum::synthetic(&[(1.0, 0.6, Complex64::from_polar(1.0, 0.4)), (1.3, -2.0, one())], 6, Completeness::Exhaustive);
        let z = Complex64::new(3.0, 0.0);
        let q0 = heat_transform_quadrature(&s, 0, z).unwrap();
        let q1 = heat_transform_quadrature(&s, 1, z).unwrap();
        let y0 = y_series(&s, 0, z + 1.0).unwrap().value;
        let y1 = y_series(&s, 1, z + 1.0).unwrap().value;
        assert!((q0 - y0).norm() < 1e-6 * y0.norm().max(1e-3), "{} {}", q0, y0);
        assert!((q1 - y1).norm() < 1e-6 * y1.norm().max(1e-3), "{} {}", q1, y1);
    }

    #[test]
    fn fried_single_orbit() {
        let s = Spectrum::synthetic(&[(1.0, 0.9, one())], 60, Completeness::Exhaustive);
        let r = fried_residual(&s, Complex64::new(4.0, 0.0)).unwrap();
        assert!(r.residual <= 1e-12, "{:?}", r);
        assert!(r.tail_bound < 1e-100);
    }

    #[test]
    fn log_derivative_identity() {
        let s = Spectrum::synthetic(&[(1.0, 0.9, Complex64::from_polar(1.0, 1.1)), (1.7, 2.5, one())], 60, Completeness::Exhaustive);
        let z = Complex64::new(4.0, 0.3);
        let a = log_derivative_numeric(&s, z).unwrap();
        let b = log_derivative_series(&s, z).unwrap().value;
        assert!((a - b).norm() < 1e-6, "{} {}", a, b);
    }

    #[test]
    fn modes_agree() {
        let s = Spectrum::synthetic(&[(1.0, 0.9, one()), (1.2, 0.1, -one())], 40, Completeness::Exhaustive);
        let z = Complex64::new(3.0, 1.0);
        let a = y_series_with(&s, 1, z, Execution::Sequential).unwrap();
        let b = y_series_with(&s, 1, z, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn fried_residual_decays_with_power_cutoff(l in 0.5f64..2.0, th in -3.0f64..3.0, arg in -3.0f64..3.0) {
            let chi = Complex64::from_polar(1.0, arg);
            let z = Complex64::new(3.0, 0.0);
            let r5 = fried_residual(&Spectrum::synthetic(&[(l, th, chi)], 5, Completeness::Exhaustive), z).unwrap();
            let r10 = fried_residual(&Spectrum::synthetic(&[(l, th, chi)], 10, Completeness::Exhaustive), z).unwrap();
            prop_assert!(r5.residual <= r5.tail_bound + 1e-14);
            prop_assert!(r10.residual <= r10.tail_bound + 1e-14);
            prop_assert!(r10.tail_bound < r5.tail_bound);
        }

        #[test]
        fn tail_bound_monotone(x in 2.2f64..6.0, dx in 0.1f64..2.0) {
            let mut s = Spectrum::synthetic(&[(1.0, 0.3, Complex64::new(1.0, 0.0)), (1.4, 0.0, Complex64::new(1.0, 0.0))], 3, Completeness::Exhaustive);
            s.completeness = Completeness::Partial;
            s.cutoff_length = 4.5;
            let a = log_euler_product(&s, Complex64::new(x, 0.0)).unwrap().tail_bound;
            let b = log_euler_product(&s, Complex64::new(x + dx, 0.0)).unwrap().tail_bound;
            prop_assert!(b < a);
            let ya = y_series(&s, 0, Complex64::new(x, 0.0)).unwrap().tail_bound;
            let yb = y_series(&s, 0, Complex64::new(x + dx, 0.0)).unwrap().tail_bound;
            prop_assert!(yb < ya);
        }
    }
}
