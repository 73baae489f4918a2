//! The transform L'(f)(z) = 2z * int_0^inf e^(-t z^2) f(t) dt on the small
//! set of heat-function atoms that occur, in closed form as meromorphic sums
//! and by quadrature.

mod coef;
mod merosum;

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

pub use coef::Coef;
pub use merosum::{DigammaAtom, ExpAtom, HigherPole, MeroError, MeroSum, Pole};

use crate::quad::{integrate_half_line, QuadratureFailure, Tolerance};
use crate::special::digamma;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LaplaceError {
    #[error("Gamma(1 + nu) has a pole at nu = {0}")]
    UnsupportedAtom(f64),
    #[error("invalid atom: {0}")]
    InvalidAtom(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureFailure),
    #[error("alpha = {0} is real; the contour passes through the pole")]
    RealAlpha(Complex64),
    #[error("transform integral diverges at z = {0} (Re z^2 <= 0)")]
    Divergent(Complex64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum AtomKind {
    /// e^(-t lambda), lambda >= 0
    Exp(f64),
    /// t^nu with nu = twice_nu / 2
    Power { twice_nu: i32 },
    /// (4 pi t)^(-1/2) e^(-l^2 / 4t), l > 0
    Theta(f64),
    /// int_R psi(alpha + i lambda) e^(-t lambda^2) d lambda, alpha >= 0
    DigammaKernel(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatAtom {
    pub kind: AtomKind,
    pub coefficient: Coef,
}

impl HeatAtom {
    pub fn new(kind: AtomKind, coefficient: Coef) -> Result<Self, LaplaceError> {
        match kind {
            AtomKind::Exp(l) if !(l >= 0.0 && l.is_finite()) => {
                Err(LaplaceError::InvalidAtom(format!("Exp rate {} must be >= 0", l)))
            }
            AtomKind::Theta(l) if !(l > 0.0 && l.is_finite()) => {
                Err(LaplaceError::InvalidAtom(format!("Theta length {} must be > 0", l)))
            }
            AtomKind::DigammaKernel(a) if !(a >= 0.0 && a.is_finite()) => {
                Err(LaplaceError::InvalidAtom(format!("digamma shift {} must be >= 0", a)))
            }
            _ => Ok(Self { kind, coefficient }),
        }
    }

    pub fn exp(lambda: f64, c: Coef) -> Self {
        Self::new(AtomKind::Exp(lambda), c).expect("valid Exp atom")
    }

    pub fn power(twice_nu: i32, c: Coef) -> Self {
        Self { kind: AtomKind::Power { twice_nu }, coefficient: c }
    }

    pub fn theta(l: f64, c: Coef) -> Self {
        Self::new(AtomKind::Theta(l), c).expect("valid Theta atom")
    }

    pub fn digamma_kernel(alpha: f64, c: Coef) -> Self {
        Self::new(AtomKind::DigammaKernel(alpha), c).expect("valid digamma kernel")
    }

    /// Heat function value at t > 0. The digamma kernel uses an inner
    /// quadrature and is only meant for spot checks.
    pub fn value(&self, t: f64) -> Complex64 {
        let c = self.coefficient.to_complex();
        match self.kind {
            AtomKind::Exp(l) => c * (-l * t).exp(),
            AtomKind::Power { twice_nu } => c * t.powf(twice_nu as f64 / 2.0),
            AtomKind::Theta(l) => c * (-l * l / (4.0 * t)).exp() / (4.0 * PI * t).sqrt(),
            AtomKind::DigammaKernel(a) => {
                let inner = integrate_half_line(
                    |lam| Complex64::new(2.0 * digamma(Complex64::new(a, lam)).re * (-t * lam * lam).exp(), 0.0),
                    &Tolerance::default(),
                )
                .map(|v| v.re)
                .unwrap_or(f64::NAN);
                c * inner
            }
        }
    }
}

/// Gamma(m/2) for an integer m >= 1 as (rational, whether a sqrt(pi) factor
/// is present). `None` at the poles m <= 0 even.
pub fn gamma_half_integer(m: i32) -> Option<(BigRational, bool)> {
    if m % 2 == 0 {
        let n = m / 2;
        if n <= 0 {
            return None;
        }
        let f = (1..n).fold(BigRational::one(), |a, k| a * BigRational::from_integer(k.into()));
        return Some((f, false));
    }
    // Gamma(1/2) = sqrt(pi); step with Gamma(x + 1) = x Gamma(x)
    let mut r = BigRational::one();
    let mut x = BigRational::new(1.into(), 2.into());
    let target = BigRational::new(m.into(), 2.into());
    while x < target {
        r *= &x;
        x += BigRational::one();
    }
    while x > target {
        x -= BigRational::one();
        r /= &x;
    }
    Some((r, true))
}

fn gamma_coef(m: i32) -> Option<Coef> {
    let (r, sqrt_pi) = gamma_half_integer(m)?;
    let num: i64 = r.numer().try_into().ok()?;
    let den: i64 = r.denom().try_into().ok()?;
    let c = Coef::rational(num, den);
    Some(if sqrt_pi { &c * &Coef::sqrt_pi_pow(1) } else { c })
}

/// Closed-form transform of a single atom.
pub fn lprime_closed(atom: &HeatAtom) -> Result<MeroSum, LaplaceError> {
    let c = &atom.coefficient;
    Ok(match atom.kind {
        AtomKind::Exp(l) => exp_rate_transform(l).scale(c),
        AtomKind::Power { twice_nu } => {
            // 2 Gamma(1 + nu) z^(-(1 + 2 nu))
            let g = gamma_coef(twice_nu + 2).ok_or(LaplaceError::UnsupportedAtom(twice_nu as f64 / 2.0))?;
            let coeff = &(c * &g) * &Coef::integer(2);
            let e = -(1 + twice_nu);
            if e >= 0 {
                let mut poly = vec![Coef::zero(); e as usize + 1];
                poly[e as usize] = coeff;
                MeroSum::polynomial(poly)
            } else {
                MeroSum::higher_pole(Complex64::new(0.0, 0.0), (-e) as u32, coeff)
            }
        }
        AtomKind::Theta(l) => MeroSum::exp_atom(c.clone(), l),
        AtomKind::DigammaKernel(a) => {
            MeroSum::digamma_atom(&(c * &Coef::pi()) * &Coef::integer(2), Complex64::new(a, 0.0))
        }
    })
}

/// Transform of e^(-t mu) for real mu of either sign: 2z/(z^2 + mu), split
/// into simple poles.
pub fn exp_rate_transform(mu: f64) -> MeroSum {
    if mu == 0.0 {
        return MeroSum::pole(Complex64::new(0.0, 0.0), Coef::integer(2));
    }
    let r = mu.abs().sqrt();
    let p = if mu > 0.0 { Complex64::new(0.0, r) } else { Complex64::new(r, 0.0) };
    MeroSum::pole(p, Coef::one()).add(&MeroSum::pole(-p, Coef::one()))
}

/// Sum of closed-form transforms.
pub fn lprime_atoms(atoms: &[HeatAtom]) -> Result<MeroSum, LaplaceError> {
    atoms.iter().try_fold(MeroSum::zero(), |acc, a| Ok(acc.add(&lprime_closed(a)?)))
}

/// Numerical transform by quadrature; needs Re z^2 > 0 and an integrand
/// that is integrable at t = 0.
pub fn quadrature_lprime<F: Fn(f64) -> Complex64>(f: F, z: Complex64) -> Result<Complex64, LaplaceError> {
    let z2 = z * z;
    if z2.re <= 0.0 {
        return Err(LaplaceError::Divergent(z));
    }
    let tol = Tolerance { abs: 1e-13, rel: 1e-11, max_intervals: 4000 };
    let v = integrate_half_line(
        |t| {
            let k = (-t * z2).exp();
            if k == Complex64::new(0.0, 0.0) { k } else { k * f(t) }
        },
        &tol,
    )?;
    Ok(v * z * 2.0)
}

/// Independent numerical route for an atom. The digamma kernel goes through
/// the lambda integral int_R psi(alpha + i lambda) 2z/(lambda^2 + z^2).
pub fn numeric_lprime(atom: &HeatAtom, z: Complex64) -> Result<Complex64, LaplaceError> {
    match atom.kind {
        AtomKind::DigammaKernel(a) => {
            let tol = Tolerance { abs: 1e-13, rel: 1e-11, max_intervals: 4000 };
            let z2 = z * z;
            let half = integrate_half_line(
                |lam| {
                    let s = digamma(Complex64::new(a, lam)) + digamma(Complex64::new(a, -lam));
                    s * z * 2.0 / (z2 + lam * lam)
                },
                &tol,
            )?;
            Ok(half * atom.coefficient.to_complex())
        }
        _ => quadrature_lprime(|t| atom.value(t), z),
    }
}

/// Transforms of the spectral heat traces:
/// L1 from sum e^(-t alpha) over eigen1 minus sum over eigen0, and L0 from
/// e^t times the eigen0 trace, shifted by z -> z - 1.
pub fn spectral_lprime(eigen0: &[f64], eigen1: &[f64]) -> (MeroSum, MeroSum) {
    let mut l1 = MeroSum::zero();
    for &a in eigen1 {
        l1 = l1.add(&exp_rate_transform(a));
    }
    for &b in eigen0 {
        l1 = l1.sub(&exp_rate_transform(b));
    }
    let mut l0 = MeroSum::zero();
    for &b in eigen0 {
        l0 = l0.add(&exp_rate_transform(b - 1.0).shift(-1));
    }
    (l0, l1)
}

/// Closed form of int_R d lambda / ((lambda^2 + z^2)(lambda - alpha)) for
/// z > 0 and Im alpha != 0: s pi i / (z (z - s i alpha)) with s = sgn(Im alpha).
/// The factor s in front is what the residue computation gives when the
/// contour closes in the lower half plane.
pub fn contour_kernel(z: f64, alpha: Complex64) -> Result<Complex64, LaplaceError> {
    if alpha.im == 0.0 {
        return Err(LaplaceError::RealAlpha(alpha));
    }
    let s = alpha.im.signum();
    let i = Complex64::new(0.0, 1.0);
    Ok(s * PI * i / (z * (z - s * i * alpha)))
}

/// Count of zero entries, the L2 Betti number of a synthetic spectrum.
pub fn zero_count(eigen: &[f64]) -> i64 {
    eigen.iter().filter(|&&x| x == 0.0).count() as i64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel_close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1e-300)
    }

    #[test]
    fn power_zero_is_two_over_z() {
        let m = lprime_closed(&HeatAtom::power(0, Coef::one())).unwrap();
        assert!(m.poly.is_empty());
        assert_eq!(m.residue_at(c(0.0, 0.0), 0.0), Coef::integer(2));
    }

    #[test]
    fn exp_one_has_poles_at_plus_minus_i() {
        let m = lprime_closed(&HeatAtom::exp(1.0, Coef::one())).unwrap();
        assert_eq!(m.poles.len(), 2);
        assert_eq!(m.residue_at(c(0.0, 1.0), 1e-15), Coef::one());
        assert_eq!(m.residue_at(c(0.0, -1.0), 1e-15), Coef::one());
        assert!((m.evaluate(c(1.0, 0.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn theta_gives_exponential() {
        let m = lprime_closed(&HeatAtom::theta(1.0, Coef::one())).unwrap();
        assert!((m.evaluate(c(1.0, 0.0)).unwrap().re - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn gamma_pole_is_unsupported() {
        // nu = -1 means Gamma(0)
        assert!(matches!(lprime_closed(&HeatAtom::power(-2, Coef::one())), Err(LaplaceError::UnsupportedAtom(_))));
        assert!(lprime_closed(&HeatAtom::power(-3, Coef::one())).is_ok());
        assert!(HeatAtom::new(AtomKind::Exp(-1.0), Coef::one()).is_err());
    }

    #[test]
    fn half_integer_gamma_is_exact() {
        let (r, s) = gamma_half_integer(-1).unwrap();
        assert!(s);
        assert_eq!(r, BigRational::from_integer((-2).into()));
        let (r, s) = gamma_half_integer(5).unwrap();
        assert!(s);
        assert_eq!(r, BigRational::new(3.into(), 4.into()));
        assert_eq!(gamma_half_integer(8).unwrap().0, BigRational::from_integer(6.into()));
        assert!(gamma_half_integer(0).is_none());
    }

    #[test]
    fn quadrature_examples() {
        let one = quadrature_lprime(|_| c(1.0, 0.0), c(2.0, 0.0)).unwrap();
        assert!((one.re - 1.0).abs() < 1e-10);
        let e = quadrature_lprime(|t| c((-t).exp(), 0.0), c(1.0, 0.0)).unwrap();
        assert!((e.re - 1.0).abs() < 1e-10);
        let p = quadrature_lprime(|t| c(t.powf(-0.5), 0.0), c(3.0, 0.0)).unwrap();
        assert!((p.re - 2.0 * PI.sqrt()).abs() < 1e-9);
        assert!(quadrature_lprime(|_| c(1.0, 0.0), c(1.0, 1.0)).is_err());
    }

    #[test]
    fn closed_forms_match_quadrature_on_grid() {
        let atoms = vec![
            HeatAtom::exp(0.0, Coef::one()),
            HeatAtom::exp(2.5, Coef::rational(-3, 2)),
            HeatAtom::power(-1, Coef::one()),
            HeatAtom::power(0, Coef::real(0.7)),
            HeatAtom::power(1, Coef::one()),
            HeatAtom::power(2, Coef::imag_rational(1, 3)),
            HeatAtom::theta(1.0, Coef::one()),
            HeatAtom::theta(0.4, Coef::integer(2)),
        ];
        for a in &atoms {
            let m = lprime_closed(a).unwrap();
            for re in [0.75, 1.0, 2.0, 3.0] {
                for im in [0.0, 0.5, -0.5] {
                    let z = c(re, im);
                    let want = numeric_lprime(a, z).unwrap();
                    let got = m.evaluate(z).unwrap();
                    assert!(rel_close(got, want, 1e-8), "{:?} at {}: {} vs {}", a.kind, z, got, want);
                }
            }
        }
    }

    #[test]
    fn digamma_kernel_matches_lambda_integral() {
        for alpha in [0.5, 1.0, 2.0] {
            let a = HeatAtom::digamma_kernel(alpha, Coef::one());
            let m = lprime_closed(&a).unwrap();
            for z in [c(1.0, 0.0), c(2.0, 0.5)] {
                let want = numeric_lprime(&a, z).unwrap();
                assert!(rel_close(m.evaluate(z).unwrap(), want, 1e-8));
            }
        }
    }

    #[test]
    fn spectral_examples() {
        let (_, l1) = spectral_lprime(&[0.0], &[0.0, 0.0]);
        assert_eq!(l1.residue_at(c(0.0, 0.0), 0.0), Coef::integer(2));
        let (l0, _) = spectral_lprime(&[0.0], &[]);
        assert_eq!(l0.residue_at(c(0.0, 0.0), 0.0), Coef::integer(1));
        assert_eq!(l0.residue_at(c(2.0, 0.0), 0.0), Coef::integer(1));
        let (l0, l1) = spectral_lprime(&[], &[]);
        assert!(l0.is_zero() && l1.is_zero());
    }

    #[test]
    fn contour_kernel_values() {
        let v = contour_kernel(2.0, c(0.0, 1.0)).unwrap();
        assert!((v - c(0.0, PI / 6.0)).norm() < 1e-15);
        assert!(matches!(contour_kernel(2.0, c(1.0, 0.0)), Err(LaplaceError::RealAlpha(_))));
        // direct integral over the real line
        for alpha in [c(0.0, 1.0), c(0.0, -1.0), c(0.7, 0.3), c(-1.2, -2.0)] {
            let z = 2.0;
            let f = |l: f64| 1.0 / ((l * l + z * z) * (c(l, 0.0) - alpha));
            let direct = integrate_half_line(|l| f(l) + f(-l), &Tolerance::default()).unwrap();
            let closed = contour_kernel(z, alpha).unwrap();
            assert!((direct - closed).norm() < 1e-9, "{} vs {}", direct, closed);
        }
    }

    fn arb_spectrum() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(prop_oneof![Just(0.0), 0.01f64..5.0], 0..6)
    }

    proptest! {
        #[test]
        fn spectral_residue_bookkeeping(e0 in arb_spectrum(), e1 in arb_spectrum()) {
            let (l0, l1) = spectral_lprime(&e0, &e1);
            let b0 = zero_count(&e0);
            let b1 = zero_count(&e1);
            prop_assert_eq!(l1.residue_at(c(0.0, 0.0), 0.0), Coef::integer(2 * (b1 - b0)));
            // oddness is structural
            prop_assert_eq!(l1.reflect().unwrap(), l1.neg());
            prop_assert_eq!(l0.residue_at(c(0.0, 0.0), 1e-12), Coef::integer(b0));
            prop_assert_eq!(l0.residue_at(c(2.0, 0.0), 1e-12), Coef::integer(b0));
        }

        #[test]
        fn l0_functional_equation(e0 in arb_spectrum(), re in -3.0f64..3.0, im in 0.1f64..3.0) {
            let (l0, l1) = spectral_lprime(&e0, &[]);
            let z = c(re, im);
            let a = l0.evaluate(c(1.0, 0.0) + z).unwrap();
            let b = l0.evaluate(c(1.0, 0.0) - z).unwrap();
            prop_assert!((a + b).norm() <= 1e-10 * (1.0 + a.norm()));
            let x = l1.evaluate(z).unwrap();
            let y = l1.evaluate(-z).unwrap();
            prop_assert!((x + y).norm() <= 1e-12 * (1.0 + x.norm()));
        }
    }
}
