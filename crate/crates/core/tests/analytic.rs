use std::f64::consts::PI;

use cusped_zeta::cuspterms::{
    epstein, epstein_residue_and_constant, identity_atoms, identity_lprime, j1_lprime, richardson, threshold_lprime,
    unipotent_lprime, Lattice2D, LatticeCharacter, UnipotentCase,
};
use cusped_zeta::laplace::{lprime_atoms, lprime_closed, numeric_lprime, spectral_lprime, zero_count, Coef, HeatAtom, MeroSum};
use cusped_zeta::ruelle::{fried_residual, heat_transform_quadrature, log_derivative_numeric, log_derivative_series, y_series};
use cusped_zeta::special::{digamma_real, gamma};
use cusped_zeta::spectrum::{Completeness, Spectrum};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn transforms_match_quadrature_on_grid() {
    let mut atoms = Vec::new();
    for l in [0.0, 0.5, 1.0, 4.0] {
        atoms.push(HeatAtom::exp(l, Coef::one()));
    }
    for twice_nu in [-1, 0, 1, 2] {
        atoms.push(HeatAtom::power(twice_nu, Coef::one()));
    }
    for l in [0.5, 1.0, 2.0] {
        atoms.push(HeatAtom::theta(l, Coef::one()));
    }
    for a in &atoms {
        let m = lprime_closed(a).unwrap();
        for z in [0.75, 1.0, 2.0, 3.0] {
            let closed = m.evaluate(c(z, 0.0)).unwrap();
            let num = numeric_lprime(a, c(z, 0.0)).unwrap();
            assert!((closed - num).norm() <= 1e-8 * closed.norm(), "{:?} z = {}: {} vs {}", a.kind, z, closed, num);
        }
    }
}

#[test]
fn identity_polynomials() {
    for vol in [1.0, 2.029883212819307] {
        let (m0, m1) = identity_lprime(vol).unwrap();
        let pv = &Coef::pi() * &Coef::real(vol);
        let want0 = MeroSum::polynomial(vec![Coef::zero(), Coef::zero(), -pv.clone()]);
        let two = &pv * &Coef::integer(2);
        let want1 = MeroSum::polynomial(vec![two.clone(), Coef::zero(), -two]);
        assert_eq!(m0, want0);
        assert_eq!(m1, want1);
        let (a0, a1) = identity_atoms(vol);
        assert_eq!(lprime_atoms(&a0).unwrap(), want0);
        assert_eq!(lprime_atoms(&a1).unwrap(), want1);
    }
}

#[test]
fn digamma_sums() {
    let (j0, j1) = j1_lprime();
    let psi1 = Coef::real(digamma_real(1.0));
    let two_psi1 = MeroSum::constant(&psi1 * &Coef::integer(2));
    let want0 = two_psi1.add(&MeroSum::digamma_atom(Coef::integer(-2), c(1.0, 0.0)));
    let want1 = two_psi1
        .add(&MeroSum::digamma_atom(Coef::integer(-1), c(0.0, 0.0)))
        .add(&MeroSum::digamma_atom(Coef::integer(-1), c(2.0, 0.0)));
    assert_eq!(j0, want0);
    assert_eq!(j1, want1);
}

#[test]
fn threshold_and_vanishing_combinations() {
    assert_eq!(threshold_lprime(), MeroSum::pole(c(0.0, 0.0), Coef::rational(-1, 2)));
    for (cov, k) in [(1.0, 0.0), (3.4641016151377544, 0.37), (0.5, -2.0)] {
        assert!(unipotent_lprime(UnipotentCase::NontrivialRestriction { covolume: cov, c: k }).combination.is_zero());
        assert!(unipotent_lprime(UnipotentCase::TrivialRestriction { covolume: cov, c: k }).combination.is_zero());
    }
    // the J-part alone: L'(e^t J_0)(z - 1) + L'(e^t J_0)(z + 1) = 2 L'(J_1)(z)
    let (j0, j1) = j1_lprime();
    assert_eq!(j0.shift(-1).add(&j0.shift(1)), j1.scale(&Coef::integer(2)));
}

fn two_orbit_spectrum() -> Spectrum {
    Spectrum::synthetic(
        &[(1.0870701449957383, 1.7227684498700899, c(1.0, 0.0)), (1.4, -0.6, Complex64::from_polar(1.0, 0.4 * PI))],
        60,
        Completeness::Exhaustive,
    )
}

#[test]
fn heat_transforms_match_y_series() {
    let s = two_orbit_spectrum();
    let z = c(3.0, 0.0);
    for j in [0u8, 1] {
        let q = heat_transform_quadrature(&s, j, z).unwrap();
        let y = y_series(&s, j, z + 1.0).unwrap().value;
        assert!((q - y).norm() < 1e-6, "j = {}: {} vs {}", j, q, y);
    }
}

#[test]
fn log_derivative_routes_agree() {
    let s = two_orbit_spectrum();
    let z = c(4.0, 0.0);
    let numeric = log_derivative_numeric(&s, z).unwrap();
    let series = log_derivative_series(&s, z).unwrap().value;
    assert!((numeric - series).norm() < 1e-6, "{} vs {}", numeric, series);
}

#[test]
fn fried_single_orbit() {
    let s = Spectrum::synthetic(&[(1.0, 0.5, Complex64::from_polar(1.0, 1.0))], 60, Completeness::Exhaustive);
    let r = fried_residual(&s, c(4.0, 0.0)).unwrap();
    assert!(r.residual <= 1e-12, "{:?}", r);
}

/// Lattice sum summed ring by ring with the smooth weight
/// Q(3, u) = e^(-u)(1 + u + u^2/2), u = |g|^2/R^2, plus the zero Fourier mode of
/// the removed part when chi is trivial. The removed part |g|^(-2s')P(3, u) is
/// smooth for integer s' <= 2, so its nonzero modes decay like a Gaussian in
/// R times the distance from the character's dual point to the dual lattice.
fn annulus_oracle(b1: Complex64, b2: Complex64, v1: Complex64, v2: Complex64, sp: f64) -> Complex64 {
    let r = 10.0;
    let area = (b1.conj() * b2).im.abs();
    let step = area / b1.norm().max(b2.norm());
    let n = (12.0 * r / step).ceil() as i64;
    let mut sum = c(0.0, 0.0);
    for k in 1..=n {
        let mut ring = c(0.0, 0.0);
        for m in -k..=k {
            for q in -k..=k {
                if m.abs().max(q.abs()) != k {
                    continue;
                }
                let d2 = (b1 * m as f64 + b2 * q as f64).norm_sqr();
                let u = d2 / (r * r);
                let weight = (-u).exp() * (1.0 + u + u * u / 2.0);
                ring += v1.powi(m as i32) * v2.powi(q as i32) * d2.powf(-sp) * weight;
            }
        }
        sum += ring;
    }
    if (v1 - 1.0).norm() < 1e-15 && (v2 - 1.0).norm() < 1e-15 {
        // (2 pi / A) int_0^inf rho^(1 - 2s') P(3, rho^2/R^2) d rho
        sum += PI / area * r.powf(2.0 - 2.0 * sp) * gamma(c(4.0 - sp, 0.0)) / ((sp - 1.0) * 2.0);
    }
    sum
}

#[test]
fn epstein_square_lattice() {
    let l = Lattice2D::square();
    let triv = LatticeCharacter::trivial();
    let v = epstein(&l, &triv, c(1.0, 0.0)).unwrap();
    let oracle = annulus_oracle(c(1.0, 0.0), c(0.0, 1.0), c(1.0, 0.0), c(1.0, 0.0), 2.0);
    assert!((v - oracle).norm() < 1e-10, "{} vs {}", v, oracle);
    // s L(s) -> pi
    let samples: Vec<f64> = (0..8).map(|k| 0.1 / (1u64 << k) as f64).map(|s| s * epstein(&l, &triv, c(s, 0.0)).unwrap().re).collect();
    let (limit, _) = richardson(&samples);
    assert!((limit - PI).abs() < 1e-4, "{}", limit);
    let k = epstein_residue_and_constant(&l, &triv).unwrap();
    assert!((k.residue - PI).abs() < 1e-15);
    assert!((k.constant - k.constant_closed).abs() < 1e-8);
}

#[test]
fn epstein_nontrivial_character_at_zero() {
    let cases = [
        (c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(1.0, 0.0)),
        (c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(0.0, 1.0)),
        (c(1.0, 0.0), c(0.5, 3f64.sqrt() / 2.0), Complex64::from_polar(1.0, 2.0 * PI / 5.0), c(1.0, 0.0)),
    ];
    for (b1, b2, v1, v2) in cases {
        let l = Lattice2D::new(b1, b2).unwrap();
        let chi = LatticeCharacter::new(v1, v2).unwrap();
        let v = epstein(&l, &chi, c(0.0, 0.0)).unwrap();
        let oracle = annulus_oracle(b1, b2, v1, v2, 1.0);
        assert!(v.norm().is_finite());
        assert!((v - oracle).norm() < 1e-6, "{} vs {}", v, oracle);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn epstein_homogeneity(x in -0.5f64..0.5, y in 0.8f64..2.0, ang in 0.3f64..6.0, s in 0.1f64..1.5, scale in 0.5f64..2.0) {
        let l = Lattice2D::new(c(1.0, 0.0), c(x, y)).unwrap();
        let chi = LatticeCharacter::new(Complex64::from_polar(1.0, ang), c(1.0, 0.0)).unwrap();
        let a = epstein(&l, &chi, c(s, 0.0)).unwrap();
        let b = epstein(&l.scaled(scale), &chi, c(s, 0.0)).unwrap();
        let want = a * scale.powf(-2.0 * (1.0 + s));
        prop_assert!((b - want).norm() <= 1e-9 * want.norm().max(1.0));
    }

    #[test]
    fn spectral_identities(
        e0 in prop::collection::vec(prop_oneof![Just(0.0), (1u32..40).prop_map(|k| k as f64 / 8.0)], 0..5),
        e1 in prop::collection::vec(prop_oneof![Just(0.0), (1u32..40).prop_map(|k| k as f64 / 8.0)], 0..5),
        re in -2.0f64..2.0,
        im in 0.1f64..2.0,
    ) {
        let (l0, l1) = spectral_lprime(&e0, &e1);
        prop_assert_eq!(l1.reflect(), Some(l1.neg()));
        prop_assert_eq!(l1.residue_at(c(0.0, 0.0), 0.0), Coef::integer(2 * (zero_count(&e1) - zero_count(&e0))));
        let z = c(re, im);
        let a = l0.evaluate(1.0 + z).unwrap();
        let b = l0.evaluate(1.0 - z).unwrap();
        prop_assert!((a + b).norm() <= 1e-10 * a.norm().max(1.0));
    }
}
