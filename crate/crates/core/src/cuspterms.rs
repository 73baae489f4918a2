//! Non-hyperbolic contributions to the trace formula: identity terms, the
//! Epstein L-function of the cusp lattice, unipotent digamma terms, the
//! threshold term and scattering partial fractions.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laplace::{lprime_atoms, Coef, HeatAtom, MeroSum};
use crate::special::{digamma_real, euler_gamma, gamma, upper_gamma};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CuspError {
    #[error("lattice basis is degenerate")]
    DegenerateLattice,
    #[error("character value {0} is not on the unit circle")]
    NotUnit(Complex64),
    #[error("the Epstein function has a pole at s = 0 for the trivial character")]
    EpsteinPole,
    #[error("extrapolation to s = 0 unstable: error estimate {0:.3e}")]
    ExtrapolationUnstable(f64),
    #[error("scattering pole {0} lies on the imaginary axis")]
    PoleOnAxis(Complex64),
    #[error("volume must be positive, got {0}")]
    NonPositiveVolume(f64),
    #[error("invalid scattering file: {0}")]
    ScatteringFile(String),
    #[error("invalid lattice file: {0}")]
    LatticeFile(String),
}

#[derive(Deserialize)]
struct LatticeJson {
    b1: [f64; 2],
    b2: [f64; 2],
    #[serde(default)]
    character: Option<[[f64; 2]; 2]>,
}

/// Reads `{"b1": [re, im], "b2": [re, im], "character": [[re, im], [re, im]]}`;
/// the character (values on b1 and b2) defaults to trivial.
pub fn lattice_from_json(text: &str) -> Result<(Lattice2D, LatticeCharacter), CuspError> {
    let j: LatticeJson = serde_json::from_str(text).map_err(|e| CuspError::LatticeFile(e.to_string()))?;
    let c = |p: [f64; 2]| Complex64::new(p[0], p[1]);
    let l = Lattice2D::new(c(j.b1), c(j.b2))?;
    let chi = match j.character {
        Some([v1, v2]) => LatticeCharacter::new(c(v1), c(v2))?,
        None => LatticeCharacter::trivial(),
    };
    Ok((l, chi))
}

/// Identity contributions: (L'(e^t I_0)(z), L'(I_1)(z)).
pub fn identity_lprime(vol: f64) -> Result<(MeroSum, MeroSum), CuspError> {
    if !(vol > 0.0 && vol.is_finite()) {
        return Err(CuspError::NonPositiveVolume(vol));
    }
    let v = Coef::real(vol);
    let pv = &Coef::pi() * &v;
    let m0 = MeroSum::polynomial(vec![Coef::zero(), Coef::zero(), -pv.clone()]);
    let two_pv = &pv * &Coef::integer(2);
    let m1 = MeroSum::polynomial(vec![two_pv.clone(), Coef::zero(), -two_pv]);
    Ok((m0, m1))
}

/// Heat atoms of e^t I_0 and I_1.
pub fn identity_atoms(vol: f64) -> (Vec<HeatAtom>, Vec<HeatAtom>) {
    let v = Coef::real(vol);
    let sp = Coef::sqrt_pi_pow(1);
    let e0 = vec![HeatAtom::power(-3, &(&v * &sp) * &Coef::rational(1, 4))];
    let e1 = vec![
        HeatAtom::power(-1, &v * &sp),
        HeatAtom::power(-3, &(&v * &sp) * &Coef::rational(1, 2)),
    ];
    (e0, e1)
}

/// I_0(t) (j = 0) or I_1(t) (j = 1).
pub fn identity_heat(vol: f64, t: f64, j: u8) -> f64 {
    let sp = PI.sqrt();
    if j == 0 {
        vol * sp / 4.0 * t.powf(-1.5) * (-t).exp()
    } else {
        2.0 * vol * sp / 2.0 * (t.powf(-0.5) + t.powf(-1.5) / 2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice2D {
    pub b1: Complex64,
    pub b2: Complex64,
}

impl Lattice2D {
    pub fn new(b1: Complex64, b2: Complex64) -> Result<Self, CuspError> {
        let l = Self { b1, b2 };
        if !(l.covolume() > 1e-12 * b1.norm() * b2.norm()) {
            return Err(CuspError::DegenerateLattice);
        }
        Ok(l)
    }

    pub fn square() -> Self {
        Self { b1: Complex64::new(1.0, 0.0), b2: Complex64::new(0.0, 1.0) }
    }

    pub fn covolume(&self) -> f64 {
        (self.b1.conj() * self.b2).im.abs()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { b1: self.b1 * c, b2: self.b2 * c }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeCharacter {
    pub v1: Complex64,
    pub v2: Complex64,
}

impl LatticeCharacter {
    pub fn new(v1: Complex64, v2: Complex64) -> Result<Self, CuspError> {
        for v in [v1, v2] {
            if (v.norm() - 1.0).abs() > 1e-12 {
                return Err(CuspError::NotUnit(v));
            }
        }
        Ok(Self { v1, v2 })
    }

    pub fn trivial() -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self { v1: one, v2: one }
    }

    pub fn is_trivial(&self) -> bool {
        (self.v1 - 1.0).norm() <= 1e-12 && (self.v2 - 1.0).norm() <= 1e-12
    }
}

fn dot(a: Complex64, b: Complex64) -> f64 {
    a.re * b.re + a.im * b.im
}

// basis of the dual lattice with <d_i, b_j> = delta_ij
fn dual_basis(b1: Complex64, b2: Complex64) -> (Complex64, Complex64) {
    let det = b1.re * b2.im - b2.re * b1.im;
    (Complex64::new(b2.im, -b2.re) / det, Complex64::new(-b1.im, b1.re) / det)
}

fn gauss_reduce(mut b1: Complex64, mut b2: Complex64) -> (Complex64, Complex64) {
    loop {
        if b2.norm_sqr() < b1.norm_sqr() {
            std::mem::swap(&mut b1, &mut b2);
        }
        let q = dot(b1, b2) / b1.norm_sqr();
        if q.abs() <= 0.5 {
            return (b1, b2);
        }
        b2 -= b1 * q.round();
    }
}

fn min_gram_eigen(b1: Complex64, b2: Complex64) -> f64 {
    let (a, b, d) = (b1.norm_sqr(), dot(b1, b2), b2.norm_sqr());
    let tr = a + d;
    let disc = ((a - d) * (a - d) + 4.0 * b * b).sqrt();
    (tr - disc) / 2.0
}

/// Points (pi |p|^2, phase) of a shifted lattice p = (m - k1) e1 + (n - k2) e2
/// with pi |p|^2 <= X, excluding p = 0.
fn shifted_points(e1: Complex64, e2: Complex64, k1: f64, k2: f64, x_max: f64) -> Vec<(f64, Complex64)> {
    let r = (x_max / (PI * min_gram_eigen(e1, e2))).sqrt().ceil() as i64 + 1;
    let mut out = Vec::new();
    for m in -r..=r {
        for n in -r..=r {
            let p = e1 * (m as f64 - k1) + e2 * (n as f64 - k2);
            let x = PI * p.norm_sqr();
            if x > 0.0 && x <= x_max {
                out.push((x, p));
            }
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

const EWALD_CUT: f64 = 40.0;

/// Ewald data for the lattice rescaled to covolume one.
struct Ewald {
    area: f64,
    trivial: bool,
    direct: Vec<(f64, Complex64)>,
    dual: Vec<f64>,
}

impl Ewald {
    fn new(l: &Lattice2D, chi: &LatticeCharacter) -> Self {
        let area = l.covolume();
        let trivial = chi.is_trivial();
        // chi(gamma) = exp(2 pi i <kappa, gamma>)
        let (d1, d2) = dual_basis(l.b1, l.b2);
        let th = |v: Complex64| if (v - 1.0).norm() <= 1e-12 { 0.0 } else { v.arg() / (2.0 * PI) };
        let kappa = (d1 * th(chi.v1) + d2 * th(chi.v2)) * area.sqrt();
        let s = 1.0 / area.sqrt();
        let (b1, b2) = gauss_reduce(l.b1 * s, l.b2 * s);
        let direct = shifted_points(b1, b2, 0.0, 0.0, EWALD_CUT)
            .into_iter()
            .map(|(x, g)| (x, Complex64::from_polar(1.0, 2.0 * PI * dot(kappa, g))))
            .collect();
        let (e1, e2) = dual_basis(b1, b2);
        // kappa in the dual basis: coordinates are <kappa, b_j>
        let (mut k1, mut k2) = (dot(kappa, b1), dot(kappa, b2));
        k1 -= k1.round();
        k2 -= k2.round();
        if trivial {
            k1 = 0.0;
            k2 = 0.0;
        }
        let dual = shifted_points(e1, e2, k1, k2, EWALD_CUT).into_iter().map(|(x, _)| x).collect();
        Self { area, trivial, direct, dual }
    }

    fn g(a: Complex64, x: f64) -> Complex64 {
        upper_gamma(a, x) * (-a * x.ln()).exp()
    }

    fn d_sum(&self, a: Complex64) -> Complex64 {
        self.direct.iter().rev().map(|&(x, ph)| ph * Self::g(a, x)).sum()
    }

    fn f_sum(&self, a: Complex64) -> Complex64 {
        let b = Complex64::new(1.0, 0.0) - a;
        self.dual.iter().rev().map(|&x| Self::g(b, x)).sum()
    }

    /// Z(a) = sum' chi(g) |g|^(-2a) on the unit-covolume lattice.
    fn zeta(&self, a: Complex64) -> Complex64 {
        if a == Complex64::new(0.0, 0.0) {
            return Complex64::new(-1.0, 0.0);
        }
        let one = Complex64::new(1.0, 0.0);
        let mut bracket = self.d_sum(a) + self.f_sum(a) - a.inv();
        if self.trivial {
            bracket += (a - one).inv();
        }
        (a * PI.ln()).exp() / gamma(a) * bracket
    }
}

/// L(chi, s) = sum over nonzero g of chi(g) |g|^(-2(1+s)), continued to all s
/// by Ewald splitting. The trivial character has a pole at s = 0.
pub fn epstein(l: &Lattice2D, chi: &LatticeCharacter, s: Complex64) -> Result<Complex64, CuspError> {
    let e = Ewald::new(l, chi);
    if e.trivial && s.norm() == 0.0 {
        return Err(CuspError::EpsteinPole);
    }
    let a = s + 1.0;
    Ok((-a * e.area.ln()).exp() * e.zeta(a))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EpsteinConstants {
    /// R = pi / covolume for the trivial character, 0 otherwise.
    pub residue: f64,
    /// C by Richardson extrapolation of L(s) - R/s to s = 0.
    pub constant: f64,
    /// C from the Laurent expansion of the Ewald formula.
    pub constant_closed: f64,
    pub extrapolation_error: f64,
}

/// Richardson extrapolation to h = 0 of samples at h_k = h_0 / 2^k.
pub fn richardson(samples: &[f64]) -> (f64, f64) {
    let mut t = samples.to_vec();
    let mut prev_diag = t[0];
    let mut err = f64::INFINITY;
    for j in 1..t.len() {
        let f = (1u64 << j) as f64;
        for k in (j..t.len()).rev() {
            t[k] = t[k] + (t[k] - t[k - 1]) / (f - 1.0);
        }
        err = (t[j] - prev_diag).abs();
        prev_diag = t[j];
    }
    (t[t.len() - 1], err)
}

pub fn epstein_residue_and_constant(l: &Lattice2D, chi: &LatticeCharacter) -> Result<EpsteinConstants, CuspError> {
    let e = Ewald::new(l, chi);
    let area = e.area;
    let residue = if e.trivial { PI / area } else { 0.0 };
    let samples: Vec<f64> = (0..8)
        .map(|k| {
            let s = 0.1 / (1u64 << k) as f64;
            let v = (-(s + 1.0) * area.ln()).exp() * e.zeta(Complex64::new(s + 1.0, 0.0)).re;
            v - residue / s
        })
        .collect();
    let (constant, extrapolation_error) = richardson(&samples);
    if !(extrapolation_error <= 1e-6) {
        return Err(CuspError::ExtrapolationUnstable(extrapolation_error));
    }
    let one = Complex64::new(1.0, 0.0);
    let constant_closed = if e.trivial {
        let inner = PI * (e.d_sum(one) + e.f_sum(one)).re - PI + PI * (PI.ln() + euler_gamma());
        (inner - PI * area.ln()) / area
    } else {
        (e.zeta(one) / area).re
    };
    Ok(EpsteinConstants { residue, constant, constant_closed, extrapolation_error })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UnipotentCase {
    /// rho restricted to the cusp subgroup is nontrivial; parameters are
    /// the covolume and C.
    NontrivialRestriction { covolume: f64, c: f64 },
    /// trivial restriction; the C-part is kept so that constants are traceable
    TrivialRestriction { covolume: f64, c: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnipotentTerms {
    /// atoms of e^t U_0
    pub u0_atoms: Vec<HeatAtom>,
    /// atoms of U_1
    pub u1_atoms: Vec<HeatAtom>,
    /// L'(e^t U_0)(z - 1)
    pub u0_shifted: MeroSum,
    /// L'(U_1)(z)
    pub u1: MeroSum,
    /// L'(e^t U_0)(z - 1) - L'(U_1)(z) + L'(e^t U_0)(z + 1)
    pub combination: MeroSum,
}

/// Atoms of e^t J_0 and of J_1 (= J_-1).
pub fn j1_atoms() -> (Vec<HeatAtom>, Vec<HeatAtom>) {
    let psi1 = Coef::real(digamma_real(1.0));
    let inv_pi = Coef::sqrt_pi_pow(-2);
    // psi(1)/pi * int e^{-t lambda^2} d lambda = psi(1)/sqrt(pi) * t^(-1/2)
    let flat = HeatAtom::power(-1, &psi1 * &Coef::sqrt_pi_pow(-1));
    let j0 = vec![flat.clone(), HeatAtom::digamma_kernel(1.0, -inv_pi.clone())];
    let half = &inv_pi * &Coef::rational(-1, 2);
    let j1 = vec![flat, HeatAtom::digamma_kernel(0.0, half.clone()), HeatAtom::digamma_kernel(2.0, half)];
    (j0, j1)
}

fn scaled_atoms(atoms: &[HeatAtom], k: i64) -> Vec<HeatAtom> {
    atoms.iter().map(|a| HeatAtom { kind: a.kind.clone(), coefficient: &a.coefficient * &Coef::integer(k) }).collect()
}

pub fn unipotent_lprime(case: UnipotentCase) -> UnipotentTerms {
    let (cov, c, trivial) = match case {
        UnipotentCase::NontrivialRestriction { covolume, c } => (covolume, c, false),
        UnipotentCase::TrivialRestriction { covolume, c } => (covolume, c, true),
    };
    // |L| C / (2 pi^2) * int e^{-t lambda^2} d lambda = |L| C / (2 pi^(3/2)) t^(-1/2)
    let lc = &Coef::real(cov) * &Coef::real(c);
    let base = &(&lc * &Coef::sqrt_pi_pow(-3)) * &Coef::rational(1, 2);
    let mut u0_atoms = vec![HeatAtom::power(-1, base.clone())];
    let mut u1_atoms = vec![HeatAtom::power(-1, &base * &Coef::integer(2))];
    if trivial {
        // 2|L| R T'(k, 0) = 2 pi T'(k, 0), T'(k_0) = J_0 / pi, T'(k_1) - T'(k_0) = (J_-1 + J_1) / pi
        let (j0, j1) = j1_atoms();
        u0_atoms.extend(scaled_atoms(&j0, 2));
        u1_atoms.extend(scaled_atoms(&j1, 4));
    }
    let u0 = lprime_atoms(&u0_atoms).expect("supported atoms");
    let u1 = lprime_atoms(&u1_atoms).expect("supported atoms");
    let u0_shifted = u0.shift(-1);
    let combination = u0_shifted.sub(&u1).add(&u0.shift(1));
    UnipotentTerms { u0_atoms, u1_atoms, u0_shifted, u1, combination }
}

/// L'(e^t J_0)(z) = 2(psi(1) - psi(z+1)) and L'(J_{+-1})(z) = 2 psi(1) - psi(z) - psi(z+2).
pub fn j1_lprime() -> (MeroSum, MeroSum) {
    let (j0, j1) = j1_atoms();
    (lprime_atoms(&j0).expect("supported"), lprime_atoms(&j1).expect("supported"))
}

/// L'(e^t T_0)(z) = -1/(2z).
pub fn threshold_lprime() -> MeroSum {
    MeroSum::pole(Complex64::new(0.0, 0.0), Coef::rational(-1, 2))
}

/// e^t T_0(t) = -1/4.
pub fn threshold_atom() -> HeatAtom {
    HeatAtom::power(0, Coef::rational(-1, 4))
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ScatteringPoles {
    pub c0: f64,
    pub c1: f64,
    #[serde(with = "pairs")]
    pub poles0: Vec<Complex64>,
    #[serde(with = "pairs")]
    pub poles1: Vec<Complex64>,
}

mod pairs {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer};

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let v: Vec<[f64; 2]> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|p| Complex64::new(p[0], p[1])).collect())
    }
}

impl ScatteringPoles {
    pub fn from_json(text: &str) -> Result<Self, CuspError> {
        serde_json::from_str(text).map_err(|e| CuspError::ScatteringFile(e.to_string()))
    }
}

// -sum (1/(z + s a) - 1/(z + s conj a)), s = sgn Re a, times `unit`
fn partial_fractions(poles: &[Complex64], unit: &Coef) -> Result<MeroSum, CuspError> {
    let mut m = MeroSum::zero();
    for &a in poles {
        if a.re == 0.0 {
            return Err(CuspError::PoleOnAxis(a));
        }
        let s = a.re.signum();
        m = m.add(&MeroSum::pole(-(a * s), -unit.clone()));
        m = m.add(&MeroSum::pole(-(a.conj() * s), unit.clone()));
    }
    Ok(m)
}

/// (L'_{0,sc}(z), L'_{1,sc}(z)): the first is L'(e^t S_0)(z-1) plus the
/// shifted threshold term.
pub fn scattering_lprime(p: &ScatteringPoles) -> Result<(MeroSum, MeroSum), CuspError> {
    let half = Coef::rational(1, 2);
    let s0 = MeroSum::constant(&Coef::real(p.c0) * &half).add(&partial_fractions(&p.poles0, &half)?);
    let s1 = MeroSum::constant(Coef::real(p.c1)).add(&partial_fractions(&p.poles1, &Coef::one())?);
    Ok((s0.add(&threshold_lprime()).shift(-1), s1))
}
