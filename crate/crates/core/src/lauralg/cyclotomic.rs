//! Exact arithmetic in the cyclotomic field Q(zeta_n).
//!
//! Elements are stored as rational polynomials in zeta reduced modulo the
//! n-th cyclotomic polynomial, so equality is structural. Elements of
//! different fields are lifted to Q(zeta_lcm) before combining.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::qpoly;

fn cache() -> &'static RwLock<HashMap<u32, Arc<Vec<BigInt>>>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<Vec<BigInt>>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Integer coefficients of the n-th cyclotomic polynomial, lowest degree first.
pub fn cyclotomic_polynomial(n: u32) -> Arc<Vec<BigInt>> {
    assert!(n >= 1, "cyclotomic polynomial index must be positive");
    if let Some(p) = cache().read().expect("cyclotomic cache poisoned").get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by every Phi_d with d a proper divisor of n.
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            let phi_d = cyclotomic_polynomial(d);
            num = exact_int_div(&num, &phi_d);
        }
    }
    let arc = Arc::new(num);
    cache()
        .write()
        .expect("cyclotomic cache poisoned")
        .insert(n, arc.clone());
    arc
}

// Division of integer polynomials by a monic divisor that is known to be exact.
fn exact_int_div(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let nd = rem.len() - 1;
    let mut q = vec![BigInt::zero(); nd - dd + 1];
    for k in (0..=nd - dd).rev() {
        let c = rem[k + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (i, di) in den.iter().enumerate() {
            rem[k + i] -= &c * di;
        }
        q[k] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    q
}

/// Euler's totient, the degree of the n-th cyclotomic polynomial.
pub fn totient(n: u32) -> usize {
    cyclotomic_polynomial(n).len() - 1
}

/// An element of Q(zeta_n).
#[derive(Clone, Debug)]
pub struct CyclotomicNumber {
    modulus: u32,
    coeffs: Vec<BigRational>,
}

impl CyclotomicNumber {
    pub fn zero() -> Self {
        Self { modulus: 1, coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_rational(q: BigRational) -> Self {
        Self::from_coeffs(1, vec![q])
    }

    pub fn from_integer(k: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(k)))
    }

    /// The k-th power of the primitive root zeta_n = exp(2 pi i / n).
    pub fn root_of_unity(n: u32, k: i64) -> Self {
        assert!(n >= 1, "root of unity order must be positive");
        let e = k.rem_euclid(n as i64) as usize;
        let mut coeffs = vec![BigRational::zero(); e + 1];
        coeffs[e] = BigRational::one();
        Self::from_coeffs(n, coeffs)
    }

    /// Builds sum c_k zeta_n^k and reduces it modulo Phi_n.
    pub fn from_coeffs(n: u32, coeffs: Vec<BigRational>) -> Self {
        assert!(n >= 1, "cyclotomic modulus must be positive");
        let phi = cyclotomic_polynomial(n);
        let mut c = reduce(coeffs, &phi);
        trim(&mut c);
        let mut out = Self { modulus: n, coeffs: c };
        out.normalize_modulus();
        out
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Coefficients in the power basis 1, zeta, ..., zeta^(phi(n)-1).
    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn rational_part(&self) -> Option<BigRational> {
        match self.coeffs.len() {
            0 => Some(BigRational::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    // Rationals are kept with modulus 1 so that they combine with anything.
    fn normalize_modulus(&mut self) {
        if self.coeffs.len() <= 1 {
            self.modulus = 1;
        }
    }

    /// Re-expresses the element in Q(zeta_m) where `self.modulus()` divides m.
    pub fn lift(&self, m: u32) -> Self {
        assert!(
            m % self.modulus == 0,
            "cannot lift Q(zeta_{}) into Q(zeta_{})",
            self.modulus,
            m
        );
        if m == self.modulus || self.is_rational() {
            let mut out = self.clone();
            if !self.is_rational() {
                out.modulus = m;
            }
            return out;
        }
        let step = (m / self.modulus) as usize;
        let mut coeffs = vec![BigRational::zero(); (self.coeffs.len() - 1) * step + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k * step] = c.clone();
        }
        Self::from_coeffs(m, coeffs)
    }

    fn unify(a: &Self, b: &Self) -> (Self, Self, u32) {
        if a.modulus == b.modulus {
            return (a.clone(), b.clone(), a.modulus);
        }
        let m = a.modulus.lcm(&b.modulus);
        (a.lift(m), b.lift(m), m)
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.is_rational() {
            return Some(Self::from_rational(self.coeffs[0].recip()));
        }
        let phi: Vec<BigRational> = cyclotomic_polynomial(self.modulus)
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        // Phi_n is irreducible, so gcd(a, Phi_n) = 1 and s*a = 1 mod Phi_n.
        let (g, s) = qpoly::ext_gcd(&self.coeffs, &phi);
        debug_assert!(g.len() == 1);
        let inv_g = g[0].recip();
        let s: Vec<BigRational> = s.into_iter().map(|c| c * &inv_g).collect();
        Some(Self::from_coeffs(self.modulus, s))
    }

    pub fn pow(&self, k: i64) -> Option<Self> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Self::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            sq = &sq * &sq;
            e >>= 1;
        }
        Some(acc)
    }

    /// Complex conjugation, zeta -> zeta^(-1).
    pub fn conj(&self) -> Self {
        if self.is_rational() {
            return self.clone();
        }
        let n = self.modulus as usize;
        let mut coeffs = vec![BigRational::zero(); n];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[(n - k) % n] += c;
        }
        Self::from_coeffs(self.modulus, coeffs)
    }

    /// Numerical value with zeta_n = exp(2 pi i / n).
    pub fn to_complex(&self) -> Complex64 {
        let n = self.modulus as f64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let ang = 2.0 * std::f64::consts::PI * k as f64 / n;
                Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN), ang)
            })
            .sum()
    }

    /// Parses the `[q0,q1,...]@n` form written by `Display`.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        let (body, n) = match s.rsplit_once('@') {
            Some((b, n)) => (b.trim(), n.trim().parse::<u32>().ok()?),
            None => (s, 1),
        };
        let inner = body.strip_prefix('[')?.strip_suffix(']')?;
        let mut coeffs = Vec::new();
        if !inner.trim().is_empty() {
            for part in inner.split(',') {
                coeffs.push(parse_rational(part.trim())?);
            }
        }
        if n == 0 {
            return None;
        }
        Some(Self::from_coeffs(n, coeffs))
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().ok()?;
            let b: BigInt = b.trim().parse().ok()?;
            if b.is_zero() {
                None
            } else {
                Some(BigRational::new(a, b))
            }
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

fn reduce(mut c: Vec<BigRational>, phi: &[BigInt]) -> Vec<BigRational> {
    let d = phi.len() - 1;
    if c.len() > d {
        for k in (d..c.len()).rev() {
            let lead = std::mem::replace(&mut c[k], BigRational::zero());
            if lead.is_zero() {
                continue;
            }
            // phi is monic: x^d = -(phi_0 + ... + phi_{d-1} x^{d-1}).
            for (i, p) in phi.iter().enumerate().take(d) {
                if !p.is_zero() {
                    c[k - d + i] -= &lead * BigRational::from_integer(p.clone());
                }
            }
        }
        c.truncate(d);
    }
    c
}

fn trim(c: &mut Vec<BigRational>) {
    while c.last().is_some_and(Zero::is_zero) {
        c.pop();
    }
}

impl PartialEq for CyclotomicNumber {
    fn eq(&self, other: &Self) -> bool {
        if self.modulus == other.modulus {
            return self.coeffs == other.coeffs;
        }
        let (a, b, _) = Self::unify(self, other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CyclotomicNumber {}

impl fmt::Display for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", c)?;
        }
        write!(f, "]@{}", self.modulus)
    }
}

impl Add for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn add(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        let (a, b, m) = CyclotomicNumber::unify(self, rhs);
        let len = a.coeffs.len().max(b.coeffs.len());
        let mut c = vec![BigRational::zero(); len];
        for (i, x) in a.coeffs.iter().enumerate() {
            c[i] += x;
        }
        for (i, x) in b.coeffs.iter().enumerate() {
            c[i] += x;
        }
        trim(&mut c);
        let mut out = CyclotomicNumber { modulus: m, coeffs: c };
        out.normalize_modulus();
        out
    }
}

impl Sub for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn sub(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        self + &(-rhs)
    }
}

impl Neg for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        CyclotomicNumber {
            modulus: self.modulus,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn mul(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        if self.is_zero() || rhs.is_zero() {
            return CyclotomicNumber::zero();
        }
        if self.is_rational() || rhs.is_rational() {
            let (q, other) = if self.is_rational() { (&self.coeffs[0], rhs) } else { (&rhs.coeffs[0], self) };
            return CyclotomicNumber {
                modulus: other.modulus,
                coeffs: other.coeffs.iter().map(|c| c * q).collect(),
            };
        }
        let (a, b, m) = CyclotomicNumber::unify(self, rhs);
        CyclotomicNumber::from_coeffs(m, qpoly::mul(&a.coeffs, &b.coeffs))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for CyclotomicNumber {
            type Output = CyclotomicNumber;
            fn $method(self, rhs: CyclotomicNumber) -> CyclotomicNumber {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        -&self
    }
}

/// Sign-insensitive size used to pick pivots deterministically.
pub(crate) fn height(c: &CyclotomicNumber) -> usize {
    c.coeffs
        .iter()
        .map(|q| q.numer().abs().bits() as usize + q.denom().bits() as usize)
        .sum()
}
