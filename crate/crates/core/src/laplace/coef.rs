//! Exact coefficients: finite sums q_k * sqrt(pi)^k with q_k in Q(i).
//!
//! Floating inputs are converted to their exact dyadic rational value, so
//! cancellation of structurally equal terms is exact.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

type CQ = Complex<BigRational>;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Coef {
    terms: BTreeMap<i32, CQ>,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn exact(x: f64) -> BigRational {
    assert!(x.is_finite(), "coefficient must be finite, got {}", x);
    BigRational::from_float(x).expect("finite float")
}

impl Coef {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::rational(1, 1)
    }

    pub fn rational(n: i64, d: i64) -> Self {
        Self::from_cq(0, Complex::new(rat(n, d), BigRational::zero()))
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(n, 1)
    }

    pub fn imag_rational(n: i64, d: i64) -> Self {
        Self::from_cq(0, Complex::new(BigRational::zero(), rat(n, d)))
    }

    /// Exact value of a float.
    pub fn real(x: f64) -> Self {
        Self::from_cq(0, Complex::new(exact(x), BigRational::zero()))
    }

    pub fn complex(z: Complex64) -> Self {
        Self::from_cq(0, Complex::new(exact(z.re), exact(z.im)))
    }

    /// sqrt(pi)^k
    pub fn sqrt_pi_pow(k: i32) -> Self {
        Self::from_cq(k, Complex::new(rat(1, 1), BigRational::zero()))
    }

    pub fn pi() -> Self {
        Self::sqrt_pi_pow(2)
    }

    fn from_cq(k: i32, c: CQ) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale_rational(&self, n: i64, d: i64) -> Self {
        self * &Self::rational(n, d)
    }

    pub fn to_complex(&self) -> Complex64 {
        let sp = std::f64::consts::PI.sqrt();
        self.terms
            .iter()
            .map(|(&k, c)| {
                let f = sp.powi(k);
                Complex64::new(c.re.to_f64().unwrap_or(f64::NAN) * f, c.im.to_f64().unwrap_or(f64::NAN) * f)
            })
            .sum()
    }

    /// The rational value when no power of sqrt(pi) is involved.
    pub fn as_rational(&self) -> Option<(BigRational, BigRational)> {
        match self.terms.len() {
            0 => Some((BigRational::zero(), BigRational::zero())),
            1 => self.terms.get(&0).map(|c| (c.re.clone(), c.im.clone())),
            _ => None,
        }
    }

    /// Whether every rational part has a small denominator, i.e. the value
    /// did not come from a float.
    pub fn is_simple_rational(&self) -> bool {
        self.terms.len() <= 1
            && self.terms.get(&0).is_none_or(|c| c.re.denom().bits() <= 16 && c.im.denom().bits() <= 16)
            && (self.terms.is_empty() || self.terms.contains_key(&0))
    }
}

impl fmt::Display for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&k, c)| {
                let v = if c.im.is_zero() {
                    c.re.to_string()
                } else if c.re.is_zero() {
                    format!("{}i", c.im)
                } else {
                    format!("({}+{}i)", c.re, c.im)
                };
                if k == 0 { v } else { format!("{}*sqrtpi^{}", v, k) }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add for &Coef {
    type Output = Coef;
    fn add(self, rhs: &Coef) -> Coef {
        let mut out = self.clone();
        for (&k, c) in &rhs.terms {
            let e = out.terms.entry(k).or_insert_with(CQ::zero);
            *e = &*e + c;
            if e.is_zero() {
                out.terms.remove(&k);
            }
        }
        out
    }
}

impl Neg for &Coef {
    type Output = Coef;
    fn neg(self) -> Coef {
        Coef { terms: self.terms.iter().map(|(&k, c)| (k, -c)).collect() }
    }
}

impl Sub for &Coef {
    type Output = Coef;
    fn sub(self, rhs: &Coef) -> Coef {
        self + &(-rhs)
    }
}

impl Mul for &Coef {
    type Output = Coef;
    fn mul(self, rhs: &Coef) -> Coef {
        let mut out = Coef::zero();
        for (&a, x) in &self.terms {
            for (&b, y) in &rhs.terms {
                out = &out + &Coef::from_cq(a + b, x * y);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for Coef {
            type Output = Coef;
            fn $method(self, rhs: Coef) -> Coef {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Coef {
    type Output = Coef;
    fn neg(self) -> Coef {
        -&self
    }
}
