//! Laurent polynomials in t over a cyclotomic field.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::cyclotomic::CyclotomicNumber;

/// `coeffs[k]` is the coefficient of t^(low + k). The zero polynomial has no
/// coefficients; otherwise both ends are nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly {
    low: i64,
    coeffs: Vec<CyclotomicNumber>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self { low: 0, coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(CyclotomicNumber::one())
    }

    pub fn constant(c: CyclotomicNumber) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: CyclotomicNumber, k: i64) -> Self {
        Self::new(k, vec![c])
    }

    /// The element t - 1.
    pub fn t_minus_one() -> Self {
        Self::new(0, vec![CyclotomicNumber::from_integer(-1), CyclotomicNumber::one()])
    }

    pub fn new(low: i64, coeffs: Vec<CyclotomicNumber>) -> Self {
        let mut p = Self { low, coeffs };
        p.trim();
        p
    }

    /// Integer coefficients starting at t^low.
    pub fn from_ints(low: i64, coeffs: &[i64]) -> Self {
        Self::new(low, coeffs.iter().map(|&c| CyclotomicNumber::from_integer(c)).collect())
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(CyclotomicNumber::is_zero) {
            self.coeffs.pop();
        }
        let lead_zeros = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead_zeros > 0 {
            self.coeffs.drain(..lead_zeros);
            self.low += lead_zeros as i64;
        }
        if self.coeffs.is_empty() {
            self.low = 0;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Units of the Laurent ring are the nonzero monomials.
    pub fn is_unit(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn low(&self) -> i64 {
        self.low
    }

    pub fn high(&self) -> i64 {
        self.low + self.coeffs.len() as i64 - 1
    }

    /// high - low; the Euclidean size. `None` for zero.
    pub fn span(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeff(&self, k: i64) -> CyclotomicNumber {
        if self.is_zero() || k < self.low || k > self.high() {
            CyclotomicNumber::zero()
        } else {
            self.coeffs[(k - self.low) as usize].clone()
        }
    }

    pub fn coefficients(&self) -> &[CyclotomicNumber] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&CyclotomicNumber> {
        self.coeffs.last()
    }

    /// Multiplies by t^k.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self { low: self.low + k, coeffs: self.coeffs.clone() }
    }

    pub fn scale(&self, c: &CyclotomicNumber) -> Self {
        Self::new(self.low, self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Unit multiple that is monic with lowest exponent zero.
    pub fn normalized(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(l) => {
                let inv = l.inverse().expect("nonzero leading coefficient");
                Self { low: 0, coeffs: self.coeffs.iter().map(|c| c * &inv).collect() }
            }
        }
    }

    /// Division with remainder: self = q*d + r with span(r) < span(d) or r = 0.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "Laurent division by zero");
        if self.is_zero() {
            return (Self::zero(), Self::zero());
        }
        let db = d.coeffs.len() - 1;
        let inv_lead = d.leading().unwrap().inverse().unwrap();
        let mut r = self.coeffs.clone();
        if r.len() <= db {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![CyclotomicNumber::zero(); r.len() - db];
        for k in (0..r.len() - db).rev() {
            let c = &r[k + db] * &inv_lead;
            if c.is_zero() {
                continue;
            }
            for (i, di) in d.coeffs.iter().enumerate() {
                r[k + i] = &r[k + i] - &(&c * di);
            }
            q[k] = c;
        }
        r.truncate(db);
        (Self::new(self.low - d.low, q), Self::new(self.low, r))
    }

    /// Exact quotient, or `None` when d does not divide self.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    pub fn divides(&self, other: &Self) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.div_rem(self).1.is_zero()
    }

    /// Normalized greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = std::mem::replace(&mut b, r);
        }
        a.normalized()
    }

    pub fn eval_at_one(&self) -> CyclotomicNumber {
        self.coeffs.iter().fold(CyclotomicNumber::zero(), |acc, c| &acc + c)
    }

    /// Multiplicity of t = 1 as a root; `None` for the zero polynomial.
    pub fn ord_at_one(&self) -> Option<u32> {
        if self.is_zero() {
            return None;
        }
        let tm1 = Self::t_minus_one();
        let mut p = self.clone();
        let mut k = 0;
        while let Some(q) = p.exact_div(&tm1) {
            p = q;
            k += 1;
        }
        Some(k)
    }

    pub fn eval(&self, t: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c.to_complex();
        }
        acc * t.powi(self.low as i32)
    }

    /// Substitutes t -> t^(-1).
    pub fn bar(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::new(-self.high(), c)
    }

    /// Parses the text form produced by `Display`.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if s == "0" {
            return Some(Self::zero());
        }
        let mut acc = Self::zero();
        for term in split_terms(s) {
            let term = term.trim();
            let (c, k) = match term.split_once(")*t^") {
                Some((c, k)) => (c.strip_prefix('(')?, k.trim().parse::<i64>().ok()?),
                None => (term.strip_prefix('(')?.strip_suffix(')')?, 0),
            };
            acc = &acc + &Self::monomial(CyclotomicNumber::parse(c)?, k);
        }
        Some(acc)
    }
}

fn split_terms(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let bytes = s.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'(' | b'[' => depth += 1,
            b')' | b']' => depth -= 1,
            b'+' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

impl fmt::Display for LaurentPoly {
    /// Terms in descending exponent order, e.g. `([1]@1)*t^2 + ([-1]@1)*t^1 + ([1]@1)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for k in (self.low..=self.high()).rev() {
            let c = self.coeff(k);
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if k == 0 {
                write!(f, "({})", c)?;
            } else {
                write!(f, "({})*t^{}", c, k)?;
            }
        }
        Ok(())
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let low = self.low.min(rhs.low);
        let high = self.high().max(rhs.high());
        let coeffs = (low..=high).map(|k| &self.coeff(k) + &rhs.coeff(k)).collect();
        LaurentPoly::new(low, coeffs)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { low: self.low, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &(-rhs)
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || rhs.is_zero() {
            return LaurentPoly::zero();
        }
        let mut out = vec![CyclotomicNumber::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        LaurentPoly::new(self.low + rhs.low, out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn display_and_parse() {
        let p = LaurentPoly::from_ints(-1, &[1, -3, 1]);
        let s = p.to_string();
        assert_eq!(s, "([1]@1)*t^1 + ([-3]@1) + ([1]@1)*t^-1");
        assert_eq!(LaurentPoly::parse(&s).unwrap(), p);
        assert_eq!(LaurentPoly::zero().to_string(), "0");
        assert_eq!(LaurentPoly::parse("0").unwrap(), LaurentPoly::zero());
    }

    #[test]
    fn ord_at_one_counts_multiplicity() {
        let tm1 = LaurentPoly::t_minus_one();
        let p = &(&tm1 * &tm1) * &LaurentPoly::from_ints(-3, &[2, 0, 1]);
        assert_eq!(p.ord_at_one(), Some(2));
        assert_eq!(LaurentPoly::from_ints(0, &[1, -1, 1]).ord_at_one(), Some(0));
        assert_eq!(LaurentPoly::zero().ord_at_one(), None);
    }

    #[test]
    fn normalization_absorbs_units() {
        let z = CyclotomicNumber::root_of_unity(5, 2);
        let p = LaurentPoly::from_ints(0, &[1, -3, 1]);
        let q = p.scale(&z).shift(-4);
        assert_eq!(q.normalized(), p.normalized());
        assert_eq!(p.normalized().low(), 0);
        assert!(p.normalized().leading().unwrap().is_one());
    }

    #[test]
    fn gcd_of_products() {
        let a = LaurentPoly::from_ints(0, &[1, -1, 1]);
        let b = LaurentPoly::from_ints(0, &[-1, 1]);
        let c = LaurentPoly::from_ints(0, &[2, 1]);
        let g = (&a * &b).gcd(&(&a * &c).shift(3));
        assert_eq!(g, a.normalized());
    }

    fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
        (-3i64..3, prop::collection::vec(-4i64..5, 0..5), prop::sample::select(vec![1u32, 3, 5]), 0i64..5)
            .prop_map(|(low, cs, n, k)| {
                let z = CyclotomicNumber::root_of_unity(n, k);
                LaurentPoly::from_ints(low, &cs).scale(&z)
            })
    }

    proptest! {
        #[test]
        fn euclidean_division(a in arb_poly(), d in arb_poly()) {
            prop_assume!(!d.is_zero());
            let (q, r) = a.div_rem(&d);
            prop_assert_eq!(&(&q * &d) + &r, a.clone());
            if !r.is_zero() {
                prop_assert!(r.span().unwrap() < d.span().unwrap());
            }
        }

        #[test]
        fn ring_identities(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            let t = Complex64::from_polar(1.0, 0.7);
            let lhs = (&a * &b).eval(t);
            prop_assert!((lhs - a.eval(t) * b.eval(t)).norm() < 1e-8);
        }

        #[test]
        fn text_roundtrip(a in arb_poly()) {
            prop_assert_eq!(LaurentPoly::parse(&a.to_string()).unwrap(), a);
        }
    }
}
