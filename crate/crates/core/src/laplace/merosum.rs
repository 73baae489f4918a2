//! Meromorphic functions of z written as
//! polynomial + simple poles + higher-order poles + c*psi(z + s) + c*e^(-r z).

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use super::coef::Coef;
use crate::special::digamma;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeroError {
    #[error("evaluation at a pole z = {0}")]
    PoleEvaluation(Complex64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Pole {
    pub location: Complex64,
    pub residue: Coef,
}

/// coefficient / (z - location)^order with order >= 2
#[derive(Clone, Debug, PartialEq)]
pub struct HigherPole {
    pub location: Complex64,
    pub order: u32,
    pub coefficient: Coef,
}

/// coefficient * psi(z + shift)
#[derive(Clone, Debug, PartialEq)]
pub struct DigammaAtom {
    pub coefficient: Coef,
    pub shift: Complex64,
}

/// coefficient * exp(-rate * z)
#[derive(Clone, Debug, PartialEq)]
pub struct ExpAtom {
    pub coefficient: Coef,
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct MeroSum {
    pub poly: Vec<Coef>,
    pub poles: Vec<Pole>,
    pub higher_poles: Vec<HigherPole>,
    pub digamma: Vec<DigammaAtom>,
    pub exp: Vec<ExpAtom>,
}

fn clean(z: Complex64) -> Complex64 {
    // folds -0.0 into 0.0 so that equal points have equal bits
    Complex64::new(z.re + 0.0, z.im + 0.0)
}

fn key(z: Complex64) -> (u64, u64) {
    (z.re.to_bits(), z.im.to_bits())
}

fn cmp_c(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn binom(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

impl MeroSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Coef) -> Self {
        Self { poly: vec![c], ..Self::default() }.canonical()
    }

    pub fn polynomial(c: Vec<Coef>) -> Self {
        Self { poly: c, ..Self::default() }.canonical()
    }

    pub fn pole(location: Complex64, residue: Coef) -> Self {
        Self { poles: vec![Pole { location, residue }], ..Self::default() }.canonical()
    }

    pub fn higher_pole(location: Complex64, order: u32, coefficient: Coef) -> Self {
        match order {
            0 => Self::constant(coefficient),
            1 => Self::pole(location, coefficient),
            _ => Self { higher_poles: vec![HigherPole { location, order, coefficient }], ..Self::default() }.canonical(),
        }
    }

    pub fn digamma_atom(coefficient: Coef, shift: Complex64) -> Self {
        Self { digamma: vec![DigammaAtom { coefficient, shift }], ..Self::default() }.canonical()
    }

    pub fn exp_atom(coefficient: Coef, rate: f64) -> Self {
        Self { exp: vec![ExpAtom { coefficient, rate }], ..Self::default() }.canonical()
    }

    /// Merges like terms, drops zeros and sorts; structural equality of
    /// canonical sums is equality of functions on the exact path.
    pub fn canonical(mut self) -> Self {
        while self.poly.last().is_some_and(Coef::is_zero) {
            self.poly.pop();
        }

        let mut poles: Vec<Pole> = Vec::new();
        self.poles.sort_by(|a, b| cmp_c(&clean(a.location), &clean(b.location)));
        for p in self.poles.drain(..) {
            let loc = clean(p.location);
            match poles.last_mut() {
                Some(last) if key(last.location) == key(loc) => last.residue = &last.residue + &p.residue,
                _ => poles.push(Pole { location: loc, residue: p.residue }),
            }
        }
        poles.retain(|p| !p.residue.is_zero());
        self.poles = poles;

        let mut hp: Vec<HigherPole> = Vec::new();
        self.higher_poles
            .sort_by(|a, b| a.order.cmp(&b.order).then(cmp_c(&clean(a.location), &clean(b.location))));
        for p in self.higher_poles.drain(..) {
            let loc = clean(p.location);
            match hp.last_mut() {
                Some(last) if last.order == p.order && key(last.location) == key(loc) => {
                    last.coefficient = &last.coefficient + &p.coefficient
                }
                _ => hp.push(HigherPole { location: loc, order: p.order, coefficient: p.coefficient }),
            }
        }
        hp.retain(|p| !p.coefficient.is_zero());
        self.higher_poles = hp;

        let mut dg: Vec<DigammaAtom> = Vec::new();
        self.digamma.sort_by(|a, b| cmp_c(&clean(a.shift), &clean(b.shift)));
        for d in self.digamma.drain(..) {
            let s = clean(d.shift);
            match dg.last_mut() {
                Some(last) if key(last.shift) == key(s) => last.coefficient = &last.coefficient + &d.coefficient,
                _ => dg.push(DigammaAtom { coefficient: d.coefficient, shift: s }),
            }
        }
        dg.retain(|d| !d.coefficient.is_zero());
        self.digamma = dg;

        let mut ex: Vec<ExpAtom> = Vec::new();
        self.exp.sort_by(|a, b| a.rate.total_cmp(&b.rate));
        for e in self.exp.drain(..) {
            match ex.last_mut() {
                Some(last) if last.rate.to_bits() == (e.rate + 0.0).to_bits() => {
                    last.coefficient = &last.coefficient + &e.coefficient
                }
                _ => ex.push(ExpAtom { coefficient: e.coefficient, rate: e.rate + 0.0 }),
            }
        }
        ex.retain(|e| !e.coefficient.is_zero());
        self.exp = ex;
        self
    }

    pub fn is_zero(&self) -> bool {
        let c = self.clone().canonical();
        c.poly.is_empty() && c.poles.is_empty() && c.higher_poles.is_empty() && c.digamma.is_empty() && c.exp.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.poly.len().max(other.poly.len());
        let poly = (0..n)
            .map(|k| {
                let a = self.poly.get(k).cloned().unwrap_or_default();
                let b = other.poly.get(k).cloned().unwrap_or_default();
                &a + &b
            })
            .collect();
        Self {
            poly,
            poles: self.poles.iter().chain(&other.poles).cloned().collect(),
            higher_poles: self.higher_poles.iter().chain(&other.higher_poles).cloned().collect(),
            digamma: self.digamma.iter().chain(&other.digamma).cloned().collect(),
            exp: self.exp.iter().chain(&other.exp).cloned().collect(),
        }
        .canonical()
    }

    pub fn scale(&self, c: &Coef) -> Self {
        Self {
            poly: self.poly.iter().map(|x| x * c).collect(),
            poles: self.poles.iter().map(|p| Pole { location: p.location, residue: &p.residue * c }).collect(),
            higher_poles: self
                .higher_poles
                .iter()
                .map(|p| HigherPole { location: p.location, order: p.order, coefficient: &p.coefficient * c })
                .collect(),
            digamma: self
                .digamma
                .iter()
                .map(|d| DigammaAtom { coefficient: &d.coefficient * c, shift: d.shift })
                .collect(),
            exp: self.exp.iter().map(|e| ExpAtom { coefficient: &e.coefficient * c, rate: e.rate }).collect(),
        }
        .canonical()
    }

    pub fn neg(&self) -> Self {
        self.scale(&Coef::integer(-1))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// z -> f(z + a) for an integer a.
    pub fn shift(&self, a: i64) -> Self {
        let n = self.poly.len();
        let poly = (0..n)
            .map(|j| {
                let mut acc = Coef::zero();
                for k in j..n {
                    let f = binom(k, j) * a.pow((k - j) as u32);
                    acc = &acc + &(&self.poly[k] * &Coef::integer(f));
                }
                acc
            })
            .collect();
        let af = a as f64;
        Self {
            poly,
            poles: self.poles.iter().map(|p| Pole { location: p.location - af, residue: p.residue.clone() }).collect(),
            higher_poles: self
                .higher_poles
                .iter()
                .map(|p| HigherPole { location: p.location - af, order: p.order, coefficient: p.coefficient.clone() })
                .collect(),
            digamma: self
                .digamma
                .iter()
                .map(|d| DigammaAtom { coefficient: d.coefficient.clone(), shift: d.shift + af })
                .collect(),
            exp: self
                .exp
                .iter()
                .map(|e| ExpAtom { coefficient: &e.coefficient * &Coef::real((-e.rate * af).exp()), rate: e.rate })
                .collect(),
        }
        .canonical()
    }

    /// z -> f(-z). `None` when digamma or exponential atoms are present.
    pub fn reflect(&self) -> Option<Self> {
        if !self.digamma.is_empty() || !self.exp.is_empty() {
            return None;
        }
        let poly = self
            .poly
            .iter()
            .enumerate()
            .map(|(k, c)| if k % 2 == 1 { -c } else { c.clone() })
            .collect();
        Some(
            Self {
                poly,
                poles: self.poles.iter().map(|p| Pole { location: -p.location, residue: -&p.residue }).collect(),
                higher_poles: self
                    .higher_poles
                    .iter()
                    .map(|p| HigherPole {
                        location: -p.location,
                        order: p.order,
                        coefficient: if p.order % 2 == 1 { -&p.coefficient } else { p.coefficient.clone() },
                    })
                    .collect(),
                ..Self::default()
            }
            .canonical(),
        )
    }

    pub fn evaluate(&self, z: Complex64) -> Result<Complex64, MeroError> {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.poly.iter().rev() {
            acc = acc * z + c.to_complex();
        }
        for p in &self.poles {
            if p.location == z {
                return Err(MeroError::PoleEvaluation(z));
            }
            acc += p.residue.to_complex() / (z - p.location);
        }
        for p in &self.higher_poles {
            if p.location == z {
                return Err(MeroError::PoleEvaluation(z));
            }
            acc += p.coefficient.to_complex() / (z - p.location).powi(p.order as i32);
        }
        for d in &self.digamma {
            let w = z + d.shift;
            if w.im == 0.0 && w.re <= 0.0 && w.re == w.re.round() {
                return Err(MeroError::PoleEvaluation(z));
            }
            acc += d.coefficient.to_complex() * digamma(w);
        }
        for e in &self.exp {
            acc += e.coefficient.to_complex() * (-e.rate * z).exp();
        }
        Ok(acc)
    }

    /// Residue at z0: stored simple poles within `tol`, plus -c for every
    /// digamma atom whose argument hits a nonpositive integer there.
    pub fn residue_at(&self, z0: Complex64, tol: f64) -> Coef {
        let mut r = Coef::zero();
        for p in &self.poles {
            if (p.location - z0).norm() <= tol {
                r = &r + &p.residue;
            }
        }
        for d in &self.digamma {
            let w = z0 + d.shift;
            let n = w.re.round();
            if n <= 0.0 && (w - Complex64::new(n, 0.0)).norm() <= tol {
                r = &r - &d.coefficient;
            }
        }
        r
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(MeroJson::from(self)).expect("serializable")
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct MeroJson {
    poly_part: Vec<[f64; 2]>,
    poles: Vec<PoleJson>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    higher_poles: Vec<HigherPoleJson>,
    digamma_atoms: Vec<DigammaJson>,
    exp_atoms: Vec<ExpJson>,
}

#[derive(Serialize)]
struct PoleJson {
    location: [f64; 2],
    residue: [f64; 2],
}

#[derive(Serialize)]
struct HigherPoleJson {
    location: [f64; 2],
    order: u32,
    coefficient: [f64; 2],
}

#[derive(Serialize)]
struct DigammaJson {
    coefficient: [f64; 2],
    shift: [f64; 2],
}

#[derive(Serialize)]
struct ExpJson {
    coefficient: [f64; 2],
    rate: f64,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

impl From<&MeroSum> for MeroJson {
    fn from(m: &MeroSum) -> Self {
        Self {
            poly_part: m.poly.iter().map(|c| pair(c.to_complex())).collect(),
            poles: m
                .poles
                .iter()
                .map(|p| PoleJson { location: pair(p.location), residue: pair(p.residue.to_complex()) })
                .collect(),
            higher_poles: m
                .higher_poles
                .iter()
                .map(|p| HigherPoleJson {
                    location: pair(p.location),
                    order: p.order,
                    coefficient: pair(p.coefficient.to_complex()),
                })
                .collect(),
            digamma_atoms: m
                .digamma
                .iter()
                .map(|d| DigammaJson { coefficient: pair(d.coefficient.to_complex()), shift: pair(d.shift) })
                .collect(),
            exp_atoms: m
                .exp
                .iter()
                .map(|e| ExpJson { coefficient: pair(e.coefficient.to_complex()), rate: e.rate })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn residues_and_cancellation() {
        let m = MeroSum::pole(c(0.0, 0.0), Coef::integer(2));
        assert_eq!(m.residue_at(c(0.0, 0.0), 1e-12), Coef::integer(2));
        let d = MeroSum::digamma_atom(Coef::integer(-2), c(1.0, 0.0));
        assert_eq!(d.residue_at(c(-1.0, 0.0), 1e-12), Coef::integer(2));
        let z = m.add(&m.neg());
        assert!(z.is_zero());
        assert_eq!(z.residue_at(c(0.0, 0.0), 1e-12), Coef::zero());
        assert_eq!(m.evaluate(c(0.0, 0.0)), Err(MeroError::PoleEvaluation(c(0.0, 0.0))));
    }

    #[test]
    fn digamma_evaluation() {
        let g = crate::special::euler_gamma();
        let m = MeroSum::digamma_atom(Coef::one(), c(0.0, 0.0));
        assert!((m.evaluate(c(1.0, 0.0)).unwrap().re + 0.577_215_664_901_532_9).abs() < 1e-15);
        assert!((m.evaluate(c(2.0, 0.0)).unwrap().re - (1.0 - g)).abs() < 1e-15);
    }

    #[test]
    fn shift_moves_everything() {
        let m = MeroSum::polynomial(vec![Coef::integer(1), Coef::integer(2), Coef::integer(3)])
            .add(&MeroSum::pole(c(0.5, 1.0), Coef::rational(1, 2)))
            .add(&MeroSum::higher_pole(c(0.0, 0.0), 3, Coef::integer(4)))
            .add(&MeroSum::digamma_atom(Coef::integer(-1), c(1.0, 0.0)))
            .add(&MeroSum::exp_atom(Coef::integer(1), 0.7));
        let s = m.shift(2);
        for &z in &[c(0.3, 0.2), c(-1.7, 2.0), c(4.0, -1.0)] {
            let a = s.evaluate(z).unwrap();
            let b = m.evaluate(z + 2.0).unwrap();
            assert!((a - b).norm() < 1e-12 * (1.0 + b.norm()));
        }
        assert!(s.shift(-2).sub(&m).digamma.is_empty());
    }

    #[test]
    fn reflection() {
        let m = MeroSum::polynomial(vec![Coef::integer(1), Coef::integer(2)])
            .add(&MeroSum::pole(c(0.5, 1.0), Coef::rational(1, 2)))
            .add(&MeroSum::higher_pole(c(0.0, 0.0), 2, Coef::integer(3)));
        let r = m.reflect().unwrap();
        let z = c(0.3, -0.4);
        assert!((r.evaluate(z).unwrap() - m.evaluate(-z).unwrap()).norm() < 1e-13);
        assert!(MeroSum::digamma_atom(Coef::one(), c(0.0, 0.0)).reflect().is_none());
    }

    #[test]
    fn json_shape() {
        let m = MeroSum::pole(c(0.0, 1.0), Coef::one());
        let j = m.to_json();
        assert_eq!(j["poles"][0]["location"][1], 1.0);
        assert!(j.get("higherPoles").is_none());
        assert!(j["polyPart"].as_array().unwrap().is_empty());
    }
}
