//! Twisted chain complex of the infinite cyclic cover and the twisted
//! Alexander invariant A*(t) = char0 * char2 / char1.
//!
//! Chains are row vectors: C2 = Lambda^R -> C1 = Lambda^G -> C0 = Lambda,
//! x -> x*d1 and y -> y*d0, where d1 holds the evaluated Fox derivatives and
//! d0 the entries rho(x_j) t^eps(x_j) - 1. Homology and cohomology differ
//! by t -> 1/t and units, which leaves orders at t = 1 unchanged.

use serde::Serialize;
use thiserror::Error;

use crate::lauralg::{field_rank, reduce_column, smith_form, CyclotomicNumber, LaurentMatrix, LaurentPoly};
use crate::presentation::{evaluate_twisted, fox_derivative, Epsilon, GroupPresentation, GroupWord, PresentationFile, UnitCharacter};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlexanderError {
    #[error("twisted H{0} of the infinite cyclic cover is not torsion")]
    NotTorsion(u8),
    #[error("d1 * d0 != 0; the presentation data is inconsistent")]
    ComplexConditionViolation,
    #[error("H^0 of the infinite cyclic cover does not vanish at t = 1")]
    HypothesisNotMet,
}

#[derive(Debug, Clone)]
pub struct TwistedComplex {
    /// relators x generators
    pub d1: LaurentMatrix,
    /// generators x 1
    pub d0: LaurentMatrix,
}

pub fn build_complex(p: &GroupPresentation, rho: &UnitCharacter, eps: &Epsilon) -> Result<TwistedComplex, AlexanderError> {
    let g = p.generator_count();
    let d1 = LaurentMatrix::from_rows(
        p.relators
            .iter()
            .map(|r| (0..g).map(|j| evaluate_twisted(&fox_derivative(r, j), rho, eps)).collect())
            .collect(),
    );
    let d1 = if p.relators.is_empty() { LaurentMatrix::zeros(0, g) } else { d1 };
    let d0 = LaurentMatrix::from_rows(
        (0..g)
            .map(|j| {
                let x = GroupWord::letter(j, 1);
                let v = evaluate_twisted(&crate::presentation::GroupRingElement::from_word(&x), rho, eps);
                vec![&v - &LaurentPoly::one()]
            })
            .collect(),
    );
    if !d1.mul(&d0).is_zero() {
        return Err(AlexanderError::ComplexConditionViolation);
    }
    Ok(TwistedComplex { d1, d0 })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AlexanderData {
    #[serde(serialize_with = "as_text")]
    pub char0: LaurentPoly,
    #[serde(serialize_with = "as_text")]
    pub char1: LaurentPoly,
    #[serde(serialize_with = "as_text")]
    pub char2: LaurentPoly,
    pub ord_at_one: i64,
    pub h0: usize,
    pub h1: usize,
    pub semisimple_at_one: bool,
    pub h0_infinity_vanishes: bool,
    #[serde(serialize_with = "all_as_text")]
    pub h1_divisors: Vec<LaurentPoly>,
    pub warnings: Vec<String>,
}

fn as_text<S: serde::Serializer>(p: &LaurentPoly, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

fn all_as_text<S: serde::Serializer>(v: &[LaurentPoly], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ToString::to_string))
}

pub fn alexander_invariant(p: &GroupPresentation, rho: &UnitCharacter, eps: &Epsilon) -> Result<AlexanderData, AlexanderError> {
    let cx = build_complex(p, rho, eps)?;
    let g = p.generator_count();
    let r = p.relators.len();
    let col: Vec<LaurentPoly> = (0..g).map(|j| cx.d0.get(j, 0).clone()).collect();
    let red = reduce_column(&col);
    let char0 = red.gcd.clone();
    if char0.is_zero() {
        return Err(AlexanderError::NotTorsion(0));
    }
    // In the basis y' = y P^-1 the cycles are {y'_0 = 0} and the boundaries
    // are the rows of d1 P^-1, whose first column vanishes.
    let n_full = cx.d1.mul(&red.inverse);
    debug_assert!((0..r).all(|i| n_full.get(i, 0).is_zero()));
    let n = n_full.without_col(0);
    let divisors = if g > 1 && r > 0 { smith_form(&n) } else { Vec::new() };
    let rank = divisors.iter().filter(|d| !d.is_zero()).count();
    if rank < g - 1 {
        return Err(AlexanderError::NotTorsion(1));
    }
    if rank < r {
        return Err(AlexanderError::NotTorsion(2));
    }
    let char1 = divisors.iter().fold(LaurentPoly::one(), |a, d| &a * d).normalized();
    let char2 = LaurentPoly::one();
    let ord = |q: &LaurentPoly| q.ord_at_one().expect("nonzero characteristic polynomial") as i64;
    let ord_at_one = ord(&char0) + ord(&char2) - ord(&char1);
    let semisimple_at_one = divisors.iter().all(|d| ord(d) <= 1);
    let h0_infinity_vanishes = ord(&char0) == 0;
    let (h0, h1) = twisted_betti(p, rho);
    let mut warnings = Vec::new();
    if h0_infinity_vanishes && !char0.is_unit() {
        warnings.push(format!(
            "H^0 of the infinite cyclic cover is nonzero with characteristic polynomial {} but has no eigenvalue 1",
            char0
        ));
    }
    let h1_divisors = divisors.into_iter().filter(|d| !d.is_unit()).collect();
    Ok(AlexanderData {
        char0,
        char1,
        char2,
        ord_at_one,
        h0,
        h1,
        semisimple_at_one,
        h0_infinity_vanishes,
        h1_divisors,
        warnings,
    })
}

pub fn alexander_of(file: &PresentationFile) -> Result<AlexanderData, AlexanderError> {
    alexander_invariant(&file.presentation, &file.character, &file.epsilon)
}

/// Dimensions of H^0 and H^1 of the 2-complex with coefficients twisted by
/// rho, from exact ranks of the t-free matrices over Q(zeta_n).
pub fn twisted_betti(p: &GroupPresentation, rho: &UnitCharacter) -> (usize, usize) {
    let g = p.generator_count();
    let zero_eps = Epsilon { values: vec![0; g] };
    let at_one = |e: crate::presentation::GroupRingElement| evaluate_twisted(&e, rho, &zero_eps).coeff(0);
    let d0: Vec<Vec<CyclotomicNumber>> = (0..g)
        .map(|j| {
            let rj = rho.of_word(&GroupWord::letter(j, 1));
            vec![&rj - &CyclotomicNumber::one()]
        })
        .collect();
    let d1: Vec<Vec<CyclotomicNumber>> =
        p.relators.iter().map(|r| (0..g).map(|j| at_one(fox_derivative(r, j))).collect()).collect();
    let r0 = field_rank(&d0);
    let r1 = if d1.is_empty() { 0 } else { field_rank(&d1) };
    (1 - r0, g - r0 - r1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OrderBound {
    pub inequality_holds: bool,
    pub equality_expected: bool,
}

/// Checks ord_{t=1} A* <= -h1, with equality expected when the deck action
/// is semisimple at t = 1.
pub fn order_bound_check(a: &AlexanderData) -> Result<OrderBound, AlexanderError> {
    if !a.h0_infinity_vanishes {
        return Err(AlexanderError::HypothesisNotMet);
    }
    Ok(OrderBound {
        inequality_holds: a.ord_at_one <= -(a.h1 as i64),
        equality_expected: a.semisimple_at_one,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    fn file(s: &str) -> PresentationFile {
        parse_presentation(s).unwrap()
    }

    #[test]
    fn trefoil_trivial() {
        let f = file("gens a b\nrel a b a B A B\nperi a\neps 1 1\n");
        let a = alexander_of(&f).unwrap();
        assert_eq!(a.char0, LaurentPoly::from_ints(0, &[-1, 1]));
        assert_eq!(a.char1, LaurentPoly::from_ints(0, &[1, -1, 1]));
        assert_eq!(a.char2, LaurentPoly::one());
        assert_eq!(a.ord_at_one, 1);
        assert_eq!((a.h0, a.h1), (1, 1));
        assert!(!a.h0_infinity_vanishes);
        assert_eq!(order_bound_check(&a), Err(AlexanderError::HypothesisNotMet));
    }

    #[test]
    fn figure_eight_trivial() {
        let f = file("gens a b\nrel b a B a b A B a B A\nperi a\neps 1 1\n");
        let a = alexander_of(&f).unwrap();
        assert_eq!(a.char1, LaurentPoly::from_ints(0, &[1, -3, 1]));
        assert_eq!(a.ord_at_one, 1);
        assert_eq!((a.h0, a.h1), (1, 1));
    }

    #[test]
    fn free_group_has_vacuous_complex() {
        let f = file("gens a\neps 1\n");
        let cx = build_complex(&f.presentation, &f.character, &f.epsilon).unwrap();
        assert_eq!(cx.d1.rows(), 0);
        let a = alexander_of(&f).unwrap();
        assert_eq!(a.char1, LaurentPoly::one());
        assert_eq!(a.ord_at_one, 1);
    }

    #[test]
    fn excess_relators_are_not_torsion_in_h2() {
        let f = file("gens a b\nrel a b a B A B\nrel a b a B A B\neps 1 1\n");
        assert_eq!(alexander_of(&f), Err(AlexanderError::NotTorsion(2)));
        let f = file("gens a b c\nrel a b a B A B\neps 1 1 1\n");
        assert_eq!(alexander_of(&f), Err(AlexanderError::NotTorsion(1)));
    }

    #[test]
    fn twisted_trefoil_sixth_root() {
        let f = file("gens a b\nrel a b a B A B\nperi a\neps 1 1\nrho n=6: 1 1\n");
        let a = alexander_of(&f).unwrap();
        assert_eq!((a.h0, a.h1), (0, 1));
        assert_eq!(a.ord_at_one, -1);
        assert!(a.semisimple_at_one);
        let c = order_bound_check(&a).unwrap();
        assert!(c.inequality_holds && c.equality_expected);
        assert_eq!(a.ord_at_one, -(a.h1 as i64));
    }

    #[test]
    fn unit_normalization_does_not_move_orders() {
        let f = file("gens a b\nrel b a B a b A B a B A\neps 1 1\nrho n=5: 1 1\n");
        let cx = build_complex(&f.presentation, &f.character, &f.epsilon).unwrap();
        let unit = LaurentPoly::monomial(CyclotomicNumber::root_of_unity(5, 3), -2);
        let scaled = cx.d1.map(|e| e * &unit);
        let red = reduce_column(&(0..2).map(|j| cx.d0.get(j, 0).clone()).collect::<Vec<_>>());
        let d = smith_form(&scaled.mul(&red.inverse).without_col(0));
        let base = alexander_of(&f).unwrap();
        let c1 = d.iter().fold(LaurentPoly::one(), |a, x| &a * x).normalized();
        assert_eq!(c1, base.char1);
    }
}
