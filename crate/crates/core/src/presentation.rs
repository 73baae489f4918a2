//! Finite group presentations, the abelianization epsilon, unit characters
//! rho, Fox calculus and the twisted evaluation into Q(zeta_n)[t, t^-1].
//!
//! Text format, one statement per line (`;` also separates statements):
//!
//! ```text
//! # figure-eight knot
//! gens a b
//! rel b a B a b A B a B A
//! peri a
//! peri b A B a a B A b
//! eps 1 1
//! rho n=5: 1 1
//! vol 2.029883212819307
//! ```
//!
//! Uppercase letters denote inverses. When every generator name is a single
//! letter, tokens may be written without spaces (`baBabABaBA`).

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::lauralg::{CyclotomicNumber, LaurentPoly};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

fn join(d: &[Diagnostic]) -> String {
    d.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PresentationError {
    #[error("syntax error: {}", join(.0))]
    Syntax(Vec<Diagnostic>),
    #[error("validation error: {}", join(.0))]
    Validation(Vec<Diagnostic>),
    #[error("no peripheral words in presentation")]
    MissingPeripheralData,
}

/// A single letter x_i^(+1) or x_i^(-1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub exponent: i8,
}

impl Letter {
    pub fn new(generator: usize, exponent: i8) -> Self {
        assert!(exponent == 1 || exponent == -1, "letter exponent must be +1 or -1");
        Self { generator, exponent }
    }

    pub fn inverse(self) -> Self {
        Self { generator: self.generator, exponent: -self.exponent }
    }
}

/// A word in the generators. Not automatically reduced.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GroupWord(pub Vec<Letter>);

impl GroupWord {
    pub fn identity() -> Self {
        Self(Vec::new())
    }

    pub fn letter(generator: usize, exponent: i8) -> Self {
        Self(vec![Letter::new(generator, exponent)])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    /// Free reduction.
    pub fn reduced(&self) -> Self {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Self(out)
    }

    /// Free and cyclic reduction.
    pub fn cyclically_reduced(&self) -> Self {
        let mut w = self.reduced().0;
        let (mut i, mut j) = (0, w.len());
        while j > i + 1 && w[i] == w[j - 1].inverse() {
            i += 1;
            j -= 1;
        }
        w = w[i..j].to_vec();
        Self(w)
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Self(v)
    }

    pub fn pow(&self, k: usize) -> Self {
        Self(self.0.iter().copied().cycle().take(self.0.len() * k).collect())
    }

    pub fn exponent_sum(&self, generator: usize) -> i64 {
        self.0.iter().filter(|l| l.generator == generator).map(|l| l.exponent as i64).sum()
    }

    /// Renders with the given generator names; single-letter alphabets are
    /// written without separators.
    pub fn to_text(&self, names: &[String]) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        let compact = names.iter().all(|n| n.chars().count() == 1);
        let toks: Vec<String> = self
            .0
            .iter()
            .map(|l| {
                let n = &names[l.generator];
                if l.exponent < 0 { n.to_uppercase() } else { n.clone() }
            })
            .collect();
        toks.join(if compact { "" } else { " " })
    }

    /// Parses a word written with the given generator names.
    pub fn parse(text: &str, names: &[String]) -> Result<Self, String> {
        let compact = names.iter().all(|n| n.chars().count() == 1);
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            if tok == "1" {
                continue;
            }
            if let Some(l) = lookup(tok, names) {
                letters.push(l);
            } else if compact {
                for ch in tok.chars() {
                    let s = ch.to_string();
                    letters.push(lookup(&s, names).ok_or_else(|| format!("unknown generator '{}'", s))?);
                }
            } else {
                return Err(format!("unknown generator '{}'", tok));
            }
        }
        Ok(Self(letters))
    }
}

fn lookup(tok: &str, names: &[String]) -> Option<Letter> {
    if let Some(i) = names.iter().position(|n| n == tok) {
        return Some(Letter::new(i, 1));
    }
    names.iter().position(|n| n.to_uppercase() == tok).map(|i| Letter::new(i, -1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupPresentation {
    pub generator_names: Vec<String>,
    pub relators: Vec<GroupWord>,
    pub peripheral_words: Vec<GroupWord>,
    pub volume: Option<f64>,
    pub comments: Vec<String>,
}

impl GroupPresentation {
    pub fn generator_count(&self) -> usize {
        self.generator_names.len()
    }

    pub fn deficiency(&self) -> i64 {
        self.generator_names.len() as i64 - self.relators.len() as i64
    }
}

/// The surjection onto Z given by integer images of the generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Epsilon {
    pub values: Vec<i64>,
}

impl Epsilon {
    pub fn of_word(&self, w: &GroupWord) -> i64 {
        w.letters().iter().map(|l| self.values[l.generator] * l.exponent as i64).sum()
    }
}

/// rho(x_i) = zeta_n^(exponents[i]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitCharacter {
    pub modulus: u32,
    pub exponents: Vec<u32>,
}

impl UnitCharacter {
    pub fn trivial(generators: usize) -> Self {
        Self { modulus: 1, exponents: vec![0; generators] }
    }

    /// Exponent k with rho(w) = zeta_n^k, reduced mod n.
    pub fn exponent_of(&self, w: &GroupWord) -> u32 {
        let n = self.modulus as i64;
        let s: i64 = w.letters().iter().map(|l| self.exponents[l.generator] as i64 * l.exponent as i64).sum();
        s.rem_euclid(n) as u32
    }

    pub fn of_word(&self, w: &GroupWord) -> CyclotomicNumber {
        CyclotomicNumber::root_of_unity(self.modulus, self.exponent_of(w) as i64)
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&e| e % self.modulus == 0)
    }

    /// Numerical rho values of the generators.
    pub fn generator_values(&self) -> Vec<num_complex::Complex64> {
        self.exponents
            .iter()
            .map(|&e| num_complex::Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * e as f64 / self.modulus as f64))
            .collect()
    }
}

/// A parsed presentation file.
#[derive(Debug, Clone, PartialEq)]
pub struct PresentationFile {
    pub presentation: GroupPresentation,
    pub epsilon: Epsilon,
    pub character: UnitCharacter,
}

impl PresentationFile {
    /// Canonical serialization; `parse(serialize(x)) == x`.
    pub fn serialize(&self) -> String {
        let p = &self.presentation;
        let names = &p.generator_names;
        let mut s = String::new();
        for c in &p.comments {
            s.push_str(&format!("#{}\n", c));
        }
        s.push_str(&format!("gens {}\n", names.join(" ")));
        for r in &p.relators {
            s.push_str(&format!("rel {}\n", spaced(r, names)));
        }
        for w in &p.peripheral_words {
            s.push_str(&format!("peri {}\n", spaced(w, names)));
        }
        let eps: Vec<String> = self.epsilon.values.iter().map(ToString::to_string).collect();
        s.push_str(&format!("eps {}\n", eps.join(" ")));
        let rho: Vec<String> = self.character.exponents.iter().map(ToString::to_string).collect();
        s.push_str(&format!("rho n={}: {}\n", self.character.modulus, rho.join(" ")));
        if let Some(v) = p.volume {
            s.push_str(&format!("vol {}\n", v));
        }
        s
    }

    /// SHA-256 of the canonical serialization, hex encoded.
    pub fn digest(&self) -> String {
        let h = Sha256::digest(self.serialize().as_bytes());
        h.iter().map(|b| format!("{:02x}", b)).collect()
    }
}

fn spaced(w: &GroupWord, names: &[String]) -> String {
    if w.is_empty() {
        return "1".into();
    }
    w.letters()
        .iter()
        .map(|l| if l.exponent < 0 { names[l.generator].to_uppercase() } else { names[l.generator].clone() })
        .collect::<Vec<_>>()
        .join(" ")
}

fn valid_name(n: &str) -> bool {
    let mut ch = n.chars();
    matches!(ch.next(), Some(c) if c.is_ascii_lowercase())
        && ch.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

struct Stmt<'a> {
    line: usize,
    column: usize,
    keyword: &'a str,
    rest: &'a str,
    rest_column: usize,
}

/// Parses and validates a presentation file.
pub fn parse_presentation(text: &str) -> Result<PresentationFile, PresentationError> {
    let mut syntax = Vec::new();
    let mut comments = Vec::new();
    let mut stmts = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let (code, comment) = match raw.find('#') {
            Some(i) => (&raw[..i], Some(&raw[i + 1..])),
            None => (raw, None),
        };
        if let Some(c) = comment {
            if code.trim().is_empty() {
                comments.push(c.to_string());
            }
        }
        let mut offset = 0;
        for piece in code.split(';') {
            let col0 = offset;
            offset += piece.len() + 1;
            let trimmed = piece.trim_start();
            if trimmed.trim().is_empty() {
                continue;
            }
            let lead = piece.len() - trimmed.len();
            let (kw, rest) = trimmed.split_once(char::is_whitespace).unwrap_or((trimmed, ""));
            stmts.push(Stmt {
                line: line_no,
                column: col0 + lead + 1,
                keyword: kw,
                rest,
                rest_column: col0 + lead + kw.len() + 2,
            });
        }
    }
    let diag = |s: &Stmt, m: String| Diagnostic { line: s.line, column: s.column, message: m };

    let gens: Vec<&Stmt> = stmts.iter().filter(|s| s.keyword == "gens").collect();
    let mut names: Vec<String> = Vec::new();
    match gens.as_slice() {
        [] => syntax.push(Diagnostic { line: 1, column: 1, message: "missing 'gens' statement".into() }),
        [g, rest @ ..] => {
            for extra in rest {
                syntax.push(diag(extra, "duplicate 'gens' statement".into()));
            }
            for n in g.rest.split_whitespace() {
                if !valid_name(n) {
                    syntax.push(diag(g, format!("invalid generator name '{}'", n)));
                } else if names.iter().any(|m| m == n) {
                    syntax.push(diag(g, format!("duplicate generator name '{}'", n)));
                } else {
                    names.push(n.to_string());
                }
            }
            if names.is_empty() {
                syntax.push(diag(g, "no generators".into()));
            }
        }
    }

    let mut relators = Vec::new();
    let mut relator_stmts = Vec::new();
    let mut peripheral = Vec::new();
    let mut eps: Option<(Vec<i64>, &Stmt)> = None;
    let mut rho: Option<(u32, Vec<i64>, &Stmt)> = None;
    let mut volume = None;
    let eps_seen = stmts.iter().any(|s| s.keyword == "eps");
    for s in &stmts {
        match s.keyword {
            "gens" => {}
            "rel" | "peri" => match GroupWord::parse(s.rest, &names) {
                Ok(w) => {
                    if s.keyword == "rel" {
                        relators.push(w);
                        relator_stmts.push(s);
                    } else {
                        peripheral.push(w);
                    }
                }
                Err(e) => syntax.push(Diagnostic { line: s.line, column: s.rest_column, message: e }),
            },
            "eps" => {
                let vals: Result<Vec<i64>, _> = s.rest.split_whitespace().map(str::parse).collect();
                match vals {
                    _ if eps.is_some() => syntax.push(diag(s, "duplicate 'eps' statement".into())),
                    Ok(v) => eps = Some((v, s)),
                    Err(_) => syntax.push(diag(s, "eps values must be integers".into())),
                }
            }
            "rho" => {
                if rho.is_some() {
                    syntax.push(diag(s, "duplicate 'rho' statement".into()));
                    continue;
                }
                match parse_rho(s.rest) {
                    Ok((n, v)) => rho = Some((n, v, s)),
                    Err(m) => syntax.push(diag(s, m)),
                }
            }
            "vol" => match s.rest.trim().parse::<f64>() {
                Ok(v) if v.is_finite() && v > 0.0 => volume = Some(v),
                _ => syntax.push(diag(s, "vol must be a positive number".into())),
            },
            other => syntax.push(diag(s, format!("unknown statement '{}'", other))),
        }
    }
    if !eps_seen && !names.is_empty() {
        syntax.push(Diagnostic { line: 1, column: 1, message: "missing 'eps' statement".into() });
    }
    if !syntax.is_empty() {
        return Err(PresentationError::Syntax(syntax));
    }

    let g = names.len();
    let (eps_vals, eps_stmt) = eps.unwrap();
    let mut invalid = Vec::new();
    if eps_vals.len() != g {
        invalid.push(diag(eps_stmt, format!("eps has {} values for {} generators", eps_vals.len(), g)));
    } else if eps_vals.iter().fold(0i64, |a, &b| a.gcd(&b)) != 1 {
        invalid.push(diag(eps_stmt, "eps is not surjective onto Z".into()));
    }
    let character = match rho {
        None => UnitCharacter::trivial(g),
        Some((n, v, s)) => {
            if v.len() != g {
                invalid.push(diag(s, format!("rho has {} exponents for {} generators", v.len(), g)));
            }
            UnitCharacter {
                modulus: n,
                exponents: v.iter().map(|&e| e.rem_euclid(n as i64) as u32).collect(),
            }
        }
    };
    if invalid.is_empty() {
        let epsilon = Epsilon { values: eps_vals.clone() };
        for (r, s) in relators.iter().zip(&relator_stmts) {
            let e = epsilon.of_word(r);
            if e != 0 {
                invalid.push(Diagnostic {
                    line: s.line,
                    column: s.rest_column,
                    message: format!("relator '{}' has epsilon-exponent {}", s.rest.trim(), e),
                });
            }
            let k = character.exponent_of(r);
            if k != 0 {
                invalid.push(Diagnostic {
                    line: s.line,
                    column: s.rest_column,
                    message: format!(
                        "relator '{}' maps to zeta_{}^{} under rho, not 1",
                        s.rest.trim(),
                        character.modulus,
                        k
                    ),
                });
            }
        }
    }
    if !invalid.is_empty() {
        return Err(PresentationError::Validation(invalid));
    }
    Ok(PresentationFile {
        presentation: GroupPresentation {
            generator_names: names,
            relators,
            peripheral_words: peripheral,
            volume,
            comments,
        },
        epsilon: Epsilon { values: eps_vals },
        character,
    })
}

fn parse_rho(rest: &str) -> Result<(u32, Vec<i64>), String> {
    let (head, tail) = rest.split_once(':').ok_or("rho must look like 'rho n=<int>: e1 e2 ...'")?;
    let n = head
        .trim()
        .strip_prefix("n=")
        .and_then(|v| v.trim().parse::<u32>().ok())
        .filter(|&n| n >= 1)
        .ok_or("rho order must be a positive integer")?;
    let v: Result<Vec<i64>, _> = tail.split_whitespace().map(str::parse).collect();
    Ok((n, v.map_err(|_| "rho exponents must be integers")?))
}

/// Element of the integral group ring Z[F] of the free group, keyed by
/// reduced words.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroupRingElement {
    pub terms: BTreeMap<GroupWord, i64>,
}

impl GroupRingElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_word(w: &GroupWord) -> Self {
        let mut e = Self::zero();
        e.add_term(w.reduced(), 1);
        e
    }

    pub fn add_term(&mut self, w: GroupWord, c: i64) {
        if c == 0 {
            return;
        }
        let w = w.reduced();
        let v = self.terms.entry(w.clone()).or_insert(0);
        *v += c;
        if *v == 0 {
            self.terms.remove(&w);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, &c) in &other.terms {
            out.add_term(w.clone(), c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (u, &a) in &self.terms {
            for (v, &b) in &other.terms {
                out.add_term(u.concat(v), a * b);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Fox derivative d w / d x_j in Z[F].
///
/// Each occurrence of x_j contributes its prefix; each occurrence of x_j^(-1)
/// contributes minus the prefix including that letter.
pub fn fox_derivative(w: &GroupWord, j: usize) -> GroupRingElement {
    let mut out = GroupRingElement::zero();
    let mut prefix: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in w.letters() {
        if l.generator == j && l.exponent > 0 {
            out.add_term(GroupWord(prefix.clone()), 1);
        }
        prefix.push(l);
        if l.generator == j && l.exponent < 0 {
            out.add_term(GroupWord(prefix.clone()), -1);
        }
    }
    out
}

/// Image of a group ring element under w -> rho(w) t^(eps(w)).
pub fn evaluate_twisted(e: &GroupRingElement, rho: &UnitCharacter, eps: &Epsilon) -> LaurentPoly {
    let mut acc: BTreeMap<(i64, u32), i64> = BTreeMap::new();
    for (w, &c) in &e.terms {
        *acc.entry((eps.of_word(w), rho.exponent_of(w))).or_insert(0) += c;
    }
    let mut out = LaurentPoly::zero();
    for ((k, r), c) in acc {
        if c != 0 {
            let coeff = &CyclotomicNumber::from_integer(c) * &CyclotomicNumber::root_of_unity(rho.modulus, r as i64);
            out = &out + &LaurentPoly::monomial(coeff, k);
        }
    }
    out
}

/// Whether rho is trivial on every peripheral word.
pub fn peripheral_trivial(p: &GroupPresentation, rho: &UnitCharacter) -> Result<bool, PresentationError> {
    if p.peripheral_words.is_empty() {
        return Err(PresentationError::MissingPeripheralData);
    }
    Ok(p.peripheral_words.iter().all(|w| rho.exponent_of(w) == 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const FIG8: &str = "# figure-eight knot\ngens a b\nrel b a B a b A B a B A\nperi a\nperi bABaaBAb\neps 1 1\nrho n=5: 1 1\nvol 2.029883212819307\n";

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parses_figure_eight() {
        let f = parse_presentation(FIG8).unwrap();
        assert_eq!(f.presentation.generator_names, names(&["a", "b"]));
        assert_eq!(f.presentation.relators.len(), 1);
        assert_eq!(f.presentation.relators[0].len(), 10);
        assert_eq!(f.presentation.peripheral_words[1].len(), 8);
        assert_eq!(f.character.modulus, 5);
        assert_eq!(f.presentation.volume, Some(2.029883212819307));
        assert_eq!(f.presentation.comments, vec![" figure-eight knot".to_string()]);
    }

    #[test]
    fn canonical_roundtrip_and_digest() {
        let f = parse_presentation(FIG8).unwrap();
        let s = f.serialize();
        let g = parse_presentation(&s).unwrap();
        assert_eq!(f, g);
        assert_eq!(g.serialize(), s);
        assert_eq!(f.digest(), g.digest());
        assert_eq!(f.digest().len(), 64);
    }

    #[test]
    fn semicolons_separate_statements() {
        let f = parse_presentation("gens a b; rel a b a B A B; eps 1 1").unwrap();
        assert_eq!(f.presentation.relators.len(), 1);
        assert!(f.character.is_trivial());
    }

    #[test]
    fn multi_letter_names() {
        let f = parse_presentation("gens x1 x2\nrel x1 x2 X1 X2\neps 1 1\n").unwrap();
        assert_eq!(f.presentation.relators[0].to_text(&f.presentation.generator_names), "x1 x2 X1 X2");
        let err = parse_presentation("gens x1 x2\nrel x1x2\neps 1 1\n").unwrap_err();
        assert!(matches!(err, PresentationError::Syntax(_)));
    }

    #[test]
    fn reports_every_syntax_error_with_position() {
        let err = parse_presentation("gens a b\nrel a q\nfoo 3\neps 1 x\n").unwrap_err();
        let PresentationError::Syntax(d) = err else { panic!("expected syntax error") };
        assert_eq!(d.len(), 3);
        assert_eq!((d[0].line, d[0].column), (2, 5));
        assert_eq!(d[1].line, 3);
        assert_eq!(d[2].line, 4);
    }

    #[test]
    fn rejects_rho_not_killing_relator() {
        let err = parse_presentation("gens a b\nrel a b a B A B\neps 1 1\nrho n=5: 1 2\n").unwrap_err();
        let PresentationError::Validation(d) = err else { panic!("expected validation error") };
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].line, 2);
        assert!(d[0].message.contains("a b a B A B"));
    }

    #[test]
    fn rejects_epsilon_not_killing_relator() {
        let err = parse_presentation("gens a b\nrel a a b\neps 1 1\n").unwrap_err();
        assert!(matches!(err, PresentationError::Validation(_)));
        let err = parse_presentation("gens a b\nrel a B\neps 2 2\n").unwrap_err();
        assert!(matches!(err, PresentationError::Validation(_)));
    }

    #[test]
    fn peripheral_triviality() {
        let f = parse_presentation(FIG8).unwrap();
        assert!(!peripheral_trivial(&f.presentation, &f.character).unwrap());
        let triv = UnitCharacter::trivial(2);
        assert!(peripheral_trivial(&f.presentation, &triv).unwrap());
        let mut p = f.presentation.clone();
        p.peripheral_words.clear();
        assert_eq!(peripheral_trivial(&p, &triv), Err(PresentationError::MissingPeripheralData));
    }

    #[test]
    fn trefoil_fox_derivative_gives_alexander_polynomial() {
        let f = parse_presentation("gens a b\nrel a b a B A B\neps 1 1\n").unwrap();
        let d = fox_derivative(&f.presentation.relators[0], 0);
        let p = evaluate_twisted(&d, &f.character, &f.epsilon);
        assert_eq!(p.normalized(), LaurentPoly::from_ints(0, &[1, -1, 1]));
    }

    #[test]
    fn fox_of_single_letters() {
        let a = GroupWord::letter(0, 1);
        let ai = GroupWord::letter(0, -1);
        assert_eq!(fox_derivative(&a, 0), GroupRingElement::from_word(&GroupWord::identity()));
        let mut want = GroupRingElement::zero();
        want.add_term(ai.clone(), -1);
        assert_eq!(fox_derivative(&ai, 0), want);
        assert!(fox_derivative(&a, 1).is_zero());
    }

    // Product-rule recursion, independent of the prefix scan.
    fn fox_oracle(w: &[Letter], j: usize) -> GroupRingElement {
        match w.len() {
            0 => GroupRingElement::zero(),
            1 => {
                let l = w[0];
                let mut e = GroupRingElement::zero();
                if l.generator == j {
                    if l.exponent > 0 {
                        e.add_term(GroupWord::identity(), 1);
                    } else {
                        e.add_term(GroupWord(vec![l]), -1);
                    }
                }
                e
            }
            n => {
                let (u, v) = w.split_at(n / 2);
                let du = fox_oracle(u, j);
                let dv = fox_oracle(v, j);
                du.add(&GroupRingElement::from_word(&GroupWord(u.to_vec())).mul(&dv))
            }
        }
    }

    fn arb_word() -> impl Strategy<Value = GroupWord> {
        prop::collection::vec((0usize..3, prop::bool::ANY), 0..12)
            .prop_map(|v| GroupWord(v.into_iter().map(|(g, s)| Letter::new(g, if s { 1 } else { -1 })).collect()))
    }

    proptest! {
        #[test]
        fn fox_matches_product_rule_oracle(w in arb_word(), j in 0usize..3) {
            prop_assert_eq!(fox_derivative(&w, j), fox_oracle(w.letters(), j));
        }

        #[test]
        fn fox_product_rule(u in arb_word(), v in arb_word(), j in 0usize..3) {
            let lhs = fox_derivative(&u.concat(&v), j);
            let rhs = fox_derivative(&u, j).add(&GroupRingElement::from_word(&u).mul(&fox_derivative(&v, j)));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn fundamental_formula(w in arb_word()) {
            // sum_j (dw/dx_j)(x_j - 1) = w - 1
            let mut lhs = GroupRingElement::zero();
            for j in 0..3 {
                let mut xm1 = GroupRingElement::from_word(&GroupWord::letter(j, 1));
                xm1.add_term(GroupWord::identity(), -1);
                lhs = lhs.add(&fox_derivative(&w, j).mul(&xm1));
            }
            let mut rhs = GroupRingElement::from_word(&w);
            rhs.add_term(GroupWord::identity(), -1);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn reduction_is_idempotent(w in arb_word()) {
            let r = w.reduced();
            prop_assert_eq!(r.reduced(), r.clone());
            let c = w.cyclically_reduced();
            prop_assert_eq!(c.cyclically_reduced(), c.clone());
            prop_assert_eq!(w.concat(&w.inverse()).reduced(), GroupWord::identity());
        }
    }
}
