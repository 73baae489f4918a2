//! Randomized property checks that can run from the command line, seeded so
//! that a run is reproducible.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cuspterms::{epstein, unipotent_lprime, Lattice2D, LatticeCharacter, UnipotentCase};
use crate::laplace::{lprime_closed, numeric_lprime, spectral_lprime, zero_count, Coef, HeatAtom};
use crate::lauralg::{smith_form, LaurentMatrix, LaurentPoly};
use crate::par::Execution;
use crate::presentation::{fox_derivative, GroupRingElement, GroupWord, Letter};
use crate::ruelle::fried_residual;
use crate::spectrum::{enumerate_classes, Completeness, EnumerationOptions, GeneratorSet, MoebiusMatrix, Spectrum};
use crate::verdict::{l2_betti, ruelle_order_prediction};

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub detail: String,
}

fn check(name: &'static str, cases: usize, failure: Option<String>) -> CheckResult {
    CheckResult { name, passed: failure.is_none(), cases, detail: failure.unwrap_or_default() }
}

fn random_word(rng: &mut ChaCha8Rng, gens: usize, len: usize) -> GroupWord {
    GroupWord((0..len).map(|_| Letter::new(rng.gen_range(0..gens), if rng.gen() { 1 } else { -1 })).collect()).reduced()
}

fn fox_fundamental(rng: &mut ChaCha8Rng, cases: usize) -> CheckResult {
    for _ in 0..cases {
        let len = rng.gen_range(0..12);
        let w = random_word(rng, 3, len);
        let mut lhs = GroupRingElement::zero();
        for j in 0..3 {
            let mut xj = GroupRingElement::from_word(&GroupWord::letter(j, 1));
            xj.add_term(GroupWord::identity(), -1);
            lhs = lhs.add(&fox_derivative(&w, j).mul(&xj));
        }
        let mut rhs = GroupRingElement::from_word(&w);
        rhs.add_term(GroupWord::identity(), -1);
        if lhs != rhs {
            return check("fox-fundamental-formula", cases, Some(format!("fails for {:?}", w)));
        }
    }
    check("fox-fundamental-formula", cases, None)
}

fn random_poly(rng: &mut ChaCha8Rng) -> LaurentPoly {
    let n = rng.gen_range(1..4);
    let c: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
    LaurentPoly::from_ints(rng.gen_range(-1..=1), &c)
}

fn smith_invariance(rng: &mut ChaCha8Rng, cases: usize) -> CheckResult {
    for _ in 0..cases {
        let m = LaurentMatrix::from_rows((0..2).map(|_| (0..3).map(|_| random_poly(rng)).collect()).collect());
        let mut u = m.clone();
        u.add_row_multiple(0, 1, &random_poly(rng));
        u.add_col_multiple(2, 0, &random_poly(rng));
        u.swap_cols(0, 1);
        if smith_form(&m) != smith_form(&u) {
            return check("smith-unimodular-invariance", cases, Some(format!("differs for\n{}", m)));
        }
    }
    check("smith-unimodular-invariance", cases, None)
}

fn transforms(rng: &mut ChaCha8Rng, cases: usize) -> CheckResult {
    for _ in 0..cases {
        let atom = match rng.gen_range(0..3) {
            0 => HeatAtom::exp(rng.gen_range(0.0..4.0), Coef::one()),
            1 => HeatAtom::power(rng.gen_range(-1..=2), Coef::one()),
            _ => HeatAtom::theta(rng.gen_range(0.5..2.0), Coef::one()),
        };
        let z = Complex64::new(rng.gen_range(0.75..3.0), 0.0);
        let closed = lprime_closed(&atom).and_then(|m| m.evaluate(z).map_err(|_| crate::laplace::LaplaceError::Divergent(z)));
        let num = numeric_lprime(&atom, z);
        match (closed, num) {
            (Ok(a), Ok(b)) if (a - b).norm() <= 1e-8 * a.norm().max(1e-300) => {}
            (a, b) => {
                return check("transform-closed-vs-quadrature", cases, Some(format!("{:?} at z={}: {:?} vs {:?}", atom.kind, z, a, b)))
            }
        }
    }
    check("transform-closed-vs-quadrature", cases, None)
}

fn spectral_identities(rng: &mut ChaCha8Rng, cases: usize) -> CheckResult {
    for _ in 0..cases {
        let list = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..rng.gen_range(0..5)).map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(1..40) as f64 / 8.0 }).collect()
        };
        let e0 = list(rng);
        let e1 = list(rng);
        let (l0, l1) = spectral_lprime(&e0, &e1);
        let (b0, b1) = (zero_count(&e0), zero_count(&e1));
        let zero = Complex64::new(0.0, 0.0);
        if l1.reflect() != Some(l1.neg()) {
            return check("spectral-identities", cases, Some(format!("oddness fails for {:?} {:?}", e0, e1)));
        }
        if l1.residue_at(zero, 0.0) != Coef::integer(2 * (b1 - b0)) {
            return check("spectral-identities", cases, Some(format!("residue fails for {:?} {:?}", e0, e1)));
        }
        let z = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.1..2.0));
        let (Ok(a), Ok(b)) = (l0.evaluate(1.0 + z), l0.evaluate(1.0 - z)) else { continue };
        if (a + b).norm() > 1e-10 * a.norm().max(1.0) {
            return check("spectral-identities", cases, Some(format!("functional equation fails for {:?}", e0)));
        }
    }
    check("spectral-identities", cases, None)
}

fn betti_coherence() -> CheckResult {
    let mut n = 0;
    for h0 in 0..=1 {
        for h1 in 0..=10 {
            for delta in [false, true] {
                n += 1;
                if let Ok((b0, b1)) = l2_betti(h0, h1, delta) {
                    if ruelle_order_prediction(h0, h1, delta).ok() != Some(2 * (2 * b0 - b1)) {
                        return check("betti-prediction-coherence", n, Some(format!("({}, {}, {})", h0, h1, delta)));
                    }
                }
            }
        }
    }
    check("betti-prediction-coherence", n, None)
}

fn fried(rng: &mut ChaCha8Rng, cases: usize) -> CheckResult {
    for _ in 0..cases {
        let l = rng.gen_range(0.5..2.0);
        let th = rng.gen_range(-3.0..3.0);
        let chi = Complex64::from_polar(1.0, rng.gen_range(-3.0..3.0));
        let s = Spectrum::synthetic(&[(l, th, chi)], 60, Completeness::Exhaustive);
        let r = fried_residual(&s, Complex64::new(4.0, 0.0)).expect("exhaustive spectrum");
        if r.residual > r.tail_bound + 1e-12 {
            return check("fried-factorization", cases, Some(format!("residual {:e} at l={} theta={}", r.residual, l, th)));
        }
    }
    check("fried-factorization", cases, None)
}

fn epstein_homogeneity(rng: &mut ChaCha8Rng, cases: usize) -> CheckResult {
    for _ in 0..cases {
        let l = Lattice2D::new(Complex64::new(1.0, 0.0), Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.7..2.0)))
            .expect("independent basis");
        let chi = LatticeCharacter::new(Complex64::from_polar(1.0, rng.gen_range(0.0..6.0)), Complex64::new(1.0, 0.0)).unwrap();
        let s = Complex64::new(rng.gen_range(0.1..1.5), 0.0);
        let c = rng.gen_range(0.5..2.0);
        let (Ok(a), Ok(b)) = (epstein(&l, &chi, s), epstein(&l.scaled(c), &chi, s)) else {
            return check("epstein-homogeneity", cases, Some("evaluation failed".into()));
        };
        let want = a * c.powf(-2.0 * (1.0 + s.re));
        if (b - want).norm() > 1e-9 * want.norm().max(1.0) {
            return check("epstein-homogeneity", cases, Some(format!("{} vs {}", b, want)));
        }
    }
    check("epstein-homogeneity", cases, None)
}

fn unipotent(rng: &mut ChaCha8Rng, cases: usize) -> CheckResult {
    for _ in 0..cases {
        let cov = rng.gen_range(0.5..5.0);
        let c = rng.gen_range(-3.0..3.0);
        for case in [UnipotentCase::NontrivialRestriction { covolume: cov, c }, UnipotentCase::TrivialRestriction { covolume: cov, c }] {
            if !unipotent_lprime(case).combination.is_zero() {
                return check("unipotent-combination-zero", cases, Some(format!("{:?}", case)));
            }
        }
    }
    check("unipotent-combination-zero", cases, None)
}

fn enumeration_modes(rng: &mut ChaCha8Rng, cases: usize) -> CheckResult {
    for _ in 0..cases {
        let mut m = || Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let (a, b, c, d) = (m(), m(), m(), m());
        let Ok(g2) = MoebiusMatrix::new(a, b, c, d) else { continue };
        let g1 = MoebiusMatrix::new(Complex64::new(1.5, 0.5), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.5, 0.5).inv())
            .expect("diagonal");
        let gens = GeneratorSet {
            names: vec!["a".into(), "b".into()],
            matrices: vec![g1, g2],
            rho: vec![Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0)],
            covolume: 1.0,
            volume: 1.0,
        };
        let mut o = EnumerationOptions::new(5, 8.0);
        o.execution = Execution::Sequential;
        let s = enumerate_classes(&gens, &o);
        o.execution = Execution::Parallel;
        let p = enumerate_classes(&gens, &o);
        if s != p {
            return check("enumeration-mode-independence", cases, Some("sequential and parallel spectra differ".into()));
        }
    }
    check("enumeration-mode-independence", cases, None)
}

/// Runs every check with the given seed.
pub fn run_all(seed: u64) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    vec![
        fox_fundamental(&mut rng, 200),
        smith_invariance(&mut rng, 50),
        transforms(&mut rng, 40),
        spectral_identities(&mut rng, 50),
        betti_coherence(),
        fried(&mut rng, 50),
        epstein_homogeneity(&mut rng, 10),
        unipotent(&mut rng, 20),
        enumeration_modes(&mut rng, 5),
    ]
}
