//! Closed geodesics from matrix generators: classification of elements of
//! PSL(2, C), enumeration of loxodromic conjugacy classes by words, and the
//! spectrum CSV format.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;
use thiserror::Error;

use crate::par::{self, Execution};
use crate::presentation::{GroupWord, Letter};

/// Euler products run over oriented geodesics: gamma and gamma^-1 are kept
/// as separate classes. Set to false to keep one class per trace.
pub const ORIENTED: bool = true;

/// Tolerance for identifying complex lengths.
pub const DEDUP_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("matrix determinant is zero")]
    SingularMatrix,
    #[error("invalid generator file: {0}")]
    GeneratorFile(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn fmt_err(line: usize, message: impl Into<String>) -> SpectrumError {
    SpectrumError::Format { line, message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusMatrix {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl MoebiusMatrix {
    /// Rescales to determinant one.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self, SpectrumError> {
        let det = a * d - b * c;
        if det.norm() == 0.0 || !det.is_finite() {
            return Err(SpectrumError::SingularMatrix);
        }
        let s = det.sqrt().inv();
        Ok(Self { a: a * s, b: b * s, c: c * s, d: d * s })
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self { a: one, b: zero, c: zero, d: one }
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElementClass {
    Identity,
    Parabolic,
    Elliptic { angle: f64 },
    Loxodromic { length: f64, holonomy: f64 },
}

/// Reduces an angle to (-pi, pi].
pub fn canonical_angle(t: f64) -> f64 {
    let mut r = t - 2.0 * PI * (t / (2.0 * PI)).round();
    if r <= -PI {
        r += 2.0 * PI;
    }
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

/// Complex length l + i theta with tr = +-2 cosh((l + i theta)/2), l >= 0.
pub fn complex_length(tr: Complex64) -> (f64, f64) {
    let mut big_l = (tr * 0.5).acosh() * 2.0;
    if big_l.re < 0.0 {
        big_l = -big_l;
    }
    (big_l.re, canonical_angle(big_l.im))
}

pub fn classify(m: &MoebiusMatrix) -> ElementClass {
    const TOL: f64 = 1e-9;
    let tr = m.trace();
    if tr.im.abs() <= TOL && tr.re.abs() <= 2.0 + TOL {
        if (tr.re.abs() - 2.0).abs() <= TOL {
            let diag = m.b.norm() <= TOL && m.c.norm() <= TOL && (m.a - m.d).norm() <= TOL;
            return if diag { ElementClass::Identity } else { ElementClass::Parabolic };
        }
        return ElementClass::Elliptic { angle: 2.0 * (tr.re.abs() / 2.0).acos() };
    }
    let (length, holonomy) = complex_length(tr);
    ElementClass::Loxodromic { length, holonomy }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Completeness {
    /// Only lengths realized by words up to the recorded length are present.
    Partial,
    /// Asserted by the user to contain every class up to the cutoff.
    CompleteToCutoff,
    /// Every class of the group is present (synthetic spectra).
    Exhaustive,
}

impl Completeness {
    fn as_str(self) -> &'static str {
        match self {
            Completeness::Partial => "partial",
            Completeness::CompleteToCutoff => "complete-to-cutoff",
            Completeness::Exhaustive => "exhaustive",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "partial" => Some(Completeness::Partial),
            "complete-to-cutoff" => Some(Completeness::CompleteToCutoff),
            "exhaustive" => Some(Completeness::Exhaustive),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicClass {
    pub length: f64,
    pub holonomy: f64,
    pub char_value: Complex64,
    pub primitive_length: f64,
    pub multiplicity: u32,
    pub word: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub classes: Vec<GeodesicClass>,
    pub cutoff_length: f64,
    pub lattice_covolume: f64,
    pub volume: f64,
    pub max_word_len: Option<usize>,
    pub completeness: Completeness,
    pub warnings: Vec<String>,
}

impl Spectrum {
    pub fn empty(covolume: f64, volume: f64) -> Self {
        Self {
            classes: Vec::new(),
            cutoff_length: f64::INFINITY,
            lattice_covolume: covolume,
            volume,
            max_word_len: None,
            completeness: Completeness::Exhaustive,
            warnings: Vec::new(),
        }
    }

    pub fn primitives(&self) -> impl Iterator<Item = &GeodesicClass> {
        self.classes.iter().filter(|c| c.multiplicity == 1)
    }

    /// A spectrum made of the given primitive orbits (length, holonomy,
    /// character value) and their powers up to `max_power`. Each orbit is
    /// taken as given; no inverse classes are added.
    pub fn synthetic(orbits: &[(f64, f64, Complex64)], max_power: u32, completeness: Completeness) -> Self {
        let mut classes = Vec::new();
        for (i, &(l, th, chi)) in orbits.iter().enumerate() {
            for k in 1..=max_power {
                classes.push(GeodesicClass {
                    length: k as f64 * l,
                    holonomy: canonical_angle(k as f64 * th),
                    char_value: chi.powu(k),
                    primitive_length: l,
                    multiplicity: k,
                    word: format!("g{}^{}", i, k),
                });
            }
        }
        sort_classes(&mut classes);
        let cutoff = if completeness == Completeness::Exhaustive && orbits.is_empty() {
            f64::INFINITY
        } else {
            classes.last().map_or(f64::INFINITY, |c| c.length)
        };
        Self {
            classes,
            cutoff_length: cutoff,
            lattice_covolume: 1.0,
            volume: 1.0,
            max_word_len: None,
            completeness,
            warnings: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        writeln!(
            s,
            "# cutoff={:.16e} covolume={:.16e} volume={:.16e}",
            self.cutoff_length, self.lattice_covolume, self.volume
        )
        .unwrap();
        let mwl = self.max_word_len.map_or("none".to_string(), |m| m.to_string());
        writeln!(s, "# max_word_len={} completeness={}", mwl, self.completeness.as_str()).unwrap();
        // + 0.0 turns -0 into 0
        for c in &self.classes {
            writeln!(
                s,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
                c.length,
                c.holonomy + 0.0,
                c.char_value.re + 0.0,
                c.char_value.im + 0.0,
                c.primitive_length,
                c.multiplicity,
                c.word
            )
            .unwrap();
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self, SpectrumError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (n, head) = lines.next().ok_or_else(|| fmt_err(1, "empty file"))?;
        let head = head.strip_prefix("# ").ok_or_else(|| fmt_err(n, "missing '# cutoff=...' header"))?;
        let mut cutoff = None;
        let mut covolume = None;
        let mut volume = None;
        for kv in head.split_whitespace() {
            let (k, v) = kv.split_once('=').ok_or_else(|| fmt_err(n, format!("bad header field '{}'", kv)))?;
            let x: f64 = v.parse().map_err(|_| fmt_err(n, format!("bad number '{}'", v)))?;
            match k {
                "cutoff" => cutoff = Some(x),
                "covolume" => covolume = Some(x),
                "volume" => volume = Some(x),
                _ => return Err(fmt_err(n, format!("unknown header field '{}'", k))),
            }
        }
        let (Some(cutoff), Some(covolume), Some(volume)) = (cutoff, covolume, volume) else {
            return Err(fmt_err(n, "header needs cutoff, covolume and volume"));
        };
        if !(covolume > 0.0 && volume > 0.0) {
            return Err(fmt_err(n, "covolume and volume must be positive"));
        }
        let mut max_word_len = None;
        let mut completeness = Completeness::Partial;
        let mut classes: Vec<GeodesicClass> = Vec::new();
        for (n, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                for kv in meta.split_whitespace() {
                    match kv.split_once('=') {
                        Some(("max_word_len", "none")) => max_word_len = None,
                        Some(("max_word_len", v)) => {
                            max_word_len = Some(v.parse().map_err(|_| fmt_err(n, "bad max_word_len"))?)
                        }
                        Some(("completeness", v)) => {
                            completeness = Completeness::parse(v).ok_or_else(|| fmt_err(n, "bad completeness"))?
                        }
                        _ => {}
                    }
                }
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 7 {
                return Err(fmt_err(n, format!("expected 7 fields, found {}", f.len())));
            }
            let num = |i: usize| -> Result<f64, SpectrumError> {
                f[i].trim().parse::<f64>().map_err(|_| fmt_err(n, format!("bad number '{}'", f[i])))
            };
            let c = GeodesicClass {
                length: num(0)?,
                holonomy: num(1)?,
                char_value: Complex64::new(num(2)?, num(3)?),
                primitive_length: num(4)?,
                multiplicity: f[5].trim().parse().map_err(|_| fmt_err(n, "bad multiplicity"))?,
                word: f[6].to_string(),
            };
            if !(c.length > 0.0 && c.primitive_length > 0.0) || c.multiplicity == 0 {
                return Err(fmt_err(n, "lengths and multiplicity must be positive"));
            }
            if (c.length - c.multiplicity as f64 * c.primitive_length).abs() > 1e-9 * c.length.max(1.0) {
                return Err(fmt_err(n, "length is not multiplicity times primitive length"));
            }
            if (c.char_value.norm() - 1.0).abs() > 1e-12 {
                return Err(fmt_err(n, "character value is not on the unit circle"));
            }
            if !(c.holonomy > -PI - 1e-15 && c.holonomy <= PI + 1e-15) {
                return Err(fmt_err(n, "holonomy outside (-pi, pi]"));
            }
            if c.length > cutoff * (1.0 + 1e-12) {
                return Err(fmt_err(n, "length exceeds cutoff"));
            }
            if classes.last().is_some_and(|p| p.length > c.length) {
                return Err(fmt_err(n, "classes not sorted by length"));
            }
            classes.push(c);
        }
        Ok(Self { classes, cutoff_length: cutoff, lattice_covolume: covolume, volume, max_word_len, completeness, warnings: Vec::new() })
    }

    pub fn save(&self, path: &Path) -> Result<(), SpectrumError> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, SpectrumError> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }
}

fn sort_classes(v: &mut [GeodesicClass]) {
    v.sort_by(|x, y| {
        x.length
            .total_cmp(&y.length)
            .then(x.holonomy.total_cmp(&y.holonomy))
            .then(x.char_value.re.total_cmp(&y.char_value.re))
            .then(x.char_value.im.total_cmp(&y.char_value.im))
            .then(x.word.cmp(&y.word))
    });
}

/// Generators with their names and character values.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    pub names: Vec<String>,
    pub matrices: Vec<MoebiusMatrix>,
    pub rho: Vec<Complex64>,
    pub covolume: f64,
    pub volume: f64,
}

#[derive(Deserialize)]
struct GeneratorJson {
    name: String,
    matrix: [[f64; 2]; 4],
    rho: Option<[f64; 2]>,
}

#[derive(Deserialize)]
struct GeneratorFileJson {
    generators: Vec<GeneratorJson>,
    covolume: f64,
    volume: f64,
}

impl GeneratorSet {
    /// Parses `{"generators": [{"name", "matrix": [a, b, c, d] as [re, im]
    /// pairs, "rho"?}], "covolume", "volume"}`.
    pub fn from_json(text: &str) -> Result<Self, SpectrumError> {
        let f: GeneratorFileJson =
            serde_json::from_str(text).map_err(|e| SpectrumError::GeneratorFile(e.to_string()))?;
        if !(f.covolume > 0.0 && f.volume > 0.0) {
            return Err(SpectrumError::GeneratorFile("covolume and volume must be positive".into()));
        }
        let mut set = GeneratorSet { names: vec![], matrices: vec![], rho: vec![], covolume: f.covolume, volume: f.volume };
        for g in f.generators {
            let m = g.matrix.map(|p| Complex64::new(p[0], p[1]));
            let mm = MoebiusMatrix::new(m[0], m[1], m[2], m[3])?;
            let r = g.rho.map_or(Complex64::new(1.0, 0.0), |p| Complex64::new(p[0], p[1]));
            if (r.norm() - 1.0).abs() > 1e-12 {
                return Err(SpectrumError::GeneratorFile(format!("rho of '{}' is not a unit", g.name)));
            }
            set.names.push(g.name);
            set.matrices.push(mm);
            set.rho.push(r);
        }
        Ok(set)
    }
}

#[derive(Debug, Clone)]
pub struct EnumerationOptions {
    pub max_word_len: usize,
    pub cutoff: f64,
    pub oriented: bool,
    pub execution: Execution,
}

impl EnumerationOptions {
    pub fn new(max_word_len: usize, cutoff: f64) -> Self {
        Self { max_word_len, cutoff, oriented: ORIENTED, execution: Execution::default() }
    }
}

struct Candidate {
    length: f64,
    holonomy: f64,
    chi: Complex64,
    word: Vec<Letter>,
}

enum Found {
    Lox(Candidate),
    Elliptic,
}

fn shortlex(a: &[Letter], b: &[Letter]) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

fn angle_dist(a: f64, b: f64) -> f64 {
    canonical_angle(a - b).abs()
}

// one representative of {chi, conj chi}, so that a class and its inverse
// fall into the same trace cluster
fn chi_key(c: Complex64) -> Complex64 {
    if c.im < 0.0 { c.conj() } else { c }
}

fn dfs(
    letters: &[(Letter, MoebiusMatrix, Complex64)],
    word: &mut Vec<Letter>,
    m: MoebiusMatrix,
    chi: Complex64,
    opts: &EnumerationOptions,
    out: &mut Vec<Found>,
) {
    let first = word[0];
    let last = *word.last().unwrap();
    if last != first.inverse() || word.len() == 1 {
        match classify(&m) {
            ElementClass::Loxodromic { length, holonomy } if length <= opts.cutoff + DEDUP_TOL => {
                out.push(Found::Lox(Candidate { length, holonomy, chi, word: word.clone() }))
            }
            ElementClass::Elliptic { .. } => out.push(Found::Elliptic),
            _ => {}
        }
    }
    if word.len() == opts.max_word_len {
        return;
    }
    for &(l, g, r) in letters {
        if l == last.inverse() {
            continue;
        }
        word.push(l);
        dfs(letters, word, m.mul(&g), chi * r, opts, out);
        word.pop();
    }
}

/// Enumerates loxodromic classes from words up to `max_word_len`.
pub fn enumerate_classes(gens: &GeneratorSet, opts: &EnumerationOptions) -> Spectrum {
    let mut letters = Vec::new();
    for (i, (m, r)) in gens.matrices.iter().zip(&gens.rho).enumerate() {
        letters.push((Letter::new(i, 1), *m, *r));
        letters.push((Letter::new(i, -1), m.inverse(), r.conj()));
    }
    let shards: Vec<Vec<Found>> = par::map(opts.execution, &letters, |&(l, m, r)| {
        let mut out = Vec::new();
        if opts.max_word_len > 0 {
            let mut w = vec![l];
            dfs(&letters, &mut w, m, r, opts, &mut out);
        }
        out
    });
    let mut warnings = Vec::new();
    let mut cands: Vec<Candidate> = Vec::new();
    let mut elliptic = 0usize;
    for f in shards.into_iter().flatten() {
        match f {
            Found::Lox(c) => cands.push(c),
            Found::Elliptic => elliptic += 1,
        }
    }
    if elliptic > 0 {
        warnings.push(format!("discreteness suspect: {} words give elliptic elements", elliptic));
    }
    if cands.iter().any(|c| c.length < 1e-6) {
        warnings.push("discreteness suspect: loxodromic element with length below 1e-6".into());
    }
    let clusters = cluster(cands, &mut warnings);
    let spectrum_classes = assemble(&clusters, gens, opts, &mut warnings);
    let cutoff = opts.cutoff;
    Spectrum {
        classes: spectrum_classes,
        cutoff_length: cutoff,
        lattice_covolume: gens.covolume,
        volume: gens.volume,
        max_word_len: Some(opts.max_word_len),
        completeness: Completeness::Partial,
        warnings,
    }
}

struct Cluster {
    length: f64,
    holonomy: f64,
    chi: Complex64,
    word: Vec<Letter>,
}

fn cluster(mut cands: Vec<Candidate>, warnings: &mut Vec<String>) -> Vec<Cluster> {
    cands.sort_by(|x, y| x.length.total_cmp(&y.length).then_with(|| shortlex(&x.word, &y.word)));
    let mut out: Vec<Cluster> = Vec::new();
    let mut near_misses = 0usize;
    let mut i = 0;
    while i < cands.len() {
        // block of candidates whose lengths chain within the tolerance
        let mut j = i + 1;
        while j < cands.len() && cands[j].length - cands[j - 1].length <= DEDUP_TOL {
            j += 1;
        }
        let mut block: Vec<Cluster> = Vec::new();
        for c in &cands[i..j] {
            let key = chi_key(c.chi);
            let hit = block.iter_mut().find(|b| {
                angle_dist(b.holonomy, c.holonomy) <= DEDUP_TOL && (chi_key(b.chi) - key).norm() <= DEDUP_TOL
            });
            match hit {
                Some(b) => {
                    if shortlex(&c.word, &b.word).is_lt() {
                        b.word = c.word.clone();
                        b.chi = c.chi;
                    }
                }
                None => block.push(Cluster { length: c.length, holonomy: c.holonomy, chi: c.chi, word: c.word.clone() }),
            }
        }
        out.extend(block);
        i = j;
    }
    out.sort_by(|x, y| x.length.total_cmp(&y.length).then(x.holonomy.total_cmp(&y.holonomy)));
    for w in out.windows(2) {
        let dl = (w[1].length - w[0].length).abs();
        let dt = angle_dist(w[1].holonomy, w[0].holonomy);
        if dl < 1e-6 && dt < 1e-6 && (dl > DEDUP_TOL || dt > DEDUP_TOL) {
            near_misses += 1;
        }
    }
    if near_misses > 0 {
        warnings.push(format!(
            "discreteness suspect: {} pairs of classes with complex lengths closer than 1e-6 but not identified",
            near_misses
        ));
    }
    out
}

/// Largest power searched when detecting primitivity and synthesized when
/// closing the list under powers.
const MAX_POWER: u32 = 64;

fn assemble(clusters: &[Cluster], gens: &GeneratorSet, opts: &EnumerationOptions, warnings: &mut Vec<String>) -> Vec<GeodesicClass> {
    // root[i] = (primitive cluster index, exponent)
    let mut root: Vec<(usize, u32)> = Vec::with_capacity(clusters.len());
    for (i, c) in clusters.iter().enumerate() {
        let mut found = None;
        'search: for k in 2..=MAX_POWER {
            let target = c.length / k as f64;
            if target < clusters[0].length - DEDUP_TOL {
                break;
            }
            for (r, cr) in clusters.iter().enumerate().take(i) {
                if (cr.length - target).abs() > DEDUP_TOL * k as f64 {
                    continue;
                }
                if angle_dist(k as f64 * cr.holonomy, c.holonomy) > DEDUP_TOL * k as f64 {
                    continue;
                }
                let pk = cr.chi.powu(k);
                if (chi_key(pk) - chi_key(c.chi)).norm() > 1e-8 {
                    continue;
                }
                let (rr, m) = root[r];
                found = Some((rr, m * k));
                break 'search;
            }
        }
        root.push(found.unwrap_or((i, 1)));
    }
    let mut out = Vec::new();
    let mut capped = 0usize;
    for (i, c) in clusters.iter().enumerate() {
        if root[i].1 != 1 {
            continue;
        }
        let w = GroupWord(c.word.clone());
        let wanted = if opts.cutoff.is_finite() {
            (opts.cutoff / c.length + 1e-12).floor().max(1.0)
        } else {
            (opts.max_word_len / w.len().max(1)).max(1) as f64
        };
        if wanted > MAX_POWER as f64 {
            capped += 1;
        }
        let max_k = wanted.min(MAX_POWER as f64) as u32;
        for k in 1..=max_k {
            let wk = w.pow(k as usize);
            let length = k as f64 * c.length;
            let holonomy = canonical_angle(k as f64 * c.holonomy);
            let chi = c.chi.powu(k);
            out.push(GeodesicClass {
                length,
                holonomy,
                char_value: chi,
                primitive_length: c.length,
                multiplicity: k,
                word: wk.to_text(&gens.names),
            });
            if opts.oriented {
                out.push(GeodesicClass {
                    length,
                    holonomy,
                    char_value: chi.conj(),
                    primitive_length: c.length,
                    multiplicity: k,
                    word: wk.inverse().to_text(&gens.names),
                });
            }
        }
    }
    if capped > 0 {
        warnings.push(format!(
            "discreteness suspect: powers of {} primitive classes truncated at exponent {}",
            capped, MAX_POWER
        ));
    }
    sort_classes(&mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn diag(l: f64, th: f64) -> MoebiusMatrix {
        let h = c(l / 2.0, th / 2.0).exp();
        MoebiusMatrix::new(h, c(0.0, 0.0), c(0.0, 0.0), h.inv()).unwrap()
    }

    #[test]
    fn classify_examples() {
        let ElementClass::Loxodromic { length, holonomy } = classify(&diag(1.0, 0.0)) else { panic!() };
        assert!((length - 1.0).abs() < 1e-14 && holonomy.abs() < 1e-14);
        let p = MoebiusMatrix::new(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        assert_eq!(classify(&p), ElementClass::Parabolic);
        assert_eq!(classify(&MoebiusMatrix::identity()), ElementClass::Identity);
        let r = diag(0.0, 1.0);
        assert!(matches!(classify(&r), ElementClass::Elliptic { .. }));
        let ElementClass::Loxodromic { length, holonomy } = classify(&diag(1.3, 2.0)) else { panic!() };
        assert!((length - 1.3).abs() < 1e-14 && (holonomy - 2.0).abs() < 1e-14);
    }

    #[test]
    fn determinant_is_normalized() {
        let m = MoebiusMatrix::new(c(2.0, 1.0), c(0.3, 0.0), c(-1.0, 2.0), c(0.5, 0.5)).unwrap();
        assert!((m.det() - c(1.0, 0.0)).norm() <= 1e-12);
        assert!(MoebiusMatrix::new(c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)).is_err());
    }

    fn cyclic(l: f64) -> GeneratorSet {
        GeneratorSet {
            names: vec!["g".into()],
            matrices: vec![diag(l, 0.0)],
            rho: vec![c(1.0, 0.0)],
            covolume: 1.0,
            volume: 1.0,
        }
    }

    #[test]
    fn no_generators_gives_empty_spectrum() {
        let g = GeneratorSet { names: vec![], matrices: vec![], rho: vec![], covolume: 1.0, volume: 1.0 };
        let s = enumerate_classes(&g, &EnumerationOptions::new(5, 10.0));
        assert!(s.classes.is_empty());
    }

    #[test]
    fn cyclic_group_powers() {
        let mut opts = EnumerationOptions::new(5, f64::INFINITY);
        opts.oriented = false;
        let s = enumerate_classes(&cyclic(1.0), &opts);
        assert_eq!(s.classes.len(), 5);
        for (k, cl) in s.classes.iter().enumerate() {
            assert_eq!(cl.multiplicity, k as u32 + 1);
            assert_eq!(cl.primitive_length, s.classes[0].primitive_length);
            assert!((cl.primitive_length - 1.0).abs() < 1e-12);
        }
        let oriented = enumerate_classes(&cyclic(1.0), &EnumerationOptions::new(5, f64::INFINITY));
        assert_eq!(oriented.classes.len(), 10);
        assert!(oriented.classes.iter().any(|c| c.word == "GG"));
    }

    #[test]
    fn sharding_does_not_change_output() {
        let g = GeneratorSet {
            names: vec!["a".into(), "b".into()],
            matrices: vec![diag(1.1, 0.4), MoebiusMatrix::new(c(2.0, 0.1), c(1.0, 0.0), c(3.0, 0.2), c(2.0, 0.0)).unwrap()],
            rho: vec![c(0.0, 1.0), c(1.0, 0.0)],
            covolume: 1.0,
            volume: 1.0,
        };
        let mut o = EnumerationOptions::new(5, 6.0);
        o.execution = Execution::Sequential;
        let a = enumerate_classes(&g, &o);
        o.execution = Execution::Parallel;
        let b = enumerate_classes(&g, &o);
        assert_eq!(a, b);
        assert!(!a.classes.is_empty());
    }

    #[test]
    fn csv_roundtrip_is_byte_exact() {
        let s = enumerate_classes(&cyclic(0.7), &EnumerationOptions::new(4, 2.5));
        let text = s.to_csv();
        let back = Spectrum::from_csv(&text).unwrap();
        assert_eq!(back.to_csv(), text);
        assert_eq!(back.classes, s.classes);
        let e = Spectrum::empty(1.0, 1.0);
        assert_eq!(Spectrum::from_csv(&e.to_csv()).unwrap().to_csv(), e.to_csv());
        assert!(e.to_csv().starts_with("# cutoff=inf"));
    }

    #[test]
    fn csv_rejects_broken_multiplicity() {
        let text = "# cutoff=3 covolume=1 volume=1\n1.0,0.0,1.0,0.0,1.0,1,g\n2.5,0.0,1.0,0.0,1.0,2,gg\n";
        match Spectrum::from_csv(text) {
            Err(SpectrumError::Format { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected format error, got {:?}", other),
        }
        assert!(Spectrum::from_csv("1,2,3\n").is_err());
    }

    fn arb_matrix() -> impl Strategy<Value = MoebiusMatrix> {
        prop::array::uniform4((-2.0f64..2.0, -2.0f64..2.0)).prop_filter_map("singular", |v| {
            let m = v.map(|(r, i)| c(r, i));
            MoebiusMatrix::new(m[0], m[1], m[2], m[3]).ok()
        })
    }

    proptest! {
        #[test]
        fn conjugation_invariance(l in 0.1f64..3.0, th in -3.0f64..3.0, h in arb_matrix()) {
            let g = diag(l, th);
            let hg = h.mul(&g).mul(&h.inverse());
            match (classify(&g), classify(&hg)) {
                (ElementClass::Loxodromic { length: a, holonomy: x }, ElementClass::Loxodromic { length: b, holonomy: y }) => {
                    prop_assert!((a - b).abs() < 1e-7);
                    prop_assert!(angle_dist(x, y) < 1e-7);
                }
                (p, q) => prop_assert!(false, "{:?} vs {:?}", p, q),
            }
        }

        #[test]
        fn powers_scale_complex_length(l in 0.2f64..2.0, th in -3.1f64..3.1, h in arb_matrix(), k in 2u32..6) {
            let g = h.mul(&diag(l, th)).mul(&h.inverse());
            let mut gk = MoebiusMatrix::identity();
            for _ in 0..k { gk = gk.mul(&g); }
            let ElementClass::Loxodromic { length: a, holonomy: x } = classify(&g) else { panic!() };
            let ElementClass::Loxodromic { length: b, holonomy: y } = classify(&gk) else { panic!() };
            prop_assert!((b - k as f64 * a).abs() < 1e-9 * b.max(1.0) * 10.0);
            prop_assert!(angle_dist(y, k as f64 * x) < 1e-8);
        }
    }
}
