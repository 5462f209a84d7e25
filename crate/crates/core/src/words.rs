//! Alphabet, words and compositions, the shuffle and stuffle products, and
//! the T = 0 regularizations.
//!
//! A word `e_{x1} e_{x2} ... e_{xn}` indexes the coefficient `c(w)` of the
//! generating series of regularized iterated integrals from 0 to 1; the
//! leftmost letter is the outermost integration. Roots of unity are stored as
//! exponents of the fixed primitive root `μ = exp(2πi/N)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::error::{MpvError, Result};
use crate::lincomb::{q, LinComb, Q};

/// Order of the root-of-unity group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Level(u32);

impl Level {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            Err(MpvError::InvalidLevel)
        } else {
            Ok(Level(n))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Reduces an integer exponent into `[0, N)`.
    pub fn reduce(self, a: i64) -> u32 {
        a.rem_euclid(self.0 as i64) as u32
    }

    pub fn divisors(self) -> Vec<u32> {
        (1..=self.0).filter(|d| self.0.is_multiple_of(*d)).collect()
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A letter of the alphabet: `e0` or `e_{μ^a}`. `Root(0)` is `e1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    Zero,
    Root(u32),
}

pub const E0: Letter = Letter::Zero;
pub const E1: Letter = Letter::Root(0);

impl Letter {
    pub fn all(level: Level) -> Vec<Letter> {
        std::iter::once(Letter::Zero)
            .chain((0..level.get()).map(Letter::Root))
            .collect()
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::Zero => write!(f, "0"),
            Letter::Root(a) => write!(f, "z{a}"),
        }
    }
}

impl FromStr for Letter {
    type Err = MpvError;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" {
            return Ok(Letter::Zero);
        }
        let digits = s
            .strip_prefix('z')
            .ok_or_else(|| MpvError::Parse(format!("bad letter {s:?}")))?;
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(MpvError::Parse(format!("bad letter {s:?}")));
        }
        digits
            .parse::<u32>()
            .map(Letter::Root)
            .map_err(|_| MpvError::Parse(format!("letter index out of range: {s:?}")))
    }
}

/// A word in the letters; its length is the weight.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn weight(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of letters other than `e0`.
    pub fn depth(&self) -> usize {
        self.0.iter().filter(|l| **l != Letter::Zero).count()
    }

    /// Admissible: does not start with `e1` and does not end with `e0`.
    pub fn is_convergent(&self) -> bool {
        self.0.first() != Some(&E1) && self.0.last() != Some(&E0)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn fits_level(&self, level: Level) -> bool {
        self.0.iter().all(|l| match l {
            Letter::Zero => true,
            Letter::Root(a) => *a < level.get(),
        })
    }

    pub fn check_level(&self, level: Level) -> Result<()> {
        if self.fits_level(level) {
            Ok(())
        } else {
            Err(MpvError::Parse(format!("word {self} has a root index >= {level}")))
        }
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = MpvError;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(Word::empty());
        }
        s.split('.').map(Letter::from_str).collect::<Result<Vec<_>>>().map(Word)
    }
}

/// One part `(s, a)` of a composition: exponent `s ≥ 1`, argument `μ^a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Part {
    pub s: u32,
    pub a: u32,
}

/// The series symbol `Li_{s1..sn}(μ^{a1}, ..., μ^{an})` at a given level.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Composition {
    pub level: Level,
    pub parts: Vec<Part>,
}

impl Composition {
    pub fn new(level: Level, parts: &[(u32, u32)]) -> Result<Self> {
        let mut out = Vec::with_capacity(parts.len());
        for &(s, a) in parts {
            if s == 0 {
                return Err(MpvError::Invalid("exponents must be positive".into()));
            }
            out.push(Part { s, a: a % level.get() });
        }
        Ok(Composition { level, parts: out })
    }

    pub fn weight(&self) -> u32 {
        self.parts.iter().map(|p| p.s).sum()
    }

    pub fn depth(&self) -> usize {
        self.parts.len()
    }

    /// Convergent unless the first part is `(1; 0)`, i.e. `Li_1(1)` in front.
    pub fn is_convergent(&self) -> bool {
        !matches!(self.parts.first(), Some(Part { s: 1, a: 0 }))
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.s.to_string()).collect();
        let a: Vec<String> = self.parts.iter().map(|p| p.a.to_string()).collect();
        write!(f, "Li[{};{}]@{}", s.join(","), a.join(","), self.level)
    }
}

fn parse_u32_list(s: &str) -> Result<Vec<u32>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            let t = t.trim();
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                return Err(MpvError::Parse(format!("bad integer {t:?}")));
            }
            t.parse::<u32>().map_err(|_| MpvError::Parse(format!("bad integer {t:?}")))
        })
        .collect()
}

impl FromStr for Composition {
    type Err = MpvError;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let rest = s
            .strip_prefix("Li[")
            .ok_or_else(|| MpvError::Parse(format!("composition must start with Li[: {s:?}")))?;
        let (inner, tail) = rest
            .split_once(']')
            .ok_or_else(|| MpvError::Parse("missing ]".into()))?;
        let level_str = tail
            .trim()
            .strip_prefix('@')
            .ok_or_else(|| MpvError::Parse("missing @N".into()))?;
        let n = parse_u32_list(level_str)?;
        if n.len() != 1 {
            return Err(MpvError::Parse("bad level".into()));
        }
        let level = Level::new(n[0])?;
        let (ss, aa) = inner
            .split_once(';')
            .ok_or_else(|| MpvError::Parse("missing ; between exponents and arguments".into()))?;
        let ss = parse_u32_list(ss)?;
        let aa = parse_u32_list(aa)?;
        if ss.len() != aa.len() {
            return Err(MpvError::Parse("exponent and argument lists differ in length".into()));
        }
        if ss.contains(&0) {
            return Err(MpvError::Parse("exponents must be positive".into()));
        }
        let parts: Vec<(u32, u32)> = ss.into_iter().zip(aa).collect();
        Composition::new(level, &parts)
    }
}

// ---------------------------------------------------------------------------
// Products

fn shuffle_rec(u: &[Letter], v: &[Letter], buf: &mut Vec<Letter>, out: &mut BTreeMap<Word, u64>) {
    if u.is_empty() || v.is_empty() {
        let mut w = buf.clone();
        w.extend_from_slice(u);
        w.extend_from_slice(v);
        *out.entry(Word(w)).or_insert(0) += 1;
        return;
    }
    buf.push(u[0]);
    shuffle_rec(&u[1..], v, buf, out);
    buf.pop();
    buf.push(v[0]);
    shuffle_rec(u, &v[1..], buf, out);
    buf.pop();
}

/// Shuffle product of two words: all interleavings preserving internal order.
pub fn shuffle(u: &Word, v: &Word) -> LinComb<Word> {
    let mut counts = BTreeMap::new();
    let mut buf = Vec::with_capacity(u.weight() + v.weight());
    shuffle_rec(&u.0, &v.0, &mut buf, &mut counts);
    counts.into_iter().map(|(w, c)| (w, q(c as i64))).collect()
}

/// Bilinear extension of [`shuffle`].
pub fn shuffle_lc(a: &LinComb<Word>, b: &LinComb<Word>) -> LinComb<Word> {
    let mut counts: BTreeMap<Word, Q> = BTreeMap::new();
    for (u, cu) in a.iter() {
        for (v, cv) in b.iter() {
            let c = cu * cv;
            let mut inner = BTreeMap::new();
            let mut buf = Vec::with_capacity(u.weight() + v.weight());
            shuffle_rec(&u.0, &v.0, &mut buf, &mut inner);
            for (w, m) in inner {
                let e = counts.entry(w).or_insert_with(Q::zero);
                *e += &c * q(m as i64);
            }
        }
    }
    counts.into_iter().collect()
}

fn stuffle_rec(
    a: &[Part],
    b: &[Part],
    level: Level,
    buf: &mut Vec<Part>,
    out: &mut BTreeMap<Vec<Part>, u64>,
) {
    if a.is_empty() || b.is_empty() {
        let mut w = buf.clone();
        w.extend_from_slice(a);
        w.extend_from_slice(b);
        *out.entry(w).or_insert(0) += 1;
        return;
    }
    buf.push(a[0]);
    stuffle_rec(&a[1..], b, level, buf, out);
    buf.pop();
    buf.push(b[0]);
    stuffle_rec(a, &b[1..], level, buf, out);
    buf.pop();
    buf.push(Part { s: a[0].s + b[0].s, a: (a[0].a + b[0].a) % level.get() });
    stuffle_rec(&a[1..], &b[1..], level, buf, out);
    buf.pop();
}

/// Quasi-shuffle (stuffle) product: the product of the nested series.
///
/// Panics if the two compositions live at different levels.
pub fn stuffle(a: &Composition, b: &Composition) -> LinComb<Composition> {
    assert_eq!(a.level, b.level, "stuffle of compositions at different levels");
    let mut counts = BTreeMap::new();
    let mut buf = Vec::new();
    stuffle_rec(&a.parts, &b.parts, a.level, &mut buf, &mut counts);
    counts
        .into_iter()
        .map(|(parts, c)| (Composition { level: a.level, parts }, q(c as i64)))
        .collect()
}

pub fn stuffle_lc(a: &LinComb<Composition>, b: &LinComb<Composition>) -> LinComb<Composition> {
    let mut out = LinComb::new();
    for (x, cx) in a.iter() {
        for (y, cy) in b.iter() {
            out.add_scaled(&stuffle(x, y), &(cx * cy));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Integral <-> series form

/// The coefficient of `e0^{s1-1} e_{ζ1} ... e0^{sn-1} e_{ζn}` is
/// `(-1)^n Li_s(1/ζ1, ζ1/ζ2, ..., ζ_{n-1}/ζn)`. Returns that sign and composition.
pub fn word_to_composition(w: &Word, level: Level) -> Result<(i32, Composition)> {
    if w.is_empty() {
        return Err(MpvError::Invalid("the empty word has no series form".into()));
    }
    if w.0.last() == Some(&E0) {
        return Err(MpvError::NoSeriesForm(w.to_string()));
    }
    w.check_level(level)?;
    let n = level.get() as i64;
    let mut parts = Vec::new();
    let mut s = 1u32;
    let mut prev: i64 = 0;
    for l in &w.0 {
        match l {
            Letter::Zero => s += 1,
            Letter::Root(z) => {
                let z = *z as i64;
                parts.push(Part { s, a: (prev - z).rem_euclid(n) as u32 });
                prev = z;
                s = 1;
            }
        }
    }
    let sign = if parts.len() % 2 == 0 { 1 } else { -1 };
    Ok((sign, Composition { level, parts }))
}

/// Inverse of [`word_to_composition`]; the sign is `(-1)^depth`.
pub fn composition_to_word(c: &Composition) -> (i32, Word) {
    let n = c.level.get() as i64;
    let mut letters = Vec::with_capacity(c.weight() as usize);
    let mut z: i64 = 0;
    for p in &c.parts {
        for _ in 1..p.s {
            letters.push(E0);
        }
        z = (z - p.a as i64).rem_euclid(n);
        letters.push(Letter::Root(z as u32));
    }
    let sign = if c.parts.len().is_multiple_of(2) { 1 } else { -1 };
    (sign, Word(letters))
}

/// Signed word image of a combination of compositions.
pub fn compositions_to_words(lc: &LinComb<Composition>) -> LinComb<Word> {
    lc.map_linear(|c| {
        let (sign, w) = composition_to_word(c);
        LinComb::term(w, q(sign as i64))
    })
}

// ---------------------------------------------------------------------------
// Regularization

/// Memoizing regularizer for words and compositions.
///
/// Shuffle regularization uses group-likeness with `c(e0) = c(e1) = 0`;
/// [`Regularizer::shuffle_poly`] keeps `c(e1) = -T` as a formal variable.
/// Stuffle regularization sets `Li_1(1) = 0` and uses the quasi-shuffle rule.
#[derive(Default)]
pub struct Regularizer {
    sh: HashMap<Word, LinComb<Word>>,
    poly: HashMap<Word, Vec<LinComb<Word>>>,
    st: HashMap<Composition, LinComb<Composition>>,
}

fn leading_run(w: &[Letter], l: Letter) -> usize {
    w.iter().take_while(|x| **x == l).count()
}

fn trailing_run(w: &[Letter], l: Letter) -> usize {
    w.iter().rev().take_while(|x| **x == l).count()
}

/// Words obtained by inserting `l` into `base` at each position, excluding `target`.
fn insertions_except(base: &[Letter], l: Letter, target: &Word) -> Vec<Word> {
    (0..=base.len())
        .map(|i| {
            let mut v = Vec::with_capacity(base.len() + 1);
            v.extend_from_slice(&base[..i]);
            v.push(l);
            v.extend_from_slice(&base[i..]);
            Word(v)
        })
        .filter(|x| x != target)
        .collect()
}

impl Regularizer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Shuffle-regularized coefficient of `w` as a combination of convergent words.
    pub fn shuffle_reg(&mut self, w: &Word) -> LinComb<Word> {
        if w.is_convergent() {
            return LinComb::unit(w.clone());
        }
        if let Some(r) = self.sh.get(w) {
            return r.clone();
        }
        let mut out = LinComb::new();
        let (run, base, letter) = if w.0.first() == Some(&E1) {
            (leading_run(&w.0, E1), &w.0[1..], E1)
        } else {
            (trailing_run(&w.0, E0), &w.0[..w.0.len() - 1], E0)
        };
        let factor = -Q::one() / q(run as i64);
        for x in insertions_except(base, letter, w) {
            let r = self.shuffle_reg(&x);
            out.add_scaled(&r, &factor);
        }
        self.sh.insert(w.clone(), out.clone());
        out
    }

    pub fn shuffle_reg_lc(&mut self, lc: &LinComb<Word>) -> LinComb<Word> {
        let mut out = LinComb::new();
        for (w, c) in lc.iter() {
            let r = self.shuffle_reg(w);
            out.add_scaled(&r, c);
        }
        out
    }

    /// Regularized coefficient with `c(e1) = -T` kept formal: entry `j` is the
    /// coefficient of `T^j`, each a combination of convergent words.
    pub fn shuffle_poly(&mut self, w: &Word) -> Vec<LinComb<Word>> {
        if w.0.first() != Some(&E1) {
            return vec![self.shuffle_reg(w)];
        }
        if let Some(r) = self.poly.get(w) {
            return r.clone();
        }
        let run = leading_run(&w.0, E1);
        let base = &w.0[1..];
        let mut acc: Vec<LinComb<Word>> = Vec::new();
        let add = |acc: &mut Vec<LinComb<Word>>, j: usize, lc: &LinComb<Word>, c: &Q| {
            if acc.len() <= j {
                acc.resize(j + 1, LinComb::new());
            }
            acc[j].add_scaled(lc, c);
        };
        // -T * c(base)
        let p = self.shuffle_poly(&Word(base.to_vec()));
        for (j, lc) in p.iter().enumerate() {
            add(&mut acc, j + 1, lc, &q(-1));
        }
        for x in insertions_except(base, E1, w) {
            let p = self.shuffle_poly(&x);
            for (j, lc) in p.iter().enumerate() {
                add(&mut acc, j, lc, &q(-1));
            }
        }
        let inv = Q::one() / q(run as i64);
        for lc in acc.iter_mut() {
            lc.scale(&inv);
        }
        while acc.last().map(|l| l.is_empty()).unwrap_or(false) && acc.len() > 1 {
            acc.pop();
        }
        self.poly.insert(w.clone(), acc.clone());
        acc
    }

    /// Stuffle-regularized value of `c` with `Li_1(1) = 0`, over convergent compositions.
    pub fn stuffle_reg(&mut self, c: &Composition) -> LinComb<Composition> {
        if c.is_convergent() {
            return LinComb::unit(c.clone());
        }
        if let Some(r) = self.st.get(c) {
            return r.clone();
        }
        let lead = Part { s: 1, a: 0 };
        let run = c.parts.iter().take_while(|p| **p == lead).count();
        let rest = &c.parts[1..];
        let factor = -Q::one() / q(run as i64);
        let mut out = LinComb::new();
        for i in 0..=rest.len() {
            let mut v = rest.to_vec();
            v.insert(i, lead);
            let x = Composition { level: c.level, parts: v };
            if x != *c {
                let r = self.stuffle_reg(&x);
                out.add_scaled(&r, &factor);
            }
        }
        for i in 0..rest.len() {
            let mut v = rest.to_vec();
            v[i].s += 1;
            let x = Composition { level: c.level, parts: v };
            let r = self.stuffle_reg(&x);
            out.add_scaled(&r, &factor);
        }
        self.st.insert(c.clone(), out.clone());
        out
    }
}

pub fn shuffle_regularize(w: &Word) -> LinComb<Word> {
    Regularizer::new().shuffle_reg(w)
}

pub fn stuffle_regularize(c: &Composition) -> LinComb<Composition> {
    Regularizer::new().stuffle_reg(c)
}

/// All words of the given weight in lexicographic order (`e0 < e1 < e_μ < ...`).
pub fn enumerate_words(weight: usize, level: Level, convergent_only: bool) -> Vec<Word> {
    let alphabet = Letter::all(level);
    let k = alphabet.len();
    let total = k.pow(weight as u32);
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; weight];
    for _ in 0..total {
        let w = Word(idx.iter().map(|&i| alphabet[i]).collect());
        if !convergent_only || w.is_convergent() {
            out.push(w);
        }
        for pos in (0..weight).rev() {
            idx[pos] += 1;
            if idx[pos] < k {
                break;
            }
            idx[pos] = 0;
        }
    }
    out
}

/// All compositions of the given weight, in a deterministic order.
pub fn enumerate_compositions(weight: u32, level: Level) -> Vec<Composition> {
    let mut out = Vec::new();
    fn rec(rem: u32, level: Level, cur: &mut Vec<Part>, out: &mut Vec<Composition>) {
        if rem == 0 {
            out.push(Composition { level, parts: cur.clone() });
            return;
        }
        for s in 1..=rem {
            for a in 0..level.get() {
                cur.push(Part { s, a });
                rec(rem - s, level, cur, out);
                cur.pop();
            }
        }
    }
    if weight > 0 {
        rec(weight, level, &mut Vec::new(), &mut out);
    }
    out
}

pub fn word(s: &str) -> Word {
    s.parse().expect("valid word literal")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(n: u32) -> Level {
        Level::new(n).unwrap()
    }

    fn comp(n: u32, parts: &[(u32, u32)]) -> Composition {
        Composition::new(lv(n), parts).unwrap()
    }

    #[test]
    fn shuffle_examples() {
        let s = shuffle(&word("0"), &word("z0"));
        assert_eq!(s, [(word("0.z0"), q(1)), (word("z0.0"), q(1))].into_iter().collect());
        let s = shuffle(&word("z1"), &word("0.z1"));
        assert_eq!(s.coeff(&word("z1.0.z1")), q(1));
        assert_eq!(s.coeff(&word("0.z1.z1")), q(2));
        assert_eq!(s.len(), 2);
        let total: Q = shuffle(&word("z1"), &word("0.z2")).iter().map(|(_, c)| c.clone()).sum();
        assert_eq!(total, q(3));
    }

    #[test]
    fn stuffle_examples() {
        let p = stuffle(&comp(4, &[(1, 1)]), &comp(4, &[(1, 3)]));
        assert_eq!(p.len(), 3);
        assert_eq!(p.coeff(&comp(4, &[(2, 0)])), q(1));
        let p = stuffle(&comp(4, &[(1, 2)]), &comp(4, &[(2, 2)]));
        assert_eq!(p.coeff(&comp(4, &[(1, 2), (2, 2)])), q(1));
        assert_eq!(p.coeff(&comp(4, &[(2, 2), (1, 2)])), q(1));
        assert_eq!(p.coeff(&comp(4, &[(3, 0)])), q(1));
        let sq = stuffle(&comp(4, &[(1, 1)]), &comp(4, &[(1, 1)]));
        assert_eq!(sq.coeff(&comp(4, &[(1, 1), (1, 1)])), q(2));
    }

    #[test]
    fn word_composition_examples() {
        let l4 = lv(4);
        assert_eq!(word_to_composition(&word("0.z3"), l4).unwrap(), (-1, comp(4, &[(2, 1)])));
        assert_eq!(word_to_composition(&word("z2"), l4).unwrap(), (-1, comp(4, &[(1, 2)])));
        assert_eq!(
            word_to_composition(&word("z1.z3"), l4).unwrap(),
            (1, comp(4, &[(1, 3), (1, 2)]))
        );
        assert!(matches!(
            word_to_composition(&word("z1.0"), l4),
            Err(MpvError::NoSeriesForm(_))
        ));
        assert!(word_to_composition(&Word::empty(), l4).is_err());
    }

    #[test]
    fn regularization_examples() {
        let w = word("0.z1");
        assert_eq!(shuffle_regularize(&w), LinComb::unit(w));
        let r = shuffle_regularize(&word("z0.z2"));
        assert_eq!(r, LinComb::term(word("z2.z0"), q(-1)));
        let r = shuffle_regularize(&word("z2.0"));
        assert_eq!(r, LinComb::term(word("0.z2"), q(-1)));
        assert!(shuffle_regularize(&word("z0")).is_empty());
        assert!(shuffle_regularize(&word("0")).is_empty());

        let r = stuffle_regularize(&comp(4, &[(1, 0), (1, 3)]));
        let expect: LinComb<Composition> =
            [(comp(4, &[(1, 3), (1, 0)]), q(-1)), (comp(4, &[(2, 3)]), q(-1))]
                .into_iter()
                .collect();
        assert_eq!(r, expect);
        assert!(stuffle_regularize(&comp(4, &[(1, 0)])).is_empty());
    }

    #[test]
    fn shuffle_poly_of_e1_powers() {
        let mut reg = Regularizer::new();
        // c(e1 e1) = T^2 / 2
        let p = reg.shuffle_poly(&word("z0.z0"));
        assert_eq!(p.len(), 3);
        assert_eq!(p[2], LinComb::term(Word::empty(), crate::lincomb::q_frac(1, 2)));
        let p = reg.shuffle_poly(&word("z0"));
        assert_eq!(p[1], LinComb::term(Word::empty(), q(-1)));
    }

    #[test]
    fn enumeration_counts() {
        let l4 = lv(4);
        assert_eq!(enumerate_words(3, l4, false).len(), 125);
        assert_eq!(enumerate_words(3, l4, true).len(), 80);
        assert_eq!(enumerate_words(1, l4, false).len(), 5);
        let ws = enumerate_words(2, l4, false);
        assert_eq!(ws[0], word("0.0"));
        assert_eq!(ws[1], word("0.z0"));
        assert!(ws.windows(2).all(|p| p[0] < p[1]));
        assert_eq!(enumerate_compositions(2, l4).len(), 20);
        assert_eq!(enumerate_compositions(3, l4).len(), 100);
    }

    #[test]
    fn string_grammar() {
        let c: Composition = "Li[1,2;2,3]@4".parse().unwrap();
        assert_eq!(c, comp(4, &[(1, 2), (2, 3)]));
        assert_eq!(c.to_string(), "Li[1,2;2,3]@4");
        assert_eq!(word("0.z1.z3").to_string(), "0.z1.z3");
        assert!("Li[0;1]@4".parse::<Composition>().is_err());
        assert!("Li[1;1]@0".parse::<Composition>().is_err());
        assert!("0.y1".parse::<Word>().is_err());
        assert!("z".parse::<Word>().is_err());
    }
}
