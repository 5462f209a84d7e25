//! Free Lie algebra on `{e0} ∪ {e_ζ}`, the Ihara bracket and the depth-2 β map.
//!
//! Lie elements are stored as Lie polynomials in the free associative algebra;
//! Lyndon coordinates are read off by peeling the smallest word, which leads the
//! standard bracketing of a Lyndon word.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{MpvError, Result};
use crate::linalg::{nullspace, SparseMatrix};
use crate::lincomb::{format_q, parse_q, q, LinComb, Q};
use crate::octahedral::{extract_octahedral_rows_with, LetterSubstitution, Selection};
use crate::relations::{assemble_all_splits_matrix, assemble_standard_matrix, rows_distribution, Family, RelationMatrix, RelationRow};
use crate::words::{enumerate_words, Letter, Level, Word};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LieElement {
    poly: LinComb<Word>,
}

impl LieElement {
    pub fn zero() -> Self {
        LieElement::default()
    }

    pub fn letter(l: Letter) -> Self {
        LieElement { poly: LinComb::unit(Word(vec![l])) }
    }

    /// `e(a)` at level `n`, index taken mod `n`.
    pub fn e(a: i64, n: u32) -> Self {
        LieElement::letter(Letter::Root(a.rem_euclid(n as i64) as u32))
    }

    /// Wraps a polynomial, checking that it is a Lie polynomial.
    pub fn from_poly(poly: LinComb<Word>) -> Result<Self> {
        let e = LieElement { poly };
        e.lyndon_coordinates()?;
        Ok(e)
    }

    pub fn poly(&self) -> &LinComb<Word> {
        &self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_empty()
    }

    /// Degree if homogeneous and nonzero.
    pub fn weight(&self) -> Option<usize> {
        let mut ws = self.poly.keys().map(|w| w.weight());
        let first = ws.next()?;
        ws.all(|w| w == first).then_some(first)
    }

    pub fn add(&self, other: &LieElement) -> LieElement {
        let mut p = self.poly.clone();
        p.add_assign(&other.poly);
        LieElement { poly: p }
    }

    pub fn add_scaled(&mut self, other: &LieElement, c: &Q) {
        self.poly.add_scaled(&other.poly, c);
    }

    pub fn scaled(&self, c: &Q) -> LieElement {
        LieElement { poly: self.poly.clone().scaled(c) }
    }

    /// The commutator `[self, other] = self·other - other·self`.
    pub fn commutator(&self, other: &LieElement) -> LieElement {
        LieElement { poly: commutator_poly(&self.poly, &other.poly) }
    }

    /// Standard bracketing of a Lyndon word.
    pub fn from_lyndon(w: &Word) -> LieElement {
        if w.0.len() == 1 {
            return LieElement::letter(w.0[0]);
        }
        let (u, v) = standard_factorization(w);
        LieElement::from_lyndon(&u).commutator(&LieElement::from_lyndon(&v))
    }

    pub fn from_lyndon_coordinates(c: &LinComb<Word>) -> LieElement {
        let mut out = LieElement::zero();
        for (w, x) in c.iter() {
            out.add_scaled(&LieElement::from_lyndon(w), x);
        }
        out
    }

    /// Coordinates in the basis of standard bracketings of Lyndon words.
    pub fn lyndon_coordinates(&self) -> Result<LinComb<Word>> {
        let mut rest = self.poly.clone();
        let mut out = LinComb::new();
        while let Some((w, c)) = rest.leading().map(|(w, c)| (w.clone(), c.clone())) {
            if !is_lyndon(&w) {
                return Err(MpvError::Invalid(format!("not a Lie polynomial: leading word {w} is not Lyndon")));
            }
            rest.add_scaled(&LieElement::from_lyndon(&w).poly, &-c.clone());
            out.add_term(w, c);
        }
        Ok(out)
    }

    /// Every root index shifted by `b` mod `n`; `e0` is fixed.
    pub fn shift(&self, b: u32, n: u32) -> LieElement {
        LieElement {
            poly: self.poly.map_linear(|w| {
                LinComb::unit(Word(
                    w.0.iter()
                        .map(|l| match l {
                            Letter::Zero => Letter::Zero,
                            Letter::Root(a) => Letter::Root((a + b) % n),
                        })
                        .collect(),
                ))
            }),
        }
    }

    pub fn substitute(&self, s: &LetterSubstitution) -> LieElement {
        LieElement { poly: s.apply(&self.poly) }
    }

    /// Coordinates over the word basis, as `(word, coefficient)` pairs.
    pub fn word_vector(&self, basis: &[Word]) -> Vec<Q> {
        basis.iter().map(|w| self.poly.coeff(w)).collect()
    }
}

fn commutator_poly(a: &LinComb<Word>, b: &LinComb<Word>) -> LinComb<Word> {
    let mut out = LinComb::new();
    for (u, x) in a.iter() {
        for (v, y) in b.iter() {
            let c = x * y;
            out.add_term(u.concat(v), c.clone());
            out.add_term(v.concat(u), -c);
        }
    }
    out
}

pub fn is_lyndon(w: &Word) -> bool {
    let n = w.0.len();
    n > 0 && (1..n).all(|i| w.0[..] < w.0[i..])
}

/// `w = uv` with `v` the longest proper Lyndon suffix.
fn standard_factorization(w: &Word) -> (Word, Word) {
    for i in 1..w.0.len() {
        let v = Word(w.0[i..].to_vec());
        if is_lyndon(&v) {
            return (Word(w.0[..i].to_vec()), v);
        }
    }
    unreachable!("a Lyndon word of length >= 2 has a proper Lyndon suffix")
}

/// The derivation `d_u` with `d_u(e0) = 0`, `d_u(e_{μ^b}) = [e_{μ^b}, u⟨b⟩]`.
pub fn ihara_derivation(u: &LieElement, v: &LieElement, n: u32) -> LieElement {
    let mut images: BTreeMap<u32, LinComb<Word>> = BTreeMap::new();
    let mut out = LinComb::new();
    for (w, c) in v.poly.iter() {
        for (i, l) in w.0.iter().enumerate() {
            let Letter::Root(b) = *l else { continue };
            let img = images
                .entry(b)
                .or_insert_with(|| commutator_poly(&LieElement::letter(*l).poly, &u.shift(b, n).poly));
            let pre = Word(w.0[..i].to_vec());
            let post = Word(w.0[i + 1..].to_vec());
            for (m, x) in img.iter() {
                out.add_term(pre.concat(m).concat(&post), c * x);
            }
        }
    }
    LieElement { poly: out }
}

/// `{u, v} = [u, v] + d_u(v) - d_v(u)`.
pub fn ihara_bracket(u: &LieElement, v: &LieElement, n: u32) -> LieElement {
    let mut out = u.commutator(v);
    out.add_scaled(&ihara_derivation(u, v, n), &Q::one());
    out.add_scaled(&ihara_derivation(v, u, n), &-Q::one());
    out
}

/// `e0 ↔ e1, e_i ↔ e_{-i}, e_{-1} ↔ e_∞` at level 4.
pub fn sigma_involution(u: &LieElement) -> LieElement {
    u.substitute(&LetterSubstitution::sigma())
}

/// `2e_{-1} + 2e_1 + e_{-i} + e_i`.
pub fn v1() -> LieElement {
    parse_lie("2*e(2) + 2*e(0) + e(3) + e(1)", Level::new(4).unwrap()).expect("literal")
}

/// `[e0,e_i] - [e0,e_{-i}] + [e1,e_i] + [e_{-i},e1] + [e_{-i},e_i]`.
pub fn v2() -> LieElement {
    parse_lie("[e0,e(1)] - [e0,e(3)] + [e(0),e(1)] + [e(3),e(0)] + [e(3),e(1)]", Level::new(4).unwrap()).expect("literal")
}

fn fmt_letter(l: Letter) -> String {
    match l {
        Letter::Zero => "e0".into(),
        Letter::Root(a) => format!("e({a})"),
    }
}

fn fmt_bracketing(w: &Word) -> String {
    if w.0.len() == 1 {
        return fmt_letter(w.0[0]);
    }
    let (u, v) = standard_factorization(w);
    format!("[{},{}]", fmt_bracketing(&u), fmt_bracketing(&v))
}

fn fmt_terms<S: Ord>(terms: &LinComb<S>, f: impl Fn(&S) -> String) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (s, c)) in terms.iter().enumerate() {
        let neg = c < &Q::zero();
        let a = if neg { -c.clone() } else { c.clone() };
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        if !a.is_one() {
            out.push_str(&format_q(&a));
            out.push('*');
        }
        out.push_str(&f(s));
    }
    out
}

impl fmt::Display for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.lyndon_coordinates() {
            Ok(c) => f.write_str(&fmt_terms(&c, fmt_bracketing)),
            Err(_) => write!(f, "{}", self.poly),
        }
    }
}

// ---------------------------------------------------------------------------
// Parser for `2*e(1) - [e0,[e(1),e(2)]]`

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
    n: u32,
    depth: usize,
}

const MAX_NESTING: usize = 64;

impl Parser<'_> {
    fn err(&self, msg: &str) -> MpvError {
        MpvError::Parse(format!("{msg} at byte {}", self.i))
    }

    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.i).copied()
    }

    fn eat(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.i += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected {:?}", c as char)))
        }
    }

    fn number(&mut self) -> Result<&str> {
        self.ws();
        let start = self.i;
        if self.i < self.s.len() && self.s[self.i] == b'-' {
            self.i += 1;
        }
        while self.i < self.s.len() && (self.s[self.i].is_ascii_digit() || self.s[self.i] == b'/') {
            self.i += 1;
        }
        let t = std::str::from_utf8(&self.s[start..self.i]).map_err(|_| self.err("bad utf8"))?;
        if t.is_empty() || t == "-" {
            return Err(self.err("expected number"));
        }
        Ok(t)
    }

    fn expr(&mut self) -> Result<LieElement> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(self.err("nesting too deep"));
        }
        let mut out = LieElement::zero();
        let mut first = true;
        loop {
            let sign = match self.peek() {
                Some(b'+') if !first => {
                    self.i += 1;
                    Q::one()
                }
                Some(b'-') => {
                    self.i += 1;
                    -Q::one()
                }
                _ if first => Q::one(),
                _ => break,
            };
            first = false;
            let coef = if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                let t = self.number()?.to_string();
                let c = parse_q(&t).ok_or_else(|| self.err("bad coefficient"))?;
                self.eat(b'*')?;
                c
            } else {
                Q::one()
            };
            let atom = self.atom()?;
            out.add_scaled(&atom, &(sign * coef));
        }
        self.depth -= 1;
        Ok(out)
    }

    fn atom(&mut self) -> Result<LieElement> {
        match self.peek() {
            Some(b'[') => {
                self.i += 1;
                let a = self.expr()?;
                self.eat(b',')?;
                let b = self.expr()?;
                self.eat(b']')?;
                Ok(a.commutator(&b))
            }
            Some(b'e') => {
                self.i += 1;
                if self.peek() == Some(b'0') {
                    self.i += 1;
                    return Ok(LieElement::letter(Letter::Zero));
                }
                self.eat(b'(')?;
                let t = self.number()?;
                let a: i64 = t.parse().map_err(|_| self.err("bad index"))?;
                self.eat(b')')?;
                Ok(LieElement::e(a, self.n))
            }
            _ => Err(self.err("expected e0, e(a) or [")),
        }
    }
}

/// Parses a combination of `e0`, `e(a)` and nested brackets `[x,y]`.
pub fn parse_lie(s: &str, level: Level) -> Result<LieElement> {
    let mut p = Parser { s: s.as_bytes(), i: 0, n: level.get(), depth: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

// ---------------------------------------------------------------------------
// Kernel of the coproduct matrix

/// How the relation matrix behind [`dmrd_kernel_with`] is built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct KernelOptions {
    /// Octahedral coefficients to add (level 4, weights 3 and 4 only).
    pub octahedral: Option<Selection>,
    /// Use every weight split in families I and II instead of `1 + (w-1)`.
    pub all_splits: bool,
}

/// Weight-1 system: distribution rows, the vanishing `e0` coefficient and
/// `2πi = 0` (`e_{μ^a} = e_{μ^{-a}}`).
fn weight_one_matrix(level: Level) -> Result<RelationMatrix> {
    let mut m = RelationMatrix::new(1, level, enumerate_words(1, level, false));
    for d in level.divisors().into_iter().filter(|d| *d > 1) {
        m.push(rows_distribution(1, level, d)?);
    }
    m.push([RelationRow::new(LinComb::unit(Word(vec![Letter::Zero])), Family::W1, "e0")]);
    let n = level.get();
    for a in 1..n {
        if a < n - a {
            let mut t = LinComb::unit(Word(vec![Letter::Root(a)]));
            t.add_term(Word(vec![Letter::Root(n - a)]), -Q::one());
            m.push([RelationRow::new(t, Family::W1, format!("2 pi i = 0 ({a})"))]);
        }
    }
    Ok(m)
}

pub fn kernel_matrix(weight: usize, level: Level, opts: KernelOptions) -> Result<RelationMatrix> {
    if weight == 0 {
        return Err(MpvError::Invalid("weight must be positive".into()));
    }
    let mut m = if weight == 1 {
        weight_one_matrix(level)?
    } else {
        let fams = [Family::I, Family::II, Family::III, Family::IV];
        if opts.all_splits {
            assemble_all_splits_matrix(weight, level, &fams)?
        } else {
            assemble_standard_matrix(weight, level, &fams)?
        }
    };
    if let Some(sel) = opts.octahedral {
        if level.get() != 4 {
            return Err(MpvError::Invalid("octahedral rows exist at level 4 only".into()));
        }
        if weight == 3 || weight == 4 {
            m.push(extract_octahedral_rows_with(weight, sel)?);
        }
    }
    Ok(m)
}

/// Nullspace of the coproduct matrix over the word basis, as polynomials.
pub fn dmrd_kernel(weight: usize, level: Level, include_octahedral: bool) -> Result<Vec<LinComb<Word>>> {
    let opts = KernelOptions { octahedral: include_octahedral.then_some(Selection::Listed), all_splits: false };
    dmrd_kernel_with(weight, level, opts)
}

pub fn dmrd_kernel_with(weight: usize, level: Level, opts: KernelOptions) -> Result<Vec<LinComb<Word>>> {
    let m = kernel_matrix(weight, level, opts)?;
    let ns = nullspace(&m.to_sparse()?);
    Ok(ns
        .into_iter()
        .map(|v| m.basis.iter().cloned().zip(v).filter(|(_, c)| !c.is_zero()).collect())
        .collect())
}

/// `true` if `v` is annihilated by every row of `m`.
pub fn in_kernel(m: &RelationMatrix, v: &LinComb<Word>) -> bool {
    m.rows.iter().all(|r| r.terms.iter().fold(Q::zero(), |acc, (w, c)| acc + c * v.coeff(w)).is_zero())
}

/// Rank of a family of polynomials over their joint word support.
pub fn span_rank(vs: &[LinComb<Word>]) -> usize {
    let mut cols: BTreeMap<&Word, usize> = BTreeMap::new();
    for v in vs {
        for w in v.keys() {
            let k = cols.len();
            cols.entry(w).or_insert(k);
        }
    }
    let mut m = SparseMatrix::new(cols.len());
    for v in vs {
        m.push_row(v.iter().map(|(w, c)| (cols[w], c.clone())).collect());
    }
    crate::linalg::rank(&m, crate::linalg::RankMode::Exact).map(|r| r.rank).unwrap_or(0)
}

#[derive(Clone, Debug, Serialize)]
pub struct TowerDegree {
    pub degree: usize,
    pub kernel_dim: usize,
    pub expected_generators: usize,
    pub brackets: Vec<String>,
    pub brackets_in_kernel: bool,
    pub brackets_independent: bool,
    pub new_generators: Vec<String>,
    pub sigma_antisymmetric: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TowerReport {
    pub options: KernelOptions,
    pub degrees: Vec<TowerDegree>,
    pub v1_in_kernel: bool,
    pub v2_in_kernel: bool,
    pub ok: bool,
}

/// Integer primitive vector, sign fixed by the first nonzero coordinate.
fn normalize(v: &LinComb<Word>) -> LinComb<Word> {
    v.primitive()
}

/// Kernel vectors completing `known` to a basis of `kernel`, greedily in order.
fn complement(known: &[LinComb<Word>], kernel: &[LinComb<Word>]) -> Vec<LinComb<Word>> {
    let mut cur: Vec<LinComb<Word>> = known.to_vec();
    let mut out = Vec::new();
    let mut r = span_rank(&cur);
    for k in kernel {
        cur.push(k.clone());
        let r2 = span_rank(&cur);
        if r2 > r {
            r = r2;
            out.push(normalize(k));
        } else {
            cur.pop();
        }
    }
    out
}

fn sigma_anti(v: &LinComb<Word>) -> bool {
    let s = LetterSubstitution::sigma().apply(v);
    let mut sum = v.clone();
    sum.add_assign(&s);
    sum.is_empty()
}

/// Builds the free tower `v1, v2, {v1,v2}, v3, {v1,v3}, {v1,{v1,v2}}, v4` inside the
/// level-4 kernels of weights 1 to 4.
pub fn generator_tower_check(opts: KernelOptions) -> Result<TowerReport> {
    let l = Level::new(4)?;
    let n = 4;
    let expected = [1usize, 1, 2, 3];
    let (v1, v2) = (v1(), v2());
    let mut degrees = Vec::new();
    let mut gens: BTreeMap<usize, LieElement> = BTreeMap::new();
    gens.insert(1, v1.clone());
    gens.insert(2, v2.clone());
    let mut v1_in = false;
    let mut v2_in = false;
    for w in 1..=4 {
        let m = kernel_matrix(w, l, opts)?;
        let kernel: Vec<LinComb<Word>> = {
            let ns = nullspace(&m.to_sparse()?);
            ns.into_iter().map(|v| m.basis.iter().cloned().zip(v).filter(|(_, c)| !c.is_zero()).collect()).collect()
        };
        let brackets: Vec<(String, LieElement)> = match w {
            3 => vec![("{v1,v2}".into(), ihara_bracket(&v1, &v2, n))],
            4 => {
                let v12 = ihara_bracket(&v1, &v2, n);
                let mut b = vec![("{v1,{v1,v2}}".into(), ihara_bracket(&v1, &v12, n))];
                if let Some(v3) = gens.get(&3) {
                    b.insert(0, ("{v1,v3}".into(), ihara_bracket(&v1, v3, n)));
                }
                b
            }
            _ => Vec::new(),
        };
        let mut known: Vec<LinComb<Word>> = brackets.iter().map(|(_, b)| b.poly.clone()).collect();
        if w == 1 {
            v1_in = in_kernel(&m, v1.poly());
            known.push(v1.poly.clone());
        }
        if w == 2 {
            v2_in = in_kernel(&m, v2.poly());
            known.push(v2.poly.clone());
        }
        let brackets_in_kernel = brackets.iter().all(|(_, b)| in_kernel(&m, b.poly()));
        let brackets_independent = span_rank(&brackets.iter().map(|(_, b)| b.poly.clone()).collect::<Vec<_>>()) == brackets.len();
        let new = complement(&known, &kernel);
        if w >= 3 {
            if let Some(g) = new.first() {
                gens.insert(w, LieElement { poly: g.clone() });
            }
        }
        let mut all: Vec<LinComb<Word>> = known.clone();
        all.extend(new.iter().cloned());
        degrees.push(TowerDegree {
            degree: w,
            kernel_dim: kernel.len(),
            expected_generators: expected[w - 1],
            brackets: brackets.iter().map(|(s, _)| s.clone()).collect(),
            brackets_in_kernel,
            brackets_independent,
            new_generators: new.iter().map(|g| format!("{}", LieElement { poly: g.clone() })).collect(),
            sigma_antisymmetric: all.iter().all(sigma_anti),
        });
    }
    let ok = v1_in
        && v2_in
        && degrees.iter().all(|d| {
            d.kernel_dim == d.expected_generators && d.brackets_in_kernel && d.brackets_independent && d.sigma_antisymmetric
        });
    Ok(TowerReport { options: opts, degrees, v1_in_kernel: v1_in, v2_in_kernel: v2_in, ok })
}

// ---------------------------------------------------------------------------
// Depth 2

/// Formal depth-2 symbol `[a, b]`, normalized with `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct BracketPair(pub u32, pub u32);

impl fmt::Display for BracketPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.0, self.1)
    }
}

/// `[a, b]` with indices mod `n`, as `(sign, normalized pair)`; `None` when `a ≡ b`.
pub fn bracket_pair(a: i64, b: i64, n: u32) -> Option<(i64, BracketPair)> {
    let a = a.rem_euclid(n as i64) as u32;
    let b = b.rem_euclid(n as i64) as u32;
    match a.cmp(&b) {
        std::cmp::Ordering::Less => Some((1, BracketPair(a, b))),
        std::cmp::Ordering::Greater => Some((-1, BracketPair(b, a))),
        std::cmp::Ordering::Equal => None,
    }
}

/// Combination of symbols `e(a)`, `a ≢ 0`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DepthOneElement {
    pub combo: LinComb<u32>,
}

impl DepthOneElement {
    pub fn from_indices(level: u32, idx: &[i64]) -> Result<Self> {
        let mut combo = LinComb::new();
        for &a in idx {
            let r = a.rem_euclid(level as i64) as u32;
            if r == 0 {
                return Err(MpvError::Invalid(format!("index {a} is 0 mod {level}")));
            }
            combo.add_term(r, Q::one());
        }
        Ok(DepthOneElement { combo })
    }
}

impl fmt::Display for DepthOneElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_terms(&self.combo, |a| format!("e({a})")))
    }
}

/// Result of [`depth2_bracket`]: the expansion and how many brackets carried an
/// index `≡ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Depth2 {
    pub terms: LinComb<BracketPair>,
    pub zero_index: usize,
}

/// `{e(a), e(b)} = [a,b] - [a+b,b] + [a+b,a]`.
pub fn depth2_bracket(a: i64, b: i64, n: u32) -> Depth2 {
    let mut terms = LinComb::new();
    let mut zero_index = 0;
    for (c, x, y) in [(1, a, b), (-1, a + b, b), (1, a + b, a)] {
        if (x.rem_euclid(n as i64) == 0) || (y.rem_euclid(n as i64) == 0) {
            zero_index += 1;
        }
        if let Some((s, p)) = bracket_pair(x, y, n) {
            terms.add_term(p, q(c * s));
        }
    }
    Depth2 { terms, zero_index }
}

/// Depth-2 part of a degree-2 Lie polynomial without `e0`, as bracket symbols.
pub fn project_depth2(u: &LieElement) -> LinComb<BracketPair> {
    let mut out = LinComb::new();
    for (w, c) in u.poly.iter() {
        if let [Letter::Root(a), Letter::Root(b)] = w.0[..] {
            if a < b {
                out.add_term(BracketPair(a, b), c.clone());
            }
        }
    }
    out
}

fn beta_of(x: &DepthOneElement, y: &DepthOneElement, n: u32) -> (LinComb<BracketPair>, usize) {
    let mut out = LinComb::new();
    let mut zeros = 0;
    for (a, c) in x.combo.iter() {
        for (b, d) in y.combo.iter() {
            let e = depth2_bracket(*a as i64, *b as i64, n);
            zeros += e.zero_index;
            out.add_scaled(&e.terms, &(c * d));
        }
    }
    (out, zeros)
}

#[derive(Clone, Debug, Serialize)]
pub struct BetaKernel {
    pub level: u32,
    pub generators: usize,
    pub wedges: usize,
    pub image_rank: usize,
    pub dim: usize,
    /// Kernel vectors over the wedges `g_i ∧ g_j` (`i < j`), as `(i, j, coefficient)`.
    pub basis: Vec<Vec<(usize, usize, String)>>,
    pub zero_index_brackets: usize,
}

/// Kernel of `β: g_i ∧ g_j ↦ {g_i, g_j}` into the free span of bracket symbols.
pub fn beta_kernel(level: Level, generators: &[DepthOneElement]) -> Result<BetaKernel> {
    let n = level.get();
    let k = generators.len();
    let wedges: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let mut symbols: BTreeMap<BracketPair, usize> = BTreeMap::new();
    let mut cols: Vec<LinComb<BracketPair>> = Vec::with_capacity(wedges.len());
    let mut zeros = 0;
    for &(i, j) in &wedges {
        let (img, z) = beta_of(&generators[i], &generators[j], n);
        zeros += z;
        for p in img.keys() {
            let s = symbols.len();
            symbols.entry(*p).or_insert(s);
        }
        cols.push(img);
    }
    // rows = symbols, columns = wedges
    let mut m = SparseMatrix::new(wedges.len());
    let mut by_symbol: Vec<Vec<(usize, Q)>> = vec![Vec::new(); symbols.len()];
    for (c, img) in cols.iter().enumerate() {
        for (p, x) in img.iter() {
            by_symbol[symbols[p]].push((c, x.clone()));
        }
    }
    for r in by_symbol {
        m.push_row(r);
    }
    let ns = nullspace(&m);
    let basis = ns
        .iter()
        .map(|v| {
            v.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(c, x)| (wedges[c].0, wedges[c].1, format_q(x)))
                .collect()
        })
        .collect();
    Ok(BetaKernel {
        level: n,
        generators: k,
        wedges: wedges.len(),
        image_rank: wedges.len() - ns.len(),
        dim: ns.len(),
        basis,
        zero_index_brackets: zeros,
    })
}

/// `f_a = e(a) + e(-a)`, `1 <= a <= (p-1)/2`.
pub fn level_p_generators(p: u32) -> Result<Vec<DepthOneElement>> {
    (1..=(p - 1) / 2).map(|a| DepthOneElement::from_indices(p, &[a as i64, -(a as i64)])).collect()
}

/// `g_{k,j} = e(pk+j) + e(p²-pk-j) + e(pj) + e(p²-pj)`.
pub fn g_kj(p: u32, k: u32, j: u32) -> Result<DepthOneElement> {
    let (p, k, j) = (p as i64, k as i64, j as i64);
    DepthOneElement::from_indices((p * p) as u32, &[p * k + j, p * p - p * k - j, p * j, p * p - p * j])
}

/// Index pairs `(k, j)` of the generators at level `p²`.
pub fn level_p2_indices(p: u32) -> Vec<(u32, u32)> {
    let half = (p - 1) / 2;
    let mut out: Vec<(u32, u32)> = (0..half).flat_map(|k| (1..p).map(move |j| (k, j))).collect();
    out.extend((1..=half).map(|j| (half, j)));
    out
}

pub fn level_p2_generators(p: u32) -> Result<Vec<DepthOneElement>> {
    check_prime(p)?;
    level_p2_indices(p).into_iter().map(|(k, j)| g_kj(p, k, j)).collect()
}

fn check_prime(p: u32) -> Result<()> {
    if p < 5 || !crate::linalg::is_prime_u64(p as u64) {
        return Err(MpvError::InvalidPrime(p as u64));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct ClaimReport {
    pub p: u32,
    pub is_zero: bool,
    pub distinct_terms: usize,
    pub expected_terms: usize,
    pub unit_coefficients: bool,
    pub zero_index_brackets: usize,
}

type GIdx = (u32, u32);

/// The six sums of `{g, g}` terms at level `p²`, reduced by antisymmetry.
pub fn claim_terms(p: u32) -> LinComb<(GIdx, GIdx)> {
    let h = (p - 3) / 2;
    let mut out: LinComb<(GIdx, GIdx)> = LinComb::new();
    let mut add = |a: GIdx, b: GIdx, c: i64| match a.cmp(&b) {
        std::cmp::Ordering::Less => out.add_term((a, b), q(c)),
        std::cmp::Ordering::Greater => out.add_term((b, a), q(-c)),
        std::cmp::Ordering::Equal => {}
    };
    for k in 0..=h {
        for l in k..=h {
            for j in 2..=p - 2 {
                add((k, 1), (l, j), 1);
            }
        }
    }
    for k in 0..=h + 1 {
        for j in 2..=h + 1 {
            add((k, 1), (h + 1, j), 1);
        }
    }
    for k in 0..=h {
        for l in k + 1..=h {
            for j in 2..=p - 2 {
                add((k, p - 1), (l, j), 1);
            }
        }
    }
    for k in 0..=h {
        for j in 2..=h + 1 {
            add((k, p - 1), (h + 1, j), 1);
        }
    }
    for k in 0..=h {
        for l in k..=h {
            for j in 2..=p - 2 {
                add((k, j), (l, p - 1), -1);
                add((k, j), (l + 1, 1), -1);
            }
        }
    }
    out
}

/// Expands the claimed identity through [`depth2_bracket`] at `N = p²`.
pub fn verify_claim(p: u32) -> Result<ClaimReport> {
    check_prime(p)?;
    let n = p * p;
    let terms = claim_terms(p);
    let mut total: LinComb<BracketPair> = LinComb::new();
    let mut zeros = 0;
    let mut cache: BTreeMap<GIdx, DepthOneElement> = BTreeMap::new();
    let mut get = |i: GIdx| -> Result<DepthOneElement> {
        if let Some(g) = cache.get(&i) {
            return Ok(g.clone());
        }
        let g = g_kj(p, i.0, i.1)?;
        cache.insert(i, g.clone());
        Ok(g)
    };
    for ((a, b), c) in terms.iter() {
        let (img, z) = beta_of(&get(*a)?, &get(*b)?, n);
        zeros += z;
        total.add_scaled(&img, c);
    }
    let h = ((p - 3) / 2) as usize;
    Ok(ClaimReport {
        p,
        is_zero: total.is_empty(),
        distinct_terms: terms.len(),
        expected_terms: h * (p * p) as usize,
        unit_coefficients: terms.iter().all(|(_, c)| c == &Q::one() || c == &-Q::one()),
        zero_index_brackets: zeros,
    })
}

/// Formats a combination of bracket symbols as `[a,b] - 2*[c,d]`.
pub fn format_pairs(c: &LinComb<BracketPair>) -> String {
    fmt_terms(c, |p| p.to_string())
}

/// Parses `[a,b] - 2*[c,d]` at level `n`, normalizing by antisymmetry.
pub fn parse_pairs(s: &str, n: u32) -> Result<LinComb<BracketPair>> {
    let level = Level::new(n)?;
    let e = parse_lie(&s.replace('[', "[e(").replace(',', "),e(").replace(']', ")]"), level)?;
    if e.weight().is_some_and(|w| w != 2) {
        return Err(MpvError::Parse("expected depth-2 symbols".into()));
    }
    Ok(project_depth2(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(n: u32) -> Level {
        Level::new(n).unwrap()
    }

    #[test]
    fn sigma_on_generators() {
        assert_eq!(sigma_involution(&v1()), v1().scaled(&q(-1)));
        assert_eq!(sigma_involution(&v2()), v2().scaled(&q(-1)));
    }

    #[test]
    fn ihara_example_level_five() {
        let b = ihara_bracket(&LieElement::e(1, 5), &LieElement::e(2, 5), 5);
        let want = parse_lie("[e(1),e(2)] - [e(3),e(2)] + [e(3),e(1)]", l(5)).unwrap();
        assert_eq!(b, want);
        let d = depth2_bracket(1, 2, 5);
        assert_eq!(d.terms, project_depth2(&want));
        assert_eq!(format_pairs(&d.terms), "[1,2] - [1,3] + [2,3]");
    }

    #[test]
    fn lyndon_roundtrip() {
        let e = parse_lie("[e0,[e0,e(1)]] - 3*[e(1),e(2)]", l(4)).unwrap();
        let c = e.lyndon_coordinates().unwrap();
        assert_eq!(LieElement::from_lyndon_coordinates(&c), e);
        assert!(LieElement::from_poly(LinComb::unit(Word(vec![Letter::Zero, Letter::Root(1)]))).is_err());
        assert_eq!(parse_lie(&e.to_string(), l(4)).unwrap(), e);
    }

    #[test]
    fn level_counts() {
        assert_eq!(level_p2_generators(5).unwrap().len(), 10);
        assert_eq!(level_p2_generators(7).unwrap().len(), 21);
        assert_eq!(g_kj(5, 0, 1).unwrap().to_string(), "e(1) + e(5) + e(20) + e(24)");
    }

    #[test]
    fn beta_small_primes() {
        for (p, want) in [(5, 1), (7, 2)] {
            let k = beta_kernel(l(p), &level_p_generators(p).unwrap()).unwrap();
            assert_eq!(k.dim, want);
        }
    }

    #[test]
    fn claim_five() {
        let r = verify_claim(5).unwrap();
        assert!(r.is_zero);
        assert_eq!(r.distinct_terms, 25);
        assert!(r.unit_coefficients);
    }

    #[test]
    fn parse_errors() {
        for bad in ["", "e(", "[e0,e(1)", "2*", "e(1) e(2)", "e(x)", "[[[[", "3/0*e(1)"] {
            assert!(parse_lie(bad, l(4)).is_err(), "{bad}");
        }
        assert_eq!(parse_pairs("[2,1]", 5).unwrap(), LinComb::term(BracketPair(1, 2), q(-1)));
    }
}
