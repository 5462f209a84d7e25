//! Standard relation families and the linear systems built from them.
//!
//! Two kinds of rows live here. Coproduct rows (families I and II) are linear
//! functionals on the full word space of a weight; a Lie element satisfying the
//! double shuffle equations is annihilated by them. Value rows (double shuffle,
//! distribution, weight one) are linear relations among the regularized
//! coefficients `c(w)` of convergent words, with products linearized by shuffle.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{MpvError, Result};
use crate::linalg::{self, RankMode, RankReport, SparseMatrix};
use crate::lincomb::{format_q, parse_q, q, LinComb, Q};
use crate::words::{
    composition_to_word, enumerate_compositions, enumerate_words, shuffle, shuffle_lc, stuffle,
    Composition, Letter, Level, Part, Regularizer, Word, E0, E1,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Shuffle coproduct rows.
    I,
    /// Stuffle coproduct rows.
    II,
    /// Distribution over convergent sub-level words.
    III,
    /// Regularized distribution over sub-level words starting with `e1`.
    IV,
    /// Weight-one relations shuffled up to the target weight.
    W1,
    /// Regularized double shuffle among values.
    DS,
    /// Rows extracted from the octahedral identity.
    OCTA,
    /// Images of standard rows under the dihedral symmetries.
    DIH,
}

impl Family {
    pub const ALL: [Family; 8] =
        [Family::I, Family::II, Family::III, Family::IV, Family::W1, Family::DS, Family::OCTA, Family::DIH];

    pub fn tag(self) -> &'static str {
        match self {
            Family::I => "I",
            Family::II => "II",
            Family::III => "III",
            Family::IV => "IV",
            Family::W1 => "W1",
            Family::DS => "DS",
            Family::OCTA => "OCTA",
            Family::DIH => "DIH",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Family {
    type Err = MpvError;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let t = t.split('-').next().unwrap_or(t);
        Family::ALL
            .iter()
            .find(|f| f.tag().eq_ignore_ascii_case(t))
            .copied()
            .ok_or_else(|| MpvError::Parse(format!("unknown relation family {s:?}")))
    }
}

/// Parses a comma separated family set such as `I,II,III,IV`.
pub fn parse_family_set(s: &str) -> Result<Vec<Family>> {
    let mut out: Vec<Family> = s.split(',').filter(|x| !x.trim().is_empty()).map(str::parse).collect::<Result<_>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

pub fn family_set_string(fams: &[Family]) -> String {
    if fams.is_empty() {
        return "-".into();
    }
    fams.iter().map(|f| f.tag()).collect::<Vec<_>>().join(",")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationRow {
    pub terms: LinComb<Word>,
    pub family: Family,
    pub provenance: String,
}

impl RelationRow {
    pub fn new(terms: LinComb<Word>, family: Family, provenance: impl Into<String>) -> Self {
        RelationRow { terms, family, provenance: provenance.into() }
    }
}

#[derive(Clone, Debug)]
pub struct RelationMatrix {
    pub weight: usize,
    pub level: Level,
    pub basis: Vec<Word>,
    pub rows: Vec<RelationRow>,
}

impl RelationMatrix {
    pub fn new(weight: usize, level: Level, basis: Vec<Word>) -> Self {
        RelationMatrix { weight, level, basis, rows: Vec::new() }
    }

    pub fn column_index(&self) -> HashMap<&Word, usize> {
        self.basis.iter().enumerate().map(|(i, w)| (w, i)).collect()
    }

    /// Sparse form over the column basis; errors if a row leaves the basis.
    pub fn to_sparse(&self) -> Result<SparseMatrix> {
        let idx = self.column_index();
        let mut m = SparseMatrix::new(self.basis.len());
        for r in &self.rows {
            let mut entries = Vec::with_capacity(r.terms.len());
            for (w, c) in r.terms.iter() {
                let j = idx.get(w).ok_or_else(|| {
                    MpvError::Invalid(format!("{} row {} has word {w} outside the basis", r.family, r.provenance))
                })?;
                entries.push((*j, c.clone()));
            }
            m.push_row(entries);
        }
        Ok(m)
    }

    pub fn rank(&self, mode: RankMode) -> Result<RankReport> {
        linalg::rank(&self.to_sparse()?, mode)
    }

    pub fn push(&mut self, rows: impl IntoIterator<Item = RelationRow>) {
        self.rows.extend(rows.into_iter().filter(|r| !r.terms.is_empty()));
    }
}

// ---------------------------------------------------------------------------
// Relation JSON

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationJson {
    pub weight: usize,
    pub level: u32,
    pub row_family: String,
    pub terms: BTreeMap<String, String>,
}

pub fn relation_to_json(r: &RelationRow, weight: usize, level: Level) -> RelationJson {
    RelationJson {
        weight,
        level: level.get(),
        row_family: r.family.tag().to_string(),
        terms: r.terms.iter().map(|(w, c)| (w.to_string(), format_q(c))).collect(),
    }
}

pub fn relation_from_json(text: &str) -> Result<(RelationRow, usize, Level)> {
    let j: RelationJson = serde_json::from_str(text).map_err(|e| MpvError::Parse(e.to_string()))?;
    let level = Level::new(j.level)?;
    let family: Family = j.row_family.parse()?;
    let mut terms = LinComb::new();
    for (w, c) in &j.terms {
        let word: Word = w.parse()?;
        word.check_level(level)?;
        if word.weight() != j.weight {
            return Err(MpvError::Parse(format!("word {w} does not have weight {}", j.weight)));
        }
        let c = parse_q(c).ok_or_else(|| MpvError::Parse(format!("bad coefficient {c:?}")))?;
        terms.add_term(word, c);
    }
    Ok((RelationRow::new(terms, family, "json"), j.weight, level))
}

// ---------------------------------------------------------------------------
// Coproduct rows (full word basis)

/// For each letter `u` and each word `v` of weight `weight - 1`, the row `u ш v`.
pub fn rows_shuffle_coproduct(weight: usize, level: Level) -> Vec<RelationRow> {
    assert!(weight >= 2, "shuffle coproduct rows need weight >= 2");
    rows_shuffle_split(weight, level, 1)
}

/// Rows `u ш v` with `u` of weight `k` and `v` of weight `weight - k`.
pub fn rows_shuffle_split(weight: usize, level: Level, k: usize) -> Vec<RelationRow> {
    assert!(k >= 1 && k < weight);
    let mut out = Vec::new();
    for u in enumerate_words(k, level, false) {
        for v in enumerate_words(weight - k, level, false) {
            out.push(RelationRow::new(shuffle(&u, &v), Family::I, format!("{u} sh {v}")));
        }
    }
    out
}

/// For each composition `a` of weight 1 and `b` of weight `weight - 1`, the signed
/// word image of `a * b`, pairing against `ψ_*`: the coefficient of `(1,..,1;0,..,0)`
/// of depth `n` also picks up `(-1)^n/n` times that of `e0^{n-1} e1`.
pub fn rows_stuffle_coproduct(weight: usize, level: Level) -> Vec<RelationRow> {
    assert!(weight >= 2, "stuffle coproduct rows need weight >= 2");
    rows_stuffle_split(weight, level, 1)
}

/// Stuffle rows for compositions of weights `k` and `weight - k`.
pub fn rows_stuffle_split(weight: usize, level: Level, k: usize) -> Vec<RelationRow> {
    assert!(k >= 1 && k < weight);
    let mut out = Vec::new();
    for a in enumerate_compositions(k as u32, level) {
        for b in enumerate_compositions((weight - k) as u32, level) {
            let mut terms = LinComb::new();
            for (c, m) in stuffle(&a, &b).iter() {
                let (sign, w) = composition_to_word(c);
                terms.add_term(w, m * q(sign as i64));
                let n = c.parts.len();
                if n >= 2 && c.parts.iter().all(|p| *p == Part { s: 1, a: 0 }) {
                    let sign = if n % 2 == 0 { 1 } else { -1 };
                    terms.add_term(zeta_word(n), m * Q::new(sign.into(), (n as i64).into()));
                }
            }
            out.push(RelationRow::new(terms, Family::II, format!("{a} * {b}")));
        }
    }
    out
}

fn check_divisor(level: Level, d: u32) -> Result<()> {
    if d < 2 || !level.get().is_multiple_of(d) {
        return Err(MpvError::NotDivisor { d, n: level.get() });
    }
    Ok(())
}

/// Words of the given weight over `{e0} ∪ {e_α : α ∈ μ_{N/d}}`.
fn sub_level_words(weight: usize, level: Level, d: u32) -> Vec<Word> {
    enumerate_words(weight, level, false)
        .into_iter()
        .filter(|w| w.0.iter().all(|l| matches!(l, Letter::Zero) || matches!(l, Letter::Root(a) if a % d == 0)))
        .collect()
}

/// `Σ_W W` over all words obtained by replacing each `e_α` by some `e_β` with `β^d = α`.
fn lift_sum(m: &Word, level: Level, d: u32) -> LinComb<Word> {
    let n = level.get();
    let mut acc: Vec<Vec<Letter>> = vec![Vec::with_capacity(m.weight())];
    for l in &m.0 {
        let choices: Vec<Letter> = match l {
            Letter::Zero => vec![E0],
            Letter::Root(a) => (0..n).filter(|b| (d * b) % n == *a).map(Letter::Root).collect(),
        };
        acc = acc
            .into_iter()
            .flat_map(|p| {
                choices.iter().map(move |c| {
                    let mut p = p.clone();
                    p.push(*c);
                    p
                })
            })
            .collect();
    }
    acc.into_iter().map(|v| (Word(v), Q::one())).collect()
}

fn is_prime(d: u32) -> bool {
    d >= 2 && (2..d).take_while(|k| k * k <= d).all(|k| !d.is_multiple_of(k))
}

fn zeros(m: &Word) -> usize {
    m.weight() - m.depth()
}

/// Distribution rows `M - d^{#e0(M)} Σ_W W` for convergent sub-level words `M`.
pub fn rows_distribution(weight: usize, level: Level, d: u32) -> Result<Vec<RelationRow>> {
    check_divisor(level, d)?;
    let mut out = Vec::new();
    for m in sub_level_words(weight, level, d).into_iter().filter(|w| w.is_convergent()) {
        let mut terms = LinComb::unit(m.clone());
        let mult = q((d as i64).pow(zeros(&m) as u32));
        terms.add_scaled(&lift_sum(&m, level, d), &-mult);
        out.push(RelationRow::new(terms, Family::III, format!("dist d={d} {m}")));
    }
    Ok(out)
}

/// `L_d = Σ_{β^d = 1, β ≠ 1} e_β`, whose coefficient is `log d`.
fn log_d(level: Level, d: u32) -> LinComb<Word> {
    let n = level.get();
    (1..n).filter(|b| (d * b).is_multiple_of(n)).map(|b| (Word(vec![Letter::Root(b)]), Q::one())).collect()
}

/// Sub-level words starting with `e1` and not ending in `e0`.
fn divergent_sub_level_words(weight: usize, level: Level, d: u32) -> Vec<Word> {
    sub_level_words(weight, level, d)
        .into_iter()
        .filter(|m| m.0.first() == Some(&E1) && m.0.last() != Some(&E0))
        .collect()
}

/// Coproduct form of the regularized distribution: `M - d^{#e0} Σ_W W` for
/// sub-level words `M` starting with `e1`. It agrees with the value rows of
/// [`value_rows_reg_distribution`] modulo shuffle products.
pub fn rows_reg_distribution(weight: usize, level: Level, d: u32) -> Result<Vec<RelationRow>> {
    check_divisor(level, d)?;
    let mut out = Vec::new();
    for m in divergent_sub_level_words(weight, level, d) {
        let mut terms = lift_sum(&m, level, d).scaled(&-q((d as i64).pow(zeros(&m) as u32)));
        terms.add_term(m.clone(), Q::one());
        if !terms.is_empty() {
            out.push(RelationRow::new(terms, Family::IV, format!("regdist d={d} {m}")));
        }
    }
    Ok(out)
}

/// Regularized distribution rows for sub-level words starting with `e1` and not
/// ending in `e0`, written over convergent words.
///
/// Pulling back along `t ↦ t^d` moves the tangential base point at 1 by a factor
/// `d`, so with `c(e1) = -T` the T-polynomial of `M` evaluated at `T - log d` equals
/// `d^{#e0} Σ_W c_T(W)`. The rows are the constant terms of that identity.
pub fn value_rows_reg_distribution(reg: &mut Regularizer, weight: usize, level: Level, d: u32) -> Result<Vec<RelationRow>> {
    check_divisor(level, d)?;
    let l = log_d(level, d);
    let mut powers: Vec<LinComb<Word>> = vec![LinComb::unit(Word::empty())];
    let mut out = Vec::new();
    for m in divergent_sub_level_words(weight, level, d) {
        let poly = reg.shuffle_poly(&m);
        while powers.len() < poly.len() {
            let next = shuffle_lc(powers.last().unwrap(), &l);
            powers.push(next);
        }
        let mut terms = LinComb::new();
        for (j, pj) in poly.iter().enumerate() {
            // (-L)^j
            let sign = if j % 2 == 0 { q(1) } else { q(-1) };
            terms.add_assign(&shuffle_lc(pj, &powers[j]).scaled(&sign));
        }
        let mult = q((d as i64).pow(zeros(&m) as u32));
        let lifted = reg.shuffle_reg_lc(&lift_sum(&m, level, d));
        terms.add_scaled(&lifted, &-mult);
        if !terms.is_empty() {
            out.push(RelationRow::new(terms, Family::IV, format!("regdist d={d} {m}")));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Weight one

/// `c(e_a) - c(e_{N-a})`, which equals `iπ(N-2a)/N`.
fn parity_difference(level: Level, a: u32) -> LinComb<Word> {
    let mut lc = LinComb::unit(Word(vec![Letter::Root(a)]));
    lc.add_term(Word(vec![Letter::Root(level.get() - a)]), q(-1));
    lc
}

/// Generators of the weight-one relations: distribution for every divisor and
/// parity of the imaginary parts.
pub fn weight_one_relations(level: Level) -> Vec<RelationRow> {
    let mut out = Vec::new();
    for d in level.divisors().into_iter().filter(|d| *d > 1) {
        out.extend(rows_distribution(1, level, d).expect("divisor"));
    }
    let n = level.get();
    if n >= 3 {
        let d1 = parity_difference(level, 1);
        for b in 2..n {
            if 2 * b >= n {
                break;
            }
            let mut terms = d1.clone();
            terms.scale(&q((n - 2 * b) as i64));
            terms.add_scaled(&parity_difference(level, b), &q(-((n - 2) as i64)));
            out.push(RelationRow::new(terms, Family::W1, format!("parity 1,{b}")));
        }
    }
    for r in out.iter_mut() {
        r.family = Family::W1;
    }
    out.retain(|r| !r.terms.is_empty());
    out
}

/// Weight-one relations shuffled with every convergent word of weight `weight - 1`.
pub fn rows_weight_one(weight: usize, level: Level) -> Vec<RelationRow> {
    assert!(weight >= 1);
    let base = weight_one_relations(level);
    if weight == 1 {
        return base;
    }
    let mut out = Vec::new();
    for r in &base {
        for v in enumerate_words(weight - 1, level, true) {
            let terms = shuffle_lc(&r.terms, &LinComb::unit(v.clone()));
            out.push(RelationRow::new(terms, Family::W1, format!("({}) sh {v}", r.provenance)));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Regularized double shuffle

/// Stuffle-regularized values expressed over convergent words.
///
/// With `c(e1) = -T`, the shuffle-regularized series value of a composition is a
/// polynomial in `T`. The stuffle-regularized value at `T = 0` is obtained by
/// sending `T^j` to `j! [u^j] A(u)^{-1}` with
/// `A(u) = exp(Σ_{n≥2} (-1)^n ζ(n) u^n / n)` and `ζ(n) = -c(e0^{n-1} e1)`.
pub struct StuffleValues {
    reg: Regularizer,
    /// `j! [u^j] A(u)^{-1}` for each j.
    ainv: Vec<LinComb<Word>>,
    cache: HashMap<Composition, LinComb<Word>>,
}

fn zeta_word(n: usize) -> Word {
    let mut v = vec![E0; n - 1];
    v.push(E1);
    Word(v)
}

impl StuffleValues {
    pub fn new(max_weight: usize) -> Self {
        // S(u) = -Σ (-1)^n ζ(n)/n u^n = Σ (-1)^n c(e0^{n-1}e1)/n u^n
        let mut s: Vec<LinComb<Word>> = vec![LinComb::new(); max_weight + 1];
        for (n, sn) in s.iter_mut().enumerate().skip(2) {
            let sign = if n % 2 == 0 { 1 } else { -1 };
            *sn = LinComb::term(zeta_word(n), Q::new(sign.into(), (n as i64).into()));
        }
        // exp(S) truncated at max_weight, graded by u-degree
        let mut exp: Vec<LinComb<Word>> = vec![LinComb::new(); max_weight + 1];
        exp[0] = LinComb::unit(Word::empty());
        let mut power = exp.clone();
        let mut fact = Q::one();
        for k in 1..=max_weight / 2 {
            let mut next: Vec<LinComb<Word>> = vec![LinComb::new(); max_weight + 1];
            for (i, pi) in power.iter().enumerate() {
                for (j, sj) in s.iter().enumerate() {
                    if i + j <= max_weight && !pi.is_empty() && !sj.is_empty() {
                        next[i + j].add_assign(&shuffle_lc(pi, sj));
                    }
                }
            }
            power = next;
            fact *= q(k as i64);
            for (e, p) in exp.iter_mut().zip(power.iter()) {
                e.add_scaled(p, &(Q::one() / &fact));
            }
        }
        let mut f = Q::one();
        let ainv = exp
            .into_iter()
            .enumerate()
            .map(|(j, lc)| {
                if j > 0 {
                    f *= q(j as i64);
                }
                lc.scaled(&f)
            })
            .collect();
        StuffleValues { reg: Regularizer::new(), ainv, cache: HashMap::new() }
    }

    pub fn regularizer(&mut self) -> &mut Regularizer {
        &mut self.reg
    }

    /// `(-1)^depth Li^*(c)` at `T = 0`, i.e. the value in word normalization.
    pub fn value(&mut self, c: &Composition) -> LinComb<Word> {
        if let Some(v) = self.cache.get(c) {
            return v.clone();
        }
        let (_, w) = composition_to_word(c);
        let poly = self.reg.shuffle_poly(&w);
        let mut out = LinComb::new();
        for (j, pj) in poly.iter().enumerate() {
            if pj.is_empty() {
                continue;
            }
            out.add_assign(&shuffle_lc(pj, &self.ainv[j]));
        }
        self.cache.insert(c.clone(), out.clone());
        out
    }
}

/// For every unordered pair of compositions of total weight `weight`, the relation
/// `Li*(a) Li*(b) = Σ Li*(a * b)` written over convergent words.
pub fn rows_double_shuffle_with(sv: &mut StuffleValues, weight: usize, level: Level) -> Vec<RelationRow> {
    let mut out = Vec::new();
    for wa in 1..=weight / 2 {
        let wb = weight - wa;
        let ca = enumerate_compositions(wa as u32, level);
        let cb = enumerate_compositions(wb as u32, level);
        for (i, a) in ca.iter().enumerate() {
            let start = if wa == wb { i } else { 0 };
            for b in &cb[start..] {
                let (sa, _) = composition_to_word(a);
                let (sb, _) = composition_to_word(b);
                let va = sv.value(a).scaled(&q(sa as i64));
                let vb = sv.value(b).scaled(&q(sb as i64));
                let mut terms = shuffle_lc(&va, &vb);
                for (c, m) in stuffle(a, b).iter() {
                    let (sc, _) = composition_to_word(c);
                    let vc = sv.value(c);
                    terms.add_scaled(&vc, &-(m * q(sc as i64)));
                }
                out.push(RelationRow::new(terms, Family::DS, format!("{a} * {b}")));
            }
        }
    }
    out
}

pub fn rows_double_shuffle(weight: usize, level: Level) -> Vec<RelationRow> {
    rows_double_shuffle_with(&mut StuffleValues::new(weight), weight, level)
}

// ---------------------------------------------------------------------------
// Assembly

/// Coproduct matrix over the full `(N+1)^w` word basis. Distribution rows use
/// the prime divisors of `N`.
pub fn assemble_standard_matrix(weight: usize, level: Level, families: &[Family]) -> Result<RelationMatrix> {
    let mut m = RelationMatrix::new(weight, level, enumerate_words(weight, level, false));
    let divisors: Vec<u32> = level.divisors().into_iter().filter(|&d| is_prime(d)).collect();
    let mut fams = families.to_vec();
    fams.sort();
    fams.dedup();
    for f in fams {
        match f {
            Family::I => m.push(rows_shuffle_coproduct(weight, level)),
            Family::II => m.push(rows_stuffle_coproduct(weight, level)),
            Family::III => {
                for &d in &divisors {
                    m.push(rows_distribution(weight, level, d)?);
                }
            }
            Family::IV => {
                for &d in &divisors {
                    m.push(rows_reg_distribution(weight, level, d)?);
                }
            }
            Family::W1 => m.push(rows_weight_one(weight, level)),
            Family::DS => m.push(rows_double_shuffle(weight, level)),
            Family::OCTA => m.push(crate::octahedral::extract_octahedral_rows(weight)?),
            Family::DIH => m.push(rows_dihedral(weight, level)?),
        }
    }
    Ok(m)
}

/// Like [`assemble_standard_matrix`] but families I and II use every weight split
/// `k + (w - k)`, `1 <= k <= w/2`.
pub fn assemble_all_splits_matrix(weight: usize, level: Level, families: &[Family]) -> Result<RelationMatrix> {
    let rest: Vec<Family> = families.iter().copied().filter(|f| !matches!(f, Family::I | Family::II)).collect();
    let mut m = assemble_standard_matrix(weight, level, &rest)?;
    for k in 1..=weight / 2 {
        if families.contains(&Family::I) {
            m.push(rows_shuffle_split(weight, level, k));
        }
        if families.contains(&Family::II) {
            m.push(rows_stuffle_split(weight, level, k));
        }
    }
    Ok(m)
}

/// The value-level standard system over convergent words of the given weight.
pub fn standard_system(weight: usize, level: Level, extra_rows: &[RelationRow]) -> Result<RelationMatrix> {
    let mut m = RelationMatrix::new(weight, level, enumerate_words(weight, level, true));
    let mut sv = StuffleValues::new(weight);
    if weight >= 2 {
        m.push(rows_double_shuffle_with(&mut sv, weight, level));
    }
    for d in level.divisors().into_iter().filter(|d| *d > 1) {
        m.push(rows_distribution(weight, level, d)?);
        m.push(value_rows_reg_distribution(sv.regularizer(), weight, level, d)?);
    }
    m.push(rows_weight_one(weight, level));
    m.push(extra_rows.iter().cloned());
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundResult {
    pub weight: usize,
    pub level: u32,
    pub symbols: usize,
    pub rows: usize,
    pub rank: RankReport,
    pub bound: usize,
}

/// `#convergent words - rank` of the standard system: an upper bound for `d(w, N)`.
pub fn standard_bound(weight: usize, level: Level, extra_rows: &[RelationRow], mode: RankMode) -> Result<BoundResult> {
    let m = standard_system(weight, level, extra_rows)?;
    let rank = m.rank(mode)?;
    Ok(BoundResult {
        weight,
        level: level.get(),
        symbols: m.basis.len(),
        rows: m.rows.len(),
        bound: m.basis.len() - rank.rank,
        rank,
    })
}

/// The nine weight-3 level-4 symbols used as a basis.
pub fn fact_basis() -> Vec<Composition> {
    let l = Level::new(4).unwrap();
    let c = |p: &[(u32, u32)]| Composition::new(l, p).unwrap();
    vec![
        c(&[(1, 2), (2, 3)]),
        c(&[(1, 1), (1, 0), (1, 0)]),
        c(&[(1, 2), (1, 2), (1, 1)]),
        c(&[(1, 1), (1, 1), (1, 1)]),
        c(&[(1, 3), (2, 1)]),
        c(&[(1, 3), (1, 2), (1, 0)]),
        c(&[(1, 3), (1, 0), (1, 0)]),
        c(&[(1, 1), (1, 1), (1, 2)]),
        c(&[(2, 3), (1, 0)]),
    ]
}

/// Expresses every convergent weight-3 level-4 word through the words of the nine
/// basis symbols.
pub fn fact_reduction(mode_check: RankMode) -> Result<BTreeMap<Word, LinComb<Word>>> {
    let level = Level::new(4)?;
    let m = standard_system(3, level, &[])?;
    let sparse = m.to_sparse()?;
    let idx = m.column_index();
    let free: Vec<usize> = fact_basis()
        .iter()
        .map(|c| {
            let (_, w) = composition_to_word(c);
            idx[&w]
        })
        .collect();
    let r = linalg::rank(&sparse, mode_check)?;
    if m.basis.len() - r.rank != free.len() {
        return Err(MpvError::CheckFailed(format!(
            "standard system leaves {} free symbols, expected {}",
            m.basis.len() - r.rank,
            free.len()
        )));
    }
    let sol = linalg::solve_in_terms_of(&sparse, &free)?;
    Ok(sol
        .into_iter()
        .map(|(col, lc)| (m.basis[col].clone(), lc.map_linear(|j| LinComb::unit(m.basis[*j].clone()))))
        .collect())
}

// ---------------------------------------------------------------------------
// Dihedral symmetry

/// Dihedral symmetry of `{0, ∞} ∪ μ_N` at the level of letters.
///
/// Only the reflection `z ↦ z̄` fixes the straight path from 0 to 1, so it is the
/// only element acting on values by a letter map: `c(w̄) = conj c(w)`, and a rational
/// relation stays a relation after `e_{μ^a} ↦ e_{μ^{-a}}`. Rotations by `η ≠ 1` and
/// the inversion move the base path and contribute no rows here.
pub fn rows_dihedral(weight: usize, level: Level) -> Result<Vec<RelationRow>> {
    let std = standard_system(weight, level, &[])?;
    Ok(std
        .rows
        .iter()
        .map(|r| RelationRow::new(reflect(&r.terms, level), Family::DIH, format!("conj {}", r.provenance)))
        .filter(|r| !r.terms.is_empty())
        .collect())
}

/// Rotation `e_ζ ↦ e_{ηζ}` with `η = μ^k`. Only `k ≡ 0` fixes the base path, where
/// the rows are trivial; other rotations yield nothing.
pub fn rows_rotation(weight: usize, level: Level, k: u32) -> Vec<RelationRow> {
    let _ = (weight, level, k);
    Vec::new()
}

fn reflect(lc: &LinComb<Word>, level: Level) -> LinComb<Word> {
    let n = level.get();
    permute_letters(lc, |l| match l {
        Letter::Zero => Letter::Zero,
        Letter::Root(a) => Letter::Root((n - a) % n),
    })
}

/// Applies a letter permutation to every word of a combination.
pub fn permute_letters(lc: &LinComb<Word>, f: impl Fn(Letter) -> Letter) -> LinComb<Word> {
    lc.map_linear(|w| LinComb::unit(Word(w.0.iter().map(|l| f(*l)).collect())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::word;

    fn l4() -> Level {
        Level::new(4).unwrap()
    }

    #[test]
    fn family_counts() {
        assert_eq!(rows_shuffle_coproduct(3, l4()).len(), 125);
        assert_eq!(rows_stuffle_coproduct(3, l4()).len(), 80);
        assert_eq!(rows_stuffle_coproduct(2, l4()).len(), 16);
        assert_eq!(rows_distribution(3, l4(), 2).unwrap().len(), 12);
        assert_eq!(rows_reg_distribution(3, l4(), 2).unwrap().len(), 6);
        assert_eq!(rows_shuffle_coproduct(2, Level::new(1).unwrap()).len(), 4);
        assert!(rows_distribution(3, l4(), 3).is_err());
    }

    #[test]
    fn shuffle_row_multiplicity() {
        let rows = rows_shuffle_coproduct(3, l4());
        let r = rows.iter().find(|r| r.provenance == "0 sh 0.z0").unwrap();
        assert_eq!(r.terms.coeff(&word("0.0.z0")), q(2));
    }

    #[test]
    fn distribution_example() {
        let rows = rows_distribution(2, l4(), 2).unwrap();
        let r = rows.iter().find(|r| r.terms.coeff(&word("0.z2")) == q(1)).unwrap();
        assert_eq!(r.terms.coeff(&word("0.z1")), q(-2));
        assert_eq!(r.terms.coeff(&word("0.z3")), q(-2));
        assert_eq!(r.terms.len(), 3);
    }

    #[test]
    fn weight_one_level_four() {
        let rows = rows_weight_one(1, l4());
        assert_eq!(rows.len(), 1);
        let t = &rows[0].terms;
        assert_eq!(t.coeff(&word("z2")), -t.coeff(&word("z1")));
        assert_eq!(t.coeff(&word("z3")), t.coeff(&word("z1")));
    }

    #[test]
    fn lie_matrix_shape() {
        let m = assemble_standard_matrix(3, l4(), &[Family::I, Family::II, Family::III, Family::IV]).unwrap();
        assert_eq!(m.rows.len(), 223);
        assert_eq!(m.rank(RankMode::Exact).unwrap().rank, 122);
        assert_eq!(m.basis.len(), 125);
    }

    #[test]
    fn dihedral_adds_no_rank() {
        let mode = RankMode::Modular { seed: 7 };
        for w in [2, 3] {
            let base = standard_system(w, l4(), &[]).unwrap();
            let r0 = base.rank(mode).unwrap().rank;
            let dih = rows_dihedral(w, l4()).unwrap();
            assert!(!dih.is_empty());
            let r1 = standard_system(w, l4(), &dih).unwrap().rank(mode).unwrap().rank;
            assert_eq!(r0, r1);
        }
        assert!(rows_rotation(3, l4(), 0).is_empty());
    }

    #[test]
    fn json_roundtrip() {
        let r = &rows_distribution(2, l4(), 2).unwrap()[0];
        let j = serde_json::to_string(&relation_to_json(r, 2, l4())).unwrap();
        let (back, w, lv) = relation_from_json(&j).unwrap();
        assert_eq!(back.terms, r.terms);
        assert_eq!(back.family, Family::III);
        assert_eq!((w, lv), (2, l4()));
        assert!(relation_from_json("{}").is_err());
    }
}
