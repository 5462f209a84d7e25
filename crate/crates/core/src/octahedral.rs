//! Truncated group-like series at level 4 and the octahedral identity
//!
//! `exp(-2L e0) ρ²(dch) exp(-2L e_i) ρ(dch) exp(-2L e1) dch = 1`, `L = Li_1(i)`.
//!
//! Coefficients live in the shuffle algebra on words, reduced to convergent words
//! by the regularization (a shuffle homomorphism sending `e0` and `e1` to 0), so
//! every product of coefficients is a linear combination of symbols `c(w)`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{MpvError, Result};
use crate::linalg::RankMode;
use crate::lincomb::{q, LinComb, Q};
use crate::relations::{fact_basis, fact_reduction, Family, RelationRow};
use crate::words::{
    composition_to_word, enumerate_words, shuffle_lc, Composition, Letter, Level, Regularizer, Word, E0,
};

pub const E_I: Letter = Letter::Root(1);
pub const E_M1: Letter = Letter::Root(2);
pub const E_MI: Letter = Letter::Root(3);

fn level4() -> Level {
    Level::new(4).expect("level 4")
}

/// `e_∞ = -(e0 + e1 + e_i + e_{-1} + e_{-i})`.
pub fn e_infinity() -> LinComb<Letter> {
    Letter::all(level4()).into_iter().map(|l| (l, q(-1))).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LetterSubstitution {
    images: BTreeMap<Letter, LinComb<Letter>>,
}

impl LetterSubstitution {
    pub fn from_images(images: BTreeMap<Letter, LinComb<Letter>>) -> Self {
        LetterSubstitution { images }
    }

    /// `e0 → e1 → e_i → e0`, `e_∞ → e_{-1} → e_{-i} → e_∞`.
    pub fn rho() -> Self {
        let mut m = BTreeMap::new();
        m.insert(E0, LinComb::unit(Letter::Root(0)));
        m.insert(Letter::Root(0), LinComb::unit(E_I));
        m.insert(E_I, LinComb::unit(E0));
        m.insert(E_M1, LinComb::unit(E_MI));
        m.insert(E_MI, e_infinity());
        LetterSubstitution { images: m }
    }

    /// `e0 ↔ e1`, `e_i ↔ e_{-i}`, `e_{-1} ↔ e_∞`.
    pub fn sigma() -> Self {
        let mut m = BTreeMap::new();
        m.insert(E0, LinComb::unit(Letter::Root(0)));
        m.insert(Letter::Root(0), LinComb::unit(E0));
        m.insert(E_I, LinComb::unit(E_MI));
        m.insert(E_MI, LinComb::unit(E_I));
        m.insert(E_M1, e_infinity());
        LetterSubstitution { images: m }
    }

    pub fn image(&self, l: Letter) -> LinComb<Letter> {
        self.images.get(&l).cloned().unwrap_or_else(|| LinComb::unit(l))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LetterSubstitution) -> LetterSubstitution {
        let mut m = BTreeMap::new();
        for l in Letter::all(level4()) {
            let img = other.image(l).map_linear(|x| self.image(*x));
            m.insert(l, img);
        }
        LetterSubstitution { images: m }
    }

    pub fn apply_word(&self, w: &Word) -> LinComb<Word> {
        let mut acc: LinComb<Word> = LinComb::unit(Word::empty());
        for l in &w.0 {
            let img = self.image(*l);
            let mut next = LinComb::new();
            for (p, cp) in acc.iter() {
                for (x, cx) in img.iter() {
                    let mut v = p.0.clone();
                    v.push(*x);
                    next.add_term(Word(v), cp * cx);
                }
            }
            acc = next;
        }
        acc
    }

    pub fn apply(&self, lc: &LinComb<Word>) -> LinComb<Word> {
        lc.map_linear(|w| self.apply_word(w))
    }
}

/// Noncommutative series truncated above `max_weight`, with coefficients in the
/// (regularized) shuffle algebra of symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    pub max_weight: usize,
    coeffs: BTreeMap<Word, LinComb<Word>>,
}

fn scalar_one() -> LinComb<Word> {
    LinComb::unit(Word::empty())
}

impl TruncatedSeries {
    pub fn one(max_weight: usize) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(Word::empty(), scalar_one());
        TruncatedSeries { max_weight, coeffs }
    }

    pub fn coefficient(&self, w: &Word) -> LinComb<Word> {
        self.coeffs.get(w).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, w: Word, c: LinComb<Word>) {
        if w.weight() > self.max_weight {
            return;
        }
        if c.is_empty() {
            self.coeffs.remove(&w);
        } else {
            self.coeffs.insert(w, c);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &LinComb<Word>)> {
        self.coeffs.iter()
    }

    pub fn mul(&self, other: &TruncatedSeries) -> TruncatedSeries {
        let max = self.max_weight.min(other.max_weight);
        let mut out: BTreeMap<Word, LinComb<Word>> = BTreeMap::new();
        for (u, cu) in &self.coeffs {
            for (v, cv) in &other.coeffs {
                if u.weight() + v.weight() > max {
                    continue;
                }
                let c = shuffle_lc(cu, cv);
                out.entry(u.concat(v)).or_default().add_assign(&c);
            }
        }
        out.retain(|_, c| !c.is_empty());
        TruncatedSeries { max_weight: max, coeffs: out }
    }

    /// Applies a regularization to every coefficient.
    pub fn regularized(&self, reg: &mut Regularizer) -> TruncatedSeries {
        let mut out = TruncatedSeries { max_weight: self.max_weight, coeffs: BTreeMap::new() };
        for (w, c) in &self.coeffs {
            out.set(w.clone(), reg.shuffle_reg_lc(c));
        }
        out
    }

    /// Checks `coef(u) coef(v) = Σ_{w ∈ u ш v} coef(w)` for all `|u| + |v| <= max_weight`
    /// over the given words.
    pub fn is_group_like(&self, words: &[Word], reg: &mut Regularizer) -> bool {
        for u in words {
            for v in words {
                if u.weight() + v.weight() > self.max_weight {
                    continue;
                }
                let lhs = reg.shuffle_reg_lc(&shuffle_lc(&self.coefficient(u), &self.coefficient(v)));
                let mut rhs = LinComb::new();
                for (w, m) in crate::words::shuffle(u, v).iter() {
                    rhs.add_scaled(&self.coefficient(w), m);
                }
                if lhs != reg.shuffle_reg_lc(&rhs) {
                    return false;
                }
            }
        }
        true
    }
}

/// Series whose coefficient of `w` is the regularized symbol `c(w)`.
pub fn generic_dch(max_weight: usize, level: Level, reg: &mut Regularizer) -> TruncatedSeries {
    let mut s = TruncatedSeries::one(max_weight);
    for k in 1..=max_weight {
        for w in enumerate_words(k, level, false) {
            let c = reg.shuffle_reg(&w);
            s.set(w, c);
        }
    }
    s
}

pub fn apply_substitution(s: &TruncatedSeries, sub: &LetterSubstitution) -> TruncatedSeries {
    let mut out: BTreeMap<Word, LinComb<Word>> = BTreeMap::new();
    for (w, c) in s.iter() {
        for (img, m) in sub.apply_word(w).iter() {
            out.entry(img.clone()).or_default().add_scaled(c, m);
        }
    }
    out.retain(|_, c| !c.is_empty());
    TruncatedSeries { max_weight: s.max_weight, coeffs: out }
}

/// `Σ_k s^k x^k / k!`, powers taken in the shuffle algebra.
pub fn exp_letter(s: &LinComb<Word>, x: Letter, max_weight: usize) -> TruncatedSeries {
    let mut out = TruncatedSeries::one(max_weight);
    let mut power = scalar_one();
    let mut fact = Q::one();
    for k in 1..=max_weight {
        power = shuffle_lc(&power, s);
        fact *= q(k as i64);
        out.set(Word(vec![x; k]), power.clone().scaled(&(Q::one() / &fact)));
    }
    out
}

/// `-2 Li_1(i) = 2 c(e_{-i})`.
pub fn minus_two_l() -> LinComb<Word> {
    LinComb::term(Word(vec![E_MI]), q(2))
}

/// The six-factor left side of the octahedral identity.
pub fn octa_left_side(max_weight: usize, reg: &mut Regularizer) -> TruncatedSeries {
    let l = level4();
    let dch = generic_dch(max_weight, l, reg);
    let rho = LetterSubstitution::rho();
    let rho2 = rho.compose(&rho);
    let s = minus_two_l();
    let factors = [
        exp_letter(&s, E0, max_weight),
        apply_substitution(&dch, &rho2),
        exp_letter(&s, E_I, max_weight),
        apply_substitution(&dch, &rho),
        exp_letter(&s, Letter::Root(0), max_weight),
        dch,
    ];
    let mut acc = factors[5].clone();
    for f in factors[..5].iter().rev() {
        acc = f.mul(&acc);
    }
    acc.regularized(reg)
}

/// The weight-4 words `e_{-i}e0²e_{-i}`, `e_{-i}e0²e_{-1}`, `e_{-i}e0²e_i`,
/// `e_{-i}e0²e1` and `(e_{-i}e0)²`.
pub fn weight_four_words() -> Vec<Word> {
    parse_words(&["z3.0.0.z3", "z3.0.0.z2", "z3.0.0.z1", "z3.0.0.z0", "z3.0.z3.0"])
}

/// Five weight-4 words whose coefficients are independent modulo the standard
/// system (first hits in word order).
pub fn sufficient_weight_four_words() -> Vec<Word> {
    parse_words(&["0.0.z0.z2", "0.0.z1.z0", "0.z0.z0.z1", "0.z0.z0.z2", "0.z0.z0.z3"])
}

fn parse_words(ws: &[&str]) -> Vec<Word> {
    ws.iter().map(|s| s.parse().expect("word literal")).collect()
}

/// Which coefficients of the octahedral left side to extract.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize)]
pub enum Selection {
    /// All words at weight 3, [`weight_four_words`] at weight 4.
    #[default]
    Listed,
    /// [`sufficient_weight_four_words`] at weight 4.
    Sufficient,
    /// Every word of the weight.
    All,
}

impl std::str::FromStr for Selection {
    type Err = MpvError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "listed" => Ok(Selection::Listed),
            "sufficient" => Ok(Selection::Sufficient),
            "all" => Ok(Selection::All),
            _ => Err(MpvError::Parse(format!("unknown selection {s:?}"))),
        }
    }
}

/// Vanishing coefficients of the octahedral left side, as value rows over convergent
/// words.
pub fn extract_octahedral_rows(weight: usize) -> Result<Vec<RelationRow>> {
    extract_octahedral_rows_with(weight, Selection::Listed)
}

pub fn extract_octahedral_rows_with(weight: usize, sel: Selection) -> Result<Vec<RelationRow>> {
    let words = match (weight, sel) {
        (3 | 4, Selection::All) | (3, _) => enumerate_words(weight, level4(), false),
        (4, Selection::Listed) => weight_four_words(),
        (4, Selection::Sufficient) => sufficient_weight_four_words(),
        _ => return Err(MpvError::Invalid(format!("octahedral rows are provided at weights 3 and 4, not {weight}"))),
    };
    let mut reg = Regularizer::new();
    let side = octa_left_side(weight, &mut reg);
    Ok(words
        .into_iter()
        .filter_map(|w| {
            let c = side.coefficient(&w);
            (!c.is_empty()).then(|| RelationRow::new(c, Family::OCTA, format!("octa {w}")))
        })
        .collect())
}

/// The weight-3 octahedral relation in the nine-symbol basis, as a combination of
/// compositions normalized so that `Li_{1,2}(-1,-i)` has coefficient 5.
pub fn derive_conj() -> Result<LinComb<Composition>> {
    let red = fact_reduction(RankMode::Exact)?;
    let basis = fact_basis();
    let words: Vec<(Word, i32)> = basis
        .iter()
        .map(|c| {
            let (s, w) = composition_to_word(c);
            (w, s)
        })
        .collect();
    let mut reduced: Vec<LinComb<Word>> = Vec::new();
    for r in extract_octahedral_rows(3)? {
        let mut lc = LinComb::new();
        for (w, c) in r.terms.iter() {
            let img = red.get(w).ok_or_else(|| MpvError::Invalid(format!("no reduction for {w}")))?;
            lc.add_scaled(img, c);
        }
        if !lc.is_empty() {
            reduced.push(lc);
        }
    }
    // all nonzero reduced rows must be proportional
    let first = reduced
        .first()
        .cloned()
        .ok_or_else(|| MpvError::CheckFailed("octahedral rows reduce to zero".into()))?;
    for r in &reduced[1..] {
        let (w0, c0) = first.leading().expect("nonzero");
        let ratio = r.coeff(w0) / c0;
        if first.clone().scaled(&ratio) != *r {
            return Err(MpvError::CheckFailed("reduced octahedral rows span more than one relation".into()));
        }
    }
    let mut out = LinComb::new();
    for ((w, s), c) in words.iter().zip(basis.iter()) {
        // c(w) = s * Li(c)
        out.add_term(c.clone(), first.coeff(w) * q(*s as i64));
    }
    let lead = out.coeff(&basis[0]);
    if lead.is_zero() {
        return Err(MpvError::CheckFailed("relation does not involve the first basis symbol".into()));
    }
    Ok(out.scaled(&(q(5) / lead)))
}

/// Coefficients of [`derive_conj`] in the displayed form `5 A = Σ c_k B_k`: the
/// leading 5 followed by the right-hand coefficients.
pub fn conj_display_coefficients(rel: &LinComb<Composition>) -> Vec<Q> {
    let basis = fact_basis();
    let mut out = vec![rel.coeff(&basis[0])];
    out.extend(basis[1..].iter().map(|c| -rel.coeff(c)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::word;

    #[test]
    fn rho_cubed_is_identity() {
        let rho = LetterSubstitution::rho();
        let r3 = rho.compose(&rho).compose(&rho);
        for l in Letter::all(level4()) {
            assert_eq!(r3.image(l), LinComb::unit(l));
        }
        let s = LetterSubstitution::sigma();
        let s2 = s.compose(&s);
        for l in Letter::all(level4()) {
            assert_eq!(s2.image(l), LinComb::unit(l));
        }
    }

    #[test]
    fn rho_of_infinity() {
        let rho = LetterSubstitution::rho();
        let img = e_infinity().map_linear(|x| rho.image(*x));
        assert_eq!(img, LinComb::unit(E_M1));
    }

    #[test]
    fn dch_coefficients() {
        let mut reg = Regularizer::new();
        let d = generic_dch(2, level4(), &mut reg);
        assert_eq!(d.coefficient(&Word::empty()), scalar_one());
        assert!(d.coefficient(&word("0")).is_empty());
        assert!(d.coefficient(&word("z0")).is_empty());
        assert_eq!(d.coefficient(&word("0.z3")), LinComb::unit(word("0.z3")));
        let words: Vec<Word> = (1..=2).flat_map(|k| enumerate_words(k, level4(), false)).collect();
        assert!(d.is_group_like(&words, &mut reg));
    }

    #[test]
    fn exp_inverse() {
        let s = minus_two_l();
        let a = exp_letter(&s, E0, 3);
        let b = exp_letter(&s.clone().negated(), E0, 3);
        assert_eq!(a.mul(&b), TruncatedSeries::one(3));
        assert_eq!(a.coefficient(&word("0.0")), shuffle_lc(&s, &s).scaled(&crate::lincomb::q_frac(1, 2)));
    }

    #[test]
    fn low_weight_side_is_trivial() {
        let mut reg = Regularizer::new();
        let side = octa_left_side(2, &mut reg);
        assert_eq!(side.coefficient(&Word::empty()), scalar_one());
    }
}
