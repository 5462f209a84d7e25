#![allow(dead_code)]

use mpv_core::lie::{depth2_bracket, ihara_bracket, is_lyndon, project_depth2, LieElement};
use mpv_core::linalg::{nullspace, rank, RankMode, SparseMatrix};
use mpv_core::lincomb::{q, LinComb, Q};
use mpv_core::octahedral::LetterSubstitution;
use mpv_core::words::{shuffle, shuffle_lc, stuffle, stuffle_lc, Composition, Letter, Level, Regularizer, Word};
use num_traits::Zero;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub const CASES: u32 = 256;

pub fn l4() -> Level {
    Level::new(4).unwrap()
}

pub fn letter() -> impl Strategy<Value = Letter> {
    prop_oneof![Just(Letter::Zero), (0u32..4).prop_map(Letter::Root)]
}

pub fn word(max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(letter(), 0..=max).prop_map(Word)
}

pub fn poly(max_len: usize) -> impl Strategy<Value = LinComb<Word>> {
    prop::collection::vec((word(max_len), -3i64..=3), 0..4).prop_map(|ts| ts.into_iter().map(|(w, c)| (w, q(c))).collect())
}

pub fn composition(max_depth: usize) -> impl Strategy<Value = Composition> {
    prop::collection::vec((1u32..=3, 0u32..4), 1..=max_depth).prop_map(|p| Composition::new(l4(), &p).unwrap())
}

/// A homogeneous Lie element of weight `1..=3` with one or two Lyndon terms.
pub fn lie_element() -> impl Strategy<Value = LieElement> {
    (1usize..=3)
        .prop_flat_map(|k| prop::collection::vec((prop::collection::vec(letter(), k), -2i64..=2), 1..=2))
        .prop_map(|terms| {
            let mut out = LieElement::zero();
            for (ls, c) in terms {
                let w = Word(ls);
                if is_lyndon(&w) {
                    out.add_scaled(&LieElement::from_lyndon(&w), &q(c));
                }
            }
            out
        })
}

pub fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=7, 1usize..=7).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(prop_oneof![3 => Just(0i64), 2 => -3i64..=3], c), r)
    })
}

fn check(ok: bool, msg: impl Into<String>) -> Result<(), TestCaseError> {
    if ok {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg.into()))
    }
}

pub fn prop_shuffle_axioms((u, v, w): (Word, Word, Word)) -> Result<(), TestCaseError> {
    check(shuffle(&u, &v) == shuffle(&v, &u), "shuffle not commutative")?;
    let left = shuffle_lc(&shuffle(&u, &v), &LinComb::unit(w.clone()));
    let right = shuffle_lc(&LinComb::unit(u.clone()), &shuffle(&v, &w));
    check(left == right, "shuffle not associative")?;
    check(shuffle(&u, &Word::empty()) == LinComb::unit(u.clone()), "empty word is not a unit")?;
    let total: Q = shuffle(&u, &v).iter().map(|(_, c)| c.clone()).fold(Q::zero(), |a, b| a + b);
    let binom = (0..u.weight()).fold(1u64, |acc, i| acc * (u.weight() + v.weight() - i) as u64 / (i as u64 + 1));
    check(total == q(binom as i64), "shuffle multiplicities do not sum to the binomial")
}

pub fn prop_stuffle_axioms((a, b, c): (Composition, Composition, Composition)) -> Result<(), TestCaseError> {
    check(stuffle(&a, &b) == stuffle(&b, &a), "stuffle not commutative")?;
    let left = stuffle_lc(&stuffle(&a, &b), &LinComb::unit(c.clone()));
    let right = stuffle_lc(&LinComb::unit(a.clone()), &stuffle(&b, &c));
    check(left == right, "stuffle not associative")?;
    let w = a.weight() + b.weight();
    check(stuffle(&a, &b).keys().all(|x| x.weight() == w), "stuffle changed weight")
}

pub fn prop_regularization_idempotent((w, c): (Word, Composition)) -> Result<(), TestCaseError> {
    let mut reg = Regularizer::new();
    let r = reg.shuffle_reg(&w);
    check(r.keys().all(|x| x.is_convergent()), "shuffle regularization left a divergent word")?;
    check(reg.shuffle_reg_lc(&r) == r, "shuffle regularization not idempotent")?;
    if w.is_convergent() {
        check(r == LinComb::unit(w.clone()), "convergent word moved")?;
    }
    let s = reg.stuffle_reg(&c);
    check(s.keys().all(|x| x.is_convergent()), "stuffle regularization left a divergent composition")?;
    let mut again = LinComb::new();
    for (x, k) in s.iter() {
        again.add_scaled(&reg.stuffle_reg(x), k);
    }
    check(again == s, "stuffle regularization not idempotent")
}

pub fn prop_ihara_antisymmetry((u, v): (LieElement, LieElement)) -> Result<(), TestCaseError> {
    let a = ihara_bracket(&u, &v, 4);
    let b = ihara_bracket(&v, &u, 4);
    check(a.add(&b).is_zero(), "Ihara bracket not antisymmetric")?;
    check(ihara_bracket(&u, &u, 4).is_zero(), "{u,u} != 0")?;
    check(LieElement::from_poly(a.poly().clone()).is_ok(), "Ihara bracket left the Lie algebra")
}

pub fn prop_ihara_jacobi((a, b, c): (LieElement, LieElement, LieElement)) -> Result<(), TestCaseError> {
    let t1 = ihara_bracket(&a, &ihara_bracket(&b, &c, 4), 4);
    let t2 = ihara_bracket(&b, &ihara_bracket(&c, &a, 4), 4);
    let t3 = ihara_bracket(&c, &ihara_bracket(&a, &b, 4), 4);
    check(t1.add(&t2).add(&t3).is_zero(), "Jacobi identity fails")
}

pub fn prop_rho_cubed(p: LinComb<Word>) -> Result<(), TestCaseError> {
    let rho = LetterSubstitution::rho();
    check(rho.apply(&rho.apply(&rho.apply(&p))) == p, "rho^3 != id")
}

pub fn prop_sigma_squared(p: LinComb<Word>) -> Result<(), TestCaseError> {
    let s = LetterSubstitution::sigma();
    check(s.apply(&s.apply(&p)) == p, "sigma^2 != id")
}

pub fn prop_depth2_vs_ihara((n, a, b): (u32, u32, u32)) -> Result<(), TestCaseError> {
    let (a, b) = (a % n, b % n);
    let full = ihara_bracket(&LieElement::e(a as i64, n), &LieElement::e(b as i64, n), n);
    check(project_depth2(&full) == depth2_bracket(a as i64, b as i64, n).terms, format!("depth-2 mismatch at {a},{b} mod {n}"))
}

fn dense_to_q(m: &[Vec<i64>]) -> Vec<Vec<Q>> {
    m.iter().map(|r| r.iter().map(|x| q(*x)).collect()).collect()
}

pub fn prop_linalg((m, seed): (Vec<Vec<i64>>, u64)) -> Result<(), TestCaseError> {
    let s = SparseMatrix::from_dense(&m);
    let exact = rank(&s, RankMode::Exact).unwrap().rank;
    let modular = rank(&s, RankMode::Modular { seed }).unwrap().rank;
    check(modular <= exact, "modular rank exceeds exact rank")?;
    check(rank(&s.transpose(), RankMode::Exact).unwrap().rank == exact, "rank(M) != rank(M^T)")?;
    let ns = nullspace(&s);
    check(ns.len() + exact == s.ncols(), "rank-nullity fails")?;
    let dq = dense_to_q(&m);
    for v in &ns {
        for row in &dq {
            let dot = row.iter().zip(v).fold(Q::zero(), |acc, (a, b)| acc + a * b);
            check(dot.is_zero(), "nullspace vector not annihilated")?;
        }
    }
    Ok(())
}

pub struct PropOutcome {
    pub name: &'static str,
    pub result: Result<(), String>,
}

fn run<S: Strategy>(name: &'static str, s: S, f: impl Fn(S::Value) -> Result<(), TestCaseError>) -> PropOutcome {
    let mut runner = TestRunner::new(Config { cases: CASES, failure_persistence: None, ..Config::default() });
    PropOutcome { name, result: runner.run(&s, f).map_err(|e| e.to_string()) }
}

/// Every property suite, each over [`CASES`] random cases.
pub fn run_all() -> Vec<PropOutcome> {
    vec![
        run("shuffle axioms", (word(3), word(3), word(2)), prop_shuffle_axioms),
        run("stuffle axioms", (composition(2), composition(2), composition(2)), prop_stuffle_axioms),
        run("regularization idempotence", (word(4), composition(3)), prop_regularization_idempotent),
        run("Ihara antisymmetry", (lie_element(), lie_element()), prop_ihara_antisymmetry),
        run("Ihara Jacobi", (lie_element(), lie_element(), lie_element()), prop_ihara_jacobi),
        run("rho^3 = id", poly(3), prop_rho_cubed),
        run("sigma^2 = id", poly(4), prop_sigma_squared),
        run("depth-2 vs Ihara", (2u32..=25, 0u32..25, 0u32..25), prop_depth2_vs_ihara),
        run("rank and nullspace", (small_matrix(), any::<u64>()), prop_linalg),
    ]
}
