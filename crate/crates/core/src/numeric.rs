//! Floating-point evaluation of multiple polylogarithm values.
//!
//! The default method splits the integration path `0 → 1` at a midpoint and
//! composes two power-series expansions (one about 0, one about 1), which
//! converge geometrically for every convergent word. The nested-sum series
//! is kept as an independent cross-check.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{MpvError, Result};
use crate::lincomb::LinComb;
use crate::words::{composition_to_word, Composition, Letter, Level, Regularizer, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Path,
    Series,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct NumericResult {
    pub value: Complex64,
    pub est_error: f64,
    pub method: Method,
}

pub fn root(level: Level, a: u32) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * a as f64 / level.get() as f64)
}

fn pole(level: Level, l: Letter) -> Complex64 {
    match l {
        Letter::Zero => Complex64::new(0.0, 0.0),
        Letter::Root(a) => root(level, a),
    }
}

/// Truncated power series `Σ_{k ≤ K} f_k t^k`.
#[derive(Clone)]
struct Series(Vec<Complex64>);

impl Series {
    fn one(order: usize) -> Self {
        let mut v = vec![Complex64::new(0.0, 0.0); order + 1];
        v[0] = Complex64::new(1.0, 0.0);
        Series(v)
    }

    /// `∫_0^t f(u) du / (u - p)`; for `p = 0` requires `f(0) = 0`.
    fn integrate(&self, p: Complex64) -> Series {
        let k_max = self.0.len() - 1;
        let zero = Complex64::new(0.0, 0.0);
        let mut out = vec![zero; k_max + 1];
        if p == zero {
            debug_assert!(self.0[0].norm() == 0.0);
            for k in 1..=k_max {
                out[k] = self.0[k] / k as f64;
            }
        } else {
            let inv = 1.0 / p;
            let mut g_prev = zero;
            for k in 0..k_max {
                let g = (g_prev - self.0[k]) * inv;
                out[k + 1] = g / (k + 1) as f64;
                g_prev = g;
            }
        }
        Series(out)
    }

    fn eval(&self, x: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }
}

/// Smallest nonzero pole modulus seen from the base point 1 (poles `1 - ζ`).
fn min_pole_near_one(level: Level) -> f64 {
    if level.get() == 1 {
        return 1.0;
    }
    (1.0 - root(level, 1)).norm().min(1.0)
}

fn path_order(level: Level, split: f64, target_err: f64) -> (usize, f64) {
    let ratio = (split / 1.0).max((1.0 - split) / min_pole_near_one(level));
    let digits = (target_err.max(1e-300)).ln() / ratio.ln();
    let k = (digits.ceil() as usize + 24).clamp(32, 4000);
    (k, ratio)
}

/// Path-composition evaluation of a convergent word, splitting at `split ∈ (0,1)`.
pub fn eval_word_split(w: &Word, level: Level, split: f64, target_err: f64) -> Result<NumericResult> {
    if !w.is_convergent() {
        return Err(MpvError::Divergent(w.to_string()));
    }
    w.check_level(level)?;
    let n = w.weight();
    if n == 0 {
        return Ok(NumericResult { value: Complex64::new(1.0, 0.0), est_error: 0.0, method: Method::Path });
    }
    let (order, ratio) = path_order(level, split, target_err);
    let letters = w.letters();

    // lower[i] = I_{0→split}(w[i..])
    let mut lower = vec![Complex64::new(0.0, 0.0); n + 1];
    lower[n] = Complex64::new(1.0, 0.0);
    let mut s = Series::one(order);
    for i in (0..n).rev() {
        s = s.integrate(pole(level, letters[i]));
        lower[i] = s.eval(split);
    }
    // upper[i] = I_{split→1}(w[..i]) = (-1)^i J(reversed prefix) with poles 1 - a in s = 1 - t.
    let mut upper = vec![Complex64::new(0.0, 0.0); n + 1];
    upper[0] = Complex64::new(1.0, 0.0);
    let mut s = Series::one(order);
    for i in 1..=n {
        let p = Complex64::new(1.0, 0.0) - pole(level, letters[i - 1]);
        let p = if p.norm() < 1e-14 { Complex64::new(0.0, 0.0) } else { p };
        s = s.integrate(p);
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        upper[i] = s.eval(1.0 - split) * sign;
    }
    let value: Complex64 = (0..=n).map(|i| upper[i] * lower[i]).sum();
    let est_error = ratio.powi(order as i32) * ((order + 1) as f64).powi(n as i32) * 4.0;
    Ok(NumericResult { value, est_error: est_error.max(f64::EPSILON * value.norm()), method: Method::Path })
}

/// Value of the dch coefficient `c(w)` for a convergent word.
pub fn eval_word(w: &Word, level: Level, target_err: f64) -> Result<NumericResult> {
    eval_word_split(w, level, 0.5, target_err)
}

/// Nested-sum evaluation of `Li_s(μ^a)` from the partial sums up to `terms`.
///
/// Partial sums are averaged over full periods of the roots (removing the
/// oscillating part of the tail) and the remaining tail is extrapolated with a
/// generalized Richardson fit in `log^j K / K^i`.
pub fn eval_composition_series(c: &Composition, terms: usize) -> Result<NumericResult> {
    if !c.is_convergent() {
        return Err(MpvError::Divergent(c.to_string()));
    }
    if c.parts.is_empty() {
        return Ok(NumericResult { value: Complex64::new(1.0, 0.0), est_error: 0.0, method: Method::Series });
    }
    let period = c.level.get() as usize;
    let rounds = 4usize;
    let extra = rounds * period;
    let levels = 7usize;
    let k0 = (terms >> (levels - 1)).max(8 * period);
    let k0 = k0 - k0 % period;
    let kmax = k0 << (levels - 1);
    let partial = nested_partial_sums(c, kmax + extra);
    let averaged = |k: usize| -> Complex64 {
        let mut cur: Vec<Complex64> = partial[k..=k + extra].to_vec();
        for _ in 0..rounds {
            cur = cur.windows(period).map(|w| w.iter().sum::<Complex64>() / period as f64).collect();
        }
        cur[0]
    };
    let shift = (rounds * (period - 1)) as f64 / 2.0;
    let samples: Vec<(f64, Complex64)> =
        (0..levels).map(|j| ((k0 << j) as f64 + shift, averaged(k0 << j))).collect();
    let fit = |n: usize| -> Complex64 {
        // basis: 1, then (log K)^j / K^i for i = 1.., j = 0..2
        let pts = &samples[levels - n..];
        let basis = |k: f64, idx: usize| -> f64 {
            if idx == 0 {
                return 1.0;
            }
            let i = (idx - 1) / 3 + 1;
            let j = (idx - 1) % 3;
            k.ln().powi(j as i32) / k.powi(i as i32)
        };
        let mut a: Vec<Vec<Complex64>> = pts
            .iter()
            .map(|(k, v)| {
                let mut row: Vec<Complex64> = (0..n).map(|idx| Complex64::new(basis(*k, idx), 0.0)).collect();
                row.push(*v);
                row
            })
            .collect();
        solve_dense(&mut a, n)[0]
    };
    let value = fit(levels);
    let coarse = fit(levels - 1);
    let est_error = (value - coarse).norm().max(1e-15);
    Ok(NumericResult { value, est_error, method: Method::Series })
}

/// Gaussian elimination with partial pivoting on an augmented `n × (n+1)` system.
fn solve_dense(a: &mut [Vec<Complex64>], n: usize) -> Vec<Complex64> {
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].norm().partial_cmp(&a[j][col].norm()).unwrap())
            .unwrap();
        a.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=n {
                    let t = a[col][c];
                    a[r][c] -= f * t;
                }
            }
        }
    }
    (0..n).map(|i| a[i][n] / a[i][i]).collect()
}

/// `partial[k] = Σ_{k ≥ k1 > ... > kn > 0}` for `k = 0..=kmax`.
fn nested_partial_sums(c: &Composition, kmax: usize) -> Vec<Complex64> {
    let level = c.level;
    let zero = Complex64::new(0.0, 0.0);
    // innermost first
    let mut prev: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); kmax + 1];
    for (depth, part) in c.parts.iter().rev().enumerate() {
        let z = root(level, part.a);
        let mut cur = vec![zero; kmax + 1];
        let mut zk = Complex64::new(1.0, 0.0);
        let mut acc = zero;
        for k in 1..=kmax {
            zk *= z;
            let inner = if depth == 0 { Complex64::new(1.0, 0.0) } else { prev[k - 1] };
            acc += zk * inner / (k as f64).powi(part.s as i32);
            cur[k] = acc;
        }
        prev = cur;
    }
    prev
}

/// `Li_s(μ^a)` by the path method, through the signed word form.
pub fn eval_composition(c: &Composition, target_err: f64) -> Result<NumericResult> {
    if !c.is_convergent() {
        return Err(MpvError::Divergent(c.to_string()));
    }
    let (sign, w) = composition_to_word(c);
    let mut r = eval_word(&w, c.level, target_err)?;
    r.value *= sign as f64;
    Ok(r)
}

/// Session evaluator with a memo cache over words.
pub struct Evaluator {
    level: Level,
    target_err: f64,
    cache: HashMap<Word, Complex64>,
    reg: Regularizer,
}

impl Evaluator {
    pub fn new(level: Level) -> Self {
        Evaluator { level, target_err: 1e-15, cache: HashMap::new(), reg: Regularizer::new() }
    }

    pub fn level(&self) -> Level {
        self.level
    }

    /// Value of a convergent word (cached).
    pub fn word(&mut self, w: &Word) -> Result<Complex64> {
        if let Some(v) = self.cache.get(w) {
            return Ok(*v);
        }
        let v = eval_word(w, self.level, self.target_err)?.value;
        self.cache.insert(w.clone(), v);
        Ok(v)
    }

    /// Evaluates a combination over convergent words.
    pub fn combination(&mut self, lc: &LinComb<Word>) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (w, c) in lc.iter() {
            acc += self.word(w)? * c.to_f64().unwrap_or(f64::NAN);
        }
        Ok(acc)
    }

    /// Evaluates a combination over arbitrary words, regularizing divergent ones first.
    pub fn regularized(&mut self, lc: &LinComb<Word>) -> Result<Complex64> {
        let r = self.reg.shuffle_reg_lc(lc);
        self.combination(&r)
    }
}

/// Evaluates a relation over convergent words; passes iff `|residual| < tol`.
pub fn check_relation(r: &LinComb<Word>, level: Level, tol: f64) -> Result<(bool, f64)> {
    let mut ev = Evaluator::new(level);
    let res = ev.combination(r)?.norm();
    Ok((res < tol, res))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::word;

    fn lv(n: u32) -> Level {
        Level::new(n).unwrap()
    }

    #[test]
    fn classical_values() {
        let c: Composition = "Li[2;2]@4".parse().unwrap();
        let v = eval_composition(&c, 1e-14).unwrap().value;
        assert!((v - Complex64::new(-PI * PI / 12.0, 0.0)).norm() < 1e-12);
        let c: Composition = "Li[1;1]@4".parse().unwrap();
        let v = eval_composition(&c, 1e-14).unwrap().value;
        let expect = -(Complex64::new(1.0, 0.0) - Complex64::new(0.0, 1.0)).ln();
        assert!((v - expect).norm() < 1e-12);
        assert!((v - Complex64::new(-std::f64::consts::LN_2 / 2.0, std::f64::consts::FRAC_PI_4)).norm() < 1e-8);
    }

    #[test]
    fn word_sign_convention() {
        // c(e0 e_{-1}) = -Li_2(-1)
        let v = eval_word(&word("0.z2"), lv(4), 1e-14).unwrap().value;
        assert!((v - Complex64::new(PI * PI / 12.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn split_point_independence() {
        for w in ["0.z1.z3", "z2.z0.z1", "0.0.z3", "z3.z3.z2.z1"] {
            let a = eval_word_split(&word(w), lv(4), 0.5, 1e-15).unwrap().value;
            let b = eval_word_split(&word(w), lv(4), 0.37, 1e-15).unwrap().value;
            assert!((a - b).norm() < 1e-10, "{w}");
        }
    }

    #[test]
    fn series_mode_agrees_on_depth_one() {
        let c: Composition = "Li[2;1]@4".parse().unwrap();
        let a = eval_composition(&c, 1e-14).unwrap().value;
        let b = eval_composition_series(&c, 20000).unwrap().value;
        assert!((a - b).norm() < 1e-9, "{a} {b}");
    }

    #[test]
    fn divergent_symbols_rejected() {
        assert!(eval_word(&word("z0.z1"), lv(4), 1e-10).is_err());
        assert!(eval_word(&word("z1.0"), lv(4), 1e-10).is_err());
        let c: Composition = "Li[1,1;0,1]@4".parse().unwrap();
        assert!(eval_composition(&c, 1e-10).is_err());
    }
}
