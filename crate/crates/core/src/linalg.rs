//! Sparse exact linear algebra over Q and over a large prime field.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{MpvError, Result};
use crate::lincomb::{format_q, parse_q, LinComb, Q};

/// Sparse matrix with rows stored as column-sorted `(col, value)` lists.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseMatrix {
    cols: usize,
    rows: Vec<Vec<(usize, Q)>>,
}

impl SparseMatrix {
    pub fn new(cols: usize) -> Self {
        SparseMatrix { cols, rows: Vec::new() }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map(|r| r.len()).unwrap_or(0);
        let mut m = SparseMatrix::new(cols);
        for r in rows {
            m.push_row(r.iter().enumerate().map(|(j, &v)| (j, Q::from_integer(v.into()))).collect());
        }
        m
    }

    /// Adds a row; entries may be unsorted and contain zeros or duplicates.
    pub fn push_row(&mut self, entries: Vec<(usize, Q)>) {
        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
        for (c, v) in entries {
            assert!(c < self.cols, "column {c} out of range {}", self.cols);
            *acc.entry(c).or_insert_with(Q::zero) += v;
        }
        self.rows.push(acc.into_iter().filter(|(_, v)| !v.is_zero()).collect());
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[Vec<(usize, Q)>] {
        &self.rows
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut t: Vec<Vec<(usize, Q)>> = vec![Vec::new(); self.cols];
        for (i, r) in self.rows.iter().enumerate() {
            for (j, v) in r {
                t[*j].push((i, v.clone()));
            }
        }
        SparseMatrix { cols: self.rows.len(), rows: t }
    }

    /// `M x` for a dense rational vector.
    pub fn mul_vec(&self, x: &[Q]) -> Vec<Q> {
        self.rows
            .iter()
            .map(|r| r.iter().fold(Q::zero(), |acc, (j, v)| acc + v * &x[*j]))
            .collect()
    }

    pub fn append(&mut self, other: &SparseMatrix) {
        assert_eq!(self.cols, other.cols);
        self.rows.extend(other.rows.iter().cloned());
    }
}

// ---------------------------------------------------------------------------
// Rank

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RankMode {
    /// Fraction-free elimination over the integers: the true rank.
    Exact,
    /// Rank over F_p for a seeded prime p > 2^60: a lower bound for the rational rank.
    Modular { seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankReport {
    pub rank: usize,
    pub mode: RankMode,
    /// The prime used in modular mode.
    pub prime: Option<u64>,
}

pub fn rank(m: &SparseMatrix, mode: RankMode) -> Result<RankReport> {
    match mode {
        RankMode::Exact => Ok(RankReport { rank: exact_rank(m), mode, prime: None }),
        RankMode::Modular { seed } => {
            let p = prime_from_seed(seed);
            Ok(RankReport { rank: modular_rank(m, p)?, mode, prime: Some(p) })
        }
    }
}

fn integer_row(r: &[(usize, Q)]) -> Vec<(usize, BigInt)> {
    let mut lcm = BigInt::one();
    for (_, v) in r {
        lcm = lcm.lcm(v.denom());
    }
    let row: Vec<(usize, BigInt)> =
        r.iter().map(|(j, v)| (*j, (v * Q::from_integer(lcm.clone())).to_integer())).collect();
    make_primitive(row)
}

fn make_primitive(mut row: Vec<(usize, BigInt)>) -> Vec<(usize, BigInt)> {
    let mut g = BigInt::zero();
    for (_, v) in &row {
        g = g.gcd(v);
        if g.is_one() {
            break;
        }
    }
    if !g.is_zero() && !g.is_one() {
        for (_, v) in row.iter_mut() {
            *v /= &g;
        }
    }
    row
}

/// `a * x - b * y` on sparse integer rows.
fn combine_int(x: &[(usize, BigInt)], a: &BigInt, y: &[(usize, BigInt)], b: &BigInt) -> Vec<(usize, BigInt)> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
        if take_x {
            out.push((x[i].0, a * &x[i].1));
            i += 1;
        } else if take_y {
            out.push((y[j].0, -(b * &y[j].1)));
            j += 1;
        } else {
            let v = a * &x[i].1 - b * &y[j].1;
            if !v.is_zero() {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Rows sorted by (length, original index): sparse rows first keep fill-in low.
fn sparsity_order(m: &SparseMatrix) -> Vec<usize> {
    let mut order: Vec<usize> = (0..m.rows.len()).collect();
    order.sort_by_key(|&i| (m.rows[i].len(), i));
    order
}

fn exact_rank(m: &SparseMatrix) -> usize {
    let mut pivots: BTreeMap<usize, Vec<(usize, BigInt)>> = BTreeMap::new();
    for i in sparsity_order(m) {
        let mut row = integer_row(&m.rows[i]);
        while let Some((c, lead)) = row.first().cloned() {
            let Some(p) = pivots.get(&c) else { break };
            let plead = &p[0].1;
            let g = lead.gcd(plead);
            let a = plead / &g;
            let b = &lead / &g;
            row = make_primitive(combine_int(&row, &a, p, &b));
        }
        if let Some((c, _)) = row.first() {
            pivots.insert(*c, row);
        }
    }
    pivots.len()
}

// ---------------------------------------------------------------------------
// Prime field

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'outer: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// The first prime at or above a seeded random point of `[2^60, 2^61)`.
pub fn prime_from_seed(seed: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut n: u64 = rng.gen_range((1u64 << 60)..(1u64 << 61)) | 1;
    while !is_prime_u64(n) {
        n += 2;
    }
    n
}

fn to_mod(v: &Q, p: u64) -> Result<u64> {
    let pb = BigInt::from(p);
    let n = v.numer().mod_floor(&pb).to_u64().unwrap();
    let d = v.denom().mod_floor(&pb).to_u64().unwrap();
    if d == 0 {
        return Err(MpvError::Invalid(format!("denominator divisible by the prime {p}")));
    }
    Ok(mul_mod(n, pow_mod(d, p - 2, p), p))
}

fn modular_rank(m: &SparseMatrix, p: u64) -> Result<usize> {
    let mut pivots: BTreeMap<usize, Vec<(usize, u64)>> = BTreeMap::new();
    for i in sparsity_order(m) {
        let r = &m.rows[i];
        let mut row: Vec<(usize, u64)> = Vec::with_capacity(r.len());
        for (j, v) in r {
            let x = to_mod(v, p)?;
            if x != 0 {
                row.push((*j, x));
            }
        }
        while let Some(&(c, lead)) = row.first() {
            let Some(piv) = pivots.get(&c) else { break };
            // piv is monic
            let mut out = Vec::with_capacity(row.len() + piv.len());
            let (mut i, mut j) = (1, 1);
            while i < row.len() || j < piv.len() {
                if j >= piv.len() || (i < row.len() && row[i].0 < piv[j].0) {
                    out.push(row[i]);
                    i += 1;
                } else if i >= row.len() || piv[j].0 < row[i].0 {
                    out.push((piv[j].0, p - mul_mod(lead, piv[j].1, p)));
                    j += 1;
                } else {
                    let s = mul_mod(lead, piv[j].1, p);
                    let v = if row[i].1 >= s { row[i].1 - s } else { row[i].1 + (p - s) };
                    if v != 0 {
                        out.push((row[i].0, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
            row = out;
        }
        if let Some(&(c, lead)) = row.first() {
            let inv = pow_mod(lead, p - 2, p);
            for e in row.iter_mut() {
                e.1 = mul_mod(e.1, inv, p);
            }
            pivots.insert(c, row);
        }
    }
    Ok(pivots.len())
}

// ---------------------------------------------------------------------------
// Reduced row echelon form over Q

/// Reduced row echelon form with pivots chosen in the given column priority order.
struct Rref {
    /// pivot column -> fully reduced row (pivot entry 1)
    pivots: BTreeMap<usize, Vec<(usize, Q)>>,
}

fn combine_q(x: &[(usize, Q)], y: &[(usize, Q)], b: &Q) -> Vec<(usize, Q)> {
    // x - b*y
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        if j >= y.len() || (i < x.len() && x[i].0 < y[j].0) {
            out.push(x[i].clone());
            i += 1;
        } else if i >= x.len() || y[j].0 < x[i].0 {
            out.push((y[j].0, -(b * &y[j].1)));
            j += 1;
        } else {
            let v = &x[i].1 - b * &y[j].1;
            if !v.is_zero() {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Computes the RREF where `rank_of[col]` gives the elimination priority of each column
/// (lower = preferred pivot). Entries are stored in priority coordinates.
fn rref(m: &SparseMatrix, rank_of: &[usize]) -> Rref {
    let mut pivots: BTreeMap<usize, Vec<(usize, Q)>> = BTreeMap::new();
    for r in &m.rows {
        let mut row: Vec<(usize, Q)> = r.iter().map(|(j, v)| (rank_of[*j], v.clone())).collect();
        row.sort_by_key(|e| e.0);
        while let Some((c, lead)) = row.first().cloned() {
            let Some(p) = pivots.get(&c) else { break };
            row = combine_q(&row, p, &lead);
        }
        if let Some((c, lead)) = row.first().cloned() {
            let inv = Q::one() / lead;
            for e in row.iter_mut() {
                e.1 *= &inv;
            }
            pivots.insert(c, row);
        }
    }
    // back substitution, highest pivot first
    let keys: Vec<usize> = pivots.keys().rev().cloned().collect();
    for &c in &keys {
        let mut row = pivots.remove(&c).unwrap();
        loop {
            let hit = row.iter().skip(1).find(|(j, _)| pivots.contains_key(j) && *j > c).cloned();
            let Some((j, v)) = hit else { break };
            row = combine_q(&row, &pivots[&j], &v);
        }
        pivots.insert(c, row);
    }
    Rref { pivots }
}

fn identity_order(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// Basis of `{x : M x = 0}`: integer vectors with content 1, one per free column,
/// ordered by free column, each with a positive entry at its free column.
pub fn nullspace(m: &SparseMatrix) -> Vec<Vec<Q>> {
    let n = m.cols;
    let r = rref(m, &identity_order(n));
    let mut out = Vec::new();
    for f in 0..n {
        if r.pivots.contains_key(&f) {
            continue;
        }
        let mut v = vec![Q::zero(); n];
        v[f] = Q::one();
        for (c, row) in &r.pivots {
            if let Some((_, val)) = row.iter().find(|(j, _)| *j == f) {
                v[*c] = -val.clone();
            }
        }
        out.push(primitive_vec(&v));
    }
    out
}

/// Scales a vector to coprime integers, keeping the sign of its first nonzero entry.
pub fn primitive_vec(v: &[Q]) -> Vec<Q> {
    let lc: LinComb<usize> = v.iter().cloned().enumerate().collect();
    let mut p = lc.primitive();
    if let Some((_, c)) = lc.leading() {
        if c.is_negative() {
            p = p.negated();
        }
    }
    let mut out = vec![Q::zero(); v.len()];
    for (j, c) in p {
        out[j] = c;
    }
    out
}

/// Expresses every column in terms of the requested free columns using the relations
/// `M x = 0`: pivots are taken outside `free`, and each bound column maps to
/// `-Σ_f R[b][f] x_f`. Free columns map to themselves.
pub fn solve_in_terms_of(m: &SparseMatrix, free: &[usize]) -> Result<BTreeMap<usize, LinComb<usize>>> {
    let n = m.cols;
    let mut is_free = vec![false; n];
    for &f in free {
        if f >= n {
            return Err(MpvError::BadFreeSet(format!("column {f} out of range")));
        }
        is_free[f] = true;
    }
    let mut order: Vec<usize> = (0..n).filter(|j| !is_free[*j]).collect();
    order.extend(free.iter().cloned());
    let mut rank_of = vec![0; n];
    for (pos, &col) in order.iter().enumerate() {
        rank_of[col] = pos;
    }
    let r = rref(m, &rank_of);
    let bound = n - free.len();
    if let Some((&c, _)) = r.pivots.iter().find(|(c, _)| **c >= bound) {
        return Err(MpvError::BadFreeSet(format!("free column {} is dependent on the others", order[c])));
    }
    if r.pivots.len() != bound {
        let missing: Vec<usize> = (0..bound).filter(|c| !r.pivots.contains_key(c)).map(|c| order[c]).collect();
        return Err(MpvError::BadFreeSet(format!("columns {missing:?} are not determined")));
    }
    let mut out = BTreeMap::new();
    for &f in free {
        out.insert(f, LinComb::unit(f));
    }
    for (c, row) in &r.pivots {
        let lc: LinComb<usize> = row.iter().skip(1).map(|(j, v)| (order[*j], -v.clone())).collect();
        out.insert(order[*c], lc);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Cache file format

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheHeader {
    pub weight: usize,
    pub level: u32,
    pub families: String,
    pub cols: usize,
}

/// Line-based cache: header `w N family-set column-count`, then `row col p/q` lines.
pub fn write_cache(h: &CacheHeader, m: &SparseMatrix) -> String {
    let mut s = format!("{} {} {} {}\n", h.weight, h.level, h.families, h.cols);
    for (i, r) in m.rows.iter().enumerate() {
        for (j, v) in r {
            let _ = writeln!(s, "{i} {j} {}", format_q(v));
        }
    }
    s
}

pub fn parse_cache(text: &str) -> Result<(CacheHeader, SparseMatrix)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let head = lines.next().ok_or_else(|| MpvError::Parse("empty cache file".into()))?;
    let f: Vec<&str> = head.split_whitespace().collect();
    if f.len() != 4 {
        return Err(MpvError::Parse(format!("bad cache header {head:?}")));
    }
    let num = |s: &str| s.parse::<usize>().map_err(|_| MpvError::Parse(format!("bad number {s:?}")));
    let weight = num(f[0])?;
    let level = f[1].parse::<u32>().map_err(|_| MpvError::Parse(format!("bad level {:?}", f[1])))?;
    let families = f[2].to_string();
    let cols = num(f[3])?;
    if cols > 1 << 24 {
        return Err(MpvError::Parse("column count too large".into()));
    }
    let mut entries: BTreeMap<usize, Vec<(usize, Q)>> = BTreeMap::new();
    for line in lines {
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 3 {
            return Err(MpvError::Parse(format!("bad cache line {line:?}")));
        }
        let (i, j) = (num(t[0])?, num(t[1])?);
        if j >= cols {
            return Err(MpvError::Parse(format!("column {j} out of range")));
        }
        if i > 1 << 24 {
            return Err(MpvError::Parse("row index too large".into()));
        }
        let v = parse_q(t[2]).ok_or_else(|| MpvError::Parse(format!("bad rational {:?}", t[2])))?;
        entries.entry(i).or_default().push((j, v));
    }
    let nrows = entries.keys().next_back().map(|k| k + 1).unwrap_or(0);
    let mut m = SparseMatrix::new(cols);
    for i in 0..nrows {
        m.push_row(entries.remove(&i).unwrap_or_default());
    }
    Ok((CacheHeader { weight, level, families, cols }, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lincomb::q;

    #[test]
    fn small_ranks() {
        let id = SparseMatrix::from_dense(&(0..5).map(|i| (0..5).map(|j| (i == j) as i64).collect()).collect::<Vec<_>>());
        assert_eq!(exact_rank(&id), 5);
        let z = SparseMatrix::from_dense(&[vec![0, 0, 0], vec![0, 0, 0]]);
        assert_eq!(exact_rank(&z), 0);
        assert_eq!(rank(&z, RankMode::Modular { seed: 1 }).unwrap().rank, 0);
        let m = SparseMatrix::from_dense(&[vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]);
        assert_eq!(exact_rank(&m), 2);
        assert_eq!(rank(&m, RankMode::Modular { seed: 7 }).unwrap().rank, 2);
    }

    #[test]
    fn nullspace_examples() {
        let m = SparseMatrix::from_dense(&[vec![1, 1]]);
        assert_eq!(nullspace(&m), vec![vec![q(-1), q(1)]]);
        let full = SparseMatrix::from_dense(&[vec![2, 1], vec![1, 1]]);
        assert!(nullspace(&full).is_empty());
    }

    #[test]
    fn solve_examples() {
        let m = SparseMatrix::from_dense(&[vec![1, 1], vec![0, 0]]);
        let s = solve_in_terms_of(&m, &[1]).unwrap();
        assert_eq!(s[&0], LinComb::term(1, q(-1)));
        assert_eq!(s[&1], LinComb::unit(1));
        let z = SparseMatrix::from_dense(&[vec![0, 0]]);
        let s = solve_in_terms_of(&z, &[0, 1]).unwrap();
        assert_eq!(s[&0], LinComb::unit(0));
        assert!(solve_in_terms_of(&z, &[0]).is_err());
        let m = SparseMatrix::from_dense(&[vec![1, 0]]);
        assert!(solve_in_terms_of(&m, &[0]).is_err());
    }

    #[test]
    fn primes_from_seed() {
        let p = prime_from_seed(42);
        assert!(p > 1 << 60);
        assert!(is_prime_u64(p));
        assert_eq!(p, prime_from_seed(42));
        assert!(is_prime_u64((1 << 61) - 1));
        assert!(!is_prime_u64(561));
    }

    #[test]
    fn cache_roundtrip() {
        let mut m = SparseMatrix::new(3);
        m.push_row(vec![(0, q(1)), (2, crate::lincomb::q_frac(-3, 2))]);
        m.push_row(vec![(1, q(5))]);
        let h = CacheHeader { weight: 3, level: 4, families: "I,II".into(), cols: 3 };
        let text = write_cache(&h, &m);
        let (h2, m2) = parse_cache(&text).unwrap();
        assert_eq!(h, h2);
        assert_eq!(m, m2);
        assert!(parse_cache("3 4 I").is_err());
        assert!(parse_cache("3 4 I 2\n0 5 1").is_err());
    }
}
