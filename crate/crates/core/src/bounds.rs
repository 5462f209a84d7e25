//! Closed-form dimension bounds and counting formulas.

use serde::Serialize;

use crate::error::{MpvError, Result};
use crate::linalg::is_prime_u64;
use crate::words::Level;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub weight: usize,
    pub level: u32,
    #[serde(rename = "D")]
    pub d: u64,
    pub improved: Option<u64>,
    pub notes: Vec<String>,
}

fn phi(n: u32) -> u32 {
    let mut n = n;
    let mut out = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if n > 1 {
        out -= out / n;
    }
    out
}

/// Number of distinct prime factors.
fn nu(n: u32) -> u32 {
    let mut n = n;
    let mut k = 0;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            k += 1;
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    k + u32::from(n > 1)
}

/// Coefficient of `t^w` in `(1-t²-t³)^{-1}` (N=1), `(1-t-t²)^{-1}` (N=2) or
/// `(1 - (φ(N)/2 + ν(N)) t + (ν(N)-1) t²)^{-1}` (N≥3).
pub fn dg_bound(w: usize, level: Level) -> u64 {
    let n = level.get();
    let mut d: Vec<i128> = vec![1];
    for k in 1..=w {
        let at = |j: usize| if j <= k && k - j < d.len() { d[k - j] } else { 0 };
        let next = match n {
            1 => at(2) + at(3),
            2 => at(1) + at(2),
            _ => {
                let a = (phi(n) / 2 + nu(n)) as i128;
                let b = nu(n) as i128 - 1;
                a * at(1) - b * at(2)
            }
        };
        d.push(next);
    }
    u64::try_from(d[w]).expect("nonnegative bound")
}

fn check_prime(p: u64) -> Result<()> {
    if p < 5 || !is_prime_u64(p) {
        return Err(MpvError::InvalidPrime(p));
    }
    Ok(())
}

fn exact_div(a: u64, b: u64) -> u64 {
    assert_eq!(a % b, 0, "{a} not divisible by {b}");
    a / b
}

/// `(5p+7)(p+1)/24`.
pub fn improved_prime_bound(p: u64) -> Result<u64> {
    check_prime(p)?;
    Ok(exact_div((5 * p + 7) * (p + 1), 24))
}

/// `(p²-1)/24`, assembled as `dim ∧²((p-1)/2) - (p-1)(p-5)/12`.
pub fn kernel_beta_formula(p: u64) -> Result<u64> {
    check_prime(p)?;
    let m = (p - 1) / 2;
    let wedge = m * (m - 1) / 2;
    let diag = exact_div((p - 1) * (p - 5), 12);
    Ok(wedge - diag)
}

/// `(p-5)(p-7)/24`, the dimension of weight-two cusp forms on `X_1(p)`.
pub fn cuspform_dim(p: u64) -> Result<u64> {
    check_prime(p)?;
    if p < 11 {
        return Err(MpvError::InvalidPrime(p));
    }
    Ok(exact_div((p - 5) * (p - 7), 24))
}

/// `kernel_beta_formula(p) - cuspform_dim(p)`, which is `(p-3)/2`.
pub fn cuspform_residual(p: u64) -> Result<u64> {
    Ok(kernel_beta_formula(p)? - cuspform_dim(p)?)
}

fn mobius(n: u64) -> i64 {
    let mut n = n;
    let mut k = 0;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            k += 1;
        }
        p += 1;
    }
    if n > 1 {
        k += 1;
    }
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `(1/n) Σ_{d|n} μ(n/d) 2^d - δ_{1,n}`.
pub fn lyndon_dim(n: u32) -> u64 {
    assert!((1..63).contains(&n));
    let n = n as u64;
    let s: i64 = (1..=n).filter(|d| n.is_multiple_of(*d)).map(|d| mobius(n / d) * (1i64 << d)).sum();
    let v = s / n as i64 - i64::from(n == 1);
    v as u64
}

/// Graded dimensions `1..=max` of the free Lie algebra on `gens[k-1]` generators in
/// degree `k`, from `Π (1-t^n)^{-L_n} = 1/(1 - Σ gens_k t^k)`.
pub fn free_lie_dims(gens: &[u64], max: usize) -> Vec<u64> {
    let g = |k: usize| if k >= 1 && k <= gens.len() { gens[k - 1] as i128 } else { 0 };
    // h = 1/(1-g)
    let mut h = vec![1i128; 1];
    for n in 1..=max {
        h.push((1..=n).map(|k| g(k) * h[n - k]).sum());
    }
    // p_n = [t^n] t g'(t) h(t)
    let p: Vec<i128> = (0..=max).map(|n| (1..=n).map(|k| k as i128 * g(k) * h[n - k]).sum()).collect();
    (1..=max)
        .map(|n| {
            let s: i128 = (1..=n).filter(|d| n % d == 0).map(|d| mobius((n / d) as u64) as i128 * p[d]).sum();
            (s / n as i128) as u64
        })
        .collect()
}

pub fn bound_report(w: usize, level: Level) -> BoundReport {
    let d = dg_bound(w, level);
    let mut notes = Vec::new();
    let improved = if w == 2 && level.get() >= 5 && is_prime_u64(level.get() as u64) {
        let p = level.get() as u64;
        notes.push(format!("kernel of beta has dimension {}", kernel_beta_formula(p).unwrap()));
        Some(improved_prime_bound(p).unwrap())
    } else {
        None
    };
    BoundReport { weight: w, level: level.get(), d, improved, notes }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(n: u32) -> Level {
        Level::new(n).unwrap()
    }

    #[test]
    fn dg_examples() {
        assert_eq!(dg_bound(3, l(4)), 8);
        assert_eq!(dg_bound(2, l(5)), 9);
        for w in 1..=20 {
            assert_eq!(dg_bound(w, l(4)), 1 << w);
        }
    }

    #[test]
    fn dg_level_one_by_series() {
        // expand (1 - t^2 - t^3)^{-1} by repeated multiplication
        let mut series = [0i64; 9];
        let mut pow = vec![0i64; 9];
        pow[0] = 1;
        for _ in 0..9 {
            for (s, p) in series.iter_mut().zip(&pow) {
                *s += p;
            }
            let mut next = vec![0i64; 9];
            for i in 0..9 {
                for j in [2, 3] {
                    if i + j < 9 {
                        next[i + j] += pow[i];
                    }
                }
            }
            pow = next;
        }
        assert_eq!(series[8], 4);
        assert_eq!(dg_bound(8, l(1)), 4);
    }

    #[test]
    fn fibonacci_at_two() {
        for w in 2..30 {
            assert_eq!(dg_bound(w, l(2)), dg_bound(w - 1, l(2)) + dg_bound(w - 2, l(2)));
        }
    }

    #[test]
    fn prime_formulas() {
        assert_eq!(improved_prime_bound(5).unwrap(), 8);
        assert_eq!(improved_prime_bound(7).unwrap(), 14);
        assert!(improved_prime_bound(4).is_err());
        assert!(improved_prime_bound(3).is_err());
        assert_eq!(kernel_beta_formula(5).unwrap(), 1);
        assert_eq!(kernel_beta_formula(7).unwrap(), 2);
        assert_eq!(kernel_beta_formula(11).unwrap(), 5);
        assert_eq!(cuspform_dim(11).unwrap(), 1);
        assert_eq!(cuspform_dim(13).unwrap(), 2);
        assert_eq!(cuspform_residual(11).unwrap(), 4);
        for p in (5..=97u64).filter(|p| is_prime_u64(*p)) {
            let dg = dg_bound(2, l(p as u32));
            assert_eq!((p + 1) * (p + 1) / 4, dg);
            assert_eq!(dg - kernel_beta_formula(p).unwrap(), improved_prime_bound(p).unwrap());
            assert!(improved_prime_bound(p).unwrap() < dg);
            assert_eq!(kernel_beta_formula(p).unwrap(), (p * p - 1) / 24);
        }
    }

    #[test]
    fn lyndon_counts() {
        assert_eq!([1, 2, 3, 4, 6].map(lyndon_dim), [1, 1, 2, 3, 9]);
        let free = free_lie_dims(&[1; 10], 10);
        for n in 2..=10 {
            assert_eq!(free[n - 1], lyndon_dim(n as u32));
        }
        // two generators in degree 1: binary Lyndon words
        assert_eq!(free_lie_dims(&[2], 6), vec![2, 1, 2, 3, 6, 9]);
    }
}
