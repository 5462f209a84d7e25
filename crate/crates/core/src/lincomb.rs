//! Sparse formal linear combinations with exact rational coefficients.

use std::collections::btree_map::{self, BTreeMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar used throughout the crate.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Formats a rational as `p/q` (or `p` when integral).
pub fn format_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let n: BigInt = a.trim().parse().ok()?;
        let d: BigInt = b.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Q::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(Q::from_integer(n))
    }
}

/// A finite sum `Σ c_s · s` with no zero coefficients stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LinComb<S: Ord> {
    terms: BTreeMap<S, Q>,
}

impl<S: Ord> Default for LinComb<S> {
    fn default() -> Self {
        Self { terms: BTreeMap::new() }
    }
}

impl<S: Ord + fmt::Debug> fmt::Debug for LinComb<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.terms.iter().map(|(k, v)| (k, format_q(v))))
            .finish()
    }
}

impl<S: Ord + fmt::Display> fmt::Display for LinComb<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (s, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i > 0 {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            } else if neg {
                write!(f, "-")?;
            }
            let a = c.abs();
            if a.is_one() {
                write!(f, "{s}")?;
            } else {
                write!(f, "{}*{s}", format_q(&a))?;
            }
        }
        Ok(())
    }
}

impl<S: Ord> LinComb<S> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn term(s: S, c: Q) -> Self {
        let mut out = Self::new();
        out.add_term(s, c);
        out
    }

    pub fn unit(s: S) -> Self {
        Self::term(s, Q::one())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, s: &S) -> Option<&Q> {
        self.terms.get(s)
    }

    pub fn coeff(&self, s: &S) -> Q {
        self.terms.get(s).cloned().unwrap_or_else(Q::zero)
    }

    pub fn iter(&self) -> btree_map::Iter<'_, S, Q> {
        self.terms.iter()
    }

    pub fn keys(&self) -> btree_map::Keys<'_, S, Q> {
        self.terms.keys()
    }

    pub fn add_term(&mut self, s: S, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(s) {
            btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn remove(&mut self, s: &S) -> Option<Q> {
        self.terms.remove(s)
    }

    pub fn scale(&mut self, c: &Q) {
        if c.is_zero() {
            self.terms.clear();
            return;
        }
        for v in self.terms.values_mut() {
            *v *= c;
        }
    }

    pub fn scaled(mut self, c: &Q) -> Self {
        self.scale(c);
        self
    }

    pub fn negated(mut self) -> Self {
        for v in self.terms.values_mut() {
            *v = -v.clone();
        }
        self
    }

    /// The first (smallest) symbol and its coefficient.
    pub fn leading(&self) -> Option<(&S, &Q)> {
        self.terms.iter().next()
    }
}

impl<S: Ord + Clone> LinComb<S> {
    pub fn add_scaled(&mut self, other: &LinComb<S>, c: &Q) {
        if c.is_zero() {
            return;
        }
        for (s, v) in other.iter() {
            self.add_term(s.clone(), v * c);
        }
    }

    pub fn add_assign(&mut self, other: &LinComb<S>) {
        for (s, v) in other.iter() {
            self.add_term(s.clone(), v.clone());
        }
    }

    pub fn sub_assign(&mut self, other: &LinComb<S>) {
        for (s, v) in other.iter() {
            self.add_term(s.clone(), -v.clone());
        }
    }

    /// Applies a linear map given on symbols.
    pub fn map_linear<T: Ord + Clone, F: FnMut(&S) -> LinComb<T>>(&self, mut f: F) -> LinComb<T> {
        let mut out = LinComb::new();
        for (s, c) in self.iter() {
            out.add_scaled(&f(s), c);
        }
        out
    }

    /// Scales so that all coefficients are coprime integers and the first one is positive.
    pub fn primitive(&self) -> LinComb<S> {
        if self.is_empty() {
            return self.clone();
        }
        let mut lcm = BigInt::one();
        for c in self.terms.values() {
            lcm = num_integer::Integer::lcm(&lcm, c.denom());
        }
        let mut gcd = BigInt::zero();
        for c in self.terms.values() {
            let n = (c * Q::from_integer(lcm.clone())).to_integer();
            gcd = num_integer::Integer::gcd(&gcd, &n);
        }
        let mut factor = Q::new(lcm, gcd);
        if self.leading().map(|(_, c)| c.is_negative()).unwrap_or(false) {
            factor = -factor;
        }
        self.clone().scaled(&factor)
    }
}

impl<S: Ord> IntoIterator for LinComb<S> {
    type Item = (S, Q);
    type IntoIter = btree_map::IntoIter<S, Q>;
    fn into_iter(self) -> Self::IntoIter {
        self.terms.into_iter()
    }
}

impl<S: Ord> FromIterator<(S, Q)> for LinComb<S> {
    fn from_iter<I: IntoIterator<Item = (S, Q)>>(iter: I) -> Self {
        let mut out = LinComb::new();
        for (s, c) in iter {
            out.add_term(s, c);
        }
        out
    }
}
