//! Exact ordered-field arithmetic.
//!
//! The LP, arrangement and greedy code is written against [`Field`] rather
//! than a concrete number type.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// An exact ordered field.
pub trait Field: Clone + Ord + fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    /// Panics on division by zero.
    fn over(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;

    fn sign(&self) -> Ordering {
        self.cmp(&Self::zero())
    }
    fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }
    fn is_negative(&self) -> bool {
        self.sign() == Ordering::Less
    }
    fn from_int(v: i64) -> Self {
        Self::from_rational(&int(v))
    }
}

impl Field for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn over(&self, other: &Self) -> Self {
        self / other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn sign(&self) -> Ordering {
        if Signed::is_positive(self) {
            Ordering::Greater
        } else if Signed::is_negative(self) {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
}

/// Totally ordered additive weights, as consumed by greedy and shortest-path.
pub trait Weight: Clone + Ord {
    fn zero_weight() -> Self;
    fn sum_with(&self, other: &Self) -> Self;
}

impl<F: Field> Weight for F {
    fn zero_weight() -> Self {
        <F as Field>::zero()
    }
    fn sum_with(&self, other: &Self) -> Self {
        self.plus(other)
    }
}

/// Pair compared lexicographically: `primary` first, then `secondary`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LexPair<F> {
    pub primary: F,
    pub secondary: F,
}

impl<F> LexPair<F> {
    pub fn new(primary: F, secondary: F) -> Self {
        LexPair { primary, secondary }
    }
}

impl<F: Field> Weight for LexPair<F> {
    fn zero_weight() -> Self {
        LexPair::new(F::zero(), F::zero())
    }
    fn sum_with(&self, other: &Self) -> Self {
        LexPair::new(self.primary.plus(&other.primary), self.secondary.plus(&other.secondary))
    }
}

/// Integer as a rational.
pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// `p/q` as a rational. Panics if `q == 0`.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"p/q"`, `"p"` or a JSON-style integer literal.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let t = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if Zero::is_zero(&q) {
            return Err(bad());
        }
        Ok(Rational::new(p, q))
    } else {
        let p = BigInt::from_str(t).map_err(|_| bad())?;
        Ok(Rational::from_integer(p))
    }
}

/// Canonical `"p/q"` form; integers are written without a denominator.
pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

/// Least common multiple of the denominators of `values` (1 for an empty slice).
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Largest element, or zero for an empty iterator.
pub fn max_or_zero<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
    values
        .into_iter()
        .fold(int(0), |m, v| if *v > m { v.clone() } else { m })
}

/// Dot product over any field.
pub fn dot<F: Field>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (x, y)| acc.plus(&x.times(y)))
}

/// Rank of a dense matrix (rows of equal length) by exact Gaussian elimination.
pub fn rank<F: Field>(rows: &[Vec<F>]) -> usize {
    let mut m: Vec<Vec<F>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][c].clone();
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_zero() {
                let f = m[r][c].over(&pivot);
                for k in c..cols {
                    let v = m[r][k].minus(&f.times(&m[rank][k]));
                    m[r][k] = v;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Solves the square system `a x = b`; `None` if `a` is singular.
pub fn solve_square<F: Field>(a: &[Vec<F>], b: &[F]) -> Option<Vec<F>> {
    let n = b.len();
    let mut m: Vec<Vec<F>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(c, p);
        let pivot = m[c][c].clone();
        for k in c..=n {
            m[c][k] = m[c][k].over(&pivot);
        }
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for k in c..=n {
                    let v = m[r][k].minus(&f.times(&m[c][k]));
                    m[r][k] = v;
                }
            }
        }
    }
    Some(m.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Ceiling of log2 of a positive rational, as an integer.
pub fn ceil_log2(x: &Rational) -> i64 {
    assert!(Signed::is_positive(x));
    let mut k: i64 = 0;
    let two = int(2);
    let mut p = int(1);
    if *x >= p {
        while p < *x {
            p = &p * &two;
            k += 1;
        }
    } else {
        while p.clone() / &two >= *x {
            p = &p / &two;
            k -= 1;
        }
    }
    k
}
