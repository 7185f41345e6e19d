//! Exact and log-space counting primitives.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// An exact, arbitrary-precision nonnegative count.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BigCount(pub BigUint);

impl BigCount {
    pub fn zero() -> Self {
        BigCount(BigUint::zero())
    }

    pub fn one() -> Self {
        BigCount(BigUint::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }

    /// Returns the value as `u64` when it fits.
    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    /// Nearest `f64` (may be infinite for astronomically large counts).
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::INFINITY)
    }

    /// Natural logarithm; `-inf` for zero.
    pub fn ln(&self) -> f64 {
        ln_biguint(&self.0)
    }

    /// `self / other` rounded to `f64`.
    pub fn ratio(&self, other: &BigCount) -> f64 {
        ratio_to_f64(&self.0, &other.0)
    }
}

impl From<u64> for BigCount {
    fn from(v: u64) -> Self {
        BigCount(BigUint::from(v))
    }
}

impl From<BigUint> for BigCount {
    fn from(v: BigUint) -> Self {
        BigCount(v)
    }
}

impl fmt::Display for BigCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Add for BigCount {
    type Output = BigCount;
    fn add(self, rhs: BigCount) -> BigCount {
        BigCount(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a BigCount> for BigCount {
    type Output = BigCount;
    fn add(self, rhs: &'a BigCount) -> BigCount {
        BigCount(self.0 + &rhs.0)
    }
}

impl AddAssign<&BigCount> for BigCount {
    fn add_assign(&mut self, rhs: &BigCount) {
        self.0 += &rhs.0;
    }
}

impl Mul for BigCount {
    type Output = BigCount;
    fn mul(self, rhs: BigCount) -> BigCount {
        BigCount(self.0 * rhs.0)
    }
}

impl Sum for BigCount {
    fn sum<I: Iterator<Item = BigCount>>(iter: I) -> Self {
        iter.fold(BigCount::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a BigCount> for BigCount {
    fn sum<I: Iterator<Item = &'a BigCount>>(iter: I) -> Self {
        iter.fold(BigCount::zero(), |acc, x| acc + x)
    }
}

impl Serialize for BigCount {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_str_radix(10))
    }
}

impl<'de> Deserialize<'de> for BigCount {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        BigUint::parse_bytes(s.as_bytes(), 10)
            .map(BigCount)
            .ok_or_else(|| serde::de::Error::custom("invalid decimal integer"))
    }
}

/// Falling factorial `n (n-1) ... (n-r+1)`: ordered `r`-selections from `n` items.
pub fn falling_factorial(n: u64, r: u64) -> BigCount {
    BigCount(falling_factorial_big(n, r))
}

pub(crate) fn falling_factorial_big(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for j in 0..r {
        acc *= n - j;
    }
    acc
}

/// Signed-argument variant used by the placement formula: negative `n` yields 0.
pub(crate) fn falling_factorial_signed(n: i64, r: i64) -> BigUint {
    if n < 0 || r < 0 {
        return BigUint::zero();
    }
    falling_factorial_big(n as u64, r as u64)
}

pub(crate) fn factorial_big(n: u64) -> BigUint {
    falling_factorial_big(n, n)
}

/// Binomial coefficient with the convention that negative arguments give 0.
pub(crate) fn binomial_signed(n: i64, r: i64) -> BigUint {
    if n < 0 || r < 0 || r > n {
        return BigUint::zero();
    }
    let (n, r) = (n as u64, r.min(n - r) as u64);
    let mut acc = BigUint::one();
    for j in 0..r {
        acc *= n - j;
        acc /= j + 1;
    }
    acc
}

/// Log-space falling factorial, `ln(n! / (n-r)!)`; `-inf` when `r > n`.
///
/// Summed directly with compensation, so the result is accurate to a few ulps
/// of the output regardless of the size of `n`.
pub fn ln_falling_factorial(n: u64, r: u64) -> f64 {
    if r > n {
        return f64::NEG_INFINITY;
    }
    let mut acc = NeumaierSum::default();
    for j in 0..r {
        acc.add(((n - j) as f64).ln());
    }
    acc.value()
}

/// Prefix table of `ln(x!)` for `x` in `0..=max`.
#[derive(Debug, Clone)]
pub struct LnFactorials {
    table: Vec<f64>,
}

impl LnFactorials {
    pub fn new(max: usize) -> Self {
        let mut table = Vec::with_capacity(max + 1);
        let mut acc = NeumaierSum::default();
        table.push(0.0);
        for x in 1..=max {
            acc.add((x as f64).ln());
            table.push(acc.value());
        }
        LnFactorials { table }
    }

    pub fn max(&self) -> usize {
        self.table.len() - 1
    }

    /// `ln(x!)`, panicking if `x` exceeds the table size.
    pub fn ln_factorial(&self, x: usize) -> f64 {
        self.table[x]
    }

    /// `ln π(n, r)` with signed arguments; `-inf` when the count is zero.
    pub fn ln_falling(&self, n: i64, r: i64) -> f64 {
        if n < 0 || r < 0 || r > n {
            return f64::NEG_INFINITY;
        }
        self.table[n as usize] - self.table[(n - r) as usize]
    }

    /// `ln C(n, r)` with signed arguments; `-inf` when the count is zero.
    pub fn ln_binomial(&self, n: i64, r: i64) -> f64 {
        if n < 0 || r < 0 || r > n {
            return f64::NEG_INFINITY;
        }
        self.table[n as usize] - self.table[r as usize] - self.table[(n - r) as usize]
    }
}

/// Compensated (Neumaier) summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator of floats.
pub fn stable_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<NeumaierSum>().value()
}

/// Log-sum-exp over terms, ignoring `-inf` entries.
pub fn ln_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + stable_sum(terms.iter().map(|t| (t - max).exp())).ln()
}

fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Quotient of two big integers as the nearest `f64`.
///
/// The numerator is scaled so the integer quotient keeps at least 64
/// significant bits before conversion; the result is within one ulp.
pub fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    assert!(!den.is_zero(), "ratio with zero denominator");
    if num.is_zero() {
        return 0.0;
    }
    let shift = 66 + den.bits() as i64 - num.bits() as i64;
    let q = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        (num >> (-shift) as u64) / den
    };
    ldexp(q.to_f64().unwrap(), -shift)
}

fn ldexp(mut x: f64, mut exp: i64) -> f64 {
    while exp > 1000 {
        x *= 2f64.powi(1000);
        exp -= 1000;
    }
    while exp < -1000 {
        x *= 2f64.powi(-1000);
        exp += 1000;
    }
    x * 2f64.powi(exp as i32)
}
