//! Exact p-adic coefficient combinatorics.
//!
//! Everything here is built on two integers attached to a level `m`: the
//! quotient `q_k = floor(k / p^m)` and its factorial. From them come the two
//! modified binomial coefficients
//!
//! * `ac(k, k') = q_k! / (q_{k'}! q_{k''}!)`, a natural number, and
//! * `cro(k, k') = C(k, k') / ac(k, k')`, which lies in `Z_(p)`.
//!
//! `m = 0` recovers classical divided powers and `m = inf` ordinary powers.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Upper bound of the pre-populated factorial table.
pub const FACTORIAL_CACHE_BOUND: usize = 1024;

fn factorial_table() -> &'static [BigInt] {
    static TABLE: OnceLock<Vec<BigInt>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(FACTORIAL_CACHE_BOUND + 1);
        let mut acc = BigInt::one();
        table.push(acc.clone());
        for i in 1..=FACTORIAL_CACHE_BOUND {
            acc *= i;
            table.push(acc.clone());
        }
        table
    })
}

/// `n!` as an exact integer.
pub fn factorial(n: u64) -> BigInt {
    let table = factorial_table();
    if (n as usize) < table.len() {
        return table[n as usize].clone();
    }
    let mut acc = table[FACTORIAL_CACHE_BOUND].clone();
    for i in (FACTORIAL_CACHE_BOUND as u64 + 1)..=n {
        acc *= i;
    }
    acc
}

/// `C(n, k)` for naturals; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Generalized binomial `n (n-1) ... (n-k+1) / k!` with a signed top entry.
pub fn binomial_signed(n: i64, k: u64) -> BigInt {
    if n >= 0 {
        return binomial(n as u64, k);
    }
    // C(-a, k) = (-1)^k C(a + k - 1, k)
    let a = n.unsigned_abs();
    let value = binomial(a + k - 1, k);
    if k % 2 == 0 {
        value
    } else {
        -value
    }
}

/// A prime number, checked on construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 {
            return Err(Error::NotPrime(p));
        }
        let mut d = 2u64;
        while d.saturating_mul(d) <= p {
            if p % d == 0 {
                return Err(Error::NotPrime(p));
            }
            d += 1;
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The level `m`, a natural number or infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Level {
    Finite(u32),
    Infinite,
}

impl PartialOrd for Level {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Level {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Level::Finite(a), Level::Finite(b)) => a.cmp(b),
            (Level::Finite(_), Level::Infinite) => Ordering::Less,
            (Level::Infinite, Level::Finite(_)) => Ordering::Greater,
            (Level::Infinite, Level::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Finite(m) => write!(f, "{m}"),
            Level::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s == "∞" {
            return Ok(Level::Infinite);
        }
        s.parse::<u32>()
            .map(Level::Finite)
            .map_err(|_| Error::Malformed(format!("level must be a natural number or `inf`, got `{s}`")))
    }
}

impl Serialize for Level {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Level::Finite(m) => serializer.serialize_u32(*m),
            Level::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Level {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u32),
            Str(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Int(m) => Ok(Level::Finite(m)),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// A prime together with a level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LevelContext {
    pub p: Prime,
    pub m: Level,
}

impl LevelContext {
    pub fn new(p: u64, m: Level) -> Result<Self> {
        Ok(LevelContext { p: Prime::new(p)?, m })
    }

    pub fn finite(p: u64, m: u32) -> Result<Self> {
        Self::new(p, Level::Finite(m))
    }

    pub fn with_level(self, m: Level) -> Self {
        LevelContext { p: self.p, m }
    }

    /// `p^m`, or `None` when it does not fit (including `m = inf`).
    pub fn modulus(&self) -> Option<u64> {
        match self.m {
            Level::Finite(m) => self.p.get().checked_pow(m),
            Level::Infinite => None,
        }
    }

    pub fn q(&self, k: u64) -> u64 {
        q_of(k, self)
    }

    pub fn q_factorial(&self, k: u64) -> BigInt {
        factorial(self.q(k))
    }

    /// `q_k!` over a multi-index.
    pub fn q_factorial_multi(&self, k: &MultiIndex) -> BigInt {
        k.iter().map(|&ki| self.q_factorial(ki as u64)).product()
    }

    /// `ac(k, k')` as an integer; the caller guarantees `k' <= k`.
    pub(crate) fn ac_int(&self, k: u64, k1: u64) -> BigInt {
        debug_assert!(k1 <= k);
        self.q_factorial(k) / (self.q_factorial(k1) * self.q_factorial(k - k1))
    }

    /// `cro(k, k')` as a rational; the caller guarantees `k' <= k`.
    pub(crate) fn cro_rat(&self, k: u64, k1: u64) -> Rational {
        debug_assert!(k1 <= k);
        Rational::new(
            binomial(k, k1) * self.q_factorial(k1) * self.q_factorial(k - k1),
            self.q_factorial(k),
        )
    }
}

impl fmt::Display for LevelContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={}, m={}", self.p, self.m)
    }
}

/// `q_k = floor(k / p^m)`; zero for `m = inf`, `k` for `m = 0`.
pub fn q_of(k: u64, ctx: &LevelContext) -> u64 {
    match ctx.modulus() {
        Some(pm) => k / pm,
        None => 0,
    }
}

/// Legendre's formula `v_p(k!) = sum_i floor(k / p^i)`.
pub fn factorial_valuation(k: u64, p: Prime) -> u64 {
    let p = p.get();
    let mut total = 0;
    let mut n = k / p;
    while n > 0 {
        total += n;
        n /= p;
    }
    total
}

/// `v_p(n)` of a nonzero integer.
pub fn int_valuation(n: &BigInt, p: Prime) -> Option<i64> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p.get());
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            break;
        }
        n = q;
        v += 1;
    }
    Some(v)
}

/// `v_p` of a rational, `None` for zero.
pub fn valuation(x: &Rational, p: Prime) -> Option<i64> {
    let vn = int_valuation(x.numer(), p)?;
    let vd = int_valuation(x.denom(), p).unwrap_or(0);
    Some(vn - vd)
}

/// True when `x` lies in `Z_(p)`.
pub fn is_p_integral(x: &Rational, p: Prime) -> bool {
    match valuation(x, p) {
        None => true,
        Some(v) => v >= 0,
    }
}

pub fn rational_to_string(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `"a/b"`, `"a"`, with optional sign.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Malformed(format!("not a rational: `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// A reduced rational carrying its p-adic valuation.
#[derive(Clone, Debug)]
pub struct ValuedRational {
    value: Rational,
    p: Prime,
    valuation: Option<i64>,
}

impl ValuedRational {
    pub fn new(value: Rational, p: Prime) -> Self {
        let valuation = valuation(&value, p);
        ValuedRational { value, p, valuation }
    }

    pub fn from_integer(n: impl Into<BigInt>, p: Prime) -> Self {
        Self::new(Rational::from_integer(n.into()), p)
    }

    pub fn zero(p: Prime) -> Self {
        ValuedRational {
            value: Rational::zero(),
            p,
            valuation: None,
        }
    }

    pub fn one(p: Prime) -> Self {
        ValuedRational {
            value: Rational::one(),
            p,
            valuation: Some(0),
        }
    }

    pub fn value(&self) -> &Rational {
        &self.value
    }

    pub fn into_value(self) -> Rational {
        self.value
    }

    pub fn numerator(&self) -> &BigInt {
        self.value.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.value.denom()
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    /// `None` stands for the valuation `+inf` of zero.
    pub fn valuation(&self) -> Option<i64> {
        self.valuation
    }

    pub fn is_zero(&self) -> bool {
        self.valuation.is_none()
    }

    pub fn is_integral(&self) -> bool {
        self.valuation.map_or(true, |v| v >= 0)
    }

    /// `self / other`, `None` when `other` is zero.
    pub fn checked_div(&self, other: &ValuedRational) -> Option<ValuedRational> {
        if other.is_zero() {
            return None;
        }
        Some(Self::new(&self.value / &other.value, self.p))
    }
}

impl PartialEq for ValuedRational {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.value == other.value
    }
}

impl Eq for ValuedRational {}

impl fmt::Display for ValuedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Serialize for ValuedRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&rational_to_string(&self.value))
    }
}

macro_rules! valued_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &ValuedRational {
            type Output = ValuedRational;
            fn $method(self, rhs: &ValuedRational) -> ValuedRational {
                assert_eq!(self.p, rhs.p, "valued rationals over different primes");
                ValuedRational::new(&self.value $op &rhs.value, self.p)
            }
        }
        impl $trait for ValuedRational {
            type Output = ValuedRational;
            fn $method(self, rhs: ValuedRational) -> ValuedRational {
                (&self).$method(&rhs)
            }
        }
    };
}

valued_binop!(Add, add, +);
valued_binop!(Sub, sub, -);

impl Mul for &ValuedRational {
    type Output = ValuedRational;
    fn mul(self, rhs: &ValuedRational) -> ValuedRational {
        assert_eq!(self.p, rhs.p, "valued rationals over different primes");
        let valuation = match (self.valuation, rhs.valuation) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        ValuedRational {
            value: &self.value * &rhs.value,
            p: self.p,
            valuation,
        }
    }
}

impl Mul for ValuedRational {
    type Output = ValuedRational;
    fn mul(self, rhs: ValuedRational) -> ValuedRational {
        &self * &rhs
    }
}

impl Neg for ValuedRational {
    type Output = ValuedRational;
    fn neg(self) -> ValuedRational {
        ValuedRational {
            value: -self.value,
            p: self.p,
            valuation: self.valuation,
        }
    }
}

/// A multi-index `(k_1, ..., k_N)`; ordered lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn zeros(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, i: usize, k: u32) -> Self {
        let mut v = vec![0; n];
        v[i] = k;
        MultiIndex(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `|k| = sum of entries`.
    pub fn total(&self) -> u64 {
        self.0.iter().map(|&k| k as u64).sum()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &u32> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }

    pub fn checked_le(&self, other: &MultiIndex) -> Result<bool> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch(self.len(), other.len()));
        }
        Ok(self.0.iter().zip(&other.0).all(|(a, b)| a <= b))
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.len(), other.len());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if self.len() != other.len() {
            return None;
        }
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    pub fn concat(parts: &[&MultiIndex]) -> MultiIndex {
        MultiIndex(parts.iter().flat_map(|p| p.0.iter().copied()).collect())
    }

    pub fn slice(&self, start: usize, len: usize) -> MultiIndex {
        MultiIndex(self.0[start..start + len].to_vec())
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

/// `ac(k, k') = q_k! / (q_{k'}! q_{k''}!)`.
pub fn pd_multinomial(k: u64, k1: u64, ctx: &LevelContext) -> Result<ValuedRational> {
    if k1 > k {
        return Err(Error::IndexOrder { lower: k1, upper: k });
    }
    Ok(ValuedRational::from_integer(ctx.ac_int(k, k1), ctx.p))
}

/// `cro(k, k') = C(k, k') / ac(k, k')`.
pub fn pd_binomial(k: u64, k1: u64, ctx: &LevelContext) -> Result<ValuedRational> {
    if k1 > k {
        return Err(Error::IndexOrder { lower: k1, upper: k });
    }
    Ok(ValuedRational::new(ctx.cro_rat(k, k1), ctx.p))
}

fn check_multi(uk: &MultiIndex, uk1: &MultiIndex) -> Result<()> {
    if !uk1.checked_le(uk)? {
        let (lower, upper) = uk1
            .iter()
            .zip(uk.iter())
            .find(|(a, b)| a > b)
            .map(|(a, b)| (*a as u64, *b as u64))
            .unwrap_or((0, 0));
        return Err(Error::IndexOrder { lower, upper });
    }
    Ok(())
}

/// Componentwise product of `ac(k_i, k'_i)`.
pub fn pd_multinomial_multi(uk: &MultiIndex, uk1: &MultiIndex, ctx: &LevelContext) -> Result<ValuedRational> {
    check_multi(uk, uk1)?;
    let value: BigInt = uk
        .iter()
        .zip(uk1.iter())
        .map(|(&k, &k1)| ctx.ac_int(k as u64, k1 as u64))
        .product();
    Ok(ValuedRational::from_integer(value, ctx.p))
}

/// Componentwise product of `cro(k_i, k'_i)`.
pub fn pd_binomial_multi(uk: &MultiIndex, uk1: &MultiIndex, ctx: &LevelContext) -> Result<ValuedRational> {
    check_multi(uk, uk1)?;
    let value: Rational = uk
        .iter()
        .zip(uk1.iter())
        .map(|(&k, &k1)| ctx.cro_rat(k as u64, k1 as u64))
        .fold(Rational::one(), |acc, x| acc * x);
    Ok(ValuedRational::new(value, ctx.p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rational_from_u64(n: u64) -> Rational {
        Rational::from_integer(BigInt::from(n))
    }

    fn ctx(p: u64, m: u32) -> LevelContext {
        LevelContext::finite(p, m).unwrap()
    }

    #[test]
    fn q_examples() {
        assert_eq!(q_of(4, &ctx(2, 1)), 2);
        assert_eq!(q_of(0, &ctx(5, 3)), 0);
        assert_eq!(q_of(7, &ctx(3, 1)), 2);
        assert_eq!(q_of(7, &ctx(3, 0)), 7);
        assert_eq!(q_of(1_000, &LevelContext::new(2, Level::Infinite).unwrap()), 0);
        // p^m overflows u64: every k is below it
        assert_eq!(q_of(u64::MAX, &ctx(2, 80)), 0);
    }

    #[test]
    fn legendre_examples() {
        let two = Prime::new(2).unwrap();
        let five = Prime::new(5).unwrap();
        assert_eq!(factorial_valuation(4, two), 3);
        assert_eq!(factorial_valuation(0, two), 0);
        assert_eq!(factorial_valuation(10, five), 2);
    }

    #[test]
    fn coefficient_examples() {
        assert_eq!(pd_multinomial(4, 2, &ctx(2, 1)).unwrap().value(), &rational_from_u64(2));
        assert_eq!(pd_multinomial(5, 5, &ctx(3, 1)).unwrap().value(), &rational_from_u64(1));
        assert_eq!(pd_multinomial(2, 1, &ctx(2, 0)).unwrap().value(), &rational_from_u64(2));
        assert_eq!(pd_binomial(4, 2, &ctx(2, 1)).unwrap().value(), &rational_from_u64(3));
        assert_eq!(pd_binomial(2, 1, &ctx(2, 0)).unwrap().value(), &rational_from_u64(1));
        assert_eq!(pd_binomial(9, 0, &ctx(3, 2)).unwrap().value(), &rational_from_u64(1));
    }

    #[test]
    fn non_integer_cro() {
        // p=2, m=1: q_6 = 3, q_3 = 1, so cro(6,3) = 20/6
        let c = pd_binomial(6, 3, &ctx(2, 1)).unwrap();
        assert_eq!(c.value(), &Rational::new(10.into(), 3.into()));
        assert!(c.is_integral());
    }

    #[test]
    fn rejects_reversed_indices() {
        assert_eq!(
            pd_binomial(2, 3, &ctx(2, 1)),
            Err(Error::IndexOrder { lower: 3, upper: 2 })
        );
        assert!(pd_multinomial(0, 1, &ctx(2, 1)).is_err());
    }

    #[test]
    fn multi_index_lifts() {
        let c = ctx(2, 1);
        let uk = MultiIndex::new(vec![4, 2]);
        let uk1 = MultiIndex::new(vec![2, 1]);
        // cro(4,2) = 3 and cro(2,1) = 2 at p=2, m=1
        assert_eq!(pd_binomial_multi(&uk, &uk1, &c).unwrap().value(), &rational_from_u64(6));
        assert_eq!(
            pd_binomial_multi(&uk, &MultiIndex::zeros(2), &c).unwrap().value(),
            &rational_from_u64(1)
        );
        let c0 = ctx(2, 0);
        let two = MultiIndex::new(vec![2, 2]);
        let one = MultiIndex::new(vec![1, 1]);
        assert_eq!(pd_binomial_multi(&two, &one, &c0).unwrap().value(), &rational_from_u64(1));
        assert_eq!(
            pd_binomial_multi(&uk, &MultiIndex::new(vec![1]), &c),
            Err(Error::LengthMismatch(1, 2))
        );
        assert!(pd_multinomial_multi(&uk, &MultiIndex::new(vec![5, 0]), &c).is_err());
    }

    #[test]
    fn primes() {
        assert!(Prime::new(2).is_ok());
        assert!(Prime::new(97).is_ok());
        assert_eq!(Prime::new(1), Err(Error::NotPrime(1)));
        assert_eq!(Prime::new(91), Err(Error::NotPrime(91)));
    }

    #[test]
    fn valued_rational_caches_valuation() {
        let p = Prime::new(3).unwrap();
        let x = ValuedRational::new(Rational::new(18.into(), 5.into()), p);
        assert_eq!(x.valuation(), Some(2));
        let y = ValuedRational::new(Rational::new(2.into(), 27.into()), p);
        assert_eq!((&x * &y).valuation(), Some(-1));
        assert_eq!((&x + &y).valuation(), valuation(&(x.value() + y.value()), p));
        assert_eq!(ValuedRational::zero(p).valuation(), None);
        assert_eq!(x.to_string(), "18/5");
    }

    #[test]
    fn signed_binomials() {
        assert_eq!(binomial_signed(-1, 3), BigInt::from(-1));
        assert_eq!(binomial_signed(-2, 2), BigInt::from(3));
        assert_eq!(binomial_signed(5, 2), BigInt::from(10));
        assert_eq!(binomial_signed(2, 5), BigInt::from(0));
    }

    #[test]
    fn rational_strings() {
        assert_eq!(parse_rational("-6/4").unwrap(), Rational::new((-3).into(), 2.into()));
        assert_eq!(parse_rational("7").unwrap(), rational_from_u64(7));
        assert!(parse_rational("1/0").is_err());
        assert_eq!(rational_to_string(&rational_from_u64(3)), "3/1");
    }

    #[test]
    fn level_parsing_and_order() {
        assert_eq!("inf".parse::<Level>().unwrap(), Level::Infinite);
        assert_eq!("3".parse::<Level>().unwrap(), Level::Finite(3));
        assert!("x".parse::<Level>().is_err());
        assert!(Level::Finite(9) < Level::Infinite);
        assert!(Level::Finite(1) < Level::Finite(2));
    }
}
