//! Exact integer and rational arithmetic, factorization over a fixed prime
//! set, and solvability of simultaneous congruences.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision signed integer.
pub type ExactInt = BigInt;

/// Denominators larger than this many bits trigger a gcd normalization.
const NORMALIZE_BITS: u64 = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("valuation of zero is undefined")]
    ZeroValuation,
    #[error("{0} is not a prime (or the formal prime -1)")]
    NotPrime(BigInt),
    #[error("duplicate prime {0} in prime set")]
    DuplicatePrime(BigInt),
    #[error("the formal prime -1 must come first in a prime set")]
    MisplacedSign,
    #[error("modulus {0} has a prime factor outside the prime set")]
    ModulusOutsidePrimeSet(BigInt),
    #[error("cannot factor {0}: too large for trial division")]
    TooLargeToFactor(BigInt),
    #[error("malformed rational `{0}`")]
    Parse(String),
}

/// A fraction of arbitrary-precision integers.
///
/// Fractions are kept unreduced; two values are equal when they agree after
/// cross-multiplication. Very large denominators are normalized lazily so
/// that long products do not grow without bound.
#[derive(Debug, Clone)]
pub struct ExactRational {
    num: BigInt,
    den: BigInt,
}

impl ExactRational {
    pub fn new(num: BigInt, den: BigInt) -> Result<Self, ArithError> {
        if den.is_zero() {
            return Err(ArithError::ZeroDenominator);
        }
        Ok(Self { num, den }.settle())
    }

    pub fn from_int(n: BigInt) -> Self {
        Self { num: n, den: BigInt::one() }
    }

    pub fn zero() -> Self {
        Self::from_int(BigInt::zero())
    }

    pub fn one() -> Self {
        Self::from_int(BigInt::one())
    }

    pub fn num(&self) -> &BigInt {
        &self.num
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.num.is_multiple_of(&self.den)
    }

    /// The integer value, if the fraction is integral.
    pub fn to_integer(&self) -> Option<BigInt> {
        let (q, r) = self.num.div_rem(&self.den);
        r.is_zero().then_some(q)
    }

    /// True iff the value is an integer divisible by `m` (`m ≠ 0`).
    pub fn is_multiple_of(&self, m: &BigInt) -> bool {
        self.num.is_multiple_of(&(&self.den * m))
    }

    pub fn recip(&self) -> Result<Self, ArithError> {
        Self::new(self.den.clone(), self.num.clone())
    }

    /// Fully reduced form with a positive denominator.
    pub fn reduced(&self) -> (BigInt, BigInt) {
        let g = self.num.gcd(&self.den);
        let (mut n, mut d) = (&self.num / &g, &self.den / &g);
        if d.is_negative() {
            n = -n;
            d = -d;
        }
        (n, d)
    }

    fn settle(self) -> Self {
        if self.den.bits() > NORMALIZE_BITS {
            let (num, den) = self.reduced();
            Self { num, den }
        } else {
            self
        }
    }
}

impl PartialEq for ExactRational {
    fn eq(&self, other: &Self) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }
}

impl Eq for ExactRational {}

impl From<i64> for ExactRational {
    fn from(n: i64) -> Self {
        Self::from_int(BigInt::from(n))
    }
}

impl From<BigInt> for ExactRational {
    fn from(n: BigInt) -> Self {
        Self::from_int(n)
    }
}

impl Add for &ExactRational {
    type Output = ExactRational;
    fn add(self, rhs: &ExactRational) -> ExactRational {
        if self.den == rhs.den {
            return ExactRational { num: &self.num + &rhs.num, den: self.den.clone() };
        }
        ExactRational {
            num: &self.num * &rhs.den + &rhs.num * &self.den,
            den: &self.den * &rhs.den,
        }
        .settle()
    }
}

impl Sub for &ExactRational {
    type Output = ExactRational;
    fn sub(self, rhs: &ExactRational) -> ExactRational {
        self + &(-rhs)
    }
}

impl Mul for &ExactRational {
    type Output = ExactRational;
    fn mul(self, rhs: &ExactRational) -> ExactRational {
        ExactRational { num: &self.num * &rhs.num, den: &self.den * &rhs.den }.settle()
    }
}

impl Neg for &ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational { num: -&self.num, den: self.den.clone() }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for ExactRational {
            type Output = ExactRational;
            fn $m(self, rhs: ExactRational) -> ExactRational {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, d) = self.reduced();
        write!(f, "{n}/{d}")
    }
}

impl FromStr for ExactRational {
    type Err = ArithError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ArithError::Parse(s.to_string());
        match s.split_once('/') {
            Some((n, d)) => Self::new(parse_int(n).ok_or_else(bad)?, parse_int(d).ok_or_else(bad)?),
            None => Ok(Self::from_int(parse_int(s).ok_or_else(bad)?)),
        }
    }
}

/// Parses the decimal integer encoding: optional leading `-`, no leading
/// zeros except for `0` itself.
pub fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if digits.len() > 1 && digits.starts_with('0') {
        return None;
    }
    if digits == "0" && s.starts_with('-') {
        return None;
    }
    s.parse().ok()
}

/// An ordered set of distinct primes, optionally headed by the formal
/// prime −1 which records the sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeSet {
    entries: Vec<BigInt>,
}

impl PrimeSet {
    pub fn new(entries: Vec<BigInt>) -> Result<Self, ArithError> {
        let minus_one = -BigInt::one();
        for (idx, p) in entries.iter().enumerate() {
            if *p == minus_one {
                if idx != 0 {
                    return Err(ArithError::MisplacedSign);
                }
            } else if !is_prime(p) {
                return Err(ArithError::NotPrime(p.clone()));
            }
            if entries[..idx].contains(p) {
                return Err(ArithError::DuplicatePrime(p.clone()));
            }
        }
        Ok(Self { entries })
    }

    /// Prime set `{−1} ∪ {primes dividing some value}` (sign first, then
    /// ascending primes).
    pub fn of_values<'a>(
        values: impl IntoIterator<Item = &'a BigInt>,
        with_sign: bool,
    ) -> Result<Self, ArithError> {
        let mut primes: Vec<BigInt> = Vec::new();
        for v in values {
            for p in prime_divisors(v)? {
                if !primes.contains(&p) {
                    primes.push(p);
                }
            }
        }
        primes.sort();
        if with_sign {
            primes.insert(0, -BigInt::one());
        }
        Ok(Self { entries: primes })
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn has_sign(&self) -> bool {
        self.entries.first().is_some_and(|p| *p == -BigInt::one())
    }

    /// The positive primes, skipping the sign entry.
    pub fn positive(&self) -> &[BigInt] {
        if self.has_sign() {
            &self.entries[1..]
        } else {
            &self.entries
        }
    }
}

/// A nonzero integer split as `residual · ∏ pᵉ` over a [`PrimeSet`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInt {
    pub residual: BigInt,
    pub exps: Vec<u64>,
}

impl FactoredInt {
    pub fn reconstruct(&self, primes: &PrimeSet) -> BigInt {
        let mut acc = self.residual.clone();
        for (p, &e) in primes.entries().iter().zip(&self.exps) {
            for _ in 0..e {
                acc *= p;
            }
        }
        acc
    }
}

fn is_prime(p: &BigInt) -> bool {
    if *p < BigInt::from(2) {
        return false;
    }
    let mut d = BigInt::from(2);
    while &d * &d <= *p {
        if p.is_multiple_of(&d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime divisors of `|n|` in ascending order, by trial division.
pub fn prime_divisors(n: &BigInt) -> Result<Vec<BigInt>, ArithError> {
    const LIMIT: u64 = 1_000_000;
    let mut rest = n.abs();
    let mut out = Vec::new();
    if rest.is_zero() {
        return Ok(out);
    }
    let mut d: u64 = 2;
    while d <= LIMIT && BigInt::from(d) * BigInt::from(d) <= rest {
        let db = BigInt::from(d);
        if rest.is_multiple_of(&db) {
            out.push(db.clone());
            while rest.is_multiple_of(&db) {
                rest /= &db;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rest > BigInt::one() {
        // Anything left is prime unless it could still hide two factors
        // above the trial-division limit.
        if rest > BigInt::from(LIMIT) * BigInt::from(LIMIT) {
            return Err(ArithError::TooLargeToFactor(n.clone()));
        }
        out.push(rest);
    }
    Ok(out)
}

/// Largest `e` with `pᵉ | d`; for the formal prime −1, whether `d < 0`.
pub fn valuation(d: &BigInt, p: &BigInt) -> Result<u64, ArithError> {
    if d.is_zero() {
        return Err(ArithError::ZeroValuation);
    }
    if *p == -BigInt::one() {
        return Ok(u64::from(d.is_negative()));
    }
    if *p < BigInt::from(2) {
        return Err(ArithError::NotPrime(p.clone()));
    }
    let mut e = 0;
    let mut rest = d.clone();
    loop {
        let (q, r) = rest.div_rem(p);
        if !r.is_zero() {
            return Ok(e);
        }
        rest = q;
        e += 1;
    }
}

/// Splits `k ≠ 0` into its residual and exponent vector over `primes`.
pub fn factor_over(k: &BigInt, primes: &PrimeSet) -> Result<FactoredInt, ArithError> {
    if k.is_zero() {
        return Err(ArithError::ZeroValuation);
    }
    let mut residual = k.clone();
    let mut exps = Vec::with_capacity(primes.len());
    for p in primes.entries() {
        let e = valuation(&residual, p)?;
        if *p == -BigInt::one() {
            residual = residual.abs();
        } else {
            for _ in 0..e {
                residual /= p;
            }
        }
        exps.push(e);
    }
    // without a −1 entry a negative k keeps its sign in the residual
    Ok(FactoredInt { residual, exps })
}

/// Decides whether `x ≡ cᵢ (mod dᵢ)` has a common solution, one prime of
/// `primes` at a time. Every `|dᵢ|` must factor completely over the
/// positive primes of the set.
pub fn crt_solvable(congruences: &[(BigInt, BigInt)], primes: &PrimeSet) -> Result<bool, ArithError> {
    let positive = primes.positive();
    let mut vals: Vec<Vec<u64>> = Vec::with_capacity(congruences.len());
    for (_, d) in congruences {
        if d.is_zero() {
            return Err(ArithError::ZeroValuation);
        }
        let mut rest = d.abs();
        let mut row = Vec::with_capacity(positive.len());
        for p in positive {
            let e = valuation(&rest, p)?;
            for _ in 0..e {
                rest /= p;
            }
            row.push(e);
        }
        if !rest.is_one() {
            return Err(ArithError::ModulusOutsidePrimeSet(d.clone()));
        }
        vals.push(row);
    }
    for (pi, p) in positive.iter().enumerate() {
        for i in 0..congruences.len() {
            for j in i + 1..congruences.len() {
                let e = vals[i][pi].min(vals[j][pi]);
                if e == 0 {
                    continue;
                }
                let modulus = num_traits::pow(p.clone(), e as usize);
                if !(&congruences[i].0 - &congruences[j].0).is_multiple_of(&modulus) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Constructive CRT for arbitrary nonzero moduli: returns `(r, m)` with the
/// solution set equal to `r + mℤ` (`0 ≤ r < m`), or `None` if inconsistent.
pub fn crt_solve(congruences: &[(BigInt, BigInt)]) -> Option<(BigInt, BigInt)> {
    let mut r = BigInt::zero();
    let mut m = BigInt::one();
    for (c, d) in congruences {
        let d = d.abs();
        let eg = m.extended_gcd(&d);
        let diff = c - &r;
        if !diff.is_multiple_of(&eg.gcd) {
            return None;
        }
        let step = &d / &eg.gcd;
        let t = ((&diff / &eg.gcd) * &eg.x).mod_floor(&step);
        r += &m * t;
        m *= &step;
        r = r.mod_floor(&m);
    }
    Some((r, m))
}

/// Convenience for small literals in tests and tables.
pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

/// Bit length of `|n|` plus a sign bit.
pub fn bit_size(n: &BigInt) -> u64 {
    n.bits() + u64::from(n.sign() == Sign::Minus) + 1
}

/// `n` as `i64` when it fits.
pub fn small(n: &BigInt) -> Option<i64> {
    n.to_i64()
}
