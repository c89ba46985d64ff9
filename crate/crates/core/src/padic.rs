//! Exact p-adic valuations over the rationals and residues modulo `p^N`.
//!
//! Everything downstream reads valuations from here. The closed form
//! `v_p((1+p)^n - 1) = 1 + v_p(n)` is the workhorse; the big-integer
//! expansion of the same quantity is kept alongside it as an oracle.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Working precision used when the caller does not pick one.
pub const DEFAULT_PRECISION: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("{0} is not an odd prime")]
    NotAnOddPrime(u64),
    #[error("valuation of zero requested")]
    ZeroInput,
    #[error("{0} has p in its denominator")]
    NegativeValuation(BigRational),
    #[error("{base} is not a unit modulo p = {p}")]
    NotAUnit { base: BigInt, p: u64 },
    #[error("precision must be at least 1")]
    ZeroPrecision,
    #[error("residue is 0 mod p^{0}; valuation is at least {0} but not determined")]
    PrecisionExhausted(u32),
}

/// An odd prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OddPrime(u64);

impl OddPrime {
    pub fn new(p: u64) -> Result<Self, PadicError> {
        if p >= 3 && p % 2 == 1 && is_prime(p) {
            Ok(OddPrime(p))
        } else {
            Err(PadicError::NotAnOddPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    /// `p - 1`, the number of eigenspaces.
    pub fn order_of_units_mod_p(self) -> u64 {
        self.0 - 1
    }

    pub fn as_bigint(self) -> BigInt {
        BigInt::from(self.0)
    }

    /// Canonical representative of `j mod (p - 1)` in `[0, p - 2]`.
    pub fn reduce_residue(self, j: i64) -> u64 {
        j.rem_euclid((self.0 - 1) as i64) as u64
    }
}

impl fmt::Display for OddPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for OddPrime {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(self.0)
    }
}

impl<'de> Deserialize<'de> for OddPrime {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let p = u64::deserialize(d)?;
        OddPrime::new(p).map_err(serde::de::Error::custom)
    }
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        b %= n;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        acc
    };
    'witness: for &a in &SMALL {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A p-adic valuation: a natural number or infinity.
///
/// Infinity stands for the valuation of `0`, and by convention for the
/// order of a `Z_p` summand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PadicValuation {
    Finite(u64),
    Infinite,
}

impl PadicValuation {
    pub const ZERO: PadicValuation = PadicValuation::Finite(0);

    pub fn is_infinite(self) -> bool {
        matches!(self, PadicValuation::Infinite)
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            PadicValuation::Finite(k) => Some(k),
            PadicValuation::Infinite => None,
        }
    }

    /// `r` copies added together; `0 * inf = 0`.
    pub fn times(self, r: u64) -> PadicValuation {
        match self {
            _ if r == 0 => PadicValuation::ZERO,
            PadicValuation::Finite(k) => PadicValuation::Finite(k * r),
            PadicValuation::Infinite => PadicValuation::Infinite,
        }
    }
}

impl Default for PadicValuation {
    fn default() -> Self {
        PadicValuation::ZERO
    }
}

impl Add for PadicValuation {
    type Output = PadicValuation;

    fn add(self, rhs: PadicValuation) -> PadicValuation {
        match (self, rhs) {
            (PadicValuation::Finite(a), PadicValuation::Finite(b)) => PadicValuation::Finite(a + b),
            _ => PadicValuation::Infinite,
        }
    }
}

impl AddAssign for PadicValuation {
    fn add_assign(&mut self, rhs: PadicValuation) {
        *self = *self + rhs;
    }
}

impl std::iter::Sum for PadicValuation {
    fn sum<I: Iterator<Item = PadicValuation>>(iter: I) -> Self {
        iter.fold(PadicValuation::ZERO, Add::add)
    }
}

impl PartialOrd for PadicValuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PadicValuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (PadicValuation::Finite(a), PadicValuation::Finite(b)) => a.cmp(b),
            (PadicValuation::Finite(_), PadicValuation::Infinite) => Ordering::Less,
            (PadicValuation::Infinite, PadicValuation::Finite(_)) => Ordering::Greater,
            (PadicValuation::Infinite, PadicValuation::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for PadicValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PadicValuation::Finite(k) => write!(f, "{k}"),
            PadicValuation::Infinite => f.write_str("inf"),
        }
    }
}

// Serialized as a number, or the string "inf".
impl Serialize for PadicValuation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            PadicValuation::Finite(k) => s.serialize_u64(*k),
            PadicValuation::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for PadicValuation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(u64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(k) => Ok(PadicValuation::Finite(k)),
            Repr::Str(s) if s == "inf" => Ok(PadicValuation::Infinite),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("bad valuation {s:?}"))),
        }
    }
}

/// Exponent of `p` in a nonzero integer.
pub fn valuation_of_integer(p: OddPrime, x: &BigInt) -> Result<PadicValuation, PadicError> {
    if x.is_zero() {
        return Err(PadicError::ZeroInput);
    }
    let p = p.as_bigint();
    let mut rest = x.abs();
    let mut k = 0;
    loop {
        let (q, r) = rest.div_rem(&p);
        if !r.is_zero() {
            return Ok(PadicValuation::Finite(k));
        }
        rest = q;
        k += 1;
    }
}

/// Exponent of `p` in a nonzero p-integral rational.
pub fn valuation(p: OddPrime, x: &BigRational) -> Result<PadicValuation, PadicError> {
    if x.is_zero() {
        return Err(PadicError::ZeroInput);
    }
    if x.denom().is_multiple_of(&p.as_bigint()) {
        return Err(PadicError::NegativeValuation(x.clone()));
    }
    valuation_of_integer(p, x.numer())
}

/// Valuation with the extended convention `v_p(0) = inf`.
pub fn extended_valuation(p: OddPrime, x: &BigRational) -> Result<PadicValuation, PadicError> {
    if x.is_zero() {
        Ok(PadicValuation::Infinite)
    } else {
        valuation(p, x)
    }
}

/// Argument to [`same_valuation`]: a p-integral rational, or the order of `Z_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtendedRational {
    Value(BigRational),
    OrderOfZp,
}

impl From<i64> for ExtendedRational {
    fn from(x: i64) -> Self {
        ExtendedRational::Value(BigRational::from_integer(x.into()))
    }
}

impl From<BigRational> for ExtendedRational {
    fn from(x: BigRational) -> Self {
        ExtendedRational::Value(x)
    }
}

impl ExtendedRational {
    pub fn valuation(&self, p: OddPrime) -> Result<PadicValuation, PadicError> {
        match self {
            ExtendedRational::Value(x) => extended_valuation(p, x),
            ExtendedRational::OrderOfZp => Ok(PadicValuation::Infinite),
        }
    }
}

/// `a ~_p b`: equal p-adic valuations, where `0 ~_p |Z_p|`.
pub fn same_valuation(
    p: OddPrime,
    a: &ExtendedRational,
    b: &ExtendedRational,
) -> Result<bool, PadicError> {
    Ok(a.valuation(p)? == b.valuation(p)?)
}

/// `v_p((1+p)^n - 1)` by the closed form `1 + v_p(n)`.
pub fn one_plus_p_pow_minus_one_valuation(
    p: OddPrime,
    n: i64,
) -> Result<PadicValuation, PadicError> {
    if n == 0 {
        return Err(PadicError::ZeroInput);
    }
    let mut k = 1;
    let mut n = n.unsigned_abs();
    while n.is_multiple_of(p.get()) {
        n /= p.get();
        k += 1;
    }
    Ok(PadicValuation::Finite(k))
}

/// `v_p((1+p)^n - 1)` by expanding the power as a big integer.
///
/// Negative `n` is reduced to `|n|`: `(1+p)^{-n} - 1 = -(1+p)^{-n} ((1+p)^n - 1)`
/// and `(1+p)^{-n}` is a p-adic unit.
pub fn one_plus_p_pow_minus_one_valuation_direct(
    p: OddPrime,
    n: i64,
) -> Result<PadicValuation, PadicError> {
    if n == 0 {
        return Err(PadicError::ZeroInput);
    }
    let base = BigInt::from(p.get() + 1);
    let value: BigInt = Pow::pow(&base, n.unsigned_abs()) - 1;
    valuation_of_integer(p, &value)
}

/// A residue modulo `p^N`: a finite-precision window onto `Z_p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PadicApprox {
    p: OddPrime,
    residue: BigUint,
    precision: u32,
}

impl PadicApprox {
    pub fn new(p: OddPrime, value: &BigInt, precision: u32) -> Result<Self, PadicError> {
        if precision == 0 {
            return Err(PadicError::ZeroPrecision);
        }
        let modulus = modulus(p, precision);
        let residue = value.mod_floor(&modulus).to_biguint().expect("non-negative residue");
        Ok(PadicApprox { p, residue, precision })
    }

    /// Reduction of a p-integral rational `a/b` as `a * b^{-1} mod p^N`.
    pub fn from_rational(p: OddPrime, x: &BigRational, precision: u32) -> Result<Self, PadicError> {
        let denom = PadicApprox::new(p, x.denom(), precision)?;
        let inv = denom.inverse().map_err(|_| PadicError::NegativeValuation(x.clone()))?;
        Ok(&PadicApprox::new(p, x.numer(), precision)? * &inv)
    }

    pub fn prime(&self) -> OddPrime {
        self.p
    }

    pub fn residue(&self) -> &BigUint {
        &self.residue
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Valuation of the residue; refuses to guess when it is `0 mod p^N`.
    pub fn valuation(&self) -> Result<PadicValuation, PadicError> {
        if self.residue.is_zero() {
            return Err(PadicError::PrecisionExhausted(self.precision));
        }
        valuation_of_integer(self.p, &BigInt::from(self.residue.clone()))
    }

    pub fn inverse(&self) -> Result<PadicApprox, PadicError> {
        let modulus = modulus(self.p, self.precision);
        let value = BigInt::from(self.residue.clone());
        let ext = value.extended_gcd(&modulus);
        if !ext.gcd.is_one() {
            return Err(PadicError::NotAUnit { base: value, p: self.p.get() });
        }
        PadicApprox::new(self.p, &ext.x, self.precision)
    }
}

impl Mul for &PadicApprox {
    type Output = PadicApprox;

    fn mul(self, rhs: &PadicApprox) -> PadicApprox {
        assert_eq!(self.p, rhs.p, "mixed primes");
        let precision = self.precision.min(rhs.precision);
        let modulus = modulus(self.p, precision).to_biguint().expect("positive");
        PadicApprox { p: self.p, residue: (&self.residue * &rhs.residue) % modulus, precision }
    }
}

impl fmt::Display for PadicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.residue, self.p, self.precision)
    }
}

fn modulus(p: OddPrime, precision: u32) -> BigInt {
    Pow::pow(&p.as_bigint(), precision)
}

/// `base^exp mod p^N`; negative exponents go through the modular inverse.
pub fn pow_mod(
    base: &BigInt,
    exp: i64,
    p: OddPrime,
    precision: u32,
) -> Result<PadicApprox, PadicError> {
    let reduced = PadicApprox::new(p, base, precision)?;
    let modulus = modulus(p, precision).to_biguint().expect("positive");
    let base = if exp < 0 {
        if base.sign() == Sign::NoSign || base.is_multiple_of(&p.as_bigint()) {
            return Err(PadicError::NotAUnit { base: base.clone(), p: p.get() });
        }
        reduced.inverse()?
    } else {
        reduced
    };
    let residue = base.residue.modpow(&BigUint::from(exp.unsigned_abs()), &modulus);
    Ok(PadicApprox { p, residue, precision })
}
