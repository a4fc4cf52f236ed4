//! Exact integers, rationals and residues modulo small primes, plus the
//! Bernoulli numbers and divisor sums that feed the Eisenstein series.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision signed integer.
pub type Integer = BigInt;

/// Arbitrary-precision rational, kept in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

pub fn rational(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A class modulo a prime `p`, with representative in `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

#[allow(clippy::should_implement_trait)]
impl Residue {
    pub fn new(value: i64, modulus: u64) -> Result<Self> {
        if !is_prime(modulus) {
            return Err(Error::NotPrime(modulus));
        }
        Ok(Self::new_unchecked(value.rem_euclid(modulus as i64) as u64, modulus))
    }

    pub(crate) fn new_unchecked(value: u64, modulus: u64) -> Self {
        debug_assert!(value < modulus);
        Residue { value, modulus }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn check(self, other: Residue) {
        assert_eq!(self.modulus, other.modulus, "residues with different moduli");
    }

    pub fn add(self, other: Residue) -> Residue {
        self.check(other);
        Residue::new_unchecked((self.value + other.value) % self.modulus, self.modulus)
    }

    pub fn neg(self) -> Residue {
        Residue::new_unchecked((self.modulus - self.value) % self.modulus, self.modulus)
    }

    pub fn sub(self, other: Residue) -> Residue {
        self.add(other.neg())
    }

    pub fn mul(self, other: Residue) -> Residue {
        self.check(other);
        let v = (self.value as u128 * other.value as u128) % self.modulus as u128;
        Residue::new_unchecked(v as u64, self.modulus)
    }

    pub fn pow(self, mut e: u64) -> Residue {
        let mut base = self;
        let mut acc = Residue::new_unchecked(1 % self.modulus, self.modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, `None` for the zero class.
    pub fn inv(self) -> Option<Residue> {
        if self.value == 0 {
            None
        } else {
            Some(self.pow(self.modulus - 2))
        }
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// `x mod m` in `[0, m)`.
pub fn reduce_integer(x: &Integer, m: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(m));
    r.to_u64().expect("remainder fits in u64")
}

/// Reduces `x = n/d` to `n * d^{-1} mod p`.
pub fn reduce_mod(x: &Rational, p: u64) -> Result<Residue> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    reduce_mod_prime(x, p)
}

pub(crate) fn reduce_mod_prime(x: &Rational, p: u64) -> Result<Residue> {
    let num = Residue::new_unchecked(reduce_integer(x.numer(), p), p);
    if x.denom().is_one() {
        return Ok(num);
    }
    let den = Residue::new_unchecked(reduce_integer(x.denom(), p), p);
    match den.inv() {
        Some(inv) => Ok(num.mul(inv)),
        None => Err(Error::DenominatorNotInvertible { modulus: p, exponent: None }),
    }
}

/// True when the denominator of `x` is prime to `p`.
pub fn is_p_integral(x: &Rational, p: u64) -> bool {
    reduce_integer(x.denom(), p) != 0
}

pub fn binomial(n: u64, k: u64) -> Integer {
    if k > n {
        return Integer::zero();
    }
    let k = k.min(n - k);
    let mut acc = Integer::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Bernoulli numbers `B_0, ..., B_n` with `B_1 = -1/2`.
pub fn bernoulli_numbers(n: usize) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::with_capacity(n + 1);
    out.push(Rational::one());
    for m in 1..=n {
        if m > 1 && m % 2 == 1 {
            out.push(Rational::zero());
            continue;
        }
        // sum_{j=0}^{m} C(m+1, j) B_j = 0
        let mut acc = Rational::zero();
        for (j, b) in out.iter().enumerate() {
            if !b.is_zero() {
                acc += Rational::from_integer(binomial(m as u64 + 1, j as u64)) * b;
            }
        }
        out.push(-acc / Rational::from_integer(BigInt::from(m + 1)));
    }
    out
}

pub fn bernoulli(n: usize) -> Rational {
    bernoulli_numbers(n).pop().expect("non-empty")
}

/// Divisor power sum `sigma_k(n) = sum_{d | n} d^k`.
pub fn sigma(k: u32, n: i64) -> Result<Integer> {
    if n <= 0 {
        return Err(Error::Domain(alloc::format!(
            "sigma requires a positive argument, got {n}"
        )));
    }
    let n = n as u64;
    let mut acc = Integer::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            acc += BigInt::from(d).pow(k);
            let e = n / d;
            if e != d {
                acc += BigInt::from(e).pow(k);
            }
        }
        d += 1;
    }
    Ok(acc)
}

/// Renders a rational as `num` or `num/den`.
pub fn format_rational(x: &Rational) -> alloc::string::String {
    if x.denom().is_one() {
        alloc::format!("{}", x.numer())
    } else {
        alloc::format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `num` or `num/den`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

pub(crate) fn is_integral(x: &Rational) -> bool {
    x.denom().is_one()
}
