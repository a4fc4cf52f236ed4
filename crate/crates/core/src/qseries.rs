//! Truncated Laurent series in `q` with exact rational coefficients.
//!
//! A [`QExpansion`] stores every coefficient in the window `ord <= n < prec`
//! densely. `prec` is a certification bound: each operation computes the
//! largest `prec` for which its output coefficients are independent of the
//! unknown tails of its inputs, so a retained coefficient is always exact.
//!
//! Precision rules, with `len = prec - ord`:
//!
//! * `add`: `prec = min(prec_f, prec_g)`.
//! * `mul`: `ord = ord_f + ord_g`, `prec = min(prec_f + ord_g, prec_g + ord_f)`,
//!   so `len = min(len_f, len_g)`.
//! * `inv`: `ord = -ord_f`, `prec = prec_f - 2 ord_f` (length is preserved).
//! * `pow`: length is preserved, hence `f^n` with `ord_f = -1` has
//!   `prec = prec_f - (n - 1)`.
//! * `theta`: `prec` unchanged.
//!
//! The zero series is stored as `ord == prec` with no coefficients; any
//! leading zeros produced by cancellation are trimmed so that `ord` is the
//! true order at infinity whenever the series is nonzero to its precision.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

use crate::arith::{self, Rational, Residue};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QExpansion {
    ord: i64,
    prec: i64,
    coeffs: Vec<Rational>,
}

#[allow(clippy::len_without_is_empty)]
impl QExpansion {
    /// Series `sum coeffs[i] q^(ord + i) + O(q^(ord + coeffs.len()))`.
    pub fn new(ord: i64, coeffs: Vec<Rational>) -> Self {
        let prec = ord + coeffs.len() as i64;
        QExpansion { ord, prec, coeffs }.normalized()
    }

    pub fn from_integers(ord: i64, coeffs: &[i64]) -> Self {
        Self::new(ord, coeffs.iter().map(|&c| arith::rational(c)).collect())
    }

    pub fn from_big_integers(ord: i64, coeffs: Vec<BigInt>) -> Self {
        Self::new(ord, coeffs.into_iter().map(Rational::from_integer).collect())
    }

    pub fn zero(prec: i64) -> Self {
        QExpansion { ord: prec, prec, coeffs: Vec::new() }
    }

    /// `c q^exp + O(q^prec)`.
    pub fn monomial(exp: i64, c: Rational, prec: i64) -> Self {
        if exp >= prec {
            return Self::zero(prec);
        }
        let mut coeffs = vec![Rational::zero(); (prec - exp) as usize];
        coeffs[0] = c;
        Self::new(exp, coeffs)
    }

    pub fn constant(c: Rational, prec: i64) -> Self {
        Self::monomial(0, c, prec)
    }

    pub fn one(prec: i64) -> Self {
        Self::constant(Rational::one(), prec)
    }

    fn normalized(mut self) -> Self {
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.ord += lead as i64;
        }
        debug_assert_eq!(self.ord + self.coeffs.len() as i64, self.prec);
        self
    }

    /// Lowest retained exponent; equals `prec` for the zero series.
    pub fn ord(&self) -> i64 {
        self.ord
    }

    /// Exclusive upper bound of the certified window.
    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// Number of certified coefficients from the leading one on.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    /// True when the series is zero to its precision.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn leading_coefficient(&self) -> Option<&Rational> {
        self.coeffs.first()
    }

    /// Exact coefficient of `q^n`. Errors instead of guessing beyond `prec`.
    pub fn coeff(&self, n: i64) -> Result<Rational> {
        if n >= self.prec {
            return Err(Error::OutOfPrecision { exponent: n, prec: self.prec });
        }
        Ok(self.coeff_ref(n).cloned().unwrap_or_else(Rational::zero))
    }

    fn coeff_ref(&self, n: i64) -> Option<&Rational> {
        if n < self.ord || n >= self.prec {
            None
        } else {
            Some(&self.coeffs[(n - self.ord) as usize])
        }
    }

    /// Nonzero terms `(exponent, coefficient)`, lowest exponent first.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.ord + i as i64, c))
    }

    /// Forgets every coefficient at or above `prec`.
    pub fn truncate(&self, prec: i64) -> Self {
        if prec >= self.prec {
            return self.clone();
        }
        if prec <= self.ord {
            return Self::zero(prec);
        }
        let mut out = self.clone();
        out.coeffs.truncate((prec - self.ord) as usize);
        out.prec = prec;
        out
    }

    /// True if both series agree on every exponent below their common precision.
    pub fn agrees_with(&self, other: &QExpansion) -> bool {
        let prec = self.prec.min(other.prec);
        self.truncate(prec) == other.truncate(prec)
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(arith::is_integral)
    }

    pub fn add(&self, other: &QExpansion) -> QExpansion {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &QExpansion) -> QExpansion {
        self.combine(other, |a, b| a - b)
    }

    fn combine(&self, other: &QExpansion, op: impl Fn(&Rational, &Rational) -> Rational) -> Self {
        let prec = self.prec.min(other.prec);
        let ord = self.ord.min(other.ord);
        if ord >= prec {
            return Self::zero(prec);
        }
        let zero = Rational::zero();
        let coeffs = (ord..prec)
            .map(|n| {
                op(
                    self.coeff_ref(n).unwrap_or(&zero),
                    other.coeff_ref(n).unwrap_or(&zero),
                )
            })
            .collect();
        Self::new(ord, coeffs)
    }

    pub fn neg(&self) -> QExpansion {
        QExpansion {
            ord: self.ord,
            prec: self.prec,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> QExpansion {
        if c.is_zero() {
            return Self::zero(self.prec);
        }
        QExpansion {
            ord: self.ord,
            prec: self.prec,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiplication by `q^n`.
    pub fn shift(&self, n: i64) -> QExpansion {
        QExpansion { ord: self.ord + n, prec: self.prec + n, coeffs: self.coeffs.clone() }
    }

    /// Cauchy product with certified truncation.
    pub fn mul(&self, other: &QExpansion) -> QExpansion {
        let ord = self.ord + other.ord;
        let prec = (self.prec + other.ord).min(other.prec + self.ord);
        if self.is_zero() || other.is_zero() {
            return Self::zero(prec);
        }
        let len = (prec - ord) as usize;
        // Clear denominators so the convolution runs over integers.
        let (a, da) = clear_denominators(&self.coeffs[..len]);
        let (b, db) = clear_denominators(&other.coeffs[..len]);
        let prod = convolve(&a, &b, len);
        let den = da * db;
        let coeffs = prod
            .into_iter()
            .map(|c| Rational::new(c, den.clone()))
            .collect();
        Self::new(ord, coeffs)
    }

    /// Multiplicative inverse; the leading coefficient must be known and nonzero.
    pub fn inv(&self) -> Result<QExpansion> {
        let Some(a0) = self.leading_coefficient() else {
            return Err(Error::ZeroLeadingCoefficient);
        };
        let len = self.len();
        let ord = -self.ord;
        if self.is_integral() && a0.numer().abs().is_one() {
            let a: Vec<BigInt> = self.coeffs.iter().map(|c| c.numer().clone()).collect();
            let u = a[0].clone(); // unit, its own inverse
            let mut b: Vec<BigInt> = Vec::with_capacity(len);
            b.push(u.clone());
            for n in 1..len {
                let mut acc = BigInt::zero();
                for i in 1..=n {
                    if !a[i].is_zero() && !b[n - i].is_zero() {
                        acc += &a[i] * &b[n - i];
                    }
                }
                b.push(-(acc * &u));
            }
            return Ok(Self::from_big_integers(ord, b));
        }
        let inv0 = a0.recip();
        let mut b: Vec<Rational> = Vec::with_capacity(len);
        b.push(inv0.clone());
        for n in 1..len {
            let mut acc = Rational::zero();
            for i in 1..=n {
                if !self.coeffs[i].is_zero() && !b[n - i].is_zero() {
                    acc += &self.coeffs[i] * &b[n - i];
                }
            }
            b.push(-(acc * &inv0));
        }
        Ok(Self::new(ord, b))
    }

    /// `f^n` by binary exponentiation. `f^0` is `1` with `prec = len(f)`.
    pub fn pow(&self, mut n: u64) -> QExpansion {
        let mut acc = QExpansion::one(self.len() as i64);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// The operator `q d/dq`.
    pub fn theta(&self) -> QExpansion {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * Rational::from_integer(BigInt::from(self.ord + i as i64)))
            .collect();
        QExpansion { ord: self.ord, prec: self.prec, coeffs }.normalized()
    }

    /// Coefficient-wise reduction modulo a prime.
    pub fn reduce_mod_p(&self, p: u64) -> Result<ResidueSeries> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                arith::reduce_mod_prime(c, p).map(|r| r.value()).map_err(|_| {
                    Error::DenominatorNotInvertible {
                        modulus: p,
                        exponent: Some(self.ord + i as i64),
                    }
                })
            })
            .collect::<Result<Vec<u64>>>()?;
        Ok(ResidueSeries::new(self.ord, coeffs, p))
    }
}

fn clear_denominators(coeffs: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let mut den = BigInt::one();
    for c in coeffs {
        if !c.denom().is_one() {
            den = den.lcm(c.denom());
        }
    }
    let ints = coeffs
        .iter()
        .map(|c| {
            if den.is_one() {
                c.numer().clone()
            } else {
                c.numer() * (&den / c.denom())
            }
        })
        .collect();
    (ints, den)
}

fn convolve(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

impl fmt::Display for QExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.terms() {
            write_term(f, &mut first, c.is_negative(), |f| {
                let mag = c.abs();
                write_monomial(f, n, mag.is_one(), &arith::format_rational(&mag))
            })?;
        }
        write_big_o(f, first, self.prec)
    }
}

fn write_term(
    f: &mut fmt::Formatter<'_>,
    first: &mut bool,
    negative: bool,
    body: impl FnOnce(&mut fmt::Formatter<'_>) -> fmt::Result,
) -> fmt::Result {
    match (*first, negative) {
        (true, true) => f.write_str("-")?,
        (true, false) => {}
        (false, true) => f.write_str(" - ")?,
        (false, false) => f.write_str(" + ")?,
    }
    *first = false;
    body(f)
}

fn write_monomial(f: &mut fmt::Formatter<'_>, n: i64, unit: bool, mag: &str) -> fmt::Result {
    match (n, unit) {
        (0, _) => f.write_str(mag),
        (1, true) => f.write_str("q"),
        (1, false) => write!(f, "{mag}*q"),
        (_, true) => write!(f, "q^{n}"),
        (_, false) => write!(f, "{mag}*q^{n}"),
    }
}

fn write_big_o(f: &mut fmt::Formatter<'_>, first: bool, prec: i64) -> fmt::Result {
    if !first {
        f.write_str(" + ")?;
    }
    match prec {
        0 => f.write_str("O(1)"),
        1 => f.write_str("O(q)"),
        _ => write!(f, "O(q^{prec})"),
    }
}

/// A truncated q-series with coefficients in `Z/pZ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ResidueSeries {
    ord: i64,
    prec: i64,
    modulus: u64,
    coeffs: Vec<u64>,
}

impl ResidueSeries {
    fn new(ord: i64, coeffs: Vec<u64>, modulus: u64) -> Self {
        let prec = ord + coeffs.len() as i64;
        let mut out = ResidueSeries { ord, prec, modulus, coeffs };
        let lead = out.coeffs.iter().take_while(|&&c| c == 0).count();
        out.coeffs.drain(..lead);
        out.ord += lead as i64;
        out
    }

    pub fn ord(&self) -> i64 {
        self.ord
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Residues from `ord` up to `prec`.
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: i64) -> Result<Residue> {
        if n >= self.prec {
            return Err(Error::OutOfPrecision { exponent: n, prec: self.prec });
        }
        let v = if n < self.ord { 0 } else { self.coeffs[(n - self.ord) as usize] };
        Ok(Residue::new_unchecked(v, self.modulus))
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(move |(i, &c)| (self.ord + i as i64, c))
    }

    pub fn add(&self, other: &ResidueSeries) -> ResidueSeries {
        assert_eq!(self.modulus, other.modulus);
        let prec = self.prec.min(other.prec);
        let ord = self.ord.min(other.ord).min(prec);
        let get = |s: &ResidueSeries, n: i64| {
            if n < s.ord { 0 } else { s.coeffs[(n - s.ord) as usize] }
        };
        let coeffs = (ord..prec)
            .map(|n| (get(self, n) + get(other, n)) % self.modulus)
            .collect();
        ResidueSeries::new(ord, coeffs, self.modulus)
    }

    pub fn mul(&self, other: &ResidueSeries) -> ResidueSeries {
        assert_eq!(self.modulus, other.modulus);
        let ord = self.ord + other.ord;
        let prec = (self.prec + other.ord).min(other.prec + self.ord);
        if self.is_zero() || other.is_zero() {
            return ResidueSeries { ord: prec, prec, modulus: self.modulus, coeffs: Vec::new() };
        }
        let len = (prec - ord) as usize;
        let m = self.modulus as u128;
        let mut out = vec![0u128; len];
        for i in 0..len {
            for j in 0..len - i {
                out[i + j] = (out[i + j] + self.coeffs[i] as u128 * other.coeffs[j] as u128) % m;
            }
        }
        ResidueSeries::new(ord, out.into_iter().map(|c| c as u64).collect(), self.modulus)
    }
}

impl fmt::Display for ResidueSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.terms() {
            write_term(f, &mut first, false, |f| {
                write_monomial(f, n, c == 1, &alloc::format!("{c}"))
            })?;
        }
        write_big_o(f, first, self.prec)
    }
}

/// Weight metadata carried by a [`ModularExpansion`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Weight {
    /// A level-1 weakly holomorphic form of this even weight.
    Modular(i64),
    /// Not a modular form (for example `E_2`, or `Theta` of a nonzero weight).
    NonModular,
}

impl Weight {
    pub fn value(self) -> Option<i64> {
        match self {
            Weight::Modular(k) => Some(k),
            Weight::NonModular => None,
        }
    }

    fn zip(self, other: Weight, f: impl FnOnce(i64, i64) -> Option<i64>) -> Weight {
        match (self, other) {
            (Weight::Modular(a), Weight::Modular(b)) => f(a, b).map_or(Weight::NonModular, Weight::Modular),
            _ => Weight::NonModular,
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Modular(k) => write!(f, "{k}"),
            Weight::NonModular => f.write_str("non-modular"),
        }
    }
}

/// A q-expansion together with the weight of the form it represents.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModularExpansion {
    pub series: QExpansion,
    pub weight: Weight,
}

impl ModularExpansion {
    pub fn new(series: QExpansion, weight: i64) -> Result<Self> {
        if weight % 2 != 0 {
            return Err(Error::InvalidWeight(weight));
        }
        Ok(ModularExpansion { series, weight: Weight::Modular(weight) })
    }

    pub fn non_modular(series: QExpansion) -> Self {
        ModularExpansion { series, weight: Weight::NonModular }
    }

    pub(crate) fn with_weight(series: QExpansion, weight: Weight) -> Self {
        ModularExpansion { series, weight }
    }

    pub fn weight(&self) -> Weight {
        self.weight
    }

    pub fn ord(&self) -> i64 {
        self.series.ord()
    }

    pub fn prec(&self) -> i64 {
        self.series.prec()
    }

    pub fn coeff(&self, n: i64) -> Result<Rational> {
        self.series.coeff(n)
    }

    /// Sum; the weight survives only if both summands share it.
    pub fn add(&self, other: &ModularExpansion) -> ModularExpansion {
        let weight = self.weight.zip(other.weight, |a, b| (a == b).then_some(a));
        Self::with_weight(self.series.add(&other.series), weight)
    }

    pub fn sub(&self, other: &ModularExpansion) -> ModularExpansion {
        let weight = self.weight.zip(other.weight, |a, b| (a == b).then_some(a));
        Self::with_weight(self.series.sub(&other.series), weight)
    }

    pub fn neg(&self) -> ModularExpansion {
        Self::with_weight(self.series.neg(), self.weight)
    }

    pub fn scale(&self, c: &Rational) -> ModularExpansion {
        Self::with_weight(self.series.scale(c), self.weight)
    }

    pub fn mul(&self, other: &ModularExpansion) -> ModularExpansion {
        let weight = self.weight.zip(other.weight, |a, b| Some(a + b));
        Self::with_weight(self.series.mul(&other.series), weight)
    }

    pub fn inv(&self) -> Result<ModularExpansion> {
        let weight = match self.weight {
            Weight::Modular(k) => Weight::Modular(-k),
            Weight::NonModular => Weight::NonModular,
        };
        Ok(Self::with_weight(self.series.inv()?, weight))
    }

    pub fn pow(&self, n: u64) -> ModularExpansion {
        let weight = match self.weight {
            Weight::Modular(k) => Weight::Modular(k * n as i64),
            Weight::NonModular => Weight::NonModular,
        };
        Self::with_weight(self.series.pow(n), weight)
    }

    /// `Theta` maps weight 0 to weight 2; anything else loses modularity.
    pub fn theta(&self) -> ModularExpansion {
        let weight = match self.weight {
            Weight::Modular(0) => Weight::Modular(2),
            _ => Weight::NonModular,
        };
        Self::with_weight(self.series.theta(), weight)
    }

    pub fn truncate(&self, prec: i64) -> ModularExpansion {
        Self::with_weight(self.series.truncate(prec), self.weight)
    }
}

impl fmt::Display for ModularExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.series.fmt(f)
    }
}
