//! Weight-2 weakly holomorphic forms as derivatives of polynomials in `j`.
//!
//! Every `f` in `M_2^!` equals `P(j) E_14 / Delta` for a polynomial `P`, and
//! `E_14 / Delta = -Theta(j)`. With `Q' = -P` this gives `f = Theta(Q(j))`,
//! so the constant term of `f` vanishes. [`certify_constant_term`] carries out
//! that argument on an explicit q-expansion.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{self, Rational};
use crate::error::{Error, Result};
use crate::forms;
use crate::qseries::{ModularExpansion, QExpansion, Weight};

/// A polynomial in `j`; `coeffs[i]` multiplies `j^i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct JPolynomial {
    coeffs: Vec<Rational>,
}

impl JPolynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        JPolynomial { coeffs }
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| arith::rational(c)).collect())
    }

    pub fn zero() -> Self {
        JPolynomial { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn derivative(&self) -> JPolynomial {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn neg(&self) -> JPolynomial {
        JPolynomial { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl fmt::Display for JPolynomial {
    /// Highest degree first, in the variable `x`: `-x^3 + x`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            match (first, c.is_negative()) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            first = false;
            let mag = c.abs();
            let unit = mag.is_one();
            let mag = arith::format_rational(&mag);
            match (i, unit) {
                (0, _) => f.write_str(&mag)?,
                (1, true) => f.write_str("x")?,
                (1, false) => write!(f, "{mag}*x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{mag}*x^{i}")?,
            }
        }
        Ok(())
    }
}

/// `Q` with `Q' = -P` and `Q(0) = 0`.
pub fn antiderivative_in_j(p: &JPolynomial) -> JPolynomial {
    let mut coeffs = vec![Rational::zero()];
    coeffs.extend(
        p.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| -c / Rational::from_integer(BigInt::from(i + 1))),
    );
    JPolynomial::new(coeffs)
}

fn horner(p: &JPolynomial, j: &QExpansion) -> QExpansion {
    let Some(deg) = p.degree() else {
        return QExpansion::zero(j.prec());
    };
    let big = j.prec() + deg as i64;
    let mut acc = QExpansion::constant(p.coeffs[deg].clone(), big);
    for c in p.coeffs[..deg].iter().rev() {
        acc = acc.mul(j).add(&QExpansion::constant(c.clone(), big));
    }
    acc
}

/// `P(j)` as a weight-0 expansion.
pub fn eval_j_polynomial(p: &JPolynomial, prec: i64) -> ModularExpansion {
    let deg = p.degree().unwrap_or(0) as i64;
    let j = forms::j_series(prec + deg);
    let series = if p.is_zero() { QExpansion::zero(prec) } else { horner(p, &j).truncate(prec) };
    ModularExpansion::new(series, 0).expect("even weight")
}

/// Precomputed `j^m E_14 / Delta` for `m < max_pole`, shared across many
/// decompositions at one precision.
#[derive(Clone, Debug)]
pub struct WeightTwoBasis {
    prec: i64,
    j: QExpansion,
    table: Vec<QExpansion>,
}

impl WeightTwoBasis {
    /// Handles inputs with pole order at most `max_pole` and `prec` at most `prec`.
    pub fn new(max_pole: u64, prec: i64) -> Self {
        let work = prec + max_pole as i64;
        let j = forms::j_series(work);
        let mut table = Vec::with_capacity(max_pole as usize);
        let mut current = forms::e14_over_delta(work);
        for _ in 0..max_pole {
            let next = current.mul(&j);
            table.push(current);
            current = next;
        }
        WeightTwoBasis { prec, j, table }
    }

    pub fn max_pole(&self) -> u64 {
        self.table.len() as u64
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    fn check_input(&self, f: &QExpansion) -> Result<()> {
        if f.prec() < 1 {
            return Err(Error::OutOfPrecision { exponent: 0, prec: f.prec() });
        }
        if f.prec() > self.prec {
            return Err(Error::Domain(alloc::format!(
                "series known to O(q^{}) but the decomposition table only reaches O(q^{})",
                f.prec(),
                self.prec
            )));
        }
        if !f.is_zero() && -f.ord() > self.max_pole() as i64 {
            return Err(Error::Domain(alloc::format!(
                "pole of order {} exceeds the table bound {}",
                -f.ord(),
                self.max_pole()
            )));
        }
        Ok(())
    }

    /// Finds `P` with `f = P(j) E_14 / Delta` by clearing the pole from the
    /// deepest term up; the remainder must then vanish to `prec(f)`.
    pub fn decompose(&self, f: &QExpansion) -> Result<JPolynomial> {
        self.check_input(f)?;
        if f.is_zero() {
            return Ok(JPolynomial::zero());
        }
        let pole = -f.ord();
        if pole < 1 {
            return Err(Error::NotInSpan { exponent: f.ord() });
        }
        let mut coeffs = vec![Rational::zero(); pole as usize];
        let mut rest = f.clone();
        for e in -pole..0 {
            let c = rest.coeff(e)?;
            if c.is_zero() {
                continue;
            }
            let m = (-e - 1) as usize;
            rest = rest.sub(&self.table[m].scale(&c));
            coeffs[m] = c;
        }
        if !rest.is_zero() {
            return Err(Error::NotInSpan { exponent: rest.ord() });
        }
        Ok(JPolynomial::new(coeffs))
    }

    /// `Q(j)` with this table's copy of `j`.
    pub fn eval(&self, q: &JPolynomial, prec: i64) -> QExpansion {
        horner(q, &self.j).truncate(prec)
    }

    /// See [`certify_constant_term`].
    pub fn certify(&self, f: &QExpansion) -> Result<Certificate> {
        let p = self.decompose(f)?;
        let q = antiderivative_in_j(&p);
        let rebuilt = self.eval(&q, f.prec()).theta();
        if rebuilt.prec() < f.prec() || rebuilt != *f {
            let diff = rebuilt.sub(f);
            return Err(Error::NotInSpan { exponent: diff.ord() });
        }
        let constant_term = f.coeff(0)?;
        if !constant_term.is_zero() {
            return Err(Error::ConstantTermNonzero);
        }
        Ok(Certificate { p, q, constant_term })
    }
}

fn require_weight_two(f: &ModularExpansion) -> Result<()> {
    match f.weight() {
        Weight::Modular(2) => Ok(()),
        other => Err(Error::WeightMismatch { expected: 2, found: other.value() }),
    }
}

/// `P` with `f = P(j) E_14 / Delta` to the precision of `f`.
pub fn decompose_weight2(f: &ModularExpansion) -> Result<JPolynomial> {
    require_weight_two(f)?;
    let pole = (-f.ord()).max(0) as u64;
    WeightTwoBasis::new(pole, f.prec().max(1)).decompose(&f.series)
}

/// Witness that a weight-2 form is `Theta(Q(j))` and has zero constant term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    /// `f = P(j) E_14 / Delta`.
    pub p: JPolynomial,
    /// `f = Theta(Q(j))`, `Q' = -P`.
    pub q: JPolynomial,
    /// The exact constant coefficient of `f`; always zero on success.
    pub constant_term: Rational,
}

/// Decomposes `f`, integrates in `j`, checks `Theta(Q(j)) = f` on every known
/// coefficient and reads off the constant term, which must be exactly zero.
pub fn certify_constant_term(f: &ModularExpansion) -> Result<Certificate> {
    require_weight_two(f)?;
    let pole = (-f.ord()).max(0) as u64;
    WeightTwoBasis::new(pole, f.prec().max(1)).certify(&f.series)
}
