//! Level-1 generators and echelon bases of holomorphic and weakly
//! holomorphic spaces.
//!
//! Constructors take the precision the caller wants and pad internally so
//! that divisions by powers of `Delta` never under-deliver.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{self, Rational};
use crate::error::{Error, Result};
use crate::qseries::{ModularExpansion, QExpansion};

/// `E_k` as a bare series.
pub(crate) fn eisenstein_series(k: i64, prec: i64) -> Result<QExpansion> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::InvalidWeight(k));
    }
    if prec <= 0 {
        return Ok(QExpansion::zero(prec));
    }
    let b = arith::bernoulli(k as usize);
    let factor = -Rational::from_integer(BigInt::from(2 * k)) / b;
    let mut coeffs = Vec::with_capacity(prec as usize);
    coeffs.push(Rational::one());
    for n in 1..prec {
        let s = arith::sigma((k - 1) as u32, n)?;
        coeffs.push(&factor * Rational::from_integer(s));
    }
    Ok(QExpansion::new(0, coeffs))
}

/// The normalized Eisenstein series `E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n`.
///
/// `E_2` is returned with non-modular weight metadata.
pub fn eisenstein(k: i64, prec: i64) -> Result<ModularExpansion> {
    let series = eisenstein_series(k, prec)?;
    if k == 2 {
        Ok(ModularExpansion::non_modular(series))
    } else {
        ModularExpansion::new(series, k)
    }
}

pub(crate) fn delta_series(prec: i64) -> QExpansion {
    let e4 = eisenstein_series(4, prec).expect("weight 4");
    let e6 = eisenstein_series(6, prec).expect("weight 6");
    e4.pow(3)
        .sub(&e6.pow(2))
        .scale(&Rational::new(BigInt::one(), BigInt::from(1728)))
}

/// `Delta = (E_4^3 - E_6^2) / 1728`.
pub fn delta(prec: i64) -> ModularExpansion {
    ModularExpansion::new(delta_series(prec), 12).expect("even weight")
}

/// `Delta = q prod_{n >= 1} (1 - q^n)^24`, expanded over machine-free integers
/// without going through the series type. Used only as a cross-check.
pub fn delta_eta(prec: i64) -> ModularExpansion {
    // coefficients of prod (1 - q^n)^24 below q^(prec - 1)
    let len = (prec - 1).max(0) as usize;
    let mut c = alloc::vec![BigInt::zero(); len];
    if len > 0 {
        c[0] = BigInt::one();
    }
    for n in 1..len {
        for _ in 0..24 {
            for i in (n..len).rev() {
                let t = c[i - n].clone();
                c[i] -= t;
            }
        }
    }
    let series = if len == 0 {
        QExpansion::zero(prec)
    } else {
        QExpansion::from_big_integers(1, c)
    };
    ModularExpansion::new(series, 12).expect("even weight")
}

pub(crate) fn j_series(prec: i64) -> QExpansion {
    let work = prec.max(0) + 2;
    let e4 = eisenstein_series(4, work).expect("weight 4");
    let inv = delta_series(work).inv().expect("Delta has leading coefficient 1");
    e4.pow(3).mul(&inv).truncate(prec)
}

/// `j = E_4^3 / Delta = q^-1 + 744 + 196884 q + ...`.
pub fn j_invariant(prec: i64) -> ModularExpansion {
    ModularExpansion::new(j_series(prec), 0).expect("even weight")
}

/// `Delta^-m` to precision `prec`.
pub(crate) fn delta_inverse_power(m: u64, prec: i64) -> QExpansion {
    if m == 0 {
        return QExpansion::one(prec);
    }
    let m = m as i64;
    // Delta^m has ord m; its inverse keeps length, so prec(inv) = prec(Delta^m) - 2m.
    let d = delta_series(prec + m + 1);
    d.pow(m as u64).inv().expect("unit leading coefficient").truncate(prec)
}

/// `E_14 / Delta = q^-1 - 24 - 196884 q + ...`.
pub(crate) fn e14_over_delta(prec: i64) -> QExpansion {
    let work = prec.max(0) + 2;
    let e14 = eisenstein_series(14, work).expect("weight 14");
    e14.mul(&delta_inverse_power(1, work)).truncate(prec)
}

/// `dim M_w` for even `w >= 0`.
pub fn holomorphic_dimension(w: i64) -> usize {
    if w < 0 || w % 2 != 0 {
        0
    } else if w % 12 == 2 {
        (w / 12) as usize
    } else {
        (w / 12) as usize + 1
    }
}

/// An echelonized basis: member `i` is `q^(e_i) + (terms at non-pivot exponents)`
/// with `e_0 < e_1 < ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisFamily {
    pub weight: i64,
    pub max_pole: u64,
    pub members: Vec<ModularExpansion>,
}

impl BasisFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Leading exponents of the members.
    pub fn pivots(&self) -> Vec<i64> {
        self.members.iter().map(|m| m.ord()).collect()
    }

    /// Subtracts multiples of the members from `f` to clear every pivot
    /// exponent. `f` lies in the span exactly when the remainder is zero.
    pub fn reduce(&self, f: &QExpansion) -> Result<QExpansion> {
        let mut r = f.clone();
        for m in &self.members {
            let e = m.ord();
            let c = r.coeff(e)?;
            if !c.is_zero() {
                r = r.sub(&m.series.scale(&c));
            }
        }
        Ok(r)
    }
}

/// Puts members with distinct, ascending leading exponents and unit leading
/// coefficients into reduced echelon form.
fn echelonize(mut members: Vec<QExpansion>) -> Result<Vec<QExpansion>> {
    for i in (0..members.len()).rev() {
        for l in i + 1..members.len() {
            let pivot = members[l].ord();
            let c = members[i].coeff(pivot)?;
            if !c.is_zero() {
                members[i] = members[i].sub(&members[l].scale(&c));
            }
        }
    }
    Ok(members)
}

/// Spanning forms `Delta^m E_4^a E_6^b` of `M_w`, one per order of vanishing.
fn miller_generators(w: i64, prec: i64) -> Vec<QExpansion> {
    let d = holomorphic_dimension(w);
    let e4 = eisenstein_series(4, prec).expect("weight 4");
    let e6 = eisenstein_series(6, prec).expect("weight 6");
    let delta = delta_series(prec);
    (0..d as i64)
        .map(|m| {
            let n = w - 12 * m;
            let b = (n / 2) % 2;
            let a = (n - 6 * b) / 4;
            let mut g = e4.pow(a as u64);
            if b == 1 {
                g = g.mul(&e6);
            }
            if m > 0 {
                g = g.mul(&delta.pow(m as u64));
            }
            g.truncate(prec)
        })
        .collect()
}

/// The reduced echelon basis `q^i + O(q^d)`, `i < d = dim M_w`, of the
/// holomorphic space `M_w`.
///
/// Members carry precision `max(prec, d)` so every pivot stays visible.
pub fn miller_basis(w: i64, prec: i64) -> Result<BasisFamily> {
    if w < 0 || w % 2 != 0 {
        return Err(Error::InvalidWeight(w));
    }
    let d = holomorphic_dimension(w) as i64;
    let work = prec.max(d);
    let members = echelonize(miller_generators(w, work))?;
    let members = members
        .into_iter()
        .map(|m| {
            if !m.is_integral() {
                return Err(Error::NonIntegral(alloc::format!(
                    "Miller basis member q^{} of weight {w}",
                    m.ord()
                )));
            }
            ModularExpansion::new(m, w)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BasisFamily { weight: w, max_pole: 0, members })
}

/// Exponent of `Delta` used to lift weight `k` forms with poles up to
/// `max_pole` into a holomorphic space.
pub fn lifting_exponent(k: i64, max_pole: u64) -> u64 {
    let floor = if k >= 0 { 0 } else { (-k + 11) / 12 };
    (max_pole as i64).max(floor) as u64
}

/// Echelon basis of `{ f in M_k^! : ord f >= -max_pole }`.
///
/// Computed as `miller_basis(k + 12M) / Delta^M` with `M` from
/// [`lifting_exponent`]; members with deeper poles are dropped and the rest
/// re-echelonized. Members carry precision at least one past the highest pivot.
pub fn wh_basis(k: i64, max_pole: u64, prec: i64) -> Result<BasisFamily> {
    if k % 2 != 0 {
        return Err(Error::InvalidWeight(k));
    }
    let m = lifting_exponent(k, max_pole);
    let w = k + 12 * m as i64;
    let d = holomorphic_dimension(w) as i64;
    let top_pivot = d - 1 - m as i64;
    let work = prec.max(top_pivot + 1);
    let lifted = miller_basis(w, work + m as i64)?;
    let inv = delta_inverse_power(m, work + 2 * m as i64);
    let members: Vec<QExpansion> = lifted
        .members
        .iter()
        .map(|g| g.series.mul(&inv).truncate(work))
        .filter(|f| f.ord() >= -(max_pole as i64))
        .collect();
    let members = echelonize(members)?
        .into_iter()
        .map(|f| ModularExpansion::new(f, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(BasisFamily { weight: k, max_pole, members })
}
