//! Mechanical verification of `a_f(p^t) = 0 (mod p)` for weakly holomorphic
//! forms of weight `k <= 2`, together with the identities the argument
//! passes through.
//!
//! For a form `f` with `ord f > -p^t`, set `g = Theta(j)` and
//!
//! ```text
//! h = g^(p^t) * E_{p-1}^r * f            (p >= 5, 2 - k = r(p-1) + 2p^t)
//! h = g^(p^t) * E_4^c1 * E_6^c2 * f      (p = 2, 3, k + 2p^t + m = 2, 4c1 + 6c2 = m)
//! ```
//!
//! `h` has weight 2, so its constant term is exactly zero. Modulo `p`,
//! `g^(p^t) = (-1)^(p^t) q^(-p^t) + O(q^(p^t))` and the Eisenstein factor is
//! `1`, hence `0 = a_h(0) = (-1)^(p^t) a_f(p^t) (mod p)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;

use crate::arith::{self, Rational, Residue};
use crate::error::{Error, Result};
use crate::forms;
use crate::qseries::{ModularExpansion, QExpansion, Weight};
use crate::theta2::WeightTwoBasis;

/// Certified precision of `h` used when the caller does not ask for one.
pub const DEFAULT_H_PREC: i64 = 4;

/// How the weight is balanced against `g^(p^t)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    /// `p >= 5`, multiplier `E_{p-1}^r`.
    LargePrime { r: u64 },
    /// `p in {2, 3}`, multiplier `E_4^c1 E_6^c2` with `4c1 + 6c2 = m`.
    SmallPrime { m: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TheoremParams {
    p: u64,
    t: u32,
    branch: Branch,
    k: i64,
}

fn checked_power(p: u64, t: u32) -> Result<i64> {
    p.checked_pow(t)
        .and_then(|v| i64::try_from(v).ok())
        .filter(|&v| v <= 1 << 20)
        .ok_or_else(|| Error::InvalidParams(format!("{p}^{t} is too large")))
}

impl TheoremParams {
    /// `p >= 5`, `k = 2 - r(p-1) - 2p^t`.
    pub fn large_prime(p: u64, t: u32, r: u64) -> Result<Self> {
        if !arith::is_prime(p) || p < 5 {
            return Err(Error::InvalidParams(format!(
                "the E_(p-1) branch needs a prime p >= 5, got {p}"
            )));
        }
        if t == 0 {
            return Err(Error::InvalidParams("t must be positive".into()));
        }
        let pt = checked_power(p, t)?;
        let k = 2 - (r as i64) * (p as i64 - 1) - 2 * pt;
        Ok(TheoremParams { p, t, branch: Branch::LargePrime { r }, k })
    }

    /// `p in {2, 3}`, `k = 2 - 2p^t - m`, `m >= 4` even.
    pub fn small_prime(p: u64, t: u32, m: u64) -> Result<Self> {
        if p != 2 && p != 3 {
            return Err(Error::InvalidParams(format!(
                "the E_4/E_6 branch needs p = 2 or 3, got {p}"
            )));
        }
        if t == 0 {
            return Err(Error::InvalidParams("t must be positive".into()));
        }
        if m < 4 || !m.is_multiple_of(2) {
            return Err(Error::InvalidParams(format!("m must be even and at least 4, got {m}")));
        }
        let pt = checked_power(p, t)?;
        let k = 2 - 2 * pt - m as i64;
        Ok(TheoremParams { p, t, branch: Branch::SmallPrime { m }, k })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    /// The weight of the forms under test.
    pub fn k(&self) -> i64 {
        self.k
    }

    /// `p^t`.
    pub fn p_power(&self) -> i64 {
        self.p.pow(self.t) as i64
    }

    /// `(-1)^(p^t)`: the sign of the leading term of `g^(p^t)`.
    pub fn sign(&self) -> i64 {
        if self.p_power() % 2 == 0 { 1 } else { -1 }
    }

    /// Eisenstein factors `(weight, exponent)` of the multiplier.
    pub fn multiplier_factors(&self) -> Vec<(i64, u64)> {
        match self.branch {
            Branch::LargePrime { r } => alloc::vec![(self.p as i64 - 1, r)],
            Branch::SmallPrime { m } => {
                let (c1, c2) = small_prime_exponents(m);
                alloc::vec![(4, c1), (6, c2)]
            }
        }
    }
}

impl fmt::Display for TheoremParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.branch {
            Branch::LargePrime { r } => {
                write!(f, "p={} t={} r={} k={}", self.p, self.t, r, self.k)
            }
            Branch::SmallPrime { m } => {
                write!(f, "p={} t={} m={} k={}", self.p, self.t, m, self.k)
            }
        }
    }
}

/// Canonical `(c1, c2)` with `4c1 + 6c2 = m`, `c2 in {0, 1}`.
pub fn small_prime_exponents(m: u64) -> (u64, u64) {
    let c2 = if m % 4 == 2 { 1 } else { 0 };
    ((m - 6 * c2) / 4, c2)
}

/// Working precisions needed to certify `h` to `h_prec`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionPlan {
    pub h_prec: i64,
    pub f_prec: i64,
    pub multiplier_prec: i64,
    pub g_prec: i64,
}

impl PrecisionPlan {
    /// Derived from the product rule `prec(ab) = min(prec a + ord b, prec b + ord a)`
    /// with `ord g^(p^t) = -p^t`, `ord f >= -max_pole` and the power rule
    /// `prec(g^n) = prec(g) - (n - 1)`.
    pub fn new(p_power: i64, max_pole: i64, h_prec: i64) -> Self {
        let f_prec = h_prec + p_power;
        let multiplier_prec = f_prec + max_pole;
        let g_power_prec = (h_prec + max_pole).max(p_power);
        PrecisionPlan { h_prec, f_prec, multiplier_prec, g_prec: g_power_prec + p_power - 1 }
    }
}

/// Outcome of checking `g^(p^t) = (-1)^(p^t) q^(-p^t) + O(q^(p^t)) (mod p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GPowerCongruence {
    pub holds: bool,
    /// Lowest exponent in `[-p^t, p^t)` where the congruence fails.
    pub first_failure: Option<i64>,
}

fn g_power_congruence_of(g_power: &QExpansion, p: u64, p_power: i64) -> Result<GPowerCongruence> {
    if g_power.prec() < p_power {
        return Err(Error::OutOfPrecision { exponent: p_power - 1, prec: g_power.prec() });
    }
    let sign = if p_power % 2 == 0 { 1 } else { -1 };
    let lead = g_power.coeff(-p_power)?;
    if g_power.ord() != -p_power || lead != arith::rational(sign) {
        return Ok(GPowerCongruence { holds: false, first_failure: Some(-p_power) });
    }
    let rest = g_power
        .sub(&QExpansion::monomial(-p_power, lead, g_power.prec()))
        .truncate(p_power)
        .reduce_mod_p(p)?;
    let first_failure = rest.terms().next().map(|(n, _)| n);
    Ok(GPowerCongruence { holds: first_failure.is_none(), first_failure })
}

/// `g = Theta(j)` computed from `j` to precision `prec`, raised to `p^t` and
/// compared with `(-1)^(p^t) q^(-p^t)` modulo `p` on `[-p^t, p^t)`.
pub fn check_g_power_congruence(p: u64, t: u32, prec: i64) -> Result<GPowerCongruence> {
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let p_power = checked_power(p, t)?;
    let g = forms::j_series(prec).theta();
    g_power_congruence_of(&g.pow(p_power as u64), p, p_power)
}

/// Precomputed `g^(p^t)` and Eisenstein multiplier for one parameter tuple.
#[derive(Clone, Debug)]
pub struct AuxiliaryBuilder {
    params: TheoremParams,
    plan: PrecisionPlan,
    g_power: ModularExpansion,
    multiplier: ModularExpansion,
}

impl AuxiliaryBuilder {
    pub fn new(params: TheoremParams, plan: PrecisionPlan) -> Self {
        Self::with_factors(params, plan, &params.multiplier_factors())
            .expect("canonical multiplier has the right weight")
    }

    /// Uses the Eisenstein product `prod E_w^e` over `(w, e)` in `factors`
    /// instead of the canonical one. The product must have weight `2 - 2p^t - k`.
    pub fn with_factors(params: TheoremParams, plan: PrecisionPlan, factors: &[(i64, u64)]) -> Result<Self> {
        let needed = 2 - 2 * params.p_power() - params.k;
        let got: i64 = factors.iter().map(|&(w, e)| w * e as i64).sum();
        if got != needed {
            return Err(Error::WeightMismatch { expected: needed, found: Some(got) });
        }
        let g = forms::j_invariant(plan.g_prec).theta();
        let g_power = g.pow(params.p_power() as u64);
        let mut multiplier =
            ModularExpansion::new(QExpansion::one(plan.multiplier_prec), 0).expect("weight 0");
        for &(weight, exp) in factors {
            let e = forms::eisenstein(weight, plan.multiplier_prec)?;
            multiplier = multiplier.mul(&e.pow(exp));
        }
        Ok(AuxiliaryBuilder { params, plan, g_power, multiplier })
    }

    pub fn plan(&self) -> PrecisionPlan {
        self.plan
    }

    pub fn g_power(&self) -> &ModularExpansion {
        &self.g_power
    }

    pub fn g_congruence(&self) -> Result<GPowerCongruence> {
        g_power_congruence_of(&self.g_power.series, self.params.p, self.params.p_power())
    }

    /// `h = g^(p^t) * multiplier * f`, checked to be of weight exactly 2.
    pub fn build(&self, f: &ModularExpansion) -> Result<ModularExpansion> {
        let k = self.params.k;
        if f.weight() != Weight::Modular(k) {
            return Err(Error::WeightMismatch { expected: k, found: f.weight().value() });
        }
        let bound = self.params.p_power();
        if !f.series.is_zero() && f.ord() <= -bound {
            return Err(Error::PoleTooDeep { ord: f.ord(), bound });
        }
        if f.prec() < self.plan.f_prec {
            return Err(Error::OutOfPrecision { exponent: self.plan.f_prec - 1, prec: f.prec() });
        }
        let h = self.g_power.mul(&self.multiplier.mul(f));
        if h.weight() != Weight::Modular(2) {
            return Err(Error::WeightMismatch { expected: 2, found: h.weight().value() });
        }
        Ok(h.truncate(self.plan.h_prec))
    }
}

/// Builds the weight-2 form `h` attached to `f`, certified to `prec`.
pub fn build_h(params: &TheoremParams, f: &ModularExpansion, prec: i64) -> Result<ModularExpansion> {
    let max_pole = (-f.ord()).max(0);
    let plan = PrecisionPlan::new(params.p_power(), max_pole, prec);
    AuxiliaryBuilder::new(*params, plan).build(f)
}

/// Parameters of the companion congruence `a_f(p^v) = a_f(0) = 0 (mod p)`
/// for `2 - k = r(p-1) + s p^t`, `s != 2`, `ord f > -p^u`, `u <= v <= t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JmoParams {
    p: u64,
    r: u64,
    s: u64,
    t: u32,
    u: u32,
    k: i64,
}

impl JmoParams {
    pub fn new(p: u64, r: u64, s: u64, t: u32, u: u32) -> Result<Self> {
        if !arith::is_prime(p) || p < 5 {
            return Err(Error::InvalidParams(format!("p must be a prime >= 5, got {p}")));
        }
        if s == 2 {
            return Err(Error::InvalidParams(
                "s = 2 is excluded here; it is covered by the main congruence (verify without --jmo)"
                    .into(),
            ));
        }
        if s == 0 {
            return Err(Error::InvalidParams("s must be positive".into()));
        }
        if t == 0 {
            return Err(Error::InvalidParams("t must be positive".into()));
        }
        if u > t {
            return Err(Error::InvalidParams(format!("u = {u} exceeds t = {t}")));
        }
        let pt = checked_power(p, t)?;
        let k = 2 - (r as i64) * (p as i64 - 1) - (s as i64) * pt;
        if k % 2 != 0 {
            return Err(Error::InvalidParams(format!("weight k = {k} is odd")));
        }
        Ok(JmoParams { p, r, s, t, u, k })
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn r(&self) -> u64 {
        self.r
    }
    pub fn s(&self) -> u64 {
        self.s
    }
    pub fn t(&self) -> u32 {
        self.t
    }
    pub fn u(&self) -> u32 {
        self.u
    }
    pub fn k(&self) -> i64 {
        self.k
    }
}

/// Which statement a report verifies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReportParams {
    Main(TheoremParams),
    Jmo(JmoParams),
}

impl ReportParams {
    pub fn k(&self) -> i64 {
        match self {
            ReportParams::Main(p) => p.k(),
            ReportParams::Jmo(p) => p.k(),
        }
    }

    pub fn p(&self) -> u64 {
        match self {
            ReportParams::Main(p) => p.p(),
            ReportParams::Jmo(p) => p.p(),
        }
    }
}

/// Per-form result of a verification run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormRecord {
    /// Leading exponent of the basis member.
    pub ord: i64,
    /// The exponent `p^t` (or `p^v`) whose coefficient is checked.
    pub exponent: i64,
    pub coeff: Rational,
    pub residue: Option<Residue>,
    pub constant_term: Rational,
    pub constant_residue: Option<Residue>,
    /// Exact constant term of `h` (main congruence only).
    pub h_constant: Option<Rational>,
    /// `h = Theta(Q(j))` was reconstructed exactly.
    pub h_certified: Option<bool>,
    /// `a_h(0) = (-1)^(p^t) a_f(p^t) (mod p)` held.
    pub h_consistent: Option<bool>,
    pub g_congruence: Option<bool>,
    /// Why the form was not checked, e.g. a coefficient that is not p-integral.
    pub skipped: Option<String>,
}

impl FormRecord {
    fn skipped(ord: i64, exponent: i64, coeff: Rational, constant_term: Rational, why: String) -> Self {
        FormRecord {
            ord,
            exponent,
            coeff,
            residue: None,
            constant_term,
            constant_residue: None,
            h_constant: None,
            h_certified: None,
            h_consistent: None,
            g_congruence: None,
            skipped: Some(why),
        }
    }

    fn passes(&self, kind: ReportKind) -> bool {
        if self.skipped.is_some() {
            return true;
        }
        let residue_ok = self.residue.is_some_and(Residue::is_zero);
        match kind {
            ReportKind::Jmo => residue_ok && self.constant_residue.is_some_and(Residue::is_zero),
            _ => {
                residue_ok
                    && self.h_constant.as_ref().is_some_and(Zero::is_zero)
                    && self.h_certified == Some(true)
                    && self.h_consistent == Some(true)
                    && self.g_congruence == Some(true)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReportKind {
    /// `p >= 5` branch of the main congruence.
    LargePrime,
    /// `p in {2, 3}` branch of the main congruence.
    SmallPrime,
    /// The companion congruence with `s != 2`.
    Jmo,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceReport {
    pub kind: ReportKind,
    pub params: ReportParams,
    pub forms: Vec<FormRecord>,
    pub verdict: bool,
}

impl CongruenceReport {
    fn new(kind: ReportKind, params: ReportParams, forms: Vec<FormRecord>) -> Self {
        let verdict = forms.iter().all(|f| f.passes(kind));
        CongruenceReport { kind, params, forms, verdict }
    }

    pub fn failures(&self) -> impl Iterator<Item = &FormRecord> {
        self.forms.iter().filter(move |f| !f.passes(self.kind))
    }
}

fn p_integrality(f: &QExpansion, p: u64) -> Option<String> {
    match f.reduce_mod_p(p) {
        Ok(_) => None,
        Err(Error::DenominatorNotInvertible { exponent: Some(e), .. }) => {
            Some(format!("coefficient of q^{e} is not {p}-integral"))
        }
        Err(e) => Some(format!("{e}")),
    }
}

fn annotate(err: Error, ord: i64) -> Error {
    match err {
        Error::Domain(msg) => Error::Domain(format!("form with leading exponent {ord}: {msg}")),
        other => other,
    }
}

/// Runs the main congruence over the echelon basis of weight-`k` forms with
/// pole order below `p^t`. `h_prec` is the certified precision of each `h`.
pub fn verify_main_theorem(params: &TheoremParams, h_prec: Option<i64>) -> Result<CongruenceReport> {
    let p = params.p();
    let pt = params.p_power();
    let max_pole = pt - 1;
    let plan = PrecisionPlan::new(pt, max_pole, h_prec.unwrap_or(DEFAULT_H_PREC).max(1));
    let basis = forms::wh_basis(params.k(), max_pole as u64, plan.f_prec)?;
    let builder = AuxiliaryBuilder::new(*params, plan);
    let g_ok = builder.g_congruence()?.holds;
    let table = WeightTwoBasis::new((pt + max_pole) as u64, plan.h_prec);
    let kind = match params.branch() {
        Branch::LargePrime { .. } => ReportKind::LargePrime,
        Branch::SmallPrime { .. } => ReportKind::SmallPrime,
    };

    let mut records = Vec::with_capacity(basis.len());
    for f in &basis.members {
        let ord = f.ord();
        let coeff = f.coeff(pt)?;
        let constant_term = f.coeff(0)?;
        if let Some(why) = p_integrality(&f.series, p) {
            records.push(FormRecord::skipped(ord, pt, coeff, constant_term, why));
            continue;
        }
        let residue = arith::reduce_mod_prime(&coeff, p)?;
        let constant_residue = arith::reduce_mod_prime(&constant_term, p)?;
        let h = builder.build(f).map_err(|e| annotate(e, ord))?;
        let h_constant = h.coeff(0)?;
        let h_certified = table.certify(&h.series).is_ok();
        let predicted = Residue::new(params.sign(), p)?.mul(residue);
        let h_consistent = match arith::reduce_mod_prime(&h_constant, p) {
            Ok(r) => r == predicted,
            Err(_) => false,
        };
        records.push(FormRecord {
            ord,
            exponent: pt,
            coeff,
            residue: Some(residue),
            constant_term,
            constant_residue: Some(constant_residue),
            h_constant: Some(h_constant),
            h_certified: Some(h_certified),
            h_consistent: Some(h_consistent),
            g_congruence: Some(g_ok),
            skipped: None,
        });
    }
    Ok(CongruenceReport::new(kind, ReportParams::Main(*params), records))
}

/// Checks `a_f(p^v) = a_f(0) = 0 (mod p)` for `u <= v <= t` over the basis of
/// weight-`k` forms with `ord f > -p^u`.
pub fn verify_jmo(params: &JmoParams) -> Result<CongruenceReport> {
    let p = params.p();
    let pt = checked_power(p, params.t())?;
    let pu = checked_power(p, params.u())?;
    let basis = forms::wh_basis(params.k(), (pu - 1) as u64, pt + 1)?;
    let mut records = Vec::new();
    for f in &basis.members {
        let ord = f.ord();
        let constant_term = f.coeff(0)?;
        let skip = p_integrality(&f.series, p);
        for v in params.u()..=params.t() {
            let exponent = p.pow(v) as i64;
            let coeff = f.coeff(exponent)?;
            if let Some(why) = &skip {
                records.push(FormRecord::skipped(ord, exponent, coeff, constant_term.clone(), why.clone()));
                continue;
            }
            records.push(FormRecord {
                ord,
                exponent,
                residue: Some(arith::reduce_mod_prime(&coeff, p)?),
                coeff,
                constant_residue: Some(arith::reduce_mod_prime(&constant_term, p)?),
                constant_term: constant_term.clone(),
                h_constant: None,
                h_certified: None,
                h_consistent: None,
                g_congruence: None,
                skipped: None,
            });
        }
    }
    Ok(CongruenceReport::new(ReportKind::Jmo, ReportParams::Jmo(*params), records))
}

/// `E_{p-1} = 1 (mod p)` on every coefficient below `prec`.
pub fn check_eisenstein_mod_p(p: u64, prec: i64) -> Result<bool> {
    if !arith::is_prime(p) || p < 5 {
        return Err(Error::InvalidParams(format!("p must be a prime >= 5, got {p}")));
    }
    let e = forms::eisenstein_series(p as i64 - 1, prec)?.reduce_mod_p(p)?;
    Ok(e.terms().eq(core::iter::once((0, 1))))
}

/// `E_k = 1 (mod 24)` over the rationals whose denominators are prime to 6:
/// constant term 1, and every other coefficient `a/b` has `gcd(b, 6) = 1`
/// and `24 | a`. (`E_12` and friends carry denominators such as 691.)
pub fn check_eisenstein_mod_24(k: i64, prec: i64) -> Result<bool> {
    let e = forms::eisenstein_series(k, prec)?;
    if e.coeff(0)? != arith::rational(1) {
        return Ok(false);
    }
    let ok = e.terms().filter(|&(n, _)| n != 0).all(|(_, c)| {
        arith::reduce_integer(c.denom(), 2) != 0
            && arith::reduce_integer(c.denom(), 3) != 0
            && arith::reduce_integer(c.numer(), 24) == 0
    });
    Ok(ok)
}

/// `tau(p) mod p`; zero exactly when `p` is non-ordinary for `Delta`.
pub fn check_delta_nonordinary(p: u64, prec: i64) -> Result<Residue> {
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if prec <= p as i64 {
        return Err(Error::OutOfPrecision { exponent: p as i64, prec });
    }
    arith::reduce_mod_prime(&forms::delta(prec).coeff(p as i64)?, p)
}

/// Every main-congruence tuple with `p^t <= max_pt`: `r` in `0..=r_max` for
/// `p >= 5` and `m` from `m_values` for `p in {2, 3}`. Sorted.
pub fn main_theorem_sweep(primes: &[u64], max_pt: u64, r_max: u64, m_values: &[u64]) -> Result<Vec<TheoremParams>> {
    let mut out = Vec::new();
    for &p in primes {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let mut t = 1u32;
        while p.checked_pow(t).is_some_and(|pt| pt <= max_pt) {
            if p >= 5 {
                for r in 0..=r_max {
                    out.push(TheoremParams::large_prime(p, t, r)?);
                }
            } else {
                for &m in m_values {
                    out.push(TheoremParams::small_prime(p, t, m)?);
                }
            }
            t += 1;
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}
