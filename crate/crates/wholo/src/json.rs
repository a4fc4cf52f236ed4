//! JSON encodings of series, bases and verification reports.
//!
//! Series keep `ord` and `prec` as JSON integers; coefficients and every
//! number in a report are decimal strings, since coefficients outgrow any
//! fixed-width type.

use serde::Serialize;
use wholo_core::arith::format_rational;
use wholo_core::congruence::{Branch, FormRecord, ReportKind, ReportParams};
use wholo_core::forms::BasisFamily;
use wholo_core::{CongruenceReport, QExpansion, ResidueSeries};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesJson {
    pub ord: i64,
    pub prec: i64,
    pub coeffs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
}

impl SeriesJson {
    pub fn from_series(f: &QExpansion) -> Self {
        SeriesJson {
            ord: f.ord(),
            prec: f.prec(),
            coeffs: f.coeffs().iter().map(format_rational).collect(),
            modulus: None,
            weight: None,
        }
    }

    /// Residues are written as their representatives in `[0, p)`.
    pub fn from_residues(f: &ResidueSeries) -> Self {
        SeriesJson {
            ord: f.ord(),
            prec: f.prec(),
            coeffs: f.coeffs().iter().map(u64::to_string).collect(),
            modulus: Some(f.modulus().to_string()),
            weight: None,
        }
    }

    pub fn with_weight(mut self, weight: impl ToString) -> Self {
        self.weight = Some(weight.to_string());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasisJson {
    pub weight: String,
    pub max_pole: String,
    pub members: Vec<SeriesJson>,
}

impl BasisJson {
    /// With `modulus`, members are reduced first and reduction errors propagate.
    pub fn new(basis: &BasisFamily, modulus: Option<u64>) -> wholo_core::Result<Self> {
        let members = basis
            .members
            .iter()
            .map(|m| match modulus {
                Some(p) => m.series.reduce_mod_p(p).map(|r| SeriesJson::from_residues(&r)),
                None => Ok(SeriesJson::from_series(&m.series)),
            })
            .collect::<wholo_core::Result<_>>()?;
        Ok(BasisJson { weight: basis.weight.to_string(), max_pole: basis.max_pole.to_string(), members })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormJson {
    pub ord: String,
    pub exponent: String,
    pub coeff_pt: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residue: Option<String>,
    pub a0: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a0_residue: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_const: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_certified: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_consistent: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_congruence: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

impl From<&FormRecord> for FormJson {
    fn from(r: &FormRecord) -> Self {
        FormJson {
            ord: r.ord.to_string(),
            exponent: r.exponent.to_string(),
            coeff_pt: format_rational(&r.coeff),
            residue: r.residue.map(|x| x.to_string()),
            a0: format_rational(&r.constant_term),
            a0_residue: r.constant_residue.map(|x| x.to_string()),
            h_const: r.h_constant.as_ref().map(format_rational),
            h_certified: r.h_certified,
            h_consistent: r.h_consistent,
            g_congruence: r.g_congruence,
            skipped: r.skipped.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportJson {
    pub theorem: &'static str,
    pub p: String,
    pub t: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<String>,
    pub k: String,
    pub forms: Vec<FormJson>,
    pub verdict: &'static str,
}

/// Wire label of the statement a report checks.
pub fn theorem_label(kind: ReportKind) -> &'static str {
    match kind {
        ReportKind::LargePrime => "1.1(1)",
        ReportKind::SmallPrime => "1.1(2)",
        ReportKind::Jmo => "jmo",
    }
}

impl From<&CongruenceReport> for ReportJson {
    fn from(rep: &CongruenceReport) -> Self {
        let (t, r, m, s, u) = match rep.params {
            ReportParams::Main(p) => {
                let (r, m) = match p.branch() {
                    Branch::LargePrime { r } => (Some(r), None),
                    Branch::SmallPrime { m } => (None, Some(m)),
                };
                (p.t(), r, m, None, None)
            }
            ReportParams::Jmo(p) => (p.t(), Some(p.r()), None, Some(p.s()), Some(p.u())),
        };
        let s_opt = |x: Option<u64>| x.map(|v| v.to_string());
        ReportJson {
            theorem: theorem_label(rep.kind),
            p: rep.params.p().to_string(),
            t: t.to_string(),
            r: s_opt(r),
            m: s_opt(m),
            s: s_opt(s),
            u: u.map(|v| v.to_string()),
            k: rep.params.k().to_string(),
            forms: rep.forms.iter().map(FormJson::from).collect(),
            verdict: if rep.verdict { "pass" } else { "fail" },
        }
    }
}

pub fn to_line<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data serializes")
}
