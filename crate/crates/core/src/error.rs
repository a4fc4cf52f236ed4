use alloc::string::String;
use core::fmt;

/// Failures raised by the arithmetic, series and verification layers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// A rational's denominator is divisible by the modulus.
    DenominatorNotInvertible {
        modulus: u64,
        /// Exponent of the offending q-series coefficient, when reducing a series.
        exponent: Option<i64>,
    },
    NotPrime(u64),
    /// An argument was outside the domain of the operation.
    Domain(String),
    /// Tried to invert a series whose leading coefficient is unknown or zero.
    ZeroLeadingCoefficient,
    /// Asked for a coefficient at or beyond the certified precision.
    OutOfPrecision { exponent: i64, prec: i64 },
    /// An even weight was required.
    InvalidWeight(i64),
    WeightMismatch { expected: i64, found: Option<i64> },
    /// A weight-2 decomposition left a nonzero remainder.
    NotInSpan { exponent: i64 },
    /// The constant term of a weight-2 form came out nonzero.
    ConstantTermNonzero,
    /// `ord_f` is at or below `-p^t`.
    PoleTooDeep { ord: i64, bound: i64 },
    InvalidParams(String),
    /// A result that must be integral was not.
    NonIntegral(String),
}

impl Error {
    /// True for errors caused by bad caller parameters rather than arithmetic.
    pub fn is_parameter_error(&self) -> bool {
        matches!(
            self,
            Error::NotPrime(_)
                | Error::Domain(_)
                | Error::InvalidWeight(_)
                | Error::WeightMismatch { .. }
                | Error::InvalidParams(_)
                | Error::PoleTooDeep { .. }
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DenominatorNotInvertible { modulus, exponent: Some(e) } => write!(
                f,
                "coefficient of q^{e} has a denominator divisible by {modulus}"
            ),
            Error::DenominatorNotInvertible { modulus, exponent: None } => {
                write!(f, "denominator is divisible by {modulus}")
            }
            Error::NotPrime(n) => write!(f, "{n} is not prime"),
            Error::Domain(msg) => f.write_str(msg),
            Error::ZeroLeadingCoefficient => {
                f.write_str("cannot invert a series that is zero to its precision")
            }
            Error::OutOfPrecision { exponent, prec } => write!(
                f,
                "coefficient of q^{exponent} requested but the series is only known to O(q^{prec})"
            ),
            Error::InvalidWeight(k) => write!(f, "weight {k} is not an admissible even weight"),
            Error::WeightMismatch { expected, found: Some(k) } => {
                write!(f, "expected weight {expected}, found {k}")
            }
            Error::WeightMismatch { expected, found: None } => {
                write!(f, "expected weight {expected}, found a non-modular expression")
            }
            Error::NotInSpan { exponent } => write!(
                f,
                "series is not of the form P(j)*E14/Delta: remainder is nonzero at q^{exponent}"
            ),
            Error::ConstantTermNonzero => f.write_str("weight-2 form has a nonzero constant term"),
            Error::PoleTooDeep { ord, bound } => {
                write!(f, "order at infinity {ord} is not greater than -{bound}")
            }
            Error::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
            Error::NonIntegral(msg) => write!(f, "non-integral result: {msg}"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
