//! Exact q-expansion arithmetic for level-1 weakly holomorphic modular forms
//! and a verifier for the congruence `a_f(p^t) = 0 (mod p)` on forms of
//! weight `k = 2 - r(p-1) - 2p^t` (and its `p = 2, 3` analogue).
//!
//! Everything here is pure and allocation-only; the crate is `no_std`.
//! File formats, the command line and parallel sweeps live in the `wholo`
//! crate.

#![cfg_attr(not(test), no_std)]
extern crate alloc;

pub mod arith;
pub mod congruence;
pub mod error;
pub mod expr;
pub mod forms;
pub mod qseries;
pub mod theta2;

pub use arith::{Integer, Rational, Residue};
pub use congruence::{CongruenceReport, JmoParams, TheoremParams};
pub use error::{Error, Result};
pub use expr::{FormExpr, ParseError};
pub use forms::BasisFamily;
pub use qseries::{ModularExpansion, QExpansion, ResidueSeries, Weight};
pub use theta2::JPolynomial;
