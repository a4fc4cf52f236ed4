//! Textual modular-form expressions such as `E4^3/Delta - j` or `Theta(j)^5`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | atom ('^' '-'? int)?
//! atom   := 'E' evenint | 'Delta' | 'j' | 'Theta' '(' expr ')' | '(' expr ')' | int
//! ```
//!
//! There is no implicit multiplication.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::forms;
use crate::qseries::{ModularExpansion, QExpansion, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    /// `E_k`, `k` even and at least 2.
    Eisenstein(u32),
    Delta,
    J,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FormExpr {
    Generator(Generator),
    /// Non-negative integer literal, a weight-0 constant.
    Int(BigInt),
    Neg(Box<FormExpr>),
    Add(Box<FormExpr>, Box<FormExpr>),
    Sub(Box<FormExpr>, Box<FormExpr>),
    Mul(Box<FormExpr>, Box<FormExpr>),
    Div(Box<FormExpr>, Box<FormExpr>),
    Pow(Box<FormExpr>, i64),
    Theta(Box<FormExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseError {
    Syntax {
        /// Byte offset of the offending token (input length at end of input).
        offset: usize,
        expected: Vec<&'static str>,
        found: String,
    },
    UnknownGenerator { offset: usize, name: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownGenerator { offset, .. } => *offset,
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax { offset, expected, found } => {
                write!(
                    f,
                    "syntax error at offset {offset} (column {}): expected {}, found {found}",
                    offset + 1,
                    expected.join(" or ")
                )
            }
            ParseError::UnknownGenerator { offset, name } => write!(
                f,
                "unknown generator `{name}` at offset {offset} (column {}); \
                 expected E<even k >= 2>, Delta, j or Theta",
                offset + 1
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> core::result::Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = text[start..i].parse().expect("ascii digits");
                out.push((Tok::Int(n), start));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().expect("non-empty");
                return Err(ParseError::Syntax {
                    offset: start,
                    expected: vec!["an operator, parenthesis, integer or generator"],
                    found: format!("`{ch}`"),
                });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

const ATOM_START: &[&str] = &["`-`", "`(`", "integer", "generator"];

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&'static str]) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            expected: expected.to_vec(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, tok: Tok, name: &'static str) -> core::result::Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[name]))
        }
    }

    fn expr(&mut self) -> core::result::Result<FormExpr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = FormExpr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = FormExpr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> core::result::Result<FormExpr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = FormExpr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = FormExpr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> core::result::Result<FormExpr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(FormExpr::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let offset = self.offset();
        let Tok::Int(n) = self.peek().clone() else {
            return Err(self.error(&["integer exponent"]));
        };
        let n = i64::try_from(n).map_err(|_| ParseError::Syntax {
            offset,
            expected: vec!["exponent that fits in 64 bits"],
            found: self.peek().describe(),
        })?;
        self.bump();
        Ok(FormExpr::Pow(Box::new(base), if negative { -n } else { n }))
    }

    fn atom(&mut self) -> core::result::Result<FormExpr, ParseError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(FormExpr::Int(n))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "Delta" => Ok(FormExpr::Generator(Generator::Delta)),
                    "j" => Ok(FormExpr::Generator(Generator::J)),
                    "Theta" => {
                        self.expect(Tok::LParen, "`(`")?;
                        let inner = self.expr()?;
                        self.expect(Tok::RParen, "`)`")?;
                        Ok(FormExpr::Theta(Box::new(inner)))
                    }
                    _ => eisenstein_weight(&name)
                        .map(|k| FormExpr::Generator(Generator::Eisenstein(k)))
                        .ok_or(ParseError::UnknownGenerator { offset, name }),
                }
            }
            _ => Err(self.error(ATOM_START)),
        }
    }
}

fn eisenstein_weight(name: &str) -> Option<u32> {
    let digits = name.strip_prefix('E')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let k: u32 = digits.parse().ok()?;
    (k >= 2 && k.is_multiple_of(2)).then_some(k)
}

/// Parses an expression; whitespace is ignored.
pub fn parse(text: &str) -> core::result::Result<FormExpr, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error(&["`+`", "`-`", "`*`", "`/`", "`^`", "end of input"]));
    }
    Ok(e)
}

impl FormExpr {
    fn level(&self) -> u8 {
        match self {
            FormExpr::Add(..) | FormExpr::Sub(..) => 1,
            FormExpr::Mul(..) | FormExpr::Div(..) => 2,
            FormExpr::Neg(_) | FormExpr::Pow(..) => 3,
            FormExpr::Generator(_) | FormExpr::Int(_) | FormExpr::Theta(_) => 4,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min_level: u8) -> fmt::Result {
        if self.level() < min_level {
            f.write_str("(")?;
            self.write_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            FormExpr::Generator(Generator::Eisenstein(k)) => write!(f, "E{k}"),
            FormExpr::Generator(Generator::Delta) => f.write_str("Delta"),
            FormExpr::Generator(Generator::J) => f.write_str("j"),
            FormExpr::Int(n) => write!(f, "{n}"),
            FormExpr::Neg(a) => {
                f.write_str("-")?;
                a.write_at(f, 3)
            }
            FormExpr::Add(a, b) | FormExpr::Sub(a, b) => {
                a.write_at(f, 1)?;
                f.write_str(if matches!(self, FormExpr::Add(..)) { " + " } else { " - " })?;
                b.write_at(f, 2)
            }
            FormExpr::Mul(a, b) | FormExpr::Div(a, b) => {
                a.write_at(f, 2)?;
                f.write_str(if matches!(self, FormExpr::Mul(..)) { " * " } else { " / " })?;
                b.write_at(f, 3)
            }
            FormExpr::Pow(a, n) => {
                a.write_at(f, 4)?;
                write!(f, "^{n}")
            }
            FormExpr::Theta(a) => {
                f.write_str("Theta(")?;
                a.write_at(f, 0)?;
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for FormExpr {
    /// Canonical rendering; `parse(e.to_string()) == e`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

pub fn render(e: &FormExpr) -> String {
    e.to_string()
}

/// Inferred weight plus the reasons modularity was lost, if it was.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightReport {
    pub weight: Weight,
    pub diagnostics: Vec<String>,
}

pub fn infer_weight(e: &FormExpr) -> WeightReport {
    let mut diagnostics = Vec::new();
    let weight = infer(e, &mut diagnostics);
    WeightReport { weight, diagnostics }
}

fn infer(e: &FormExpr, diag: &mut Vec<String>) -> Weight {
    use Weight::{Modular, NonModular};
    match e {
        FormExpr::Generator(Generator::Eisenstein(2)) => {
            diag.push("E2 is not a modular form".into());
            NonModular
        }
        FormExpr::Generator(Generator::Eisenstein(k)) => Modular(*k as i64),
        FormExpr::Generator(Generator::Delta) => Modular(12),
        FormExpr::Generator(Generator::J) | FormExpr::Int(_) => Modular(0),
        FormExpr::Neg(a) => infer(a, diag),
        FormExpr::Add(a, b) | FormExpr::Sub(a, b) => match (infer(a, diag), infer(b, diag)) {
            (Modular(x), Modular(y)) if x == y => Modular(x),
            (Modular(x), Modular(y)) => {
                diag.push(format!("weight mismatch: `{a}` has weight {x} but `{b}` has weight {y}"));
                NonModular
            }
            _ => NonModular,
        },
        FormExpr::Mul(a, b) => match (infer(a, diag), infer(b, diag)) {
            (Modular(x), Modular(y)) => Modular(x + y),
            _ => NonModular,
        },
        FormExpr::Div(a, b) => match (infer(a, diag), infer(b, diag)) {
            (Modular(x), Modular(y)) => Modular(x - y),
            _ => NonModular,
        },
        FormExpr::Pow(a, n) => match infer(a, diag) {
            Modular(x) => Modular(x * n),
            NonModular => NonModular,
        },
        FormExpr::Theta(a) => match infer(a, diag) {
            Modular(0) => Modular(2),
            Modular(k) => {
                diag.push(format!("Theta of a weight-{k} form is not modular"));
                NonModular
            }
            NonModular => NonModular,
        },
    }
}

/// Static guess of `(ord, prec)` when every leaf is computed to `work`.
fn estimate(e: &FormExpr, work: i64) -> (i64, i64) {
    match e {
        FormExpr::Generator(Generator::Delta) => (1, work),
        FormExpr::Generator(Generator::J) => (-1, work),
        FormExpr::Generator(Generator::Eisenstein(_)) | FormExpr::Int(_) => (0, work),
        FormExpr::Neg(a) | FormExpr::Theta(a) => estimate(a, work),
        FormExpr::Add(a, b) | FormExpr::Sub(a, b) => {
            let (oa, pa) = estimate(a, work);
            let (ob, pb) = estimate(b, work);
            (oa.min(ob), pa.min(pb))
        }
        FormExpr::Mul(a, b) | FormExpr::Div(a, b) => {
            let (oa, pa) = estimate(a, work);
            let (mut ob, mut pb) = estimate(b, work);
            if matches!(e, FormExpr::Div(..)) {
                pb -= 2 * ob;
                ob = -ob;
            }
            (oa + ob, (pa + ob).min(pb + oa))
        }
        FormExpr::Pow(a, n) => {
            let (mut o, mut p) = estimate(a, work);
            if *n < 0 {
                p -= 2 * o;
                o = -o;
            }
            let n = n.unsigned_abs() as i64;
            (n * o, n * o + (p - o))
        }
    }
}

fn eval_at(e: &FormExpr, work: i64) -> Result<ModularExpansion> {
    Ok(match e {
        FormExpr::Generator(Generator::Eisenstein(k)) => forms::eisenstein(*k as i64, work)?,
        FormExpr::Generator(Generator::Delta) => forms::delta(work),
        FormExpr::Generator(Generator::J) => forms::j_invariant(work),
        FormExpr::Int(n) => {
            ModularExpansion::new(QExpansion::constant(Rational::from_integer(n.clone()), work), 0)?
        }
        FormExpr::Neg(a) => eval_at(a, work)?.neg(),
        FormExpr::Add(a, b) => eval_at(a, work)?.add(&eval_at(b, work)?),
        FormExpr::Sub(a, b) => eval_at(a, work)?.sub(&eval_at(b, work)?),
        FormExpr::Mul(a, b) => eval_at(a, work)?.mul(&eval_at(b, work)?),
        FormExpr::Div(a, b) => eval_at(a, work)?.mul(&eval_at(b, work)?.inv()?),
        FormExpr::Pow(a, n) => {
            let base = eval_at(a, work)?;
            let base = if *n < 0 { base.inv()? } else { base };
            base.pow(n.unsigned_abs())
        }
        FormExpr::Theta(a) => eval_at(a, work)?.theta(),
    })
}

/// Evaluates `e` with every coefficient below `q^prec` certified.
///
/// Leaves are computed at `prec` plus a pad predicted from the pole
/// structure; if cancellation makes that insufficient, the pad grows and
/// the evaluation is repeated.
pub fn evaluate(e: &FormExpr, prec: i64) -> Result<ModularExpansion> {
    let loss = -estimate(e, 0).1;
    let mut pad = loss.max(0);
    for _ in 0..8 {
        let value = eval_at(e, prec + pad)?;
        if value.prec() >= prec {
            return Ok(value.truncate(prec));
        }
        pad = 2 * pad + (prec - value.prec()) + 1;
    }
    Err(Error::Domain(format!(
        "could not reach precision {prec} for `{e}`; the expression loses precision without bound"
    )))
}
