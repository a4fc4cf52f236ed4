//! Argument parsing, command dispatch and exit codes.

use std::collections::HashSet;
use std::ffi::OsString;
use std::fmt::Display;
use std::io::Write;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use wholo_core::arith::{self, format_rational};
use wholo_core::congruence::{self, main_theorem_sweep, FormRecord, ReportParams};
use wholo_core::expr::{evaluate, parse};
use wholo_core::theta2::certify_constant_term;
use wholo_core::{forms, CongruenceReport, Error, JmoParams, ParseError, TheoremParams};

use crate::json::{to_line, BasisJson, ReportJson, SeriesJson};
use crate::sweep::{run_all, Task};

pub const DEFAULT_PREC: i64 = 20;

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Exit {
    Success = 0,
    VerdictFail = 1,
    Parse = 2,
    Arithmetic = 3,
    InvalidParams = 4,
}

impl Exit {
    fn of(err: &Error) -> Exit {
        if err.is_parameter_error() {
            Exit::InvalidParams
        } else {
            Exit::Arithmetic
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "wholo", version, about = "Exact q-expansions and congruence checks for level-1 modular forms")]
struct Cli {
    /// Number of certified coefficients (`O(q^N)`); for `verify`, the precision to which each h is certified
    #[arg(long, global = true, env = "WHOLO_DEFAULT_PREC", value_parser = clap::value_parser!(i64).range(1..))]
    prec: Option<i64>,

    /// Emit JSON, one object per line
    #[arg(long, global = true)]
    json: bool,

    /// Reduce coefficients modulo this prime (`expand`, `basis`)
    #[arg(long = "mod", global = true, value_name = "P")]
    modulus: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the q-expansion of an expression such as `E4/Delta`
    Expand {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// List the echelon basis of weight-k forms with pole order at most N
    Basis {
        #[arg(long, allow_negative_numbers = true)]
        weight: i64,
        #[arg(long, default_value_t = 0)]
        max_pole: u64,
    },
    /// Verify the coefficient congruence for one tuple, a list, or a sweep
    Verify(VerifyArgs),
    /// Write a weight-2 form as Theta(Q(j)) and certify its constant term
    ThetaDecompose {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Check E_(p-1) = 1 (mod p) and E_k = 1 (mod 24)
    EisensteinCheck {
        /// Primes p >= 5 for the mod-p check
        #[arg(long, value_delimiter = ',')]
        p: Vec<u64>,
        /// Even weights k >= 2 for the mod-24 check
        #[arg(long, value_delimiter = ',')]
        k: Vec<i64>,
    },
    /// Report tau(p) mod p for each prime
    Nonordinary {
        #[arg(long, value_delimiter = ',', default_values_t = [2, 3, 5, 7, 11])]
        p: Vec<u64>,
    },
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Primes (comma separated)
    #[arg(long, value_delimiter = ',')]
    p: Vec<u64>,
    #[arg(long, conflicts_with = "sweep")]
    t: Option<u32>,
    /// Exponent of E_(p-1) for p >= 5 (comma separated)
    #[arg(long, value_delimiter = ',', conflicts_with = "sweep")]
    r: Vec<u64>,
    /// Weight of the E_4/E_6 multiplier for p = 2, 3 (comma separated)
    #[arg(long, value_delimiter = ',')]
    m: Vec<u64>,
    /// Check the companion congruence with 2 - k = r(p-1) + s p^t, s != 2
    #[arg(long, conflicts_with = "sweep")]
    jmo: bool,
    #[arg(long, requires = "jmo")]
    s: Option<u64>,
    #[arg(long, requires = "jmo")]
    u: Option<u32>,
    /// Run every tuple with p^t <= --max-pt
    #[arg(long)]
    sweep: bool,
    #[arg(long, requires = "sweep", default_value_t = 30)]
    max_pt: u64,
    #[arg(long, requires = "sweep", default_value_t = 3)]
    r_max: u64,
}

/// A failure that ends the command.
struct Failure {
    exit: Exit,
    message: String,
}

impl Failure {
    fn params(message: impl Display) -> Self {
        Failure { exit: Exit::InvalidParams, message: message.to_string() }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure { exit: Exit::of(&err), message: err.to_string() }
    }
}

type CmdResult = Result<Exit, Failure>;

struct Ctx<'a, W: Write> {
    out: &'a mut W,
    json: bool,
}

impl<W: Write> Ctx<'_, W> {
    fn line(&mut self, text: impl Display) {
        // a closed pipe is not worth a panic
        let _ = writeln!(self.out, "{text}");
    }

    fn emit<T: Serialize>(&mut self, value: &T) {
        self.line(to_line(value));
    }
}

/// Runs the command line in `args` and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    Exit::Success as i32
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    Exit::InvalidParams as i32
                }
            };
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code as i32,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.exit as i32
        }
    }
}

fn dispatch(cli: Cli, out: &mut impl Write, err: &mut impl Write) -> CmdResult {
    if let Some(p) = cli.modulus {
        if !arith::is_prime(p) {
            return Err(Failure::params(format!("--mod {p}: {p} is not prime")));
        }
        if !matches!(cli.command, Command::Expand { .. } | Command::Basis { .. }) {
            return Err(Failure::params("--mod applies only to `expand` and `basis`"));
        }
    }
    let prec = cli.prec.unwrap_or(DEFAULT_PREC);
    let mut ctx = Ctx { out, json: cli.json };
    match cli.command {
        Command::Expand { expr } => expand(&mut ctx, err, &expr, prec, cli.modulus),
        Command::Basis { weight, max_pole } => basis(&mut ctx, weight, max_pole, prec, cli.modulus),
        Command::Verify(args) => verify(&mut ctx, err, &args, cli.prec),
        Command::ThetaDecompose { expr } => theta_decompose(&mut ctx, err, &expr, prec),
        Command::EisensteinCheck { p, k } => eisenstein_check(&mut ctx, &p, &k, prec),
        Command::Nonordinary { p } => nonordinary(&mut ctx, &p),
    }
}

fn parse_or_report(text: &str, err: &mut impl Write) -> Result<wholo_core::FormExpr, Failure> {
    parse(text).map_err(|e: ParseError| {
        let _ = writeln!(err, "  {text}\n  {}^", " ".repeat(text[..e.offset().min(text.len())].chars().count()));
        Failure { exit: Exit::Parse, message: e.to_string() }
    })
}

fn expand(ctx: &mut Ctx<'_, impl Write>, err: &mut impl Write, text: &str, prec: i64, modulus: Option<u64>) -> CmdResult {
    let e = parse_or_report(text, err)?;
    let f = evaluate(&e, prec)?;
    match modulus {
        Some(p) => {
            let r = f.series.reduce_mod_p(p)?;
            if ctx.json {
                ctx.emit(&SeriesJson::from_residues(&r).with_weight(f.weight()));
            } else {
                ctx.line(&r);
                ctx.line(format_args!("weight: {}", f.weight()));
            }
        }
        None => {
            if ctx.json {
                ctx.emit(&SeriesJson::from_series(&f.series).with_weight(f.weight()));
            } else {
                ctx.line(&f.series);
                ctx.line(format_args!("weight: {}", f.weight()));
            }
        }
    }
    Ok(Exit::Success)
}

fn basis(ctx: &mut Ctx<'_, impl Write>, weight: i64, max_pole: u64, prec: i64, modulus: Option<u64>) -> CmdResult {
    let b = forms::wh_basis(weight, max_pole, prec)?;
    if ctx.json {
        ctx.emit(&BasisJson::new(&b, modulus)?);
        return Ok(Exit::Success);
    }
    ctx.line(format_args!("weight {weight}, pole order <= {max_pole}: {} members", b.len()));
    for f in &b.members {
        match modulus {
            Some(p) => ctx.line(format_args!("[{}] {}", f.ord(), f.series.reduce_mod_p(p)?)),
            None => ctx.line(format_args!("[{}] {}", f.ord(), f.series)),
        }
    }
    Ok(Exit::Success)
}

fn theta_decompose(ctx: &mut Ctx<'_, impl Write>, err: &mut impl Write, text: &str, prec: i64) -> CmdResult {
    let e = parse_or_report(text, err)?;
    let f = evaluate(&e, prec)?;
    let cert = certify_constant_term(&f)?;
    if ctx.json {
        #[derive(Serialize)]
        struct Out {
            q: Vec<String>,
            p: Vec<String>,
            constant_term: String,
            prec: String,
        }
        let coeffs = |x: &wholo_core::JPolynomial| x.coeffs().iter().map(format_rational).collect();
        ctx.emit(&Out {
            q: coeffs(&cert.q),
            p: coeffs(&cert.p),
            constant_term: format_rational(&cert.constant_term),
            prec: f.prec().to_string(),
        });
    } else {
        ctx.line(format_args!("Q = {}", cert.q));
        ctx.line(format_args!("P = {}  (f = P(j) * E14 / Delta)", cert.p));
        ctx.line(format_args!(
            "a_f(0) = {}  (Theta(Q(j)) = f checked to O(q^{}))",
            format_rational(&cert.constant_term),
            f.prec()
        ));
    }
    Ok(Exit::Success)
}

fn eisenstein_check(ctx: &mut Ctx<'_, impl Write>, ps: &[u64], ks: &[i64], prec: i64) -> CmdResult {
    let (ps, ks): (Vec<u64>, Vec<i64>) = if ps.is_empty() && ks.is_empty() {
        (vec![5, 7, 11, 13], (1..=13).map(|i| 2 * i).collect())
    } else {
        (ps.to_vec(), ks.to_vec())
    };
    #[derive(Serialize)]
    struct Out {
        check: &'static str,
        modulus: String,
        k: String,
        prec: String,
        result: &'static str,
    }
    let mut all = true;
    let mut report = |ctx: &mut Ctx<'_, _>, check, modulus: u64, k: i64, ok: bool| {
        all &= ok;
        let result = if ok { "pass" } else { "fail" };
        if ctx.json {
            ctx.emit(&Out { check, modulus: modulus.to_string(), k: k.to_string(), prec: prec.to_string(), result });
        } else {
            ctx.line(format_args!("E{k} = 1 (mod {modulus}) to O(q^{prec}): {result}"));
        }
    };
    for &p in &ps {
        let ok = congruence::check_eisenstein_mod_p(p, prec)?;
        report(ctx, "mod_p", p, p as i64 - 1, ok);
    }
    for &k in &ks {
        if k < 2 || k % 2 != 0 {
            return Err(Failure::params(format!("--k {k}: weight must be even and at least 2")));
        }
        let ok = congruence::check_eisenstein_mod_24(k, prec)?;
        report(ctx, "mod_24", 24, k, ok);
    }
    Ok(if all { Exit::Success } else { Exit::VerdictFail })
}

fn nonordinary(ctx: &mut Ctx<'_, impl Write>, ps: &[u64]) -> CmdResult {
    #[derive(Serialize)]
    struct Out {
        p: String,
        tau: String,
        residue: String,
        non_ordinary: bool,
    }
    for &p in ps {
        let prec = p as i64 + 1;
        let residue = congruence::check_delta_nonordinary(p, prec)?;
        let tau = forms::delta(prec).coeff(p as i64)?;
        let non_ordinary = residue.is_zero();
        if ctx.json {
            ctx.emit(&Out {
                p: p.to_string(),
                tau: format_rational(&tau),
                residue: residue.to_string(),
                non_ordinary,
            });
        } else {
            let label = if non_ordinary { "non-ordinary" } else { "ordinary" };
            ctx.line(format_args!("tau({p}) = {} = {residue} (mod {p}): {label}", format_rational(&tau)));
        }
    }
    Ok(Exit::Success)
}

fn verify_tasks(args: &VerifyArgs) -> Result<Vec<Task>, Failure> {
    if args.sweep {
        let ps = if args.p.is_empty() { vec![2, 3, 5, 7, 11] } else { args.p.clone() };
        let ms = if args.m.is_empty() { vec![4, 6, 8, 10] } else { args.m.clone() };
        let tuples = main_theorem_sweep(&ps, args.max_pt, args.r_max, &ms)?;
        return Ok(tuples.into_iter().map(Task::Main).collect());
    }
    if args.p.is_empty() {
        return Err(Failure::params("verify needs --p (or --sweep)"));
    }
    let t = args.t.unwrap_or(1);
    if args.jmo {
        if !args.m.is_empty() {
            return Err(Failure::params("--m does not apply to --jmo"));
        }
        let s = args.s.ok_or_else(|| Failure::params("--jmo needs --s"))?;
        let u = args.u.unwrap_or(t);
        let rs = if args.r.is_empty() { vec![0] } else { args.r.clone() };
        let mut tasks = Vec::new();
        for &p in &args.p {
            for &r in &rs {
                tasks.push(Task::Jmo(JmoParams::new(p, r, s, t, u)?));
            }
        }
        return Ok(tasks);
    }
    let (large, small): (Vec<u64>, Vec<u64>) = args.p.iter().partition(|&&p| p >= 5);
    if !args.r.is_empty() && large.is_empty() {
        return Err(Failure::params("--r applies to p >= 5; use --m for p = 2, 3"));
    }
    if !args.m.is_empty() && small.is_empty() {
        return Err(Failure::params("--m applies to p = 2, 3; use --r for p >= 5"));
    }
    let rs = if args.r.is_empty() { vec![0] } else { args.r.clone() };
    let ms = if args.m.is_empty() { vec![4] } else { args.m.clone() };
    let mut tasks = Vec::new();
    for p in large {
        for &r in &rs {
            tasks.push(Task::Main(TheoremParams::large_prime(p, t, r)?));
        }
    }
    for p in small {
        for &m in &ms {
            tasks.push(Task::Main(TheoremParams::small_prime(p, t, m)?));
        }
    }
    Ok(tasks)
}

fn verify(ctx: &mut Ctx<'_, impl Write>, err: &mut impl Write, args: &VerifyArgs, h_prec: Option<i64>) -> CmdResult {
    let tasks = verify_tasks(args)?;
    let mut worst = Exit::Success;
    for (task, result) in run_all(tasks, h_prec) {
        match result {
            Ok(report) => {
                if !report.verdict {
                    worst = worst.max(Exit::VerdictFail);
                }
                if ctx.json {
                    ctx.emit(&ReportJson::from(&report));
                } else {
                    write_report(ctx, &report);
                }
            }
            Err(e) => {
                let _ = writeln!(err, "error: {}: {e}", describe(&task));
                worst = worst.max(Exit::of(&e));
            }
        }
    }
    Ok(worst)
}

fn describe(task: &Task) -> String {
    match task {
        Task::Main(p) => format!("main congruence {p}"),
        Task::Jmo(p) => format!(
            "companion congruence p={} r={} s={} t={} u={} k={}",
            p.p(),
            p.r(),
            p.s(),
            p.t(),
            p.u(),
            p.k()
        ),
    }
}

fn write_report(ctx: &mut Ctx<'_, impl Write>, report: &CongruenceReport) {
    let task = match report.params {
        ReportParams::Main(p) => Task::Main(p),
        ReportParams::Jmo(p) => Task::Jmo(p),
    };
    let verdict = if report.verdict { "pass" } else { "FAIL" };
    ctx.line(format_args!("{}: {verdict} ({} forms)", describe(&task), report.forms.len()));
    let failed: HashSet<*const FormRecord> = report.failures().map(|r| r as *const _).collect();
    let p = report.params.p();
    for rec in &report.forms {
        let mark = if failed.contains(&(rec as *const _)) { "  <-- FAIL" } else { "" };
        if let Some(why) = &rec.skipped {
            ctx.line(format_args!("  ord {}: skipped, {why}", rec.ord));
            continue;
        }
        let show = |r: Option<wholo_core::Residue>| r.map_or("?".to_string(), |r| r.to_string());
        let mut line = format!(
            "  ord {}: a_f({}) = {} = {} (mod {p}); a_f(0) = {} = {} (mod {p})",
            rec.ord,
            rec.exponent,
            format_rational(&rec.coeff),
            show(rec.residue),
            format_rational(&rec.constant_term),
            show(rec.constant_residue),
        );
        if let Some(h0) = &rec.h_constant {
            line += &format!("; a_h(0) = {}", format_rational(h0));
        }
        if let Some(g) = rec.g_congruence {
            line += if g { "; g congruence holds" } else { "; g congruence FAILS" };
        }
        ctx.line(format_args!("{line}{mark}"));
    }
}
