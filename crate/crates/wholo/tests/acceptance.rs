//! Acceptance suite: one pass/fail line per criterion, non-zero exit if any fails.
//!
//! Runs without the libtest harness so the report is always printed.

use std::process::Command;
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use wholo::sweep::{run_all, Task};
use wholo_core::arith::{rational, ratio};
use wholo_core::congruence::{self, check_g_power_congruence, main_theorem_sweep, verify_jmo};
use wholo_core::forms::{delta_eta, eisenstein, j_invariant, wh_basis};
use wholo_core::theta2::{decompose_weight2, eval_j_polynomial};
use wholo_core::{Error, JPolynomial, JmoParams, QExpansion};

/// Every exact comparison allows this many mismatched coefficients.
const EXACT_MISMATCHES: usize = 0;
const EXAMPLE_TIME_LIMIT: Duration = Duration::from_secs(1);
const SWEEP_TIME_LIMIT: Duration = Duration::from_secs(120);
const EISENSTEIN_PREC: i64 = 200;
const ORACLE_DELTA_PREC: i64 = 200;
const ORACLE_E14_PREC: i64 = 100;
const DECOMPOSE_CASES: usize = 100;
const DECOMPOSE_MAX_DEGREE: usize = 6;
const DECOMPOSE_COEFF_BOUND: i64 = 50;
const DECOMPOSE_PREC: i64 = 30;
const WEIGHT_TWO_MAX_POLE: u64 = 10;
const SOUNDNESS_CASES: usize = 500;
const SEED: u64 = 0x5eed_f00d;

type Outcome = Result<String, String>;
type Criterion = Box<dyn FnOnce(&mut ChaCha8Rng) -> Outcome>;

#[allow(clippy::absurd_extreme_comparisons)]
fn within_tolerance(mismatched: usize) -> bool {
    mismatched <= EXACT_MISMATCHES
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn mismatches(a: &QExpansion, b: &QExpansion, prec: i64) -> Result<usize, String> {
    let lo = a.ord().min(b.ord());
    let mut n = 0;
    for e in lo..prec {
        let (x, y) = (a.coeff(e).map_err(|e| e.to_string())?, b.coeff(e).map_err(|e| e.to_string())?);
        if x != y {
            n += 1;
        }
    }
    Ok(n)
}

fn example_reproduction() -> Outcome {
    let start = Instant::now();
    let run = |args: &[&str]| -> Result<Value, String> {
        let o = Command::new(env!("CARGO_BIN_EXE_wholo"))
            .args(args)
            .env_remove("WHOLO_DEFAULT_PREC")
            .output()
            .map_err(|e| e.to_string())?;
        check(o.status.success(), || format!("`wholo {}` exited with {}", args.join(" "), o.status))?;
        serde_json::from_slice(&o.stdout).map_err(|e| e.to_string())
    };
    let exact = run(&["--json", "expand", "E4/Delta", "--prec", "6"])?;
    let reduced = run(&["--json", "expand", "E4/Delta", "--prec", "6", "--mod", "5"])?;
    let elapsed = start.elapsed();
    // coeffs start at q^-1
    let at = |v: &Value, n: usize| v["coeffs"][n + 1].as_str().unwrap_or("").to_string();
    check(exact["ord"] == -1 && exact["prec"] == 6, || format!("unexpected shape {exact}"))?;
    check(at(&exact, 0) == "264", || format!("a(0) = {}", at(&exact, 0)))?;
    check(at(&exact, 5) == "126745880", || format!("a(5) = {}", at(&exact, 5)))?;
    check(at(&reduced, 0) == "4", || format!("a(0) mod 5 = {}", at(&reduced, 0)))?;
    check(at(&reduced, 5) == "0", || format!("a(5) mod 5 = {}", at(&reduced, 5)))?;
    check(elapsed < EXAMPLE_TIME_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!("a(0) = 264 = 4, a(5) = 126745880 = 0 (mod 5), {elapsed:.0?}"))
}

fn sweep_tasks() -> Result<Vec<Task>, Error> {
    let mut tuples = main_theorem_sweep(&[5, 7, 11], 30, 3, &[])?;
    tuples.extend(main_theorem_sweep(&[2, 3], 27, 0, &[4, 6, 8, 10])?);
    Ok(tuples.into_iter().map(Task::Main).collect())
}

fn main_sweep() -> Outcome {
    let tasks = sweep_tasks().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let results = run_all(tasks, None);
    let elapsed = start.elapsed();
    let (mut forms, mut skipped) = (0, 0);
    for (task, result) in &results {
        let report = result.as_ref().map_err(|e| format!("{task:?}: {e}"))?;
        check(report.verdict, || format!("{task:?} failed: {:?}", report.failures().next()))?;
        for rec in &report.forms {
            if rec.skipped.is_some() {
                skipped += 1;
                continue;
            }
            forms += 1;
            check(rec.residue.is_some_and(|r| r.is_zero()), || format!("{task:?} ord {}: a_f(p^t) != 0", rec.ord))?;
            check(rec.h_constant.as_ref().is_some_and(Zero::is_zero), || {
                format!("{task:?} ord {}: a_h(0) = {:?}", rec.ord, rec.h_constant)
            })?;
        }
    }
    check(skipped == 0, || format!("{skipped} forms were not p-integral"))?;
    check(elapsed < SWEEP_TIME_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!("{} tuples, {forms} forms, {elapsed:.1?}", results.len()))
}

fn g_power_congruence() -> Outcome {
    let tasks = sweep_tasks().map_err(|e| e.to_string())?;
    let mut seen = std::collections::BTreeSet::new();
    for task in &tasks {
        let Task::Main(p) = task else { unreachable!() };
        if !seen.insert((p.p(), p.t())) {
            continue;
        }
        let pt = p.p_power();
        let g = j_invariant(2 * pt + 1).series.theta();
        let gp = g.pow(pt as u64);
        let sign = if pt % 2 == 0 { 1 } else { -1 };
        check(gp.ord() == -pt && gp.coeff(-pt).ok() == Some(rational(sign)), || {
            format!("p^t = {pt}: leading term of g^(p^t) is not {sign} q^-{pt}")
        })?;
        let c = check_g_power_congruence(p.p(), p.t(), 2 * pt + 1).map_err(|e| e.to_string())?;
        check(c.holds, || format!("p={} t={}: first failure at q^{:?}", p.p(), p.t(), c.first_failure))?;
    }
    Ok(format!("{} (p, t) pairs, sign (-1)^(p^t)", seen.len()))
}

fn eisenstein_reductions() -> Outcome {
    for p in [5u64, 7, 11, 13] {
        let ok = congruence::check_eisenstein_mod_p(p, EISENSTEIN_PREC).map_err(|e| e.to_string())?;
        check(ok, || format!("E{} != 1 (mod {p})", p - 1))?;
    }
    for k in (2..=26).step_by(2) {
        let ok = congruence::check_eisenstein_mod_24(k, EISENSTEIN_PREC).map_err(|e| e.to_string())?;
        check(ok, || format!("E{k} != 1 (mod 24)"))?;
    }
    Ok(format!("p in {{5, 7, 11, 13}}, k in 2..=26, to O(q^{EISENSTEIN_PREC})"))
}

fn weight_two_decomposition(rng: &mut ChaCha8Rng) -> Outcome {
    for case in 0..DECOMPOSE_CASES {
        let degree = rng.gen_range(0..=DECOMPOSE_MAX_DEGREE);
        let coeffs: Vec<i64> =
            (0..=degree).map(|_| rng.gen_range(-DECOMPOSE_COEFF_BOUND..=DECOMPOSE_COEFF_BOUND)).collect();
        let q = JPolynomial::from_integers(&coeffs);
        let f = eval_j_polynomial(&q, DECOMPOSE_PREC).theta();
        let p = decompose_weight2(&f).map_err(|e| format!("case {case}: {e}"))?;
        check(p == q.derivative().neg(), || format!("case {case}: Q = {q}, got P = {p}"))?;
        let rebuilt = eval_j_polynomial(&wholo_core::theta2::antiderivative_in_j(&p), DECOMPOSE_PREC).theta();
        let bad = mismatches(&rebuilt.series, &f.series, DECOMPOSE_PREC)?;
        check(within_tolerance(bad), || format!("case {case}: {bad} coefficients differ"))?;
    }
    for n in 0..=WEIGHT_TWO_MAX_POLE {
        let b = wh_basis(2, n, 2).map_err(|e| e.to_string())?;
        for f in &b.members {
            let c = f.coeff(0).map_err(|e| e.to_string())?;
            check(c.is_zero(), || format!("wh_basis(2, {n}) member {} has a(0) = {c}", f.ord()))?;
        }
    }
    Ok(format!("{DECOMPOSE_CASES} polynomials, wh_basis(2, N <= {WEIGHT_TWO_MAX_POLE}) constant terms zero"))
}

fn oracle_identities() -> Outcome {
    let series = |k, prec| eisenstein(k, prec).map(|e| e.series).map_err(|e| e.to_string());
    let (e4, e6) = (series(4, ORACLE_DELTA_PREC)?, series(6, ORACLE_DELTA_PREC)?);
    let delta = e4.pow(3).sub(&e6.pow(2)).scale(&ratio(1, 1728));
    let bad = mismatches(&delta, &delta_eta(ORACLE_DELTA_PREC).series, ORACLE_DELTA_PREC)?;
    check(within_tolerance(bad), || format!("Delta: {bad} coefficients differ"))?;

    let (e4, e6) = (series(4, ORACLE_E14_PREC)?, series(6, ORACLE_E14_PREC)?);
    let e14 = series(14, ORACLE_E14_PREC)?;
    let bad = mismatches(&e14, &e4.pow(2).mul(&e6), ORACLE_E14_PREC)?;
    check(within_tolerance(bad), || format!("E14: {bad} coefficients differ"))?;

    let lhs = j_invariant(ORACLE_E14_PREC).series.theta().neg();
    let e14 = series(14, ORACLE_E14_PREC + 2)?;
    let inv_delta = delta_eta(ORACLE_E14_PREC + 2).series.inv().map_err(|e| e.to_string())?;
    let rhs = e14.mul(&inv_delta);
    let bad = mismatches(&lhs, &rhs, ORACLE_E14_PREC)?;
    check(within_tolerance(bad), || format!("-Theta(j): {bad} coefficients differ"))?;
    Ok(format!("Delta to O(q^{ORACLE_DELTA_PREC}), E14 and -Theta(j) to O(q^{ORACLE_E14_PREC})"))
}

fn delta_nonordinary() -> Outcome {
    let mut parts = Vec::new();
    for p in [2u64, 3, 5, 7, 11] {
        let r = congruence::check_delta_nonordinary(p, p as i64 + 1).map_err(|e| e.to_string())?;
        check(r.is_zero() == (p != 11), || format!("tau({p}) = {r} (mod {p})"))?;
        parts.push(format!("tau({p}) = {r}"));
    }
    Ok(parts.join(", "))
}

fn companion_congruence() -> Outcome {
    let (mut ran, mut odd) = (0, 0);
    for p in [5u64, 7] {
        for s in [1u64, 3, 4] {
            for r in 0..=2u64 {
                let params = match JmoParams::new(p, r, s, 1, 1) {
                    Ok(params) => params,
                    Err(Error::InvalidParams(msg)) if msg.contains("odd") => {
                        odd += 1;
                        continue;
                    }
                    Err(e) => return Err(e.to_string()),
                };
                let report = verify_jmo(&params).map_err(|e| e.to_string())?;
                check(report.verdict, || format!("p={p} r={r} s={s}: {:?}", report.failures().next()))?;
                check(!report.forms.is_empty(), || format!("p={p} r={r} s={s}: empty basis"))?;
                ran += 1;
            }
        }
    }
    Ok(format!("{ran} even-weight tuples pass, {odd} odd-weight tuples excluded"))
}

fn random_series(rng: &mut ChaCha8Rng, len: usize) -> QExpansion {
    let ord = rng.gen_range(-3..=3);
    let den = rng.gen_range(1..=3);
    let mut coeffs: Vec<_> = (0..len).map(|_| ratio(rng.gen_range(-20..20), den)).collect();
    if coeffs[0].is_zero() {
        coeffs[0] = rational(1);
    }
    QExpansion::new(ord, coeffs)
}

fn precision_soundness(rng: &mut ChaCha8Rng) -> Outcome {
    let sound = |lo: &QExpansion, hi: &QExpansion| lo.prec() <= hi.prec() && hi.truncate(lo.prec()) == *lo;
    for case in 0..SOUNDNESS_CASES {
        let (f, g) = (random_series(rng, 24), random_series(rng, 24));
        let cut = rng.gen_range(1..10);
        let extra = rng.gen_range(1..10);
        let n = rng.gen_range(0..5u64);
        let (f1, f2) = (f.truncate(f.ord() + cut), f.truncate(f.ord() + cut + extra));
        let (g1, g2) = (g.truncate(g.ord() + cut), g.truncate(g.ord() + cut + extra));
        let inv = |x: &QExpansion| x.inv().map_err(|e| format!("case {case}: {e}"));
        let ok = sound(&f1.add(&g1), &f2.add(&g2))
            && sound(&f1.sub(&g1), &f2.sub(&g2))
            && sound(&f1.mul(&g1), &f2.mul(&g2))
            && sound(&inv(&f1)?, &inv(&f2)?)
            && sound(&f1.pow(n), &f2.pow(n))
            && sound(&f1.theta(), &f2.theta());
        check(ok, || format!("case {case}: a truncated operand changed a certified coefficient"))?;
        for h in [&f1, &f1.mul(&g1), &inv(&f1)?] {
            let beyond = h.prec() + rng.gen_range(0..10);
            check(matches!(h.coeff(beyond), Err(Error::OutOfPrecision { .. })), || {
                format!("case {case}: coeff({beyond}) beyond prec {} did not error", h.prec())
            })?;
        }
        let zero = QExpansion::zero(cut);
        check(zero.coeff(cut).is_err(), || format!("case {case}: zero series fabricated a coefficient"))?;
    }
    Ok(format!("{SOUNDNESS_CASES} cases, seed {SEED:#x}"))
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let criteria: Vec<(&str, Criterion)> = vec![
        ("E4/Delta expansion and residues", Box::new(|_| example_reproduction())),
        ("main congruence sweep", Box::new(|_| main_sweep())),
        ("g^(p^t) congruence", Box::new(|_| g_power_congruence())),
        ("Eisenstein reductions", Box::new(|_| eisenstein_reductions())),
        ("weight-2 decomposition", Box::new(weight_two_decomposition)),
        ("oracle identities", Box::new(|_| oracle_identities())),
        ("Delta non-ordinary at 2, 3, 5, 7", Box::new(|_| delta_nonordinary())),
        ("companion congruence", Box::new(|_| companion_congruence())),
        ("precision soundness", Box::new(precision_soundness)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        match run(&mut rng) {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
