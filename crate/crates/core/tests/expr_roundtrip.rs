use num_bigint::BigInt;
use proptest::prelude::*;
use wholo_core::expr::{evaluate, infer_weight, parse, render, FormExpr, Generator};

const CORPUS: &[&str] = &[
    "E2", "E4", "E6", "E8", "E10", "E12", "E14", "Delta", "j", "0",
    "1", "1728", "-E4", "--j", "E4 + E6", "E4 - E6", "E4 * E6", "E4 / E6", "E4^3", "Delta^-1",
    "E4 / Delta", "E4^3 / Delta", "E4^3 / Delta - j", "(E4^3 - E6^2) / 1728", "Theta(j)",
    "Theta(j)^5 * E4", "Theta(E4 / Delta)", "Theta(Theta(j))", "-Theta(j)", "j^2 - 1488 * j",
    "(j - 744)^2", "1 - 2 - 3", "1 - (2 - 3)", "E4 / (E6 * j)", "E4 / E6 / j", "(E4^2)^3",
    "(-E4)^2", "-E4^2", "E6 * E4^2 / Delta^2", "E14 / Delta", "Delta * j - E4^3",
    "Theta(j^3) + 3 * j^2 * Theta(j)", "(E4 + E4) * (E6 - E6)", "1 / (E4 * E6)",
    "Theta(E4^3 / Delta - 744)", "2 * 3 * 5 * 7", "E4^0", "Delta^-3 * E4^2 * E6",
    "-(E4 - E6)", "E2^2 - E4",
];

#[test]
fn corpus_roundtrips() {
    assert_eq!(CORPUS.len(), 50);
    for src in CORPUS {
        let e = parse(src).unwrap_or_else(|err| panic!("{src}: {err}"));
        let text = render(&e);
        assert_eq!(parse(&text).unwrap(), e, "{src} -> {text}");
        // canonical text is a fixed point
        assert_eq!(render(&parse(&text).unwrap()), text);
    }
}

fn leaf() -> impl Strategy<Value = FormExpr> {
    prop_oneof![
        (1u32..=7).prop_map(|k| FormExpr::Generator(Generator::Eisenstein(2 * k))),
        Just(FormExpr::Generator(Generator::Delta)),
        Just(FormExpr::Generator(Generator::J)),
        (0u32..2000).prop_map(|n| FormExpr::Int(BigInt::from(n))),
    ]
}

fn expr() -> impl Strategy<Value = FormExpr> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| FormExpr::Neg(Box::new(a))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| FormExpr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| FormExpr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| FormExpr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| FormExpr::Div(Box::new(a), Box::new(b))),
            (inner.clone(), -2i64..=3).prop_map(|(a, n)| FormExpr::Pow(Box::new(a), n)),
            inner.prop_map(|a| FormExpr::Theta(Box::new(a))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn random_asts_roundtrip(e in expr()) {
        let text = render(&e);
        prop_assert_eq!(parse(&text).unwrap(), e);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn evaluation_is_sound(e in expr(), prec in 2i64..8, extra in 1i64..5) {
        let (lo, hi) = match (evaluate(&e, prec), evaluate(&e, prec + extra)) {
            (Ok(lo), Ok(hi)) => (lo, hi),
            // both precisions must agree on whether the expression is defined
            (Err(a), Err(b)) => { prop_assert_eq!(a, b); return Ok(()); }
            (a, b) => { prop_assert!(false, "{:?} vs {:?}", a.err(), b.err()); unreachable!() }
        };
        prop_assert_eq!(lo.prec(), prec);
        prop_assert_eq!(hi.prec(), prec + extra);
        prop_assert_eq!(hi.truncate(prec), lo.clone());
        prop_assert_eq!(infer_weight(&e).weight, lo.weight());
    }
}
