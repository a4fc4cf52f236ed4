use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;
use wholo_core::arith::{self, ratio, Rational};
use wholo_core::QExpansion;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-30i64..30, 1i64..5).prop_map(|(n, d)| ratio(n, d))
}

/// A long "exact" series; tests truncate it to various precisions.
fn series(len: usize) -> impl Strategy<Value = QExpansion> {
    (-3i64..=3, prop::collection::vec(-20i64..20, len), 1i64..=3, any::<bool>()).prop_map(
        |(ord, mut c, den, rational)| {
            if c[0] == 0 {
                c[0] = 1;
            }
            let d = if rational { den } else { 1 };
            QExpansion::new(ord, c.iter().map(|&x| ratio(x, d)).collect())
        },
    )
}

/// Unit leading coefficient, integral.
fn unit_series(len: usize) -> impl Strategy<Value = QExpansion> {
    (-3i64..=3, prop::collection::vec(-20i64..20, len), any::<bool>()).prop_map(|(ord, mut c, neg)| {
        c[0] = if neg { -1 } else { 1 };
        QExpansion::from_integers(ord, &c)
    })
}

fn sound(lo: &QExpansion, hi: &QExpansion) -> bool {
    lo.prec() <= hi.prec() && hi.truncate(lo.prec()) == *lo
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    /// Results computed from fewer known coefficients are truncations of
    /// results computed from more.
    #[test]
    fn precision_soundness(
        f in series(30),
        g in series(30),
        cut1 in 1i64..12,
        extra in 1i64..12,
        n in 0u64..5,
    ) {
        let (f1, f2) = (f.truncate(f.ord() + cut1), f.truncate(f.ord() + cut1 + extra));
        let (g1, g2) = (g.truncate(g.ord() + cut1), g.truncate(g.ord() + cut1 + extra));
        prop_assert!(sound(&f1.add(&g1), &f2.add(&g2)));
        prop_assert!(sound(&f1.sub(&g1), &f2.sub(&g2)));
        prop_assert!(sound(&f1.mul(&g1), &f2.mul(&g2)));
        prop_assert!(sound(&f1.inv().unwrap(), &f2.inv().unwrap()));
        prop_assert!(sound(&f1.pow(n), &f2.pow(n)));
        prop_assert!(sound(&f1.theta(), &f2.theta()));
        // and against the untruncated series
        prop_assert!(sound(&f1.mul(&g1), &f.mul(&g)));
        prop_assert!(sound(&f1.inv().unwrap(), &f.inv().unwrap()));
    }

    #[test]
    fn coeff_never_fabricates(f in series(10), beyond in 0i64..20) {
        let n = f.prec() + beyond;
        prop_assert!(f.coeff(n).is_err());
        prop_assert!(f.coeff(f.prec() - 1).is_ok());
    }

    #[test]
    fn mul_commutative_associative(f in series(15), g in series(15), h in series(15)) {
        prop_assert_eq!(f.mul(&g), g.mul(&f));
        let left = f.mul(&g).mul(&h);
        let right = f.mul(&g.mul(&h));
        prop_assert_eq!(left.prec(), right.prec());
        prop_assert_eq!(left, right);
    }

    #[test]
    fn pow_matches_repeated_product(f in series(12), n in 0u64..6) {
        let mut acc = QExpansion::one(f.len() as i64);
        for _ in 0..n {
            acc = acc.mul(&f);
        }
        prop_assert_eq!(f.pow(n), acc);
    }

    #[test]
    fn theta_is_a_derivation(f in series(15), g in series(15)) {
        let lhs = f.mul(&g).theta();
        let rhs = f.theta().mul(&g).add(&f.mul(&g.theta()));
        prop_assert!(lhs.agrees_with(&rhs));
        prop_assert!(lhs.prec() == rhs.prec() || lhs.is_zero() || rhs.is_zero());
    }

    #[test]
    fn inverse_roundtrip(f in series(20)) {
        let one = f.mul(&f.inv().unwrap());
        prop_assert_eq!(one.prec(), f.len() as i64);
        prop_assert_eq!(one, QExpansion::one(f.len() as i64));
    }

    #[test]
    fn reduction_is_a_homomorphism_on_series(f in unit_series(15), g in unit_series(15)) {
        for p in [2u64, 3, 5, 7, 11] {
            let (rf, rg) = (f.reduce_mod_p(p).unwrap(), g.reduce_mod_p(p).unwrap());
            prop_assert_eq!(f.add(&g).reduce_mod_p(p).unwrap(), rf.add(&rg));
            prop_assert_eq!(f.mul(&g).reduce_mod_p(p).unwrap(), rf.mul(&rg));
        }
    }

    #[test]
    fn rational_ring_axioms(a in small_rational(), b in small_rational(), c in small_rational()) {
        prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
        prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
        prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
        prop_assert!((&a + (-&a)).is_zero());
        if !a.is_zero() {
            prop_assert!((&a * a.recip()).is_one());
        }
        prop_assert!(*a.denom() >= BigInt::one());
        prop_assert!(num_integer::Integer::gcd(a.numer(), a.denom()).is_one());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn reduce_mod_is_a_ring_homomorphism(
        an in -10_000i64..10_000, ad in 1i64..200,
        bn in -10_000i64..10_000, bd in 1i64..200,
        pi in 0usize..6,
    ) {
        let p = [2u64, 3, 5, 7, 11, 13][pi];
        prop_assume!(ad % p as i64 != 0 && bd % p as i64 != 0);
        let (x, y) = (ratio(an, ad), ratio(bn, bd));
        let (rx, ry) = (arith::reduce_mod(&x, p).unwrap(), arith::reduce_mod(&y, p).unwrap());
        prop_assert_eq!(arith::reduce_mod(&(&x + &y), p).unwrap(), rx.add(ry));
        prop_assert_eq!(arith::reduce_mod(&(&x * &y), p).unwrap(), rx.mul(ry));
    }
}

#[test]
fn zero_series_is_total() {
    let z = QExpansion::zero(7);
    assert!(z.is_zero());
    assert_eq!(z.ord(), 7);
    assert_eq!(z.mul(&QExpansion::from_integers(-2, &[1, 1, 1])).prec(), 5);
    assert!(z.inv().is_err());
    assert_eq!(z.theta(), z);
    assert!(z.pow(3).is_zero());
}
