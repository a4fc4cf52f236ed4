use num_traits::Zero;
use proptest::prelude::*;
use wholo_core::arith::{self, rational, Residue};
use wholo_core::congruence::{
    self, build_h, main_theorem_sweep, verify_jmo, verify_main_theorem, AuxiliaryBuilder, PrecisionPlan,
};
use wholo_core::forms::wh_basis;
use wholo_core::theta2::WeightTwoBasis;
use wholo_core::{JmoParams, ModularExpansion, TheoremParams};

fn combination(members: &[ModularExpansion], weights: &[i64]) -> ModularExpansion {
    let mut acc = members[0].scale(&rational(0));
    for (f, &c) in members.iter().zip(weights) {
        acc = acc.add(&f.scale(&rational(c)));
    }
    acc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn integer_combinations_satisfy_the_congruence(
        choice in 0usize..4,
        weights in prop::collection::vec(-20i64..=20, 8),
    ) {
        let params = [
            TheoremParams::large_prime(5, 1, 0),
            TheoremParams::large_prime(7, 1, 1),
            TheoremParams::small_prime(2, 2, 4),
            TheoremParams::small_prime(3, 1, 6),
        ][choice].clone().unwrap();
        let (p, pt) = (params.p(), params.p_power());
        let basis = wh_basis(params.k(), (pt - 1) as u64, pt + 4).unwrap();
        let f = combination(&basis.members, &weights);
        prop_assume!(!f.series.is_zero());
        let a = f.coeff(pt).unwrap();
        prop_assert!(arith::reduce_mod(&a, p).unwrap().is_zero());
        let h = build_h(&params, &f, 3).unwrap();
        prop_assert!(h.coeff(0).unwrap().is_zero());
    }
}

#[test]
fn multiplier_choice_does_not_matter() {
    for (p, t) in [(2u64, 1u32), (2, 2), (3, 1)] {
        let params = TheoremParams::small_prime(p, t, 12).unwrap();
        let pt = params.p_power();
        let plan = PrecisionPlan::new(pt, pt - 1, 4);
        let a = AuxiliaryBuilder::with_factors(params, plan, &[(4, 3)]).unwrap();
        let b = AuxiliaryBuilder::with_factors(params, plan, &[(6, 2)]).unwrap();
        let canonical = AuxiliaryBuilder::new(params, plan);
        let basis = wh_basis(params.k(), (pt - 1) as u64, plan.f_prec).unwrap();
        for f in &basis.members {
            let (ha, hb) = (a.build(f).unwrap(), b.build(f).unwrap());
            assert!(ha.coeff(0).unwrap().is_zero());
            assert!(hb.coeff(0).unwrap().is_zero());
            assert_eq!(canonical.build(f).unwrap(), ha);
            assert_eq!(ha.series.reduce_mod_p(p).unwrap(), hb.series.reduce_mod_p(p).unwrap());
        }
    }
    let params = TheoremParams::small_prime(2, 1, 12).unwrap();
    let plan = PrecisionPlan::new(2, 1, 4);
    assert!(AuxiliaryBuilder::with_factors(params, plan, &[(4, 2)]).is_err());
}

#[test]
fn h_constant_matches_signed_coefficient() {
    for params in [
        TheoremParams::large_prime(5, 1, 2).unwrap(),
        TheoremParams::large_prime(11, 1, 0).unwrap(),
        TheoremParams::small_prime(3, 2, 8).unwrap(),
        TheoremParams::small_prime(2, 3, 10).unwrap(),
    ] {
        let report = verify_main_theorem(&params, Some(3)).unwrap();
        assert!(report.verdict, "{params}");
        let p = params.p();
        for rec in &report.forms {
            if rec.skipped.is_some() {
                continue;
            }
            let a = arith::reduce_mod(&rec.coeff, p).unwrap();
            let signed = Residue::new(params.sign(), p).unwrap().mul(a);
            let hc = arith::reduce_mod(rec.h_constant.as_ref().unwrap(), p).unwrap();
            assert_eq!(hc, signed);
            assert_eq!(rec.h_certified, Some(true));
        }
    }
}

#[test]
fn h_is_theta_of_a_polynomial_in_j() {
    let params = TheoremParams::large_prime(7, 1, 0).unwrap();
    let basis = wh_basis(params.k(), 6, 12).unwrap();
    let table = WeightTwoBasis::new(13, 5);
    for f in &basis.members {
        let h = build_h(&params, f, 5).unwrap();
        let cert = table.certify(&h.series).unwrap();
        assert!(cert.constant_term.is_zero());
    }
}

#[test]
fn small_sweep_passes() {
    let tuples = main_theorem_sweep(&[2, 3, 5, 7], 9, 1, &[4, 6]).unwrap();
    assert!(tuples.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(tuples.len(), 3 * 2 + 2 * 2 + 2 + 2);
    for params in &tuples {
        let report = verify_main_theorem(params, None).unwrap();
        assert!(report.verdict, "{params}: {:?}", report.failures().collect::<Vec<_>>());
        assert_eq!(report.forms.len() as i64, congruence_basis_size(params));
    }
}

fn congruence_basis_size(params: &TheoremParams) -> i64 {
    wh_basis(params.k(), (params.p_power() - 1) as u64, 1).unwrap().len() as i64
}

#[test]
fn companion_congruence_holds() {
    for (p, r, s, t, u) in [(5u64, 0u64, 4u64, 1u32, 1u32), (7, 1, 4, 1, 1), (7, 0, 4, 1, 1), (5, 0, 6, 1, 1), (5, 0, 4, 2, 2)] {
        let params = JmoParams::new(p, r, s, t, u).unwrap();
        let report = verify_jmo(&params).unwrap();
        assert!(report.verdict, "{p} {r} {s} {t} {u}");
        assert!(!report.forms.is_empty());
    }
    assert!(JmoParams::new(5, 0, 2, 1, 1).is_err());
}

#[test]
fn eisenstein_reductions() {
    for p in [5u64, 7, 11, 13, 17, 19, 23] {
        assert!(congruence::check_eisenstein_mod_p(p, 60).unwrap());
    }
    for k in [2i64, 4, 6, 8, 10, 14] {
        assert!(congruence::check_eisenstein_mod_24(k, 60).unwrap(), "E{k}");
    }
}
