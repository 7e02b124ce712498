use std::sync::Arc;

use unitary_periods::field::{all_characters, CharDomain, ExtensionContext};
use unitary_periods::group::DEFAULT_ORDER_BOUND;
use unitary_periods::siegel::SiegelData;
use unitary_periods::spaces::Epsilon;
use unitary_periods::verify::*;

fn siegel(n: usize) -> Arc<SiegelData> {
    let ctx = Arc::new(ExtensionContext::new(3, 1).unwrap());
    Arc::new(SiegelData::split(&ctx, Epsilon::Skew, n, DEFAULT_ORDER_BOUND).unwrap())
}

fn assert_passed(r: &VerificationReport) {
    for c in &r.checks {
        eprintln!("{} {}: {:?} {}", if c.passed { "ok " } else { "BAD" }, c.name, c.residual, c.detail);
    }
    assert!(r.passed, "{} failed", r.kind);
}

#[test]
fn weil_model_small() {
    for dim_v in 1..=2 {
        let m = build_model(&siegel(1), dim_v, SplittingChoice::default()).unwrap();
        assert_passed(&verify_weil_model(&m, &VerifyOptions::default()).unwrap());
    }
}

#[test]
fn jacquet_small() {
    let s = siegel(1);
    for dim_v in 1..=2 {
        let m = build_model(&s, dim_v, SplittingChoice { chi_v: 1, chi_w: 2, ..Default::default() }).unwrap();
        assert_passed(&verify_jacquet_isomorphism(&m, &standard_form(1), &VerifyOptions::default()).unwrap());
    }
}

#[test]
fn jacquet_zero_case() {
    let m = build_model(&siegel(2), 1, SplittingChoice::default()).unwrap();
    let r = verify_jacquet_isomorphism(&m, &standard_form(2), &VerifyOptions::default()).unwrap();
    assert_passed(&r);
    assert_eq!(r.scenario["embedding"], "none");
}

#[test]
fn transfer_small() {
    let s = siegel(1);
    for dim_v in 1..=2 {
        let m = build_model(&s, dim_v, SplittingChoice { chi_v: 1, chi_w: 3, ..Default::default() }).unwrap();
        let (r, cells) = verify_period_transfer(&m, &standard_form(1), &VerifyOptions { seed: 7, ..Default::default() }).unwrap();
        assert_passed(&r);
        assert!(cells.iter().any(|c| c.lhs > 0));
    }
}

#[test]
fn strata_and_filtration() {
    for n in 1..=2 {
        assert_passed(&verify_rank_stratification(&siegel(n), &VerifyOptions::default()).unwrap());
        assert_passed(&verify_parabolic_filtration(&siegel(n), &VerifyOptions::default()).unwrap());
    }
    let s = siegel(1);
    for chi in all_characters(s.ctx(), CharDomain::Units) {
        assert_passed(&verify_linear_filtration_full(&s, &chi, &VerifyOptions { seed: 1, ..Default::default() }).unwrap());
    }
}

#[test]
fn legendre_splitting_breaks_the_jacquet_identity_in_odd_dimension() {
    use unitary_periods::field::SplittingConvention;
    let s = siegel(1);
    let choice = SplittingChoice { convention: SplittingConvention::Quadratic, ..Default::default() };
    let opts = VerifyOptions::default();
    let odd = verify_jacquet_isomorphism(&build_model(&s, 1, choice).unwrap(), &standard_form(1), &opts).unwrap();
    let cmp = odd.checks.iter().find(|c| c.name == "classwise character equality").unwrap();
    assert!(!cmp.passed, "chi_V nontrivial on F^x should spoil chi_V(det m) = chi_V^2(i^-1 det m)");
    let even = verify_jacquet_isomorphism(&build_model(&s, 2, choice).unwrap(), &standard_form(1), &opts).unwrap();
    assert!(even.passed);
}
