use pinch_core::threshold::{table1_value, TABLE_MATCH_TOLERANCE};
use pinch_core::{
    find_threshold, integral_i, scan_sign, Error, KernelSign, PinchParameter, PsiVariant, ThresholdOptions,
};

#[test]
fn thresholds_match_the_published_table() {
    for n in [5usize, 10, 20] {
        let result = find_threshold(n, 1e-6, PsiVariant::Listing).unwrap();
        let published = table1_value(n).unwrap();
        assert!(
            (result.delta_n - published).abs() < TABLE_MATCH_TOLERANCE,
            "n={n}: {} vs {published}",
            result.delta_n
        );
        assert!(result.bracket.1 - result.bracket.0 <= 1e-6);
        assert!(result.integral_at_bracket.0 >= 0.0 && result.integral_at_bracket.1 < 0.0);
        assert!(result.warning.is_none());
    }
}

#[test]
fn n5_sign_pattern_has_one_crossing() {
    let scan = scan_sign(5, 1e-3, PsiVariant::Listing).unwrap();
    assert!(scan.single_crossing);
    assert_eq!(scan.points.len(), 700);
    assert_eq!(scan.points[0].sign, KernelSign::NonNegative);
    assert_eq!(scan.points.last().unwrap().sign, KernelSign::Negative);
}

#[test]
fn integral_changes_sign_around_the_threshold() {
    let n = 6;
    let dn = find_threshold(n, 1e-6, PsiVariant::Listing).unwrap().delta_n;
    let at = |d: f64| {
        integral_i(n, PinchParameter::new(d).unwrap(), PsiVariant::Listing)
            .unwrap()
            .value
    };
    assert!(at(dn - 1e-3) > 0.0);
    assert!(at(dn + 1e-3) < 0.0);
}

#[test]
fn proposition_variant_has_no_threshold() {
    match find_threshold(5, 1e-6, PsiVariant::Proposition) {
        Err(Error::NoCrossing {
            n: 5,
            variant: PsiVariant::Proposition,
            ..
        }) => {}
        other => panic!("expected NoCrossing, got {other:?}"),
    }
}

#[test]
fn threshold_search_is_deterministic() {
    let a = find_threshold(7, 1e-6, PsiVariant::Listing).unwrap();
    let b = find_threshold(7, 1e-6, PsiVariant::Listing).unwrap();
    assert_eq!(a.delta_n.to_bits(), b.delta_n.to_bits());
    let bits = |r: &pinch_core::ThresholdResult| r.scan.iter().map(|p| p.integral.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a), bits(&b));
}

#[test]
fn invalid_options_are_rejected() {
    assert!(find_threshold(5, 0.0, PsiVariant::Listing).is_err());
    assert!(find_threshold(4, 1e-6, PsiVariant::Listing).is_err());
    let options = ThresholdOptions {
        scan_step: 0.5,
        ..ThresholdOptions::default()
    };
    assert!(pinch_core::find_threshold_with(5, PsiVariant::Listing, &options).is_err());
}
