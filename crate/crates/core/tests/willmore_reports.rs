use std::f64::consts::{E, PI};

use approx::assert_relative_eq;
use proptest::prelude::*;
use willmore_core::comparison::{decay_constants, AssociatedFunction, DecayConstants};
use willmore_core::manifold::{
    cone, jacobi, modified_schwarzschild, reissner_nordstrom, schwarzschild, schwarzschild3_b0,
    schwarzschild3_radius, FiberManifold, WarpedProduct,
};
use willmore_core::numerics::bisect;
use willmore_core::willmore::{
    analyze, annex_checks, equality_limit_ratio, minimal_area_bound, reduced_lhs, script_f,
    script_f_prime, verify_inequality, verify_slice, willmore_lhs, EqualityClass, SliceData,
    VerifySettings,
};
use willmore_core::Error;

fn s2() -> FiberManifold {
    FiberManifold::round_sphere(2).unwrap()
}

#[test]
fn schwarzschild_horizon_report() {
    let w = schwarzschild(2.0, 3).unwrap();
    let rep = verify_inequality(&w, 0.0, &VerifySettings::default()).unwrap();
    let b0 = schwarzschild3_b0();
    let lhs = 16.0 * PI / 9.0 * (2.0 * b0).exp();
    assert_relative_eq!(rep.lhs, lhs, max_relative = 1e-8);
    assert!((rep.lhs - 27.4113).abs() < 1e-4);
    assert!((rep.rhs - 4.0 * PI).abs() < 1e-4 * 4.0 * PI);
    assert_eq!(rep.equality_class, EqualityClass::Strict);
    let (ratio, _) = rep.limit_ratio.unwrap();
    assert!((ratio - 1.5 / b0.exp()).abs() < 1e-6);
    assert!(!rep.violated());
    // h′(0) = 0: the minimal-slice form.
    let c = rep.constants;
    assert_relative_eq!(rep.lhs, (2.0 * c.b0).exp() * rep.slice.area * c.b1 * c.b1, max_relative = 1e-14);
}

#[test]
fn flat_cones_are_w1() {
    let unit = verify_inequality(&cone(1.0, 1.0, s2()).unwrap(), 0.0, &VerifySettings::default()).unwrap();
    assert!(unit.flat_regime);
    assert!(unit.gap.abs() < 1e-6);
    assert_eq!(unit.equality_class, EqualityClass::EqualityW1);
    let half = verify_inequality(&cone(0.5, 1.0, s2()).unwrap(), 0.0, &VerifySettings::default()).unwrap();
    assert_relative_eq!(half.lhs, PI, max_relative = 1e-12);
    assert!((half.rhs - PI).abs() < 1e-6);
    assert_eq!(half.equality_class, EqualityClass::EqualityW1);
}

#[test]
fn modified_schwarzschild_limit_ratio() {
    let w = modified_schwarzschild(1.0).unwrap();
    let a = analyze(&w, &VerifySettings::default()).unwrap();
    let expect_avr = 1.0 / willmore_core::manifold::modified_schwarzschild_mass(1.0).powi(2);
    assert!((a.avr.value - expect_avr).abs() < 1e-6);
    let (ratio, _) = equality_limit_ratio(&w, 0.0, &a.constants, 1e6).unwrap().unwrap();
    let expect = 3.0 / (2.0 * (4.0 * E).cbrt());
    assert!((ratio - expect).abs() < 1e-4, "{ratio} vs {expect}");
    assert!((expect - 0.6771).abs() < 1e-4);
}

#[test]
fn steep_modified_schwarzschild_is_inadmissible() {
    // m < 1: h′ → 1/m > 1 over the unit sphere, λ₂ ~ (1 − m²)/(2 m² r²)·… > 0.
    let w = modified_schwarzschild(2.0).unwrap();
    assert!(matches!(analyze(&w, &VerifySettings::default()), Err(Error::ConditionsFailed(_))));
}

#[test]
fn exact_jacobi_warp_has_unit_ratio() {
    // h″ = λh with compactly supported λ; choose the constants so that the
    // final slope of h is exactly e^{b0} f.
    let lambda = AssociatedFunction::triangular(0.8, 2.0).unwrap();
    let h0 = 0.4;
    let w = jacobi(&lambda, h0, s2()).unwrap();
    let own = decay_constants(&lambda, 1e-12).unwrap();
    let slope = w.eval(100.0).dh;
    let b1 = slope / own.b0.exp() - h0 * (1.0 + own.b0);
    let c = DecayConstants { b1, ..own };
    let (ratio, err) = equality_limit_ratio(&w, 0.0, &c, 1e6).unwrap().unwrap();
    assert!((ratio - 1.0).abs() < 1e-4 && err < 1e-6, "{ratio} ± {err}");
}

#[test]
fn affine_ratio_degenerates_correctly() {
    let w = cone(1.0, 1.0, s2()).unwrap();
    let (ratio, _) = equality_limit_ratio(&w, 0.0, &DecayConstants::ZERO, 1e6).unwrap().unwrap();
    assert!((ratio - 1.0).abs() < 1e-12);
    let zero_slope = cone(0.0, 1.0, s2()).unwrap();
    assert_eq!(equality_limit_ratio(&zero_slope, 0.0, &DecayConstants::ZERO, 1e6).unwrap(), None);
}

/// Curvature concentrated in `[0, ε]` with `b1 = 1`, over a fiber with
/// `Ric ≥ 2` so that no curvature appears beyond the support.
fn concentrated(eps: f64) -> WarpedProduct {
    let lambda = AssociatedFunction::triangular(2.0 / eps, eps).unwrap();
    let fiber = FiberManifold::new(2, 4.0 * PI, 2.0, Some(PI)).unwrap();
    jacobi(&lambda, 0.0, fiber).unwrap()
}

#[test]
fn concentrated_curvature_approaches_w2() {
    let eps = 1e-4;
    let rep = verify_inequality(&concentrated(eps), 0.0, &VerifySettings::default()).unwrap();
    assert!(!rep.flat_regime);
    assert!((rep.constants.b1 - 1.0).abs() < 1e-9);
    assert!(rep.gap >= 0.0 && rep.relative_slack < 1e-4, "{}", rep.relative_slack);
    let (ratio, _) = rep.limit_ratio.unwrap();
    assert!((ratio - 1.0).abs() < 1e-4);
    assert_eq!(rep.equality_class, EqualityClass::EqualityW2);
    // Spreading the same mass out moves away from equality.
    let wide = verify_inequality(&concentrated(0.5), 0.0, &VerifySettings::default()).unwrap();
    assert_eq!(wide.equality_class, EqualityClass::Strict);
    assert!(wide.limit_ratio.unwrap().0 < 1.0 - 1e-4);
}

#[test]
fn minimal_area_scaling() {
    let b0 = schwarzschild3_b0();
    let bound = |m: f64| {
        let c = DecayConstants { b0, b1: 2.0 / (3.0 * m), b0_error: 0.0, b1_error: 0.0 };
        minimal_area_bound(3, &c, 1.0).unwrap()
    };
    assert_relative_eq!(bound(2.0), 4.0 * PI / ((4.0 * E).cbrt() / 3.0).powi(2), max_relative = 1e-12);
    assert!(16.0 * PI > bound(2.0));
    assert_relative_eq!(bound(1.0) / bound(2.0), 0.25, max_relative = 1e-12);
    let tiny = DecayConstants { b0: 1e-12, b1: 1e-9, b0_error: 0.0, b1_error: 0.0 };
    assert!(minimal_area_bound(3, &tiny, 1.0).unwrap() > 1e18);
    assert_eq!(minimal_area_bound(3, &DecayConstants::ZERO, 1.0), Err(Error::DivisionDegenerate));
}

#[test]
fn corollary_is_an_identity_on_minimal_slices() {
    for w in [schwarzschild(2.0, 3).unwrap(), reissner_nordstrom(3.0, 1.0, 3).unwrap()] {
        let rep = verify_inequality(&w, 0.0, &VerifySettings::default()).unwrap();
        let bound = minimal_area_bound(3, &rep.constants, rep.avr.value).unwrap();
        // lhs/rhs = area/bound exactly when h′(r0) = 0.
        assert_relative_eq!(rep.lhs / rep.rhs, rep.slice.area / bound, max_relative = 1e-10);
        assert!(rep.slice.area >= bound);
    }
}

#[test]
fn script_f_examples() {
    let w = schwarzschild(2.0, 3).unwrap();
    let c = DecayConstants { b0: schwarzschild3_b0(), b1: 1.0 / 3.0, b0_error: 0.0, b1_error: 0.0 };
    let g = |r: f64| script_f_prime(&w, &c, r);
    let root = bisect(g, 0.5, 10.0, 1e-12).unwrap();
    assert!((w.warp.h(root) - 3.0).abs() < 1e-8);
    assert!((root - schwarzschild3_radius(2.0, 3.0)).abs() < 1e-8);
    let flat = cone(1.0, 1.0, s2()).unwrap();
    for t in [0.0, 0.5, 3.0, 100.0] {
        assert!(script_f_prime(&flat, &DecayConstants::ZERO, t) < 0.0);
    }
    for t in [0.3, 2.0, 5.0, 20.0] {
        let e = 1e-5 * t;
        let fd = (script_f(&w, &c, t + e) - script_f(&w, &c, t - e)) / (2.0 * e);
        assert!((fd - script_f_prime(&w, &c, t)).abs() <= 1e-6 * fd.abs().max(1e-6));
    }
}

#[test]
fn annex_examples() {
    let unit = annex_checks(&cone(1.0, 1.0, s2()).unwrap(), 0.0, 1.0).unwrap();
    assert!(unit.sharp_constant > unit.weaker_constant);
    assert_relative_eq!(unit.weaker_constant, PI, max_relative = 1e-14);
    assert!(unit.li_equality && unit.diameter_criterion && unit.area_criterion);
    let half = annex_checks(&cone(0.5, 1.0, s2()).unwrap(), 0.0, 0.25).unwrap();
    assert_relative_eq!(half.r0_star, 2.0, max_relative = 1e-12);
    assert!(!half.area_criterion && !half.li_equality);
}

fn builtin() -> impl Strategy<Value = WarpedProduct> {
    prop_oneof![
        (0.2f64..20.0).prop_map(|m| schwarzschild(m, 3).unwrap()),
        (0.5f64..10.0, 0.05f64..0.49).prop_map(|(m, k)| reissner_nordstrom(m, k * m, 3).unwrap()),
        (0.1f64..=1.0, 0.1f64..5.0).prop_map(|(a, b)| cone(a, b, s2()).unwrap()),
        // κ ≤ 2e^{b0}/3 keeps m ≥ 1, i.e. final slope 1/m ≤ 1 over the round sphere.
        (0.2f64..1.45).prop_map(|k| modified_schwarzschild(k).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn soundness_and_class_discipline(w in builtin(), r0s in prop::collection::vec(0.0f64..30.0, 4)) {
        let a = analyze(&w, &VerifySettings::default()).unwrap();
        for r0 in r0s {
            let rep = verify_slice(&a, r0).unwrap();
            prop_assert!(rep.gap >= -1e-6 * rep.rhs, "gap {} at r0 = {}", rep.gap, r0);
            match rep.equality_class {
                EqualityClass::EqualityW2 => prop_assert!((rep.limit_ratio.unwrap().0 - 1.0).abs() <= 1e-4),
                EqualityClass::EqualityW1 => prop_assert!(rep.w1.unwrap().passes),
                EqualityClass::Strict => prop_assert!(
                    rep.gap > 1e-4 * rep.rhs || rep.limit_ratio.is_some_and(|(v, _)| (v - 1.0).abs() > 1e-4)
                ),
                EqualityClass::Indeterminate => {}
            }
            if rep.flat_regime {
                prop_assert_eq!(rep.lhs, rep.reduced_lhs);
            }
        }
    }

    #[test]
    fn fiber_area_scales_both_sides(m in 0.5f64..5.0, k in 0.1f64..10.0, r0 in 0.0f64..10.0) {
        let base = schwarzschild(m, 3).unwrap();
        let fiber = FiberManifold::new(2, 4.0 * PI * k, 1.0, Some(PI)).unwrap();
        let scaled = WarpedProduct::new(fiber, base.warp.clone()).unwrap();
        let s = VerifySettings::default();
        let a = verify_inequality(&base, r0, &s).unwrap();
        let b = verify_inequality(&scaled, r0, &s).unwrap();
        prop_assert!((b.lhs - k * a.lhs).abs() <= 1e-10 * b.lhs);
        prop_assert!((b.rhs - k * a.rhs).abs() <= 1e-8 * b.rhs);
    }

    #[test]
    fn flat_regime_matches_reduced_form(a in 0.1f64..=1.0, b in 0.1f64..5.0, r0 in 0.0f64..10.0) {
        let w = cone(a, b, s2()).unwrap();
        let slice = SliceData::new(&w, r0).unwrap();
        prop_assert_eq!(willmore_lhs(&w, &slice, &DecayConstants::ZERO), reduced_lhs(&w, &slice));
    }
}
