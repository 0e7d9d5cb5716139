mod common;

use eol_core::curvature::{einstein_tensor_variations, PerturbedMetric};
use eol_core::deformations::*;
use eol_core::flat_model::{
    killing_field, radial_field, Euclidean, FiniteGroup, Orientation, Scaled, ZeroField,
};
use eol_core::obstructions::*;
use eol_core::poly::{PolyTensorField, PolyVectorField};
use eol_core::quadrature::{ball_integral, SphereRule};
use eol_core::tensor::{self, Mat3};
use proptest::prelude::*;

const ORIENTATIONS: [Orientation; 2] = [Orientation::SelfDual, Orientation::AntiSelfDual];

fn axial(a: f64) -> Mat3 {
    let mut m = tensor::mat3_zero();
    m[0][0] = 2.0 * a;
    m[1][1] = -a;
    m[2][2] = -a;
    m
}

fn all_killing() -> Vec<eol_core::flat_model::LinearVectorField> {
    ORIENTATIONS.iter().flat_map(|&o| (0..3).map(move |i| killing_field(i, o))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn radial_flux_is_the_ball_integral_of_the_trace(seed in any::<u64>(), radius in 0.5f64..1.5) {
        // div(E(r∂_r, ·)) = tr E since E⁽¹⁾ is divergence-free
        let h = PolyTensorField::random(&mut common::rng(seed), 3);
        let g = FiniteGroup::trivial();
        let rule = SphereRule::new(radius, 8).unwrap();
        let flux = first_order_flux(&h, &radial_field(), &rule, &g).unwrap();
        let m = PerturbedMetric::new(Euclidean, &h, ZeroField);
        let bulk = ball_integral(
            |p| tensor::trace(&einstein_tensor_variations(&m, p).unwrap().order1_h),
            radius,
            8,
            &g,
        )
        .unwrap();
        prop_assert!(common::rel(flux, bulk) < 1e-10, "{flux} vs {bulk}");
        for y in all_killing() {
            prop_assert!(first_order_flux(&h, &y, &rule, &g).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn ric2_fluxes_match_the_closed_forms(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let o = common::orbifold(&mut rng);
        let b = common::volume_bubble(&mut rng);
        let g = FiniteGroup::trivial();
        let rule = SphereRule::new(1.0, 12).unwrap();
        let mut fields = vec![radial_field()];
        fields.extend(all_killing());
        let v = ric2_fluxes(&h4_from_asymptotics(&b), &h2_from_curvature(&o), &fields, &rule, &g).unwrap();
        prop_assert!(common::rel(v[0], radial_closed_form(&o, &b, &g)) < 1e-11);
        for m in 0..6 {
            let cf = killing_closed_form(&o, &b, m % 3, ORIENTATIONS[m / 3], &g);
            prop_assert!(common::rel(v[m + 1], cf) < 1e-11, "{m}: {} vs {cf}", v[m + 1]);
        }
    }

    #[test]
    fn ric2_flux_is_symmetric_and_bilinear(seed in any::<u64>(), c in -2.0f64..2.0) {
        let mut rng = common::rng(seed);
        let h2 = h2_from_curvature(&common::orbifold(&mut rng));
        let h4 = h4_from_asymptotics(&common::cmc_bubble(&mut rng));
        let g = FiniteGroup::trivial();
        let rule = SphereRule::new(1.2, 12).unwrap();
        let x = radial_field();
        let a = ric2_flux(&h4, &h2, &x, &rule, &g).unwrap();
        prop_assert!(common::rel(ric2_flux(&h2, &h4, &x, &rule, &g).unwrap(), a) < 1e-12);
        prop_assert!(common::rel(ric2_flux(&Scaled(c, &h4), &h2, &x, &rule, &g).unwrap(), c * a) < 1e-12);
    }

    #[test]
    fn pure_gauge_fields_have_no_corrected_conformal_charge(seed in any::<u64>()) {
        let x = PolyVectorField::random(&mut common::rng(seed), 3);
        let h = gauge_field(&x);
        let rule = SphereRule::new(0.9, 10).unwrap();
        let v = conformal_first_corrected(&h, &rule, &FiniteGroup::trivial()).unwrap();
        prop_assert!(v.abs() < 1e-10, "{v}");
    }
}

#[test]
fn hyperkahler_data_is_not_obstructed() {
    let mut rng = common::rng(8);
    let o = OrbifoldPointData {
        lambda: 0.0,
        w_plus: tensor::mat3_zero(),
        w_minus: common::traceless(&mut rng),
    };
    let b = BubbleAsymptotics::kronheimer([&[1.0, 0.2], &[0.0, 1.0], &[0.5, -0.3]]);
    let r = desingularization_check(&o, &b, &FiniteGroup::cyclic(2).unwrap(), 1e-8, 16).unwrap();
    assert_eq!(r.verdict, Verdict::NotObstructedAtFirstOrder, "{r:?}");
    assert!(r.max_value() < 1e-12);
}

#[test]
fn spherical_eguchi_hanson_is_obstructed_radially() {
    let g = FiniteGroup::cyclic(2).unwrap();
    let r = desingularization_check(&OrbifoldPointData::spherical(), &BubbleAsymptotics::eguchi_hanson(), &g, 1e-8, 16)
        .unwrap();
    assert_eq!(r.verdict, Verdict::Obstructed);
    assert!(common::rel(r.radial, r.radial_exact) < 1e-12);
    assert!(r.killing_plus.iter().chain(&r.killing_minus).all(|v| v.unwrap().abs() < 1e-12));
    assert_eq!(Verdict::Obstructed.label(), "OBSTRUCTED");
}

#[test]
fn cyclic_groups_drop_non_invariant_killing_fields() {
    let mut rng = common::rng(3);
    let o = OrbifoldPointData {
        lambda: 1.0,
        w_plus: axial(0.4),
        w_minus: common::traceless(&mut rng),
    };
    let b = BubbleAsymptotics {
        h_plus: axial(-0.3),
        h_minus: common::traceless(&mut rng),
        gauge: Gauge::Cmc,
    };
    let r = desingularization_check(&o, &b, &FiniteGroup::cyclic(3).unwrap(), 1e-8, 16).unwrap();
    assert!(r.killing_plus[0].is_some() && r.killing_plus[1].is_none() && r.killing_plus[2].is_none());
    assert!(r.killing_minus.iter().all(Option::is_some));
}

#[test]
fn reports_round_trip_through_json() {
    let mut rng = common::rng(5);
    let r = desingularization_check(
        &common::orbifold(&mut rng),
        &common::volume_bubble(&mut rng),
        &FiniteGroup::trivial(),
        1e-8,
        12,
    )
    .unwrap();
    let back: ObstructionReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(back, r);
    assert!(common::rel(r.radial, r.radial_exact) < 1e-11);
    assert!(r.einstein_residual < 1e-10);
}

#[test]
fn lambda_quadratic_terms_fail_the_conformal_precondition() {
    let h = h2_from_curvature(&OrbifoldPointData::spherical());
    let rule = SphereRule::new(1.0, 8).unwrap();
    let err = conformal_second(&h, &rule, &FiniteGroup::trivial()).unwrap_err();
    assert!(matches!(err, ObstructionError::PreconditionViolated { .. }));
    let ok = conformal_second(&h4_from_asymptotics(&BubbleAsymptotics::eguchi_hanson()), &rule, &FiniteGroup::trivial());
    assert!(ok.is_ok());
}

#[test]
fn ric2_requires_linearized_einstein_inputs() {
    let h = PolyTensorField::random(&mut common::rng(2), 2);
    let rule = SphereRule::new(1.0, 8).unwrap();
    let err = ric2_flux(&h, &h, &radial_field(), &rule, &FiniteGroup::trivial()).unwrap_err();
    assert!(matches!(err, ObstructionError::PreconditionViolated { .. }));
}

#[test]
fn invalid_inputs_are_reported() {
    let input = TaubInput {
        h: Euclidean,
        k: Euclidean,
        x: radial_field(),
        radius: -1.0,
        group: FiniteGroup::trivial(),
        order: 8,
    };
    assert!(matches!(taub_quantity(&input), Err(ObstructionError::InvalidInput(_))));
    let bad = OrbifoldPointData { lambda: 0.0, w_plus: axial(1.0), w_minus: axial(0.0) };
    let mut w = bad.w_plus;
    w[0][0] += 1.0;
    let bad = OrbifoldPointData { w_plus: w, ..bad };
    let err = desingularization_check(&bad, &BubbleAsymptotics::eguchi_hanson(), &FiniteGroup::trivial(), 1e-8, 8);
    assert!(matches!(err, Err(ObstructionError::Deformation(DeformationError::NotTraceless { field: "w_plus", .. }))));
    let err = desingularization_check(&OrbifoldPointData::spherical(), &BubbleAsymptotics::eguchi_hanson(), &FiniteGroup::trivial(), 1e-8, 0);
    assert!(matches!(err, Err(ObstructionError::Quadrature(_))));
}

#[test]
fn calabi_obstruction_in_higher_dimension() {
    // d = 6: N = 15, a multiple of the identity gives d·c·|ω|² + 2(d−2)·scal
    let n = 15;
    let op: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 2.0 } else { 0.0 }).collect()).collect();
    let mut w = vec![0.0; n];
    w[3] = 1.0;
    w[7] = -1.0;
    assert_eq!(calabi_obstruction(&op, &w, 0.5, 6).unwrap(), 6.0 * 2.0 * 2.0 + 8.0 * 0.5);
    assert!(calabi_obstruction(&op, &w[..14], 0.5, 6).is_err());
}
