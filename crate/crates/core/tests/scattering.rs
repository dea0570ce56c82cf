mod common;

use common::*;
use hardscatter::geometry2d::{contact_data, docd};
use hardscatter::scattering2d::{
    angular_momentum_vector, e_beta, e_hats, elementwise_canonical, elementwise_noncanonical, sigma,
    sigma_canonical_geometric, unit_normal_n, verify_family, verify_physical, LambdaForm, Tolerances,
};
use hardscatter::{CollisionParam2D, ConvexBody2D, Family, MassInertia};
use nalgebra::Matrix6;
use proptest::prelude::*;

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![Just(Family::Canonical), Just(Family::NonCanonical)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn physical_map_invariants(
        body in smooth_body(), mi in mass_inertia(), b in beta(), v in velocity(), f in family()
    ) {
        let s = sigma(f, &mi, &body, &b).unwrap();
        prop_assert!(s.det_residual() < 1e-9);
        prop_assert!(s.orthogonality_defect() < 1e-10);
        prop_assert!(s.involution_defect() < 1e-10);
        let (x, y) = (v.to_vector(), s.apply(&v).to_vector());
        let (e1, e2) = e_hats();
        let scale = 1.0 + x.norm();
        prop_assert!((x.dot(&e1) - y.dot(&e1)).abs() < 1e-10 * scale);
        prop_assert!((x.dot(&e2) - y.dot(&e2)).abs() < 1e-10 * scale);
        let alpha = angular_momentum_vector(&mi, docd(&body, &b), b.psi);
        prop_assert!((x.dot(&alpha) - y.dot(&alpha)).abs() < 1e-9 * scale);
        prop_assert!((mi.energy(&x) - mi.energy(&y)).abs() <= 1e-9 * mi.energy(&x).max(1e-300));
    }

    #[test]
    fn approaching_states_leave(body in smooth_body(), mi in mass_inertia(), b in beta(), v in velocity(), f in family()) {
        let n = unit_normal_n(&body, &b).unwrap();
        let x = v.to_vector();
        let y = sigma(f, &mi, &body, &b).unwrap().apply(&v).to_vector();
        // Both reflections reverse the normal rate.
        prop_assert!((n.dot(&y) + n.dot(&x)).abs() < 1e-10 * (1.0 + x.norm()));
    }

    #[test]
    fn element_wise_forms_agree(body in smooth_body(), mi in mass_inertia(), b in beta(), v in velocity()) {
        let d = docd(&body, &b);
        let nc = sigma(Family::NonCanonical, &mi, &body, &b).unwrap().apply(&v);
        prop_assert!((nc.to_vector() - elementwise_noncanonical(&mi, d, b.psi, &v).to_vector()).amax() < 1e-10);
        let c = contact_data(&body, &b).unwrap();
        let can = sigma(Family::Canonical, &mi, &body, &b).unwrap().apply(&v);
        let ew = elementwise_canonical(&mi, &c, &v, LambdaForm::Impulse);
        prop_assert!((can.to_vector() - ew.to_vector()).amax() < 1e-8);
    }

    #[test]
    fn non_canonical_fixes_its_three_plane(body in smooth_body(), mi in mass_inertia(), b in beta()) {
        let s = sigma(Family::NonCanonical, &mi, &body, &b).unwrap().entries;
        let m = mi.matrix();
        let minv = mi.inverse_matrix();
        let (e1, e2) = e_hats();
        for u in [e1, e2, e_beta(&mi, &body, &b)] {
            // M σ M⁻¹ fixes each spanning vector.
            prop_assert!((m * s * minv * u - u).amax() < 1e-12);
        }
    }
}

#[test]
fn verification_report_passes_and_is_reproducible() {
    let body = eccentric();
    let mi = body.mass_inertia();
    for f in Family::ALL {
        let a = verify_family(f, &mi, &body, 2_000, 9).unwrap();
        let b = verify_family(f, &mi, &body, 2_000, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.passed(&Tolerances::default()), "{a:?}");
        assert!(a.approaching > 800 && a.approaching < 1_200);
    }
}

#[test]
fn a_corrupted_matrix_fails_verification() {
    let body = squareish();
    let mi = body.mass_inertia();
    let beta = CollisionParam2D::new(0.4, 1.0, 2.0);
    let mut s = sigma(Family::NonCanonical, &mi, &body, &beta).unwrap();
    s.entries[(4, 4)] += 1e-3;
    let r = verify_physical(&s, &mi, &body, &beta, 500, 1).unwrap();
    assert!(!r.passed(&Tolerances::default()));
    s.entries = -Matrix6::identity();
    let r = verify_physical(&s, &mi, &body, &beta, 500, 1).unwrap();
    assert!(r.momentum_residual_max > 0.1);
}

#[test]
fn geometric_normal_reflection_breaks_angular_momentum() {
    let body = eccentric();
    let mi = MassInertia::new(3.0, 0.2).unwrap();
    let beta = CollisionParam2D::new(0.9, 0.3, 2.2);
    let s = sigma_canonical_geometric(&mi, &body, &beta).unwrap();
    let r = verify_physical(&s, &mi, &body, &beta, 200, 2).unwrap();
    assert!(r.angular_residual_max > 1e-4);
}

#[test]
fn polygons_only_support_the_non_canonical_family() {
    let sq = unit_square();
    let beta = CollisionParam2D::new(0.2, 0.1, 0.0);
    let mi = sq.mass_inertia();
    assert!(sigma(Family::Canonical, &mi, &sq, &beta).is_err());
    let s = sigma(Family::NonCanonical, &mi, &sq, &beta).unwrap();
    assert!(s.det_residual() < 1e-12);
}

#[test]
fn disks_with_equal_parameters_match_the_textbook_exchange() {
    // Head-on along x with no spin: canonical scattering swaps the normal components.
    let body = ConvexBody2D::disk(0.5).unwrap();
    let mi = body.mass_inertia();
    let beta = CollisionParam2D::new(0.0, 0.0, 0.0);
    let v = hardscatter::VelocityState2D::new(
        nalgebra::Vector2::new(1.0, 0.3),
        nalgebra::Vector2::new(-2.0, 0.7),
        0.0,
        0.0,
    );
    let out = sigma(Family::Canonical, &mi, &body, &beta).unwrap().apply(&v);
    assert!((out.v - nalgebra::Vector2::new(-2.0, 0.3)).norm() < 1e-14);
    assert!((out.v_bar - nalgebra::Vector2::new(1.0, 0.7)).norm() < 1e-14);
}
