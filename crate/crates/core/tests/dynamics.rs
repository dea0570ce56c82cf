mod common;

use common::*;
use hardscatter::dynamics::{
    collision_time, gap, head_on_disks, offset_miss, reversibility_probe, simulate, ParticleState,
};
use hardscatter::{ConvexBody2D, Family, VelocityState2D};
use nalgebra::Vector2;
use proptest::prelude::*;

fn approach(offset: f64, spin: f64, spin_bar: f64, theta: f64) -> ParticleState {
    ParticleState {
        x: Vector2::zeros(),
        x_bar: Vector2::new(4.0, offset),
        theta,
        theta_bar: -theta,
        v: VelocityState2D::new(Vector2::new(1.0, 0.0), Vector2::new(-1.0, 0.05), spin, spin_bar),
        t: 0.0,
    }
}

#[test]
fn head_on_disks_collide_at_the_analytic_time() {
    // Gap 2 closed at relative speed 2.
    let b = ConvexBody2D::disk(0.5).unwrap();
    let t = collision_time(&b, &head_on_disks(), 10.0).unwrap().unwrap();
    assert!((t - 1.0).abs() < 1e-9);
    let tr = simulate(&b, &b.mass_inertia(), &head_on_disks(), Family::Canonical, 5.0, 10).unwrap();
    assert_eq!(tr.events.len(), 1);
    let e = &tr.events[0];
    assert!((e.v_post.v - Vector2::new(-1.0, 0.0)).norm() < 1e-12);
    assert!((tr.final_state.x - Vector2::new(-3.0, 0.0)).norm() < 1e-9);
}

#[test]
fn passing_bodies_never_collide() {
    let b = eccentric();
    let tr = simulate(&b, &b.mass_inertia(), &offset_miss(), Family::NonCanonical, 10.0, 10).unwrap();
    assert!(tr.events.is_empty());
    assert!(!tr.truncated);
    assert!(tr.min_sampled_gap > 0.0);
}

#[test]
fn event_budget_truncates() {
    let b = ConvexBody2D::disk(0.5).unwrap();
    let tr = simulate(&b, &b.mass_inertia(), &head_on_disks(), Family::Canonical, 5.0, 0).unwrap();
    assert!(tr.truncated);
    assert!(tr.events.is_empty());
}

#[test]
fn polygons_are_rejected() {
    let sq = unit_square();
    assert!(simulate(&sq, &sq.mass_inertia(), &head_on_disks(), Family::NonCanonical, 5.0, 4).is_err());
}

#[test]
fn event_time_is_a_root_of_the_gap() {
    let b = eccentric();
    let s = approach(0.3, 0.8, -0.4, 0.2);
    let t = collision_time(&b, &s, 10.0).unwrap().unwrap();
    let at = s.advanced(t);
    assert!(gap(&b, &at).unwrap().abs() < 1e-9);
    // Bracket check: positive just before, negative just after.
    assert!(gap(&b, &s.advanced(t - 1e-6)).unwrap() > 0.0);
    assert!(gap(&b, &s.advanced(t + 1e-6)).unwrap() < 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rotating_collisions_conserve_and_reverse(
        body in smooth_body(), offset in -1.2..1.2f64, w in -1.5..1.5f64, wb in -1.5..1.5f64,
        th in -3.0..3.0f64, f in prop_oneof![Just(Family::Canonical), Just(Family::NonCanonical)]
    ) {
        let init = approach(offset, w, wb, th);
        let mi = body.mass_inertia();
        let tr = simulate(&body, &mi, &init, f, 6.0, 8).unwrap();
        prop_assert!(!tr.events.is_empty());
        prop_assert!(tr.conserves(), "{:?}", tr.events);
        prop_assert!(tr.min_sampled_gap >= -1e-9);
        if !tr.events[0].grazing {
            let err = reversibility_probe(&body, &mi, &init, f, 6.0).unwrap().unwrap();
            prop_assert!(err <= 1e-6, "replay error {err}");
        }
    }
}
