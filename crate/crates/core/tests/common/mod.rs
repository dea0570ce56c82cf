#![allow(dead_code)]

use hardscatter::{CollisionParam2D, ConvexBody2D, MassInertia, VelocityState2D};
use nalgebra::Vector2;
use proptest::prelude::*;

pub fn squareish() -> ConvexBody2D {
    ConvexBody2D::support_fourier(&[1.0, 0.0, 0.0, 0.0, 0.05], &[]).unwrap()
}

pub fn eccentric() -> ConvexBody2D {
    ConvexBody2D::support_fourier(&[1.0, 0.0, 0.15, 0.0, 0.0, 0.01], &[0.0, 0.03]).unwrap()
}

pub fn ellipse_like() -> ConvexBody2D {
    ConvexBody2D::support_fourier(&[1.0, 0.0, 0.1], &[]).unwrap()
}

pub fn unit_square() -> ConvexBody2D {
    ConvexBody2D::polygon(&[[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]]).unwrap()
}

/// Smooth bodies with modes 2..=4 small enough that `h + h″ > 0`.
pub fn smooth_body() -> impl Strategy<Value = ConvexBody2D> {
    (prop::collection::vec(-0.015..0.015f64, 3), prop::collection::vec(-0.015..0.015f64, 3)).prop_map(
        |(c, s)| {
            ConvexBody2D::support_fourier(&[1.0, 0.0, c[0], c[1], c[2]], &[0.0, 0.0, s[0], s[1], s[2]]).unwrap()
        },
    )
}

pub fn beta() -> impl Strategy<Value = CollisionParam2D> {
    (-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64).prop_map(|(a, b, c)| CollisionParam2D::new(a, b, c))
}

pub fn velocity() -> impl Strategy<Value = VelocityState2D> {
    prop::array::uniform6(-3.0..3.0f64).prop_map(|x| {
        VelocityState2D::new(Vector2::new(x[0], x[1]), Vector2::new(x[2], x[3]), x[4], x[5])
    })
}

pub fn mass_inertia() -> impl Strategy<Value = MassInertia> {
    (0.2..5.0f64, 0.05..3.0f64).prop_map(|(m, j)| MassInertia::new(m, j).unwrap())
}
