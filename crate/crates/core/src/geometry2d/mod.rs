//! Convex reference particles, the distance of closest approach `d_β`, contact
//! geometry and the gap function `F`.
//!
//! Two congruent copies of the reference body `P*` are placed with orientations
//! `ϑ` and `ϑ̄`; the barred copy sits at `d e(ψ)` relative to the unbarred one.

mod approach;
mod body;
mod gap;

use std::f64::consts::TAU;

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

pub use approach::{
    contact_data, docd, docd_grid_golden, docd_partials, docd_partials_envelope, docd_partials_step,
    ContactData,
    DOCD_GRID, FD_STEP,
};
pub use body::{BodyDescriptor, ConvexBody2D, Jet, MassInertia, ShapeDescriptor, FOURIER_GRID};
pub use gap::{contact_configuration, gap_function, gap_gradient, psi_of};

/// `e(ψ) = (cos ψ, sin ψ)`.
pub fn e(angle: f64) -> Vector2<f64> {
    let (s, c) = angle.sin_cos();
    Vector2::new(c, s)
}

/// Counterclockwise quarter turn, `(x, y) ↦ (−y, x)`.
pub fn perp(u: &Vector2<f64>) -> Vector2<f64> {
    Vector2::new(-u.y, u.x)
}

pub fn rotation(angle: f64) -> Matrix2<f64> {
    let (s, c) = angle.sin_cos();
    Matrix2::new(c, -s, s, c)
}

pub(crate) fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs.
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Collision parameter `β = (ψ, ϑ, ϑ̄)`, each angle reduced to `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionParam2D {
    pub psi: f64,
    pub theta: f64,
    pub theta_bar: f64,
}

impl CollisionParam2D {
    pub fn new(psi: f64, theta: f64, theta_bar: f64) -> Self {
        Self { psi: wrap_angle(psi), theta: wrap_angle(theta), theta_bar: wrap_angle(theta_bar) }
    }

    /// The same contact seen from the barred particle.
    pub fn swapped(&self) -> Self {
        Self::new(self.psi + std::f64::consts::PI, self.theta_bar, self.theta)
    }

    pub fn e_psi(&self) -> Vector2<f64> {
        e(self.psi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles_are_reduced() {
        let b = CollisionParam2D::new(-1e-300, 7.0, -TAU);
        assert!((0.0..TAU).contains(&b.psi));
        assert!((b.theta - (7.0 - TAU)).abs() < 1e-15);
        assert_eq!(b.theta_bar, 0.0);
    }

    #[test]
    fn perp_is_counterclockwise() {
        assert_eq!(perp(&Vector2::new(1.0, 0.0)), Vector2::new(0.0, 1.0));
        let r = rotation(0.3);
        assert!((r * e(0.2) - e(0.5)).norm() < 1e-15);
    }
}
