//! Energy–momentum chart for 2D particle pairs and the reflections it induces.
//!
//! On the set of velocities with total momentum `p` and energy `|MV|² = e²`,
//! `H_P(e, p, ·)` is a chart from the unit sphere `S³`. The non-canonical map
//! acts through it by the 4-D reflection generated by `k̂_β`, which in turn
//! collapses onto a 3-D reflection generated by `γ̂_β` via `I*` and `Δ`.

use std::f64::consts::SQRT_2;

use nalgebra::{Matrix3, Matrix3x4, Matrix4, Vector3, Vector4, Vector6};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry2d::{docd, CollisionParam2D, ConvexBody2D, MassInertia};
use crate::scattering2d::sigma_noncanonical;

/// Admissible pair, `e² > |p|²/(2m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyMomentum2 {
    pub e: f64,
    pub p: nalgebra::Vector2<f64>,
    pub mi: MassInertia,
}

impl EnergyMomentum2 {
    pub fn new(e: f64, p: nalgebra::Vector2<f64>, mi: MassInertia) -> Result<Self> {
        if !(e.is_finite() && e > 0.0 && p.x.is_finite() && p.y.is_finite()) {
            return Err(Error::Domain("energy must be positive and momentum finite".into()));
        }
        if 2.0 * mi.m * e * e <= p.norm_squared() {
            return Err(Error::Domain(format!(
                "(e, p) not admissible: e² = {} ≤ |p|²/(2m) = {}",
                e * e,
                p.norm_squared() / (2.0 * mi.m)
            )));
        }
        Ok(Self { e, p, mi })
    }

    /// `√(2me² − |p|²)`.
    pub fn radius(&self) -> f64 {
        (2.0 * self.mi.m * self.e * self.e - self.p.norm_squared()).sqrt()
    }
}

/// `I*`, rows `(1,0,0,0)`, `(0,1,0,0)`, `(0,0,1,1)`.
pub fn i_star() -> Matrix3x4<f64> {
    Matrix3x4::new(1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0)
}

/// `Δ = diag(1, 1, 1/√2)`.
pub fn delta() -> Matrix3<f64> {
    Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 1.0 / SQRT_2))
}

pub fn h_p(em: &EnergyMomentum2, y: &Vector4<f64>) -> Result<Vector6<f64>> {
    if y.norm() == 0.0 || !y.iter().all(|x| x.is_finite()) {
        return Err(Error::InvalidInput("chart argument y must be nonzero".into()));
    }
    let (m, j) = (em.mi.m, em.mi.j);
    let a = em.radius();
    let p = em.p;
    let w = a / (2.0 * m * j).sqrt();
    Ok(Vector6::new(
        (p.x + a * y[0]) / (2.0 * m),
        (p.y + a * y[1]) / (2.0 * m),
        (p.x - a * y[0]) / (2.0 * m),
        (p.y - a * y[1]) / (2.0 * m),
        w * y[2],
        w * y[3],
    ))
}

/// Solve `H_P(e, p, y) = h` for `y`.
pub fn h_p_inverse(em: &EnergyMomentum2, h: &Vector6<f64>) -> Vector4<f64> {
    let (m, j) = (em.mi.m, em.mi.j);
    let a = em.radius();
    let w = a / (2.0 * m * j).sqrt();
    Vector4::new(m * (h[0] - h[2]) / a, m * (h[1] - h[3]) / a, h[4] / w, h[5] / w)
}

pub fn k_hat_from(mi: &MassInertia, d: f64, psi: f64) -> Vector4<f64> {
    let (s, c) = psi.sin_cos();
    let sm = mi.m.sqrt();
    let r = (2.0 * mi.j).sqrt();
    Vector4::new(-sm * d * s, sm * d * c, -r, -r) / (mi.m * d * d + 4.0 * mi.j).sqrt()
}

pub fn gamma_hat_from(mi: &MassInertia, d: f64, psi: f64) -> Vector3<f64> {
    let (s, c) = psi.sin_cos();
    let sm = mi.m.sqrt();
    Vector3::new(-sm * d * s, sm * d * c, -2.0 * mi.j.sqrt()) / (mi.m * d * d + 4.0 * mi.j).sqrt()
}

pub fn reflection4(k: &Vector4<f64>) -> Matrix4<f64> {
    Matrix4::identity() - 2.0 * k * k.transpose()
}

pub fn reflection3(g: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::identity() - 2.0 * g * g.transpose()
}

/// `(k̂_β, s_β)`.
pub fn k_hat(
    mi: &MassInertia,
    body: &ConvexBody2D,
    beta: &CollisionParam2D,
) -> (Vector4<f64>, Matrix4<f64>) {
    let k = k_hat_from(mi, docd(body, beta), beta.psi);
    (k, reflection4(&k))
}

/// `(γ̂_β, r_β)`.
pub fn gamma_hat(
    mi: &MassInertia,
    body: &ConvexBody2D,
    beta: &CollisionParam2D,
) -> (Vector3<f64>, Matrix3<f64>) {
    let g = gamma_hat_from(mi, docd(body, beta), beta.psi);
    (g, reflection3(&g))
}

fn intertwine_with(
    mi: &MassInertia,
    body: &ConvexBody2D,
    em: &EnergyMomentum2,
    y: &Vector4<f64>,
    beta: &CollisionParam2D,
    sign: f64,
) -> Result<f64> {
    let s = sigma_noncanonical(mi, body, beta)?;
    let (_, sb) = k_hat(mi, body, beta);
    Ok((s.entries * h_p(em, y)? - h_p(em, &(sign * (sb * y)))?).norm())
}

/// `‖σ×_β H_P(e,p,y) − H_P(e,p, s_β y)‖`.
pub fn intertwine_2d(
    mi: &MassInertia,
    body: &ConvexBody2D,
    em: &EnergyMomentum2,
    y: &Vector4<f64>,
    beta: &CollisionParam2D,
) -> Result<f64> {
    intertwine_with(mi, body, em, y, beta, 1.0)
}

/// `‖σ×_β H_P(e,p,y) − H_P(e,p, −s_β y)‖`, the relation that holds for the chart
/// as written: `σ×` negates `y` on the complement of `k̂_β`, it does not fix it.
pub fn intertwine_2d_antipodal(
    mi: &MassInertia,
    body: &ConvexBody2D,
    em: &EnergyMomentum2,
    y: &Vector4<f64>,
    beta: &CollisionParam2D,
) -> Result<f64> {
    intertwine_with(mi, body, em, y, beta, -1.0)
}

/// `‖I* s − Δ⁻¹ r Δ I*‖_F` for explicit `d`, `ψ` and a chosen `Δ`.
pub fn conjugation_residual(mi: &MassInertia, d: f64, psi: f64, delta: &Matrix3<f64>) -> f64 {
    let s = reflection4(&k_hat_from(mi, d, psi));
    let r = reflection3(&gamma_hat_from(mi, d, psi));
    let inv = delta.try_inverse().expect("Δ must be invertible");
    (i_star() * s - inv * r * delta * i_star()).norm()
}

/// `‖I* s_β − Δ⁻¹ r_β Δ I*‖_F`.
pub fn conjugation_identity(mi: &MassInertia, body: &ConvexBody2D, beta: &CollisionParam2D) -> f64 {
    conjugation_residual(mi, docd(body, beta), beta.psi, &delta())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use nalgebra::Vector2;

    fn unit() -> MassInertia {
        MassInertia::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn constants_are_exact() {
        let i = i_star();
        assert_eq!(i[(2, 2)], 1.0);
        assert_eq!(i[(2, 3)], 1.0);
        assert_eq!(i.sum(), 4.0);
        assert_eq!(delta()[(2, 2)], 1.0 / SQRT_2);
    }

    #[test]
    fn substitutions() {
        let k = k_hat_from(&unit(), 1.0, 0.0);
        let expected = Vector4::new(0.0, 1.0, -SQRT_2, -SQRT_2) / 5f64.sqrt();
        assert!((k - expected).norm() < 1e-15);
        let g = gamma_hat_from(&unit(), 1.0, 0.0);
        assert!((g - Vector3::new(0.0, 1.0, -2.0) / 5f64.sqrt()).norm() < 1e-15);
        let s = reflection4(&k);
        assert!((s * s - Matrix4::identity()).norm() < 1e-15);
        let r = reflection3(&g);
        assert!((r * r - Matrix3::identity()).norm() < 1e-15);
    }

    #[test]
    fn chart_normalization_and_inverse() {
        let mi = MassInertia::new(2.0, 0.5).unwrap();
        let mut rng = sampling::sample_rng(31, 0);
        for _ in 0..100 {
            let p = sampling::vector2(&mut rng);
            let e = p.norm() / (2.0 * mi.m).sqrt() + 0.5;
            let em = EnergyMomentum2::new(e, p, mi).unwrap();
            let y = sampling::unit_vector::<4, _>(&mut rng);
            let h = h_p(&em, &y).unwrap();
            assert!((mi.energy(&h) - e * e).abs() < 1e-12 * e * e);
            assert!((mi.m * Vector2::new(h[0] + h[2], h[1] + h[3]) - p).norm() < 1e-12);
            assert!((h_p_inverse(&em, &h) - y).norm() < 1e-10);
        }
    }

    #[test]
    fn admissibility() {
        let mi = unit();
        assert!(EnergyMomentum2::new(1.0, Vector2::new(2.0, 0.0), mi).is_err());
        let p = Vector2::<f64>::new(1.0, 0.0);
        let e = (p.norm_squared() / 2.0).sqrt() * (1.0 + 1e-6);
        let em = EnergyMomentum2::new(e, p, mi).unwrap();
        assert!(em.radius() < 2e-3);
        let h = h_p(&em, &Vector4::new(0.0, 0.0, 0.6, 0.8)).unwrap();
        assert!((mi.energy(&h) - e * e).abs() < 1e-12);
    }

    #[test]
    fn conjugation_identity_holds_and_needs_delta() {
        let mi = unit();
        assert!(conjugation_residual(&mi, 1.0, 0.0, &delta()) <= 1e-14);
        assert!(conjugation_residual(&mi, 1.0, 0.0, &Matrix3::identity()) > 0.1);
        let b = ConvexBody2D::disk(0.5).unwrap();
        let mut rng = sampling::sample_rng(32, 0);
        for _ in 0..100 {
            let beta = sampling::collision_param(&mut rng);
            assert!(conjugation_identity(&b.mass_inertia(), &b, &beta) <= 1e-12);
        }
    }

    #[test]
    fn noncanonical_map_acts_antipodally_through_the_chart() {
        let b = ConvexBody2D::support_fourier(&[1.0, 0.0, 0.1], &[]).unwrap();
        let mi = b.mass_inertia();
        let mut rng = sampling::sample_rng(33, 0);
        for _ in 0..100 {
            let beta = sampling::collision_param(&mut rng);
            let p = sampling::vector2(&mut rng);
            let em = EnergyMomentum2::new(p.norm() + 1.0, p, mi).unwrap();
            let y = sampling::unit_vector::<4, _>(&mut rng);
            assert!(intertwine_2d_antipodal(&mi, &b, &em, &y, &beta).unwrap() < 1e-12);
        }
    }

    #[test]
    fn unsigned_relation_fails_even_along_k_hat() {
        let b = ConvexBody2D::disk(0.5).unwrap();
        let mi = b.mass_inertia();
        let beta = CollisionParam2D::new(0.4, 0.0, 0.0);
        let (k, _) = k_hat(&mi, &b, &beta);
        let em = EnergyMomentum2::new(2.0, Vector2::new(0.1, 0.2), mi).unwrap();
        assert!(intertwine_2d_antipodal(&mi, &b, &em, &k, &beta).unwrap() < 1e-12);
        assert!(intertwine_2d(&mi, &b, &em, &k, &beta).unwrap() > 0.1);
    }
}
