//! Component formulas for both scattering families.

use crate::geometry2d::{e, perp, ContactData, MassInertia};

use super::VelocityState2D;

/// Normalization of the canonical impulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaForm {
    /// `Λ = ½ (2/m + (p^⊥·n)²/J + (q^⊥·n)²/J)`, the value that reproduces the matrix form.
    Impulse,
    /// `Λ = 2/m + (p^⊥·n)²/J + (q^⊥·n)²/J`.
    Unsquared,
    /// `Λ = (2/m + (p^⊥·n)²/J + (q^⊥·n)²/J)²`.
    Squared,
}

/// Non-canonical post-collision velocities; the linear impulse is along `e(ψ)^⊥`.
pub fn elementwise_noncanonical(
    mi: &MassInertia,
    d: f64,
    psi: f64,
    v: &VelocityState2D,
) -> VelocityState2D {
    let (m, j) = (mi.m, mi.j);
    let ep = perp(&e(psi));
    let x = (m * d * v.v - 2.0 * j * v.omega * ep - m * d * v.v_bar - 2.0 * j * v.omega_bar * ep).dot(&ep);
    let denom = m * d * d + 4.0 * j;
    let kick = ep * (x * d / denom);
    VelocityState2D {
        v: v.v_bar + kick,
        v_bar: v.v - kick,
        omega: -v.omega - 2.0 * x / denom,
        omega_bar: -v.omega_bar - 2.0 * x / denom,
    }
}

/// Canonical post-collision velocities; the linear impulse is along the contact normal.
pub fn elementwise_canonical(
    mi: &MassInertia,
    contact: &ContactData,
    v: &VelocityState2D,
    form: LambdaForm,
) -> VelocityState2D {
    let (m, j) = (mi.m, mi.j);
    let n = contact.n;
    let pn = perp(&contact.p).dot(&n);
    let qn = perp(&contact.q).dot(&n);
    let sum = 2.0 / m + pn * pn / j + qn * qn / j;
    let lambda = match form {
        LambdaForm::Impulse => 0.5 * sum,
        LambdaForm::Unsquared => sum,
        LambdaForm::Squared => sum * sum,
    };
    let u = (v.v + v.omega * perp(&contact.p) - v.v_bar - v.omega_bar * perp(&contact.q)).dot(&n);
    VelocityState2D {
        v: v.v - n * (u / (m * lambda)),
        v_bar: v.v_bar + n * (u / (m * lambda)),
        omega: v.omega - u * pn / (j * lambda),
        omega_bar: v.omega_bar + u * qn / (j * lambda),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry2d::{contact_data, docd, rotation, CollisionParam2D, ConvexBody2D};
    use crate::sampling;
    use crate::scattering2d::{sigma_canonical, sigma_noncanonical_from};
    use nalgebra::Vector2;

    fn fourier() -> ConvexBody2D {
        ConvexBody2D::support_fourier(&[1.0, 0.0, 0.15, 0.0, 0.0, 0.01], &[0.0, 0.03]).unwrap()
    }

    #[test]
    fn noncanonical_matches_matrix() {
        let mi = MassInertia::new(2.3, 0.7).unwrap();
        let mut rng = sampling::sample_rng(21, 0);
        for _ in 0..200 {
            let d = 0.5 + rand::Rng::random::<f64>(&mut rng);
            let psi = sampling::angle(&mut rng);
            let v = sampling::velocity(&mut rng);
            let s = sigma_noncanonical_from(&mi, d, psi).unwrap();
            let a = elementwise_noncanonical(&mi, d, psi, &v).to_vector();
            assert!((a - s * v.to_vector()).amax() < 1e-10);
        }
    }

    #[test]
    fn noncanonical_fixes_common_translation() {
        let mi = MassInertia::new(1.0, 0.3).unwrap();
        let u = Vector2::new(0.4, -2.0);
        let v = VelocityState2D::new(u, u, 0.0, 0.0);
        assert!((elementwise_noncanonical(&mi, 1.2, 0.9, &v).to_vector() - v.to_vector()).norm() < 1e-14);
    }

    #[test]
    fn noncanonical_rotation_covariance() {
        let mi = MassInertia::new(1.5, 0.4).unwrap();
        let mut rng = sampling::sample_rng(22, 0);
        for _ in 0..50 {
            let v = sampling::velocity(&mut rng);
            let (psi, rot) = (sampling::angle(&mut rng), sampling::angle(&mut rng));
            let r = rotation(rot);
            let rotated = VelocityState2D::new(r * v.v, r * v.v_bar, v.omega, v.omega_bar);
            let a = elementwise_noncanonical(&mi, 1.1, psi + rot, &rotated);
            let b = elementwise_noncanonical(&mi, 1.1, psi, &v);
            assert!((a.v - r * b.v).norm() < 1e-12 && (a.v_bar - r * b.v_bar).norm() < 1e-12);
            assert!((a.omega - b.omega).abs() < 1e-12 && (a.omega_bar - b.omega_bar).abs() < 1e-12);
        }
    }

    #[test]
    fn canonical_impulse_form_matches_matrix() {
        let b = fourier();
        let mi = b.mass_inertia();
        let mut rng = sampling::sample_rng(23, 0);
        for _ in 0..100 {
            let beta = sampling::collision_param(&mut rng);
            let v = sampling::velocity(&mut rng);
            let c = contact_data(&b, &beta).unwrap();
            let s = sigma_canonical(&mi, &b, &beta).unwrap();
            let a = elementwise_canonical(&mi, &c, &v, LambdaForm::Impulse).to_vector();
            assert!((a - s.entries * v.to_vector()).amax() < 1e-8);
        }
    }

    #[test]
    fn canonical_on_disk_is_sphere_exchange() {
        let b = ConvexBody2D::disk(0.5).unwrap();
        let beta = CollisionParam2D::new(0.0, 0.0, 0.0);
        let c = contact_data(&b, &beta).unwrap();
        assert_eq!(c.d, docd(&b, &beta));
        let v = VelocityState2D::new(Vector2::new(1.0, 0.3), Vector2::new(-1.0, 0.0), 2.0, 3.0);
        let out = elementwise_canonical(&b.mass_inertia(), &c, &v, LambdaForm::Impulse);
        assert!((out.v - Vector2::new(-1.0, 0.3)).norm() < 1e-14);
        assert!((out.v_bar - Vector2::new(1.0, 0.0)).norm() < 1e-14);
        assert_eq!((out.omega, out.omega_bar), (2.0, 3.0));
    }
}
