//! Linear physical scattering maps for a pair of congruent 2D particles.
//!
//! Velocities are concatenated as `V = [v, v̄, ω, ω̄] ∈ R⁶`. Both families are
//! `M`-conjugated reflections, `σ = M⁻¹ R M` with `R ∈ O(6)` and `det σ = −1`:
//!
//! * the canonical map reflects `M V` through the hyperplane orthogonal to the
//!   contact normal `M⁻¹∇F`;
//! * the non-canonical map fixes `span{Ê₁, Ê₂, Ê_β}` and negates its complement.

mod elementwise;
mod verify;

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix6, Vector2, Vector6};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry2d::{
    contact_configuration, docd, e, gap_gradient, perp, CollisionParam2D, ConvexBody2D,
    MassInertia,
};

pub use elementwise::{elementwise_canonical, elementwise_noncanonical, LambdaForm};
pub use verify::{
    verify_family, verify_physical, Tolerances, VerificationReport, HALFSPACE_SLACK,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "canonical")]
    Canonical,
    #[serde(rename = "noncanonical")]
    NonCanonical,
}

impl Family {
    pub const ALL: [Family; 2] = [Family::Canonical, Family::NonCanonical];
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Canonical => "canonical",
            Family::NonCanonical => "noncanonical",
        })
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "canonical" => Ok(Family::Canonical),
            "noncanonical" | "non-canonical" => Ok(Family::NonCanonical),
            other => Err(Error::InvalidInput(format!("unknown scattering family '{other}'"))),
        }
    }
}

/// Linear and angular velocities of both particles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityState2D {
    pub v: Vector2<f64>,
    pub v_bar: Vector2<f64>,
    pub omega: f64,
    pub omega_bar: f64,
}

impl VelocityState2D {
    pub fn new(v: Vector2<f64>, v_bar: Vector2<f64>, omega: f64, omega_bar: f64) -> Self {
        Self { v, v_bar, omega, omega_bar }
    }

    pub fn zero() -> Self {
        Self::from_vector(&Vector6::zeros())
    }

    pub fn from_vector(x: &Vector6<f64>) -> Self {
        Self { v: Vector2::new(x[0], x[1]), v_bar: Vector2::new(x[2], x[3]), omega: x[4], omega_bar: x[5] }
    }

    pub fn to_vector(&self) -> Vector6<f64> {
        Vector6::new(self.v.x, self.v.y, self.v_bar.x, self.v_bar.y, self.omega, self.omega_bar)
    }

    pub fn is_finite(&self) -> bool {
        self.to_vector().iter().all(|x| x.is_finite())
    }
}

/// A scattering matrix tagged with the family and collision parameter that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringMatrix2D {
    pub entries: Matrix6<f64>,
    pub family: Family,
    pub beta: CollisionParam2D,
    pub mass_inertia: MassInertia,
}

impl ScatteringMatrix2D {
    pub fn apply(&self, v: &VelocityState2D) -> VelocityState2D {
        VelocityState2D::from_vector(&(self.entries * v.to_vector()))
    }

    pub fn det_residual(&self) -> f64 {
        (self.entries.determinant() + 1.0).abs()
    }

    /// `‖GᵀG − I‖_F` with `G = M S M⁻¹`.
    pub fn orthogonality_defect(&self) -> f64 {
        let g = self.mass_inertia.matrix() * self.entries * self.mass_inertia.inverse_matrix();
        (g.transpose() * g - Matrix6::identity()).norm()
    }

    /// `‖S² − I‖_F`.
    pub fn involution_defect(&self) -> f64 {
        (self.entries * self.entries - Matrix6::identity()).norm()
    }
}

/// `Ê₁ = (1,0,1,0,0,0)/√2` and `Ê₂ = (0,1,0,1,0,0)/√2`.
pub fn e_hats() -> (Vector6<f64>, Vector6<f64>) {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    (Vector6::new(r, 0.0, r, 0.0, 0.0, 0.0), Vector6::new(0.0, r, 0.0, r, 0.0, 0.0))
}

/// `Ê_β` for explicit `d` and `ψ`.
pub fn e_beta_from(mi: &MassInertia, d: f64, psi: f64) -> Vector6<f64> {
    let (s, c) = psi.sin_cos();
    let (sm, sj) = (mi.m.sqrt(), mi.j.sqrt());
    let norm = (2.0 * mi.m * d * d + 8.0 * mi.j).sqrt();
    Vector6::new(sm * d * s, -sm * d * c, -sm * d * s, sm * d * c, 2.0 * sj, 2.0 * sj) / norm
}

pub fn e_beta(mi: &MassInertia, body: &ConvexBody2D, beta: &CollisionParam2D) -> Vector6<f64> {
    e_beta_from(mi, docd(body, beta), beta.psi)
}

/// `∇F` at the contact configuration `[0, 0, d_β e(ψ), ϑ, ϑ̄]`.
pub fn contact_gradient(body: &ConvexBody2D, beta: &CollisionParam2D) -> Result<Vector6<f64>> {
    gap_gradient(body, &contact_configuration(body, beta))
}

/// Geometric unit normal `N̂_β = ∇F/|∇F|`; approaching states have `V·N̂_β ≤ 0`.
pub fn unit_normal_n(body: &ConvexBody2D, beta: &CollisionParam2D) -> Result<Vector6<f64>> {
    Ok(contact_gradient(body, beta)?.normalize())
}

/// Unit normal of the canonical reflection in `M`-scaled velocity space,
/// `M⁻¹∇F / |M⁻¹∇F|`.
pub fn reflection_normal(
    mi: &MassInertia,
    body: &ConvexBody2D,
    beta: &CollisionParam2D,
) -> Result<Vector6<f64>> {
    let g = contact_gradient(body, beta)?;
    Ok(g.component_div(&mi.diag()).normalize())
}

fn conjugated_reflection(mi: &MassInertia, n: &Vector6<f64>) -> Matrix6<f64> {
    mi.inverse_matrix() * (Matrix6::identity() - 2.0 * n * n.transpose()) * mi.matrix()
}

/// Canonical scattering matrix `M⁻¹(I − 2 n̂⊗n̂)M` with `n̂ = M⁻¹∇F / |M⁻¹∇F|`.
pub fn sigma_canonical(
    mi: &MassInertia,
    body: &ConvexBody2D,
    beta: &CollisionParam2D,
) -> Result<ScatteringMatrix2D> {
    let n = reflection_normal(mi, body, beta)?;
    Ok(ScatteringMatrix2D {
        entries: conjugated_reflection(mi, &n),
        family: Family::Canonical,
        beta: *beta,
        mass_inertia: *mi,
    })
}

/// `M⁻¹(I − 2 N̂⊗N̂)M` with the unweighted geometric normal. Conserves angular
/// momentum only when `m = J` or `∂ψ d_β = 0`; kept for comparison.
pub fn sigma_canonical_geometric(
    mi: &MassInertia,
    body: &ConvexBody2D,
    beta: &CollisionParam2D,
) -> Result<ScatteringMatrix2D> {
    let n = unit_normal_n(body, beta)?;
    Ok(ScatteringMatrix2D {
        entries: conjugated_reflection(mi, &n),
        family: Family::Canonical,
        beta: *beta,
        mass_inertia: *mi,
    })
}

/// Non-canonical scattering matrix for explicit `d` and `ψ`.
pub fn sigma_noncanonical_from(mi: &MassInertia, d: f64, psi: f64) -> Result<Matrix6<f64>> {
    let (e1, e2) = e_hats();
    let eb = e_beta_from(mi, d, psi);
    let worst = [e1.dot(&e2), e1.dot(&eb), e2.dot(&eb)].iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if worst >= 1e-12 {
        return Err(Error::InvalidState(format!("Ê₁, Ê₂, Ê_β not orthonormal (dot {worst:.3e})")));
    }
    let p = 2.0 * (e1 * e1.transpose() + e2 * e2.transpose() + eb * eb.transpose());
    Ok(mi.inverse_matrix() * (p - Matrix6::identity()) * mi.matrix())
}

pub fn sigma_noncanonical(
    mi: &MassInertia,
    body: &ConvexBody2D,
    beta: &CollisionParam2D,
) -> Result<ScatteringMatrix2D> {
    Ok(ScatteringMatrix2D {
        entries: sigma_noncanonical_from(mi, docd(body, beta), beta.psi)?,
        family: Family::NonCanonical,
        beta: *beta,
        mass_inertia: *mi,
    })
}

pub fn sigma(
    family: Family,
    mi: &MassInertia,
    body: &ConvexBody2D,
    beta: &CollisionParam2D,
) -> Result<ScatteringMatrix2D> {
    match family {
        Family::Canonical => sigma_canonical(mi, body, beta),
        Family::NonCanonical => sigma_noncanonical(mi, body, beta),
    }
}

pub fn apply(s: &ScatteringMatrix2D, v: &VelocityState2D) -> VelocityState2D {
    s.apply(v)
}

/// Angular momentum functional `α = [0, 0, m d e(ψ)^⊥, J, J]` about the unbarred centre.
pub fn angular_momentum_vector(mi: &MassInertia, d: f64, psi: f64) -> Vector6<f64> {
    let ep = perp(&e(psi)) * (mi.m * d);
    Vector6::new(0.0, 0.0, ep.x, ep.y, mi.j, mi.j)
}

/// Orientation of the perpendicular used when reading `e(ψ)^⊥`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerpConvention {
    /// `(−sin ψ, cos ψ)`
    Counterclockwise,
    /// `(sin ψ, −cos ψ)`
    Clockwise,
}

/// The unweighted functional `[0, 0, −d e(ψ)^⊥, J, J]` under a chosen perpendicular.
pub fn unweighted_alpha(mi: &MassInertia, d: f64, psi: f64, conv: PerpConvention) -> Vector6<f64> {
    let ep = match conv {
        PerpConvention::Counterclockwise => perp(&e(psi)),
        PerpConvention::Clockwise => -perp(&e(psi)),
    };
    let a = -d * ep;
    Vector6::new(0.0, 0.0, a.x, a.y, mi.j, mi.j)
}
