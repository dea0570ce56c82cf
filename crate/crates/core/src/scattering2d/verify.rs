//! Sampling certificate for the defining properties of a physical scattering map.

use nalgebra::{Matrix6, Vector6};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{angular_momentum_vector, e_hats, sigma, unit_normal_n, Family, ScatteringMatrix2D};
use crate::error::Result;
use crate::geometry2d::{docd, CollisionParam2D, ConvexBody2D, MassInertia};
use crate::sampling;

/// Allowed negative value of `σ[V]·N̂` for an approaching `V`.
pub const HALFSPACE_SLACK: f64 = 1e-10;

/// Pass thresholds for a [`VerificationReport`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub det: f64,
    pub momentum: f64,
    /// Relative to `1 + |V|`.
    pub angular: f64,
    /// Relative to `|MV|²`.
    pub energy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { det: 1e-9, momentum: 1e-10, angular: 1e-9, energy: 1e-9 }
    }
}

impl Tolerances {
    pub fn uniform(tol: f64) -> Self {
        Self { det: tol, momentum: tol, angular: tol, energy: tol }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub family: Option<Family>,
    pub body_hash: String,
    pub det_residual: f64,
    pub momentum_residual_max: f64,
    pub angular_residual_max: f64,
    pub energy_residual_max: f64,
    pub halfspace_violations: u64,
    /// Velocities with `V·N̂ ≤ 0` that were checked for the half-space property.
    pub approaching: u64,
    pub samples: u64,
    pub seed: u64,
}

impl VerificationReport {
    pub fn passed(&self, tol: &Tolerances) -> bool {
        self.det_residual <= tol.det
            && self.momentum_residual_max <= tol.momentum
            && self.angular_residual_max <= tol.angular
            && self.energy_residual_max <= tol.energy
            && self.halfspace_violations == 0
    }
}

#[derive(Clone, Copy, Default)]
struct Partial {
    det: f64,
    momentum: f64,
    angular: f64,
    energy: f64,
    violations: u64,
    approaching: u64,
}

impl Partial {
    fn merge(self, o: Self) -> Self {
        Self {
            det: self.det.max(o.det),
            momentum: self.momentum.max(o.momentum),
            angular: self.angular.max(o.angular),
            energy: self.energy.max(o.energy),
            violations: self.violations + o.violations,
            approaching: self.approaching + o.approaching,
        }
    }
}

fn check(
    s: &Matrix6<f64>,
    mi: &MassInertia,
    alpha: &Vector6<f64>,
    normal: &Vector6<f64>,
    v: &Vector6<f64>,
) -> Partial {
    let (e1, e2) = e_hats();
    let out = s * v;
    let momentum = (out.dot(&e1) - v.dot(&e1)).abs().max((out.dot(&e2) - v.dot(&e2)).abs());
    let angular = (out.dot(alpha) - v.dot(alpha)).abs() / (1.0 + v.norm());
    let en = mi.energy(v);
    let energy = if en > 0.0 { (mi.energy(&out) - en).abs() / en } else { mi.energy(&out) };
    let approaching = v.dot(normal) <= 0.0;
    let violation = approaching && out.dot(normal) < -HALFSPACE_SLACK;
    Partial {
        det: 0.0,
        momentum,
        angular,
        energy,
        violations: violation as u64,
        approaching: approaching as u64,
    }
}

/// Certify a fixed matrix `S` at its collision parameter over `n_samples`
/// standard-normal velocities.
pub fn verify_physical(
    s: &ScatteringMatrix2D,
    mi: &MassInertia,
    body: &ConvexBody2D,
    beta: &CollisionParam2D,
    n_samples: u64,
    seed: u64,
) -> Result<VerificationReport> {
    let alpha = angular_momentum_vector(mi, docd(body, beta), beta.psi);
    let normal = unit_normal_n(body, beta)?;
    let p = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sampling::sample_rng(seed, i);
            check(&s.entries, mi, &alpha, &normal, &sampling::normal_vector::<6, _>(&mut rng))
        })
        .reduce(Partial::default, Partial::merge);
    Ok(VerificationReport {
        family: Some(s.family),
        body_hash: body.hash(),
        det_residual: s.det_residual(),
        momentum_residual_max: p.momentum,
        angular_residual_max: p.angular,
        energy_residual_max: p.energy,
        halfspace_violations: p.violations,
        approaching: p.approaching,
        samples: n_samples,
        seed,
    })
}

/// Certify a family over `n_samples` independent draws of `(V, β)`.
pub fn verify_family(
    family: Family,
    mi: &MassInertia,
    body: &ConvexBody2D,
    n_samples: u64,
    seed: u64,
) -> Result<VerificationReport> {
    let p = (0..n_samples)
        .into_par_iter()
        .map(|i| -> Result<Partial> {
            let mut rng = sampling::sample_rng(seed, i);
            let beta = sampling::collision_param(&mut rng);
            let v = sampling::normal_vector::<6, _>(&mut rng);
            let s = sigma(family, mi, body, &beta)?;
            let alpha = angular_momentum_vector(mi, docd(body, &beta), beta.psi);
            let normal = unit_normal_n(body, &beta)?;
            let mut p = check(&s.entries, mi, &alpha, &normal, &v);
            p.det = s.det_residual();
            Ok(p)
        })
        .try_reduce(Partial::default, |a, b| Ok(a.merge(b)))?;
    Ok(VerificationReport {
        family: Some(family),
        body_hash: body.hash(),
        det_residual: p.det,
        momentum_residual_max: p.momentum,
        angular_residual_max: p.angular,
        energy_residual_max: p.energy,
        halfspace_violations: p.violations,
        approaching: p.approaching,
        samples: n_samples,
        seed,
    })
}
