//! Dependence of invariants on the reduced sphere coordinates.
//!
//! Through the energy–momentum chart, the pair functional of an invariant
//! becomes a function on the unit sphere `S³` (or `S²` for hard spheres).
//! Comparing it at distinct points with a matched reduced coordinate probes how
//! it depends on position; for true invariants it is constant there.

use nalgebra::{Rotation3, Unit, Vector2, Vector4};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::basis::{BasisFunction, BasisSpec, SphereMonomial};
use super::nullspace::{nullspace_solve, sphere_nullspace_solve};
use crate::error::Result;
use crate::geometry2d::{ConvexBody2D, MassInertia};
use crate::reduction::{h_p, EnergyMomentum2};
use crate::sampling;
use crate::scattering2d::Family;
use crate::spheres3d::{h_sphere, split, EnergyMomentum3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedCheck {
    pub discrepancy: f64,
    pub kernel_dimension: usize,
    pub pairs: u64,
    pub seed: u64,
}

/// A second unit vector with the same `y₃y₄` (hence the same `1 + 2y₃y₄`) that
/// differs from `y` in every other respect.
fn matched_partner(y: &Vector4<f64>, rng: &mut ChaCha8Rng) -> Vector4<f64> {
    let (a, b) = (y[2], y[3]);
    let mut pair = (b, a);
    for _ in 0..32 {
        let lambda: f64 = rng.random_range(0.5..2.0);
        let (c, d) = (a * lambda, b / lambda);
        if c * c + d * d < 1.0 {
            pair = (c, d);
            break;
        }
    }
    let rest = (1.0 - pair.0 * pair.0 - pair.1 * pair.1).max(0.0).sqrt();
    let dir = sampling::unit_vector::<2, _>(rng) * rest;
    Vector4::new(dir.x, dir.y, pair.0, pair.1)
}

fn pair_value(functions: &[BasisFunction], c: &[f64], h: &nalgebra::Vector6<f64>, th: f64, thb: f64) -> f64 {
    let (v, vb) = (Vector2::new(h[0], h[1]), Vector2::new(h[2], h[3]));
    functions
        .iter()
        .zip(c)
        .map(|(f, k)| k * (f.eval(&v, h[4], th) + f.eval(&vb, h[5], thb)))
        .sum()
}

/// Largest change of the pair functional of any of the given coefficient
/// vectors between matched points of the chart at `em`.
pub fn reduced_discrepancy(
    functions: &[BasisFunction],
    kernel: &[Vec<f64>],
    em: &EnergyMomentum2,
    pairs: u64,
    seed: u64,
) -> Result<f64> {
    (0..pairs)
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let mut rng = sampling::sample_rng(seed, i);
            let (th, thb) = (sampling::angle(&mut rng), sampling::angle(&mut rng));
            let y = sampling::unit_vector::<4, _>(&mut rng);
            let y2 = matched_partner(&y, &mut rng);
            let (h, h2) = (h_p(em, &y)?, h_p(em, &y2)?);
            Ok(kernel
                .iter()
                .map(|c| (pair_value(functions, c, &h, th, thb) - pair_value(functions, c, &h2, th, thb)).abs())
                .fold(0.0, f64::max))
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// Solve for the invariants of `family` (Fourier order 1) and measure their
/// dependence on the reduced coordinates at `em`.
pub fn reduced_dependence_check(
    family: Family,
    mi: &MassInertia,
    body: &ConvexBody2D,
    em: &EnergyMomentum2,
    n_samples: u64,
    seed: u64,
) -> Result<ReducedCheck> {
    let spec = BasisSpec { fourier_order: 1, cross_terms: false };
    let solve_samples = n_samples.max(10 * spec.len() as u64);
    let ns = nullspace_solve(family, mi, body, &spec, solve_samples, solve_samples, seed)?;
    let d = reduced_discrepancy(&spec.functions(), &ns.basis_coefficients, em, n_samples, seed.wrapping_add(1))?;
    Ok(ReducedCheck { discrepancy: d, kernel_dimension: ns.dimension, pairs: n_samples, seed })
}

/// Hard-sphere analogue: compare the pair functional at `y` and `Qy` for random rotations `Q`.
pub fn sphere_reduced_discrepancy(
    kernel: &[Vec<f64>],
    em: &EnergyMomentum3,
    pairs: u64,
    seed: u64,
) -> Result<f64> {
    let fns = SphereMonomial::all();
    let value = |c: &[f64], h: &nalgebra::Vector6<f64>| {
        let (v, vb) = split(h);
        fns.iter().zip(c).map(|(f, k)| k * (f.eval(&v) + f.eval(&vb))).sum::<f64>()
    };
    (0..pairs)
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let mut rng = sampling::sample_rng(seed, i);
            let y = sampling::unit_vector::<3, _>(&mut rng);
            let axis = Unit::new_normalize(sampling::unit_vector::<3, _>(&mut rng));
            let q = Rotation3::from_axis_angle(&axis, sampling::angle(&mut rng));
            let (h, h2) = (h_sphere(em, &y)?, h_sphere(em, &(q * y))?);
            Ok(kernel.iter().map(|c| (value(c, &h) - value(c, &h2)).abs()).fold(0.0, f64::max))
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

pub fn sphere_reduced_dependence_check(
    em: &EnergyMomentum3,
    n_samples: u64,
    seed: u64,
) -> Result<ReducedCheck> {
    let samples = n_samples.max(100);
    let ns = sphere_nullspace_solve(samples, samples, seed)?;
    let d = sphere_reduced_discrepancy(&ns.basis_coefficients, em, n_samples, seed.wrapping_add(1))?;
    Ok(ReducedCheck { discrepancy: d, kernel_dimension: ns.dimension, pairs: n_samples, seed })
}
