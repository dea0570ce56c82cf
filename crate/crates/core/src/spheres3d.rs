//! Hard spheres of unit mass and diameter.
//!
//! `σ_n = I₆ − 2 ν̂_n⊗ν̂_n` with `ν̂_n = [n, −n]/√2`. The energy–momentum chart
//! `H(e, p, y) = ½[p − √(2e²−|p|²) y, p + √(2e²−|p|²) y]` carries it to the
//! reflection `s_n = I₃ − 2 n⊗n` on the sphere of `y`.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, Matrix3, Matrix6, Vector3, Vector6};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liealg::{span_rank, SpanReport, DEFAULT_RANK_THRESHOLD};
use crate::sampling;

/// Unit collision direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normal3 {
    n: Vector3<f64>,
}

impl Normal3 {
    pub fn new(n: Vector3<f64>) -> Result<Self> {
        if !n.iter().all(|x| x.is_finite()) || (n.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput("collision direction must be a unit vector".into()));
        }
        Ok(Self { n })
    }

    /// Normalizes a nonzero vector.
    pub fn from_direction(v: &Vector3<f64>) -> Result<Self> {
        let len = v.norm();
        if !(len.is_finite() && len > 0.0) {
            return Err(Error::InvalidInput("collision direction must be nonzero".into()));
        }
        Ok(Self { n: v / len })
    }

    /// `n(θ₁, θ₂) = (cos θ₁ sin θ₂, sin θ₁ sin θ₂, cos θ₂)`.
    pub fn from_angles(theta1: f64, theta2: f64) -> Self {
        Self { n: sphere_point(theta1, theta2) }
    }

    pub fn vector(&self) -> Vector3<f64> {
        self.n
    }
}

pub fn sphere_point(theta1: f64, theta2: f64) -> Vector3<f64> {
    let (s1, c1) = theta1.sin_cos();
    let (s2, c2) = theta2.sin_cos();
    Vector3::new(c1 * s2, s1 * s2, c2)
}

/// Admissible energy–momentum pair, `e² > |p|²/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyMomentum3 {
    pub e: f64,
    pub p: Vector3<f64>,
}

impl EnergyMomentum3 {
    pub fn new(e: f64, p: Vector3<f64>) -> Result<Self> {
        if !(e.is_finite() && e > 0.0 && p.iter().all(|x| x.is_finite())) {
            return Err(Error::Domain("energy must be positive and momentum finite".into()));
        }
        if e * e <= 0.5 * p.norm_squared() {
            return Err(Error::Domain(format!(
                "(e, p) not admissible: e² = {} ≤ |p|²/2 = {}",
                e * e,
                0.5 * p.norm_squared()
            )));
        }
        Ok(Self { e, p })
    }

    fn radius(&self) -> f64 {
        (2.0 * self.e * self.e - self.p.norm_squared()).sqrt()
    }
}

/// `ν̂_n = [n, −n]/√2`.
pub fn nu_hat(n: &Normal3) -> Vector6<f64> {
    nu_scaled(n, FRAC_1_SQRT_2)
}

fn nu_scaled(n: &Normal3, scale: f64) -> Vector6<f64> {
    let v = n.n * scale;
    Vector6::new(v.x, v.y, v.z, -v.x, -v.y, -v.z)
}

pub fn sigma_sphere(n: &Normal3) -> Matrix6<f64> {
    let nu = nu_hat(n);
    Matrix6::identity() - 2.0 * nu * nu.transpose()
}

/// `I₃ − 2 n⊗n`.
pub fn s_matrix(n: &Normal3) -> Matrix3<f64> {
    Matrix3::identity() - 2.0 * n.n * n.n.transpose()
}

pub fn elementwise_sphere(
    n: &Normal3,
    v: &Vector3<f64>,
    v_bar: &Vector3<f64>,
) -> (Vector3<f64>, Vector3<f64>) {
    let k = (v - v_bar).dot(&n.n) * n.n;
    (v - k, v_bar + k)
}

pub fn concat(v: &Vector3<f64>, v_bar: &Vector3<f64>) -> Vector6<f64> {
    Vector6::new(v.x, v.y, v.z, v_bar.x, v_bar.y, v_bar.z)
}

pub fn split(x: &Vector6<f64>) -> (Vector3<f64>, Vector3<f64>) {
    (Vector3::new(x[0], x[1], x[2]), Vector3::new(x[3], x[4], x[5]))
}

pub fn h_sphere(em: &EnergyMomentum3, y: &Vector3<f64>) -> Result<Vector6<f64>> {
    if y.norm() == 0.0 || !y.iter().all(|x| x.is_finite()) {
        return Err(Error::InvalidInput("chart argument y must be nonzero".into()));
    }
    let a = em.radius();
    Ok(concat(&(0.5 * (em.p - a * y)), &(0.5 * (em.p + a * y))))
}

/// Recover `y` from `H(e, p, y)`.
pub fn h_sphere_inverse(em: &EnergyMomentum3, h: &Vector6<f64>) -> Vector3<f64> {
    let (v, vb) = split(h);
    (vb - v) / em.radius()
}

/// `‖σ_n H(e,p,y) − H(e,p, s_n y)‖`.
pub fn intertwine_sphere(em: &EnergyMomentum3, y: &Vector3<f64>, n: &Normal3) -> Result<f64> {
    let lhs = sigma_sphere(n) * h_sphere(em, y)?;
    let rhs = h_sphere(em, &(s_matrix(n) * y))?;
    Ok((lhs - rhs).norm())
}

/// The two generators `∂_{θⱼ} n⊗n − n⊗∂_{θⱼ} n` at one grid point.
pub fn so3_generators(theta1: f64, theta2: f64) -> [Matrix3<f64>; 2] {
    let n = sphere_point(theta1, theta2);
    let (s1, c1) = theta1.sin_cos();
    let (s2, c2) = theta2.sin_cos();
    let d1 = Vector3::new(-s1 * s2, c1 * s2, 0.0);
    let d2 = Vector3::new(c1 * c2, s1 * c2, -s2);
    [d1 * n.transpose() - n * d1.transpose(), d2 * n.transpose() - n * d2.transpose()]
}

/// Standard basis `A₁, A₂, A₃` of `so(3)`: `e₁⊗e₂ − e₂⊗e₁`, `e₁⊗e₃ − e₃⊗e₁`, `e₂⊗e₃ − e₃⊗e₂`.
pub fn so3_basis() -> [Matrix3<f64>; 3] {
    let mut out = [Matrix3::zeros(); 3];
    for (k, (i, j)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
        out[k][(i, j)] = 1.0;
        out[k][(j, i)] = -1.0;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct So3Probe {
    pub span: SpanReport,
    /// Distance of each of `A₁, A₂, A₃` from the span of the generators.
    pub basis_residuals: [f64; 3],
}

impl So3Probe {
    pub fn passed(&self) -> bool {
        self.span.rank == 3 && self.basis_residuals.iter().all(|r| *r <= 1e-10)
    }
}

/// Span of the generator curves over a grid of `(θ₁, θ₂)`.
pub fn so3_span_probe(grid: &[(f64, f64)]) -> Result<So3Probe> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty angle grid".into()));
    }
    let mats: Vec<DMatrix<f64>> = grid
        .iter()
        .flat_map(|&(a, b)| so3_generators(a, b))
        .map(|g| DMatrix::from_column_slice(3, 3, g.as_slice()))
        .collect();
    let mut span = span_rank(&mats, DEFAULT_RANK_THRESHOLD)?;
    span.sample_count = grid.len();
    if grid.len() < 6 {
        span.flagged = true;
        span.note = Some("fewer than 6 grid points".into());
    }
    let basis = so3_basis().map(|a| DMatrix::from_column_slice(3, 3, a.as_slice()));
    let residuals = crate::liealg::span_projection_residuals(&mats, &basis, DEFAULT_RANK_THRESHOLD);
    Ok(So3Probe { span, basis_residuals: [residuals[0], residuals[1], residuals[2]] })
}

/// `n × n` grid avoiding the poles: `θ₁ = 2πi/n`, `θ₂ = π(j + ½)/n`.
pub fn default_grid(n: usize) -> Vec<(f64, f64)> {
    use std::f64::consts::{PI, TAU};
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (TAU * i as f64 / n as f64, PI * (j as f64 + 0.5) / n as f64)))
        .collect()
}

/// Outcome of the full hard-sphere check suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereSuiteReport {
    pub samples: u64,
    pub seed: u64,
    pub corrupted_normalization: bool,
    pub reflection_defect_max: f64,
    pub det_residual_max: f64,
    pub momentum_residual_max: f64,
    pub energy_residual_max: f64,
    pub penetration_violations: u64,
    pub elementwise_residual_max: f64,
    pub intertwine_residual_max: f64,
    pub chart_inverse_residual_max: f64,
    pub so3: So3Probe,
    pub passed: bool,
}

#[derive(Default, Clone, Copy)]
struct SuitePartial {
    refl: f64,
    det: f64,
    mom: f64,
    en: f64,
    pen: u64,
    elem: f64,
    inter: f64,
    inv: f64,
}

/// Runs every hard-sphere check over `samples` random draws. With `corrupt`
/// set, `ν̂` loses its `1/√2` normalization (negative control).
pub fn sphere_suite(samples: u64, seed: u64, corrupt: bool) -> Result<SphereSuiteReport> {
    let scale = if corrupt { 1.0 } else { FRAC_1_SQRT_2 };
    let p = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<SuitePartial> {
            let mut rng = sampling::sample_rng(seed, i);
            let n = Normal3::new(sampling::unit_vector::<3, _>(&mut rng))?;
            let nu = nu_scaled(&n, scale);
            let sig = Matrix6::identity() - 2.0 * nu * nu.transpose();
            let s = s_matrix(&n);
            let x = sampling::normal_vector::<6, _>(&mut rng);
            let out = sig * x;
            let (v, vb) = split(&x);
            let (w, wb) = split(&out);
            let (ew, ewb) = elementwise_sphere(&n, &v, &vb);
            let approaching = (v - vb).dot(&n.n) <= 0.0;
            let pen = approaching && (w - wb).dot(&n.n) < -1e-12;
            let e = 1.0 + rand::Rng::random::<f64>(&mut rng);
            let frac = 0.95 * rand::Rng::random::<f64>(&mut rng);
            let pm = sampling::unit_vector::<3, _>(&mut rng) * (std::f64::consts::SQRT_2 * e * frac);
            let em = EnergyMomentum3::new(e, pm)?;
            let y = sampling::unit_vector::<3, _>(&mut rng);
            let h = h_sphere(&em, &y)?;
            let inter = (sig * h - h_sphere(&em, &(s * y))?).norm();
            Ok(SuitePartial {
                refl: (sig * sig - Matrix6::identity()).norm().max((s * s - Matrix3::identity()).norm()),
                det: (sig.determinant() + 1.0).abs().max((s.determinant() + 1.0).abs()),
                mom: ((w + wb) - (v + vb)).amax(),
                en: (out.norm_squared() - x.norm_squared()).abs() / x.norm_squared(),
                pen: pen as u64,
                elem: (concat(&ew, &ewb) - out).amax(),
                inter,
                inv: (h_sphere_inverse(&em, &h) - y).norm(),
            })
        })
        .try_reduce(SuitePartial::default, |a, b| {
            Ok(SuitePartial {
                refl: a.refl.max(b.refl),
                det: a.det.max(b.det),
                mom: a.mom.max(b.mom),
                en: a.en.max(b.en),
                pen: a.pen + b.pen,
                elem: a.elem.max(b.elem),
                inter: a.inter.max(b.inter),
                inv: a.inv.max(b.inv),
            })
        })?;
    let so3 = so3_span_probe(&default_grid(8))?;
    let passed = p.refl <= 1e-12
        && p.det <= 1e-12
        && p.mom <= 1e-12
        && p.en <= 1e-12
        && p.pen == 0
        && p.elem <= 1e-12
        && p.inter <= 1e-10
        && p.inv <= 1e-10
        && so3.passed();
    Ok(SphereSuiteReport {
        samples,
        seed,
        corrupted_normalization: corrupt,
        reflection_defect_max: p.refl,
        det_residual_max: p.det,
        momentum_residual_max: p.mom,
        energy_residual_max: p.en,
        penetration_violations: p.pen,
        elementwise_residual_max: p.elem,
        intertwine_residual_max: p.inter,
        chart_inverse_residual_max: p.inv,
        so3,
        passed,
    })
}
