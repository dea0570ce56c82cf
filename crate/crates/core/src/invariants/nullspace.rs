use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::basis::{BasisFunction, BasisSpec, Monomial, SphereMonomial};
use crate::error::{Error, Result};
use crate::geometry2d::{ConvexBody2D, MassInertia};
use crate::sampling;
use crate::scattering2d::{sigma, Family};
use crate::spheres3d::{sigma_sphere, split, Normal3};

/// Singular values at or below this fraction of the largest span the kernel.
pub const KERNEL_THRESHOLD: f64 = 1e-8;
/// Smallest acceptable ratio between the last retained and first kernel singular value.
pub const MIN_GAP: f64 = 10.0;
/// Bound on a kernel element's residual relative to the scale of its values.
pub const VALIDATION_TOLERANCE: f64 = 1e-8;

const VALIDATION_SALT: u64 = 0x5851_f42d_4c95_7f2d;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullspaceResult {
    /// `canonical`, `noncanonical` or `sphere`.
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_spec: Option<BasisSpec>,
    pub basis_names: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body_hash: Option<String>,
    pub dimension: usize,
    pub expected_dimension: usize,
    /// Unit-norm kernel vectors in the coefficients of the listed basis.
    pub basis_coefficients: Vec<Vec<f64>>,
    /// Descending, of the column-equilibrated residual matrix.
    pub singular_values: Vec<f64>,
    pub threshold: f64,
    pub gap: f64,
    pub inconclusive: bool,
    pub validation_residuals: Vec<f64>,
    pub validation_samples: u64,
    /// Largest distance of a known invariant from the computed kernel.
    pub recovery_residual: f64,
    pub sample_count: u64,
    pub seed: u64,
}

impl NullspaceResult {
    pub fn validated(&self) -> bool {
        self.validation_residuals.iter().all(|r| *r <= VALIDATION_TOLERANCE)
    }

    pub fn passed(&self) -> bool {
        !self.inconclusive
            && self.dimension == self.expected_dimension
            && self.validated()
            && self.recovery_residual <= 1e-6
    }
}

/// Residual row and the basis values at both pre-collision states.
struct Row {
    residual: Vec<f64>,
    pre_a: Vec<f64>,
    pre_b: Vec<f64>,
}

struct Solved {
    dimension: usize,
    singular_values: Vec<f64>,
    gap: f64,
    /// Kernel vectors in equilibrated coordinates (orthonormal).
    kernel_scaled: Vec<DVector<f64>>,
    scales: Vec<f64>,
}

fn assemble<F>(n: u64, seed: u64, row: &F) -> Result<Vec<Row>>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Result<Row> + Sync,
{
    (0..n)
        .into_par_iter()
        .map(|i| row(&mut sampling::sample_rng(seed, i)))
        .collect()
}

fn solve(rows: &[Row], p: usize) -> Solved {
    let n = rows.len();
    let scales: Vec<f64> = (0..p)
        .map(|j| {
            let m2 = rows.iter().map(|r| r.pre_a[j].powi(2) + r.pre_b[j].powi(2)).sum::<f64>()
                / (2 * n) as f64;
            if m2 > 0.0 {
                m2.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    let a = DMatrix::from_fn(n, p, |i, j| rows[i].residual[j] / scales[j]);
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let max = values[0];
    let retained = values.iter().filter(|s| **s > KERNEL_THRESHOLD * max).count();
    let gap = if max == 0.0 {
        f64::MAX
    } else if retained == values.len() {
        values[retained - 1] / (KERNEL_THRESHOLD * max)
    } else {
        values[retained - 1] / values[retained].max(f64::MIN_POSITIVE)
    };
    let kernel_scaled = order[retained..]
        .iter()
        .map(|&i| vt.row(i).transpose().into_owned())
        .collect();
    Solved { dimension: p - retained, singular_values: values, gap, kernel_scaled, scales }
}

fn unscale(v: &DVector<f64>, scales: &[f64]) -> Vec<f64> {
    let c = DVector::from_fn(v.len(), |j, _| v[j] / scales[j]);
    let c = &c / c.norm();
    c.iter().copied().collect()
}

fn validation_residuals(kernel: &[Vec<f64>], rows: &[Row]) -> Vec<f64> {
    kernel
        .iter()
        .map(|c| {
            let dot = |x: &[f64]| x.iter().zip(c).map(|(a, b)| a * b).sum::<f64>();
            let (mut worst, mut m2) = (0.0f64, 0.0);
            for r in rows {
                worst = worst.max(dot(&r.residual).abs());
                m2 += dot(&r.pre_a).powi(2) + dot(&r.pre_b).powi(2);
            }
            let scale = (m2 / (2 * rows.len()) as f64).sqrt();
            if scale > 0.0 {
                worst / scale
            } else {
                worst
            }
        })
        .collect()
}

/// Largest relative distance of the expected invariants from the kernel span.
fn recovery_residual(expected: &[Vec<f64>], solved: &Solved) -> f64 {
    expected
        .iter()
        .map(|c| {
            let x = DVector::from_fn(c.len(), |j, _| c[j] * solved.scales[j]);
            let mut r = x.clone();
            for k in &solved.kernel_scaled {
                r -= k * k.dot(&x);
            }
            r.norm() / x.norm()
        })
        .fold(0.0, f64::max)
}

struct Problem<'a, F> {
    family: String,
    names: Vec<String>,
    expected: Vec<Vec<f64>>,
    basis_spec: Option<BasisSpec>,
    body_hash: Option<String>,
    row: &'a F,
}

fn run<F>(problem: Problem<'_, F>, n_samples: u64, validation_samples: u64, seed: u64) -> Result<NullspaceResult>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Result<Row> + Sync,
{
    let p = problem.names.len();
    if n_samples < 10 * p as u64 {
        return Err(Error::InvalidInput(format!(
            "need at least {} samples for {p} basis functions, got {n_samples}",
            10 * p
        )));
    }
    if validation_samples == 0 {
        return Err(Error::InvalidInput("validation sample count must be positive".into()));
    }
    let rows = assemble(n_samples, seed, problem.row)?;
    let solved = solve(&rows, p);
    let kernel: Vec<Vec<f64>> = solved.kernel_scaled.iter().map(|v| unscale(v, &solved.scales)).collect();
    let fresh = assemble(validation_samples, seed ^ VALIDATION_SALT, problem.row)?;
    Ok(NullspaceResult {
        family: problem.family,
        basis_spec: problem.basis_spec,
        basis_names: problem.names,
        body_hash: problem.body_hash,
        dimension: solved.dimension,
        expected_dimension: problem.expected.len(),
        validation_residuals: validation_residuals(&kernel, &fresh),
        recovery_residual: recovery_residual(&problem.expected, &solved),
        basis_coefficients: kernel,
        inconclusive: solved.gap < MIN_GAP,
        gap: solved.gap,
        singular_values: solved.singular_values,
        threshold: KERNEL_THRESHOLD,
        validation_samples,
        sample_count: n_samples,
        seed,
    })
}

/// Kernel of the sampled residual matrix of a 2D family over `basis`.
pub fn nullspace_solve(
    family: Family,
    mi: &MassInertia,
    body: &ConvexBody2D,
    basis: &BasisSpec,
    n_samples: u64,
    validation_samples: u64,
    seed: u64,
) -> Result<NullspaceResult> {
    let fns = basis.functions();
    let p = fns.len();
    let row = |rng: &mut rand_chacha::ChaCha8Rng| -> Result<Row> {
        let beta = sampling::collision_param(rng);
        let v = sampling::velocity(rng);
        let out = sigma(family, mi, body, &beta)?.apply(&v);
        let mut r = Row { residual: vec![0.0; p], pre_a: vec![0.0; p], pre_b: vec![0.0; p] };
        for (j, f) in fns.iter().enumerate() {
            let a = f.eval(&v.v, v.omega, beta.theta);
            let b = f.eval(&v.v_bar, v.omega_bar, beta.theta_bar);
            r.residual[j] = (f.eval(&out.v, out.omega, beta.theta) - a)
                + (f.eval(&out.v_bar, out.omega_bar, beta.theta_bar) - b);
            r.pre_a[j] = a;
            r.pre_b[j] = b;
        }
        Ok(r)
    };
    let unit = |pick: &dyn Fn(&BasisFunction) -> f64| fns.iter().map(pick).collect::<Vec<f64>>();
    let mut expected: Vec<Vec<f64>> = basis
        .fourier_terms()
        .into_iter()
        .map(|t| unit(&|f| (*f == BasisFunction::Fourier(t)) as u8 as f64))
        .collect();
    expected.push(unit(&|f| (*f == BasisFunction::Monomial(Monomial::V1)) as u8 as f64));
    expected.push(unit(&|f| (*f == BasisFunction::Monomial(Monomial::V2)) as u8 as f64));
    expected.push(unit(&|f| match f {
        BasisFunction::Monomial(Monomial::V1V1 | Monomial::V2V2) => mi.m,
        BasisFunction::Monomial(Monomial::WW) => mi.j,
        _ => 0.0,
    }));
    run(
        Problem {
            family: family.to_string(),
            names: fns.iter().map(BasisFunction::name).collect(),
            expected,
            basis_spec: Some(*basis),
            body_hash: Some(body.hash()),
            row: &row,
        },
        n_samples,
        validation_samples,
        seed,
    )
}

/// Kernel for hard spheres over the ten monomials of degree at most two.
pub fn sphere_nullspace_solve(
    n_samples: u64,
    validation_samples: u64,
    seed: u64,
) -> Result<NullspaceResult> {
    let fns = SphereMonomial::all();
    let p = fns.len();
    let row = |rng: &mut rand_chacha::ChaCha8Rng| -> Result<Row> {
        let n = Normal3::new(sampling::unit_vector::<3, _>(rng))?;
        let x = sampling::normal_vector::<6, _>(rng);
        let (v, vb) = split(&x);
        let (w, wb) = split(&(sigma_sphere(&n) * x));
        let mut r = Row { residual: vec![0.0; p], pre_a: vec![0.0; p], pre_b: vec![0.0; p] };
        for (j, f) in fns.iter().enumerate() {
            r.pre_a[j] = f.eval(&v);
            r.pre_b[j] = f.eval(&vb);
            r.residual[j] = (f.eval(&w) - r.pre_a[j]) + (f.eval(&wb) - r.pre_b[j]);
        }
        Ok(r)
    };
    let pick = |want: &dyn Fn(&SphereMonomial) -> f64| fns.iter().map(want).collect::<Vec<f64>>();
    let expected = vec![
        pick(&|f| (*f == SphereMonomial::One) as u8 as f64),
        pick(&|f| (*f == SphereMonomial::V(0)) as u8 as f64),
        pick(&|f| (*f == SphereMonomial::V(1)) as u8 as f64),
        pick(&|f| (*f == SphereMonomial::V(2)) as u8 as f64),
        pick(&|f| matches!(f, SphereMonomial::Square(_)) as u8 as f64),
    ];
    run(
        Problem {
            family: "sphere".into(),
            names: fns.iter().map(SphereMonomial::name).collect(),
            expected,
            basis_spec: None,
            body_hash: None,
            row: &row,
        },
        n_samples,
        validation_samples,
        seed,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_kernel_is_five_dimensional() {
        let r = sphere_nullspace_solve(2000, 2000, 1).unwrap();
        assert_eq!(r.dimension, 5, "{:?}", r.singular_values);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn noncanonical_order_one() {
        let b = ConvexBody2D::support_fourier(&[1.0, 0.0, 0.15], &[0.0, 0.03]).unwrap();
        let spec = BasisSpec { fourier_order: 1, cross_terms: false };
        let r = nullspace_solve(Family::NonCanonical, &b.mass_inertia(), &b, &spec, 1200, 1000, 2).unwrap();
        assert_eq!(r.dimension, 6, "{:?}", r.singular_values);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn undersampling_is_rejected() {
        let b = ConvexBody2D::disk(0.5).unwrap();
        let spec = BasisSpec { fourier_order: 0, cross_terms: false };
        assert!(nullspace_solve(Family::NonCanonical, &b.mass_inertia(), &b, &spec, 50, 10, 0).is_err());
    }
}
