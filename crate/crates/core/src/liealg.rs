//! Rank probes for the Lie algebras of the reduced reflection groups.
//!
//! Differentiating a product of two reflections `s_{β(ψ)} s_{β(ψ₀)}` at
//! `ψ = ψ₀` gives (up to a factor) `∂ψ k̂⊗k̂ − k̂⊗∂ψ k̂`; spans of such
//! generators over a `ψ` grid give lower bounds on the algebra dimension.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry2d::{docd, CollisionParam2D, ConvexBody2D, MassInertia, FD_STEP};
use crate::reduction::{gamma_hat_from, k_hat_from};
use crate::sampling;
use crate::spheres3d::{default_grid, so3_span_probe, So3Probe};

pub const DEFAULT_RANK_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    KHat,
    GammaHat,
    Sphere,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub matrix: DMatrix<f64>,
    pub psi: f64,
    pub provenance: GeneratorKind,
}

impl Generator {
    /// `‖G + Gᵀ‖_max`.
    pub fn antisymmetry_defect(&self) -> f64 {
        (&self.matrix + self.matrix.transpose()).amax()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanReport {
    pub rank: usize,
    /// Descending.
    pub singular_values: Vec<f64>,
    /// Relative to the largest singular value.
    pub threshold: f64,
    pub sample_count: usize,
    /// Smallest retained singular value over the largest discarded one, or over
    /// `threshold · σ_max` when nothing is discarded.
    pub gap: f64,
    pub flagged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn sorted_svd(a: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let values = order.iter().map(|&i| svd.singular_values[i]).collect();
    let rows = DMatrix::from_fn(order.len(), vt.ncols(), |r, c| vt[(order[r], c)]);
    (values, rows)
}

fn stack(mats: &[DMatrix<f64>]) -> Result<DMatrix<f64>> {
    let first = mats.first().ok_or_else(|| Error::InvalidInput("no matrices to span".into()))?;
    let (r, c) = first.shape();
    if mats.iter().any(|m| m.shape() != (r, c)) {
        return Err(Error::InvalidInput("matrices must share one shape".into()));
    }
    Ok(DMatrix::from_fn(mats.len(), r * c, |i, k| mats[i][k]))
}

fn rank_of(values: &[f64], threshold: f64) -> (usize, f64) {
    let max = values.first().copied().unwrap_or(0.0);
    if max <= 0.0 {
        return (0, 0.0);
    }
    let rank = values.iter().filter(|s| **s > threshold * max).count();
    let gap = match rank {
        0 => 0.0,
        r if r < values.len() => values[r - 1] / values[r].max(f64::MIN_POSITIVE),
        r => values[r - 1] / (threshold * max),
    };
    (rank, gap)
}

/// Rank of the linear span of equally shaped matrices.
pub fn span_rank(mats: &[DMatrix<f64>], threshold: f64) -> Result<SpanReport> {
    let (values, _) = sorted_svd(stack(mats)?);
    let (rank, gap) = rank_of(&values, threshold);
    Ok(SpanReport {
        rank,
        singular_values: values,
        threshold,
        sample_count: mats.len(),
        gap,
        flagged: false,
        note: None,
    })
}

/// Distance of each target from the span of `mats` (Frobenius norm).
pub fn span_projection_residuals(
    mats: &[DMatrix<f64>],
    targets: &[DMatrix<f64>],
    threshold: f64,
) -> Vec<f64> {
    let Ok(a) = stack(mats) else { return vec![f64::INFINITY; targets.len()] };
    let (values, rows) = sorted_svd(a);
    let (rank, _) = rank_of(&values, threshold);
    let basis = rows.rows(0, rank).into_owned();
    targets
        .iter()
        .map(|t| {
            let x = DVector::from_column_slice(t.as_slice());
            let coeffs = &basis * &x;
            (&x - basis.transpose() * coeffs).norm()
        })
        .collect()
}

fn curve_generator<const N: usize>(
    f: impl Fn(f64) -> nalgebra::SVector<f64, N>,
    psi: f64,
    h: f64,
) -> DMatrix<f64> {
    let k = f(psi);
    let dk = (f(psi + h) - f(psi - h)) / (2.0 * h);
    let g = dk * k.transpose() - k * dk.transpose();
    DMatrix::from_column_slice(N, N, g.as_slice())
}

pub fn generator4_step(
    mi: &MassInertia,
    body: &ConvexBody2D,
    theta: f64,
    theta_bar: f64,
    psi: f64,
    h: f64,
) -> Result<Generator> {
    body.require_smooth("generator4")?;
    let f = |p: f64| k_hat_from(mi, docd(body, &CollisionParam2D::new(p, theta, theta_bar)), p);
    Ok(Generator { matrix: curve_generator(f, psi, h), psi, provenance: GeneratorKind::KHat })
}

/// `∂ψ k̂⊗k̂ − k̂⊗∂ψ k̂` by central differences, `d_β(ψ)` included.
pub fn generator4(
    mi: &MassInertia,
    body: &ConvexBody2D,
    theta: f64,
    theta_bar: f64,
    psi: f64,
) -> Result<Generator> {
    generator4_step(mi, body, theta, theta_bar, psi, FD_STEP)
}

pub fn generator3_step(
    mi: &MassInertia,
    body: &ConvexBody2D,
    theta: f64,
    theta_bar: f64,
    psi: f64,
    h: f64,
) -> Result<Generator> {
    body.require_smooth("generator3")?;
    let f = |p: f64| gamma_hat_from(mi, docd(body, &CollisionParam2D::new(p, theta, theta_bar)), p);
    Ok(Generator { matrix: curve_generator(f, psi, h), psi, provenance: GeneratorKind::GammaHat })
}

/// `∂ψ γ̂⊗γ̂ − γ̂⊗∂ψ γ̂` by central differences.
pub fn generator3(
    mi: &MassInertia,
    body: &ConvexBody2D,
    theta: f64,
    theta_bar: f64,
    psi: f64,
) -> Result<Generator> {
    generator3_step(mi, body, theta, theta_bar, psi, FD_STEP)
}

/// `K(a, b, c) = [[0,−a,−b,−b],[a,0,−c,−c],[b,c,0,0],[b,c,0,0]]`.
pub fn k_pattern(a: f64, b: f64, c: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(
        4,
        4,
        &[0.0, -a, -b, -b, a, 0.0, -c, -c, b, c, 0.0, 0.0, b, c, 0.0, 0.0],
    )
}

/// Frobenius distance from the three-parameter `K` subspace.
pub fn k_pattern_residual(g: &DMatrix<f64>) -> f64 {
    assert_eq!(g.shape(), (4, 4));
    let a = 0.5 * (g[(1, 0)] - g[(0, 1)]);
    let b = 0.25 * (g[(2, 0)] + g[(3, 0)] - g[(0, 2)] - g[(0, 3)]);
    let c = 0.25 * (g[(2, 1)] + g[(3, 1)] - g[(1, 2)] - g[(1, 3)]);
    (g - k_pattern(a, b, c)).norm()
}

fn psi_grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| TAU * i as f64 / n as f64)
}

/// Rank of `{γ̂_β}` over `grid_size` equally spaced `ψ`.
pub fn gamma_direction_rank(
    mi: &MassInertia,
    body: &ConvexBody2D,
    theta: f64,
    theta_bar: f64,
    grid_size: usize,
) -> Result<SpanReport> {
    body.require_smooth("gamma_direction_rank")?;
    if grid_size == 0 {
        return Err(Error::InvalidInput("ψ grid must be nonempty".into()));
    }
    let rows: Vec<DMatrix<f64>> = psi_grid(grid_size)
        .map(|p| {
            let g = gamma_hat_from(mi, docd(body, &CollisionParam2D::new(p, theta, theta_bar)), p);
            DMatrix::from_column_slice(3, 1, g.as_slice())
        })
        .collect();
    let mut rep = span_rank(&rows, DEFAULT_RANK_THRESHOLD)?;
    if grid_size < 3 {
        rep.flagged = true;
        rep.note = Some("fewer than 3 ψ samples cannot reach rank 3".into());
    }
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSampleReport {
    pub depth: usize,
    pub count: usize,
    pub seed: u64,
    pub max_orthogonality_defect: f64,
    /// Largest `|det g − (−1)^{word length}|`.
    pub max_det_deviation: f64,
    pub det_plus: usize,
    pub det_minus: usize,
    /// Mean `‖g − I‖_F` over sampled elements.
    pub mean_distance_from_identity: f64,
    /// Distinct sampled elements, up to `1e-9` in max norm.
    pub distinct_elements: usize,
}

/// Random words of length `1..=depth` in the given reflections.
pub fn group_sample(
    generators: &[DMatrix<f64>],
    depth: usize,
    count: usize,
    seed: u64,
) -> Result<GroupSampleReport> {
    let first = generators.first().ok_or_else(|| Error::InvalidInput("no generators".into()))?;
    let n = first.nrows();
    if generators.iter().any(|g| g.shape() != (n, n)) {
        return Err(Error::InvalidInput("generators must be square of a common size".into()));
    }
    if depth == 0 || count == 0 {
        return Err(Error::InvalidInput("depth and count must be positive".into()));
    }
    let samples: Vec<(usize, DMatrix<f64>)> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = sampling::sample_rng(seed, i as u64);
            let len = rng.random_range(1..=depth);
            let mut g = DMatrix::identity(n, n);
            for _ in 0..len {
                g = &generators[rng.random_range(0..generators.len())] * g;
            }
            (len, g)
        })
        .collect();
    let id = DMatrix::<f64>::identity(n, n);
    let mut rep = GroupSampleReport {
        depth,
        count,
        seed,
        max_orthogonality_defect: 0.0,
        max_det_deviation: 0.0,
        det_plus: 0,
        det_minus: 0,
        mean_distance_from_identity: 0.0,
        distinct_elements: 0,
    };
    let mut distinct: Vec<&DMatrix<f64>> = Vec::new();
    for (len, g) in &samples {
        rep.max_orthogonality_defect = rep.max_orthogonality_defect.max((g.transpose() * g - &id).norm());
        let det = g.determinant();
        let expected = if len % 2 == 0 { 1.0 } else { -1.0 };
        rep.max_det_deviation = rep.max_det_deviation.max((det - expected).abs());
        if det > 0.0 {
            rep.det_plus += 1;
        } else {
            rep.det_minus += 1;
        }
        rep.mean_distance_from_identity += (g - &id).norm() / count as f64;
        if !distinct.iter().any(|h| (*h - g).amax() <= 1e-9) {
            distinct.push(g);
        }
    }
    rep.distinct_elements = distinct.len();
    Ok(rep)
}

/// Ranks at one orientation pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrientationProbe {
    pub theta: f64,
    pub theta_bar: f64,
    pub k_span: SpanReport,
    pub gamma_span: SpanReport,
    pub gamma_direction: SpanReport,
    pub k_pattern_residual_max: f64,
    pub antisymmetry_defect_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LieReport {
    pub orientation_grid: usize,
    pub psi_samples: usize,
    pub k_rank_min: usize,
    pub gamma_span_rank_min: usize,
    pub gamma_direction_rank_min: usize,
    pub so3_rank: usize,
    pub gap_min: f64,
    pub k_pattern_residual_max: f64,
    pub antisymmetry_defect_max: f64,
    pub so3: So3Probe,
    pub orientations: Vec<OrientationProbe>,
    pub flagged: bool,
}

impl LieReport {
    pub fn passed(&self) -> bool {
        !self.flagged
            && self.orientations.iter().all(|o| {
                o.k_span.rank == 3 && o.gamma_span.rank == 3 && o.gamma_direction.rank == 3
            })
            && self.so3.passed()
            && self.gap_min >= 10.0
            && self.k_pattern_residual_max <= 1e-8
            && self.antisymmetry_defect_max <= 1e-10
    }
}

pub fn probe_orientation(
    mi: &MassInertia,
    body: &ConvexBody2D,
    theta: f64,
    theta_bar: f64,
    psi_samples: usize,
) -> Result<OrientationProbe> {
    if psi_samples == 0 {
        return Err(Error::InvalidInput("ψ grid must be nonempty".into()));
    }
    let mut g4 = Vec::with_capacity(psi_samples);
    let mut g3 = Vec::with_capacity(psi_samples);
    for p in psi_grid(psi_samples) {
        g4.push(generator4(mi, body, theta, theta_bar, p)?);
        g3.push(generator3(mi, body, theta, theta_bar, p)?);
    }
    let pattern = g4.iter().map(|g| k_pattern_residual(&g.matrix)).fold(0.0, f64::max);
    let anti = g4.iter().chain(&g3).map(Generator::antisymmetry_defect).fold(0.0, f64::max);
    let mats4: Vec<_> = g4.into_iter().map(|g| g.matrix).collect();
    let mats3: Vec<_> = g3.into_iter().map(|g| g.matrix).collect();
    let mut k_span = span_rank(&mats4, DEFAULT_RANK_THRESHOLD)?;
    let mut gamma_span = span_rank(&mats3, DEFAULT_RANK_THRESHOLD)?;
    if psi_samples < 3 {
        for r in [&mut k_span, &mut gamma_span] {
            r.flagged = true;
            r.note = Some("fewer than 3 ψ samples cannot reach rank 3".into());
        }
    }
    Ok(OrientationProbe {
        theta,
        theta_bar,
        k_span,
        gamma_span,
        gamma_direction: gamma_direction_rank(mi, body, theta, theta_bar, psi_samples)?,
        k_pattern_residual_max: pattern,
        antisymmetry_defect_max: anti,
    })
}

/// All rank probes over an `n × n` grid of `(ϑ, ϑ̄)`, plus the sphere `so(3)` probe.
pub fn lie_probe(
    mi: &MassInertia,
    body: &ConvexBody2D,
    orientation_grid: usize,
    psi_samples: usize,
) -> Result<LieReport> {
    if orientation_grid == 0 {
        return Err(Error::InvalidInput("orientation grid must be nonempty".into()));
    }
    let pairs: Vec<(f64, f64)> = psi_grid(orientation_grid)
        .flat_map(|a| psi_grid(orientation_grid).map(move |b| (a, b)))
        .collect();
    let orientations = pairs
        .par_iter()
        .map(|&(a, b)| probe_orientation(mi, body, a, b, psi_samples))
        .collect::<Result<Vec<_>>>()?;
    let so3 = so3_span_probe(&default_grid(8))?;
    let min_rank = |f: fn(&OrientationProbe) -> usize| orientations.iter().map(f).min().unwrap_or(0);
    let gap_min = orientations
        .iter()
        .flat_map(|o| [o.k_span.gap, o.gamma_span.gap, o.gamma_direction.gap])
        .chain([so3.span.gap])
        .fold(f64::INFINITY, f64::min);
    Ok(LieReport {
        orientation_grid,
        psi_samples,
        k_rank_min: min_rank(|o| o.k_span.rank),
        gamma_span_rank_min: min_rank(|o| o.gamma_span.rank),
        gamma_direction_rank_min: min_rank(|o| o.gamma_direction.rank),
        so3_rank: so3.span.rank,
        gap_min,
        k_pattern_residual_max: orientations.iter().map(|o| o.k_pattern_residual_max).fold(0.0, f64::max),
        antisymmetry_defect_max: orientations.iter().map(|o| o.antisymmetry_defect_max).fold(0.0, f64::max),
        flagged: orientations
            .iter()
            .any(|o| o.k_span.flagged || o.gamma_span.flagged || o.gamma_direction.flagged),
        so3,
        orientations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::reflection4;

    fn unit_disk() -> ConvexBody2D {
        ConvexBody2D::disk(0.5).unwrap().with_mass_inertia(MassInertia::new(1.0, 1.0).unwrap())
    }

    fn fourier() -> ConvexBody2D {
        ConvexBody2D::support_fourier(&[1.0, 0.0, 0.15, 0.0, 0.0, 0.01], &[0.0, 0.03]).unwrap()
    }

    #[test]
    fn disk_generator4_by_hand() {
        // d = 1 for the radius-0.5 disk; m = J = 1.
        let b = unit_disk();
        let g = generator4(&b.mass_inertia(), &b, 0.0, 0.0, 0.0).unwrap().matrix;
        let a = 1.0 / 5f64.sqrt();
        let bb = 2f64.sqrt() / 5f64.sqrt();
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, -a * a, a * bb, a * bb, a * a, 0.0, 0.0, 0.0, -a * bb, 0.0, 0.0, 0.0, -a * bb,
                0.0, 0.0, 0.0,
            ],
        );
        assert!((g - expected).amax() < 1e-9);
    }

    #[test]
    fn disk_generator3_pattern() {
        let b = unit_disk();
        let g = generator3(&b.mass_inertia(), &b, 0.0, 0.0, 0.0).unwrap().matrix;
        assert!(g[(0, 1)].abs() > 0.1 && g[(0, 2)].abs() > 0.1);
        assert!(g[(1, 2)].abs() < 1e-12);
        assert!((&g + g.transpose()).amax() < 1e-15);
    }

    #[test]
    fn generator3_richardson() {
        let b = fourier();
        let mi = b.mass_inertia();
        let a = generator3_step(&mi, &b, 0.4, 1.1, 2.0, 1e-4).unwrap().matrix;
        let c = generator3_step(&mi, &b, 0.4, 1.1, 2.0, 5e-5).unwrap().matrix;
        assert!((a - c).amax() < 1e-6);
    }

    #[test]
    fn generator4_lies_in_k_pattern() {
        let b = fourier();
        let mi = b.mass_inertia();
        for i in 0..20 {
            let g = generator4(&mi, &b, 0.3 * i as f64, 1.7 * i as f64, 0.77 * i as f64).unwrap();
            assert!(k_pattern_residual(&g.matrix) < 1e-8);
            assert!(g.antisymmetry_defect() < 1e-10);
        }
    }

    #[test]
    fn single_generator_has_rank_one() {
        let b = fourier();
        let g = generator4(&b.mass_inertia(), &b, 0.0, 0.0, 0.3).unwrap();
        assert_eq!(span_rank(&[g.matrix], DEFAULT_RANK_THRESHOLD).unwrap().rank, 1);
        assert!(span_rank(&[], DEFAULT_RANK_THRESHOLD).is_err());
    }

    #[test]
    fn ranks_on_a_generic_orientation() {
        let b = fourier();
        let o = probe_orientation(&b.mass_inertia(), &b, 0.5, 2.0, 64).unwrap();
        assert_eq!((o.k_span.rank, o.gamma_span.rank, o.gamma_direction.rank), (3, 3, 3));
        assert!(o.k_span.gap > 1e3 && o.gamma_span.gap > 1e3);
    }

    #[test]
    fn two_point_grid_is_flagged() {
        let b = unit_disk();
        let r = gamma_direction_rank(&b.mass_inertia(), &b, 0.0, 0.0, 2).unwrap();
        assert!(r.rank <= 2 && r.flagged);
    }

    #[test]
    fn group_words() {
        let b = fourier();
        let mi = b.mass_inertia();
        let gens: Vec<_> = (0..5)
            .map(|i| {
                let beta = CollisionParam2D::new(i as f64, 0.2, 0.9);
                let k = k_hat_from(&mi, docd(&b, &beta), beta.psi);
                DMatrix::from_column_slice(4, 4, reflection4(&k).as_slice())
            })
            .collect();
        let r = group_sample(&gens, 32, 400, 3).unwrap();
        assert!(r.max_orthogonality_defect < 1e-9);
        assert!(r.max_det_deviation < 1e-9);
        let one = group_sample(&gens[..1], 8, 200, 3).unwrap();
        assert_eq!(one.distinct_elements, 2);
    }
}
