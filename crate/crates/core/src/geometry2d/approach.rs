//! Distance of closest approach and contact data.
//!
//! With `t = φ − ψ` the angle between a trial normal `e(φ)` and the centre line,
//! `d_β = min_{|t|<π/2} h_D(ψ+t) / cos t` where
//! `h_D(φ) = h(φ − ϑ) + h(φ + π − ϑ̄)` is the support function of the Minkowski
//! difference `R(ϑ)P* − R(ϑ̄)P*`.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use super::{e, rotation, CollisionParam2D, ConvexBody2D};
use crate::error::Result;

/// Grid resolution used to seed the golden-section search.
pub const DOCD_GRID: usize = 1024;
/// Central-difference step for partial derivatives of `d_β`.
pub const FD_STEP: f64 = 1e-5;

const GOLDEN_TOL: f64 = 1e-10;

/// Touching configuration of the two bodies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactData {
    /// Unit normal at the contact, pointing from the unbarred into the barred body.
    pub n: Vector2<f64>,
    /// Contact point relative to the unbarred centre.
    pub p: Vector2<f64>,
    /// Contact point relative to the barred centre.
    pub q: Vector2<f64>,
    pub d: f64,
}

fn ratio(body: &ConvexBody2D, beta: &CollisionParam2D, t: f64) -> f64 {
    let phi = beta.psi + t;
    (body.support_value(phi - beta.theta) + body.support_value(phi + PI - beta.theta_bar)) / t.cos()
}

/// Minimizer `t*` and value via grid seeding and golden-section refinement.
fn grid_golden(body: &ConvexBody2D, beta: &CollisionParam2D) -> (f64, f64) {
    let step = PI / DOCD_GRID as f64;
    let node = |i: usize| -FRAC_PI_2 + (i as f64 + 0.5) * step;
    let (mut best_i, mut best) = (0, f64::INFINITY);
    for i in 0..DOCD_GRID {
        let f = ratio(body, beta, node(i));
        if f < best {
            best = f;
            best_i = i;
        }
    }
    let mut lo = if best_i == 0 { -FRAC_PI_2 + 0.25 * step } else { node(best_i - 1) };
    let mut hi = if best_i + 1 == DOCD_GRID { FRAC_PI_2 - 0.25 * step } else { node(best_i + 1) };
    let mut best_t = node(best_i);

    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (ratio(body, beta, x1), ratio(body, beta, x2));
    while hi - lo > GOLDEN_TOL {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = ratio(body, beta, x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = ratio(body, beta, x2);
        }
        for (t, f) in [(x1, f1), (x2, f2)] {
            if f < best {
                best = f;
                best_t = t;
            }
        }
    }
    (best_t, best)
}

/// Smooth bodies: the stationarity condition
/// `g(t) = h_D′ cos t + h_D sin t = 0` has `g′ = (h_D + h_D″) cos t > 0`,
/// so it has exactly one root, found by safeguarded Newton iteration.
fn smooth_minimizer(body: &ConvexBody2D, beta: &CollisionParam2D) -> (f64, f64) {
    if let Some(r) = body.disk_radius() {
        return (0.0, 2.0 * r);
    }
    let jet_d = |t: f64| {
        let phi = beta.psi + t;
        let a = body.support_jet(phi - beta.theta).expect("smooth body");
        let b = body.support_jet(phi + PI - beta.theta_bar).expect("smooth body");
        (a.h + b.h, a.dh + b.dh, a.d2h + b.d2h)
    };
    let (mut lo, mut hi, mut t) = (-FRAC_PI_2, FRAC_PI_2, 0.0);
    for _ in 0..200 {
        let (h, dh, d2h) = jet_d(t);
        let (s, c) = t.sin_cos();
        let g = dh * c + h * s;
        if g == 0.0 {
            break;
        }
        if g < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let dg = (h + d2h) * c;
        let mut next = t - g / dg;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let done = (next - t).abs() <= 4.0 * f64::EPSILON * (1.0 + t.abs()) || hi - lo <= f64::EPSILON;
        t = next;
        if done {
            break;
        }
    }
    (t, jet_d(t).0 / t.cos())
}

/// Distance of closest approach `d_β`.
///
/// Disks are exact, smooth bodies use the stationarity root, polygons use the
/// grid-seeded golden-section search.
pub fn docd(body: &ConvexBody2D, beta: &CollisionParam2D) -> f64 {
    if body.is_strictly_convex() {
        smooth_minimizer(body, beta).1
    } else {
        grid_golden(body, beta).1
    }
}

/// `d_β` by derivative-free grid seeding and golden-section search, for any body.
pub fn docd_grid_golden(body: &ConvexBody2D, beta: &CollisionParam2D) -> f64 {
    grid_golden(body, beta).1
}

/// Central-difference partials `(∂ψ d, ∂ϑ d, ∂ϑ̄ d)` with step `h`.
pub fn docd_partials_step(
    body: &ConvexBody2D,
    beta: &CollisionParam2D,
    h: f64,
) -> Result<(f64, f64, f64)> {
    body.require_smooth("docd_partials")?;
    let (p, t, tb) = (beta.psi, beta.theta, beta.theta_bar);
    let diff = |plus: CollisionParam2D, minus: CollisionParam2D| {
        (docd(body, &plus) - docd(body, &minus)) / (2.0 * h)
    };
    Ok((
        diff(CollisionParam2D::new(p + h, t, tb), CollisionParam2D::new(p - h, t, tb)),
        diff(CollisionParam2D::new(p, t + h, tb), CollisionParam2D::new(p, t - h, tb)),
        diff(CollisionParam2D::new(p, t, tb + h), CollisionParam2D::new(p, t, tb - h)),
    ))
}

/// Partial derivatives of `d_β` by central differences with step [`FD_STEP`].
pub fn docd_partials(body: &ConvexBody2D, beta: &CollisionParam2D) -> Result<(f64, f64, f64)> {
    docd_partials_step(body, beta, FD_STEP)
}

/// Partial derivatives of `d_β` from the envelope theorem at the minimizer:
/// `∂ψ d = −d tan t*`, `∂ϑ d = −h′(φ*−ϑ)/cos t*`, `∂ϑ̄ d = −h′(φ*+π−ϑ̄)/cos t*`.
pub fn docd_partials_envelope(
    body: &ConvexBody2D,
    beta: &CollisionParam2D,
) -> Result<(f64, f64, f64)> {
    body.require_smooth("docd_partials_envelope")?;
    let (t, d) = smooth_minimizer(body, beta);
    let phi = beta.psi + t;
    let a = body.support_jet(phi - beta.theta).expect("smooth body");
    let b = body.support_jet(phi + PI - beta.theta_bar).expect("smooth body");
    let c = t.cos();
    Ok((-d * t.tan(), -a.dh / c, -b.dh / c))
}

/// Contact normal and contact points at `d_β`.
pub fn contact_data(body: &ConvexBody2D, beta: &CollisionParam2D) -> Result<ContactData> {
    body.require_smooth("contact_data")?;
    let (t, d) = smooth_minimizer(body, beta);
    let phi = beta.psi + t;
    let p = rotation(beta.theta) * body.support_point(phi - beta.theta);
    Ok(ContactData { n: e(phi), p, q: p - d * beta.e_psi(), d })
}
