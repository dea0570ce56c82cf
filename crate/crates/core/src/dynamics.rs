//! Event-driven free flight of a particle pair.
//!
//! Between collisions both particles move with constant linear and angular
//! velocity. Contact is the first root of `F(Y(t))` at which `F` is decreasing;
//! at contact the velocities are replaced by `σ_β V`.

use nalgebra::{Vector2, Vector6};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry2d::{docd, gap_function, gap_gradient, psi_of, CollisionParam2D, ConvexBody2D, MassInertia};
use crate::scattering2d::{angular_momentum_vector, e_hats, sigma, Family, VelocityState2D};

/// Smallest bracketing step.
pub const MIN_STEP: f64 = 1e-4;
/// Width at which root bisection stops.
pub const ROOT_TOL: f64 = 1e-12;
/// `|dF/dt|` below which a contact is treated as grazing.
pub const GRAZING_RATE: f64 = 1e-12;
/// Overlap tolerated in `F`.
pub const OVERLAP_TOL: f64 = 1e-9;
/// Samples of `F` per free-flight segment.
pub const SEGMENT_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticleState {
    pub x: Vector2<f64>,
    pub x_bar: Vector2<f64>,
    pub theta: f64,
    pub theta_bar: f64,
    pub v: VelocityState2D,
    pub t: f64,
}

impl ParticleState {
    /// Configuration `Y = [x, x̄, ϑ, ϑ̄]`.
    pub fn configuration(&self) -> Vector6<f64> {
        Vector6::new(self.x.x, self.x.y, self.x_bar.x, self.x_bar.y, self.theta, self.theta_bar)
    }

    /// Free flight for time `dt`.
    pub fn advanced(&self, dt: f64) -> Self {
        Self {
            x: self.x + dt * self.v.v,
            x_bar: self.x_bar + dt * self.v.v_bar,
            theta: self.theta + dt * self.v.omega,
            theta_bar: self.theta_bar + dt * self.v.omega_bar,
            v: self.v,
            t: self.t + dt,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.configuration().iter().all(|x| x.is_finite()) && self.v.is_finite() && self.t.is_finite()
    }
}

pub fn gap(body: &ConvexBody2D, s: &ParticleState) -> Result<f64> {
    gap_function(body, &s.configuration())
}

/// `dF/dt = ∇F · V` along free flight.
pub fn gap_rate(body: &ConvexBody2D, s: &ParticleState) -> Result<f64> {
    Ok(gap_gradient(body, &s.configuration())?.dot(&s.v.to_vector()))
}

/// Earliest time in `[s.t, t_max]` at which the pair comes into contact while approaching.
pub fn collision_time(body: &ConvexBody2D, s: &ParticleState, t_max: f64) -> Result<Option<f64>> {
    body.require_smooth("collision_time")?;
    if !s.is_finite() {
        return Err(Error::InvalidInput("particle state must be finite".into()));
    }
    let f0 = gap(body, s)?;
    if f0 < -OVERLAP_TOL {
        return Err(Error::InvalidState(format!("initial configuration overlaps (F = {f0:.3e})")));
    }
    let horizon = t_max - s.t;
    if horizon <= 0.0 {
        return Ok(None);
    }
    let r_max = body.circumradius();
    let speed = (s.v.v_bar - s.v.v).norm() + (s.v.omega.abs() + s.v.omega_bar.abs()) * r_max;
    if speed == 0.0 {
        return Ok(None);
    }
    let mut tau = 0.0;
    loop {
        let here = s.advanced(tau);
        let sep = (here.x_bar - here.x).norm();
        let d = docd(body, &CollisionParam2D::new(psi_of(&here.configuration())?, here.theta, here.theta_bar));
        let step = (0.1 * (sep - d).max(0.0) / speed).max(MIN_STEP);
        let next = (tau + step).min(horizon);
        if gap(body, &s.advanced(next))? < 0.0 {
            let (mut lo, mut hi) = (tau, next);
            while hi - lo > ROOT_TOL {
                let mid = 0.5 * (lo + hi);
                if gap(body, &s.advanced(mid))? < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(Some(s.t + lo));
        }
        if next >= horizon {
            return Ok(None);
        }
        tau = next;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryEvent {
    pub t_event: f64,
    pub beta_at_contact: CollisionParam2D,
    pub v_pre: VelocityState2D,
    pub v_post: VelocityState2D,
    pub family: Family,
    pub gap_at_event: f64,
    pub rate_pre: f64,
    pub rate_post: f64,
    pub grazing: bool,
    pub momentum_residual: f64,
    pub angular_residual: f64,
    pub energy_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub events: Vec<TrajectoryEvent>,
    pub truncated: bool,
    /// Smallest `F` over all sampled flight points.
    pub min_sampled_gap: f64,
    pub final_state: ParticleState,
}

impl Trajectory {
    /// Per-event conservation within the scattering certificate tolerances,
    /// non-approaching exits and no sampled overlap.
    pub fn conserves(&self) -> bool {
        self.min_sampled_gap >= -OVERLAP_TOL
            && self.events.iter().all(|e| {
                e.momentum_residual <= 1e-10
                    && e.angular_residual <= 1e-9
                    && e.energy_residual <= 1e-9
                    && e.rate_post >= -1e-10
                    && e.gap_at_event.abs() <= OVERLAP_TOL
            })
    }
}

fn sample_segment(body: &ConvexBody2D, s: &ParticleState, dt: f64) -> Result<f64> {
    let mut worst = f64::INFINITY;
    for k in 0..=SEGMENT_SAMPLES {
        worst = worst.min(gap(body, &s.advanced(dt * k as f64 / SEGMENT_SAMPLES as f64))?);
    }
    Ok(worst)
}

/// Scatter at a contact configuration.
fn scatter(
    body: &ConvexBody2D,
    mi: &MassInertia,
    s: &ParticleState,
    family: Family,
) -> Result<(ParticleState, TrajectoryEvent)> {
    let y = s.configuration();
    let beta = CollisionParam2D::new(psi_of(&y)?, s.theta, s.theta_bar);
    let rate_pre = gap_rate(body, s)?;
    let grazing = rate_pre.abs() < GRAZING_RATE;
    let post = if grazing { s.v } else { sigma(family, mi, body, &beta)?.apply(&s.v) };
    let after = ParticleState { v: post, ..*s };
    let (a, b) = (s.v.to_vector(), post.to_vector());
    let (e1, e2) = e_hats();
    let alpha = angular_momentum_vector(mi, docd(body, &beta), beta.psi);
    let event = TrajectoryEvent {
        t_event: s.t,
        beta_at_contact: beta,
        v_pre: s.v,
        v_post: post,
        family,
        gap_at_event: gap_function(body, &y)?,
        rate_pre,
        rate_post: gap_rate(body, &after)?,
        grazing,
        momentum_residual: (b.dot(&e1) - a.dot(&e1)).abs().max((b.dot(&e2) - a.dot(&e2)).abs()),
        angular_residual: (b.dot(&alpha) - a.dot(&alpha)).abs() / (1.0 + a.norm()),
        energy_residual: (mi.energy(&b) - mi.energy(&a)).abs() / mi.energy(&a).max(f64::MIN_POSITIVE),
    };
    Ok((after, event))
}

/// Alternate free flight and scattering until `horizon` or `max_events`.
pub fn simulate(
    body: &ConvexBody2D,
    mi: &MassInertia,
    init: &ParticleState,
    family: Family,
    horizon: f64,
    max_events: usize,
) -> Result<Trajectory> {
    let mut s = *init;
    let mut events = Vec::new();
    let mut min_gap = gap(body, &s)?;
    loop {
        match collision_time(body, &s, horizon)? {
            None => {
                min_gap = min_gap.min(sample_segment(body, &s, horizon - s.t)?);
                s = s.advanced(horizon - s.t);
                return Ok(Trajectory { events, truncated: false, min_sampled_gap: min_gap, final_state: s });
            }
            Some(t) => {
                if events.len() == max_events {
                    return Ok(Trajectory { events, truncated: true, min_sampled_gap: min_gap, final_state: s });
                }
                min_gap = min_gap.min(sample_segment(body, &s, t - s.t)?);
                s = s.advanced(t - s.t);
                let (after, event) = scatter(body, mi, &s, family)?;
                events.push(event);
                s = after;
                if event.grazing {
                    // Step past the tangency so that the same root is not found again.
                    s = s.advanced(MIN_STEP.min(horizon - s.t));
                }
            }
        }
    }
}

/// Run to the first event, reverse the outgoing velocities and replay: the
/// pair must collide immediately, scatter back to `−V_pre` and return to the
/// initial positions after the same flight time. Returns the largest position
/// or angle error, or `None` if no event occurs before `horizon`.
pub fn reversibility_probe(
    body: &ConvexBody2D,
    mi: &MassInertia,
    init: &ParticleState,
    family: Family,
    horizon: f64,
) -> Result<Option<f64>> {
    let forward = simulate(body, mi, init, family, horizon, 1)?;
    let Some(event) = forward.events.first() else { return Ok(None) };
    let flight = event.t_event - init.t;
    let contact = init.advanced(flight);
    let reversed = ParticleState {
        v: VelocityState2D::from_vector(&-event.v_post.to_vector()),
        t: 0.0,
        ..contact
    };
    let back = simulate(body, mi, &reversed, family, flight, 1)?;
    if back.events.len() != 1 {
        return Err(Error::InvalidState("reversed motion did not re-collide at the contact".into()));
    }
    let end = back.final_state;
    let err = [
        (end.x - init.x).norm(),
        (end.x_bar - init.x_bar).norm(),
        (end.theta - init.theta).abs(),
        (end.theta_bar - init.theta_bar).abs(),
    ];
    Ok(Some(err.into_iter().fold(0.0, f64::max)))
}

/// Two radius-0.5 disks three apart on the x axis, closing at speed 2.
pub fn head_on_disks() -> ParticleState {
    ParticleState {
        x: Vector2::zeros(),
        x_bar: Vector2::new(3.0, 0.0),
        theta: 0.0,
        theta_bar: 0.0,
        v: VelocityState2D::new(Vector2::new(1.0, 0.0), Vector2::new(-1.0, 0.0), 0.0, 0.0),
        t: 0.0,
    }
}

/// Two bodies on parallel tracks four apart, passing each other.
pub fn offset_miss() -> ParticleState {
    ParticleState {
        x: Vector2::zeros(),
        x_bar: Vector2::new(3.0, 4.0),
        theta: 0.0,
        theta_bar: 0.0,
        v: VelocityState2D::new(Vector2::new(1.0, 0.0), Vector2::new(-1.0, 0.0), 0.0, 0.0),
        t: 0.0,
    }
}
