//! Scattering maps, collision invariants and contact geometry for pairs of
//! congruent two-dimensional convex hard particles, together with the classical
//! three-dimensional hard-sphere case.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry2d`]: reference particles given by support functions, the
//!   distance of closest approach `d_β`, contact data and the gap function `F`.
//! * [`scattering2d`]: the canonical and non-canonical scattering matrices,
//!   their element-wise forms, and sampling-based certification.
//! * [`spheres3d`]: hard-sphere scattering, the energy–momentum chart and the
//!   `so(3)` span probe.
//! * [`reduction`]: the energy–momentum chart for 2D particles and the 4-D/3-D
//!   reflection data it induces.
//! * [`liealg`]: generator curves of the reduced reflection groups and
//!   rank-revealing span computations.
//! * [`invariants`]: residuals of candidate collision invariants and the
//!   nullspace solver that recovers the space of polynomial–Fourier invariants.
//! * [`dynamics`]: event-driven free flight of a particle pair.

pub mod dynamics;
pub mod error;
pub mod geometry2d;
pub mod invariants;
pub mod liealg;
pub mod reduction;
pub mod sampling;
pub mod scattering2d;
pub mod spheres3d;

pub use error::{Error, Result};
pub use geometry2d::{CollisionParam2D, ContactData, ConvexBody2D, MassInertia};
pub use scattering2d::{Family, ScatteringMatrix2D, VelocityState2D};

/// Crate version, embedded in every machine-readable report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
