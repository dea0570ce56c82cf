//! Collision invariants: residuals of candidate functions and the
//! rank-revealing solve for the space of invariants within a finite basis.
//!
//! A function `φ(v, ω, ϑ)` is a collision invariant when
//! `φ(v′, ω′, ϑ) + φ(v̄′, ω̄′, ϑ̄) = φ(v, ω, ϑ) + φ(v̄, ω̄, ϑ̄)` for every
//! collision. Over a basis of Fourier modes in `ϑ` and low-degree velocity
//! monomials the residuals are linear in the coefficients, so the invariants
//! form the kernel of a sampled residual matrix.

mod basis;
mod nullspace;
mod reduced;

pub use basis::{
    characterized_family, residual, BasisFunction, BasisSpec, CandidateInvariant, FourierTerm,
    Monomial, SphereMonomial,
};
pub use nullspace::{
    nullspace_solve, sphere_nullspace_solve, NullspaceResult, KERNEL_THRESHOLD, MIN_GAP,
    VALIDATION_TOLERANCE,
};
pub use reduced::{
    reduced_dependence_check, reduced_discrepancy, sphere_reduced_dependence_check,
    sphere_reduced_discrepancy, ReducedCheck,
};
