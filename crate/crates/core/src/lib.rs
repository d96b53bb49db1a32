//! Numerical toolkit for the SU(2) character variety of the closed genus-2 surface.
//!
//! Representations are quadruples `(g₁, h₁, g₂, h₂)` of unit quaternions with
//! `[g₁,h₁][g₂,h₂] = I`. The crate provides the Goldman torus action, the moment
//! maps onto the model tetrahedra, a global section with fiber coordinates, the
//! anti-symplectic involution τ, the handle swap σ with a classification of its
//! fixed points, and seeded samplers for all of these.

mod error;
mod tol;

pub mod flows;
pub mod io;
pub mod polytope;
pub mod repvar;
pub mod sampler;
pub mod sigma;
pub mod su2;
pub mod tau;
pub mod verify;

pub use error::{Error, Result};
pub use tol::{Tolerances, DEFAULT_TOLERANCES};
