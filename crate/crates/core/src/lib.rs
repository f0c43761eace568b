//! Solver and verifier for the singular boundary value problem
//!
//! ```text
//! u'' = u² / (8 t²) + λ / 2  on (0, 1/2],   u(t)/t bounded at 0⁺,
//! ```
//!
//! with either `u(1/2) = 0` or `u(1/2) = u'(1/2)`, which arises from the
//! radially symmetric stationary form of an epitaxial growth model.
//!
//! The crate provides a shooting solver with a series launch at the singular
//! endpoint, validators based on integral identities, a λ sweep with fold
//! location, closed-form existence and nonexistence certificates, and a
//! strip-constrained relaxation solver used as an independent cross-check.

pub mod certificates;
pub mod cli;
pub mod continuation;
pub mod error;
pub mod integrator;
pub mod io;
pub mod model;
pub mod quadrature;
pub mod shooting;

pub use error::{Error, Result};
pub use integrator::{AcceptedTrajectory, ValidationReport};
pub use model::{BoundaryKind, ProblemSpec, RadialProfile, Trajectory};
pub use shooting::{find_shooting_roots, RootSet};
