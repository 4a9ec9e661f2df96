//! Capillary rise with wall slip.
//!
//! The dimensionless height `H(T)` of a liquid column in a tube obeys
//!
//! ```text
//! ω (H H')' + β H H' + H = 1,    H(0) = α,  H'(0) = 0,
//! ```
//!
//! where `ω` weighs inertia against gravity and `β = (1 + 4L/R)⁻¹` encodes the
//! slip length `L`. The crate works in `u = H²/2` and `s = T/√ω`, where the
//! model is regular at `H = 0`:
//!
//! ```text
//! u'' + (β/√ω) u' + √(2u) = 1.
//! ```
//!
//! * [`params`] turns physical inputs into `(ω, β, α)`.
//! * [`dynamics`] holds the right-hand sides and the reduced regimes.
//! * [`integrate`] produces sampled trajectories.
//! * [`volterra`] solves the equivalent integral equation by Picard iteration.
//! * [`stability`] covers the equilibrium, the Lyapunov function and the basin.
//! * [`verify`] runs the built-in invariant and acceptance checks.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod dynamics;
pub mod error;
pub mod integrate;
pub mod params;
pub mod regime;
pub mod report;
pub mod solver;
pub mod stability;
pub mod verify;
pub mod volterra;

pub use error::{Error, Result};
pub use integrate::{integrate, IntegrateOptions, Trajectory};
pub use params::{nondimensionalize, ModelParams, PhysicalParams};
pub use stability::{basin, linearize};
