//! Planar n-body laboratory built around the harmonic potential `U = (M/2) I`.
//!
//! * [`mechanics`]: masses, configurations, potentials and the scalar invariants `I`, `U`, `H`.
//! * [`dynamics`]: integration of `m_i q̈_i = -∂U/∂q_i` and closed-form solutions.
//! * [`central_config`]: central-configuration residuals, refinement on `I = k`, and the
//!   isosceles three-body continuum.
//! * [`saari`]: relative-equilibrium detection by orthogonal rigid fitting and the
//!   constant-inertia rhombus counterexample.
//!
//! Batch work (family sweeps, per-sample rigid fits, random corpora) runs on rayon when the
//! `parallel` feature is enabled and falls back to plain iterators otherwise. See [`exec`].

pub mod central_config;
pub mod corpus;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod mechanics;
pub mod saari;

pub use error::{Error, Result};
pub use mechanics::{MassVector, MutualDistanceTable, PhaseState, PlanarConfiguration, Point, Potential};
