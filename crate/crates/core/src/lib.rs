//! Event-driven Monte Carlo laboratory for one-dimensional Kac-type particle
//! systems with true binary (Bird-type) interactions.
//!
//! The crate is organized bottom-up:
//!
//! - [`model`]: interaction laws, initial laws and the moment exponents
//!   `c(q)`, `q*`, `c̄(p, q)`.
//! - [`events`]: the Poisson point measure driving every system, with
//!   per-particle restricted views.
//! - [`particles`]: the Bird N-particle system and a Nanbu variant.
//! - [`reference`]: exact samples of the limit law via the Wild/McKean
//!   branching recursion, packaged as quantile-queryable pools.
//! - [`coupling`]: the optimally coupled nonlinear processes `U` and the
//!   decoupled independent system `V`.
//! - [`metrics`]: exact 1D Wasserstein distances, moment statistics and
//!   power-law fitting.
//! - [`harness`]: experiment configuration, orchestration, CSV reports and
//!   the acceptance recipes.

pub mod coupling;
pub mod error;
pub mod events;
pub mod harness;
pub mod metrics;
pub mod model;
pub mod particles;
pub mod quadrature;
pub mod reference;
pub mod rng;

pub use error::{Error, Result};
