//! Numerical verification of the L²-index formula for Dirac operators on
//! Taub-NUT space twisted by diagonal instanton connections.
//!
//! The crate is organised along the chain of the computation:
//!
//! - [`geometry`]: the Taub-NUT metric, its conformal and homotopy
//!   modifications to an exact d-metric, pointwise curvature and the Hodge star.
//! - [`charclasses`]: Pontryagin and Chern densities reduced to radial
//!   integrals, with deterministic composite quadrature and tail bounds.
//! - [`gauge`]: abelian anti-self-dual model connections, their field
//!   strengths, the bulk action and boundary holonomy data.
//! - [`eta`]: the boundary Dirac family on the Hopf fibration and the
//!   η̂-form by a heat-kernel mode sum, a Poisson-dual series and the
//!   Bernoulli closed form.
//! - [`index`]: assembly of bulk, gravitational and boundary terms and the
//!   integrality diagnostics.
//! - [`cli`]: configuration, orchestration and report emission behind the
//!   `tn-index` binary.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod charclasses;
pub mod cli;
pub mod error;
pub mod eta;
pub mod gauge;
pub mod geometry;
pub mod index;
pub mod scalar;

pub use error::{Error, Result};
