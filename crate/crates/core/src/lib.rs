//! Geometry-matching GANs: generate from the shape of a data manifold rather
//! than its density, and align two datasets' manifolds with importance-weighted
//! cycle-consistent adversarial training plus a geometry-preservation loss.

pub mod autodiff;
pub mod data;
pub mod error;
pub mod eval;
pub mod gan;
pub mod manifest;
pub mod manifold;
pub mod mgm;
pub mod nn;
pub mod partition;
pub mod rng;
pub mod scenarios;

pub use error::{GeomError, Result};
