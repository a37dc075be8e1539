//! Numerical laboratory for critical normal random matrix ensembles.

pub mod error;
pub mod geometry;
pub mod growth;
pub mod lattice;
pub mod mcmc;
pub mod ode;
pub mod output;
pub mod painleve;
pub mod poly;
pub mod scenario;
pub mod spectral;

pub use error::{Error, Result};
pub use geometry::{ConformalMap, Cusp, MomentVector};
