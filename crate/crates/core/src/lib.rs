//! Non-stationary (s,S) inventory policies for single-item stochastic lot
//! sizing with normally distributed demand.

pub mod error;
pub mod heuristics;
pub mod instance;
pub mod loss;
pub mod model;
pub mod normal;
pub mod sdp;
pub mod simulate;
pub mod solver;
pub mod testbed;

pub use error::{Error, Result};
pub use instance::{CostParameters, Instance, NormalDemand, PolicyParameters};
