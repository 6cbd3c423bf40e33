//! Coverage analysis and placement optimization for triangulating sensors.

mod error;
pub mod coverage;
pub mod estimator;
pub mod export;
pub mod fixtures;
pub mod geom;
pub mod index;
pub mod optimizer;
pub mod scenario;

pub use error::{Error, Result};
