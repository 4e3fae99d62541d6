pub mod anomaly;
pub mod checkpoint;
pub mod dae;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod ocsvm;
pub mod pipeline;
pub mod rng;
pub mod sim;
pub mod trace;

pub use error::{Error, Result};
