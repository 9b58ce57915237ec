//! Coverage and spatial-throughput analysis for downlink networks where base
//! stations are assisted by passive intelligent reflecting surfaces.

pub mod channel;
pub mod config;
pub mod coverage;
pub mod error;
pub mod interference;
pub mod model;
pub mod signal;
pub mod specfun;

pub use error::{Error, Result};
pub use model::{CostModel, RawParams, Regime, SystemParams};
