//! Flood-prediction toolkit core: quantum-circuit simulation, kernel and
//! variational models, QUBO ensemble selection, classical baselines, and the
//! hydrological data pipeline they all share.

pub mod bench;
pub mod classical;
pub mod error;
pub mod hydrodata;
pub mod persist;
pub mod qboost;
pub mod qkernel;
pub mod qsim;
pub mod vqml;

pub use error::{Error, Result};
