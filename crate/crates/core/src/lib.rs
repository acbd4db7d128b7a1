pub mod config;
pub mod dynamics;
pub mod energy;
pub mod error;
pub mod experiments;
pub mod field;
pub mod jet;

pub use error::{Error, Result};
