pub mod config;
pub mod data;
pub mod error;
pub mod estimators;
pub mod eval;
pub mod experiment;
pub mod geometry;
pub mod mechanisms;
pub mod protocol;
pub mod scheme;
pub mod spatial;

pub use error::{Error, Result};
