pub mod cli;
pub mod derivations;
pub mod error;
pub mod group;
pub mod lifting;
pub mod report;
pub mod sample;
pub mod trigpoly;
pub mod truncops;

pub use error::{Error, Result};
