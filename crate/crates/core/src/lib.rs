//! Random walks on wreath products `A ≀ H` with exact word metrics.

pub mod base;
pub mod cli;
pub mod error;
pub mod lamp;
pub mod lemma;
pub mod stats;
pub mod tsp;
pub mod walk;
pub mod wreath;

pub use error::{Error, Result};
