//! Constrained matrix invertibility, staircase persistence modules and the
//! interleaving problems that connect them.

pub mod ci;
pub mod cli;
pub mod error;
pub mod field;
pub mod interleaving;
pub mod onesided;
pub mod presentation;
pub mod rational;
pub mod sat;
pub mod staircase;

pub use error::{Error, Result};
