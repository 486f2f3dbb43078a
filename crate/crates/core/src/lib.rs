//! Digital projective product spaces, their motion planners, and exact
//! brute-force d-cat / d-TC for small digital images.

pub mod cli;
pub mod error;
pub mod homotopy;
pub mod image;
pub mod oracle;
pub mod paths;
pub mod planners;
pub mod spaces;
pub mod verify;

pub use error::{Error, Result};
