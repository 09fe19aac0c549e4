//! Construction and verification of the admissible data behind simple
//! locally conformally product structures.

pub mod admissibility;
pub mod error;
pub mod fixtures;
pub mod group;
pub mod json;
pub mod linalg;
pub mod metric;
pub mod numfield;
pub mod pipeline;
pub mod report;
pub mod reproduce;

pub use error::{Error, Result};
