//! Toolkit for experimenting with the traveling-salesman criterion for
//! non-amenability of finitely generated groups.

pub mod analysis;
pub mod error;
pub mod group;
pub mod label;
mod lce;
pub mod partition;
pub mod testers;
pub mod word;

pub use error::{Error, Result};
