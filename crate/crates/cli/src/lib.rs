//! Command-line front end for the `dilatio` library.

pub mod commands;
pub mod error;
pub mod fixtures;
pub mod format;
