//! Command-line front end and local HTTP service for `dbs-core`.

pub mod commands;
pub mod error;
pub mod manifest;
pub mod service;

pub use error::{CliError, Result};
