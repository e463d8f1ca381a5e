//! Command-line driver for the `clebsch` crate: configuration, runs and
//! artifact I/O. The binary in `main.rs` is a thin wrapper over [`run`].

pub mod commands;
pub mod config;
pub mod io;

pub use commands::{run, Command, RunError};
pub use config::{RunConfig, SCHEMA_VERSION};
