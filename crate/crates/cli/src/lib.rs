//! Configuration, output formats and subcommands of the `mkdv` binary.

pub mod app;
pub mod config;
pub mod io;
