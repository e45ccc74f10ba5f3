//! Configuration, artifacts, residual checks and the command implementations.

pub mod commands;
pub mod config;
pub mod output;
pub mod residual;
