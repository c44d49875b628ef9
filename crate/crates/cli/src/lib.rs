//! Scenario-file driver for `algebroid-core`.

pub mod commands;
pub mod expr;
pub mod scenario;
