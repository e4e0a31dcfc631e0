//! Configuration, orchestration and report files for the `bing` binary.

pub mod commands;
pub mod config;
pub mod emit;
pub mod svg;

pub use commands::{execute, Outcome, Subcommand};
pub use config::{parse_config, parse_settings, ConfigError, NumberFormat, Settings};
pub use emit::emit_csv;
pub use svg::render_svg;
