//! Command-line front end and file formats for the decay-rate pipeline.
//!
//! The computational core lives in `eigendecay-core`; this crate adds the
//! polynomial JSON loader, report serialization (JSON/CSV), polar SVG
//! emitters and the `eigendecay` binary with subcommands `analyze`,
//! `rotinv`, `1d`, `smoothness` and `example`.

pub mod cli;
pub mod formats;
pub mod run;
pub mod svg;

pub use run::{
    cmd_1d, cmd_analyze, cmd_example, cmd_rotinv, cmd_smoothness, AnalyzeConfig, EmitFlags,
    ExampleConfig, OneDConfig, RotinvConfig, SmoothnessConfig, EXIT_EMPTY, EXIT_INPUT,
    EXIT_NOT_ELLIPTIC, EXIT_NOT_ROTINV, EXIT_OK,
};
