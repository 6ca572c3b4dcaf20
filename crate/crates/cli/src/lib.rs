//! Configuration loading, the verification suite and figure emission for
//! the `ivory` command.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod emit;
pub mod report;
pub mod suite;

pub use config::{ConfigError, SceneConfig};
pub use report::{Record, Report};
pub use suite::{run_suite, run_suite_with};
