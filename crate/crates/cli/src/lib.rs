//! Scenario runner and acceptance catalog for `varqdyn`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod config;
pub mod error;
pub mod output;
pub mod scenario;

pub use config::{Method, Model, Overrides, Scenario};
pub use error::{CliError, CliResult};
pub use scenario::{run, RunOutput};
