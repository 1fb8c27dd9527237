//! Command-line front end: run configuration, suite execution and report
//! serialization for the `wsuper` checks.

pub mod cli;
pub mod config;
pub mod report;
pub mod run;

pub use config::{RunConfig, Suite};
pub use report::{emit_report, SuiteReport};
pub use run::run;
