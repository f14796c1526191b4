//! Config-driven front end for `radial-origin`: one task per invocation, CSV and JSON
//! payloads, and a manifest with checksums.

pub mod config;
pub mod emit;
pub mod error;
pub mod run;

pub use config::{parse_config, parse_config_str, RunConfig, Task};
pub use error::{CliError, ErrorReport};
pub use run::{execute, output_dir, run, Failure, Outcome};
