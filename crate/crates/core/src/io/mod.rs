//! Configuration files and plain-text field output.

mod config;
mod snapshot;

pub use config::{parse_config, parse_config_str, ConfigFile, Entry, SECTIONS};
pub use snapshot::{read_snapshot, write_snapshot, Snapshot};
