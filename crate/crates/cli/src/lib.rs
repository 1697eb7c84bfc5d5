//! Command-line and HTTP front ends for the vicinity oracle.

pub mod commands;
pub mod error;
pub mod index;
pub mod response;
pub mod service;

pub use commands::{run, Cli};
pub use error::{exit, CliError};
pub use index::{AnyOracle, QuerySpec};
pub use response::{Dist, QueryResponse};
