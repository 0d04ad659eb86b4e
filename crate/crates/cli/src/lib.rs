//! Library side of the `pathscatter` command line tool: configuration
//! parsing, dispatch and result files.

pub mod config;
pub mod output;
pub mod run;
