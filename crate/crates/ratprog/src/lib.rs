//! File formats, parallel search, and the `ratprog` command line.

pub mod cli;
pub mod device;
pub mod error;
pub mod kernel;
pub mod models;
pub mod report;
pub mod samples;
pub mod search;
