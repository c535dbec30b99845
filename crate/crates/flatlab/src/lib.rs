//! Surface files, reports, experiment drivers and the `flatlab` command line.

pub mod cli;
pub mod experiment;
pub mod format;
pub mod parallel;
pub mod report;
