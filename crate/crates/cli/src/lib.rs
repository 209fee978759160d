//! Scenario runner library behind the `simlab` binary.

pub mod runner;
pub mod scenario;
