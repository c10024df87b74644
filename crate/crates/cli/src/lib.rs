//! Scenario-driven verification runs over the descent engine.

pub mod checks;
pub mod demo;
pub mod registry;
pub mod runner;
pub mod scenario;
