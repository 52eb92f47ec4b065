//! Experiment runner: constants manifest, seeded corpora, experiments and acceptance suites.

pub mod constants;
pub mod corpus;
pub mod criteria;
pub mod experiments;
pub mod runner;

pub use constants::Constants;
pub use criteria::{Check, CriterionReport};
pub use runner::{Experiment, ExperimentConfig, RunOutcome};
