//! Adaptive social-network model of cultural diffusion with heterogeneous
//! agents.
//!
//! Two initially distant cultural groups are wired into a directed weighted
//! network. Agents repeatedly pick an information source, accept or reject
//! its culture with a probability that decays with cultural distance, and
//! strengthen or weaken the tie accordingly. Each agent carries its own
//! tolerance, culture change rate and weight change rate, drawn around
//! common means with configurable across-agent spread.
//!
//! The crate is `no_std` (with `alloc`): simulation, outcome metrics, seed
//! derivation, sweep bookkeeping and the regression/ANOVA analysis. File
//! formats, threading and the command line live in the `fragnet` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod engine;
pub mod error;
pub mod metrics;
pub mod model;
pub mod network;
pub mod seed;
pub mod stats;
pub mod sweep;

pub use engine::{run, run_observed, ActionOutcome, SimConfig, SimState, SourceChoice, StepStats};
pub use error::{Error, Result};
pub use metrics::{
    average_shortest_path_length, directed_average_path_length, mean_intergroup_cultural_distance, weak_components,
    RunResult, SplMetric,
};
pub use model::{
    acceptance_probability, mix_culture, reinforce_weight, sample_attributes, weaken_weight, Agent,
    BehavioralAttributes, CulturalVector, DiversityParams, Group,
};
pub use network::Network;
pub use seed::derive_seed;
pub use sweep::{ResultTable, RunJob, SweepSpec};
