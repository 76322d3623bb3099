//! Discounted values and optimal signalling for Markovian persuasion, with
//! numerical checks of the value trajectories, a Monte Carlo simulator for
//! the auxiliary erasure game, and a solver for Markov chain games.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod gamma;
pub mod grid;
pub mod instances;
pub mod markov;
pub mod mcgame;
pub mod persuasion;
pub mod scenario;
pub mod trajectories;

pub use error::{Error, Result};
pub use grid::SimplexGrid;
pub use markov::{
    classify_chain, invariant_distribution, mixing_steps, push_belief, Belief, ChainClassification,
    StochasticMatrix,
};
pub use persuasion::{GridValueFunction, PersuasionInstance, SplitPolicy};
pub use scenario::{parse_config, run_scenario, RunReport, ScenarioConfig};
