//! netforge: adversarial gate-level circuits against black-box netlist classifiers.
//!
//! The crate drives a single multi-task reinforcement-learning agent over
//! functionality-preserving logic-synthesis moves. Each agent action selects a
//! standard-cell allowlist; the circuit is unmapped to an and-inverter graph,
//! resynthesized with a fixed `rewrite -> balance -> refactor` recipe, and
//! remapped under the chosen allowlist. Every move keeps the Boolean function
//! intact, which is checked by exhaustive or randomized equivalence.
//!
//! Module map:
//! - [`netlist`]: gate-level circuits, BLIF and structural-Verilog I/O, design-rule checks
//! - [`aig`]: and-inverter graphs, the four transforms, simulation, equivalence
//! - [`techmap`]: the eleven agent actions and constrained technology mapping
//! - [`features`]: the 13-entry circuit state vector and agent observations
//! - [`oracles`]: built-in surrogate classifiers, dataset generators, adapter protocol
//! - [`env`]: the contextual MDP environment with sparse end-of-episode rewards
//! - [`ppo`]: from-scratch PPO trainer and the attack driver
//! - [`corpus`]: small hand-checkable circuits and demo pools

pub mod aig;
pub mod corpus;
pub mod env;
pub mod features;
pub mod netlist;
pub mod oracles;
pub mod ppo;
pub mod techmap;
mod truth;

pub use truth::{Cube, TruthTable};
