//! Autonomous on-orbit servicing for collision avoidance.
//!
//! A servicer spacecraft learns an open-loop table of four impulsive burns:
//! two to rendezvous and dock with an endangered target satellite, and two to
//! push the docked stack out of a debris conjunction and bring it back. The
//! table is optimized with the Cross-Entropy method against an episodic
//! two-body simulator.
//!
//! Module map:
//! - [`astro`]: epochs, element/state conversion, Kepler propagation, Lambert.
//! - [`conjunction`]: closest-approach search and short-encounter collision probability.
//! - [`environment`]: hybrid time grid, impulsive burns, docking and reward.
//! - [`scenario`]: case-study and synthetic collision scenarios, scenario files.
//! - [`training`]: Cross-Entropy policy search over action tables.
//! - [`cli`]: the `ooscam` command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod astro;
pub mod cli;
pub mod conjunction;
pub mod environment;
mod error;
pub mod output;
pub mod scenario;
pub mod training;

pub use error::{Error, Result};
