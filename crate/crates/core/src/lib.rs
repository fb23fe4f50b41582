//! Asynchronous multi-agent systems as 1-safe labelled Petri nets.
//!
//! Agents are deterministic labelled transition systems ([`mas::Lts`]) that
//! synchronise on shared event labels. Each agent is translated into a
//! state-machine net ([`synthesis::agent_to_net`]), the agent nets are fused
//! on common labels ([`compose::compose_nets`]), and the 1-liveness of a
//! fused transition is decided on label-selected subsystems
//! ([`liveness::check_1liveness`]) instead of the full global net whenever
//! that is enough.

pub mod cli;
pub mod compose;
pub mod dot;
mod error;
pub mod gen;
pub mod liveness;
pub mod mas;
pub mod model;
pub mod net;
pub mod synthesis;

pub use error::{Error, Result};
