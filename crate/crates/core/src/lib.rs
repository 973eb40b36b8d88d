//! Tree proof-of-position.
//!
//! * [`protocol`] builds and verifies witness trees.
//! * [`analytics`] evaluates the closed-form probability model.
//! * [`simulator`] runs agent-based Monte-Carlo experiments.
//! * [`report`] writes CSV/JSON artifacts with a reproducibility header.
//!
//! ```
//! use tpop_core::analytics::{surface_point, Density, Mix};
//! use tpop_core::protocol::{verify, NodeId, WitnessTree};
//! use tpop_core::{AgentId, ThetaParams};
//!
//! # fn main() -> tpop_core::Result<()> {
//! let mut tree = WitnessTree::new(AgentId(0));
//! let a = tree.add_child(NodeId::ROOT, AgentId(1), true);
//! let b = tree.add_child(NodeId::ROOT, AgentId(2), true);
//! tree.add_child(a, AgentId(3), true);
//! tree.add_child(a, AgentId(4), true);
//! tree.add_child(b, AgentId(5), false);
//! tree.add_child(b, AgentId(6), false);
//! assert!(verify(&mut tree, &ThetaParams::deep(0.5))?.truthful);
//!
//! let p = surface_point(&ThetaParams::wide(1.0), Mix::new(0.8, 0.2)?, Density::Infinite)?;
//! println!("TP {:.3} TN {:.3}", p.tp, p.tn);
//! # Ok(())
//! # }
//! ```

pub mod analytics;
pub mod error;
pub mod protocol;
pub mod report;
pub mod simulator;
pub mod types;

pub use error::{Error, Result};
pub use types::{
    classify_state, level_sizes, Agent, AgentId, AgentState, Attributes, Environment, Position, ThetaParams,
};
