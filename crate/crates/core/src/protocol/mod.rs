//! Commit, tree building, checks and verification.

mod build;
mod commitment;
mod tree;
mod verify;

pub use build::{build_tree, Placement, WitnessSource};
pub use commitment::{commit, commit_random, open, Commitment};
pub use tree::{NodeId, NodeRecord, TreeDocument, TreeNode, WitnessTree};
pub use verify::{checks, count_approval_chain_edges, count_surviving_edges, verify, Verdict};
