use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::protocol::tree::{NodeId, WitnessTree};
use crate::types::{threshold_quota, AgentId, ThetaParams};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub truthful: bool,
    /// First level (1-based depth of the witnesses) whose confirmed count fell short.
    pub failure_level: Option<usize>,
    /// `D_d` for `d = 1..=h`, indexed `d - 1`.
    pub confirmed_per_level: Vec<usize>,
    pub surviving_edges: usize,
}

/// The per-child predicate run by verification.
///
/// Passes iff the child approves its parent, the parent still has at least
/// `ceil(t * w)` unpruned children, the child's agent has not been named
/// before in this verification, and the parent did not name any agent twice.
/// The child's agent is recorded in `named` whether or not the checks pass, so
/// that a later occurrence of the same agent is always treated as a duplicate.
pub fn checks(
    tree: &WitnessTree,
    child: NodeId,
    parent: NodeId,
    named: &mut HashSet<AgentId>,
    branching: usize,
    threshold: f64,
) -> bool {
    let node = tree.node(child);
    debug_assert_eq!(node.parent, Some(parent));
    let fresh = named.insert(node.agent);
    if !fresh || !node.approves {
        return false;
    }
    let siblings = tree.children(parent);
    let live = siblings.iter().filter(|c| !tree.node(**c).pruned).count();
    if live < threshold_quota(threshold, branching) {
        return false;
    }
    let mut seen = HashSet::with_capacity(siblings.len());
    siblings.iter().all(|c| seen.insert(tree.node(*c).agent))
}

/// Verification: levels are processed from the deepest parents up to the root.
///
/// At parent level `d`, every unpruned parent runs [`checks`] on its unpruned
/// children. Pruned children cannot pass but still claim their agent id, so
/// which occurrence of an agent counts as the duplicate does not depend on `t`.
/// A parent with fewer than `ceil(t * w_{d+1})` passing children is
/// pruned. `D_{d+1}` then counts the passing children whose parent survived, and
/// the prover is untruthful as soon as `D_{d+1} < ceil(t * n_{d+1})`.
///
/// Prune and confirmation marks on the tree are reset and then filled for every
/// level, so [`count_surviving_edges`] is meaningful after a failed verdict too.
pub fn verify(tree: &mut WitnessTree, theta: &ThetaParams) -> Result<Verdict> {
    tree.validate(Some(theta))?;
    tree.reset_marks();

    let height = theta.height();
    let sizes = theta.level_sizes();
    let threshold = theta.threshold();
    let mut levels: Vec<Vec<NodeId>> = vec![Vec::new(); height + 1];
    for id in tree.node_ids() {
        levels[tree.node(id).depth].push(id);
    }

    let mut named: HashSet<AgentId> = HashSet::with_capacity(tree.len());
    named.insert(tree.root().agent);
    let mut confirmed_per_level = vec![0usize; height];
    let mut failure_level = None;

    for depth in (0..height).rev() {
        let branching = theta.branching_at(depth + 1);
        let quota = threshold_quota(threshold, branching);
        for &parent in &levels[depth] {
            if tree.node(parent).pruned {
                continue;
            }
            let kids: Vec<NodeId> = tree.children(parent).to_vec();
            let mut approvals = 0;
            for child in kids {
                let node = tree.node(child);
                if node.pruned {
                    if !named.insert(node.agent) {
                        tree.node_mut(child).duplicate = true;
                    }
                    continue;
                }
                let duplicate = named.contains(&tree.node(child).agent);
                if checks(tree, child, parent, &mut named, branching, threshold) {
                    tree.node_mut(child).confirmed = true;
                    approvals += 1;
                } else if duplicate {
                    let node = tree.node_mut(child);
                    node.duplicate = true;
                    node.pruned = true;
                }
            }
            if approvals < quota {
                tree.node_mut(parent).pruned = true;
            }
        }
        let confirmed = levels[depth + 1]
            .iter()
            .filter(|&&c| {
                let node = tree.node(c);
                node.confirmed && !node.pruned && !tree.node(node.parent.expect("non-root")).pruned
            })
            .count();
        confirmed_per_level[depth] = confirmed;
        if failure_level.is_none() && confirmed < threshold_quota(threshold, sizes[depth]) {
            failure_level = Some(depth + 1);
        }
    }

    Ok(Verdict {
        truthful: failure_level.is_none(),
        failure_level,
        confirmed_per_level,
        surviving_edges: count_surviving_edges(tree),
    })
}

/// Approval edges whose child and parent both survive verification, i.e. the
/// child is confirmed and every node on its path to the root is unpruned.
pub fn count_surviving_edges(tree: &WitnessTree) -> usize {
    let mut alive = vec![false; tree.len()];
    alive[0] = !tree.root().pruned;
    let mut count = 0;
    for id in tree.node_ids().skip(1) {
        let node = tree.node(id);
        let parent = node.parent.expect("non-root");
        if alive[parent.0] && node.confirmed && !node.pruned {
            alive[id.0] = true;
            count += 1;
        }
    }
    count
}

/// Approval edges connected to the root through approving, non-duplicate
/// witnesses, ignoring quota pruning. This is the quantity the expected-edge
/// recurrence models: a depth-`d` edge counts iff its whole chain approves.
///
/// Duplicates are resolved as in verification: the root is named first, then
/// witnesses deepest level first in insertion order; later occurrences drop out.
pub fn count_approval_chain_edges(tree: &WitnessTree) -> usize {
    let mut named: HashSet<AgentId> = HashSet::with_capacity(tree.len());
    named.insert(tree.root().agent);
    let mut fresh = vec![false; tree.len()];
    let mut order: Vec<NodeId> = tree.node_ids().skip(1).collect();
    // stable sort keeps insertion order within a level
    order.sort_by_key(|id| std::cmp::Reverse(tree.node(*id).depth));
    for id in order {
        fresh[id.0] = named.insert(tree.node(id).agent);
    }
    let mut alive = vec![false; tree.len()];
    alive[0] = true;
    let mut count = 0;
    for id in tree.node_ids().skip(1) {
        let node = tree.node(id);
        if alive[node.parent.expect("non-root").0] && node.approves && fresh[id.0] {
            alive[id.0] = true;
            count += 1;
        }
    }
    count
}
